"""Random-telegraph noise on the site energies: exact closure and MC oracle.

The diagonal RTP xi(t) in {+sigma, -sigma} with flip rate gamma has
correlation chi(s) = sigma^2 exp(-2 gamma |s|).  Because xi^2 = sigma^2,
the hierarchy for <rho> and <rho^xi> = <xi rho>/sigma closes exactly:

    d<rho>/dt    = -i[H,<rho>]    - {W,<rho>}    - i Bop(<rho^xi>)
    d<rho^xi>/dt = -i[H,<rho^xi>] - {W,<rho^xi>} - i Bop(<rho>) - 2 gamma <rho^xi>

where (Bop M)_mn = (d_m - d_n) M_mn is the commutator with diag(d1, d2).
Only d = d1 - d2 is dynamically relevant; the default split is symmetric.

The Monte-Carlo sampler is the independent statistical oracle: it draws
Poisson flip times per trajectory and propagates each constant-noise
segment exactly through the eigendecomposition of the augmented
(rho, eta) generator, so there is no time-discretization bias.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    IntegratorConfig,
    TrajectoryRecord,
    _integrate,
    _record_from_states,
    dynamics_hamiltonian,
    propagate,
)
from .errors import DiracSinkError, SeedRequired
from .params import DensityMatrix, InitialState, ModelParams, initial_density


@dataclass(frozen=True)
class NoiseParams:
    """Diagonal RTP noise amplitudes and correlation rate.

    d1, d2       site noise amplitudes d_m = lambda_m * sigma [ps^-1]
    gamma_noise  half the correlation decay rate gamma > 0 [ps^-1]
    sigma        RTP magnitude; normalized to 1, kept for the correlation
    """

    d1: float
    d2: float
    gamma_noise: float
    sigma: float = 1.0

    def __post_init__(self):
        if not self.gamma_noise > 0.0:
            raise ValueError(f"gamma_noise must be positive, got {self.gamma_noise}")
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    @classmethod
    def symmetric(cls, d: float, gamma_noise: float, sigma: float = 1.0) -> "NoiseParams":
        return cls(0.5 * d, -0.5 * d, gamma_noise, sigma)

    @property
    def d(self) -> float:
        return self.d1 - self.d2

    def correlation(self, lag) -> np.ndarray:
        return self.sigma**2 * np.exp(-2.0 * self.gamma_noise * np.abs(np.asarray(lag)))


def propagate_noisy(
    p: ModelParams,
    n: NoiseParams,
    rho0: DensityMatrix | InitialState | str | np.ndarray,
    cfg: IntegratorConfig | None = None,
) -> TrajectoryRecord:
    """Noise-averaged trajectory from the exact two-block closure.

    At d = 0 the coupling block vanishes identically and <rho^xi> stays
    zero, so the run is delegated to the noiseless propagator (bit-equal
    output) with zero rho_xi columns attached.
    """
    if cfg is None:
        cfg = IntegratorConfig()
    rho0 = initial_density(rho0, p)
    if n.d == 0.0:
        rec = propagate(p, rho0, cfg)
        zeros = np.zeros_like(rec.times)
        rec.rho_xi11 = zeros
        rec.rho_xi22 = zeros.copy()
        rec.rho_xi12 = np.zeros(rec.times.size, dtype=complex)
        return rec
    h, w = dynamics_hamiltonian(p)
    g1, g2 = p.gamma1, p.gamma2
    dd = n.d
    two_gamma = 2.0 * n.gamma_noise

    def rhs(t, y):
        r = y[:4].reshape(2, 2)
        rx = y[4:8].reshape(2, 2)
        b_rx = np.array([[0.0, dd * rx[0, 1]], [-dd * rx[1, 0], 0.0]])
        b_r = np.array([[0.0, dd * r[0, 1]], [-dd * r[1, 0], 0.0]])
        dr = -1j * (h @ r - r @ h) - (w @ r + r @ w) - 1j * b_rx
        drx = (
            -1j * (h @ rx - rx @ h)
            - (w @ rx + rx @ w)
            - 1j * b_r
            - two_gamma * rx
        )
        return np.concatenate(
            [dr.reshape(-1), drx.reshape(-1), [g1 * r[0, 0], g2 * r[1, 1]]]
        )

    y0 = np.concatenate(
        [rho0.matrix.reshape(-1), np.zeros(4), [0.0, 0.0]]
    ).astype(complex)
    times, states = _integrate(rhs, y0, cfg)
    return _record_from_states(
        times, np.vstack([states[:4], states[8:]]), cfg, extra=states[4:8]
    )


# --- Monte-Carlo oracle --------------------------------------------------------

def rtp_flip_schedules(
    n_traj: int, gamma_noise: float, t_final: float, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Initial signs and padded flip-time tables for n_traj RTP paths.

    Each trajectory owns an independent child stream of the seed, so the
    ensemble is reproducible no matter how the work is later distributed.
    Flip times beyond t_final are padded with +inf.
    """
    children = np.random.SeedSequence(seed).spawn(n_traj)
    mean = gamma_noise * t_final
    block = int(mean + 10.0 * math.sqrt(mean + 1.0) + 20.0)
    signs = np.empty(n_traj)
    schedules = []
    for i, child in enumerate(children):
        g = np.random.default_rng(child)
        signs[i] = 1.0 if g.random() < 0.5 else -1.0
        waits = g.exponential(1.0 / gamma_noise, size=block)
        times = np.cumsum(waits)
        while times[-1] <= t_final:
            waits = g.exponential(1.0 / gamma_noise, size=block)
            times = np.concatenate([times, times[-1] + np.cumsum(waits)])
        schedules.append(times[times <= t_final])
    width = max((s.size for s in schedules), default=0) + 1
    flips = np.full((n_traj, width), np.inf)
    for i, s in enumerate(schedules):
        flips[i, : s.size] = s
    return signs, flips


def rtp_values_at(
    signs: np.ndarray, flips: np.ndarray, t: float, sigma: float = 1.0
) -> np.ndarray:
    """xi(t) for every path: initial sign times (-1)^(#flips before t)."""
    n_flips = (flips <= t).sum(axis=1)
    return sigma * signs * np.where(n_flips % 2 == 0, 1.0, -1.0)


def _augmented_generator(p: ModelParams, n: NoiseParams, sign: float) -> np.ndarray:
    """Generator of (rho, eta1, eta2) for frozen noise xi = sign*sigma."""
    h, w = dynamics_hamiltonian(p)
    ht = h + sign * np.diag([n.d1, n.d2]) - 1j * w
    eye = np.eye(2)
    a = -1j * (np.kron(ht, eye) - np.kron(eye, ht.conj()))
    gen = np.zeros((6, 6), dtype=complex)
    gen[:4, :4] = a
    gen[4, 0] = p.gamma1
    gen[5, 3] = p.gamma2
    return gen


class _SegmentPropagator:
    """Exact exp(L*dt) action through a one-time eigendecomposition."""

    def __init__(self, gen: np.ndarray):
        self.w, self.p = np.linalg.eig(gen)
        cond = np.linalg.cond(self.p)
        if not np.isfinite(cond) or cond > 1e8:
            raise DiracSinkError(
                "augmented noise generator is (nearly) defective at these "
                "parameters; nudge them off the exceptional set for the MC oracle"
            )
        self.pinv = np.linalg.inv(self.p)

    def advance(self, states: np.ndarray, dts: np.ndarray) -> np.ndarray:
        modes = self.pinv @ states
        modes *= np.exp(self.w[:, None] * dts[None, :])
        return self.p @ modes


def mc_oracle(
    p: ModelParams,
    n: NoiseParams,
    rho0: DensityMatrix | InitialState | str | np.ndarray,
    cfg: IntegratorConfig | None = None,
    n_traj: int = 10_000,
    rng_seed: int | None = None,
) -> TrajectoryRecord:
    """Trajectory mean and standard error over sampled RTP paths.

    Every path is propagated exactly: between its Poisson flip events the
    noise is constant and the augmented linear system is advanced by its
    matrix exponential, with all paths marched in lockstep from sample
    time to sample time.
    """
    if rng_seed is None:
        raise SeedRequired("mc_oracle needs rng_seed for reproducible runs")
    if n_traj < 100:
        raise ValueError(f"n_traj must be >= 100, got {n_traj}")
    if cfg is None:
        cfg = IntegratorConfig()
    rho0 = initial_density(rho0, p)

    prop = {
        +1.0: _SegmentPropagator(_augmented_generator(p, n, +1.0)),
        -1.0: _SegmentPropagator(_augmented_generator(p, n, -1.0)),
    }
    signs, flips = rtp_flip_schedules(n_traj, n.gamma_noise, cfg.t_final, rng_seed)

    times = cfg.sample_times()
    y0 = np.concatenate([rho0.matrix.reshape(-1), [0.0, 0.0]]).astype(complex)
    states = np.tile(y0[:, None], (1, n_traj))
    xi = signs.copy()
    cur = np.zeros(n_traj)
    ptr = np.zeros(n_traj, dtype=int)

    n_obs = 6  # rho11, rho22, rho12_re, rho12_im, eta1, eta2
    mean = np.zeros((times.size, n_obs))
    sem = np.zeros((times.size, n_obs))
    drift = np.zeros(times.size)

    def advance_masked(mask: np.ndarray, dts: np.ndarray) -> None:
        for sign in (+1.0, -1.0):
            sel = mask & (xi == sign)
            if sel.any():
                states[:, sel] = prop[sign].advance(states[:, sel], dts[sel])

    for k, tk in enumerate(times):
        while True:
            nxt = flips[np.arange(n_traj), ptr]
            due = nxt < tk
            if not due.any():
                break
            advance_masked(due, nxt - cur)
            cur[due] = nxt[due]
            xi[due] = -xi[due]
            ptr[due] += 1
        pending = cur < tk
        if pending.any():
            advance_masked(pending, tk - cur)
            cur[pending] = tk
        drift[k] = max(
            np.abs(states[1] - states[2].conj()).max(),
            np.abs(states[0].imag).max(),
            np.abs(states[3].imag).max(),
        )
        off = 0.5 * (states[1] + states[2].conj())
        obs = np.stack(
            [states[0].real, states[3].real, off.real, off.imag,
             states[4].real, states[5].real]
        )
        mean[k] = obs.mean(axis=1)
        sem[k] = obs.std(axis=1, ddof=1) / math.sqrt(n_traj)

    trace = mean[:, 0] + mean[:, 1]
    eta1, eta2 = mean[:, 4], mean[:, 5]
    return TrajectoryRecord(
        times=times,
        rho11=mean[:, 0],
        rho22=mean[:, 1],
        rho12=mean[:, 2] + 1j * mean[:, 3],
        trace=trace,
        eta1=eta1,
        eta2=eta2,
        budget_error=np.abs(trace + eta1 + eta2 - 1.0),
        hermiticity_drift=drift,
        stderr={
            "rho11": sem[:, 0],
            "rho22": sem[:, 1],
            "rho12_re": sem[:, 2],
            "rho12_im": sem[:, 3],
            "eta1": sem[:, 4],
            "eta2": sem[:, 5],
        },
    )
