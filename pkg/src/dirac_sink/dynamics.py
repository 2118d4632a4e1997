"""Sink-coupled Liouville-von Neumann propagation.

Integrates d(rho)/dt = -i[H, rho] - {W, rho} together with the sink
efficiencies eta_n(t) = Gamma_n * integral of rho_nn, so the trace budget
Tr rho + eta1 + eta2 = 1 is conserved at integrator order.  The identity
part of H (the eps0 shift) commutes with everything and is left out of
the generator; only eps = eps1 - eps2 enters.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np
from scipy.integrate import solve_ivp

from . import csvio
from .errors import StepUnderflow, ToleranceFailure
from .params import DensityMatrix, InitialState, ModelParams, initial_density


@dataclass(frozen=True)
class IntegratorConfig:
    """Integration controls.

    method   "rk45" (adaptive, default) or "rk4" (fixed step)
    dt       step size for rk4; also the sampling quantum for rk45 [ps]
    rtol     relative tolerance (rk45)
    atol     absolute tolerance (rk45)
    t_final  end of the evolution window [ps]
    stride   record every stride-th step: sample spacing dt*stride
    """

    method: str = "rk45"
    dt: float = 1e-3
    rtol: float = 1e-10
    atol: float = 1e-12
    t_final: float = 10.0
    stride: int = 50

    def __post_init__(self):
        if self.method not in ("rk45", "rk4"):
            raise ValueError(f"method must be 'rk45' or 'rk4', got {self.method!r}")
        if not (self.dt > 0 and self.t_final > 0 and self.rtol > 0 and self.atol > 0):
            raise ValueError("dt, t_final, rtol, and atol must all be positive")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")

    @property
    def budget_tol(self) -> float:
        """Bound on |Tr rho + eta1 + eta2 - 1|: 100x the integrator tolerance."""
        if self.method == "rk45":
            return 100.0 * self.rtol
        return 100.0 * max(self.dt**4, 1e-14)

    def sample_times(self) -> np.ndarray:
        step = self.dt * self.stride
        ratio = self.t_final / step
        n = int(np.floor(ratio))
        if ratio - n > 1.0 - 1e-9:
            n += 1
        times = np.minimum(step * np.arange(n + 1), self.t_final)
        if self.t_final - times[-1] > 1e-12 * max(1.0, self.t_final):
            times = np.append(times, self.t_final)
        return times


@dataclass
class TrajectoryRecord:
    """Sampled trajectory of the density matrix and the sink efficiencies."""

    times: np.ndarray
    rho11: np.ndarray
    rho22: np.ndarray
    rho12: np.ndarray
    trace: np.ndarray
    eta1: np.ndarray
    eta2: np.ndarray
    budget_error: np.ndarray
    hermiticity_drift: np.ndarray
    rho_xi11: np.ndarray | None = None
    rho_xi22: np.ndarray | None = None
    rho_xi12: np.ndarray | None = None
    stderr: dict[str, np.ndarray] | None = None

    def header(self) -> list[str]:
        cols = ["t", "rho11", "rho22", "rho12_re", "rho12_im",
                "trace", "eta1", "eta2", "budget_err"]
        if self.rho_xi12 is not None:
            cols += ["rho_xi_11", "rho_xi_22", "rho_xi_12_re", "rho_xi_12_im"]
        if self.stderr is not None:
            cols += [f"stderr_{k}" for k in self.stderr]
        return cols

    def rows(self) -> Iterable[list]:
        for i in range(self.times.size):
            row = [
                float(self.times[i]),
                float(self.rho11[i]),
                float(self.rho22[i]),
                float(self.rho12[i].real),
                float(self.rho12[i].imag),
                float(self.trace[i]),
                float(self.eta1[i]),
                float(self.eta2[i]),
                float(self.budget_error[i]),
            ]
            if self.rho_xi12 is not None:
                row += [
                    float(self.rho_xi11[i]),
                    float(self.rho_xi22[i]),
                    float(self.rho_xi12[i].real),
                    float(self.rho_xi12[i].imag),
                ]
            if self.stderr is not None:
                row += [float(v[i]) for v in self.stderr.values()]
            yield row

    def to_csv(self, target) -> None:
        csvio.write_csv(target, self.header(), self.rows())


def dynamics_hamiltonian(p: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """Traceless Hermitian part and escape matrix entering the rho equation.

    Built from eps alone so that shifting both site energies by the same
    constant leaves the generator bitwise unchanged.
    """
    h = np.array(
        [[0.5 * p.eps, 0.5 * np.conj(p.v)], [0.5 * p.v, -0.5 * p.eps]], dtype=complex
    )
    w = np.array([[0.5 * p.gamma1, 0.0], [0.0, 0.5 * p.gamma2]], dtype=complex)
    return h, w


def _liouville_rhs(h: np.ndarray, w: np.ndarray, g1: float, g2: float):
    def rhs(t, y):
        rho = y[:4].reshape(2, 2)
        drho = -1j * (h @ rho - rho @ h) - (w @ rho + rho @ w)
        return np.concatenate(
            [drho.reshape(-1), [g1 * rho[0, 0], g2 * rho[1, 1]]]
        )

    return rhs


def _rk4_path(rhs, y0: np.ndarray, cfg: IntegratorConfig) -> tuple[np.ndarray, np.ndarray]:
    n_steps = max(1, int(np.ceil(cfg.t_final / cfg.dt - 1e-12)))
    dt = cfg.t_final / n_steps
    y = y0.copy()
    times = [0.0]
    states = [y.copy()]
    t = 0.0
    for k in range(1, n_steps + 1):
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1)
        k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2)
        k4 = rhs(t + dt, y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = k * dt
        if k % cfg.stride == 0 or k == n_steps:
            times.append(t)
            states.append(y.copy())
    return np.array(times), np.array(states).T


def _integrate(rhs, y0: np.ndarray, cfg: IntegratorConfig) -> tuple[np.ndarray, np.ndarray]:
    if cfg.method == "rk4":
        return _rk4_path(rhs, y0, cfg)
    times = cfg.sample_times()
    sol = solve_ivp(
        rhs,
        (0.0, cfg.t_final),
        y0,
        method="RK45",
        t_eval=times,
        rtol=cfg.rtol,
        atol=cfg.atol,
    )
    if sol.status == -1:
        raise StepUnderflow(f"adaptive integrator failed: {sol.message}")
    return sol.t, sol.y


def _record_from_states(
    times: np.ndarray, states: np.ndarray, cfg: IntegratorConfig, extra=None
) -> TrajectoryRecord:
    rho = states[:4].reshape(2, 2, -1)
    drift = np.abs(rho - rho.conj().transpose(1, 0, 2)).max(axis=(0, 1))
    rho = 0.5 * (rho + rho.conj().transpose(1, 0, 2))
    rho11 = rho[0, 0].real
    rho22 = rho[1, 1].real
    rho12 = rho[0, 1]
    eta1 = states[-2].real
    eta2 = states[-1].real
    trace = rho11 + rho22
    budget = np.abs(trace + eta1 + eta2 - 1.0)
    if budget.max() > cfg.budget_tol:
        raise ToleranceFailure(
            f"trace budget error {budget.max():.3e} exceeds {cfg.budget_tol:.3e}"
        )
    rec = TrajectoryRecord(
        times=times,
        rho11=rho11,
        rho22=rho22,
        rho12=rho12,
        trace=trace,
        eta1=eta1,
        eta2=eta2,
        budget_error=budget,
        hermiticity_drift=drift,
    )
    if extra is not None:
        rho_xi = extra[:4].reshape(2, 2, -1)
        xi_drift = np.abs(rho_xi - rho_xi.conj().transpose(1, 0, 2)).max(axis=(0, 1))
        rec.hermiticity_drift = np.maximum(rec.hermiticity_drift, xi_drift)
        rho_xi = 0.5 * (rho_xi + rho_xi.conj().transpose(1, 0, 2))
        rec.rho_xi11 = rho_xi[0, 0].real
        rec.rho_xi22 = rho_xi[1, 1].real
        rec.rho_xi12 = rho_xi[0, 1]
    return rec


def propagate(
    p: ModelParams,
    rho0: DensityMatrix | InitialState | str | np.ndarray,
    cfg: IntegratorConfig | None = None,
) -> TrajectoryRecord:
    """Evolve rho(t) and the accumulated efficiencies from a validated start.

    The efficiencies ride along as extra ODE components
    (d eta_n/dt = Gamma_n rho_nn), so their error stays at integrator
    order.  Hermiticity is restored by symmetrizing at the sample points;
    the pre-symmetrization drift is kept in the record.
    """
    if cfg is None:
        cfg = IntegratorConfig()
    rho0 = initial_density(rho0, p)
    h, w = dynamics_hamiltonian(p)
    rhs = _liouville_rhs(h, w, p.gamma1, p.gamma2)
    y0 = np.concatenate([rho0.matrix.reshape(-1), [0.0, 0.0]]).astype(complex)
    times, states = _integrate(rhs, y0, cfg)
    return _record_from_states(times, states, cfg)


@dataclass
class EfficiencyCurve:
    """eta_n(tau) across a Gamma1 grid, with the eta1 argmax report."""

    gamma1: np.ndarray
    eta1: np.ndarray
    eta2: np.ndarray
    argmax_gamma1: float
    argmax_eta1: float
    interior_maximum: bool

    def header(self) -> list[str]:
        return ["gamma1", "eta1", "eta2"]

    def rows(self):
        for g, e1, e2 in zip(self.gamma1, self.eta1, self.eta2):
            yield [float(g), float(e1), float(e2)]

    def to_csv(self, target) -> None:
        csvio.write_csv(target, self.header(), self.rows())


def efficiency_curve(
    p: ModelParams,
    rho0: DensityMatrix | InitialState | str | np.ndarray,
    gamma1_grid: np.ndarray,
    cfg: IntegratorConfig | None = None,
) -> EfficiencyCurve:
    """Final-time efficiencies along a Gamma1 sweep (other parameters fixed).

    tau = cfg.t_final should be long enough for the efficiencies to
    saturate; the Fig.-style default of 10 ps does that for rates of
    order 1.
    """
    if cfg is None:
        cfg = IntegratorConfig()
    gamma1_grid = np.asarray(gamma1_grid, dtype=float)
    eta1 = np.empty_like(gamma1_grid)
    eta2 = np.empty_like(gamma1_grid)
    for i, g1 in enumerate(gamma1_grid):
        rec = propagate(replace(p, gamma1=float(g1)), rho0, cfg)
        eta1[i] = rec.eta1[-1]
        eta2[i] = rec.eta2[-1]
    j = int(np.argmax(eta1))
    return EfficiencyCurve(
        gamma1=gamma1_grid,
        eta1=eta1,
        eta2=eta2,
        argmax_gamma1=float(gamma1_grid[j]),
        argmax_eta1=float(eta1[j]),
        interior_maximum=bool(0 < j < gamma1_grid.size - 1),
    )
