"""Closed-form sink efficiencies for a sublattice-B start.

These expressions are the independent oracle for the numeric propagator:

    eta1(t) = eta0 - exp(-Gamma0 t) * (B (Gamma0 cosh(w2 t) + w2 sinh(w2 t))
                                     - C (Gamma0 cos(w1 t) - w1 sin(w1 t)))

with w1 = |Re Omega|, w2 = |Im Omega| and

    eta0 = |V|^2 Gamma0 Gamma1 / (2 (Gamma0^2 + w1^2)(Gamma0^2 - w2^2))
    B    = |V|^2 Gamma1 / (2 (w1^2 + w2^2)(Gamma0^2 - w2^2))
    C    = |V|^2 Gamma1 / (2 (w1^2 + w2^2)(Gamma0^2 + w1^2))
    D    = |V|^2 Gamma1 / (4 (w1^2 + w2^2)(Gamma0 - w2))

eta0 = Gamma0 (B - C), which forces eta1(0) = 0; the code evaluates eta1
through that identity in a form whose hyperbolic part never overflows and
vanishes exactly at t = 0.  Everything here is valid only for Gamma0 > w2
(and |Omega| > 0); outside that the numeric propagator is authoritative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RegimeViolation, SingularDenominator
from .params import InitialState, ModelParams
from .spectral import principal_omega

#: default margin on the Gamma0 > |Im Omega| validity requirement
DENOMINATOR_TOL = 1e-9


@dataclass(frozen=True)
class EfficiencyCoefficients:
    eta0: float
    b: float
    c: float
    d: float
    omega1: float
    omega2: float
    gamma0: float


def coefficients(p: ModelParams, tol: float = DENOMINATOR_TOL) -> EfficiencyCoefficients:
    """Closed-form coefficients for the sublattice-B initial condition.

    Raises SingularDenominator when Gamma0 <= |Im Omega| + tol or when
    Omega = 0 (eigenvalue coalescence); callers fall back to numeric
    propagation there.
    """
    om = principal_omega(p.v, p.eps, p.gamma)
    w1, w2 = abs(om.real), abs(om.imag)
    g0, g1 = p.gamma0, p.gamma1
    v_sq = abs(p.v) ** 2
    om_sq = w1 * w1 + w2 * w2
    if om_sq == 0.0:
        raise SingularDenominator(
            "Omega = 0 (spectrum coalesces); closed form is undefined"
        )
    if g0 <= w2 + tol:
        raise SingularDenominator(
            f"need Gamma0 > |Im Omega| + {tol}, got Gamma0={g0}, |Im Omega|={w2}"
        )
    b = v_sq * g1 / (2.0 * om_sq * (g0 * g0 - w2 * w2))
    c = v_sq * g1 / (2.0 * om_sq * (g0 * g0 + w1 * w1))
    eta0 = v_sq * g0 * g1 / (2.0 * (g0 * g0 + w1 * w1) * (g0 * g0 - w2 * w2))
    d = v_sq * g1 / (4.0 * om_sq * (g0 - w2))
    return EfficiencyCoefficients(
        eta0=eta0, b=b, c=c, d=d, omega1=w1, omega2=w2, gamma0=g0
    )


def eta1_closed(t, p: ModelParams, coeff: EfficiencyCoefficients | None = None):
    """eta1(t) for a SiteB start; scalar or array t."""
    if coeff is None:
        coeff = coefficients(p)
    t = np.asarray(t, dtype=float)
    g0, w1, w2 = coeff.gamma0, coeff.omega1, coeff.omega2
    # e^{-g0 t} (g0 cosh(w2 t) + w2 sinh(w2 t)) recombined into decaying
    # exponentials: both rates are the resonance widths 2*Y_{1,2} >= 0
    hyp = 0.5 * ((g0 + w2) * np.exp(-(g0 - w2) * t) + (g0 - w2) * np.exp(-(g0 + w2) * t))
    osc = np.exp(-g0 * t) * (g0 * np.cos(w1 * t) - w1 * np.sin(w1 * t))
    out = coeff.b * (g0 - hyp) - coeff.c * (g0 - osc)
    return out if out.shape else float(out)


def eta2_closed(t, p: ModelParams, cfg=None):
    """eta2(t) = 1 - Tr rho(t) - eta1(t) for a SiteB start.

    The paper-style pair only exists asymptotically; the exact curve comes
    from the budget identity with the numerically propagated trace.
    """
    from .dynamics import IntegratorConfig, propagate

    t = np.atleast_1d(np.asarray(t, dtype=float))
    if cfg is None:
        cfg = IntegratorConfig()
    coeff = coefficients(p)
    t_end = float(t.max()) if t.max() > 0 else cfg.dt
    n = max(1, int(np.ceil(t_end / cfg.dt)))
    run = IntegratorConfig(
        method=cfg.method, dt=t_end / n, rtol=cfg.rtol, atol=cfg.atol,
        t_final=t_end, stride=1,
    )
    rec = propagate(p, InitialState.SITE_B, run)
    trace = np.interp(t, rec.times, rec.trace)
    out = 1.0 - trace - eta1_closed(t, p, coeff)
    return out if out.size > 1 else float(out[0])


def eta1_asymptotic(t, p: ModelParams, coeff: EfficiencyCoefficients | None = None):
    """Two-term tail eta0 - D exp(-2 Y_sub t), Y_sub = (Gamma0 - w2)/2.

    Only meaningful deep in the tail; enforced as 2*Y_sub*t > 3.
    """
    if coeff is None:
        coeff = coefficients(p)
    t = np.asarray(t, dtype=float)
    rate = coeff.gamma0 - coeff.omega2
    if np.any(rate * t <= 3.0):
        raise RegimeViolation(
            f"asymptotic tail needs 2*Y_sub*t > 3 (rate {rate}); "
            f"smallest rate*t = {float(np.min(rate * t))}"
        )
    out = coeff.eta0 - coeff.d * np.exp(-rate * t)
    return out if out.shape else float(out)


@dataclass
class Eta0Surface:
    """eta0 over a (gamma1, eps) grid with per-cell validity flags."""

    gamma1: np.ndarray
    eps: np.ndarray
    eta0: np.ndarray  # shape (len(eps), len(gamma1)); NaN where invalid
    valid: np.ndarray
    row_argmax_gamma1: np.ndarray  # per eps row; NaN when the row is all-invalid

    def header(self) -> list[str]:
        return ["gamma1", "eps", "eta0", "valid"]

    def rows(self):
        for i, e in enumerate(self.eps):
            for j, g in enumerate(self.gamma1):
                yield [float(g), float(e), float(self.eta0[i, j]), bool(self.valid[i, j])]

    def to_csv(self, target) -> None:
        from . import csvio

        csvio.write_csv(target, self.header(), self.rows())


def eta0_surface(
    gamma1_grid: np.ndarray,
    eps_values: np.ndarray,
    gamma2: float,
    v: complex,
) -> Eta0Surface:
    """Asymptotic first-sink efficiency over (Gamma1, eps) at fixed Gamma2, V.

    Invalid cells (singular coefficients) are flagged and carry NaN; they
    are reported rather than dropped so a consumer sees the full grid.
    """
    gamma1_grid = np.asarray(gamma1_grid, dtype=float)
    eps_values = np.asarray(eps_values, dtype=float)
    eta0 = np.full((eps_values.size, gamma1_grid.size), np.nan)
    valid = np.zeros_like(eta0, dtype=bool)
    for i, e in enumerate(eps_values):
        for j, g1 in enumerate(gamma1_grid):
            try:
                c = coefficients(ModelParams.symmetric(float(e), float(g1), gamma2, v))
            except SingularDenominator:
                continue
            eta0[i, j] = c.eta0
            valid[i, j] = True
    argmax = np.full(eps_values.size, np.nan)
    for i in range(eps_values.size):
        if valid[i].any():
            row = np.where(valid[i], eta0[i], -np.inf)
            argmax[i] = gamma1_grid[int(np.argmax(row))]
    return Eta0Surface(
        gamma1=gamma1_grid, eps=eps_values, eta0=eta0, valid=valid,
        row_argmax_gamma1=argmax,
    )
