"""Complex spectrum of the effective non-Hermitian Hamiltonian.

Eigenvalues come out of the closed form E_{1,2} = lambda0/2 +- Omega/2 with
Omega = sqrt(|V|^2 + (eps - i*Gamma)^2).  The square-root branch is fixed to
Re Omega >= 0 (tie broken toward Im Omega >= 0) so that index 1 is always
the "+" branch; superradiant/subradiant identification is done afterwards
by sorting the half-widths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import MonotoneNoMax, NoRootInRange, RegimeViolation
from .params import ModelParams, effective_hamiltonian


def principal_omega(v: complex, eps: float, gamma: float) -> complex:
    """sqrt(|V|^2 + (eps - i*Gamma)^2) on the Re >= 0 branch (tie: Im >= 0)."""
    z = complex(eps, -gamma)
    w = np.sqrt(complex(abs(v) ** 2 + z * z))
    if w.real == 0.0:
        # numpy follows the sign of the zero imaginary part; pin the tie
        w = complex(0.0, abs(w.imag))
    return complex(w)


@dataclass(frozen=True)
class ComplexSpectrum:
    """Both complex eigenvalues split into position and half-width."""

    e1: float
    e2: float
    y1: float
    y2: float
    omega: complex
    spacing: float

    @property
    def etilde1(self) -> complex:
        return complex(self.e1, -self.y1)

    @property
    def etilde2(self) -> complex:
        return complex(self.e2, -self.y2)

    @property
    def width_sum(self) -> float:
        return self.y1 + self.y2


@dataclass(frozen=True)
class BranchLabel:
    superradiant: int
    subradiant: int


def spectrum(p: ModelParams) -> ComplexSpectrum:
    om = principal_omega(p.v, p.eps, p.gamma)
    et1 = 0.5 * p.lambda0 + 0.5 * om
    et2 = 0.5 * p.lambda0 - 0.5 * om
    return ComplexSpectrum(
        e1=et1.real,
        e2=et2.real,
        y1=-et1.imag,
        y2=-et2.imag,
        omega=om,
        spacing=et1.real - et2.real,
    )


def label_branches(cs: ComplexSpectrum) -> BranchLabel:
    if cs.y1 >= cs.y2:
        return BranchLabel(superradiant=1, subradiant=2)
    return BranchLabel(superradiant=2, subradiant=1)


def subradiant_width(p: ModelParams) -> float:
    """min(Y1, Y2); the branch-stable restatement of the narrow width."""
    cs = spectrum(p)
    return min(cs.y1, cs.y2)


# --- exceptional-point locus -------------------------------------------------

@dataclass(frozen=True)
class EPTest:
    distance: float
    is_ep: bool
    tol: float


def default_ep_tol(v: complex) -> float:
    # scale-aware: the locus function X^2+Y^2+Z^2 carries units of V^2
    return 1e-10 * max(1.0, abs(v) ** 2)


def ep_locus_test(p: ModelParams, tol: float | None = None) -> EPTest:
    """Distance |X^2 + Y^2 + Z^2| to the EP locus, X=Re V, Y=Im V, Z=eps-i*Gamma."""
    if tol is None:
        tol = default_ep_tol(p.v)
    x, y = p.v.real, p.v.imag
    z = complex(p.eps, -p.gamma)
    dist = abs(x * x + y * y + z * z)
    return EPTest(distance=dist, is_ep=dist <= tol, tol=tol)


# --- biorthogonal eigenvectors ----------------------------------------------

@dataclass(frozen=True)
class BiorthogonalBasis:
    """Right/left eigenpairs of H - iW.

    right holds column eigenvectors u_1, u_2; left holds row covectors
    (bras), so the biorthogonal pairing is the plain bilinear product
    left[a] @ right[:, b].  raw_overlaps are the self-pairings of the
    unit-normalized vectors; they collapse toward 0 at an exceptional
    point.  Away from degeneracy the left rows are rescaled so that
    left @ right = I; at (near) an EP `degenerate` is set and the rows
    stay unit-normalized instead.
    """

    right: np.ndarray
    left: np.ndarray
    raw_overlaps: np.ndarray
    degenerate: bool

    @property
    def norms(self) -> np.ndarray:
        return self.raw_overlaps


def _pick(candidates):
    norms = [np.linalg.norm(c) for c in candidates]
    i = int(np.argmax(norms))
    if norms[i] == 0.0:
        return None
    return candidates[i] / norms[i]


def biorthogonal_eigenvectors(
    p: ModelParams, degeneracy_tol: float | None = None
) -> BiorthogonalBasis:
    """Right and left eigenvectors with their biorthogonal self-overlaps.

    Both eigenvector formulas of the traceless 2x2 block are evaluated and
    the better-conditioned one kept, which stays stable through V -> 0 and
    through the eigenvalue crossing.
    """
    if degeneracy_tol is None:
        degeneracy_tol = default_ep_tol(p.v)
    om = principal_omega(p.v, p.eps, p.gamma)
    z = complex(p.eps, -p.gamma)
    v = p.v

    u1 = _pick([np.array([om + z, v]), np.array([np.conj(v), om - z])])
    u2 = _pick([np.array([z - om, v]), np.array([np.conj(v), -(om + z)])])
    w1 = _pick([np.array([om + z, np.conj(v)]), np.array([v, om - z])])
    w2 = _pick([np.array([z - om, np.conj(v)]), np.array([v, -(om + z)])])
    if u1 is None or u2 is None:
        # traceless block is exactly zero: any basis is an eigenbasis
        u1, u2 = np.array([1.0 + 0j, 0.0]), np.array([0.0, 1.0 + 0j])
        w1, w2 = u1.copy(), u2.copy()

    raw = np.array([w1 @ u1, w2 @ u2])
    degenerate = abs(om) ** 2 <= degeneracy_tol
    left = np.vstack([w1, w2])
    if not degenerate:
        left = left / raw[:, None]
    right = np.column_stack([u1, u2])
    return BiorthogonalBasis(
        right=right, left=left, raw_overlaps=raw, degenerate=degenerate
    )


def eig_oracle(p: ModelParams) -> np.ndarray:
    """Eigenvalues of H - iW from the generic dense solver, sorted to match
    the branch convention of spectrum()."""
    h, w = effective_hamiltonian(p)
    vals = np.linalg.eigvals(h - 1j * w)
    cs = spectrum(p)
    if abs(vals[0] - cs.etilde1) + abs(vals[1] - cs.etilde2) > abs(
        vals[1] - cs.etilde1
    ) + abs(vals[0] - cs.etilde2):
        vals = vals[::-1]
    return vals


# --- resonance-overlap criterion ----------------------------------------------

def _criterion_residual(gamma1: float, eps: float, v_abs: float, gamma2: float) -> float:
    g0 = 0.5 * (gamma1 + gamma2)
    g = 0.5 * (gamma1 - gamma2)
    omega0_sq = eps * eps + v_abs * v_abs
    return g0**4 + g0**2 * g**2 - omega0_sq * g0**2 - eps * eps * g * g


def _bisect(f, a: float, b: float, xtol: float) -> float:
    fa, fb = f(a), f(b)
    while b - a > xtol:
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m
        if (fa < 0.0) != (fm < 0.0):
            b, fb = m, fm
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def overlap_criterion_solve(
    eps: float,
    v: complex,
    gamma2: float,
    gamma1_max: float | None = None,
    n_scan: int = 4096,
    xtol: float = 1e-12,
) -> np.ndarray:
    """Gamma1 values where the overlap condition Gamma0 = spacing holds.

    The condition is solved through its polynomial form
    Gamma0^4 + Gamma0^2 Gamma^2 - Omega0^2 Gamma0^2 - eps^2 Gamma^2 = 0
    by scanning [0, gamma1_max] for sign changes and bisecting each
    bracket.  Squaring introduces a spurious root at Gamma0 = 0, so every
    candidate is checked against the defining equation before being kept.
    """
    v_abs = abs(v)
    omega0 = math.hypot(eps, v_abs)
    if gamma1_max is None:
        gamma1_max = 10.0 * math.hypot(omega0, eps)
    f = lambda g1: _criterion_residual(g1, eps, v_abs, gamma2)

    grid = np.linspace(0.0, gamma1_max, n_scan)
    fvals = np.array([f(g) for g in grid])
    candidates = [float(g) for g, fv in zip(grid, fvals) if fv == 0.0]
    for a, b, fa, fb in zip(grid[:-1], grid[1:], fvals[:-1], fvals[1:]):
        if fa == 0.0 or fb == 0.0:
            continue
        if (fa < 0.0) != (fb < 0.0):
            candidates.append(_bisect(f, float(a), float(b), xtol))

    roots = []
    for g1 in sorted(candidates):
        p = ModelParams.symmetric(eps, g1, gamma2, v)
        cs = spectrum(p)
        scale = max(1.0, p.gamma0, omega0)
        if abs(p.gamma0 - cs.spacing) <= 1e-8 * scale:
            if not roots or g1 - roots[-1] > 1e-8 * max(1.0, g1):
                roots.append(g1)
    if not roots:
        raise NoRootInRange(
            f"no overlap-criterion root on [0, {gamma1_max}] for "
            f"eps={eps}, |V|={v_abs}, gamma2={gamma2}"
        )
    return np.array(roots)


# --- superradiance-transition location ---------------------------------------

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(f, a: float, b: float, xtol: float = 1e-10) -> float:
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


@dataclass(frozen=True)
class STLocation:
    gamma1: float
    width: float


def st_locate(
    eps: float,
    v: complex,
    gamma2: float,
    grid: np.ndarray,
    xtol: float = 1e-10,
) -> STLocation:
    """Gamma1 maximizing the subradiant half-width min(Y1, Y2).

    The coarse grid (>= 100 points) brackets the maximum; a golden-section
    pass between the neighbors of the grid argmax refines it.  A maximum
    sitting on the grid edge means the width is monotone over the grid and
    raises MonotoneNoMax.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 100:
        raise ValueError("st_locate needs a 1-D grid with at least 100 points")

    def width(g1: float) -> float:
        return subradiant_width(ModelParams.symmetric(eps, g1, gamma2, v))

    vals = np.array([width(g) for g in grid])
    i = int(np.argmax(vals))
    if i == 0 or i == grid.size - 1:
        raise MonotoneNoMax(
            "subradiant width has no interior maximum on the supplied grid"
        )
    g_star = _golden_max(width, float(grid[i - 1]), float(grid[i + 1]), xtol)
    return STLocation(gamma1=g_star, width=width(g_star))


# --- perturbative width expansions --------------------------------------------

@dataclass(frozen=True)
class AsymptoticWidths:
    spacing: float
    y1: float
    y2: float
    regime: str


def asymptotic_widths(p: ModelParams, regime: str) -> AsymptoticWidths:
    """Leading-order spacing and half-widths for small or large |Gamma|.

    small (|Gamma| << Omega0):
        spacing ~ Omega0 - Gamma^2 |V|^2 / (2 Omega0^3)
        Y_{1,2} ~ Gamma0/2 +- eps*Gamma/(2 Omega0)
    large (|Gamma| >> Omega0):
        spacing ~ |eps| (1 + |V|^2/(2 Gamma^2))
        Y_1 ~ Gamma1/2 - |V|^2/(4 Gamma),  Y_2 ~ Gamma2/2 + |V|^2/(4 Gamma)

    The widths separate linearly in Gamma while the positions attract
    (small regime); in the large regime each width saturates onto its own
    escape rate.  Regime gates: |Gamma| < Omega0/5 resp. |Gamma| > 5*Omega0.
    """
    g, g0, om0 = p.gamma, p.gamma0, p.omega0
    v_sq = abs(p.v) ** 2
    if regime == "small":
        if g == 0.0:
            return AsymptoticWidths(spacing=om0, y1=0.5 * g0, y2=0.5 * g0, regime=regime)
        if not abs(g) < om0 / 5.0:
            raise RegimeViolation(
                f"small-Gamma expansion needs |Gamma| < Omega0/5, got "
                f"|Gamma|={abs(g)}, Omega0={om0}"
            )
        shift = 0.5 * p.eps * g / om0
        return AsymptoticWidths(
            spacing=om0 - 0.5 * g * g * v_sq / om0**3,
            y1=0.5 * g0 + shift,
            y2=0.5 * g0 - shift,
            regime=regime,
        )
    if regime == "large":
        if not abs(g) > 5.0 * om0 or g == 0.0:
            raise RegimeViolation(
                f"large-Gamma expansion needs |Gamma| > 5*Omega0, got "
                f"|Gamma|={abs(g)}, Omega0={om0}"
            )
        return AsymptoticWidths(
            spacing=abs(p.eps) * (1.0 + 0.5 * v_sq / (g * g)),
            y1=0.5 * p.gamma1 - 0.25 * v_sq / g,
            y2=0.5 * p.gamma2 + 0.25 * v_sq / g,
            regime=regime,
        )
    raise ValueError(f"regime must be 'small' or 'large', got {regime!r}")
