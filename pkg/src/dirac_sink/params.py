"""Model parameters, unit conventions, and initial-state constructors.

All rates and energies are stored in ps^-1 and time in ps; 1 ps^-1
corresponds to about 0.66 meV.  The conversion is display-only, nothing
internal ever switches units.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidDensity, ZeroCouplingPhase

#: display-only conversion factor, meV per ps^-1
MEV_PER_PS_INV = 0.66

#: seconds -> picoseconds rate conversion (1/s = 1e-12 ps^-1)
_PS_PER_SECOND = 1e-12


def coupling_from_wavevector(qx: float, qy: float, vf: float) -> complex:
    """Inter-sublattice coupling V = 2 vf (qx + i qy) in ps^-1.

    qx, qy are in cm^-1 and vf in cm/s, so vf*q is a plain rate in 1/s;
    the factor 1e-12 converts to ps^-1.  |q| = 1e4 cm^-1 at
    vf = 1e8 cm/s gives |V| = 2 ps^-1.
    """
    return 2.0 * vf * complex(qx, qy) * _PS_PER_SECOND


@dataclass(frozen=True)
class ModelParams:
    """One physical configuration of the two-level sink-coupled model.

    eps1, eps2   renormalized site energies [ps^-1]
    gamma1/2     escape rates into the two sinks [ps^-1], nonnegative
    v            complex inter-sublattice coupling [ps^-1]
    """

    eps1: float
    eps2: float
    gamma1: float
    gamma2: float
    v: complex

    def __post_init__(self):
        if not (self.gamma1 >= 0.0 and self.gamma2 >= 0.0):
            raise ValueError(
                f"escape rates must be nonnegative, got gamma1={self.gamma1}, "
                f"gamma2={self.gamma2}"
            )
        for name in ("eps1", "eps2", "gamma1", "gamma2"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not cmath.isfinite(self.v):
            raise ValueError("v must be finite")
        object.__setattr__(self, "v", complex(self.v))

    @classmethod
    def symmetric(cls, eps: float, gamma1: float, gamma2: float, v: complex) -> "ModelParams":
        """Symmetric split eps1 = -eps2 = eps/2 (observables depend only on eps)."""
        return cls(eps / 2.0, -eps / 2.0, gamma1, gamma2, v)

    @classmethod
    def from_wavevector(
        cls,
        qx: float,
        qy: float,
        vf: float,
        eps1: float = 0.0,
        eps2: float = 0.0,
        gamma1: float = 0.0,
        gamma2: float = 0.0,
    ) -> "ModelParams":
        return cls(eps1, eps2, gamma1, gamma2, coupling_from_wavevector(qx, qy, vf))

    # derived composites; definitions hold exactly by construction
    @property
    def eps0(self) -> float:
        return self.eps1 + self.eps2

    @property
    def eps(self) -> float:
        return self.eps1 - self.eps2

    @property
    def gamma0(self) -> float:
        return 0.5 * (self.gamma1 + self.gamma2)

    @property
    def gamma(self) -> float:
        return 0.5 * (self.gamma1 - self.gamma2)

    @property
    def omega0(self) -> float:
        """Hermitian level repulsion sqrt(eps^2 + |V|^2)."""
        return math.hypot(self.eps, abs(self.v))

    @property
    def lambda0(self) -> complex:
        return complex(self.eps0, -self.gamma0)


def effective_hamiltonian(p: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """Split the effective Hamiltonian into Hermitian H and escape part W.

    H - 1j*W is the full non-Hermitian generator: site energies on the
    diagonal, V/2 off-diagonal, -i Gamma_n/2 escape terms.
    """
    h = np.array(
        [
            [p.eps1, 0.5 * np.conj(p.v)],
            [0.5 * p.v, p.eps2],
        ],
        dtype=complex,
    )
    w = np.array([[0.5 * p.gamma1, 0.0], [0.0, 0.5 * p.gamma2]], dtype=complex)
    return h, w


_HERM_TOL = 1e-12
_TRACE_TOL = 1e-12
_PSD_TOL = 1e-12


@dataclass(frozen=True)
class DensityMatrix:
    """Validated 2x2 density matrix (Hermitian, unit trace, PSD)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise InvalidDensity(f"expected a 2x2 matrix, got shape {m.shape}")
        scale = max(1.0, float(np.abs(m).max()))
        if np.abs(m - m.conj().T).max() > _HERM_TOL * scale:
            raise InvalidDensity("matrix is not Hermitian")
        if abs(m[0, 0].imag) > _HERM_TOL or abs(m[1, 1].imag) > _HERM_TOL:
            raise InvalidDensity("diagonal entries must be real")
        if abs(m.trace().real - 1.0) > _TRACE_TOL:
            raise InvalidDensity(f"trace must be 1, got {m.trace().real!r}")
        p11, p22 = m[0, 0].real, m[1, 1].real
        det = p11 * p22 - abs(m[0, 1]) ** 2
        if p11 < -_PSD_TOL or p22 < -_PSD_TOL or det < -_PSD_TOL:
            raise InvalidDensity(
                f"matrix is not positive semidefinite (rho11={p11}, rho22={p22}, det={det})"
            )
        m = 0.5 * (m + m.conj().T)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def rho11(self) -> float:
        return self.matrix[0, 0].real

    @property
    def rho22(self) -> float:
        return self.matrix[1, 1].real

    @property
    def rho12(self) -> complex:
        return complex(self.matrix[0, 1])


class InitialState(Enum):
    """Named initial conditions; band states need V != 0 for the phase."""

    SITE_A = "siteA"
    SITE_B = "siteB"
    BAND_PLUS = "plus"
    BAND_MINUS = "minus"


def initial_density(
    state: InitialState | str | np.ndarray | DensityMatrix, p: ModelParams
) -> DensityMatrix:
    """Build the density matrix for a named or custom initial state.

    Site states populate one sublattice.  Band states are the |+-> Dirac
    band projectors with rho12 = +-exp(-i phi)/2, phi = arg V; they raise
    ZeroCouplingPhase at V = 0.  A custom matrix is validated, never
    projected onto the valid set.
    """
    if isinstance(state, DensityMatrix):
        return state
    if isinstance(state, np.ndarray) or (
        isinstance(state, (list, tuple)) and not isinstance(state, str)
    ):
        return DensityMatrix(np.asarray(state, dtype=complex))
    if isinstance(state, str):
        try:
            state = InitialState(state)
        except ValueError:
            raise InvalidDensity(
                f"unknown initial state {state!r}; expected one of "
                f"{[s.value for s in InitialState]} or an explicit matrix"
            ) from None
    if state is InitialState.SITE_A:
        return DensityMatrix(np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex))
    if state is InitialState.SITE_B:
        return DensityMatrix(np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex))
    if abs(p.v) == 0.0:
        raise ZeroCouplingPhase("band states are undefined at V = 0 (phase arg V missing)")
    phase = cmath.exp(-1j * cmath.phase(p.v))
    sign = 1.0 if state is InitialState.BAND_PLUS else -1.0
    off = 0.5 * sign * phase
    return DensityMatrix(np.array([[0.5, off], [np.conj(off), 0.5]], dtype=complex))
