"""Exception types shared across the package."""


class DiracSinkError(Exception):
    """Base class for all package-specific failures."""


class InvalidDensity(DiracSinkError):
    """A density matrix violates Hermiticity, positivity, or unit trace."""


class ZeroCouplingPhase(DiracSinkError):
    """A band initial state was requested with V = 0 (phase undefined)."""


class NoRootInRange(DiracSinkError):
    """The overlap-criterion equation has no root in the search interval."""


class MonotoneNoMax(DiracSinkError):
    """The subradiant width has no interior maximum on the supplied grid."""


class RegimeViolation(DiracSinkError):
    """An asymptotic formula was evaluated outside its validity regime."""


class SingularDenominator(DiracSinkError):
    """Closed-form efficiency coefficients are singular at these parameters."""


class ToleranceFailure(DiracSinkError):
    """The propagated trace budget exceeded the allowed error bound."""


class StepUnderflow(DiracSinkError):
    """The adaptive integrator failed to make progress."""


class SeedRequired(DiracSinkError):
    """A Monte-Carlo run was requested without an RNG seed."""


class InvalidGrid(DiracSinkError):
    """A sweep grid specification is malformed."""


class UnknownFigure(DiracSinkError):
    """No preconfigured dataset exists for the requested figure id."""
