"""Exception types shared across the package."""


class OrbitletError(Exception):
    """Base class for all orbitlet errors."""


class OutOfDomain(OrbitletError):
    """Chart point violates a parameter-block bound."""


class DimensionMismatch(OrbitletError):
    """Frequency vector or grid does not match the ambient dimension."""


class NonFinite(OrbitletError):
    """An integrand produced NaN or infinity at a quadrature node."""


class TruncationMissing(OrbitletError):
    """An infinite parameter block was left unclipped."""


class NotRegular(OrbitletError):
    """Frequency lies outside the regular (compact-stabilizer, locally
    closed orbit) set of the dual action."""


class NotRegularRegion(OrbitletError):
    """Region is not contained in the regular set."""


class EmptyProbeGrid(OrbitletError):
    """Admissibility check received no probe frequencies."""


class NotStronglySquareIntegrable(OrbitletError):
    """The requested invariant subspace admits no unit-isometry wavelet
    (unimodular group with infinite quotient mass)."""


class BadContraction(OrbitletError):
    """Step element contracts too weakly in the modular direction."""


class ShapeMismatch(OrbitletError):
    """Sampled-signal arrays disagree with the declared grid shape."""


class ProfileUnevaluable(OrbitletError):
    """Frequency profile cannot be evaluated at a required point."""


class GridMismatch(OrbitletError):
    """Coefficient field and signal grids are incompatible."""


class NotUnimodular(OrbitletError):
    """Operation requires a unimodular group."""


class NotAdmissibleInput(OrbitletError):
    """Operation requires a profile that already passes the
    admissibility check."""


class UnsupportedRegion(OrbitletError):
    """Region combination has no implemented closed form."""


class ConfigError(OrbitletError):
    """Invalid configuration or input file (CLI exit code 2)."""


class NumericalFailure(OrbitletError):
    """A numerical step failed irrecoverably (CLI exit code 3)."""
