"""Exception hierarchy shared by the core modules, agents and CLI."""


class ExclusionCodesError(Exception):
    """Base class for all domain errors.

    ``error_type`` is the label agents report back in their error payloads and
    ``exit_code`` the status the CLI exits with.
    """

    error_type = "internal"
    exit_code = 1


class InvalidBlochError(ExclusionCodesError):
    """Bloch vector outside the unit ball (or not unit where required)."""

    error_type = "invalid_bloch"


class DimensionError(ExclusionCodesError):
    """Operator shapes do not match."""

    error_type = "dimension"


class InvalidWeightError(ExclusionCodesError):
    """Effect weight outside [0, 1]."""

    error_type = "invalid_weight"


class NumericConsistencyError(ExclusionCodesError):
    """A quantity that must be real or normalized is not, beyond tolerance."""

    error_type = "numeric_consistency"


class ProtocolValidationError(ExclusionCodesError):
    """A state, POVM, protocol, strategy or matrix violates its invariants."""

    error_type = "validation"


class InvalidTaskError(ExclusionCodesError):
    """Task parameters out of range."""

    error_type = "invalid_task"


class CompositionError(ExclusionCodesError):
    """Protocols cannot be composed."""

    error_type = "composition"


class EnumerationTooLargeError(ExclusionCodesError):
    """Classical enumeration would exceed the configured budget."""

    error_type = "budget"
    exit_code = 2


class DegenerateParameterizationError(ExclusionCodesError):
    """Planar POVM weights are undefined at this point of the angle domain."""

    error_type = "degenerate_parameterization"


class UnsupportedGeometryError(ExclusionCodesError):
    """Measurements outside the planar rank-one qubit family."""

    error_type = "unsupported_geometry"


class DomainError(ExclusionCodesError):
    """Argument outside the domain of a closed-form map."""

    error_type = "domain"


class InvalidDistributionError(ExclusionCodesError):
    """Vector is not a probability distribution."""

    error_type = "invalid_distribution"
