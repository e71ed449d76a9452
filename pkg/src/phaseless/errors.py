"""Exception hierarchy shared by all subpackages."""


class PhaselessError(Exception):
    """Base class for every error raised by this package."""


class DomainError(PhaselessError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(PhaselessError, ValueError):
    """Invalid or unknown configuration entry."""


class GeometryError(PhaselessError, ValueError):
    """Obstacle boundaries overlap or are otherwise inconsistent."""


class ResonanceError(PhaselessError, ArithmeticError):
    """The boundary integral system is (numerically) singular at this wavenumber."""

    def __init__(self, k, cond):
        self.k = k
        self.cond = cond
        super().__init__(
            f"boundary system is ill-conditioned at k={k:g} "
            f"(condition estimate {cond:.3e}); try a nearby wavenumber"
        )


class UnsupportedOracleError(PhaselessError, ValueError):
    """The analytic oracle cannot represent the requested configuration."""


class FormatError(PhaselessError, ValueError):
    """A dataset file is malformed."""


class ContractError(PhaselessError, ValueError):
    """Input object lacks metadata required by the operation."""


class DiagnosticError(PhaselessError, RuntimeError):
    """A pipeline stage produced a degenerate result."""


class DisambiguationError(DiagnosticError):
    """No component persists across the two reference points."""
