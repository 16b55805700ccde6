"""Exception hierarchy shared by the library and the CLI."""


class NonlocalBoxError(Exception):
    """Base class for every error raised by this package."""


class BoxValidationError(NonlocalBoxError, ValueError):
    """A probability table is not a valid no-signaling box."""


class PositivityViolation(BoxValidationError):
    pass


class NormalizationViolation(BoxValidationError):
    pass


class SignalingViolation(BoxValidationError):
    pass


class CriterionError(NonlocalBoxError, ValueError):
    """A criterion cannot be evaluated on the given box."""


class DeterministicMarginal(CriterionError):
    """Some local observable has a deterministic outcome (zero variance)."""


class InvalidD(CriterionError):
    """A marginal-corrected correlation coefficient fell outside [-1, 1]."""


class DegenerateBias(CriterionError):
    """The common marginal p is 0 or 1."""


class InfeasibleTarget(NonlocalBoxError):
    """No box at the requested CHSH value satisfies the criterion."""


class ConfigError(NonlocalBoxError, ValueError):
    pass
