from __future__ import annotations


class LayeredElasticaError(Exception):
    """Base class for every error raised by the library."""


class InvalidMediumError(LayeredElasticaError, ValueError):
    pass


class BranchCutError(LayeredElasticaError, ValueError):
    """The spectral variable sits on (or within eps of) a branch cut of beta."""


class DegenerateDenominatorError(LayeredElasticaError, ArithmeticError):
    pass


class SpecfunDomainError(LayeredElasticaError, ValueError):
    pass


class SpecfunOverflowError(LayeredElasticaError, OverflowError):
    pass


class SlowDecayError(LayeredElasticaError, ValueError):
    """Kernel decay rate below the floor the tail truncation can handle."""


class BudgetExceededError(LayeredElasticaError, RuntimeError):
    pass


class SingularOriginError(LayeredElasticaError, ValueError):
    pass


class PathIndependenceError(LayeredElasticaError, RuntimeError):
    """Two admissible indentations disagree; a complex zero of D is likely near the path."""


class CoincidentPointsError(LayeredElasticaError, ValueError):
    pass


class GrazingDirectionError(LayeredElasticaError, ValueError):
    pass


class InvalidKeyError(LayeredElasticaError, KeyError):
    pass


class InvalidProfileError(LayeredElasticaError, ValueError):
    pass


class SingularSystemError(LayeredElasticaError, RuntimeError):
    pass


class ValidationError(LayeredElasticaError, ValueError):
    """Bad command-line input or malformed configuration file."""
