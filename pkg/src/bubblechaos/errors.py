"""Exception hierarchy."""


class BubbleChaosError(Exception):
    """Base class for all package errors."""


class InvalidParameters(BubbleChaosError, ValueError):
    pass


class ConfigError(BubbleChaosError, ValueError):
    pass


class NonPositiveRadius(BubbleChaosError, ArithmeticError):
    pass


class SingularMassMatrix(BubbleChaosError, ArithmeticError):
    pass


class IntegrationError(BubbleChaosError, RuntimeError):
    """Raised when an integration does not complete.

    ``outcome`` holds the partial :class:`~bubblechaos.integrator.IntegrationOutcome`.
    """

    def __init__(self, message, outcome=None):
        super().__init__(message)
        self.outcome = outcome


class Collapsed(IntegrationError):
    pass


class StepUnderflow(IntegrationError):
    pass


class StepLimit(IntegrationError):
    pass


class SeriesTooShort(BubbleChaosError, ValueError):
    pass


class ParamsMismatch(BubbleChaosError, ValueError):
    pass


class InconsistentClassification(BubbleChaosError):
    pass


class IoError(BubbleChaosError, OSError):
    pass
