"""Exception hierarchy for the solver."""


class BlendsemError(Exception):
    """Base class for all solver errors."""


class InvalidDegreeError(BlendsemError, ValueError):
    """Polynomial degree below 1."""


class NonPositiveDensityError(BlendsemError, ValueError):
    """Pressure requested for a state with rho <= 0."""


class InadmissibleStateError(BlendsemError):
    """A state with non-positive density or pressure reached an operator.

    ``element`` and ``node`` locate the first offending point when known;
    ``quantity`` is ``"density"`` or ``"pressure"``.
    """

    def __init__(self, message, *, element=None, node=None, quantity=None,
                 value=None, stage=None):
        super().__init__(message)
        self.element = element
        self.node = node
        self.quantity = quantity
        self.value = value
        self.stage = stage

    def report(self):
        return {
            "error": type(self).__name__,
            "message": str(self),
            "element": self.element,
            "node": None if self.node is None else list(self.node),
            "quantity": self.quantity,
            "value": self.value,
            "stage": self.stage,
        }


class SafeStateViolation(InadmissibleStateError):
    """The all-FV stage solution is itself inadmissible."""


class LimiterContractError(BlendsemError):
    """A blending coefficient update tried to lower alpha."""


class ConfigError(BlendsemError, ValueError):
    """Invalid or unparsable run configuration."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
