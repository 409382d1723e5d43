"""Exception types raised across the package."""


class NoBracket(RuntimeError):
    """Shooting endpoints did not classify as (too slow, too fast)."""


class DomainError(ValueError):
    pass


class RegimeError(ValueError):
    """Closed-form equilibrium requested outside 0 < m*lam - b < b/c."""


class NegativeDiscriminant(ArithmeticError):
    pass


class NoConvergence(RuntimeError):
    pass


class SingularJacobian(ArithmeticError):
    pass


class StepRejected(RuntimeError):
    """Front CFL could not be met after the maximum number of halvings."""


class NonFiniteState(FloatingPointError):
    def __init__(self, msg, state=None):
        super().__init__(msg)
        self.state = state


class InsufficientData(ValueError):
    pass


class BadBracket(ValueError):
    pass


class ConfigError(ValueError):
    """Base for config problems (CLI exit code 2)."""


class ParseError(ConfigError):
    pass


class ValidationError(ConfigError):
    pass
