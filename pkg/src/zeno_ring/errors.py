"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument violates an operation's precondition."""


class OutOfBandError(ParameterError):
    """The dot level lies outside the ring band, so no golden-rule rate exists."""


class ContractViolation(ValueError):
    """An input object breaks a structural contract (e.g. a non-Hermitian matrix)."""


class NumericalFailure(RuntimeError):
    """An iterative solver did not converge.

    The last residual reached is kept on ``residual``.
    """

    def __init__(self, message, residual=float("nan")):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual
