"""Exception types raised by the library."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class RangeError(DomainError):
    """A value would not fit in ordinary floating-point range."""


class TailTooLargeError(DomainError):
    """A truncation window is too small for the requested tail tolerance."""

    def __init__(self, message, min_window):
        super().__init__(f"{message} (minimal adequate window: {min_window})")
        self.min_window = min_window


class InsufficientModesError(DomainError):
    def __init__(self, modes, min_modes):
        super().__init__(
            f"{modes} modes cannot hold the evolved window without wrap-around; "
            f"use at least {min_modes}"
        )
        self.min_modes = min_modes


class TailCertificateError(DomainError):
    """No certified bound on a truncated series tail could be produced."""


class NoEnvelopeError(DomainError):
    """No Bessel decay envelope fits the signal below the bracket ceiling."""


class EvolutionMismatchError(DomainError):
    def __init__(self, residual, tol):
        super().__init__(
            f"second signal is not the time-1 evolution of the first: "
            f"relative residual {residual:.3e} > {tol:.1e}"
        )
        self.residual = residual
