"""Shared exception types."""


class IntegrationError(RuntimeError):
    """An ODE solve failed or missed its accuracy contract."""


class TruncationLeakageError(RuntimeError):
    """State amplitude escaped into the top of a truncated basis.

    Raised when more than the tolerated norm sits in the highest levels of
    a finite oscillator basis; the fix is to rerun with a larger dimension.
    """
