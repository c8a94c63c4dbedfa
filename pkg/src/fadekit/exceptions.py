"""Exception types shared across the toolkit."""

from __future__ import annotations


class FadekitError(Exception):
    """Base class for all fadekit-specific errors."""


class WindowUnderflow(FadekitError):
    """Input sequence has support below the explicit kernel window.

    The tail entries of the kernel are only known through a bound, so the
    evaluation cannot be completed exactly.  ``residual_bound`` is a certified
    upper bound on the magnitude of the discarded contribution.
    """

    def __init__(self, residual_bound: float, message: str | None = None):
        self.residual_bound = float(residual_bound)
        if message is None:
            message = (
                "input extends below the explicit kernel window; "
                f"discarded contribution bounded by {self.residual_bound:.6g}"
            )
        super().__init__(message)


class NoWeighting(FadekitError):
    """No vanishing weighting sequence exists for the given kernel."""


class NotLinear(FadekitError):
    """A black-box evaluator failed the randomized linearity check."""


class Unstable(FadekitError):
    """State matrix certified to have spectral radius >= 1."""

    def __init__(self, report=None, message: str = "state matrix is not stable"):
        self.report = report
        super().__init__(message)


class StabilityUndecided(FadekitError):
    """Stability could not be decided at the requested margin."""

    def __init__(self, report=None, message: str = "stability undecided at margin"):
        self.report = report
        super().__init__(message)


class NumericalFailure(FadekitError):
    """A numerical routine (e.g. an eigensolve) failed on degenerate input."""


class OrthogonalityNotCertified(FadekitError):
    """The kernel does not certify orthogonality of per-time feature subspaces."""
