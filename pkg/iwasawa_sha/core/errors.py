"""Exception hierarchy; every error maps to a process exit code"""

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_USAGE = 2
EXIT_PRECISION = 3


class ShaCheckError(Exception):
    exit_code = EXIT_CHECK_FAILURE

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class PrecisionMismatch(ShaCheckError):
    """Operands carry different (p, N)."""


class LevelMismatch(ShaCheckError):
    """Group-ring operands live at different levels."""


class LevelZero(ShaCheckError):
    """Projection requested from level 0."""


class NotAUnit(ShaCheckError):
    """Inverse requested for an element of positive valuation."""


class IntegralityViolation(ShaCheckError):
    """A formal group law coefficient has negative valuation."""


class NonConvergence(ShaCheckError):
    """Newton iteration stopped contracting."""


class UsageError(ShaCheckError):
    exit_code = EXIT_USAGE


class PrecisionExhausted(ShaCheckError):
    exit_code = EXIT_PRECISION


class ZeroAtPrecision(PrecisionExhausted):
    """Every coefficient is indistinguishable from zero at the working precision."""
