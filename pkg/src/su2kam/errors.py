"""Exception types shared across the package."""


class Su2KamError(Exception):
    """Base class for all package-specific errors."""


class AntipodeError(Su2KamError):
    """Principal logarithm requested at (or too close to) -Id, where it is not unique."""


class RationalInput(Su2KamError):
    """Continued-fraction expansion requested for a (numerically) rational number."""


class DivisorUnderflow(Su2KamError):
    """A small divisor outside the excluded set fell below the safe threshold."""


class GateFailure(Su2KamError):
    """The smallness gate of the conjugation step is violated."""


class ParityError(Su2KamError):
    """A group-valued map fails the 1-periodicity parity rule."""


class VerificationFailure(Su2KamError):
    """A post-hoc verification (normal form re-run) did not meet its tolerance."""


class ConfigError(Su2KamError):
    """An experiment configuration is missing, malformed, or inconsistent."""
