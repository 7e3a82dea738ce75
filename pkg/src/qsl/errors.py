"""Exception types raised across the package."""


class QSLError(ValueError):
    """Base class for all domain errors."""


class NotSquare(QSLError):
    pass


class NotHermitian(QSLError):
    pass


class NotNormalized(QSLError):
    pass


class DimensionMismatch(QSLError):
    pass


class AngleOutOfRange(QSLError):
    pass


class ZeroSpread(QSLError):
    """The state is stationary (vanishing energy spread) but motion was required."""


class NotReached(QSLError):
    """No passage to the target angle inside the scanned time window."""


class NonPositiveSlope(QSLError):
    pass


class OutOfRange(QSLError):
    pass


class Unrealizable(QSLError):
    """The requested gate cannot be produced by the given Hamiltonian."""
