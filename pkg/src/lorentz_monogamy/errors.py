"""Exception types raised by the library."""


class NonPowerOfTwoLength(ValueError):
    pass


class ZeroVector(ValueError):
    pass


class InvalidSubset(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class WrongQubitCount(ValueError):
    """The operation is not defined for this number of qubits."""


class RankTooHigh(ValueError):
    pass


class NonRealResult(ArithmeticError):
    """A quantity that must be real came out with a large imaginary part."""


class ResourceLimit(ValueError):
    """Dense representation would exceed the configured qubit limit."""


class IncompatibleSpec(ValueError):
    pass


class InvalidStateFile(ValueError):
    pass
