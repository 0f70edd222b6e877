"""Exception hierarchy. Every error raised by the package derives from UncbenchError."""


class UncbenchError(Exception):
    pass


class InputError(UncbenchError, ValueError):
    """Malformed input (bad matrix, bad spec field, unknown name)."""


class NonHermitian(InputError):
    pass


class NotNormalized(InputError):
    pass


class DimMismatch(InputError):
    pass


class ConvergenceFailure(UncbenchError, RuntimeError):
    pass


class DegenerateCommutator(UncbenchError, ArithmeticError):
    pass


class DegenerateVariance(UncbenchError, ArithmeticError):
    pass


class NonpositiveEnergy(UncbenchError, ArithmeticError):
    pass


class ZeroMomentum(UncbenchError, ArithmeticError):
    pass


class TruncationTooSmall(InputError):
    pass


class IndexOutOfRange(InputError, IndexError):
    pass


class ExcessiveLeakage(UncbenchError, ValueError):
    pass


class BadSpin(InputError):
    pass


class UnknownModel(InputError, KeyError):
    pass


class UnknownPair(InputError, KeyError):
    pass


class UnknownState(InputError, KeyError):
    pass


class UnknownFamily(InputError, KeyError):
    pass


class UnknownInequality(InputError, KeyError):
    pass


class SpecError(InputError):
    """Schema violation in a JSON document; ``field`` names the offending path."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")

    def __str__(self):
        return self.args[0]
