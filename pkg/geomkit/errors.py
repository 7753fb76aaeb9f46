"""Exception hierarchy for the kernel.

Every error carries the exit code the command line maps it to. Verified
mismatches are verdicts, not exceptions.
"""


class GeomkitError(Exception):
    exit_code = 2

    def __init__(self, message: str = ""):
        super().__init__(message)
        self.message = message


# ---------- Malformed or inconsistent input ----------

class InputError(GeomkitError):
    pass


class ParseError(InputError):
    def __init__(self, message: str, position: int = 0):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DimensionError(InputError):
    pass


class ParameterError(InputError):
    pass


class RingMismatchError(InputError):
    pass


class CatalogError(InputError):
    pass


class MissingPushforwardError(InputError):
    pass


# ---------- Well-formed input, failed mathematical precondition ----------

class KernelError(GeomkitError):
    pass


class NonUnitError(KernelError):
    pass


class DivergenceError(KernelError):
    pass


class RegularityError(KernelError):
    pass


class DivisorError(KernelError):
    pass


class ContractionError(KernelError):
    pass


class ReductionError(KernelError):
    pass


class DomainError(KernelError):
    pass


class NumericError(KernelError):
    def __init__(self, message: str, residual: float | None = None):
        if residual is not None:
            message = f"{message} (residual {residual:.3e})"
        super().__init__(message)
        self.residual = residual


class RetryCapError(KernelError):
    def __init__(self, message: str, last_seed: int):
        super().__init__(f"{message} (last seed {last_seed})")
        self.last_seed = last_seed
