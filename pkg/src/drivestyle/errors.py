"""Exception hierarchy shared by every module.

Each class carries the CLI exit code it maps to: 2 for configuration
problems, 3 for bad input data, 4 for numerical failures.
"""


class DriveStyleError(Exception):
    exit_code = 3


class ConfigError(DriveStyleError):
    exit_code = 2


class InvalidParameters(DriveStyleError, ValueError):
    exit_code = 2


class InvalidQuantifier(InvalidParameters):
    pass


class DataError(DriveStyleError):
    exit_code = 3


class NonFiniteInput(DataError, ValueError):
    pass


class LengthMismatch(DataError, ValueError):
    pass


class IncompleteJudgments(DataError):
    def __init__(self, missing):
        self.missing = list(missing)
        preview = ", ".join("/".join(m) for m in self.missing[:5])
        more = "" if len(self.missing) <= 5 else f" (+{len(self.missing) - 5} more)"
        super().__init__(f"{len(self.missing)} antecedent rows missing: {preview}{more}")


class NonUniformSampling(DataError):
    pass


class TooShort(DataError):
    pass


class WindowTooShort(TooShort):
    pass


class EmptySeries(DataError, ValueError):
    pass


class DegenerateInput(DataError):
    pass


class SingleCluster(DataError):
    pass


class AmbiguousOrdering(DataError):
    pass


class NumericalError(DriveStyleError):
    exit_code = 4


class EmptySet(NumericalError):
    pass


class NoRuleFired(NumericalError):
    pass


class DegenerateCovariance(NumericalError):
    pass


class SingularCovariance(NumericalError):
    pass
