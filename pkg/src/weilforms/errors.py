"""Exception hierarchy with CLI exit codes.

Exit codes: 2 = bad input, 3 = violated mathematical invariant,
4 = precision exhaustion.
"""


class WeilformsError(Exception):
    exit_code = 3


class InputError(WeilformsError):
    exit_code = 2


class DegenerateModuleError(WeilformsError):
    pass


class WrongParityError(WeilformsError):
    pass


class UnsupportedWeightError(WeilformsError):
    pass


class UnsupportedModuleError(WeilformsError):
    pass


class UnsupportedNormError(WeilformsError):
    pass


class IndexMismatchError(WeilformsError):
    pass


class NotInDualError(WeilformsError):
    pass


class MismatchError(WeilformsError):
    pass


class NumericInconsistencyError(WeilformsError):
    pass


class StabilizationError(WeilformsError):
    pass


class ExhaustionError(WeilformsError):
    pass


class PrecisionError(WeilformsError):
    exit_code = 4
