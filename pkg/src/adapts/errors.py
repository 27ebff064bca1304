"""Exception types shared across the package.

Every error carries an ``exit_code`` used by the command-line front end:
1 for usage/configuration problems, 2 for data problems, 3 for numeric
failures.
"""


class AdaptsError(Exception):
    exit_code = 2


# -- usage / configuration -------------------------------------------------

class InvalidConfig(AdaptsError):
    exit_code = 1


class InvalidFilter(AdaptsError):
    exit_code = 1


class InvalidSeasonality(AdaptsError):
    exit_code = 1


class UsageError(AdaptsError):
    exit_code = 1


# -- data -------------------------------------------------------------------

class SignalTooShort(AdaptsError):
    pass


class MalformedSpectrum(AdaptsError):
    pass


class ShapeMismatch(AdaptsError):
    pass


class EmptyBlock(AdaptsError):
    pass


class InsufficientData(AdaptsError):
    pass


class CorruptSeries(AdaptsError):
    pass


class MissingForecast(AdaptsError):
    pass


class ParseError(AdaptsError):
    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.column = column


class IoError(AdaptsError):
    pass


# -- numeric ----------------------------------------------------------------

class IllConditionedUpdate(AdaptsError):
    exit_code = 3


class DegenerateWeights(AdaptsError):
    exit_code = 3


class InvalidLoss(AdaptsError):
    exit_code = 3
