class ZiberError(Exception):
    """Base class for every error raised by the ziber app."""


class DimensionMismatchError(ZiberError, ValueError):
    pass


class NonFiniteError(ZiberError, ValueError):
    pass


class DegenerateResponseError(ZiberError, ValueError):
    """All responses are 0 or all are 1, so the SP part is not identified."""


class RankDeficiencyError(ZiberError, ValueError):
    pass


class InvalidFitError(ZiberError, ValueError):
    """Raised when inference is requested from a fit without usable ASEs."""


class DataError(ZiberError, ValueError):
    """Input file or column problems; messages name the offending column/row."""


class DegenerateVuongError(ZiberError, ArithmeticError):
    pass
