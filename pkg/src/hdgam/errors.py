"""Exception hierarchy shared by every stage of the pipeline."""


class HdgamError(Exception):
    """Base class for all errors raised by hdgam."""


class InvalidConfigurationError(HdgamError, ValueError):
    pass


class DegenerateKnotsError(HdgamError, ValueError):
    def __init__(self, message, quantile=None):
        super().__init__(message)
        self.quantile = quantile


class OutOfSupportError(HdgamError, ValueError):
    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class DegenerateDesignError(HdgamError, ValueError):
    pass


class ConvergenceError(HdgamError, RuntimeError):
    def __init__(self, message, kkt_gap=float("nan")):
        super().__init__(message)
        self.kkt_gap = kkt_gap


class DegenerateResidualError(HdgamError, ArithmeticError):
    def __init__(self, message, component=None):
        super().__init__(message)
        self.component = component


class DegenerateScaleError(HdgamError, ArithmeticError):
    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class DegenerateCorrelationError(HdgamError, ArithmeticError):
    pass


class AbortedStudyError(HdgamError, RuntimeError):
    pass


class DataError(HdgamError, ValueError):
    """Malformed input table. ``row`` is 1-based over data rows."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class CvFailureError(HdgamError, RuntimeError):
    pass
