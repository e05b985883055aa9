"""Exception hierarchy for qcite."""


class QCiteError(Exception):
    """Base class for all qcite errors."""


class DomainError(QCiteError, ValueError):
    """Argument outside the mathematical domain of a function."""


class HistogramFormatError(QCiteError, ValueError):
    """Malformed or invalid histogram input."""

    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}"
        if line is not None:
            where += f":{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class InsufficientDataError(QCiteError, ValueError):
    """Too few usable points to fit."""


class ConvergenceError(QCiteError, RuntimeError):
    """The one-dimensional temperature search did not find an interior minimum."""

    def __init__(self, message, diagnostics=None):
        self.diagnostics = dict(diagnostics or {})
        super().__init__(message)
