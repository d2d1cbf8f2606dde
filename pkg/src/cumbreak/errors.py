"""Exception hierarchy shared by every module of the package."""


class CumbreakError(Exception):
    """Base class for all package errors."""


class InsufficientDataError(CumbreakError):
    pass


class DomainError(CumbreakError, ValueError):
    """A value lies outside the mathematical domain of a transform."""


class FrequencyMismatchError(CumbreakError, ValueError):
    pass


class CoverageError(CumbreakError):
    """The driver series does not cover the periods a model needs."""


class DegenerateFitError(CumbreakError):
    """The least-squares design has no admissible unique solution."""


class RankDeficiencyError(CumbreakError):
    """A regression design matrix is not of full column rank."""

    def __init__(self, message, columns=()):
        super().__init__(message)
        self.columns = tuple(columns)


class CollinearityError(CumbreakError):
    pass


class IngestError(CumbreakError, ValueError):
    """A CSV input failed validation; ``line`` is 1-based."""

    def __init__(self, message, path=None, line=None):
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {message}" if where else message)
        self.path = path
        self.line = line


class ConfigError(CumbreakError, ValueError):
    pass


class OutputError(CumbreakError):
    """An output file could not be written."""
