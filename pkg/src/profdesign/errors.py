"""Exception types raised by profdesign."""


class ProfDesignError(Exception):
    """Base class for all package errors."""


class ConfigError(ProfDesignError, ValueError):
    """Invalid model, prior, search or run configuration."""


class DomainError(ProfDesignError, ValueError):
    """An argument lies outside the domain of a function (e.g. time outside [0, T])."""


class FormulaSyntaxError(ConfigError):
    def __init__(self, message, text=None, position=None):
        self.text = text
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class InfeasibleSearchError(ProfDesignError):
    """Coordinate exchange could not reach a design with a finite objective."""

    def __init__(self, message, start_index=None):
        self.start_index = start_index
        super().__init__(message)


class OutputError(ProfDesignError):
    """Result artifacts could not be written."""
