class WorldTrackError(Exception):
    """Base class for all errors raised by worldtrack."""


class InvalidInputError(WorldTrackError, ValueError):
    pass


class DegenerateFitError(WorldTrackError, ValueError):
    pass


class InvalidQueryError(WorldTrackError, LookupError):
    pass


class GenerationError(WorldTrackError, ValueError):
    pass


class InsufficientDataError(WorldTrackError, ValueError):
    pass


class LogParseError(WorldTrackError, ValueError):
    """Malformed observation log. ``line`` is 1-based."""

    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ConfigError(WorldTrackError, ValueError):
    pass
