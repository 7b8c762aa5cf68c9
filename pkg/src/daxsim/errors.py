class DaxSimError(Exception):
    """Base class for simulator errors."""


class LayoutError(DaxSimError):
    """An address does not satisfy a layout precondition."""


class MalformedStripe(DaxSimError):
    """Wrong number of stripe members handed to reconstruction."""


class MappingError(DaxSimError):
    """DAX mapping table misuse (overlap, double map, unknown range)."""


class ConfigError(DaxSimError):
    """Invalid experiment configuration.

    ``field`` names the offending config key so messages can point at it.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


class ReportMismatch(DaxSimError):
    """Two reports cannot be compared (different workload or seed)."""


class EmitError(DaxSimError):
    """A report could not be written; the message names the destination."""
