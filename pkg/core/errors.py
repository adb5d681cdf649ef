class ToolkitError(Exception):
    """
    Base error for the toolkit. Carries a human readable detail and the
    process exit code the CLI reports for it.
    """

    exit_code: int = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class DomainError(ToolkitError):
    """Invalid index or argument outside an operation's domain."""


class LayoutError(ToolkitError):
    """Sample or coefficient layout does not match the grid."""


class ConfigurationError(ToolkitError):
    """Grid or source parameters that cannot be realized."""


class FieldFormatError(ToolkitError):
    """Malformed vsf-1 field file."""

    def __init__(self, detail: str, key: str | None = None):
        super().__init__(detail if key is None else f"{detail} (key: {key!r})")
        self.key = key


class SpecError(ToolkitError):
    """Identity pipeline does not type-check."""


class GaugeViolationError(ToolkitError):
    exit_code = 2

    def __init__(self, detail: str, norm: float = 0.0):
        super().__init__(f"{detail} (l=0 norm {norm:.3e})")
        self.norm = norm


class FitError(ToolkitError):
    exit_code = 3
