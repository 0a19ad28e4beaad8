"""Exception hierarchy shared by every LVSM package.

Value-type problems subclass ``ValueError`` and state problems subclass
``RuntimeError`` so callers that only know the builtin types still catch them.
"""

from typing import Any, Dict, Optional


class LvsmError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(LvsmError, ValueError):
    """Array or tensor shapes are incompatible with an operation."""


class InvalidPoseError(LvsmError, ValueError):
    """A camera rotation is not a proper orthonormal matrix."""


class InvalidIntrinsicsError(LvsmError, ValueError):
    """Camera intrinsics violate focal-length or principal-point bounds."""


class DegenerateMaskError(LvsmError, ValueError):
    """An attention mask leaves at least one query row without any key."""


class ConfigError(LvsmError, ValueError):
    """Configuration is invalid, incomplete or names an unknown key."""


class IncompatibleCheckpointError(LvsmError, ValueError):
    """A checkpoint was produced for a different model architecture."""

    def __init__(self, checkpoint_architecture: str, config_architecture: str) -> None:
        self.checkpoint_architecture = checkpoint_architecture
        self.config_architecture = config_architecture
        super().__init__(
            f"checkpoint architecture '{checkpoint_architecture}' is incompatible with "
            f"configured architecture '{config_architecture}'"
        )


class CheckpointFormatError(LvsmError, ValueError):
    """A checkpoint file is malformed or truncated."""


class ManifestParseError(LvsmError, ValueError):
    """A dataset camera manifest could not be parsed.

    Attributes:
        path: Manifest file that failed to parse.
        line: 1-based line of the syntax error, when known.
    """

    def __init__(self, path: str, message: str, line: Optional[int] = None) -> None:
        self.path = path
        self.line = line
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"{where}: {message}")


class DatasetIOError(LvsmError, OSError):
    """An image referenced by a dataset is missing or unreadable."""

    def __init__(self, path: str, message: str) -> None:
        self.path = path
        super().__init__(f"{path}: {message}")


class StateError(LvsmError, RuntimeError):
    """An operation was called in an invalid state (e.g. gradients missing)."""


class NonFiniteLossError(LvsmError, RuntimeError):
    """Training produced a NaN or infinite loss.

    Attributes:
        diagnostics: Step, per-view losses and other context for the failure.
    """

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None) -> None:
        self.diagnostics = dict(diagnostics or {})
        details = ", ".join(f"{k}={v}" for k, v in self.diagnostics.items())
        super().__init__(f"{message} ({details})" if details else message)
