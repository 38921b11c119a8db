"""Exception taxonomy shared across the toolkit.

The CLI maps these onto exit codes: configuration problems exit 2, bad
input data exits 3, and container/format integrity failures exit 4.
"""


class EntropyRankError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(EntropyRankError):
    """Invalid configuration or unsatisfiable options (CLI exit 2)."""


class ValidationError(EntropyRankError):
    """A value violates a documented invariant (CLI exit 3)."""


class ParseError(EntropyRankError):
    """A file or stream could not be parsed (CLI exit 3)."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class DataError(EntropyRankError):
    """Required input data is missing or inconsistent (CLI exit 3)."""


class AlignmentError(EntropyRankError):
    """A phrase could not be mapped onto model tokens (CLI exit 3)."""


class GuardError(EntropyRankError):
    """An enumeration guard was exceeded; carries a size estimate."""


class DecodeError(EntropyRankError):
    """A bitstream could not be decoded (CLI exit 4)."""


class FormatError(EntropyRankError):
    """A container or serialized file is structurally invalid (CLI exit 4)."""


class RemoteError(EntropyRankError):
    """Base class for remote-backend failures."""


class RemoteNetworkError(RemoteError):
    """The endpoint could not be reached."""


class RemoteStatusError(RemoteError):
    """The endpoint answered with a non-success HTTP status."""

    def __init__(self, status: int, body: str = ""):
        super().__init__(f"remote endpoint returned status {status}: {body[:200]}")
        self.status = status


class RemoteSchemaError(RemoteError):
    """The endpoint answered 200 but the payload violates the record schema."""
