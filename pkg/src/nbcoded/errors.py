"""Exception hierarchy. Each top-level kind carries the CLI exit code."""

from __future__ import annotations


class NbcodedError(Exception):
    exit_code = 1
    # pipeline stage or fold the error surfaced in, when known
    stage: str | None = None


class ConfigError(NbcodedError, ValueError):
    """Bad flag, config file or env var."""

    exit_code = 1


# ---------------------------------------------------------------------------
# Data
# ---------------------------------------------------------------------------


class DataError(NbcodedError, ValueError):
    exit_code = 2


class SchemaError(DataError):
    pass


class FlowParseError(DataError):
    """A row of a flow CSV could not be parsed."""

    def __init__(self, message: str, line: int | None = None, column: str | None = None) -> None:
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column:
                where += f", column {column!r}"
            where += ": "
        super().__init__(f"{where}{message}")


class FeatureError(DataError):
    """Unknown feature names or mismatched columns."""

    def __init__(self, message: str, names: list[str] | None = None) -> None:
        self.names = list(names or [])
        super().__init__(message)


class StratifyError(DataError):
    pass


# ---------------------------------------------------------------------------
# Model files
# ---------------------------------------------------------------------------


class ModelFormatError(DataError):
    pass


class BadMagicError(ModelFormatError):
    pass


class UnsupportedVersionError(ModelFormatError):
    pass


class ChecksumError(ModelFormatError):
    pass


class TruncatedModelError(ModelFormatError):
    pass


class UnknownModelKindError(ModelFormatError):
    pass


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------


class TrainingError(NbcodedError, RuntimeError):
    exit_code = 3

    def __init__(self, message: str, stage: str | None = None) -> None:
        self.message = message
        self.stage = stage
        super().__init__(message)

    def __str__(self) -> str:
        # stage may be re-tagged by outer layers after construction
        return f"[{self.stage}] {self.message}" if self.stage else self.message


class NonFiniteLossError(TrainingError):
    pass


class FitError(NbcodedError, ValueError):
    """Training data violates a model's fitting preconditions."""

    exit_code = 3
