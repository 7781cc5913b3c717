"""Exception hierarchy shared by the whole engine.

Every error carries a stable ``category`` string. The CLI maps categories
to exit codes and the HTTP service maps them to status codes, so the
categories are part of the external contract and must not change casually.
"""


class EngineError(Exception):
    """Base class for all engine errors."""

    category = "engine"


class InvalidKeyError(EngineError):
    """Key or stored value violates the byte rules (empty, tab, LF, NUL)."""

    category = "invalid-key"


class ValueKindError(EngineError):
    """Mixed num/str values, NaN, or an operation applied to the wrong kind."""

    category = "value-kind"


class SpecSyntaxError(EngineError):
    """A key-spec selector string does not parse."""

    category = "spec-syntax"


class TableNameError(EngineError):
    category = "table-name"


class TableExistsError(EngineError):
    category = "table-exists"


class UnknownTableError(EngineError):
    category = "unknown-table"


class CombinerMismatchError(EngineError):
    """Existing table has a combiner incompatible with the requested one."""

    category = "combiner-mismatch"


class CombinerValueError(EngineError):
    """Value under a numeric combiner does not parse as a decimal float."""

    category = "combiner-value"


class TsvFormatError(EngineError):
    """Malformed TSV input; carries the 1-based line number."""

    category = "tsv-format"

    def __init__(self, message: str, line_no: int | None = None):
        super().__init__(message)
        self.line_no = line_no


class SnapshotIOError(EngineError):
    category = "io"


class MemoryCapError(EngineError):
    """Logical memory accounting exceeded the configured cap."""

    category = "memory-cap"


class RowTooLargeError(MemoryCapError):
    """A single row pair alone exceeds the cap; streaming cannot proceed."""

    category = "row-too-large"


class AdjacencyError(EngineError):
    """Graph input failed validation (not 0/1, asymmetric, self loops)."""

    category = "adjacency"


class UsageError(EngineError):
    """Bad argument values outside what argparse itself rejects."""

    category = "usage"
