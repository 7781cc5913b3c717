"""The transpose-pair table schema and in-store multiply.

A bound array occupies three tables: ``<base>`` holds (row, col, value),
``<base>_T`` holds the transpose, and ``<base>_Deg`` accumulates per-row
entry counts under the column key "Degree" with a sum combiner. Column
queries scan the transpose table as a row range, so neither orientation
ever needs a full-table filter.

``tablemult`` computes C += A-transpose times B entirely through table
scans and puts: both operands stream in the same sorted row-key order (the
inner dimension), each matching row pair emits its outer product into the
output table, and the output table's combiner performs the reduction. The
operation holds at most two table rows plus one bounded put batch at any
instant.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .assoc import (
    ALL,
    AllKeys,
    AssocArray,
    KeySpec,
    Value,
    _as_spec,
    check_key,
    from_triples,
    parse_num,
    render_num,
)
from .errors import (
    CombinerMismatchError,
    CombinerValueError,
    RowTooLargeError,
    UsageError,
)
from .kernels import PLUS_TIMES, Semiring
from .kvstore import Entry, Store, Table, entry_cost

TRANSPOSE_SUFFIX = "_T"
DEGREE_SUFFIX = "_Deg"
DEGREE_COL = "Degree"

# combiner each built-in semiring's add op corresponds to
_SEMIRING_COMBINER = {"plus.times": "sum", "min.plus": "min", "max.times": "max"}


@dataclass(frozen=True)
class TableRef:
    """Handle to a bound table group {base, base_T, base_Deg}."""

    base: str
    store: Store
    edge: Table
    edge_t: Table
    degree_table: Table


def _ensure(store: Store, name: str, combiner: str) -> Table:
    if store.has_table(name):
        table = store.table(name)
        if table.combiner != combiner:
            raise CombinerMismatchError(
                f"table {name!r} exists with combiner {table.combiner!r}, need {combiner!r}"
            )
        return table
    return store.create_table(name, combiner)


def bind(store: Store, base: str) -> TableRef:
    """Create or attach to the table group for ``base``. Idempotent."""
    edge = _ensure(store, base, "none")
    edge_t = _ensure(store, base + TRANSPOSE_SUFFIX, "none")
    degree_table = _ensure(store, base + DEGREE_SUFFIX, "sum")
    return TableRef(base, store, edge, edge_t, degree_table)


def render_value(v: Value) -> str:
    return render_num(v) if isinstance(v, float) else v


def ingest_assoc(ref: TableRef, a: AssocArray) -> int:
    """Write every entry of ``a`` into the table group.

    Each entry (r, c, v) lands in the edge table, mirrored into the
    transpose table, and adds one to the degree cell (r, "Degree") when the
    cell is new to the edge table (overwrites do not change entry counts).
    Increments are pre-summed per row before the put, which the sum
    combiner makes equivalent to one put per entry.
    """
    triples = a.to_triples()
    if not triples:
        return 0
    edge_items = [(r, c, render_value(v)) for (r, c, v) in triples]
    return _ingest_rendered(ref, edge_items)


def ingest_entries(ref: TableRef, entries: list[Entry], prevalidated: bool = False) -> int:
    """Bulk-ingest raw string triples.

    Duplicate (row, col) records collapse to the last occurrence, matching
    the edge tables' write semantics, so degree counts stay consistent with
    the stored entries. With ``prevalidated`` the caller vouches that keys
    and values already satisfy the byte rules (the TSV reader does).
    """
    if not prevalidated:
        for r, c, v in entries:
            check_key(r)
            check_key(c)
            ref.edge._check_value(v)
    deduped = {}
    for r, c, v in entries:
        deduped[(r, c)] = v
    edge_items = [(r, c, v) for (r, c), v in deduped.items()]
    return _ingest_rendered(ref, edge_items)


def _ingest_rendered(ref: TableRef, edge_items: list[Entry]) -> int:
    edge = ref.edge
    if edge.is_empty():
        counts = Counter(r for (r, _c, _v) in edge_items)
    else:
        # degree counts cells, not writes: an overwrite of an existing cell
        # must not bump the count, or repeated ingests would drift
        counts = Counter(r for (r, c, _v) in edge_items if edge.get(r, c) is None)
    edge._put_batch_unchecked(edge_items)
    ref.edge_t._put_batch_unchecked([(c, r, v) for (r, c, v) in edge_items])
    if counts:
        ref.degree_table._put_batch_unchecked(
            [(r, DEGREE_COL, str(n)) for r, n in counts.items()]
        )
    return len(edge_items)


def table_to_assoc(table: Table, row_spec: KeySpec = ALL, col_spec: KeySpec = ALL) -> AssocArray:
    """Scan a table into an array, inferring num kind when every value parses."""
    triples = table.scan_triples(row_spec, col_spec)
    return _triples_to_assoc(triples)


def _triples_to_assoc(triples: list[Entry], swap: bool = False) -> AssocArray:
    parsed = []
    numeric = True
    for _r, _c, v in triples:
        f = parse_num(v)
        if f is None:
            numeric = False
            break
        parsed.append(f)
    rows_out: dict[str, dict[str, Value]] = {}
    for i, (r, c, v) in enumerate(triples):
        if swap:
            r, c = c, r
        value: Value = parsed[i] if numeric else v
        if value == (0.0 if numeric else ""):
            continue
        rows_out.setdefault(r, {})[c] = value
    return AssocArray(rows_out, "num" if numeric else "str")


def query(ref: TableRef, row_spec: KeySpec | str = ALL, col_spec: KeySpec | str = ALL) -> AssocArray:
    """Read a sub-array back from the table group.

    Row-constrained queries scan the edge table by row range. Pure column
    queries scan the transpose table by the column spec as a row range and
    swap the result, so the primary table is never filtered column-wise.
    """
    row_spec = _as_spec(row_spec)
    col_spec = _as_spec(col_spec)
    if isinstance(row_spec, AllKeys) and not isinstance(col_spec, AllKeys):
        triples = ref.edge_t.scan_triples(col_spec, ALL)
        return _triples_to_assoc(triples, swap=True)
    return _triples_to_assoc(ref.edge.scan_triples(row_spec, col_spec))


def degree(ref: TableRef, keys: KeySpec | str = ALL) -> AssocArray:
    """Stored per-row entry counts as a one-column num array."""
    return table_to_assoc(ref.degree_table, _as_spec(keys), ALL)


# ---------------------------------------------------------------------------
# Exploded encoding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExplodedCell:
    row: str
    col_name: str
    col_value: str
    delimiter: str = "|"


def encode_exploded(row: str, col_name: str, col_value: str, delim: str = "|") -> Entry:
    """Encode a (row, column, value) record as (row, "column<delim>value", "1")."""
    if len(delim) != 1:
        raise UsageError(f"delimiter must be a single character, got {delim!r}")
    if not col_name or not col_value:
        raise UsageError("column name and value must be non-empty")
    if delim in col_name:
        raise UsageError(f"delimiter {delim!r} occurs in column name {col_name!r}")
    check_key(row)
    key = f"{col_name}{delim}{col_value}"
    check_key(key)
    return (row, key, "1")


def decode_exploded(entry: Entry, delim: str = "|") -> ExplodedCell:
    """Invert :func:`encode_exploded`, splitting on the first delimiter only."""
    row, key, _value = entry
    name, sep, value = key.partition(delim)
    if not sep or not name or not value:
        raise UsageError(f"column key {key!r} is not exploded with {delim!r}")
    return ExplodedCell(row, name, value, delim)


# ---------------------------------------------------------------------------
# In-store multiply
# ---------------------------------------------------------------------------


@dataclass
class TableMultStats:
    partial_products: int = 0
    entries_emitted: int = 0
    rows_matched: int = 0
    peak_bytes: int = 0
    max_row_pair_bytes: int = 0


DEFAULT_BATCH_BYTES = 65536


class _RowStream:
    """Cursor over a table scan that exposes one row at a time.

    Rows are only materialized when taken; skipping a row examines entries
    one by one, so unmatched rows never count against the memory budget.
    """

    def __init__(self, table: Table):
        self._name = table.name
        self._it = table.scan()
        self._pending = next(self._it, None)

    def peek_key(self) -> str | None:
        return None if self._pending is None else self._pending[0]

    def skip_row(self) -> None:
        row = self._pending[0]
        for entry in self._it:
            if entry[0] != row:
                self._pending = entry
                return
        self._pending = None

    def take_row(self) -> tuple[list[tuple[str, float]], int]:
        """Materialize the current row as parsed (col, value) pairs.

        Stored exact zeros are dropped so the streamed operand matches the
        array the table would bind to (arrays never hold zeros).
        """
        row = self._pending[0]
        cols: list[tuple[str, float]] = []
        size = 0
        entry = self._pending
        while True:
            r, c, v = entry
            try:
                f = float(v)
            except ValueError:
                raise CombinerValueError(
                    f"table {self._name!r} value {v!r} at ({r!r}, {c!r}) is not numeric"
                ) from None
            if f != 0.0:
                size += entry_cost(r, c, v)
                cols.append((c, f))
            entry = next(self._it, None)
            if entry is None or entry[0] != row:
                self._pending = entry
                return cols, size


def tablemult(
    store: Store,
    table_a: str,
    table_b: str,
    table_c: str,
    sr: Semiring = PLUS_TIMES,
    memory_cap: int | None = None,
    batch_bytes: int = DEFAULT_BATCH_BYTES,
) -> TableMultStats:
    """Stream C += A-transpose times B through the store.

    For each row key shared by A and B, the outer product of the two rows
    is emitted as puts into C; C's combiner folds duplicates across row
    keys, so no accumulator for the full result ever exists. ``memory_cap``
    bounds the logical bytes held (two current rows plus the pending put
    batch); a single row pair larger than the cap raises RowTooLargeError.

    Cells whose partial products fold to exactly zero remain stored as "0"
    in C (a combiner cannot drop them), unlike a client-side multiply; with
    positive values the two agree exactly.
    """
    a = store.table(table_a)
    b = store.table(table_b)
    c = store.table(table_c)
    expected = _SEMIRING_COMBINER.get(sr.name)
    if expected is None:
        raise UsageError(f"tablemult supports the built-in semirings, not {sr.name!r}")
    if c.combiner != expected:
        raise CombinerMismatchError(
            f"output table {table_c!r} has combiner {c.combiner!r}; "
            f"semiring {sr.name} needs {expected!r}"
        )
    if memory_cap is not None and memory_cap <= 0:
        raise UsageError("memory cap must be positive")

    mult = sr.mult
    threshold = batch_bytes if memory_cap is None else max(1, min(batch_bytes, memory_cap // 4))
    stats = TableMultStats()
    batch: list[Entry] = []
    batch_size = 0

    def drain():
        nonlocal batch, batch_size
        if batch:
            c._put_batch_unchecked(batch)
            stats.entries_emitted += len(batch)
            batch = []
            batch_size = 0

    a_rows = _RowStream(a)
    b_rows = _RowStream(b)
    while True:
        ka = a_rows.peek_key()
        kb = b_rows.peek_key()
        if ka is None or kb is None:
            break
        if ka < kb:
            a_rows.skip_row()
            continue
        if kb < ka:
            b_rows.skip_row()
            continue
        acols, asize = a_rows.take_row()
        bcols, bsize = b_rows.take_row()
        if not acols or not bcols:
            continue
        pair = asize + bsize
        if pair > stats.max_row_pair_bytes:
            stats.max_row_pair_bytes = pair
        if memory_cap is not None and pair > memory_cap:
            raise RowTooLargeError(
                f"row {ka!r} pair needs {pair} bytes, cap is {memory_cap}"
            )
        if pair + batch_size > stats.peak_bytes:
            stats.peak_bytes = pair + batch_size
        stats.rows_matched += 1
        stats.partial_products += len(acols) * len(bcols)
        for i, av in acols:
            for j, bv in bcols:
                s = render_num(mult(av, bv))
                cost = entry_cost(i, j, s)
                if memory_cap is not None and batch and pair + batch_size + cost > memory_cap:
                    drain()
                if memory_cap is not None and pair + cost > memory_cap:
                    raise RowTooLargeError(
                        f"row {ka!r} pair plus one emitted entry exceeds cap {memory_cap}"
                    )
                batch.append((i, j, s))
                batch_size += cost
                if pair + batch_size > stats.peak_bytes:
                    stats.peak_bytes = pair + batch_size
                if batch_size >= threshold:
                    drain()
    drain()
    c.flush()
    return stats
