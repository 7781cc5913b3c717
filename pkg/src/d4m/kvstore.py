"""Embedded BigTable-style sorted key-value store.

Tables hold string values under (row, column) string keys, ordered by the
same byte-wise collation the arrays use. Writes land in an unsorted buffer;
``flush`` turns the buffer into a sorted committed run and ``compact``
merges runs. A table-level combiner (none, sum, min, max, last) resolves
duplicate cells identically at buffer insert, flush, compaction, and
scan-merge, which is what makes scan output independent of when flushes
happened.

Deletes are tombstones: a deleted cell blocks everything written before it
but not after, and tombstones survive flush and partial merges until a full
compaction applies them.

Concurrency: one writer per table at a time; any number of concurrent
scanners. A scan captures an immutable snapshot (the committed run list
plus a frozen copy of the buffer) at call time, so writers never block or
perturb in-flight scans.
"""

from __future__ import annotations

import heapq
import os
import re
import threading
from bisect import bisect_left
from typing import Callable, Iterable, Iterator, Optional

from .assoc import (
    ALL,
    AllKeys,
    KeyRange,
    KeySpec,
    check_key,
    check_str_value,
    render_num,
)
from .errors import (
    CombinerValueError,
    InvalidKeyError,
    SnapshotIOError,
    TableExistsError,
    TableNameError,
    UnknownTableError,
)

Entry = tuple[str, str, str]
# Internal cell state: (barrier, value). barrier=True hides every older
# write for that cell; value=None is a pure tombstone.
_State = tuple[bool, Optional[str]]

COMBINERS = ("none", "sum", "min", "max", "last")
_NUMERIC_COMBINERS = {"sum", "min", "max"}

_NAME_RE = re.compile(r"[A-Za-z0-9_]+\Z")

MANIFEST_NAME = "MANIFEST.tsv"


def entry_cost(row: str, col: str, value: str) -> int:
    """Logical size of one entry for memory accounting (deterministic)."""
    return len(row) + len(col) + len(value) + 16


def _numeric_combine(op) -> Callable[[str, str], str]:
    def combine(old: str, new: str) -> str:
        return render_num(op(float(old), float(new)))

    return combine


_COMBINE_FNS: dict[str, Callable[[str, str], str]] = {
    "none": lambda old, new: new,
    "last": lambda old, new: new,
    "sum": _numeric_combine(lambda a, b: a + b),
    "min": _numeric_combine(min),
    "max": _numeric_combine(max),
}


class Table:
    """One sorted table. Create through :meth:`Store.create_table`."""

    def __init__(self, name: str, combiner: str = "none"):
        if combiner not in COMBINERS:
            raise CombinerValueError(f"unknown combiner {combiner!r}")
        self.name = name
        self.combiner = combiner
        self._numeric = combiner in _NUMERIC_COMBINERS
        self._combine = _COMBINE_FNS[combiner]
        # committed runs, oldest first; each run is sorted by (row, col)
        self._runs: list[list[tuple[str, str, bool, Optional[str]]]] = []
        self._runs_clean: list[bool] = []  # run holds no barriers/tombstones
        self._buffer: dict[tuple[str, str], _State] = {}
        self._lock = threading.Lock()
        self.stats = {"scans": 0, "puts": 0, "deletes": 0, "flushes": 0, "compactions": 0}

    # -- writes --------------------------------------------------------------

    def _check_value(self, value: str) -> None:
        if type(value) is not str or not value:
            raise InvalidKeyError(f"store value must be a non-empty string, got {value!r}")
        check_str_value(value)
        if self._numeric:
            try:
                v = float(value)
            except ValueError:
                raise CombinerValueError(
                    f"table {self.name!r} has combiner {self.combiner!r}; "
                    f"value {value!r} does not parse as a float"
                ) from None
            if v != v:
                raise CombinerValueError(f"NaN value under combiner {self.combiner!r}")

    def put(self, row: str, col: str, value: str) -> None:
        check_key(row)
        check_key(col)
        self._check_value(value)
        with self._lock:
            self._insert(row, col, value)
            self.stats["puts"] += 1

    def put_batch(self, entries: Iterable[Entry]) -> int:
        n = 0
        with self._lock:
            for row, col, value in entries:
                check_key(row)
                check_key(col)
                self._check_value(value)
                self._insert(row, col, value)
                n += 1
            self.stats["puts"] += n
        return n

    def _insert(self, row: str, col: str, value: str) -> None:
        buf = self._buffer
        cell = (row, col)
        state = buf.get(cell)
        if state is None:
            buf[cell] = (False, value)
        else:
            barrier, old = state
            buf[cell] = (barrier, value if old is None else self._combine(old, value))

    def _put_batch_unchecked(self, entries: Iterable[Entry]) -> int:
        # Bulk-ingest fast path: caller guarantees keys and values are valid
        # (and parseable under numeric combiners). Semantics match put_batch.
        n = 0
        with self._lock:
            buf = self._buffer
            combine = self._combine
            if self.combiner in ("none", "last"):
                for row, col, value in entries:
                    cell = (row, col)
                    state = buf.get(cell)
                    buf[cell] = (False, value) if state is None else (state[0], value)
                    n += 1
            else:
                for row, col, value in entries:
                    cell = (row, col)
                    state = buf.get(cell)
                    if state is None:
                        buf[cell] = (False, value)
                    else:
                        barrier, old = state
                        buf[cell] = (barrier, value if old is None else combine(old, value))
                    n += 1
            self.stats["puts"] += n
        return n

    def delete_entries(self, cells: Iterable[tuple[str, str]]) -> None:
        """Tombstone the listed cells; absent cells are a no-op."""
        with self._lock:
            buf = self._buffer
            n = 0
            for row, col in cells:
                check_key(row)
                check_key(col)
                buf[(row, col)] = (True, None)
                n += 1
            self.stats["deletes"] += n

    def flush(self) -> None:
        """Move the write buffer into a new sorted committed run."""
        with self._lock:
            if not self._buffer:
                return
            items = sorted(self._buffer.items())
            run = [(r, c, b, v) for (r, c), (b, v) in items]
            self._runs.append(run)
            self._runs_clean.append(not any(b or v is None for _, _, b, v in run))
            self._buffer = {}
            self.stats["flushes"] += 1

    def compact(self) -> None:
        """Merge all committed runs into one, applying tombstones.

        The buffer is untouched; scan results are identical before and
        after. After compaction the single run is barrier-free.
        """
        with self._lock:
            if len(self._runs) <= 1 and all(self._runs_clean):
                return
            merged = []
            for row, col, value in _fold_cells(_merge_runs(self._runs), self._combine):
                merged.append((row, col, False, value))
            self._runs = [merged] if merged else []
            self._runs_clean = [True] if merged else []
            self.stats["compactions"] += 1

    # -- reads ---------------------------------------------------------------

    def scan(
        self,
        row_spec: KeySpec = ALL,
        col_spec: KeySpec = ALL,
        user_iterator: Callable[[Iterator[Entry]], Iterator[Entry]] | None = None,
    ) -> Iterator[Entry]:
        """Sorted entry stream over a snapshot taken now.

        Stage order: row filter, column filter, combiner merge across runs
        and buffer, then the optional user iterator (a pure transform that
        must keep entries sorted).
        """
        with self._lock:
            runs = list(self._runs)
            buffered = sorted(self._buffer.items()) if self._buffer else []
            self.stats["scans"] += 1
        stream = _fold_cells(
            _merge_snapshot(runs, buffered, row_spec, col_spec), self._combine
        )
        if user_iterator is not None:
            stream = user_iterator(stream)
        return stream

    def scan_triples(self, row_spec: KeySpec = ALL, col_spec: KeySpec = ALL) -> list[Entry]:
        return list(self.scan(row_spec, col_spec))

    def get(self, row: str, col: str) -> Optional[str]:
        """Point lookup through the same fold a scan would apply."""
        with self._lock:
            runs = list(self._runs)
            buf_state = self._buffer.get((row, col))
        value = None
        probe = (row, col)
        for run in runs:
            i = bisect_left(run, probe)
            if i < len(run) and run[i][0] == row and run[i][1] == col:
                _r, _c, barrier, v = run[i]
                if barrier or value is None:
                    value = v
                else:
                    value = self._combine(value, v)
        if buf_state is not None:
            barrier, v = buf_state
            if barrier or value is None:
                value = v
            else:
                value = self._combine(value, v)
        return value

    def is_empty(self) -> bool:
        return not self._runs and not self._buffer

    def __repr__(self):
        return f"<Table {self.name!r} combiner={self.combiner}>"


def _run_slice(run, row_spec: KeySpec):
    """Iterate a sorted run, bisecting to the start of a row range."""
    if isinstance(row_spec, KeyRange):
        lo = bisect_left(run, (row_spec.start,))
        end = row_spec.end
        for i in range(lo, len(run)):
            entry = run[i]
            if entry[0] > end:
                break
            yield entry
    elif isinstance(row_spec, AllKeys):
        yield from run
    else:
        for entry in run:
            if row_spec.matches(entry[0]):
                yield entry


def _tag_run(run, age: int, row_spec: KeySpec, col_spec: KeySpec):
    all_cols = isinstance(col_spec, AllKeys)
    for r, c, b, v in _run_slice(run, row_spec):
        if all_cols or col_spec.matches(c):
            yield (r, c, age, b, v)


def _tag_buffer(buffered, age: int, row_spec: KeySpec, col_spec: KeySpec):
    all_cols = isinstance(col_spec, AllKeys)
    for (r, c), (b, v) in buffered:
        if row_spec.matches(r) and (all_cols or col_spec.matches(c)):
            yield (r, c, age, b, v)


def _merge_snapshot(runs, buffered, row_spec: KeySpec, col_spec: KeySpec):
    """Yield (row, col, age, barrier, value) sorted by (row, col, age)."""
    sources = [_tag_run(run, age, row_spec, col_spec) for age, run in enumerate(runs)]
    sources.append(_tag_buffer(buffered, len(runs), row_spec, col_spec))
    if len(sources) == 1:
        return sources[0]
    return heapq.merge(*sources)


def _merge_runs(runs):
    sources = [_tag_run(run, age, ALL, ALL) for age, run in enumerate(runs)]
    if len(sources) == 1:
        return sources[0]
    return heapq.merge(*sources)


def _fold_cells(merged, combine) -> Iterator[Entry]:
    """Fold duplicate cells in age order into single entries.

    A barrier discards the fold so far; a None value with no newer write
    leaves the cell absent.
    """
    cur_cell = None
    cur_value: Optional[str] = None
    for row, col, _age, barrier, value in merged:
        cell = (row, col)
        if cell != cur_cell:
            if cur_cell is not None and cur_value is not None:
                yield (cur_cell[0], cur_cell[1], cur_value)
            cur_cell = cell
            cur_value = None
        if barrier:
            cur_value = value
        elif cur_value is None:
            cur_value = value
        else:
            cur_value = combine(cur_value, value)
    if cur_cell is not None and cur_value is not None:
        yield (cur_cell[0], cur_cell[1], cur_value)


class Store:
    """A named collection of tables with TSV snapshot persistence."""

    def __init__(self):
        self._tables: dict[str, Table] = {}
        self._lock = threading.Lock()

    def create_table(self, name: str, combiner: str = "none") -> Table:
        if not _NAME_RE.match(name or ""):
            raise TableNameError(f"table name must match [A-Za-z0-9_]+, got {name!r}")
        with self._lock:
            if name in self._tables:
                raise TableExistsError(f"table {name!r} already exists")
            table = Table(name, combiner)
            self._tables[name] = table
            return table

    def table(self, name: str) -> Table:
        try:
            return self._tables[name]
        except KeyError:
            raise UnknownTableError(f"no table named {name!r}") from None

    def has_table(self, name: str) -> bool:
        return name in self._tables

    def drop_table(self, name: str) -> None:
        with self._lock:
            if name not in self._tables:
                raise UnknownTableError(f"no table named {name!r}")
            del self._tables[name]

    def table_names(self) -> list[str]:
        return sorted(self._tables)

    # -- persistence -----------------------------------------------------

    def save(self, directory: str) -> None:
        """Write one sorted TSV per table plus a MANIFEST.tsv.

        Tables are flushed and compacted first, so the files are canonical:
        re-saving an untouched store is byte-identical.
        """
        try:
            os.makedirs(directory, exist_ok=True)
            manifest_lines = []
            for name in self.table_names():
                table = self._tables[name]
                table.flush()
                table.compact()
                manifest_lines.append(f"{name}\t{table.combiner}\n")
                path = os.path.join(directory, f"{name}.tsv")
                with open(path, "w", encoding="utf-8", newline="") as fh:
                    run = table._runs[0] if table._runs else []
                    fh.writelines(f"{r}\t{c}\t{v}\n" for (r, c, _b, v) in run)
            with open(os.path.join(directory, MANIFEST_NAME), "w", encoding="utf-8", newline="") as fh:
                fh.writelines(manifest_lines)
        except OSError as exc:
            raise SnapshotIOError(f"snapshot save failed: {exc}") from exc

    @classmethod
    def load(cls, directory: str) -> "Store":
        """Rebuild a store from a snapshot directory.

        A missing directory or manifest loads as an empty store; malformed
        files raise SnapshotIOError.
        """
        store = cls()
        manifest = os.path.join(directory, MANIFEST_NAME)
        if not os.path.isfile(manifest):
            return store
        try:
            with open(manifest, "r", encoding="utf-8", newline="") as fh:
                manifest_text = fh.read()
        except OSError as exc:
            raise SnapshotIOError(f"snapshot load failed: {exc}") from exc
        for line_no, line in enumerate(manifest_text.splitlines(), 1):
            parts = line.split("\t")
            if len(parts) != 2 or parts[1] not in COMBINERS:
                raise SnapshotIOError(f"{MANIFEST_NAME}:{line_no}: bad manifest line {line!r}")
            name, combiner = parts
            table = store.create_table(name, combiner)
            path = os.path.join(directory, f"{name}.tsv")
            try:
                with open(path, "r", encoding="utf-8", newline="") as fh:
                    text = fh.read()
            except OSError as exc:
                raise SnapshotIOError(f"snapshot load failed: {exc}") from exc
            run = []
            prev = None
            for entry_no, entry_line in enumerate(text.splitlines(), 1):
                parts = entry_line.split("\t")
                if len(parts) != 3:
                    raise SnapshotIOError(f"{name}.tsv:{entry_no}: expected 3 fields")
                r, c, v = parts
                try:
                    check_key(r)
                    check_key(c)
                    table._check_value(v)
                except Exception as exc:
                    raise SnapshotIOError(f"{name}.tsv:{entry_no}: {exc}") from exc
                if prev is not None and (r, c) <= prev:
                    raise SnapshotIOError(f"{name}.tsv:{entry_no}: entries out of order")
                prev = (r, c)
                run.append((r, c, False, v))
            if run:
                table._runs = [run]
                table._runs_clean = [True]
        return store
