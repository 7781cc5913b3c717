"""String-keyed sparse associative arrays.

An :class:`AssocArray` maps (row key, column key) pairs to values. Keys are
non-empty strings ordered byte-wise over their UTF-8 encoding; for valid
Unicode this equals code-point order, so plain ``str`` comparison is the
single collation used everywhere (arrays, store, range selectors).

Values are either 64-bit floats ("num") or strings ("str") and an array is
homogeneous in kind. ``0.0`` and ``""`` are the zero elements and are never
stored: every producer drops them, and the row/column key sets are always
exactly the support of the stored entries (there is no declared shape).

Arrays are immutable. All operations are pure functions returning new
arrays, so instances can be shared across threads without locking.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Union

from .errors import InvalidKeyError, SpecSyntaxError, ValueKindError

Value = Union[float, str]

_FORBIDDEN = ("\t", "\n", "\x00")


def check_key(key: str) -> None:
    """Reject keys that are empty, non-string, or contain tab/LF/NUL."""
    if type(key) is not str or not key:
        raise InvalidKeyError(f"key must be a non-empty string, got {key!r}")
    if "\t" in key or "\n" in key or "\x00" in key:
        raise InvalidKeyError(f"key contains a forbidden byte: {key!r}")
    if not key.isascii():
        try:
            key.encode("utf-8")
        except UnicodeEncodeError:
            raise InvalidKeyError(f"key is not valid UTF-8: {key!r}") from None


def check_str_value(value: str) -> None:
    # Stored strings obey the same byte rules as keys so the TSV wire format
    # needs no escaping. Empty strings are the zero element, handled upstream.
    if "\t" in value or "\n" in value or "\x00" in value:
        raise InvalidKeyError(f"string value contains a forbidden byte: {value!r}")
    if not value.isascii():
        try:
            value.encode("utf-8")
        except UnicodeEncodeError:
            raise InvalidKeyError(f"string value is not valid UTF-8: {value!r}") from None


def render_num(x: float) -> str:
    """Shortest decimal string that round-trips through ``float``.

    Integral values below 2**53 render without a fraction part ("3", not
    "3.0") so store combiners and TSV snapshots stay byte-stable.
    """
    if x == x and abs(x) < 9007199254740992.0:  # finite and int-exact range
        i = int(x)
        if i == x:
            return str(i)
    return repr(x)


def parse_num(s: str) -> float | None:
    """Strict float parse: returns None on anything ``render_num`` cannot emit.

    Rejects padding, underscores, and NaN so that value-kind inference on
    queried tables is deterministic.
    """
    if not s or s != s.strip() or "_" in s:
        return None
    try:
        v = float(s)
    except ValueError:
        return None
    if v != v:  # NaN
        return None
    return v


# ---------------------------------------------------------------------------
# Key specs (query-side selectors)
# ---------------------------------------------------------------------------


class KeySpec:
    """Selector over one dimension: every key, an explicit set, or a range."""

    __slots__ = ()

    def matches(self, key: str) -> bool:
        raise NotImplementedError


class AllKeys(KeySpec):
    __slots__ = ()

    def matches(self, key: str) -> bool:
        return True

    def __repr__(self):
        return "ALL"

    def __eq__(self, other):
        return isinstance(other, AllKeys)

    def __hash__(self):
        return hash(AllKeys)


ALL = AllKeys()


@dataclass(frozen=True)
class KeyList(KeySpec):
    keys: tuple[str, ...]  # sorted, unique

    def matches(self, key: str) -> bool:
        return key in self._key_set

    @property
    def _key_set(self):
        # cached lazily on the instance despite frozen dataclass
        s = self.__dict__.get("_set")
        if s is None:
            s = frozenset(self.keys)
            self.__dict__["_set"] = s
        return s


@dataclass(frozen=True)
class KeyRange(KeySpec):
    start: str
    end: str  # inclusive on both ends

    def matches(self, key: str) -> bool:
        return self.start <= key <= self.end


def key_list(keys: Iterable[str]) -> KeySpec:
    """Build a KeyList selector, deduplicating and sorting the given keys."""
    uniq = sorted(set(keys))
    for k in uniq:
        check_key(k)
    return KeyList(tuple(uniq))


def key_range(start: str, end: str) -> KeyRange:
    check_key(start)
    check_key(end)
    if start > end:
        raise SpecSyntaxError(f"range start {start!r} sorts after end {end!r}")
    return KeyRange(start, end)


def parse_key_spec(spec: str) -> KeySpec:
    """Parse a selector string in the trailing-delimiter convention.

    The last character of the string is the delimiter; every item is
    terminated by it. ``":"`` alone selects everything, and a three-item
    spec whose middle item is ``":"`` is an inclusive range:

        ":"        -> ALL
        "a,b,"     -> KeyList(a, b)
        "a;b;"     -> KeyList(a, b)     (delimiter ';')
        "a,:,c,"   -> KeyRange(a, c)
    """
    if type(spec) is not str or not spec:
        raise SpecSyntaxError("empty key spec")
    if spec == ":":
        return ALL
    delim = spec[-1]
    items = spec.split(delim)[:-1]
    if not items or any(item == "" for item in items):
        raise SpecSyntaxError(f"empty item in key spec {spec!r}")
    if len(items) == 3 and items[1] == ":":
        return key_range(items[0], items[2])
    return key_list(items)


_RENDER_DELIMS = ",;|/ !#"


def render_key_spec(spec: KeySpec) -> str:
    """Canonical inverse of :func:`parse_key_spec`.

    Raises when no delimiter candidate is free of the keys, or when a
    three-key list with a literal middle ":" would re-parse as a range
    (a genuine ambiguity of the selector grammar).
    """
    if isinstance(spec, AllKeys):
        return ":"
    if isinstance(spec, KeyList):
        items = list(spec.keys)
    elif isinstance(spec, KeyRange):
        items = [spec.start, ":", spec.end]
    else:
        raise SpecSyntaxError(f"cannot render {spec!r}")
    if isinstance(spec, KeyList) and len(items) == 3 and items[1] == ":":
        raise SpecSyntaxError('a 3-key list with middle ":" is not renderable')
    for delim in _RENDER_DELIMS:
        if all(delim not in item for item in items):
            return "".join(item + delim for item in items)
    raise SpecSyntaxError("no delimiter candidate avoids every key")


# ---------------------------------------------------------------------------
# The array type
# ---------------------------------------------------------------------------

_COLLISIONS: dict[str, Callable] = {
    "sum": lambda a, b: a + b,
    "min": min,
    "max": max,
    "last": lambda a, b: b,
}

_NUM_OPS: dict[str, Callable] = {
    "+": lambda a, b: a + b,
    "*": lambda a, b: a * b,
    "min": min,
    "max": max,
    "last": lambda a, b: b,
}
_NUM_OPS["sum"] = _NUM_OPS["+"]
_NUM_OPS["times"] = _NUM_OPS["*"]

_STR_OPS: dict[str, Callable] = {
    "min": min,
    "max": max,
    "last": lambda a, b: b,
}


class AssocArray:
    """Immutable sparse 2-D map from string keys to homogeneous values."""

    __slots__ = ("_rows", "_kind", "_row_keys", "_col_keys", "_nnz")

    def __init__(self, rows: dict[str, dict[str, Value]], kind: str):
        # Internal: callers must pass validated, zero-free, owned dicts.
        # Use from_triples() to build arrays from raw data.
        self._rows = rows
        self._kind = kind if rows else "num"
        self._row_keys: tuple[str, ...] | None = None
        self._col_keys: tuple[str, ...] | None = None
        self._nnz: int | None = None

    # -- construction -------------------------------------------------------

    @staticmethod
    def empty() -> "AssocArray":
        return AssocArray({}, "num")

    # -- basic queries -------------------------------------------------------

    @property
    def kind(self) -> str:
        return self._kind

    @property
    def row_keys(self) -> tuple[str, ...]:
        if self._row_keys is None:
            self._row_keys = tuple(sorted(self._rows))
        return self._row_keys

    @property
    def col_keys(self) -> tuple[str, ...]:
        if self._col_keys is None:
            cols = set()
            for row in self._rows.values():
                cols.update(row)
            self._col_keys = tuple(sorted(cols))
        return self._col_keys

    @property
    def nnz(self) -> int:
        if self._nnz is None:
            self._nnz = sum(len(r) for r in self._rows.values())
        return self._nnz

    @property
    def dims(self) -> tuple[int, int]:
        return (len(self.row_keys), len(self.col_keys))

    def get(self, row: str, col: str, default=None):
        r = self._rows.get(row)
        if r is None:
            return default
        return r.get(col, default)

    def row(self, row: str) -> dict[str, Value]:
        """Column map of one row (a copy; absent rows give an empty dict)."""
        return dict(self._rows.get(row, ()))

    def to_triples(self) -> list[tuple[str, str, Value]]:
        """All entries in row-major (row, then column) sorted order."""
        out = []
        for r in self.row_keys:
            row = self._rows[r]
            for c in sorted(row):
                out.append((r, c, row[c]))
        return out

    def __len__(self) -> int:
        return self.nnz

    def __eq__(self, other) -> bool:
        if not isinstance(other, AssocArray):
            return NotImplemented
        return self._kind == other._kind and self._rows == other._rows

    __hash__ = None  # unhashable, like dict

    def __repr__(self):
        nr, nc = self.dims
        return f"<AssocArray {self._kind} {nr}x{nc} nnz={self.nnz}>"

    # -- structural operations ----------------------------------------------

    def subref(self, row_spec: KeySpec | str, col_spec: KeySpec | str) -> "AssocArray":
        """Entries whose row key matches row_spec and column key matches col_spec.

        Dimension keys shrink to the surviving support; an empty result is
        valid. Specs may be given as selector strings.
        """
        row_spec = _as_spec(row_spec)
        col_spec = _as_spec(col_spec)
        all_cols = isinstance(col_spec, AllKeys)
        out: dict[str, dict[str, Value]] = {}
        for r, row in self._rows.items():
            if not row_spec.matches(r):
                continue
            if all_cols:
                out[r] = dict(row)
            else:
                kept = {c: v for c, v in row.items() if col_spec.matches(c)}
                if kept:
                    out[r] = kept
        return AssocArray(out, self._kind)

    def transpose(self) -> "AssocArray":
        out: dict[str, dict[str, Value]] = {}
        for r, row in self._rows.items():
            for c, v in row.items():
                out.setdefault(c, {})[r] = v
        return AssocArray(out, self._kind)

    def logical(self) -> "AssocArray":
        """Project every stored entry to 1.0, keeping the support."""
        out = {r: dict.fromkeys(row, 1.0) for r, row in self._rows.items()}
        return AssocArray(out, "num")


def _as_spec(spec: KeySpec | str) -> KeySpec:
    if isinstance(spec, str):
        return parse_key_spec(spec)
    if isinstance(spec, KeySpec):
        return spec
    raise SpecSyntaxError(f"not a key spec: {spec!r}")


def _coerce_value(v, kind: str) -> Value:
    if kind == "num":
        f = float(v)
        if f != f:
            raise ValueKindError("NaN values are rejected")
        return f
    check_str_value(v)
    return v


def _detect_kind(vals: Sequence) -> str:
    kind = None
    for v in vals:
        k = "str" if isinstance(v, str) else "num" if isinstance(v, (int, float)) else None
        if k is None:
            raise ValueKindError(f"unsupported value type: {type(v).__name__}")
        if kind is None:
            kind = k
        elif kind != k:
            raise ValueKindError("mixed num and str values in one array")
    return kind or "num"


def from_triples(
    rows: Sequence[str],
    cols: Sequence[str],
    vals: Sequence[Value],
    collision: str | None = None,
) -> AssocArray:
    """Build an array from parallel (row, col, value) lists.

    Duplicate (row, col) pairs are folded by the collision policy, one of
    "sum", "min", "max", "last". The default is "sum" for num values and
    "last" for str values. Fold results equal to the zero element are
    dropped, so the output never stores zeros.
    """
    if not (len(rows) == len(cols) == len(vals)):
        raise ValueKindError(
            f"triple lists differ in length: {len(rows)}, {len(cols)}, {len(vals)}"
        )
    kind = _detect_kind(vals)
    if collision is None:
        collision = "sum" if kind == "num" else "last"
    fold = _COLLISIONS.get(collision)
    if fold is None:
        raise ValueKindError(f"unknown collision policy {collision!r}")
    if collision == "sum" and kind == "str":
        raise ValueKindError('collision "sum" is only valid for num values')

    data: dict[str, dict[str, Value]] = {}
    for r, c, v in zip(rows, cols, vals):
        check_key(r)
        check_key(c)
        v = _coerce_value(v, kind)
        row = data.get(r)
        if row is None:
            data[r] = {c: v}
        elif c in row:
            row[c] = fold(row[c], v)
        else:
            row[c] = v

    zero = 0.0 if kind == "num" else ""
    out: dict[str, dict[str, Value]] = {}
    for r, row in data.items():
        kept = {c: v for c, v in row.items() if v != zero}
        if kept:
            out[r] = kept
    return AssocArray(out, kind)


def _resolve_op(op, kind: str, default: str | None) -> Callable:
    if op is None:
        op = default
        if op is None:
            raise ValueKindError("str arrays need an explicit op (min, max, or last)")
    if callable(op):
        return op
    table = _NUM_OPS if kind == "num" else _STR_OPS
    fn = table.get(op)
    if fn is None:
        raise ValueKindError(f"op {op!r} is not valid for {kind} arrays")
    return fn


def _check_same_kind(a: AssocArray, b: AssocArray) -> str:
    if a.kind != b.kind:
        raise ValueKindError(f"kind mismatch: {a.kind} vs {b.kind}")
    return a.kind


def ew_add(a: AssocArray, b: AssocArray, op=None) -> AssocArray:
    """Element-wise combine with union semantics.

    Entries present in exactly one operand pass through unchanged; entries
    present in both are combined by ``op`` (default ``+`` for num arrays).
    Zeros produced by the op are dropped.
    """
    if a.nnz == 0:
        return b
    if b.nnz == 0:
        return a
    kind = _check_same_kind(a, b)
    fn = _resolve_op(op, kind, "+" if kind == "num" else None)
    zero = 0.0 if kind == "num" else ""
    out: dict[str, dict[str, Value]] = {}
    arows, brows = a._rows, b._rows
    for r, arow in arows.items():
        brow = brows.get(r)
        if brow is None:
            out[r] = dict(arow)
            continue
        merged = dict(arow)
        for c, bv in brow.items():
            if c in merged:
                v = fn(merged[c], bv)
                if v == zero:
                    del merged[c]
                else:
                    merged[c] = v
            else:
                merged[c] = bv
        if merged:
            out[r] = merged
    for r, brow in brows.items():
        if r not in arows:
            out[r] = dict(brow)
    return AssocArray(out, kind)


def ew_mult(a: AssocArray, b: AssocArray, op=None) -> AssocArray:
    """Element-wise combine with intersection semantics.

    Only (row, col) pairs present in both operands survive, combined by
    ``op`` (default ``*`` for num arrays); zero results are dropped.
    """
    if a.nnz == 0 or b.nnz == 0:
        return AssocArray.empty()
    kind = _check_same_kind(a, b)
    fn = _resolve_op(op, kind, "*" if kind == "num" else None)
    zero = 0.0 if kind == "num" else ""
    out: dict[str, dict[str, Value]] = {}
    brows = b._rows
    for r, arow in a._rows.items():
        brow = brows.get(r)
        if brow is None:
            continue
        kept: dict[str, Value] = {}
        for c, av in arow.items():
            bv = brow.get(c)
            if bv is not None:
                v = fn(av, bv)
                if v != zero:
                    kept[c] = v
        if kept:
            out[r] = kept
    return AssocArray(out, kind)


def transpose(a: AssocArray) -> AssocArray:
    return a.transpose()


def logical(a: AssocArray) -> AssocArray:
    return a.logical()


def subref(a: AssocArray, row_spec: KeySpec | str, col_spec: KeySpec | str) -> AssocArray:
    return a.subref(row_spec, col_spec)


def to_triples(a: AssocArray) -> list[tuple[str, str, Value]]:
    return a.to_triples()


def equal(a: AssocArray, b: AssocArray) -> bool:
    return a == b


def nnz(a: AssocArray) -> int:
    return a.nnz


def dims(a: AssocArray) -> tuple[int, int]:
    return a.dims
