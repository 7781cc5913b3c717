"""Triple-file TSV reading and writing.

One record per line, ``row<TAB>col<TAB>value<LF>``, UTF-8, no header and no
escaping; the forbidden-byte rules on keys and values make the format
unambiguous. Array output renders non-integral floats at 9 significant
digits (store snapshots, by contrast, keep values lossless).
"""

from __future__ import annotations

from typing import Iterable, TextIO

from .assoc import AssocArray, Value
from .errors import TsvFormatError
from .kvstore import Entry


def render_display(v: Value) -> str:
    """CLI-facing value rendering: ints bare, other floats at 9 digits."""
    if isinstance(v, str):
        return v
    if v == v and abs(v) < 9007199254740992.0:
        i = int(v)
        if i == v:
            return str(i)
    return "%.9g" % v


def read_entries(path: str) -> list[Entry]:
    """Read and validate a triple file into raw string entries.

    Raises TsvFormatError naming the 1-based line number on the first
    malformed line; OS errors propagate to the caller.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        text = fh.read()
    entries: list[Entry] = []
    append = entries.append
    for i, line in enumerate(text.splitlines(), 1):
        parts = line.split("\t")
        if len(parts) != 3:
            raise TsvFormatError(
                f"line {i}: expected 3 tab-separated fields, got {len(parts)}", i
            )
        r, c, v = parts
        if not r or not c:
            raise TsvFormatError(f"line {i}: empty key", i)
        if not v:
            raise TsvFormatError(f"line {i}: empty value", i)
        if "\x00" in line:
            raise TsvFormatError(f"line {i}: NUL byte", i)
        append((r, c, v))
    return entries


def write_entries(fh: TextIO, entries: Iterable[Entry]) -> None:
    fh.writelines(f"{r}\t{c}\t{v}\n" for r, c, v in entries)


def write_array(fh: TextIO, a: AssocArray) -> None:
    """Write an array's triples in row-major sorted order."""
    fh.writelines(f"{r}\t{c}\t{render_display(v)}\n" for r, c, v in a.to_triples())


def array_tsv(a: AssocArray) -> str:
    return "".join(f"{r}\t{c}\t{render_display(v)}\n" for r, c, v in a.to_triples())
