"""Semiring matrix multiply and reductions over associative arrays.

The inner dimension of a multiply is matched by key string equality, never
by position: C(i, j) folds mult(A(i, k), B(k, j)) over the intersection of
A's column keys and B's row keys. Absent entries contribute nothing, which
is what lets min.plus and max.times work without fabricating identities.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from typing import Callable

from .assoc import AssocArray, Value
from .errors import UsageError, ValueKindError


@dataclass(frozen=True)
class Semiring:
    """An (add, mult, additive identity) triple driving matmul.

    ``add`` must be associative and commutative with ``add_identity`` as its
    neutral element. ``drop_result`` names the annihilating zero whose exact
    results are dropped from outputs (0.0 for plus.times); semirings without
    one keep every combination that had at least one contributing k.
    """

    name: str
    add: Callable[[float, float], float]
    mult: Callable[[float, float], float]
    add_identity: float
    drop_result: float | None = None


PLUS_TIMES = Semiring("plus.times", operator.add, operator.mul, 0.0, drop_result=0.0)
MIN_PLUS = Semiring("min.plus", min, operator.add, math.inf)
MAX_TIMES = Semiring("max.times", max, operator.mul, 0.0)

SEMIRINGS = {sr.name: sr for sr in (PLUS_TIMES, MIN_PLUS, MAX_TIMES)}


def semiring(name: str) -> Semiring:
    try:
        return SEMIRINGS[name]
    except KeyError:
        raise UsageError(
            f"unknown semiring {name!r}; expected one of {sorted(SEMIRINGS)}"
        ) from None


def _require_num(a: AssocArray, what: str) -> None:
    if a.kind != "num":
        raise ValueKindError(f"{what} requires num arrays; apply logical() to str arrays first")


def matmul(a: AssocArray, b: AssocArray, sr: Semiring = PLUS_TIMES) -> AssocArray:
    """Key-matched sparse multiply, row-major Gustavson accumulation.

    For each row of ``a``, partial products against the matching rows of
    ``b`` are scattered into a per-row accumulator and folded with the
    semiring add. Rows of ``b`` whose key never appears among ``a``'s
    column keys are never touched.
    """
    _require_num(a, "matmul")
    _require_num(b, "matmul")
    brows = b._rows
    out: dict[str, dict[str, Value]] = {}
    if sr is PLUS_TIMES:
        for i, arow in a._rows.items():
            acc: dict[str, float] = {}
            get = acc.get
            for k, av in arow.items():
                brow = brows.get(k)
                if brow is None:
                    continue
                for j, bv in brow.items():
                    p = av * bv
                    cur = get(j)
                    acc[j] = p if cur is None else cur + p
            kept = {j: v for j, v in acc.items() if v != 0.0}
            if kept:
                out[i] = kept
        return AssocArray(out, "num")

    add, mult, drop = sr.add, sr.mult, sr.drop_result
    for i, arow in a._rows.items():
        acc = {}
        get = acc.get
        for k, av in arow.items():
            brow = brows.get(k)
            if brow is None:
                continue
            for j, bv in brow.items():
                p = mult(av, bv)
                cur = get(j)
                acc[j] = p if cur is None else add(cur, p)
        if drop is not None:
            acc = {j: v for j, v in acc.items() if v != drop}
        if acc:
            out[i] = acc
    return AssocArray(out, "num")


REDUCE_KEY = "1"


def reduce_cols(a: AssocArray) -> AssocArray:
    """Sum each row across its columns into a one-column array keyed "1"."""
    _require_num(a, "reduce_cols")
    out: dict[str, dict[str, Value]] = {}
    for r, row in a._rows.items():
        total = math.fsum(row.values())
        if total != 0.0:
            out[r] = {REDUCE_KEY: total}
    return AssocArray(out, "num")


def reduce_rows(a: AssocArray) -> AssocArray:
    """Sum each column down its rows into a one-row array keyed "1"."""
    _require_num(a, "reduce_rows")
    totals: dict[str, list[float]] = {}
    for row in a._rows.values():
        for c, v in row.items():
            totals.setdefault(c, []).append(v)
    kept = {c: math.fsum(vs) for c, vs in totals.items()}
    kept = {c: v for c, v in kept.items() if v != 0.0}
    return AssocArray({REDUCE_KEY: kept} if kept else {}, "num")


def identity_over(keys) -> AssocArray:
    """Identity array I(k, k) = 1.0 over the given keys."""
    return AssocArray({k: {k: 1.0} for k in keys}, "num")
