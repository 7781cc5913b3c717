"""Deterministic random-graph generation for tests and benchmarks.

Both generators emit a simple undirected graph (symmetric 0/1 adjacency,
no self loops) over node keys "v00000".."v99999". Output is canonical:
both edge orientations, sorted, value "1", so a fixed (kind, n, degree,
seed) always produces byte-identical files.
"""

from __future__ import annotations

import math
import random
from typing import Iterable

from .errors import UsageError
from .kvstore import Entry

GRAPH_KINDS = ("erdos", "powerlaw")


def node_key(i: int) -> str:
    return f"v{i:05d}"


def _check_params(n: int, avg_degree: float) -> None:
    if n < 1:
        raise UsageError("node count must be >= 1")
    if n > 100000:
        raise UsageError("node keys are zero-padded to 5 digits; n must be <= 100000")
    if avg_degree < 0:
        raise UsageError("average degree must be >= 0")


def erdos_pairs(n: int, avg_degree: float, seed: int) -> list[tuple[int, int]]:
    """G(n, p) with p = avg_degree / n, sampled by geometric skips."""
    _check_params(n, avg_degree)
    if n < 2:
        return []
    p = min(1.0, avg_degree / n)
    if p <= 0.0:
        return []
    rng = random.Random(seed)
    total = n * (n - 1) // 2
    pairs: list[tuple[int, int]] = []
    if p >= 1.0:
        return [(i, j) for i in range(n) for j in range(i + 1, n)]
    log_q = math.log1p(-p)
    idx = -1
    row = 0
    row_start = 0  # linear index of pair (row, row+1)
    row_len = n - 1
    while True:
        idx += 1 + int(math.log(1.0 - rng.random()) / log_q)
        if idx >= total:
            break
        while idx >= row_start + row_len:
            row_start += row_len
            row += 1
            row_len = n - 1 - row
        pairs.append((row, row + 1 + (idx - row_start)))
    return pairs


def powerlaw_pairs(n: int, avg_degree: float, seed: int) -> list[tuple[int, int]]:
    """Preferential attachment: each new node attaches to m existing nodes
    chosen with probability proportional to current degree."""
    _check_params(n, avg_degree)
    m = max(1, round(avg_degree / 2))
    if n < 2:
        return []
    m = min(m, n - 1)
    rng = random.Random(seed)
    targets = list(range(m))
    repeated: list[int] = []
    edges: set[tuple[int, int]] = set()
    for source in range(m, n):
        for t in targets:
            edges.add((min(source, t), max(source, t)))
        repeated.extend(targets)
        repeated.extend([source] * m)
        chosen: set[int] = set()
        while len(chosen) < m:
            chosen.add(rng.choice(repeated))
        targets = sorted(chosen)
    return sorted(edges)


def graph_entries(kind: str, n: int, avg_degree: float, seed: int) -> list[Entry]:
    """Both orientations of every edge, sorted, value "1"."""
    if kind == "erdos":
        pairs = erdos_pairs(n, avg_degree, seed)
    elif kind == "powerlaw":
        pairs = powerlaw_pairs(n, avg_degree, seed)
    else:
        raise UsageError(f"unknown graph kind {kind!r}; expected one of {GRAPH_KINDS}")
    directed = []
    for i, j in pairs:
        directed.append((node_key(i), node_key(j), "1"))
        directed.append((node_key(j), node_key(i), "1"))
    directed.sort()
    return directed


def weighted_entries(
    kind: str, n: int, avg_degree: float, seed: int, values: Iterable[int] = range(1, 10)
) -> list[Entry]:
    """Graph entries with symmetric random integer weights (benchmark input)."""
    values = list(values)
    if kind == "erdos":
        pairs = erdos_pairs(n, avg_degree, seed)
    elif kind == "powerlaw":
        pairs = powerlaw_pairs(n, avg_degree, seed)
    else:
        raise UsageError(f"unknown graph kind {kind!r}; expected one of {GRAPH_KINDS}")
    rng = random.Random(seed ^ 0x5EED)
    directed = []
    for i, j in pairs:
        v = str(rng.choice(values))
        directed.append((node_key(i), node_key(j), v))
        directed.append((node_key(j), node_key(i), v))
    directed.sort()
    return directed
