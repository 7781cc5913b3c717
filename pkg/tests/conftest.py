from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from d4m.assoc import AssocArray, from_triples


def rand_triples(rng: random.Random, n_rows: int, n_cols: int, density: float, values=range(1, 10)):
    """Random integer-valued triples on a key grid, no duplicate cells."""
    values = list(values)
    rows, cols, vals = [], [], []
    for i in range(n_rows):
        for j in range(n_cols):
            if rng.random() < density:
                rows.append(f"r{i:04d}")
                cols.append(f"c{j:04d}")
                vals.append(float(rng.choice(values)))
    return rows, cols, vals


def rand_assoc(rng: random.Random, n_rows: int, n_cols: int, density: float, values=range(1, 10)) -> AssocArray:
    rows, cols, vals = rand_triples(rng, n_rows, n_cols, density, values)
    return from_triples(rows, cols, vals)


def rand_graph(rng: random.Random, n: int, p: float):
    """Random simple undirected graph.

    Returns (adjacency AssocArray, neighbor-set dict). Nodes with no edges
    appear in neither.
    """
    nbrs: dict[str, set[str]] = {}
    rows, cols = [], []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                u, v = f"n{i:03d}", f"n{j:03d}"
                rows += [u, v]
                cols += [v, u]
                nbrs.setdefault(u, set()).add(v)
                nbrs.setdefault(v, set()).add(u)
    adj = from_triples(rows, cols, [1.0] * len(rows))
    return adj, nbrs


@pytest.fixture
def rng():
    return random.Random(20260809)
