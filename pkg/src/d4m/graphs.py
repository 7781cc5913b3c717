"""Graph algorithms expressed in the array algebra.

Each algorithm runs against either an in-memory adjacency array or a bound
table group; the two backends produce equal arrays on equal graphs. BFS
tolerates any adjacency (it projects to 0/1 internally); Jaccard and
k-truss demand a symmetric 0/1 adjacency with an empty diagonal and raise
AdjacencyError otherwise.

The in-store k-truss mutates its table group (edges are physically
deleted from both the edge and transpose tables), so it needs exclusive
write access for its duration.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Union

from .assoc import ALL, AssocArray, KeyList, KeySpec, Value, _as_spec, ew_add
from .errors import AdjacencyError, UsageError
from .kernels import PLUS_TIMES, matmul, reduce_cols
from .schema import TableRef, degree, query, table_to_assoc, tablemult

GraphView = Union[AssocArray, TableRef]


def validate_adjacency(adj: AssocArray) -> None:
    """Require a symmetric 0/1 num adjacency with no self loops."""
    if adj.kind != "num":
        raise AdjacencyError("adjacency must be a num array of 0/1 values")
    for r, c, v in adj.to_triples():
        if v != 1.0:
            raise AdjacencyError(f"adjacency value at ({r!r}, {c!r}) is {v!r}, not 1")
        if r == c:
            raise AdjacencyError(f"adjacency has a self loop at {r!r}")
        if adj.get(c, r) is None:
            raise AdjacencyError(f"adjacency is asymmetric: ({r!r}, {c!r}) has no mirror")


class _MemGraph:
    def __init__(self, adj: AssocArray):
        self.raw = adj
        self.adj = adj.logical()

    def matching_rows(self, spec: KeySpec) -> tuple[str, ...]:
        return tuple(k for k in self.adj.row_keys if spec.matches(k))

    def degrees(self, keys: tuple[str, ...]) -> dict[str, float]:
        degs = reduce_cols(self.adj)
        return {k: degs.get(k, "1", 0.0) for k in keys}

    def rows(self, keys: tuple[str, ...]) -> AssocArray:
        return self.adj.subref(_key_set_spec(keys), ALL)

    def full(self) -> AssocArray:
        # unprojected: validation must see the input as given
        return self.raw


class _StoreGraph:
    def __init__(self, ref: TableRef):
        self.ref = ref

    def matching_rows(self, spec: KeySpec) -> tuple[str, ...]:
        return query(self.ref, spec, ALL).row_keys

    def degrees(self, keys: tuple[str, ...]) -> dict[str, float]:
        degs = degree(self.ref, _key_set_spec(keys))
        return {k: degs.get(k, "Degree", 0.0) for k in keys}

    def rows(self, keys: tuple[str, ...]) -> AssocArray:
        return query(self.ref, _key_set_spec(keys), ALL).logical()

    def full(self) -> AssocArray:
        # unprojected: validation must see the stored values as they parse
        return query(self.ref, ALL, ALL)


def _key_set_spec(keys: tuple[str, ...]) -> KeySpec:
    return KeyList(tuple(sorted(keys)))


def _view(g: GraphView):
    if isinstance(g, AssocArray):
        return _MemGraph(g)
    if isinstance(g, TableRef):
        return _StoreGraph(g)
    raise UsageError(f"not a graph view: {g!r}")


def bfs(
    g: GraphView,
    seeds: KeySpec | str,
    hops: int,
    min_degree: int | None = None,
    max_degree: int | None = None,
) -> AssocArray:
    """Union of the edge sets traversed in ``hops`` frontier expansions.

    The frontier starts as the seed keys present in the graph; each step
    selects the frontier's rows (optionally keeping only rows whose degree
    lies in [min_degree, max_degree], bounds inclusive) and the next
    frontier is the column support of the selected edges. Seeds absent
    from the graph are silently ignored; hops = 0 gives an empty array.
    """
    if hops < 0:
        raise UsageError("hops must be >= 0")
    if min_degree is not None and max_degree is not None and min_degree > max_degree:
        raise UsageError("min degree exceeds max degree")
    view = _view(g)
    spec = _as_spec(seeds)
    frontier = view.matching_rows(spec)
    result = AssocArray.empty()
    lo = 0 if min_degree is None else min_degree
    hi = math.inf if max_degree is None else max_degree
    for _ in range(hops):
        if not frontier:
            break
        if min_degree is not None or max_degree is not None:
            degs = view.degrees(frontier)
            frontier = tuple(k for k in frontier if lo <= degs.get(k, 0.0) <= hi)
            if not frontier:
                break
        edges = view.rows(frontier)
        if edges.nnz == 0:
            break
        result = ew_add(result, edges, op="max")
        frontier = edges.col_keys
    return result


def jaccard(g: GraphView) -> AssocArray:
    """Neighbor-overlap coefficient for every pair with a common neighbor.

    Emits one upper-triangle entry (min(i,j), max(i,j)) per unordered pair
    whose neighborhoods intersect, valued |common| / (deg_i + deg_j -
    |common|); the common-neighbor counts are the square of the adjacency
    under plus.times. Pairs with disjoint neighborhoods are absent.
    """
    view = _view(g)
    adj = view.full()
    validate_adjacency(adj)
    if isinstance(view, _StoreGraph):
        common = _store_square(view.ref)
    else:
        common = matmul(adj, adj, PLUS_TIMES)
    degs = reduce_cols(adj)
    out: dict[str, dict[str, Value]] = {}
    for i, j, c in common.to_triples():
        if i >= j:
            continue
        di = degs.get(i, "1", 0.0)
        dj = degs.get(j, "1", 0.0)
        out.setdefault(i, {})[j] = c / (di + dj - c)
    return AssocArray(out, "num")


def ktruss(g: GraphView, k: int) -> AssocArray:
    """Maximal subgraph in which every edge closes at least k-2 triangles.

    Deletes all under-supported edges in rounds (support = entry of the
    adjacency square at an existing edge) until a fixed point. The in-store
    variant applies each round's deletions to both the edge and transpose
    tables and returns the surviving adjacency.
    """
    if k < 2:
        raise UsageError("k must be >= 2")
    view = _view(g)
    adj = view.full()
    validate_adjacency(adj)
    need = k - 2
    if isinstance(view, _StoreGraph):
        ref = view.ref
        while True:
            if adj.nnz == 0:
                return adj
            support = _store_square(ref)
            doomed = [
                (i, j) for i, j, _v in adj.to_triples() if support.get(i, j, 0.0) < need
            ]
            if not doomed:
                return adj
            ref.edge.delete_entries(doomed)
            ref.edge_t.delete_entries([(j, i) for i, j in doomed])
            # keep the degree table in step with the deletions
            removed = Counter(i for i, _j in doomed)
            ref.degree_table.put_batch(
                [(r, "Degree", str(-n)) for r, n in removed.items()]
            )
            adj = query(ref, ALL, ALL).logical()
    while adj.nnz:
        support = matmul(adj, adj, PLUS_TIMES)
        doomed = {
            (i, j) for i, j, _v in adj.to_triples() if support.get(i, j, 0.0) < need
        }
        if not doomed:
            break
        adj = _drop_entries(adj, doomed)
    return adj


def _drop_entries(adj: AssocArray, doomed: set[tuple[str, str]]) -> AssocArray:
    out: dict[str, dict[str, Value]] = {}
    for r, row in adj._rows.items():
        kept = {c: v for c, v in row.items() if (r, c) not in doomed}
        if kept:
            out[r] = kept
    return AssocArray(out, "num")


_square_counter = 0


def _store_square(ref: TableRef) -> AssocArray:
    """Adjacency square via an in-store multiply into a scratch table.

    The edge table is its own transpose for a validated symmetric graph,
    so A-transpose times A equals A squared.
    """
    global _square_counter
    store = ref.store
    _square_counter += 1
    name = f"{ref.base}__square_{_square_counter}"
    while store.has_table(name):
        _square_counter += 1
        name = f"{ref.base}__square_{_square_counter}"
    store.create_table(name, "sum")
    try:
        tablemult(store, ref.base, ref.base, name, PLUS_TIMES)
        return table_to_assoc(store.table(name))
    finally:
        store.drop_table(name)
