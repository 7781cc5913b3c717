"""Client-vs-in-store multiply scaling harness.

For each scale the harness generates two weighted random graphs, binds
them as tables, and runs the same product twice: once streamed through the
store (``tablemult``) and once the classic client way (read both operands
into arrays, multiply in memory, write the result back). Both run under
one logical memory cap; a mode that cannot fit records status "oom" and
the suite continues. Partial products per second is the throughput metric.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .assoc import AssocArray, render_num
from .errors import MemoryCapError
from .gen import weighted_entries
from .kernels import PLUS_TIMES, Semiring, matmul
from .kvstore import Store, Table, entry_cost
from .schema import _SEMIRING_COMBINER, TableMultStats, table_to_assoc, tablemult

CSV_HEADER = "scale,nnzA,nnzB,nnzC,mode,seconds,pps,peak_bytes,status"


@dataclass
class BenchRecord:
    scale: int
    nnz_a: int
    nnz_b: int
    nnz_c: int
    mode: str  # "client" | "server"
    seconds: float
    pps: float
    peak_bytes: int
    status: str  # "ok" | "oom"

    def csv_row(self) -> str:
        return (
            f"{self.scale},{self.nnz_a},{self.nnz_b},{self.nnz_c},{self.mode},"
            f"{self.seconds:.6f},{self.pps:.1f},{self.peak_bytes},{self.status}"
        )


def _table_bytes(table: Table) -> int:
    return sum(entry_cost(r, c, v) for r, c, v in table.scan())


def _array_bytes(a: AssocArray) -> int:
    return sum(entry_cost(r, c, render_num(v)) for r, c, v in a.to_triples())


def count_partial_products(a: Table, b: Table) -> int:
    """Outer-product size summed over shared row keys (mode-independent)."""
    a_rows: dict[str, int] = {}
    for r, _c, _v in a.scan():
        a_rows[r] = a_rows.get(r, 0) + 1
    total = 0
    row = None
    width = 0
    for r, _c, _v in b.scan():
        if r != row:
            if row is not None and row in a_rows:
                total += a_rows[row] * width
            row = r
            width = 0
        width += 1
    if row is not None and row in a_rows:
        total += a_rows[row] * width
    return total


def client_tablemult(
    store: Store,
    table_a: str,
    table_b: str,
    table_c: str,
    sr: Semiring = PLUS_TIMES,
    memory_cap: int | None = None,
) -> tuple[TableMultStats, str]:
    """The in-memory alternative, under the same accounting rules.

    Reads both operands fully into arrays, multiplies, and writes the
    result back; the accounted footprint is operands plus result. Returns
    (stats, status) where status is "oom" when the cap was exceeded (the
    result table is then left unwritten).
    """
    a = store.table(table_a)
    b = store.table(table_b)
    c = store.table(table_c)
    stats = TableMultStats()
    stats.partial_products = count_partial_products(a, b)
    held = _table_bytes(a) + _table_bytes(b)
    stats.peak_bytes = held
    if memory_cap is not None and held > memory_cap:
        return stats, "oom"
    arr_a = table_to_assoc(a)
    arr_b = table_to_assoc(b)
    result = matmul(arr_a.transpose(), arr_b, sr)
    held += _array_bytes(result)
    stats.peak_bytes = held
    if memory_cap is not None and held > memory_cap:
        return stats, "oom"
    batch = [(r, cc, render_num(v)) for r, cc, v in result.to_triples()]
    c._put_batch_unchecked(batch)
    c.flush()
    stats.entries_emitted = len(batch)
    return stats, "ok"


def run_pair(
    store: Store,
    table_a: str,
    table_b: str,
    scale: int,
    sr: Semiring = PLUS_TIMES,
    memory_cap: int | None = None,
) -> list[BenchRecord]:
    """Run both modes against fresh output tables and record one row each."""
    nnz_a = sum(1 for _ in store.table(table_a).scan())
    nnz_b = sum(1 for _ in store.table(table_b).scan())
    combiner = _SEMIRING_COMBINER[sr.name]
    records = []
    for mode in ("client", "server"):
        out_name = f"bench_out_{mode}_{scale}"
        if store.has_table(out_name):
            store.drop_table(out_name)
        out = store.create_table(out_name, combiner)
        t0 = time.perf_counter()
        status = "ok"
        if mode == "client":
            stats, status = client_tablemult(store, table_a, table_b, out_name, sr, memory_cap)
        else:
            stats = TableMultStats()
            try:
                stats = tablemult(store, table_a, table_b, out_name, sr, memory_cap)
            except MemoryCapError:
                status = "oom"
        seconds = time.perf_counter() - t0
        nnz_c = sum(1 for _ in out.scan()) if status == "ok" else 0
        pps = stats.partial_products / seconds if seconds > 0 and status == "ok" else 0.0
        records.append(
            BenchRecord(scale, nnz_a, nnz_b, nnz_c, mode, seconds, pps, stats.peak_bytes, status)
        )
    return records


def run_bench(
    scales: list[int],
    seed: int = 1,
    memory_cap: int | None = None,
    avg_degree: float = 8.0,
) -> list[BenchRecord]:
    records = []
    for scale in scales:
        store = Store()
        a = store.create_table("bench_A")
        b = store.create_table("bench_B")
        a._put_batch_unchecked(weighted_entries("erdos", scale, avg_degree, seed + scale))
        b._put_batch_unchecked(weighted_entries("erdos", scale, avg_degree, seed + scale + 7919))
        a.flush()
        b.flush()
        records.extend(run_pair(store, "bench_A", "bench_B", scale, PLUS_TIMES, memory_cap))
    return records


def write_csv(path: str, records: list[BenchRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for rec in records:
            fh.write(rec.csv_row() + "\n")


GNUPLOT_TEMPLATE = """\
set datafile separator ","
set key autotitle columnhead
set logscale xy
set xlabel "scale (nodes)"
set ylabel "partial products / s"
plot "{csv}" using 1:7 every 2::0 with linespoints title "client", \\
     "{csv}" using 1:7 every 2::1 with linespoints title "server"
"""


def write_gnuplot(path: str, csv_path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(GNUPLOT_TEMPLATE.format(csv=csv_path))
