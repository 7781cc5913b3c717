"""Shared construction of benchmark operand tables for acceptance tests."""

from __future__ import annotations

from d4m.bench import run_pair
from d4m.gen import weighted_entries
from d4m.kernels import PLUS_TIMES
from d4m.kvstore import Store, entry_cost
from d4m.schema import tablemult


def _loaded_store(scale: int, seed: int) -> Store:
    store = Store()
    a = store.create_table("bench_A")
    b = store.create_table("bench_B")
    a.put_batch(weighted_entries("erdos", scale, 8.0, seed + scale))
    b.put_batch(weighted_entries("erdos", scale, 8.0, seed + scale + 7919))
    a.flush()
    b.flush()
    return store


def bench_window(scale: int, seed: int, memory_cap, probe: bool = False):
    """Run both multiply modes at one scale (or probe sizes when asked).

    With ``probe`` the return value is (uncapped server stats, output
    bytes), which callers use to pick a cap inside the contract window.
    """
    store = _loaded_store(scale, seed)
    if probe:
        store.create_table("probe_C", "sum")
        stats = tablemult(store, "bench_A", "bench_B", "probe_C", PLUS_TIMES)
        output_bytes = sum(
            entry_cost(r, c, v) for r, c, v in store.table("probe_C").scan()
        )
        return stats, output_bytes
    return run_pair(store, "bench_A", "bench_B", scale, PLUS_TIMES, memory_cap)
