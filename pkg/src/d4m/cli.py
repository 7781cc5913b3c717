"""Command-line front end.

Thin argument-parsing layer over the engine: every subcommand opens the
store directory, calls the corresponding module, prints TSV (or the bench
CSV) and exits. No engine logic lives here.

Exit codes: 0 success, 1 I/O failure, 2 usage or parse error, 3 memory-cap
single-row failure, 4 input validation failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from . import bench as bench_mod
from .assoc import ALL
from .errors import (
    AdjacencyError,
    EngineError,
    MemoryCapError,
    SnapshotIOError,
    TsvFormatError,
    UnknownTableError,
)
from .gen import GRAPH_KINDS, graph_entries
from .graphs import bfs, jaccard, ktruss
from .kernels import semiring
from .kvstore import Store
from .schema import (
    _SEMIRING_COMBINER,
    DEGREE_SUFFIX,
    TRANSPOSE_SUFFIX,
    bind,
    encode_exploded,
    ingest_entries,
    query,
    tablemult,
)
from .tripleio import read_entries, write_array

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_MEMORY = 3
EXIT_VALIDATION = 4


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--store",
        default=os.environ.get("D4M_STORE"),
        help="store directory (default: $D4M_STORE)",
    )
    common.add_argument("--threads", type=int, default=1, help="worker parallelism cap")
    common.add_argument("--memory-cap", type=int, default=None, help="logical byte budget")

    p = argparse.ArgumentParser(prog="d4m", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("ingest", parents=[common], help="load a TSV triple file into a table group")
    sp.add_argument("--table", required=True)
    sp.add_argument("--input", required=True)
    sp.add_argument("--exploded", action="store_true", help="treat records as (row, column, value)")
    sp.add_argument("--delim", default="|", help="exploded-encoding delimiter")

    sp = sub.add_parser("scan", parents=[common], help="print matching triples as TSV")
    sp.add_argument("--table", required=True)
    sp.add_argument("--rows", default=":")
    sp.add_argument("--cols", default=":")
    sp.add_argument("--stats", action="store_true", help="print scan counters to stderr")

    for name in ("bfs", "jaccard", "ktruss"):
        sp = sub.add_parser(name, parents=[common], help=f"run {name} on a bound table")
        sp.add_argument("--table", required=True)
        sp.add_argument("--mode", choices=("memory", "store"), default="memory")
        if name == "bfs":
            sp.add_argument("--seeds", required=True)
            sp.add_argument("--hops", type=int, required=True)
            sp.add_argument("--min-degree", type=int, default=None)
            sp.add_argument("--max-degree", type=int, default=None)
        if name == "ktruss":
            sp.add_argument("--k", type=int, required=True)

    sp = sub.add_parser("tablemult", parents=[common], help="in-store C += A^T * B")
    sp.add_argument("--table-a", required=True)
    sp.add_argument("--table-b", required=True)
    sp.add_argument("--out-table", required=True)
    sp.add_argument("--semiring", default="plus.times")

    sp = sub.add_parser("gen", parents=[common], help="write a deterministic random graph")
    sp.add_argument("--kind", choices=GRAPH_KINDS, default="erdos")
    sp.add_argument("--nodes", type=int, required=True)
    sp.add_argument("--degree", type=float, default=8.0)
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("bench", parents=[common], help="client vs in-store multiply scaling")
    sp.add_argument("--scales", required=True, help="comma-separated node counts")
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--degree", type=float, default=8.0)
    sp.add_argument("--out", required=True, help="CSV output path")
    sp.add_argument("--gnuplot", action="store_true", help="also write <out>.gp")

    sp = sub.add_parser("serve", parents=[common], help="run the HTTP service")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8000)

    return p


def _require_store(args) -> str:
    if not args.store:
        raise EngineError("no store directory: pass --store or set D4M_STORE")
    return args.store


def _load_store(args) -> Store:
    return Store.load(_require_store(args))


def _cmd_ingest(args, out) -> int:
    store = _load_store(args)
    ref = bind(store, args.table)
    entries = read_entries(args.input)
    if args.exploded:
        encoded = []
        for i, (r, c, v) in enumerate(entries, 1):
            try:
                encoded.append(encode_exploded(r, c, v, args.delim))
            except EngineError as exc:
                raise TsvFormatError(f"line {i}: {exc}", i) from exc
        entries = encoded
    t0 = time.perf_counter()
    n = ingest_entries(ref, entries, prevalidated=True)
    seconds = time.perf_counter() - t0
    store.save(args.store)
    rate = n / seconds if seconds > 0 else 0.0
    print(f"ingested {n} entries in {seconds:.3f} s ({rate:.0f}/s)", file=out)
    return EXIT_OK


def _attached(store: Store, base: str):
    missing = [
        name
        for name in (base, base + TRANSPOSE_SUFFIX, base + DEGREE_SUFFIX)
        if not store.has_table(name)
    ]
    if missing:
        raise UnknownTableError(
            f"{base!r} is not a bound table group here (missing: {', '.join(missing)})"
        )
    return bind(store, base)


def _cmd_scan(args, out) -> int:
    store = _load_store(args)
    ref = _attached(store, args.table)
    result = query(ref, args.rows, args.cols)
    write_array(out, result)
    if args.stats:
        for table in (ref.edge, ref.edge_t, ref.degree_table):
            print(f"stats {table.name} scans={table.stats['scans']}", file=sys.stderr)
    return EXIT_OK


def _cmd_algo(args, out) -> int:
    store = _load_store(args)
    ref = _attached(store, args.table)
    g = query(ref, ALL, ALL) if args.mode == "memory" else ref
    if args.command == "bfs":
        result = bfs(g, args.seeds, args.hops, args.min_degree, args.max_degree)
    elif args.command == "jaccard":
        result = jaccard(g)
    else:
        result = ktruss(g, args.k)
        if args.mode == "store":
            store.save(args.store)
    write_array(out, result)
    return EXIT_OK


def _cmd_tablemult(args, out) -> int:
    store = _load_store(args)
    sr = semiring(args.semiring)
    needed = _SEMIRING_COMBINER.get(sr.name)
    if not store.has_table(args.out_table) and needed:
        store.create_table(args.out_table, needed)
    t0 = time.perf_counter()
    stats = tablemult(store, args.table_a, args.table_b, args.out_table, sr, args.memory_cap)
    seconds = time.perf_counter() - t0
    store.save(args.store)
    rate = stats.partial_products / seconds if seconds > 0 else 0.0
    print(
        f"tablemult emitted {stats.entries_emitted} entries from "
        f"{stats.partial_products} partial products in {seconds:.3f} s "
        f"({rate:.0f} pp/s); peak {stats.peak_bytes} bytes",
        file=out,
    )
    return EXIT_OK


def _cmd_gen(args, out) -> int:
    entries = graph_entries(args.kind, args.nodes, args.degree, args.seed)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.writelines(f"{r}\t{c}\t{v}\n" for r, c, v in entries)
    print(f"generated {len(entries) // 2} edges ({len(entries)} records) for {args.nodes} nodes", file=out)
    return EXIT_OK


def _cmd_bench(args, out) -> int:
    scales = []
    for part in args.scales.split(","):
        part = part.strip()
        if part:
            try:
                scales.append(int(part))
            except ValueError:
                raise EngineError(f"bad scale {part!r}") from None
    if not scales:
        raise EngineError("no scales given")
    records = bench_mod.run_bench(scales, args.seed, args.memory_cap, args.degree)
    bench_mod.write_csv(args.out, records)
    if args.gnuplot:
        bench_mod.write_gnuplot(args.out + ".gp", args.out)
    print(f"wrote {args.out} ({len(records)} rows)", file=out)
    return EXIT_OK


def _cmd_serve(args, out) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.store)
    print(f"serving on http://{args.host}:{args.port}", file=out)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


_DISPATCH = {
    "ingest": _cmd_ingest,
    "scan": _cmd_scan,
    "bfs": _cmd_algo,
    "jaccard": _cmd_algo,
    "ktruss": _cmd_algo,
    "tablemult": _cmd_tablemult,
    "gen": _cmd_gen,
    "bench": _cmd_bench,
    "serve": _cmd_serve,
}


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None and args.threads < 1:
        print("d4m: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _DISPATCH[args.command](args, out)
    except MemoryCapError as exc:
        print(f"d4m: {exc}", file=sys.stderr)
        return EXIT_MEMORY
    except AdjacencyError as exc:
        print(f"d4m: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SnapshotIOError as exc:
        print(f"d4m: {exc}", file=sys.stderr)
        return EXIT_IO
    except EngineError as exc:
        print(f"d4m: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"d4m: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
