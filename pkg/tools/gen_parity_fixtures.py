#!/usr/bin/env python3
"""Regenerate the client binding's parity fixtures.

Builds randomized inputs for every operation the binding exposes, computes
the engine's outputs, and freezes both into frontend/fixtures/parity.json.
The binding test suite replays the inputs over HTTP and requires identical
outputs, so this file is the bridge between the two packages. Run from the
repository root:

    python3 tools/gen_parity_fixtures.py
"""

from __future__ import annotations

import io
import json
import random
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from d4m.assoc import AssocArray, ew_add, ew_mult, from_triples  # noqa: E402
from d4m.cli import main as cli_main  # noqa: E402
from d4m.graphs import bfs, jaccard, ktruss  # noqa: E402
from d4m.kernels import PLUS_TIMES, matmul  # noqa: E402
from d4m.kvstore import Store  # noqa: E402
from d4m.schema import bind, degree, ingest_assoc, query  # noqa: E402

N_CASES = 20


def array_json(a: AssocArray) -> dict:
    rows, cols, values = [], [], []
    for r, c, v in a.to_triples():
        rows.append(r)
        cols.append(c)
        values.append(v)
    return {"kind": a.kind, "rows": rows, "cols": cols, "values": values}


def rand_array(rng: random.Random, n=8, density=0.35, str_values=False) -> AssocArray:
    rows, cols, vals = [], [], []
    for i in range(n):
        for j in range(n):
            if rng.random() < density:
                rows.append(f"r{i:02d}")
                cols.append(f"c{j:02d}")
                if str_values:
                    vals.append(rng.choice(["red", "green", "blue", "cyan"]))
                else:
                    vals.append(float(rng.randint(1, 9)))
    return from_triples(rows, cols, vals)


def rand_graph(rng: random.Random, n=12, p=0.3) -> AssocArray:
    rows, cols = [], []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                rows += [f"n{i:02d}", f"n{j:02d}"]
                cols += [f"n{j:02d}", f"n{i:02d}"]
    return from_triples(rows, cols, [1.0] * len(rows))


def main() -> None:
    rng = random.Random(424242)
    cases: dict[str, list] = {}

    ft = []
    for i in range(N_CASES):
        n = rng.randint(3, 14)
        rows = [f"r{rng.randint(0, 5)}" for _ in range(n)]
        cols = [f"c{rng.randint(0, 5)}" for _ in range(n)]
        if i % 4 == 3:
            values = [rng.choice(["x", "y", "z"]) for _ in range(n)]
            collision = rng.choice([None, "min", "max", "last"])
        else:
            values = [float(rng.randint(-3, 9)) for _ in range(n)]
            collision = rng.choice([None, "sum", "min", "max", "last"])
        expected = from_triples(rows, cols, values, collision)
        ft.append(
            {
                "input": {"rows": rows, "cols": cols, "values": values, "collision": collision},
                "expected": array_json(expected),
            }
        )
    cases["from_triples"] = ft

    tt = []
    for _ in range(N_CASES):
        a = rand_array(rng, rng.randint(3, 9), 0.4, str_values=rng.random() < 0.25)
        tt.append(
            {"input": array_json(a), "expected": [[r, c, v] for r, c, v in a.to_triples()]}
        )
    cases["to_triples"] = tt

    sr = []
    for i in range(N_CASES):
        a = rand_array(rng, 8, 0.4)
        row_spec = rng.choice([":", "r01,r04,", "r02,:,r06,", "r00,"])
        col_spec = rng.choice([":", "c03,", "c01,:,c05,"])
        sr.append(
            {
                "input": {"array": array_json(a), "row_spec": row_spec, "col_spec": col_spec},
                "expected": array_json(a.subref(row_spec, col_spec)),
            }
        )
    cases["subref"] = sr

    for name, fn in (("transpose", lambda x: x.transpose()), ("logical", lambda x: x.logical())):
        out = []
        for _ in range(N_CASES):
            a = rand_array(rng, rng.randint(3, 9), 0.4, str_values=rng.random() < 0.25)
            out.append({"input": {"array": array_json(a)}, "expected": array_json(fn(a))})
        cases[name] = out

    for name, fn in (("ew_add", ew_add), ("ew_mult", ew_mult)):
        out = []
        for i in range(N_CASES):
            if i % 4 == 3:
                a = rand_array(rng, 6, 0.5, str_values=True)
                b = rand_array(rng, 6, 0.5, str_values=True)
                op = rng.choice(["min", "max", "last"])
            else:
                a = rand_array(rng, 6, 0.5)
                b = rand_array(rng, 6, 0.5)
                op = rng.choice([None, None, "min", "max"])
            out.append(
                {
                    "input": {"a": array_json(a), "b": array_json(b), "op": op},
                    "expected": array_json(fn(a, b, op)),
                }
            )
        cases[name] = out

    mm = []
    for _ in range(N_CASES):
        a = rand_array(rng, 8, 0.35)
        b = rand_array(rng, 8, 0.35).transpose()
        mm.append(
            {
                "input": {"a": array_json(a), "b": array_json(b.transpose()), "semiring": "plus.times"},
                "expected": array_json(matmul(a, b.transpose(), PLUS_TIMES)),
            }
        )
    cases["matmul"] = mm

    bf = []
    for _ in range(N_CASES):
        g = rand_graph(rng, rng.randint(6, 16), 0.25)
        if g.nnz == 0:
            g = rand_graph(rng, 8, 0.6)
        seeds = ",".join(rng.sample(g.row_keys, min(2, len(g.row_keys)))) + ","
        hops = rng.randint(0, 3)
        bounds = rng.choice([(None, None), (None, None), (2, None), (None, 4)])
        bf.append(
            {
                "input": {
                    "adjacency": array_json(g),
                    "seeds": seeds,
                    "hops": hops,
                    "min_degree": bounds[0],
                    "max_degree": bounds[1],
                },
                "expected": array_json(bfs(g, seeds, hops, bounds[0], bounds[1])),
            }
        )
    cases["bfs"] = bf

    jc = []
    for _ in range(N_CASES):
        g = rand_graph(rng, rng.randint(5, 14), 0.35)
        jc.append({"input": {"adjacency": array_json(g)}, "expected": array_json(jaccard(g))})
    cases["jaccard"] = jc

    kt = []
    for _ in range(N_CASES):
        g = rand_graph(rng, rng.randint(6, 14), 0.4)
        k = rng.choice([3, 4])
        kt.append(
            {"input": {"adjacency": array_json(g), "k": k}, "expected": array_json(ktruss(g, k))}
        )
    cases["ktruss"] = kt

    st = []
    for _ in range(6):
        a = rand_array(rng, 7, 0.4, str_values=False)
        store = Store()
        ref = bind(store, "E")
        ingest_assoc(ref, a)
        queries = []
        for row_spec, col_spec in ((":", ":"), (f"{a.row_keys[0]},", ":"), (":", f"{a.col_keys[-1]},")):
            queries.append(
                {
                    "row_spec": row_spec,
                    "col_spec": col_spec,
                    "expected": array_json(query(ref, row_spec, col_spec)),
                }
            )
        snap_dir = Path("/tmp") / f"d4m_fixture_{rng.randint(0, 10**9)}"
        store.save(str(snap_dir))
        snapshot = {p.name: p.read_text() for p in sorted(snap_dir.iterdir())}
        for p in snap_dir.iterdir():
            p.unlink()
        snap_dir.rmdir()
        st.append(
            {
                "ingest": array_json(a),
                "queries": queries,
                "degree": array_json(degree(ref)),
                "snapshot": snapshot,
            }
        )
    cases["store"] = st

    # bundled 2x2 multiply: the expected output is literally what the CLI's
    # in-store multiply prints for these operands
    a2 = from_triples(["k1", "k1", "k2"], ["a", "b", "a"], [2.0, 1.0, 3.0])
    b2 = from_triples(["k1", "k2"], ["x", "y"], [5.0, 7.0])
    import tempfile

    with tempfile.TemporaryDirectory() as td:
        store_dir = str(Path(td) / "store")
        for name, arr in (("A", a2), ("B", b2)):
            tsv = Path(td) / f"{name.lower()}.tsv"
            tsv.write_text(
                "".join(f"{r}\t{c}\t{int(v)}\n" for r, c, v in arr.to_triples())
            )
            assert cli_main(["ingest", "--store", store_dir, "--table", name, "--input", str(tsv)], out=io.StringIO()) == 0
        assert cli_main(
            ["tablemult", "--store", store_dir, "--table-a", "A", "--table-b", "B", "--out-table", "C"],
            out=io.StringIO(),
        ) == 0
        c_tsv = (Path(store_dir) / "C.tsv").read_text()
    cases["matmul_2x2_fixture"] = {
        "a": array_json(a2),
        "b": array_json(b2),
        "cli_tablemult_tsv": c_tsv,
        "expected": array_json(matmul(a2.transpose(), b2, PLUS_TIMES)),
    }

    tri = from_triples(
        ["a", "a", "b", "b", "c", "c"], ["b", "c", "a", "c", "a", "b"], [1.0] * 6
    )
    cases["triangle_fixture"] = {
        "adjacency": array_json(tri),
        "jaccard": array_json(jaccard(tri)),
    }

    out_path = ROOT / "frontend" / "fixtures" / "parity.json"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(json.dumps({"seed": 424242, "cases": cases}, indent=1) + "\n")
    total = sum(len(v) for v in cases.values() if isinstance(v, list))
    print(f"wrote {out_path} ({total} cases)")


if __name__ == "__main__":
    main()
