import random

import pytest

from d4m.assoc import ALL, AssocArray, KeyList, from_triples
from d4m.errors import (
    CombinerMismatchError,
    CombinerValueError,
    RowTooLargeError,
    UnknownTableError,
    UsageError,
)
from d4m.kernels import MIN_PLUS, PLUS_TIMES, matmul
from d4m.kvstore import Store, entry_cost
from d4m.schema import (
    ExplodedCell,
    bind,
    decode_exploded,
    degree,
    encode_exploded,
    ingest_assoc,
    ingest_entries,
    query,
    table_to_assoc,
    tablemult,
)

from conftest import rand_assoc


class TestBind:
    def test_fresh_bind_creates_three_empty_tables(self):
        store = Store()
        ref = bind(store, "E")
        assert store.table_names() == ["E", "E_Deg", "E_T"]
        assert ref.edge.combiner == "none"
        assert ref.edge_t.combiner == "none"
        assert ref.degree_table.combiner == "sum"
        assert list(ref.edge.scan()) == []

    def test_bind_idempotent(self):
        store = Store()
        r1 = bind(store, "E")
        r2 = bind(store, "E")
        assert r1.edge is r2.edge

    def test_bind_attaches_to_existing_data(self):
        store = Store()
        ref = bind(store, "E")
        ingest_assoc(ref, from_triples(["a"], ["x"], [1]))
        again = bind(store, "E")
        assert query(again, ALL, ALL).to_triples() == [("a", "x", 1.0)]

    def test_bind_combiner_collision(self):
        store = Store()
        store.create_table("E_Deg", "none")
        with pytest.raises(CombinerMismatchError):
            bind(store, "E")


class TestIngestAndQuery:
    def test_ingest_empty_is_noop(self):
        store = Store()
        ref = bind(store, "E")
        assert ingest_assoc(ref, AssocArray.empty()) == 0
        assert list(ref.edge.scan()) == []
        assert list(ref.degree_table.scan()) == []

    def test_degree_counts_row_entries(self):
        store = Store()
        ref = bind(store, "E")
        ingest_assoc(ref, from_triples(["a", "a"], ["x", "y"], [1, 2]))
        assert list(ref.degree_table.scan()) == [("a", "Degree", "2")]

    def test_round_trip(self, rng):
        store = Store()
        ref = bind(store, "E")
        a = rand_assoc(rng, 10, 10, 0.3)
        ingest_assoc(ref, a)
        assert query(ref, ALL, ALL) == a

    def test_str_round_trip_with_non_numeric_values(self):
        store = Store()
        ref = bind(store, "E")
        a = from_triples(["a", "b"], ["x", "y"], ["blue", "red"])
        ingest_assoc(ref, a)
        got = query(ref, ALL, ALL)
        assert got.kind == "str"
        assert got == a

    def test_transpose_pair_consistency(self, rng):
        store = Store()
        ref = bind(store, "E")
        for _ in range(3):
            ingest_assoc(ref, rand_assoc(rng, 8, 8, 0.3))
            edge = [(r, c) for r, c, _ in ref.edge.scan()]
            mirror = sorted((c, r) for r, c, _ in ref.edge_t.scan())
            assert sorted(edge) == mirror

    def test_degree_consistency_across_repeated_ingests(self, rng):
        store = Store()
        ref = bind(store, "E")
        for _ in range(3):
            ingest_assoc(ref, rand_assoc(rng, 8, 8, 0.3))
            counts = {}
            for r, _c, _v in ref.edge.scan():
                counts[r] = counts.get(r, 0) + 1
            stored = {r: int(v) for r, _c, v in ref.degree_table.scan()}
            assert stored == counts

    def test_row_query_matches_subref(self, rng):
        store = Store()
        ref = bind(store, "E")
        a = rand_assoc(rng, 10, 10, 0.3)
        ingest_assoc(ref, a)
        spec = KeyList(("r0001", "r0004", "r0009"))
        assert query(ref, spec, ALL) == a.subref(spec, ALL)

    def test_column_query_uses_transpose_table_only(self):
        store = Store()
        ref = bind(store, "E")
        ingest_assoc(ref, from_triples(["a", "b"], ["x", "y"], [1, 2]))
        edge_scans = ref.edge.stats["scans"]
        t_scans = ref.edge_t.stats["scans"]
        got = query(ref, ALL, KeyList(("x",)))
        assert got.to_triples() == [("a", "x", 1.0)]
        assert ref.edge.stats["scans"] == edge_scans
        assert ref.edge_t.stats["scans"] == t_scans + 1

    def test_row_and_col_query_uses_edge_table(self):
        store = Store()
        ref = bind(store, "E")
        ingest_assoc(ref, from_triples(["a", "b"], ["x", "y"], [1, 2]))
        t_scans = ref.edge_t.stats["scans"]
        got = query(ref, KeyList(("a",)), KeyList(("x",)))
        assert got.to_triples() == [("a", "x", 1.0)]
        assert ref.edge_t.stats["scans"] == t_scans

    def test_degree_lookup(self):
        store = Store()
        ref = bind(store, "E")
        ingest_assoc(ref, from_triples(["a", "a", "b"], ["x", "y", "x"], [1, 2, 5]))
        assert degree(ref).to_triples() == [("a", "Degree", 2.0), ("b", "Degree", 1.0)]
        assert degree(ref, KeyList(("zzz",))).nnz == 0

    def test_degree_recount_oracle(self, rng):
        store = Store()
        ref = bind(store, "E")
        a = rand_assoc(rng, 12, 12, 0.25)
        ingest_assoc(ref, a)
        whole = query(ref, ALL, ALL)
        for k in whole.row_keys:
            assert degree(ref, KeyList((k,))).get(k, "Degree") == float(
                whole.subref(KeyList((k,)), ALL).nnz
            )

    def test_ingest_entries_dedups_last_wins(self):
        store = Store()
        ref = bind(store, "E")
        n = ingest_entries(ref, [("a", "x", "1"), ("a", "x", "9"), ("b", "y", "2")])
        assert n == 2
        assert list(ref.edge.scan()) == [("a", "x", "9"), ("b", "y", "2")]
        assert list(ref.degree_table.scan()) == [("a", "Degree", "1"), ("b", "Degree", "1")]

    def test_num_kind_inference_requires_all_numeric(self):
        store = Store()
        ref = bind(store, "E")
        ingest_entries(ref, [("a", "x", "1"), ("b", "y", "word")])
        got = query(ref, ALL, ALL)
        assert got.kind == "str"
        assert got.get("a", "x") == "1"


class TestExploded:
    def test_encode(self):
        assert encode_exploded("r1", "color", "blue") == ("r1", "color|blue", "1")

    def test_decode_round_trip(self):
        entry = encode_exploded("r1", "color", "blue")
        assert decode_exploded(entry) == ExplodedCell("r1", "color", "blue", "|")

    def test_value_containing_delimiter_survives(self):
        entry = encode_exploded("r1", "note", "a|b|c")
        cell = decode_exploded(entry)
        assert cell.col_name == "note"
        assert cell.col_value == "a|b|c"

    def test_delimiter_in_name_rejected(self):
        with pytest.raises(UsageError):
            encode_exploded("r1", "col|or", "blue")

    def test_custom_delimiter(self):
        entry = encode_exploded("r1", "color", "blue", delim=":")
        assert entry[1] == "color:blue"
        assert decode_exploded(entry, delim=":").col_value == "blue"

    def test_random_round_trips(self, rng):
        for _ in range(50):
            name = "".join(rng.choice("abcxyz") for _ in range(rng.randint(1, 5)))
            value = "".join(rng.choice("abc|xyz0") for _ in range(rng.randint(1, 6)))
            cell = decode_exploded(encode_exploded("row", name, value))
            assert (cell.col_name, cell.col_value) == (name, value)


def _load_table(store, name, a: AssocArray, combiner="none"):
    t = store.create_table(name, combiner)
    from d4m.schema import render_value

    t.put_batch([(r, c, render_value(v)) for r, c, v in a.to_triples()])
    t.flush()
    return t


class TestTableMult:
    def test_single_outer_product(self):
        store = Store()
        _load_table(store, "A", from_triples(["k"], ["a"], [2]))
        _load_table(store, "B", from_triples(["k"], ["x"], [3]))
        store.create_table("C", "sum")
        tablemult(store, "A", "B", "C")
        assert list(store.table("C").scan()) == [("a", "x", "6")]

    def test_disjoint_rows_leave_c_unchanged(self):
        store = Store()
        _load_table(store, "A", from_triples(["k1"], ["a"], [2]))
        _load_table(store, "B", from_triples(["k2"], ["x"], [3]))
        c = store.create_table("C", "sum")
        c.put("pre", "existing", "9")
        stats = tablemult(store, "A", "B", "C")
        assert stats.partial_products == 0
        assert list(c.scan()) == [("existing", "pre", "9")][::-1] or list(c.scan()) == [("pre", "existing", "9")]

    def test_matches_client_matmul(self, rng):
        for _ in range(10):
            store = Store()
            a = rand_assoc(rng, 12, 12, 0.25)
            b = rand_assoc(rng, 12, 12, 0.25)
            _load_table(store, "A", a)
            _load_table(store, "B", b)
            store.create_table("C", "sum")
            tablemult(store, "A", "B", "C")
            want = matmul(a.transpose(), b, PLUS_TIMES)
            assert table_to_assoc(store.table("C")) == want

    def test_accumulates_into_existing_c(self, rng):
        store = Store()
        a = rand_assoc(rng, 6, 6, 0.4)
        b = rand_assoc(rng, 6, 6, 0.4)
        _load_table(store, "A", a)
        _load_table(store, "B", b)
        store.create_table("C", "sum")
        tablemult(store, "A", "B", "C")
        tablemult(store, "A", "B", "C")
        once = matmul(a.transpose(), b, PLUS_TIMES)
        twice = {(r, c): 2 * v for r, c, v in once.to_triples()}
        got = {(r, c): v for r, c, v in table_to_assoc(store.table("C")).to_triples()}
        assert got == twice

    def test_min_plus_semiring(self, rng):
        store = Store()
        a = rand_assoc(rng, 8, 8, 0.35)
        b = rand_assoc(rng, 8, 8, 0.35)
        _load_table(store, "A", a)
        _load_table(store, "B", b)
        store.create_table("C", "min")
        tablemult(store, "A", "B", "C", MIN_PLUS)
        want = matmul(a.transpose(), b, MIN_PLUS)
        assert table_to_assoc(store.table("C")) == want

    def test_combiner_mismatch(self):
        store = Store()
        _load_table(store, "A", from_triples(["k"], ["a"], [2]))
        _load_table(store, "B", from_triples(["k"], ["x"], [3]))
        store.create_table("C", "max")
        with pytest.raises(CombinerMismatchError):
            tablemult(store, "A", "B", "C")

    def test_missing_table(self):
        store = Store()
        with pytest.raises(UnknownTableError):
            tablemult(store, "A", "B", "C")

    def test_non_numeric_operand(self):
        store = Store()
        ta = store.create_table("A")
        ta.put("k", "a", "word")
        tb = store.create_table("B")
        tb.put("k", "x", "3")
        store.create_table("C", "sum")
        with pytest.raises(CombinerValueError):
            tablemult(store, "A", "B", "C")

    def test_row_too_large_is_distinct_error(self):
        store = Store()
        wide = from_triples(["k"] * 30, [f"c{i:02d}" for i in range(30)], [1.0] * 30)
        _load_table(store, "A", wide)
        _load_table(store, "B", wide)
        store.create_table("C", "sum")
        with pytest.raises(RowTooLargeError):
            tablemult(store, "A", "B", "C", PLUS_TIMES, memory_cap=100)

    def test_streams_under_tight_cap(self, rng):
        store = Store()
        a = rand_assoc(rng, 10, 10, 0.4)
        b = rand_assoc(rng, 10, 10, 0.4)
        _load_table(store, "A", a)
        _load_table(store, "B", b)
        store.create_table("C", "sum")
        # cap: twice the largest row pair, far below the output size
        probe = tablemult(store, "A", "B", "C")
        store.drop_table("C")
        store.create_table("C", "sum")
        cap = 2 * probe.max_row_pair_bytes
        stats = tablemult(store, "A", "B", "C", PLUS_TIMES, memory_cap=cap)
        assert stats.peak_bytes <= cap
        assert table_to_assoc(store.table("C")) == matmul(a.transpose(), b, PLUS_TIMES)

    def test_peak_far_below_output_bytes(self, rng):
        store = Store()
        a = rand_assoc(rng, 30, 30, 0.3)
        b = rand_assoc(rng, 30, 30, 0.3)
        _load_table(store, "A", a)
        _load_table(store, "B", b)
        store.create_table("C", "sum")
        cap = 4096
        stats = tablemult(store, "A", "B", "C", PLUS_TIMES, memory_cap=cap)
        out_bytes = sum(entry_cost(r, c, v) for r, c, v in store.table("C").scan())
        assert stats.peak_bytes <= cap < out_bytes
