import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from d4m.assoc import (
    ALL,
    AssocArray,
    KeyList,
    KeyRange,
    check_key,
    ew_add,
    ew_mult,
    from_triples,
    key_list,
    key_range,
    parse_key_spec,
    render_key_spec,
    render_num,
)
from d4m.errors import InvalidKeyError, SpecSyntaxError, ValueKindError

from conftest import rand_assoc
from oracles import filter_triples

keys_st = st.text(
    st.characters(blacklist_categories=("Cs",), blacklist_characters="\t\n\x00"),
    min_size=1,
    max_size=8,
)
int_vals_st = st.integers(min_value=-50, max_value=50).map(float)


class TestConstruction:
    def test_additive_collision(self):
        a = from_triples(["a", "a"], ["x", "x"], [1, 2], collision="sum")
        assert a.to_triples() == [("a", "x", 3.0)]

    def test_empty(self):
        a = from_triples([], [], [])
        assert a.nnz == 0
        assert a.dims == (0, 0)
        assert a.to_triples() == []

    def test_sorted_dimension_keys(self):
        a = from_triples(["b", "a"], ["y", "x"], [2, 1])
        assert a.row_keys == ("a", "b")
        assert a.col_keys == ("x", "y")
        assert a.to_triples() == [("a", "x", 1.0), ("b", "y", 2.0)]

    def test_default_collisions(self):
        assert from_triples(["a"] * 2, ["x"] * 2, [1, 2]).get("a", "x") == 3.0
        assert from_triples(["a"] * 2, ["x"] * 2, ["p", "q"]).get("a", "x") == "q"

    def test_min_max_last(self):
        assert from_triples(["a"] * 2, ["x"] * 2, [5, 2], collision="min").get("a", "x") == 2.0
        assert from_triples(["a"] * 2, ["x"] * 2, [5, 2], collision="max").get("a", "x") == 5.0
        assert from_triples(["a"] * 2, ["x"] * 2, [5, 2], collision="last").get("a", "x") == 2.0

    def test_zero_results_dropped(self):
        a = from_triples(["a", "a", "b"], ["x", "x", "y"], [2, -2, 1])
        assert a.to_triples() == [("b", "y", 1.0)]
        assert a.row_keys == ("b",)

    def test_errors(self):
        with pytest.raises(ValueKindError):
            from_triples(["a"], ["x", "y"], [1])
        with pytest.raises(ValueKindError):
            from_triples(["a", "b"], ["x", "y"], [1, "s"])
        with pytest.raises(ValueKindError):
            from_triples(["a"], ["x"], [float("nan")])
        with pytest.raises(InvalidKeyError):
            from_triples(["a\tb"], ["x"], [1])
        with pytest.raises(InvalidKeyError):
            from_triples([""], ["x"], [1])
        with pytest.raises(ValueKindError):
            from_triples(["a"], ["x"], ["s"], collision="sum")

    def test_str_value_byte_rules(self):
        with pytest.raises(InvalidKeyError):
            from_triples(["a"], ["x"], ["bad\tvalue"])

    def test_empty_string_is_zero(self):
        a = from_triples(["a"], ["x"], [""])
        assert a.nnz == 0


class TestKeySpec:
    def test_all(self):
        assert parse_key_spec(":") == ALL

    def test_list_with_semicolon_delim(self):
        assert parse_key_spec("a;b;") == KeyList(("a", "b"))

    def test_range(self):
        assert parse_key_spec("a,:,c,") == KeyRange("a", "c")

    def test_single_item(self):
        assert parse_key_spec("a,") == KeyList(("a",))

    def test_dedup_and_sort(self):
        assert parse_key_spec("b,a,b,") == KeyList(("a", "b"))

    def test_errors(self):
        with pytest.raises(SpecSyntaxError):
            parse_key_spec("")
        with pytest.raises(SpecSyntaxError):
            parse_key_spec("a,,b,")
        with pytest.raises(SpecSyntaxError):
            parse_key_spec("c,:,a,")
        with pytest.raises(SpecSyntaxError):
            parse_key_spec(",")

    @given(st.lists(keys_st.filter(lambda k: k != ":"), min_size=1, max_size=6))
    def test_render_parse_roundtrip_list(self, keys):
        spec = key_list(keys)
        assert parse_key_spec(render_key_spec(spec)) == spec

    @given(keys_st, keys_st)
    def test_render_parse_roundtrip_range(self, a, b):
        lo, hi = min(a, b), max(a, b)
        spec = key_range(lo, hi)
        assert parse_key_spec(render_key_spec(spec)) == spec

    def test_render_all(self):
        assert render_key_spec(ALL) == ":"


class TestSubref:
    def test_identity(self):
        a = from_triples(["a", "b"], ["x", "y"], [1, 2])
        assert a.subref(ALL, ALL) == a

    def test_single_row(self):
        a = from_triples(["a", "b"], ["x", "y"], [1, 2])
        assert a.subref(KeyList(("a",)), ALL).to_triples() == [("a", "x", 1.0)]

    def test_range_rows(self):
        a = from_triples(["a", "b", "c"], ["x", "y", "z"], [1, 2, 3])
        got = a.subref(KeyRange("a", "b"), ALL)
        assert got.to_triples() == [("a", "x", 1.0), ("b", "y", 2.0)]
        assert got.row_keys == ("a", "b")

    def test_spec_strings_accepted(self):
        a = from_triples(["a", "b"], ["x", "y"], [1, 2])
        assert a.subref("a,", ":").to_triples() == [("a", "x", 1.0)]

    def test_against_filter_oracle(self, rng):
        a = rand_assoc(rng, 12, 12, 0.3)
        triples = a.to_triples()
        cases = [
            (ALL, ALL, lambda r: True, lambda c: True),
            (KeyList(("r0001", "r0007")), ALL, lambda r: r in ("r0001", "r0007"), lambda c: True),
            (KeyRange("r0002", "r0008"), KeyList(("c0003",)),
             lambda r: "r0002" <= r <= "r0008", lambda c: c == "c0003"),
            (ALL, KeyRange("c0004", "c0009"), lambda r: True, lambda c: "c0004" <= c <= "c0009"),
        ]
        for row_spec, col_spec, rp, cp in cases:
            got = a.subref(row_spec, col_spec).to_triples()
            assert got == filter_triples(triples, rp, cp)

    def test_empty_result_ok(self):
        a = from_triples(["a"], ["x"], [1])
        got = a.subref(KeyList(("zzz",)), ALL)
        assert got.nnz == 0 and got.dims == (0, 0)


class TestTranspose:
    def test_involution(self, rng):
        a = rand_assoc(rng, 8, 8, 0.4)
        assert a.transpose().transpose() == a

    def test_empty(self):
        assert AssocArray.empty().transpose() == AssocArray.empty()

    def test_coordinate_swap(self):
        a = from_triples(["a", "a"], ["x", "y"], [1, 2])
        assert a.transpose().to_triples() == [("x", "a", 1.0), ("y", "a", 2.0)]


class TestElementWise:
    def test_add_shared(self):
        a = from_triples(["a"], ["x"], [1])
        b = from_triples(["a"], ["x"], [2])
        assert ew_add(a, b).to_triples() == [("a", "x", 3.0)]

    def test_add_disjoint_union(self):
        a = from_triples(["a"], ["x"], [1])
        b = from_triples(["b"], ["y"], [5])
        assert ew_add(a, b).to_triples() == [("a", "x", 1.0), ("b", "y", 5.0)]

    def test_add_annihilation(self):
        a = from_triples(["a"], ["x"], [2])
        b = from_triples(["a"], ["x"], [-2])
        assert ew_add(a, b).nnz == 0

    def test_mult_shared(self):
        a = from_triples(["a"], ["x"], [2])
        b = from_triples(["a"], ["x"], [3])
        assert ew_mult(a, b).to_triples() == [("a", "x", 6.0)]

    def test_mult_disjoint_empty(self):
        a = from_triples(["a"], ["x"], [2])
        b = from_triples(["b"], ["y"], [3])
        assert ew_mult(a, b).nnz == 0

    def test_mult_against_dense_hadamard(self, rng):
        a = rand_assoc(rng, 10, 10, 0.35)
        b = rand_assoc(rng, 10, 10, 0.35)
        got = {(r, c): v for r, c, v in ew_mult(a, b).to_triples()}
        want = {}
        for r, c, v in a.to_triples():
            bv = b.get(r, c)
            if bv is not None:
                want[(r, c)] = v * bv
        assert got == want

    def test_kind_mismatch(self):
        a = from_triples(["a"], ["x"], [1])
        b = from_triples(["a"], ["x"], ["s"])
        with pytest.raises(ValueKindError):
            ew_add(a, b)
        with pytest.raises(ValueKindError):
            ew_mult(a, b)

    def test_str_requires_op(self):
        a = from_triples(["a"], ["x"], ["p"])
        b = from_triples(["a"], ["x"], ["q"])
        with pytest.raises(ValueKindError):
            ew_add(a, b)
        assert ew_add(a, b, op="max").get("a", "x") == "q"
        assert ew_mult(a, b, op="min").get("a", "x") == "p"

    def test_empty_operand_passthrough(self):
        a = from_triples(["a"], ["x"], ["p"])
        assert ew_add(AssocArray.empty(), a) == a
        assert ew_mult(a, AssocArray.empty()).nnz == 0

    @given(
        st.lists(st.tuples(keys_st, keys_st, int_vals_st), max_size=20),
        st.lists(st.tuples(keys_st, keys_st, int_vals_st), max_size=20),
    )
    @settings(max_examples=60, deadline=None)
    def test_add_commutative(self, ta, tb):
        a = from_triples([t[0] for t in ta], [t[1] for t in ta], [t[2] for t in ta])
        b = from_triples([t[0] for t in tb], [t[1] for t in tb], [t[2] for t in tb])
        assert ew_add(a, b) == ew_add(b, a)

    @given(
        st.lists(st.tuples(keys_st, keys_st, int_vals_st), max_size=12),
        st.lists(st.tuples(keys_st, keys_st, int_vals_st), max_size=12),
        st.lists(st.tuples(keys_st, keys_st, int_vals_st), max_size=12),
    )
    @settings(max_examples=40, deadline=None)
    def test_add_associative_integer_values(self, ta, tb, tc):
        mk = lambda ts: from_triples([t[0] for t in ts], [t[1] for t in ts], [t[2] for t in ts])
        a, b, c = mk(ta), mk(tb), mk(tc)
        assert ew_add(ew_add(a, b), c) == ew_add(a, ew_add(b, c))


class TestInvariants:
    def test_no_stored_zeros_and_support(self, rng):
        ops = []
        a = rand_assoc(rng, 10, 10, 0.3, values=range(-4, 5))
        b = rand_assoc(rng, 10, 10, 0.3, values=range(-4, 5))
        ops.append(ew_add(a, b))
        ops.append(ew_mult(a, b))
        ops.append(a.transpose())
        ops.append(a.logical())
        ops.append(a.subref(KeyRange("r0000", "r0005"), ALL))
        for arr in ops:
            triples = arr.to_triples()
            assert all(v != 0.0 for _, _, v in triples)
            assert set(arr.row_keys) == {r for r, _, _ in triples}
            assert set(arr.col_keys) == {c for _, c, _ in triples}

    def test_logical_idempotent(self, rng):
        a = rand_assoc(rng, 6, 6, 0.5)
        assert a.logical().logical() == a.logical()

    def test_logical_projects_to_one(self):
        a = from_triples(["a", "b"], ["x", "y"], [7, -3])
        assert a.logical().to_triples() == [("a", "x", 1.0), ("b", "y", 1.0)]
        s = from_triples(["a"], ["x"], ["blue"])
        assert s.logical().to_triples() == [("a", "x", 1.0)]

    def test_equal_is_structural(self):
        a = from_triples(["a"], ["x"], [1])
        b = from_triples(["a"], ["x"], [1.0])
        assert a == b
        assert a != from_triples(["a"], ["x"], ["1"])

    def test_round_trip_triples(self, rng):
        a = rand_assoc(rng, 8, 8, 0.4)
        r, c, v = zip(*a.to_triples())
        assert from_triples(list(r), list(c), list(v)) == a


def test_check_key_rejects_surrogate():
    with pytest.raises(InvalidKeyError):
        check_key("\ud800")


def test_render_num():
    assert render_num(3.0) == "3"
    assert render_num(-2.0) == "-2"
    assert render_num(2.5) == "2.5"
    assert render_num(0.1) == "0.1"
    assert float(render_num(1e300)) == 1e300
    assert float(render_num(1 / 3)) == 1 / 3
