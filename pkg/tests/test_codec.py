import math
from itertools import product

import pytest
from hypothesis import given, strategies as st

from oracles import cantor_by_enumeration
from qgandy.codec import (
    IndexTooLarge,
    coord_index,
    coord_unindex,
    fold_int,
    index_to_json,
    pair,
    seq_decode,
    seq_encode,
    succ_pair,
    succ_unpair,
    unfold_int,
    unpair,
)


@pytest.mark.parametrize("args, expected", [((0, 0), 0), ((1, 0), 2), ((0, 1), 1)])
def test_pair_examples(args, expected):
    assert pair(*args) == expected
    assert unpair(expected) == args


@pytest.mark.parametrize("args, expected", [((0, 0), 1), ((2, 0), 6), ((0, 1), 2)])
def test_succ_pair_examples(args, expected):
    assert succ_pair(*args) == expected
    assert succ_unpair(expected) == args


def test_succ_unpair_rejects_zero():
    with pytest.raises(ValueError):
        succ_unpair(0)


def test_pair_matches_diagonal_enumeration():
    table = cantor_by_enumeration(5000)
    for (n, p), k in table.items():
        assert pair(n, p) == k


@pytest.mark.parametrize("x, expected", [(0, 0), (3, 6), (-2, 3), (-1, 1)])
def test_fold_examples(x, expected):
    assert fold_int(x) == expected
    assert unfold_int(expected) == x


def test_fold_is_bijection_on_range():
    images = sorted(fold_int(x) for x in range(-1000, 1001))
    assert images == list(range(2001))


@pytest.mark.parametrize(
    "coord, expected",
    [((0, 0, 0), 0), ((1, 0, 0), 5), ((0, 0, -1), 1)],
)
def test_coord_index_examples(coord, expected):
    assert coord_index(coord) == expected
    assert coord_unindex(expected, 3) == coord


def test_coord_index_three_dims_uses_folded_triple():
    for x, y, z in [(2, -3, 5), (-7, 0, 1)]:
        assert coord_index((x, y, z)) == pair(fold_int(x), pair(fold_int(y), fold_int(z)))


def test_coord_index_one_dim_is_fold():
    assert [coord_index((x,)) for x in (-2, -1, 0, 1, 2)] == [3, 1, 0, 2, 4]


@pytest.mark.parametrize("js, expected", [([], 0), ([2], 6), ([1, 1], 12)])
def test_seq_examples(js, expected):
    assert seq_encode(js) == expected
    assert seq_decode(expected) == js


def test_seq_nonempty_never_zero():
    for js in product(range(4), repeat=3):
        assert seq_encode(js) > 0


def test_seq_max_bits_guard():
    js = [5] * 12
    with pytest.raises(IndexTooLarge):
        seq_encode(js, max_bits=1000)
    assert seq_encode(js[:3], max_bits=1000) == seq_encode(js[:3])


def test_index_to_json_small_and_digest():
    assert index_to_json(12345) == "12345"
    big = 10**50 + 7
    assert index_to_json(big, max_digits=100) == str(big)
    rec = index_to_json(big, max_digits=10)
    assert rec["digits"] == 51 and len(rec["sha256"]) == 64


def test_index_to_json_beyond_python_str_limit():
    k = 7**20000
    digits = math.floor(20000 * math.log10(7)) + 1
    text = index_to_json(k)
    assert len(text) == digits
    assert int(text[-30:]) == k % 10**30
    assert index_to_json(k, max_digits=10)["digits"] == digits


@given(st.integers(min_value=0, max_value=10**40))
def test_unpair_roundtrip(k):
    assert pair(*unpair(k)) == k


@given(st.lists(st.integers(min_value=-(10**6), max_value=10**6), min_size=1, max_size=4))
def test_coord_roundtrip_any_dim(coord):
    assert coord_unindex(coord_index(coord), len(coord)) == tuple(coord)


@given(st.lists(st.integers(min_value=0, max_value=50), max_size=5))
def test_seq_roundtrip(js):
    assert seq_decode(seq_encode(js)) == js


def test_negative_inputs_rejected():
    with pytest.raises(ValueError):
        pair(-1, 0)
    with pytest.raises(ValueError):
        seq_encode([1, -1])
