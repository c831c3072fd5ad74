from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from kproduct.matrix_core import RationalMatrix
from kproduct.products import (
    augment_factor,
    find_special_tuples,
    glued_product_vertices,
    is_special_tuple,
    k_product,
    one_product,
    split_blocks,
)

from generators import random_factor

A, B, C, D, E, F, G, H, I, J, K, L = range(1, 13)


def as_ints(S):
    return [[int(x) for x in r] for r in S.rows]


def test_one_product_small():
    P = one_product(RationalMatrix([[1, 0], [2, 3]]), RationalMatrix([[1, 0, 0], [0, 1, 1]]))
    assert as_ints(P) == [
        [1, 1, 1, 0, 0, 0],
        [2, 2, 2, 3, 3, 3],
        [1, 0, 0, 1, 0, 0],
        [0, 1, 1, 0, 1, 1],
    ]


def test_two_product_with_symbolic_entries():
    S1 = RationalMatrix([[A, C, E, G], [B, D, F, H], [0, 0, 1, 1]])
    S2 = RationalMatrix([[I, J, K], [0, 0, 1]])
    P = k_product(S1, (2,), S2, (1,))
    assert as_ints(P) == [
        [A, A, C, C, E, G],
        [B, B, D, D, F, H],
        [I, J, I, J, K, K],
        [0, 0, 0, 0, 1, 1],
    ]


def test_three_product_with_symbolic_entries():
    S1 = RationalMatrix([[A, C, E, G], [B, D, F, H], [0, 0, 1, 0], [0, 0, 0, 1]])
    S2 = RationalMatrix([[I, J, K, L], [0, 1, 0, 0], [0, 0, 1, 1]])
    P = k_product(S1, (2, 3), S2, (1, 2))
    assert as_ints(P) == [
        [A, C, E, G, G],
        [B, D, F, H, H],
        [I, I, J, K, L],
        [0, 0, 1, 0, 0],
        [0, 0, 0, 1, 1],
    ]


def test_one_product_of_identities_is_square_slack():
    P = one_product(RationalMatrix.identity(2), RationalMatrix.identity(2))
    assert P.shape == (4, 4)
    assert all(sum(P.column(j)) == 2 for j in range(4))


def test_special_tuples():
    S = RationalMatrix.identity(3)
    assert is_special_tuple(S, (0,))
    assert is_special_tuple(S, (0, 1))
    assert not is_special_tuple(S, (0, 1, 2))  # the zero pattern is missing
    assert find_special_tuples(S, 2) == [(0,), (1,), (2,)]
    assert (1, 0) in find_special_tuples(S, 3)
    assert not is_special_tuple(RationalMatrix([[2, 0]]), (0,))
    with pytest.raises(ValueError):
        find_special_tuples(S, 1)


def test_split_blocks_reports_offending_column():
    S = RationalMatrix([[1, 1, 0], [1, 0, 0], [5, 6, 7]])
    with pytest.raises(ValueError, match="column 0"):
        split_blocks(S, (0, 1))
    with pytest.raises(ValueError, match="pattern"):
        split_blocks(RationalMatrix([[1, 1], [2, 3]]), (0,))


def test_augment_factor_appends_complement_of_special_rows():
    S = RationalMatrix([[1, 0, 0], [0, 1, 0], [4, 5, 6]])
    T = augment_factor(S, (0, 1))
    assert as_ints(T)[-1] == [0, 0, 1]
    with pytest.raises(ValueError):
        augment_factor(S, (2,))


def test_glued_product_vertices():
    V1 = [(0, 0), (1, 0), (0, 1)]
    V2 = [(0, 5), (1, 6)]
    assert glued_product_vertices(V1, V2, 2) == [(0, 0, 5), (1, 0, 6), (0, 1, 5)]
    with pytest.raises(ValueError, match=r"V1\[0\]"):
        glued_product_vertices([(2, 0)], V2, 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3))
def test_k_product_shape_and_blocks(seed, k):
    rng = random.Random(seed)
    b1 = [rng.randint(1, 3) for _ in range(k)]
    b2 = [rng.randint(1, 3) for _ in range(k)]
    S1, t1 = random_factor(rng, 2, b1)
    S2, t2 = random_factor(rng, 2, b2)
    P = k_product(S1, t1, S2, t2)
    assert P.m == S1.m + S2.m - (k - 1)
    assert P.n == sum(x * y for x, y in zip(b1, b2))
    special = tuple(range(P.m - (k - 1), P.m))
    if k > 1:
        assert is_special_tuple(P, special)
        split = split_blocks(P, special)
        assert [len(c) for c in split.columns] == [x * y for x, y in zip(b1, b2)]
