from __future__ import annotations

import random
from fractions import Fraction

import pytest

from kproduct.matrix_core import (
    MatrixFormatError,
    RationalMatrix,
    column_multiset,
    complement,
    format_matrix,
    is_isomorphic,
    make_nonredundant,
    parse_matrix,
    rank,
    restricted_columns,
)

from generators import random_matrix, shuffled


def test_parse_and_format_round_trip():
    text = "# a comment\n2 3\n1 0 1/2\n0 3 -4\n"
    S = parse_matrix(text)
    assert S.shape == (2, 3)
    assert S[0, 2] == Fraction(1, 2)
    assert parse_matrix(format_matrix(S)) == S


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("2 2\n1 0\n", 2, None),
        ("2 2\n1 0\n1 x\n", 3, 3),
        ("2\n1 0\n", 1, 1),
        ("1 2\n1 0 0\n", 2, None),
        ("1 1\n1/0\n", 2, 1),
    ],
)
def test_parse_errors_carry_positions(text, line, column):
    with pytest.raises(MatrixFormatError) as err:
        parse_matrix(text)
    assert err.value.line == line
    if column is not None:
        assert err.value.column == column


def test_rows_must_have_equal_length():
    with pytest.raises(ValueError):
        RationalMatrix([[1, 2], [3]])


def test_labels_must_be_unique():
    with pytest.raises(ValueError):
        RationalMatrix([[1], [2]], row_labels=["a", "a"])


def test_rank_small_cases():
    assert rank(RationalMatrix.identity(4)) == 4
    assert rank(RationalMatrix([[1, 2], [2, 4]])) == 1
    assert rank(RationalMatrix([[Fraction(1, 3), 1], [1, 3]])) == 1
    assert rank(RationalMatrix([[0, 0], [0, 0]])) == 0


def test_restricted_columns_and_multiset():
    S = RationalMatrix([[1, 1, 0], [0, 1, 0], [2, 2, 2]])
    assert restricted_columns(S, [0, 2]) == [(1, 2), (1, 2), (0, 2)]
    dist = column_multiset(S, [0, 2])
    assert dist.total == 3
    assert dist.probability((1, 2)) == Fraction(2, 3)
    assert complement(S, [0, 2]) == [1]
    with pytest.raises(ValueError):
        column_multiset(S, [5])


def test_isomorphism_recovers_permutations():
    rng = random.Random(7)
    for _ in range(20):
        S = random_matrix(rng, rng.randint(1, 6), rng.randint(1, 8), 2)
        T = shuffled(S, rng)
        found = is_isomorphic(S, T)
        assert found is not None
        rp, cp = found
        assert all(T[i, j] == S[rp[i], cp[j]] for i in range(T.m) for j in range(T.n))


def test_isomorphism_rejects_different_matrices():
    assert is_isomorphic(RationalMatrix.identity(2), RationalMatrix([[1, 1], [0, 1]])) is None
    assert is_isomorphic(RationalMatrix.identity(2), RationalMatrix.identity(3)) is None


def test_isomorphism_of_highly_symmetric_matrices():
    # all 0/1 columns of weight 2 on 5 rows: refinement alone cannot split them
    cols = [[int(i in (a, b)) for i in range(5)] for a in range(5) for b in range(a + 1, 5)]
    S = RationalMatrix.from_columns(cols)
    T = shuffled(S, random.Random(3))
    assert is_isomorphic(S, T) is not None


def test_make_nonredundant_drops_duplicates_constants_and_dominated_rows():
    S = RationalMatrix(
        [
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, 1, 1],
            [1, 1, 1, 1],  # constant
            [1, 0, 0, 0],  # duplicate row
            [1, 1, 0, 0],  # zero set strictly inside row 2's
        ]
    )
    R, removed_rows, removed_cols = make_nonredundant(S)
    assert R.m == 3
    assert set(removed_rows) == {3, 4, 5}
    assert removed_cols == [3]


def test_make_nonredundant_drops_interior_columns():
    S = RationalMatrix.from_columns([(1, 0, 0), (0, 1, 0), (0, 0, 1), (Fraction(1, 3),) * 3])
    R, _, removed_cols = make_nonredundant(S)
    assert removed_cols == [3]
    assert R == RationalMatrix.identity(3)
