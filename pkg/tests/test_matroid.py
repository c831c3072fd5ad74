from __future__ import annotations

import itertools
import json
import random

import pytest

from kproduct.decompose import irreducible_partition
from kproduct.matrix_core import RationalMatrix, is_isomorphic, rank
from kproduct.matroid import (
    MatroidSumTree,
    base_polytope_slack,
    bases,
    dual,
    hypersimplex_slack,
    is_hypersimplex_slack,
    recognize_matroid_slack,
)
from kproduct.polyhedra import is_slack_matrix
from kproduct.products import one_product

from generators import random_matroid_tree, same_up_to_component_duality, shuffled

U = MatroidSumTree.uniform


def test_uniform_bases():
    assert bases(U(3, 1, [1, 2, 3])).sorted_bases() == [(1,), (2,), (3,)]


def test_one_sum_bases():
    M = MatroidSumTree.one_sum(U(2, 1, [1, 2]), U(2, 1, [3, 4]))
    assert bases(M).sorted_bases() == [(1, 3), (1, 4), (2, 3), (2, 4)]


def test_two_sum_bases():
    M = MatroidSumTree.two_sum(U(3, 1, [1, 2, "p"]), U(3, 1, ["p", 3, 4]), "p")
    # p must lie in exactly one of the two bases: {1}|{p} -> {1}, {p}|{3} -> {3}, ...
    assert bases(M).sorted_bases() == [(1,), (2,), (3,), (4,)]


def test_two_sum_of_rank_two_pieces():
    M = MatroidSumTree.two_sum(U(3, 2, [1, 2, "p"]), U(3, 1, ["p", 3, 4]), "p")
    expected = {frozenset(b) for b in [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4)]}
    assert set(bases(M).bases) == expected


def test_invalid_trees():
    with pytest.raises(ValueError):
        U(3, 0)
    with pytest.raises(ValueError):
        U(3, 3)
    with pytest.raises(ValueError):
        MatroidSumTree.one_sum(U(2, 1, [1, 2]), U(2, 1, [2, 3]))
    with pytest.raises(ValueError):
        MatroidSumTree.two_sum(U(2, 1, [1, 2]), U(2, 1, [3, 4]), 1)


def test_bases_cap():
    M = MatroidSumTree.one_sum(U(9, 1, range(9)), U(9, 1, range(9, 18)))
    with pytest.raises(ValueError):
        bases(M)


def test_dual():
    assert bases(dual(U(4, 1))).rank == 3
    M = MatroidSumTree.one_sum(U(2, 1, [1, 2]), U(3, 1, [3, 4, 5]))
    assert dual(dual(M)) == M
    ground = frozenset(M.ground())
    assert bases(dual(M)).bases == frozenset(ground - b for b in bases(M).bases)


def test_dual_commutes_with_two_sum():
    rng = random.Random(8)
    for _ in range(20):
        M = random_matroid_tree(rng)
        ground = frozenset(M.ground())
        assert bases(dual(M)).bases == frozenset(ground - b for b in bases(M).bases)


def test_hypersimplex_slack_shapes():
    S = hypersimplex_slack(4, 2)
    assert S.shape == (8, 6)
    assert all(S.column(j)[:4] == tuple(1 - x for x in S.column(j)[4:]) for j in range(6))
    assert hypersimplex_slack(3, 1) == RationalMatrix.identity(3)
    assert hypersimplex_slack(3, 2) == RationalMatrix.identity(3)
    assert rank(S) == 4
    with pytest.raises(ValueError):
        hypersimplex_slack(4, 4)


def test_is_hypersimplex_slack():
    rng = random.Random(1)
    assert is_hypersimplex_slack(shuffled(hypersimplex_slack(4, 2), rng)) == (4, 2)
    assert is_hypersimplex_slack(shuffled(hypersimplex_slack(6, 3), rng)) == (6, 3)
    assert is_hypersimplex_slack(shuffled(hypersimplex_slack(6, 2), rng)) == (6, 2)
    assert is_hypersimplex_slack(RationalMatrix.identity(5)) == (5, 1)
    S = hypersimplex_slack(4, 2)
    assert is_hypersimplex_slack(S.submatrix(None, range(5))) is None
    assert is_hypersimplex_slack(one_product(RationalMatrix.identity(2), RationalMatrix.identity(2))) is None


def test_base_polytope_slack_examples():
    assert is_isomorphic(base_polytope_slack(U(4, 2)), hypersimplex_slack(4, 2))
    square = one_product(RationalMatrix.identity(2), RationalMatrix.identity(2))
    M = MatroidSumTree.one_sum(U(2, 1, [1, 2]), U(2, 1, [3, 4]))
    assert is_isomorphic(base_polytope_slack(M), square)
    M = MatroidSumTree.two_sum(U(3, 1, [1, 2, "p"]), U(3, 1, ["p", 3, 4]), "p")
    S = base_polytope_slack(M)
    assert is_slack_matrix(S)


def test_slack_of_dual_is_isomorphic():
    rng = random.Random(4)
    for _ in range(15):
        M = random_matroid_tree(rng, max_ground=8)
        assert is_isomorphic(base_polytope_slack(M), base_polytope_slack(dual(M))) is not None


def test_generated_slacks_pass_verification():
    rng = random.Random(6)
    for _ in range(8):
        M = random_matroid_tree(rng, max_sums=2, max_ground=6)
        S = base_polytope_slack(M)
        v = is_slack_matrix(S)
        assert v.verdict == "yes"
        assert rank(S) == v.dimension + 1


def test_connectivity_matches_irreducibility():
    rng = random.Random(10)
    for _ in range(20):
        M = random_matroid_tree(rng, max_ground=8)
        S = base_polytope_slack(M)
        connected = len(M.components()) == 1
        assert connected == (len(irreducible_partition(S)) == 1)


def test_recognize_examples():
    T = recognize_matroid_slack(hypersimplex_slack(4, 2))
    assert T.kind == "uniform" and (T.n, T.rank) == (4, 2)
    M = MatroidSumTree.one_sum(U(2, 1, [1, 2]), U(2, 1, [3, 4]))
    T = recognize_matroid_slack(shuffled(base_polytope_slack(M), random.Random(0)))
    assert T.kind == "one_sum"
    assert all(leaf.n == 2 and leaf.k == 1 for leaf in T.leaves())
    M = MatroidSumTree.two_sum(U(3, 1, [1, 2, "p"]), U(3, 2, ["p", 3, 4]), "p")
    T = recognize_matroid_slack(shuffled(base_polytope_slack(M), random.Random(0)))
    assert same_up_to_component_duality(M, T)


def test_recognize_rejects_non_matroid_matrices():
    assert recognize_matroid_slack(hypersimplex_slack(4, 2).submatrix(None, range(5))) is None
    # J - I is not a slack matrix: the vertices of aff meet R^3_+ at 2e_i
    assert recognize_matroid_slack(RationalMatrix([[1, 0, 1], [0, 1, 1], [1, 1, 0]])) is None
    with pytest.raises(ValueError):
        recognize_matroid_slack(RationalMatrix([[2, 0], [0, 1]]))


def test_recognized_slacks_verify():
    rng = random.Random(12)
    for _ in range(6):
        M = random_matroid_tree(rng, max_sums=2, max_ground=6)
        S = shuffled(base_polytope_slack(M), rng)
        T = recognize_matroid_slack(S)
        assert T is not None
        assert S.is_binary() and is_slack_matrix(S)


def test_tree_json_round_trip():
    M = MatroidSumTree.two_sum(U(3, 1, [1, 2, 9]), U(4, 2, [9, 3, 4, 5], dual=True), 9)
    doc = json.loads(json.dumps(M.to_json()))
    assert doc["schema_version"] == 1
    assert MatroidSumTree.from_json(doc) == M


def test_all_small_uniform_matroids_round_trip():
    for n in range(2, 7):
        for k in range(1, n):
            T = recognize_matroid_slack(base_polytope_slack(U(n, k)))
            assert T is not None and T.kind == "uniform"
            assert T.n == n and T.rank in (k, n - k)


def test_components():
    M = MatroidSumTree.two_sum(
        MatroidSumTree.one_sum(U(3, 1, [1, 2, 3]), U(2, 1, [4, 5])), U(3, 2, [3, 6, 7]), 3
    )
    comps = sorted(sorted(c) for c in M.components())
    assert comps == [[1, 2, 6, 7], [4, 5]]
    assert all(len(c) for c in M.components())
    assert sorted(itertools.chain.from_iterable(M.components())) == sorted(M.ground())
