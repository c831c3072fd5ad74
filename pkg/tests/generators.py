"""Seeded instance generators shared by the test modules."""

from __future__ import annotations

import itertools
import random
from dataclasses import replace

import networkx as nx

from kproduct.matrix_core import RationalMatrix
from kproduct.matroid import MatroidSumTree, bases
from kproduct.perfect_graph import Graph
from kproduct.products import k_product


def shuffled(S: RationalMatrix, rng: random.Random) -> RationalMatrix:
    rows, cols = list(range(S.m)), list(range(S.n))
    rng.shuffle(rows)
    rng.shuffle(cols)
    return S.permuted(rows, cols)


def random_matrix(rng: random.Random, m: int, n: int, top: int = 3) -> RationalMatrix:
    return RationalMatrix([[rng.randint(0, top) for _ in range(n)] for _ in range(m)])


def random_factor(rng: random.Random, rows: int, block_sizes: list[int]) -> tuple[RationalMatrix, tuple]:
    """A 0/1 matrix with distinct columns whose last ``len(block_sizes)-1`` rows are special."""
    k = len(block_sizes)
    cols = []
    for blk, size in enumerate(block_sizes):
        pattern = [int(s == blk) for s in range(1, k)]
        pool = list(itertools.product((0, 1), repeat=rows))
        for body in rng.sample(pool, size):
            cols.append(list(body) + pattern)
    S = RationalMatrix.from_columns(cols)
    return S, tuple(range(rows, rows + k - 1))


def random_kproduct(rng: random.Random, k: int) -> tuple[RationalMatrix, RationalMatrix, tuple, RationalMatrix, tuple]:
    """A shuffled k-product of two random 0/1 factors and the factors themselves."""
    r1, r2 = rng.randint(1, 4), rng.randint(1, 4)
    b1 = [rng.randint(1, min(4, 2**r1)) for _ in range(k)]
    b2 = [rng.randint(1, min(4, 2**r2)) for _ in range(k)]
    # neither factor may be a simplex: some block needs two columns on each side
    b1[rng.randrange(k)] = 2
    b2[rng.randrange(k)] = 2
    S1, t1 = random_factor(rng, r1, b1)
    S2, t2 = random_factor(rng, r2, b2)
    return shuffled(k_product(S1, t1, S2, t2), rng), S1, t1, S2, t2


# ---------------------------------------------------------------------------
# matroids
# ---------------------------------------------------------------------------


def relabel(M: MatroidSumTree, mapping: dict) -> MatroidSumTree:
    if M.kind == "uniform":
        return replace(M, elements=tuple(mapping.get(e, e) for e in M.elements))
    children = tuple(relabel(c, mapping) for c in M.children)
    return type(M)(M.kind, children=children, shared=mapping.get(M.shared, M.shared))


def random_matroid_tree(rng: random.Random, max_sums: int = 3, max_ground: int = 10) -> MatroidSumTree:
    """A random sum tree with at most ``max_sums`` sums and ``max_ground`` elements."""
    counter = itertools.count()
    while True:
        sums = rng.randint(0, max_sums)
        leaves = []
        for _ in range(sums + 1):
            n = rng.randint(2, 5)
            k = rng.randint(1, n - 1)
            leaves.append(MatroidSumTree.uniform(n, k, [next(counter) for _ in range(n)], rng.random() < 0.3))
        while len(leaves) > 1:
            a = leaves.pop(rng.randrange(len(leaves)))
            b = leaves.pop(rng.randrange(len(leaves)))
            if rng.random() < 0.6:
                p = rng.choice(a.ground())
                q = rng.choice(b.ground())
                leaves.append(MatroidSumTree.two_sum(a, relabel(b, {q: p}), p))
            else:
                leaves.append(MatroidSumTree.one_sum(a, b))
        M = leaves[0]
        if len(M.ground()) <= max_ground:
            return M


def _base_graph(ground, base_sets) -> nx.Graph:
    g = nx.Graph()
    for e in ground:
        g.add_node(("e", e), side=0)
    for i, b in enumerate(base_sets):
        g.add_node(("b", i), side=1)
        g.add_edges_from((("b", i), ("e", e)) for e in b)
    return g


def _iso(ground_a, bases_a, ground_b, bases_b) -> bool:
    if len(ground_a) != len(ground_b) or len(bases_a) != len(bases_b):
        return False
    match = nx.algorithms.isomorphism.categorical_node_match("side", None)
    return nx.is_isomorphic(_base_graph(ground_a, bases_a), _base_graph(ground_b, bases_b), node_match=match)


def _dual_bases(ground, base_sets):
    g = frozenset(ground)
    return {g - b for b in base_sets}


def same_bases_up_to_relabeling(M: MatroidSumTree, N: MatroidSumTree) -> bool:
    A, B = bases(M), bases(N)
    return _iso(A.ground, A.bases, B.ground, B.bases)


def same_up_to_global_duality(M: MatroidSumTree, N: MatroidSumTree) -> bool:
    A, B = bases(M), bases(N)
    return _iso(A.ground, A.bases, B.ground, B.bases) or _iso(A.ground, A.bases, B.ground, _dual_bases(B.ground, B.bases))


def _component_bases(M: MatroidSumTree) -> list[tuple[tuple, set]]:
    all_bases = bases(M).bases
    return [(C, {b & frozenset(C) for b in all_bases}) for C in M.components()]


def same_up_to_component_duality(M: MatroidSumTree, N: MatroidSumTree) -> bool:
    """Equal up to relabeling after dualising some connected components."""
    rest = _component_bases(N)
    for C, bc in _component_bases(M):
        hit = None
        for i, (D, bd) in enumerate(rest):
            if _iso(C, bc, D, bd) or _iso(C, bc, D, _dual_bases(D, bd)):
                hit = i
                break
        if hit is None:
            return False
        rest.pop(hit)
    return not rest


# ---------------------------------------------------------------------------
# graphs
# ---------------------------------------------------------------------------


def from_nx(g: nx.Graph) -> Graph:
    nodes = sorted(g.nodes())
    pos = {v: i for i, v in enumerate(nodes)}
    return Graph.from_edges(len(nodes), [(pos[u], pos[v]) for u, v in g.edges()])


def to_nx(G: Graph) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(G.d))
    g.add_edges_from(G.edge_list())
    return g


def atlas_graphs(max_vertices: int) -> list[Graph]:
    """Every graph with 1..max_vertices vertices (max 7), up to isomorphism."""
    return [from_nx(g) for g in nx.graph_atlas_g() if 1 <= g.number_of_nodes() <= max_vertices]


def random_chordal_graph(rng: random.Random, d: int) -> Graph:
    """Each new vertex is joined to a random clique of the graph built so far."""
    edges: set[tuple[int, int]] = set()
    for v in range(1, d):
        g = nx.Graph()
        g.add_nodes_from(range(v))
        g.add_edges_from(edges)
        cliques = list(nx.find_cliques(g))
        C = rng.choice(cliques)
        size = rng.randint(0, len(C))
        for u in rng.sample(sorted(C), size):
            edges.add((u, v))
    return Graph.from_edges(d, edges)
