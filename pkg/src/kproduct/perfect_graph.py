"""Stable set polytopes of perfect graphs.

For a perfect graph the stable set polytope is cut out by nonnegativity and
maximal-clique inequalities, which gives an explicit 0/1 slack matrix. This
module builds that matrix, recognises it again and relates clique cut-sets
to k-product decompositions.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

from .decompose import FactorizationTree, recognize_kproduct
from .matrix_core import RationalMatrix, make_nonredundant, rank

STABLE_SET_CAP = 4096


class GraphFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    """A simple graph on vertices ``0..d-1`` with optional vertex labels."""

    d: int
    edges: frozenset = frozenset()
    labels: tuple = ()

    def __post_init__(self):
        edges = set()
        for e in self.edges:
            u, v = tuple(e) if len(e) == 2 else (None, None)
            if u is None or u == v:
                raise ValueError(f"not a simple edge: {tuple(e)}")
            if not (0 <= u < self.d and 0 <= v < self.d):
                raise ValueError(f"edge {tuple(e)} outside 0..{self.d - 1}")
            edges.add(frozenset((u, v)))
        object.__setattr__(self, "edges", frozenset(edges))
        labels = tuple(range(self.d)) if not self.labels else tuple(self.labels)
        if len(labels) != self.d or len(set(labels)) != self.d:
            raise ValueError("need d distinct vertex labels")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_edges(cls, d: int, edges: Iterable[Sequence[int]], labels: Sequence | None = None) -> "Graph":
        return cls(d, frozenset(frozenset(e) for e in edges), tuple(labels or ()))

    @classmethod
    def cycle(cls, d: int) -> "Graph":
        return cls.from_edges(d, [(i, (i + 1) % d) for i in range(d)])

    @classmethod
    def path(cls, d: int) -> "Graph":
        return cls.from_edges(d, [(i, i + 1) for i in range(d - 1)])

    @classmethod
    def complete(cls, d: int) -> "Graph":
        return cls.from_edges(d, itertools.combinations(range(d), 2))

    def adjacent(self, u: int, v: int) -> bool:
        return frozenset((u, v)) in self.edges

    def neighbours(self, v: int) -> set[int]:
        return {u for u in range(self.d) if u != v and self.adjacent(u, v)}

    def complement(self) -> "Graph":
        pairs = (frozenset(p) for p in itertools.combinations(range(self.d), 2))
        return Graph(self.d, frozenset(p for p in pairs if p not in self.edges), self.labels)

    def induced(self, vertices: Sequence[int]) -> "Graph":
        vertices = list(vertices)
        pos = {v: i for i, v in enumerate(vertices)}
        edges = [(pos[u], pos[v]) for u, v in map(tuple, self.edges) if u in pos and v in pos]
        return Graph.from_edges(len(vertices), edges, [self.labels[v] for v in vertices])

    def components(self, removed: Iterable[int] = ()) -> list[list[int]]:
        removed = set(removed)
        seen, out = set(removed), []
        for s in range(self.d):
            if s in seen:
                continue
            comp, stack = [], [s]
            seen.add(s)
            while stack:
                u = stack.pop()
                comp.append(u)
                for w in self.neighbours(u):
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            out.append(sorted(comp))
        return out

    def edge_list(self) -> list[tuple[int, int]]:
        return sorted(tuple(sorted(e)) for e in self.edges)


def parse_graph(text: str) -> Graph:
    """Read ``d e`` then ``e`` lines ``u v`` (0-based); ``#`` starts a comment."""
    lines = []
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].split()
        if body:
            lines.append((no, body))
    if not lines:
        raise GraphFormatError("empty graph file")
    no, head = lines[0]
    try:
        d, e = (int(x) for x in head)
    except ValueError:
        raise GraphFormatError(f"line {no}: expected header 'd e'") from None
    if len(lines) - 1 != e:
        raise GraphFormatError(f"header promises {e} edges, found {len(lines) - 1}")
    edges = []
    for no, body in lines[1:]:
        try:
            u, v = (int(x) for x in body)
        except ValueError:
            raise GraphFormatError(f"line {no}: expected 'u v'") from None
        edges.append((u, v))
    try:
        return Graph.from_edges(d, edges)
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from None


def format_graph(G: Graph) -> str:
    edges = G.edge_list()
    return "\n".join([f"{G.d} {len(edges)}"] + [f"{u} {v}" for u, v in edges]) + "\n"


# ---------------------------------------------------------------------------
# cliques and stable sets
# ---------------------------------------------------------------------------


def bron_kerbosch(G: Graph) -> list[frozenset]:
    """All maximal cliques (vertex indices), sorted by size then content."""
    nbrs = [G.neighbours(v) for v in range(G.d)]
    out = []

    def expand(R: set, P: set, X: set):
        if not P and not X:
            out.append(frozenset(R))
            return
        pivot = max(P | X, key=lambda u: len(P & nbrs[u]))
        for v in sorted(P - nbrs[pivot]):
            expand(R | {v}, P & nbrs[v], X & nbrs[v])
            P = P - {v}
            X = X | {v}

    if G.d:
        expand(set(), set(range(G.d)), set())
    return sorted(out, key=lambda c: (len(c), sorted(c)))


def maximal_stable_sets(G: Graph) -> list[frozenset]:
    return bron_kerbosch(G.complement())


def count_stable_sets_capped(maximal_sets: Sequence[Iterable], cap: int) -> int | None:
    """Number of sets contained in some member of ``maximal_sets``, or None if above ``cap``.

    Sets are processed largest first; a set with more than ``cap`` subsets
    stops the count at once.
    """
    sets = sorted((frozenset(s) for s in maximal_sets), key=len, reverse=True)
    if sets and 2 ** len(sets[0]) > cap:
        return None
    seen: set[frozenset] = set()
    for s in sets:
        items = sorted(s)
        for r in range(len(items) + 1):
            for sub in itertools.combinations(items, r):
                seen.add(frozenset(sub))
                if len(seen) > cap:
                    return None
    return len(seen)


def stable_sets(G: Graph) -> list[frozenset]:
    """All stable sets (including the empty set), by size then content."""
    out = [frozenset()]
    nbrs = [G.neighbours(v) for v in range(G.d)]

    def grow(current: frozenset, start: int):
        for v in range(start, G.d):
            if not (nbrs[v] & current):
                s = current | {v}
                out.append(s)
                grow(s, v + 1)

    grow(frozenset(), 0)
    return sorted(out, key=lambda s: (len(s), sorted(s)))


def _is_cycle(G: Graph, vertices: Sequence[int]) -> bool:
    vs = set(vertices)
    for v in vs:
        if len(G.neighbours(v) & vs) != 2:
            return False
    # 2-regular: a cycle iff connected
    start = next(iter(vs))
    seen, stack = {start}, [start]
    while stack:
        u = stack.pop()
        for w in G.neighbours(u) & vs:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == vs


def odd_hole(G: Graph) -> tuple[int, ...] | None:
    """Vertices of an induced odd cycle of length at least 5, or None."""
    for size in range(5, G.d + 1, 2):
        for vs in itertools.combinations(range(G.d), size):
            if _is_cycle(G, vs):
                return vs
    return None


def is_perfect(G: Graph) -> bool:
    """Brute-force check for odd holes and odd antiholes."""
    return odd_hole(G) is None and odd_hole(G.complement()) is None


# ---------------------------------------------------------------------------
# slack matrices
# ---------------------------------------------------------------------------


def stab_slack(G: Graph, cap: int = STABLE_SET_CAP) -> RationalMatrix:
    """Slack matrix of nonnegativity and maximal-clique inequalities on all stable sets.

    Row labels are ``("v", label)`` and ``("clique", labels)``; column labels
    are the stable sets as frozensets of vertex labels.
    """
    if G.d < 1:
        raise ValueError("graph needs at least one vertex")
    if count_stable_sets_capped(maximal_stable_sets(G), cap) is None:
        raise ValueError(f"more than {cap} stable sets")
    if not is_perfect(G):
        warnings.warn("graph is not perfect; the result is not a slack matrix of its stable set polytope")
    cols = stable_sets(G)
    cliques = bron_kerbosch(G)
    rows = [[int(v in s) for s in cols] for v in range(G.d)]
    rows += [[1 - len(C & s) for s in cols] for C in cliques]
    labels = [("v", G.labels[v]) for v in range(G.d)]
    labels += [("clique", tuple(G.labels[v] for v in sorted(C))) for C in cliques]
    col_labels = [frozenset(G.labels[v] for v in s) for s in cols]
    return RationalMatrix(rows, labels, col_labels)


@dataclass
class StabSlackWitness:
    """Certificate that a matrix is the slack matrix of STAB(G) for perfect ``G``.

    Vertices of ``graph`` are labelled by the nonnegativity row labels.
    Indices refer to the input matrix.
    """

    graph: Graph
    empty_set_column: int
    row_roles: dict = field(default_factory=dict)  # row index -> ("vertex", v) | ("clique", (v, ...))
    column_roles: dict = field(default_factory=dict)  # column index -> tuple of vertex labels

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "graph": {"d": self.graph.d, "labels": [str(x) for x in self.graph.labels], "edges": self.graph.edge_list()},
            "empty_set_column": self.empty_set_column,
            "row_roles": {str(i): [kind, _jsonable(x)] for i, (kind, x) in sorted(self.row_roles.items())},
            "column_roles": {str(j): [str(v) for v in s] for j, s in sorted(self.column_roles.items())},
        }


def _jsonable(x):
    if isinstance(x, tuple):
        return [str(v) for v in x]
    return str(x)


def _check_candidate(R: RationalMatrix, j0: int, d: int) -> tuple[Graph, list[int], list[frozenset]] | None:
    V = [i for i in range(R.m) if R.rows[i][j0] == 0]
    if len(V) != d:
        return None
    Q = [i for i in range(R.m) if R.rows[i][j0] != 0]
    pos = {v: e for e, v in enumerate(V)}
    L1 = [frozenset(pos[v] for v in V if R.rows[v][j] == 1) for j in range(R.n)]
    if len(set(L1)) != R.n:
        return None
    support = [{j for j in range(R.n) if R.rows[v][j] == 1} for v in V]
    edges = [(a, b) for a, b in itertools.combinations(range(d), 2) if not support[a] & support[b]]
    G = Graph.from_edges(d, edges, [R.row_labels[v] for v in V])
    singleton = {}
    for j, s in enumerate(L1):
        if len(s) == 1:
            singleton[next(iter(s))] = j
    if len(singleton) != d:
        return None
    L2 = [frozenset(e for e in range(d) if R.rows[q][singleton[e]] == 0) for q in Q]
    cliques = bron_kerbosch(G)
    if len(set(L2)) != len(L2) or set(L2) != set(cliques):
        return None
    maximal = [s for s in L1 if not any(s < t for t in L1)]
    if set(maximal) != set(maximal_stable_sets(G)):
        return None
    if count_stable_sets_capped(maximal, R.n) != R.n:
        return None
    for q, C in zip(Q, L2):
        if any(R.rows[q][j] != 1 - len(C & s) for j, s in enumerate(L1)):
            return None
    if not is_perfect(G):
        return None
    return G, V, L2


def recognize_stab_slack(S: RationalMatrix) -> StabSlackWitness | None:
    """Decide whether ``S`` is the slack matrix of STAB(G) for a perfect graph ``G``."""
    if not S.is_binary():
        raise ValueError("stable set slack matrices are 0/1")
    R = make_nonredundant(S)[0]
    d = rank(R) - 1
    if d < 1:
        return None
    row_of = {lab: i for i, lab in enumerate(S.row_labels)}
    col_of = {lab: j for j, lab in enumerate(S.col_labels)}
    for j0 in range(R.n):
        if sum(1 for i in range(R.m) if R.rows[i][j0] == 0) != d:
            continue
        found = _check_candidate(R, j0, d)
        if found is None:
            continue
        G, V, L2 = found
        vset = set(V)
        row_roles = {row_of[R.row_labels[v]]: ("vertex", R.row_labels[v]) for v in V}
        Q = [i for i in range(R.m) if i not in vset]
        for q, C in zip(Q, L2):
            row_roles[row_of[R.row_labels[q]]] = ("clique", tuple(G.labels[e] for e in sorted(C)))
        column_roles = {
            col_of[R.col_labels[j]]: tuple(R.row_labels[v] for v in V if R.rows[v][j] == 1) for j in range(R.n)
        }
        return StabSlackWitness(G, col_of[R.col_labels[j0]], row_roles, column_roles)
    return None


# ---------------------------------------------------------------------------
# clique cut-sets
# ---------------------------------------------------------------------------


@dataclass
class CutsetCheck:
    """A clique cut-set of size ``k-1`` (if any) next to the matching k-product search."""

    k: int
    cutset: tuple | None  # (V1, V2, K) as vertex index tuples
    product: FactorizationTree | None

    @property
    def agrees(self) -> bool:
        return (self.cutset is None) == (self.product is None)


def clique_cutset(G: Graph, k: int) -> tuple[tuple, tuple, tuple] | None:
    """A clique ``K`` of size ``k-1`` whose removal disconnects ``G``, as ``(V1, V2, K)``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    for K in itertools.combinations(range(G.d), k - 1):
        if any(not G.adjacent(u, v) for u, v in itertools.combinations(K, 2)):
            continue
        comps = G.components(K)
        if len(comps) >= 2:
            V1 = tuple(comps[0])
            V2 = tuple(v for c in comps[1:] for v in c)
            return V1, V2, tuple(K)
    return None


def vertex_row_kproduct(G: Graph, k: int, S: RationalMatrix | None = None) -> FactorizationTree | None:
    """Search for a k-product of ``stab_slack(G)`` whose special rows are nonnegativity rows."""
    S = stab_slack(G) if S is None else S
    vertex_rows = [i for i, lab in enumerate(S.row_labels) if lab[0] == "v"]
    tuples = list(itertools.permutations(vertex_rows, k - 1)) if k >= 2 else None
    return recognize_kproduct(S, k, tuples=tuples)


def clique_cutset_equivalence(G: Graph, k: int) -> CutsetCheck:
    """Look for a clique cut-set of size ``k-1`` and, independently, for the k-product."""
    return CutsetCheck(k, clique_cutset(G, k), vertex_row_kproduct(G, k))
