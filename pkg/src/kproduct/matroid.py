"""Matroids built from uniform matroids by 1-sums and 2-sums.

Such matroids are exactly those with 2-level base polytopes. This module
generates their base polytope slack matrices and recognises those matrices
again, recovering a sum tree.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, replace
from typing import Hashable, Sequence

from .decompose import DEFAULT_TOL, irreducible_partition, recognize_kproduct
from .matrix_core import RationalMatrix, is_isomorphic, make_nonredundant, rank
from .products import k_product, one_product

BASES_CAP = 16


# ---------------------------------------------------------------------------
# sum trees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MatroidSumTree:
    """A uniform leaf, or a 1-sum / 2-sum of two subtrees.

    A leaf with ``dual_flag`` set stands for the dual ``U_{n,n-k}`` of
    ``U_{n,k}``. A 2-sum glues its children along the element ``shared``,
    which disappears from the ground set.
    """

    kind: str
    n: int = 0
    k: int = 0
    elements: tuple = ()
    dual_flag: bool = False
    children: tuple = ()
    shared: Hashable = None

    def __post_init__(self):
        validate(self)

    @classmethod
    def uniform(cls, n: int, k: int, elements: Sequence | None = None, dual: bool = False) -> "MatroidSumTree":
        elements = tuple(range(n)) if elements is None else tuple(elements)
        return cls("uniform", n=n, k=k, elements=elements, dual_flag=dual)

    @classmethod
    def one_sum(cls, left: "MatroidSumTree", right: "MatroidSumTree") -> "MatroidSumTree":
        return cls("one_sum", children=(left, right))

    @classmethod
    def two_sum(cls, left: "MatroidSumTree", right: "MatroidSumTree", p) -> "MatroidSumTree":
        return cls("two_sum", children=(left, right), shared=p)

    @property
    def rank(self) -> int:
        if self.kind == "uniform":
            return self.n - self.k if self.dual_flag else self.k
        r = self.children[0].rank + self.children[1].rank
        return r - 1 if self.kind == "two_sum" else r

    def ground(self) -> tuple:
        if self.kind == "uniform":
            return self.elements
        a, b = (c.ground() for c in self.children)
        if self.kind == "one_sum":
            return a + b
        return tuple(x for x in a + b if x != self.shared)

    def leaves(self) -> list["MatroidSumTree"]:
        if self.kind == "uniform":
            return [self]
        return [leaf for c in self.children for leaf in c.leaves()]

    def sum_count(self) -> int:
        return 0 if self.kind == "uniform" else 1 + sum(c.sum_count() for c in self.children)

    def components(self) -> list[tuple]:
        """Ground sets of the connected components.

        Leaves are connected, a 1-sum keeps the components of both sides and
        a 2-sum merges the two components meeting at the shared element.
        """
        if self.kind == "uniform":
            return [self.elements]
        a, b = (c.components() for c in self.children)
        if self.kind == "one_sum":
            return a + b
        p = self.shared
        ca = next(c for c in a if p in c)
        cb = next(c for c in b if p in c)
        merged = tuple(x for x in ca + cb if x != p)
        return [c for c in a if c is not ca] + [merged] + [c for c in b if c is not cb]

    def to_json(self) -> dict:
        return {"schema_version": 1, "tree": _node_json(self)}

    @classmethod
    def from_json(cls, doc: dict) -> "MatroidSumTree":
        return _node_from_json(doc["tree"] if "tree" in doc else doc)

    def __str__(self) -> str:
        if self.kind == "uniform":
            k = self.n - self.k if self.dual_flag else self.k
            return f"U_{{{self.n},{k}}}[{','.join(map(str, self.elements))}]"
        a, b = self.children
        op = "(+)" if self.kind == "one_sum" else f"(+2 {self.shared})"
        return f"({a} {op} {b})"


def _node_json(M: MatroidSumTree) -> dict:
    if M.kind == "uniform":
        return {"kind": "uniform", "n": M.n, "k": M.k, "elements": list(M.elements), "dual": M.dual_flag}
    out = {"kind": M.kind, "children": [_node_json(c) for c in M.children]}
    if M.kind == "two_sum":
        out["shared"] = M.shared
    return out


def _node_from_json(d: dict) -> MatroidSumTree:
    kind = d["kind"]
    if kind == "uniform":
        return MatroidSumTree.uniform(d["n"], d["k"], d.get("elements"), d.get("dual", False))
    a, b = (_node_from_json(c) for c in d["children"])
    if kind == "one_sum":
        return MatroidSumTree.one_sum(a, b)
    if kind == "two_sum":
        return MatroidSumTree.two_sum(a, b, d["shared"])
    raise ValueError(f"unknown node kind {kind!r}")


def validate(M: MatroidSumTree) -> None:
    """Raise ValueError unless the node satisfies the sum-tree invariants."""
    if M.kind == "uniform":
        if not 1 <= M.k <= M.n - 1:
            raise ValueError(f"uniform leaf needs 1 <= k <= n-1, got n={M.n}, k={M.k}")
        if len(M.elements) != M.n or len(set(M.elements)) != M.n:
            raise ValueError("uniform leaf needs n distinct element labels")
        return
    if M.kind not in ("one_sum", "two_sum") or len(M.children) != 2:
        raise ValueError(f"bad node kind {M.kind!r}")
    a, b = (set(c.ground()) for c in M.children)
    common = a & b
    if M.kind == "one_sum" and common:
        raise ValueError(f"1-sum of overlapping ground sets: {sorted(map(str, common))}")
    if M.kind == "two_sum" and common != {M.shared}:
        raise ValueError("2-sum children must share exactly the element p")
    # Leaves have no loops or coloops and both sums preserve that, so p is
    # never a loop or coloop of either child.


def dual(M: MatroidSumTree) -> MatroidSumTree:
    """The dual matroid: every leaf flips its dual flag."""
    if M.kind == "uniform":
        return replace(M, dual_flag=not M.dual_flag)
    return replace(M, children=tuple(dual(c) for c in M.children))


# ---------------------------------------------------------------------------
# bases
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BaseSet:
    ground: tuple
    bases: frozenset

    @property
    def rank(self) -> int:
        return len(next(iter(self.bases)))

    def sorted_bases(self) -> list[tuple]:
        pos = {e: i for i, e in enumerate(self.ground)}
        return sorted(tuple(sorted(B, key=pos.__getitem__)) for B in self.bases)


def _bases(M: MatroidSumTree) -> set[frozenset]:
    if M.kind == "uniform":
        r = M.rank
        return {frozenset(c) for c in itertools.combinations(M.elements, r)}
    A, B = (_bases(c) for c in M.children)
    if M.kind == "one_sum":
        return {a | b for a in A for b in B}
    p = M.shared
    return {(a | b) - {p} for a in A for b in B if (p in a) != (p in b)}


def bases(M: MatroidSumTree, cap: int = BASES_CAP) -> BaseSet:
    """Explicit base enumeration; refuses ground sets larger than ``cap``."""
    g = M.ground()
    if len(g) > cap:
        raise ValueError(f"ground set of size {len(g)} exceeds cap {cap}")
    return BaseSet(g, frozenset(_bases(M)))


# ---------------------------------------------------------------------------
# slack matrices
# ---------------------------------------------------------------------------


def hypersimplex_slack(n: int, k: int) -> RationalMatrix:
    """Non-redundant slack matrix ``S_{n,k}`` of the base polytope of ``U_{n,k}``.

    Rows ``0..n-1`` are ``x_e >= 0`` and rows ``n..2n-1`` are ``x_e <= 1``;
    columns run over the weight-k 0/1 vectors in lexicographic order of their
    supports. For ``k`` in ``{1, n-1}`` the result is ``I_n``.
    """
    if not 1 <= k <= n - 1:
        raise ValueError(f"need 1 <= k <= n-1, got n={n}, k={k}")
    if k in (1, n - 1):
        return RationalMatrix.identity(n)
    cols = []
    for c in itertools.combinations(range(n), k):
        v = [int(e in c) for e in range(n)]
        cols.append(v + [1 - x for x in v])
    return RationalMatrix.from_columns(cols)


def _leaf_slack(M: MatroidSumTree) -> RationalMatrix:
    bs = sorted(itertools.combinations(range(M.n), M.k))
    if M.dual_flag:
        bs = [tuple(e for e in range(M.n) if e not in B) for B in bs]
    rows, labels = [], []
    for kind in ("ge", "le"):
        for i, e in enumerate(M.elements):
            rows.append([int((i in B) == (kind == "ge")) for B in bs])
            labels.append((kind, e))
    col_labels = [frozenset(M.elements[i] for i in B) for B in bs]
    return RationalMatrix(rows, labels, col_labels)


def _full_slack(M: MatroidSumTree) -> RationalMatrix:
    if M.kind == "uniform":
        return _leaf_slack(M)
    L, R = (_full_slack(c) for c in M.children)
    if M.kind == "one_sum":
        P = one_product(L, R)
        return P.relabeled(col_labels=[a | b for a, b in P.col_labels])
    p = M.shared
    P = k_product(L, (L.row_index(("ge", p)),), R, (R.row_index(("le", p)),))
    labels = list(P.row_labels)
    labels[labels.index(("le", p))] = ("aux", p, "le")
    labels[labels.index(("ge", p))] = ("aux", p, "ge")
    labels[-1] = ("aux", p, "special")
    return P.relabeled(labels, [(a | b) - {p} for a, b in P.col_labels])


def base_polytope_slack(M: MatroidSumTree, cap: int = BASES_CAP) -> RationalMatrix:
    """Non-redundant slack matrix of the base polytope of ``M``.

    Built by 1-products and 2-products of leaf slack matrices, then reduced.
    Rows labelled ``("ge", e)`` and ``("le", e)`` are ``x_e >= 0`` and
    ``x_e <= 1``; column labels are the bases. When the ground set is at most
    ``cap`` the columns are cross-checked against explicit base enumeration.
    """
    full = _full_slack(M)
    g = M.ground()
    if len(g) <= cap:
        expected = bases(M, cap).bases
        got = set(full.col_labels)
        if got != expected or len(got) != full.n:
            raise AssertionError("product construction disagrees with base enumeration")
        for e in g:
            row = full.row(full.row_index(("ge", e)))
            if any(int(e in B) != x for B, x in zip(full.col_labels, row)):
                raise AssertionError(f"row for element {e!r} disagrees with bases")
    return make_nonredundant(full)[0]


# ---------------------------------------------------------------------------
# hypersimplex detection
# ---------------------------------------------------------------------------


def _hypersimplex_roles(S: RationalMatrix):
    """``(n, k, roles)`` when ``S`` is a hypersimplex slack matrix, else None.

    ``roles[i]`` lists the ``(element, kind)`` pairs that row ``i`` plays,
    with kind 0 for ``x_e >= 0`` and 1 for ``x_e <= 1``.
    """
    m, n = S.shape
    rows = S.rows
    cols = S.columns()
    if len(set(cols)) != n:
        return None
    weights = [sum(c) for c in cols]
    if m == n and m >= 2 and all(w == 1 for w in weights) and all(sum(r) == 1 for r in rows):
        if m == 2:
            # I_2 = U_{2,1}: each row is x_e >= 0 for one element and x_f <= 1 for the other
            return 2, 1, [[(0, 0), (1, 1)], [(1, 0), (0, 1)]]
        return m, 1, [[(i, 0)] for i in range(m)]
    if m % 2 or m < 4:
        return None
    index = {r: i for i, r in enumerate(rows)}
    if len(index) != m:
        return None
    pairs, seen = [], set()
    for i, r in enumerate(rows):
        if i in seen:
            continue
        j = index.get(tuple(1 - x for x in r))
        if j is None or j == i:
            return None
        seen.update((i, j))
        ones_i, ones_j = sum(r), sum(rows[j])
        pairs.append((i, j) if ones_i <= ones_j else (j, i))
    size = m // 2
    if sum(rows[pairs[0][0]]) == sum(rows[pairs[0][1]]):
        ref = rows[pairs[0][0]]
        fixed = [pairs[0]]
        for a, b in pairs[1:]:
            agree = sum(x == y for x, y in zip(ref, rows[a]))
            fixed.append((a, b) if agree < n - agree else (b, a))
        pairs = fixed
    ge = [rows[a] for a, _ in pairs]
    ks = {sum(r[j] for r in ge) for j in range(n)}
    if len(ks) != 1:
        return None
    k = int(ks.pop())
    if not 1 <= k <= size - 1 or n != math.comb(size, k):
        return None
    roles = [None] * m
    for e, (a, b) in enumerate(pairs):
        roles[a] = [(e, 0)]
        roles[b] = [(e, 1)]
    return size, k, roles


def is_hypersimplex_slack(S: RationalMatrix) -> tuple[int, int] | None:
    """``(n, k)`` when ``S`` is isomorphic to ``S_{n,k}`` (or ``I_n``), else None."""
    if not S.is_binary():
        return None
    found = _hypersimplex_roles(S)
    return None if found is None else found[:2]


# ---------------------------------------------------------------------------
# recognition
# ---------------------------------------------------------------------------


@dataclass
class _Leaf:
    n: int
    k: int
    roles: dict  # row label -> [(local element, kind)]
    ident: int = 0
    dual: bool = False


@dataclass
class _Sum:
    kind: str
    children: list
    left_label: Hashable = None
    right_label: Hashable = None


@dataclass
class _Fresh:
    counter: int = 0

    def __call__(self):
        self.counter += 1
        return ("row", self.counter)


def _close(S: RationalMatrix, fresh: _Fresh) -> RationalMatrix:
    present = set(S.rows)
    for r in list(S.rows):
        c = tuple(1 - x for x in r)
        if c not in present:
            S = S.append_row(c, fresh())
            present.add(c)
    return S


def _dedupe(S: RationalMatrix) -> RationalMatrix:
    cols = list(dict.fromkeys(S.columns()))
    return RationalMatrix.from_columns(cols, S.row_labels)


def _complement_index(S: RationalMatrix, i: int) -> int | None:
    c = tuple(1 - x for x in S.rows[i])
    return next((j for j in range(S.m) if S.rows[j] == c), None)


def _decompose(S: RationalMatrix, protected: frozenset, fresh: _Fresh, tol: float):
    found = _hypersimplex_roles(S)
    if found is not None:
        n, k, roles = found
        return _Leaf(n, k, {S.row_labels[i]: roles[i] for i in range(S.m)})
    if S.m < 4:
        return None
    atoms = irreducible_partition(S, tol=tol)
    if len(atoms) > 1:
        parts = []
        for atom in atoms:
            rows = sorted(atom)
            F = _dedupe(S.submatrix(rows))
            sub = _decompose(F, protected, fresh, tol)
            if sub is None:
                return None
            parts.append(sub)
        return _Sum("one_sum", parts)
    for x in range(S.m):
        if S.row_labels[x] in protected:
            continue
        xc = _complement_index(S, x)
        if xc is None:
            continue
        keep = [i for i in range(S.m) if i != xc]
        reduced = S.submatrix(keep)
        pos = keep.index(x)
        tree = recognize_kproduct(reduced, 2, tuples=[(pos,)], tol=tol)
        if tree is None:
            continue
        S1, S2 = tree.left.matrix, tree.right.matrix
        s1 = S1.m - 1
        s2 = S2.m - 1
        copy_label = fresh()
        labels2 = list(S2.row_labels)
        labels2[s2] = copy_label
        S2 = S2.relabeled(labels2)
        S1 = _dedupe(S1.append_row([1 - v for v in S1.rows[s1]], fresh()))
        S2 = _dedupe(S2.append_row([1 - v for v in S2.rows[s2]], fresh()))
        xl = S.row_labels[x]
        guard1 = protected | {xl, S1.row_labels[-1]}
        guard2 = protected | {copy_label, S2.row_labels[-1]}
        left = _decompose(S1, guard1, fresh, tol)
        if left is None:
            continue
        right = _decompose(S2, guard2, fresh, tol)
        if right is None:
            continue
        return _Sum("two_sum", [left, right], xl, copy_label)
    return None


def _leaves(node) -> list[_Leaf]:
    if isinstance(node, _Leaf):
        return [node]
    return [leaf for c in node.children for leaf in _leaves(c)]


def _edges(node, out: list) -> list:
    if isinstance(node, _Sum):
        for c in node.children:
            _edges(c, out)
        if node.kind == "two_sum":
            out.append(node)
    return out


def _owner(leaves: list[_Leaf], label) -> tuple[_Leaf, tuple[int, int]]:
    for leaf in leaves:
        if label in leaf.roles:
            return leaf, leaf.roles[label][0]
    raise KeyError(label)


def _assemble(node) -> MatroidSumTree:
    leaves = _leaves(node)
    for i, leaf in enumerate(leaves):
        leaf.ident = i
    edges = _edges(node, [])

    # 2-colour the leaves: along every 2-sum the two copies of p must play
    # opposite roles once dual flags are applied.
    adj: dict[int, list[tuple[int, int]]] = {i: [] for i in range(len(leaves))}
    glue = []
    for e in edges:
        la, (ea, ta) = _owner(leaves, e.left_label)
        lb, (eb, tb) = _owner(leaves, e.right_label)
        parity = 1 ^ ta ^ tb
        adj[la.ident].append((lb.ident, parity))
        adj[lb.ident].append((la.ident, parity))
        glue.append(((la.ident, ea), (lb.ident, eb)))
    colour: dict[int, int] = {}
    for root in range(len(leaves)):
        if root in colour:
            continue
        colour[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v, parity in adj[u]:
                want = colour[u] ^ parity
                if v not in colour:
                    colour[v] = want
                    queue.append(v)
                elif colour[v] != want:
                    raise ValueError("incoherent special rows")
    for leaf in leaves:
        leaf.dual = bool(colour[leaf.ident])

    # merge the two copies of each shared element, then name everything
    parent = {(l.ident, e): (l.ident, e) for l in leaves for e in range(l.n)}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in glue:
        parent[find(a)] = find(b)
    shared_roots = [find(a) for a, _ in glue]
    names: dict = {}
    for leaf in leaves:
        for e in range(leaf.n):
            r = find((leaf.ident, e))
            if r not in names and r not in shared_roots:
                names[r] = len(names)
    for r in shared_roots:
        names.setdefault(r, len(names))
    edge_names = iter(names[r] for r in shared_roots)
    edge_of = {id(e): next(edge_names) for e in edges}

    def build(nd) -> MatroidSumTree:
        if isinstance(nd, _Leaf):
            elements = [names[find((nd.ident, e))] for e in range(nd.n)]
            return MatroidSumTree.uniform(nd.n, nd.k, elements, nd.dual)
        parts = [build(c) for c in nd.children]
        if nd.kind == "two_sum":
            return MatroidSumTree.two_sum(parts[0], parts[1], edge_of[id(nd)])
        out = parts[0]
        for p in parts[1:]:
            out = MatroidSumTree.one_sum(out, p)
        return out

    return build(node)


def recognize_matroid_slack(S: RationalMatrix, tol: float = DEFAULT_TOL) -> MatroidSumTree | None:
    """Recover a sum tree ``M`` whose base polytope has slack matrix ``S``.

    Returns None when ``S`` is not such a slack matrix. Duality is only
    determined per connected component; each component is returned with its
    first leaf undualized.
    """
    if not S.is_binary():
        raise ValueError("matroid slack matrices are 0/1")
    if S.m == 0 or S.n == 0:
        return None
    R, _, removed_cols = make_nonredundant(S)
    if rank(R) != rank(S) or len(set(S.columns())) != R.n:
        return None
    fresh = _Fresh()
    C = _close(R.relabeled(list(range(R.m))), fresh)
    node = _decompose(C, frozenset(), fresh, tol)
    if node is None:
        return None
    try:
        tree = _assemble(node)
    except (ValueError, KeyError):
        return None
    if is_isomorphic(base_polytope_slack(tree), R) is None:
        return None
    return tree
