"""Recognising 1-products and k-products through mutual information.

For a matrix ``S`` let ``C`` be a uniformly random column. The set function
``f(X) = I(C_X; C_Xbar)`` is symmetric and submodular, and vanishes exactly on
the row bipartitions with respect to which ``S`` is a 1-product. We minimise it
with Queyranne's pendant-pair algorithm in floating point and confirm every
candidate cut with an exact counting test before trusting it.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .matrix_core import RationalMatrix, format_fraction, parse_token
from .products import find_special_tuples, is_special_tuple, k_product, split_blocks

DEFAULT_TOL = 1e-9
MAX_BIPARTITION_TRIES = 4096
NEAR_ZERO = 1e-6
EXHAUSTIVE_ROWS = 12


# ---------------------------------------------------------------------------
# exact and floating-point mutual information
# ---------------------------------------------------------------------------


def _proper(S: RationalMatrix, X: Iterable[int]) -> tuple[list[int], list[int]]:
    X = sorted(set(X))
    if not X or len(X) >= S.m or X[0] < 0 or X[-1] >= S.m:
        raise ValueError("X must be a nonempty proper subset of the rows")
    Xs = set(X)
    return X, [i for i in range(S.m) if i not in Xs]


def _restrict(rows: Sequence[Sequence], idx: Sequence[int], n: int) -> list[tuple]:
    if not idx:
        return [()] * n
    return list(zip(*(rows[i] for i in idx)))


def _independent(cols_a: list[tuple], cols_b: list[tuple]) -> bool:
    n = len(cols_a)
    mu_a, mu_b = Counter(cols_a), Counter(cols_b)
    joint = Counter(zip(cols_a, cols_b))
    if len(joint) != len(mu_a) * len(mu_b):
        return False
    return all(n * c == mu_a[a] * mu_b[b] for (a, b), c in joint.items())


def is_independent_partition(S: RationalMatrix, X: Iterable[int]) -> bool:
    """Exact test that ``S`` is a 1-product with respect to ``X`` and its complement."""
    X, Y = _proper(S, X)
    return _independent(_restrict(S.rows, X, S.n), _restrict(S.rows, Y, S.n))


def mutual_information(S: RationalMatrix, X: Iterable[int]) -> float:
    """``I(C_X; C_Xbar)`` in bits for a uniformly random column ``C`` of ``S``."""
    X, Y = _proper(S, X)
    a, b = _restrict(S.rows, X, S.n), _restrict(S.rows, Y, S.n)
    if _independent(a, b):
        return 0.0
    n = S.n
    mu_a, mu_b = Counter(a), Counter(b)
    total = 0.0
    for (u, v), c in Counter(zip(a, b)).items():
        total += c / n * (math.log2(n * c) - math.log2(mu_a[u] * mu_b[v]))
    return max(total, 0.0)


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------


@dataclass
class SubmodularOracle:
    """A set function on ``{0, ..., ground_size-1}``.

    ``evaluate_many`` is an optional batched form used by the minimiser.
    """

    ground_size: int
    evaluate: Callable[[frozenset], float]
    evaluate_many: Callable[[list[frozenset]], np.ndarray] | None = None
    accuracy: float = DEFAULT_TOL

    def many(self, sets: list[frozenset]) -> np.ndarray:
        if self.evaluate_many is not None:
            return np.asarray(self.evaluate_many(sets), dtype=float)
        return np.array([self.evaluate(s) for s in sets], dtype=float)


_HASH_SEED = 0x6B70726F64


def _row_entropies(h: np.ndarray) -> np.ndarray:
    """Entropy (bits) of the empirical distribution in each row of ``h``."""
    q, n = h.shape
    s = np.sort(h, axis=1)
    new = np.empty((q, n), dtype=bool)
    new[:, 0] = True
    np.not_equal(s[:, 1:], s[:, :-1], out=new[:, 1:])
    starts = np.flatnonzero(new)
    lengths = np.diff(starts, append=q * n).astype(float)
    clogc = np.bincount(starts // n, weights=lengths * np.log2(lengths), minlength=q)
    return np.log2(n) - clogc / n


def _value_codes(S: RationalMatrix, rows: Sequence[int], cols: Sequence[int] | None = None) -> np.ndarray:
    """Entries of the submatrix replaced by small per-row integer codes."""
    cols = range(S.n) if cols is None else cols
    out = np.empty((len(rows), len(cols)), dtype=np.int64)
    for e, i in enumerate(rows):
        codes: dict = {}
        r = S.rows[i]
        out[e] = [codes.setdefault(r[j], len(codes)) for j in cols]
    return out


class _HashedMatrix:
    """Columns hashed additively over rows: a set of rows maps to one 64-bit
    hash per column, so grouping equal restricted columns is a sort."""

    def __init__(self, codes: np.ndarray, rng):
        g, self.n = codes.shape
        weights = rng.integers(0, 2**64, size=(g, int(codes.max(initial=0)) + 1), dtype=np.uint64)
        self.table = np.take_along_axis(weights, codes, axis=1)
        self.total = self.table.sum(axis=0, dtype=np.uint64)
        self.h_all = float(_row_entropies(self.total[None, :])[0])

    def values(self, masks: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore"):
            hx = masks.astype(np.uint64) @ self.table
            hy = self.total[None, :] - hx
        q = len(masks)
        both = _row_entropies(np.concatenate((hx, hy)))
        return both[:q] + both[q:] - self.h_all


def _coded_oracle(code_blocks: Sequence[np.ndarray], tol: float) -> SubmodularOracle:
    rng = np.random.default_rng(_HASH_SEED)
    hashed = [_HashedMatrix(c, rng) for c in code_blocks]
    g = code_blocks[0].shape[0]

    def many(sets: list[frozenset]) -> np.ndarray:
        masks = np.zeros((len(sets), g), dtype=np.uint8)
        for r, s in enumerate(sets):
            masks[r, list(s)] = 1
        out = np.zeros(len(sets))
        for h in hashed:
            out += h.values(masks)
        return np.maximum(out, 0.0)

    return SubmodularOracle(g, lambda s: float(many([frozenset(s)])[0]), many, tol)


def mutual_information_oracle(
    matrices: Sequence[RationalMatrix] | RationalMatrix,
    rows: Sequence[int] | None = None,
    tol: float = DEFAULT_TOL,
) -> SubmodularOracle:
    """Oracle for ``sum_i I(C^i_X; C^i_Xbar)`` over the given matrices.

    All matrices must share the same row set; ``rows`` selects the rows that
    form the ground set (element ``e`` is row ``rows[e]``).
    """
    if isinstance(matrices, RationalMatrix):
        matrices = [matrices]
    rows = list(range(matrices[0].m)) if rows is None else list(rows)
    return _coded_oracle([_value_codes(M, rows) for M in matrices], tol)


# ---------------------------------------------------------------------------
# Queyranne
# ---------------------------------------------------------------------------


def pendant_pair_cuts(f: SubmodularOracle) -> list[tuple[frozenset, float]]:
    """Candidate cuts from Queyranne's algorithm, one per contraction round.

    Each round orders the (contracted) ground set greedily by
    ``f(W + u) - f(u)``, records the last element ``t`` as a cut and merges it
    with its predecessor. The minimum over the ``m-1`` recorded cuts is the
    minimum of ``f`` over proper nonempty subsets.
    """
    if f.ground_size < 2:
        raise ValueError("ground set must have at least two elements")
    groups = [frozenset([e]) for e in range(f.ground_size)]
    cuts = []
    while len(groups) > 1:
        singles = f.many(groups)
        order = [0]
        W = set(groups[0])
        remaining = list(range(1, len(groups)))
        while remaining:
            vals = f.many([frozenset(W | groups[i]) for i in remaining])
            keys = vals - singles[remaining]
            pos = int(np.argmin(keys))
            chosen = remaining.pop(pos)
            order.append(chosen)
            W |= groups[chosen]
        s, t = order[-2], order[-1]
        cuts.append((groups[t], float(singles[t])))
        merged = groups[s] | groups[t]
        groups = [g for i, g in enumerate(groups) if i not in (s, t)] + [merged]
    return cuts


def queyranne_min(f: SubmodularOracle) -> tuple[frozenset, float]:
    """A proper nonempty subset minimising a symmetric submodular ``f``."""
    cuts = pendant_pair_cuts(f)
    return min(cuts, key=lambda c: c[1])


# ---------------------------------------------------------------------------
# factor reconstruction
# ---------------------------------------------------------------------------


def _split_counts(cols_x: list[tuple], cols_y: list[tuple]) -> tuple[dict, dict]:
    """Integer multiplicities ``alpha, beta`` with ``alpha[a] * beta[b] = mu(a, b)``."""
    n = len(cols_x)
    mu_x, mu_y = Counter(cols_x), Counter(cols_y)
    g = math.gcd(*mu_x.values())
    alpha = {a: c // g for a, c in mu_x.items()}
    beta = {}
    for b, c in mu_y.items():
        if (c * g) % n:
            raise ArithmeticError("column multiplicities do not split into integers")
        beta[b] = c * g // n
    return alpha, beta


@dataclass
class FactorizationTree:
    """A leaf matrix or a k-product of two subtrees.

    For a product node, ``row_perm`` and ``col_perm`` map the product of the
    children back onto the original matrix: row ``i`` of the product is row
    ``row_perm[i]`` of the original, column ``j`` is column ``col_perm[j]``.
    """

    kind: str
    matrix: RationalMatrix | None = None
    k: int = 1
    left: "FactorizationTree | None" = None
    right: "FactorizationTree | None" = None
    special_left: tuple = ()
    special_right: tuple = ()
    row_perm: list[int] = field(default_factory=list)
    col_perm: list[int] = field(default_factory=list)
    special_rows: tuple = ()  # special row indices in the original matrix
    left_rows: tuple = ()  # non-special original rows carried by the left factor
    right_rows: tuple = ()

    @classmethod
    def leaf(cls, M: RationalMatrix) -> "FactorizationTree":
        return cls("leaf", matrix=M)

    @property
    def factors(self) -> tuple[RationalMatrix, RationalMatrix]:
        return self.left.product_matrix(), self.right.product_matrix()

    def product_matrix(self) -> RationalMatrix:
        """The k-product of the children, in canonical product order."""
        if self.kind == "leaf":
            return self.matrix
        return k_product(self.left.reconstruct(), self.special_left, self.right.reconstruct(), self.special_right)

    def reconstruct(self) -> RationalMatrix:
        """Re-expand the tree and undo the stored permutations."""
        if self.kind == "leaf":
            return self.matrix
        P = self.product_matrix()
        inv_r = [0] * P.m
        inv_c = [0] * P.n
        for i, r in enumerate(self.row_perm):
            inv_r[r] = i
        for j, c in enumerate(self.col_perm):
            inv_c[c] = j
        return P.permuted(inv_r, inv_c)

    def to_json(self) -> dict:
        nodes = []

        def visit(node) -> int:
            if node.kind == "leaf":
                M = node.matrix
                nodes.append(
                    {
                        "id": len(nodes),
                        "kind": "leaf",
                        "rows": [[format_fraction(x) for x in r] for r in M.rows],
                        "row_labels": [str(x) for x in M.row_labels],
                    }
                )
                return len(nodes) - 1
            left, right = visit(node.left), visit(node.right)
            nodes.append(
                {
                    "id": len(nodes),
                    "kind": "product",
                    "k": node.k,
                    "left": left,
                    "right": right,
                    "special_left": list(node.special_left),
                    "special_right": list(node.special_right),
                    "special_rows": list(node.special_rows),
                    "row_perm": list(node.row_perm),
                    "col_perm": list(node.col_perm),
                }
            )
            return len(nodes) - 1

        root = visit(self)
        return {"schema_version": 1, "root": root, "nodes": nodes}

    @classmethod
    def from_json(cls, doc: dict) -> "FactorizationTree":
        nodes = doc["nodes"]

        def build(i):
            nd = nodes[i]
            if nd["kind"] == "leaf":
                return cls.leaf(RationalMatrix([[parse_token(x) for x in r] for r in nd["rows"]]))
            return cls(
                "product",
                k=nd["k"],
                left=build(nd["left"]),
                right=build(nd["right"]),
                special_left=tuple(nd["special_left"]),
                special_right=tuple(nd["special_right"]),
                special_rows=tuple(nd.get("special_rows", ())),
                row_perm=list(nd["row_perm"]),
                col_perm=list(nd["col_perm"]),
            )

        return build(doc["root"])


def _factor_sizes(S, special, block_cols, X, Y) -> tuple[int, int]:
    n1 = n2 = 0
    for cols in block_cols:
        alpha, beta = _split_counts(_restrict_cols(S, X, cols), _restrict_cols(S, Y, cols))
        n1 += sum(alpha.values())
        n2 += sum(beta.values())
    return n1, n2


def _restrict_cols(S: RationalMatrix, rows: Sequence[int], cols: Sequence[int]) -> list[tuple]:
    return [tuple(S.rows[i][j] for i in rows) for j in cols]


def _build_product(S: RationalMatrix, special: tuple, block_cols, X: Sequence[int], Y: Sequence[int]) -> FactorizationTree:
    """Assemble factors for the bipartition ``X | Y`` of the non-special rows."""
    k = len(special) + 1
    X, Y = list(X), list(Y)
    f1_cols, f2_cols = [], []
    col_perm = []
    for blk, cols in enumerate(block_cols):
        cx = _restrict_cols(S, X, cols)
        cy = _restrict_cols(S, Y, cols)
        alpha, beta = _split_counts(cx, cy)
        pattern = tuple(int(s == blk) for s in range(1, k))
        a_list = [a for a in alpha for _ in range(alpha[a])]
        b_list = [b for b in beta for _ in range(beta[b])]
        f1_cols.extend(a + pattern for a in a_list)
        f2_cols.extend(b + pattern for b in b_list)
        pool: dict[tuple, list[int]] = {}
        for j, a, b in zip(cols, cx, cy):
            pool.setdefault((a, b), []).append(j)
        for a in a_list:
            for b in b_list:
                col_perm.append(pool[(a, b)].pop())
    special_labels = [S.row_labels[i] for i in special]
    S1 = RationalMatrix.from_columns(f1_cols, [S.row_labels[i] for i in X] + special_labels)
    right_special = [("copy", lab) for lab in special_labels]
    S2 = RationalMatrix.from_columns(f2_cols, [S.row_labels[i] for i in Y] + right_special)
    t1 = tuple(range(len(X), len(X) + k - 1))
    t2 = tuple(range(len(Y), len(Y) + k - 1))
    return FactorizationTree(
        "product",
        k=k,
        left=FactorizationTree.leaf(S1),
        right=FactorizationTree.leaf(S2),
        special_left=t1,
        special_right=t2,
        row_perm=X + Y + list(special),
        col_perm=col_perm,
        special_rows=tuple(special),
        left_rows=tuple(X),
        right_rows=tuple(Y),
    )


# ---------------------------------------------------------------------------
# 1-products and irreducible partitions
# ---------------------------------------------------------------------------


def _zero_cut(S: RationalMatrix, rows: Sequence[int], cols: Sequence[int] | None, tol: float) -> list[int] | None:
    """A subset X of ``rows`` confirmed exactly to split the restricted matrix, or None."""
    rows = list(rows)
    codes = _value_codes(S, rows, cols)
    # constant rows split off without any search
    for e in range(len(rows)):
        if (codes[e] == 0).all():
            return [rows[e]]
    as_tuples = [tuple(r) for r in codes.tolist()]

    def exact(X: frozenset) -> bool:
        A = [as_tuples[e] for e in sorted(X)]
        B = [as_tuples[e] for e in range(len(rows)) if e not in X]
        return _independent(list(zip(*A)), list(zip(*B)))

    oracle = _coded_oracle([codes], tol)
    if len(rows) <= EXHAUSTIVE_ROWS:
        # one batch over every bipartition beats the many small batches of
        # the pendant-pair loop at this size
        rest = range(1, len(rows))
        sets = [frozenset((0,) + c) for r in range(len(rows) - 1) for c in itertools.combinations(rest, r)]
        cuts = list(zip(sets, oracle.many(sets).tolist()))
    else:
        cuts = pendant_pair_cuts(oracle)
    ranked = sorted(range(len(cuts)), key=lambda c: cuts[c][1])
    # A true zero evaluates to within rounding error of 0; the second pass
    # only guards against a hash collision nudging it above ``tol``.
    for limit in (tol, max(tol, NEAR_ZERO)):
        for c in ranked:
            X, value = cuts[c]
            if value < limit and exact(X):
                return [rows[e] for e in sorted(X)]
    return None


def _atoms(S: RationalMatrix, rows: list[int], cols, tol: float) -> list[list[int]]:
    if len(rows) == 1:
        return [rows]
    X = _zero_cut(S, rows, cols, tol)
    if X is None:
        return [rows]
    Xs = set(X)
    Y = [i for i in rows if i not in Xs]
    return _atoms(S, X, cols, tol) + _atoms(S, Y, cols, tol)


def irreducible_partition(
    S: RationalMatrix, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None, tol: float = DEFAULT_TOL
) -> list[frozenset]:
    """The finest row partition with respect to which ``S`` splits as a 1-product.

    Blocks are returned sorted by their smallest row index. ``rows`` and
    ``cols`` restrict attention to a submatrix (its marginal distribution).
    """
    rows = list(range(S.m)) if rows is None else sorted(rows)
    blocks = _atoms(S, rows, cols, tol)
    return sorted((frozenset(b) for b in blocks), key=min)


def recognize_1product(S: RationalMatrix, tol: float = DEFAULT_TOL) -> FactorizationTree | None:
    """Find ``S1, S2`` with ``S`` isomorphic to ``S1 (x) S2``, or None if ``S`` is irreducible."""
    if S.m < 2:
        return None
    X = _zero_cut(S, range(S.m), None, tol)
    if X is None:
        return None
    Xs = set(X)
    Y = [i for i in range(S.m) if i not in Xs]
    return _build_product(S, (), [list(range(S.n))], X, Y)


def factorize(S: RationalMatrix, tol: float = DEFAULT_TOL) -> tuple[list[frozenset], list[RationalMatrix]]:
    """Irreducible blocks and the factor on each block (distinct restricted columns)."""
    blocks = irreducible_partition(S, tol=tol)
    factors = []
    for b in blocks:
        rows = sorted(b)
        cols = list(dict.fromkeys(_restrict_cols(S, rows, range(S.n))))
        factors.append(RationalMatrix.from_columns(cols, [S.row_labels[i] for i in rows]))
    return blocks, factors


# ---------------------------------------------------------------------------
# k-products
# ---------------------------------------------------------------------------


def _components(universe: Sequence[int], partitions: Iterable[list[frozenset]]) -> list[list[int]]:
    parent = {x: x for x in universe}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for part in partitions:
        for block in part:
            it = iter(block)
            first = find(next(it))
            for x in it:
                r = find(x)
                if r != first:
                    parent[r] = first
    comps: dict[int, list[int]] = {}
    for x in universe:
        comps.setdefault(find(x), []).append(x)
    return sorted(comps.values(), key=min)


def _bipartitions(comps: list[list[int]]):
    """Bipartitions ``X | Y`` of the components, X holding the first component."""
    rest = comps[1:]
    tried = 0
    for size in range(0, len(rest)):
        for extra in itertools.combinations(range(len(rest)), size):
            X = sorted(comps[0] + [x for e in extra for x in rest[e]])
            Xs = set(X)
            Y = sorted(x for c in rest for x in c if x not in Xs)
            yield X, Y
            tried += 1
            if tried >= MAX_BIPARTITION_TRIES:
                return


def _try_tuple(S: RationalMatrix, t: tuple, tol: float) -> FactorizationTree | None:
    split = split_blocks(S, t)
    rows = list(split.rows)
    if len(rows) < 2:
        return None
    partitions = []
    for cols in split.columns:
        part = irreducible_partition(S, rows, cols, tol)
        if len(part) < 2:
            return None
        partitions.append(part)
    comps = _components(rows, partitions)
    if len(comps) < 2:
        return None
    for X, Y in _bipartitions(comps):
        n1, n2 = _factor_sizes(S, t, split.columns, X, Y)
        if n1 >= S.n or n2 >= S.n:
            continue
        tree = _build_product(S, t, split.columns, X, Y)
        if tree.reconstruct() == S:
            return tree
    return None


def recognize_kproduct(
    S: RationalMatrix,
    k: int,
    tuples: Sequence[tuple] | None = None,
    tol: float = DEFAULT_TOL,
) -> FactorizationTree | None:
    """Decompose ``S`` as a k-product of two smaller matrices, or return None.

    Special-row tuples are tried in lexicographic order (``tuples`` restricts
    the candidates) and the first one that yields a decomposition wins. The
    running time grows like ``m^(k+3) (m + n)``.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if k == 1:
        return recognize_1product(S, tol)
    candidates = find_special_tuples(S, k) if tuples is None else sorted(tuple(t) for t in tuples)
    for t in candidates:
        if len(t) != k - 1 or not is_special_tuple(S, t):
            continue
        tree = _try_tuple(S, t, tol)
        if tree is not None:
            return tree
    return None
