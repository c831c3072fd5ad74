"""1-products, k-products and their special-row machinery."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .matrix_core import RationalMatrix

SpecialRowTuple = tuple  # ordered tuple of k-1 row indices


def _merge_labels(left: Sequence, right: Sequence, tags=(1, 2)) -> list:
    if set(left).isdisjoint(right):
        return list(left) + list(right)
    return [(tags[0], x) for x in left] + [(tags[1], x) for x in right]


def one_product(S1: RationalMatrix, S2: RationalMatrix) -> RationalMatrix:
    """Column ``(k-1)*n2 + l`` is column ``k`` of ``S1`` stacked on column ``l`` of ``S2``."""
    rows = [[x for x in r for _ in range(S2.n)] for r in S1.rows]
    rows += [list(r) * S1.n for r in S2.rows]
    col_labels = [(a, b) for a in S1.col_labels for b in S2.col_labels]
    return RationalMatrix(rows, _merge_labels(S1.row_labels, S2.row_labels), col_labels)


def column_pattern(S: RationalMatrix, t: SpecialRowTuple, j: int) -> int | None:
    """Block index of column ``j`` under special rows ``t`` (0 for the zero pattern)."""
    block = 0
    for pos, i in enumerate(t, 1):
        x = S.rows[i][j]
        if x == 1:
            if block:
                return None
            block = pos
        elif x != 0:
            return None
    return block


def is_special_tuple(S: RationalMatrix, t: SpecialRowTuple) -> bool:
    if len(set(t)) != len(t) or any(not 0 <= i < S.m for i in t):
        return False
    seen = set()
    for j in range(S.n):
        p = column_pattern(S, t, j)
        if p is None:
            return False
        seen.add(p)
    return len(seen) == len(t) + 1


def find_special_tuples(S: RationalMatrix, k: int) -> list[SpecialRowTuple]:
    """All ordered (k-1)-tuples of rows that qualify as special rows, in lexicographic order."""
    if k < 2:
        raise ValueError("k must be at least 2")
    binary = [i for i in range(S.m) if all(x == 0 or x == 1 for x in S.rows[i]) and any(x == 1 for x in S.rows[i])]
    out = []
    for t in itertools.permutations(binary, k - 1):
        if is_special_tuple(S, t):
            out.append(t)
    out.sort()
    return out


@dataclass(frozen=True)
class BlockSplit:
    """Column blocks of a matrix cut out by a special-row tuple."""

    special: SpecialRowTuple
    rows: tuple[int, ...]  # non-special row indices, in order
    columns: tuple[tuple[int, ...], ...]  # column indices per block 0..k-1
    blocks: tuple[RationalMatrix, ...]


def split_blocks(S: RationalMatrix, t: SpecialRowTuple) -> BlockSplit:
    t = tuple(t)
    groups: list[list[int]] = [[] for _ in range(len(t) + 1)]
    for j in range(S.n):
        p = column_pattern(S, t, j)
        if p is None:
            raise ValueError(f"column {j} ({S.col_labels[j]!r}) does not match any special pattern")
        groups[p].append(j)
    for b, g in enumerate(groups):
        if not g:
            raise ValueError(f"no column realises pattern {b} of the special rows")
    rows = tuple(i for i in range(S.m) if i not in t)
    if rows:
        blocks = tuple(S.submatrix(rows, g) for g in groups)
    else:
        blocks = ()
    return BlockSplit(t, rows, tuple(tuple(g) for g in groups), blocks)


def k_product(S1: RationalMatrix, t1: SpecialRowTuple, S2: RationalMatrix, t2: SpecialRowTuple) -> RationalMatrix:
    """The k-product of ``(S1, t1)`` and ``(S2, t2)`` with ``k = len(t1) + 1``.

    Columns are ordered block by block, with 1-product order inside each
    block. Rows are the non-special rows of ``S1``, then those of ``S2``,
    then ``k-1`` new special rows.
    """
    t1, t2 = tuple(t1), tuple(t2)
    if len(t1) != len(t2):
        raise ValueError("special tuples must have the same length")
    if not t1:
        return one_product(S1, S2)
    b1, b2 = split_blocks(S1, t1), split_blocks(S2, t2)
    r1, r2 = len(b1.rows), len(b2.rows)
    k = len(t1) + 1
    rows = [[] for _ in range(r1 + r2 + k - 1)]
    col_labels = []
    for blk in range(k):
        c1, c2 = b1.columns[blk], b2.columns[blk]
        for a in c1:
            for b in c2:
                for i, src in enumerate(b1.rows):
                    rows[i].append(S1.rows[src][a])
                for i, src in enumerate(b2.rows):
                    rows[r1 + i].append(S2.rows[src][b])
                for s in range(1, k):
                    rows[r1 + r2 + s - 1].append(Fraction(int(s == blk)))
                col_labels.append((S1.col_labels[a], S2.col_labels[b]))
    labels = _merge_labels([S1.row_labels[i] for i in b1.rows], [S2.row_labels[i] for i in b2.rows])
    tag = "special"
    while any((tag, s) in labels for s in range(1, k)):
        tag += "'"
    special_labels = [(tag, s) for s in range(1, k)]
    return RationalMatrix(rows, labels + special_labels, col_labels)


def augment_factor(S: RationalMatrix, t: SpecialRowTuple, label=None) -> RationalMatrix:
    """Append the row ``1 - x_1 - ... - x_{k-1}`` built from the special rows ``t``."""
    if not is_special_tuple(S, t):
        raise ValueError("invalid special tuple")
    row = [1 - sum(S.rows[i][j] for i in t) for j in range(S.n)]
    return S.append_row(row, label)


def glued_product_vertices(V1: Sequence[Sequence], V2: Sequence[Sequence], k: int) -> list[tuple[Fraction, ...]]:
    """Vertices of the simplicial glued product along the first ``k-1`` coordinates.

    Pairs ``(x, y)`` agree on the glued coordinates; the glued coordinates of
    ``y`` are dropped from the output point.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    V1 = [tuple(Fraction(x) for x in v) for v in V1]
    V2 = [tuple(Fraction(x) for x in v) for v in V2]
    g = k - 1
    bad = []
    for name, V in (("V1", V1), ("V2", V2)):
        for idx, v in enumerate(V):
            head = v[:g]
            if len(v) < g or any(x not in (0, 1) for x in head) or sum(head) > 1:
                bad.append(f"{name}[{idx}]={v}")
    if bad:
        raise ValueError("points violate the simplicial gluing precondition: " + ", ".join(bad))
    out = []
    for x in V1:
        for y in V2:
            if x[:g] == y[:g]:
                out.append(x + y[g:])
    return out
