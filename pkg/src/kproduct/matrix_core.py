"""Exact rational matrices, column distributions and matrix isomorphism."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Sequence


class MatrixFormatError(ValueError):
    """Raised when a matrix file cannot be parsed."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


def to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite entry {value!r}")
        return Fraction(value).limit_denominator()
    return Fraction(value)


class RationalMatrix:
    """Dense matrix of :class:`fractions.Fraction` with row and column labels.

    Instances are immutable. Labels are arbitrary hashable objects that must be
    unique within their axis; they default to ``0..m-1`` and ``0..n-1``.
    """

    __slots__ = ("_rows", "row_labels", "col_labels", "_hash")

    def __init__(
        self,
        rows: Iterable[Iterable],
        row_labels: Sequence[Hashable] | None = None,
        col_labels: Sequence[Hashable] | None = None,
    ):
        data = tuple(tuple(to_fraction(x) for x in row) for row in rows)
        if not data or not data[0]:
            raise ValueError("matrix must have at least one row and one column")
        n = len(data[0])
        if any(len(r) != n for r in data):
            raise ValueError("ragged rows")
        self._rows = data
        self.row_labels = tuple(range(len(data))) if row_labels is None else tuple(row_labels)
        self.col_labels = tuple(range(n)) if col_labels is None else tuple(col_labels)
        if len(self.row_labels) != len(data) or len(set(self.row_labels)) != len(data):
            raise ValueError("row labels must be unique and match the row count")
        if len(self.col_labels) != n or len(set(self.col_labels)) != n:
            raise ValueError("column labels must be unique and match the column count")
        self._hash = None

    # -- construction -------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], row_labels=None, col_labels=None) -> "RationalMatrix":
        if not columns:
            raise ValueError("need at least one column")
        m = len(columns[0])
        return cls([[c[i] for c in columns] for i in range(m)], row_labels, col_labels)

    # -- basic access -------------------------------------------------------

    @property
    def m(self) -> int:
        return len(self._rows)

    @property
    def n(self) -> int:
        return len(self._rows[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.m, self.n

    @property
    def rows(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._rows

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self._rows[i]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self._rows)

    def columns(self) -> list[tuple[Fraction, ...]]:
        return list(zip(*self._rows))

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    def __eq__(self, other) -> bool:
        """Entrywise equality; labels are ignored."""
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self._rows == other._rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._rows)
        return self._hash

    def __repr__(self) -> str:
        return f"RationalMatrix({self.m}x{self.n})"

    def __str__(self) -> str:
        return format_matrix(self)

    def is_binary(self) -> bool:
        return all(x == 0 or x == 1 for r in self._rows for x in r)

    def is_nonnegative(self) -> bool:
        return all(x >= 0 for r in self._rows for x in r)

    def row_index(self, label) -> int:
        return self.row_labels.index(label)

    # -- derived matrices ---------------------------------------------------

    def submatrix(self, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None) -> "RationalMatrix":
        rows = range(self.m) if rows is None else list(rows)
        cols = range(self.n) if cols is None else list(cols)
        data = [[self._rows[i][j] for j in cols] for i in rows]
        return RationalMatrix(
            data,
            [self.row_labels[i] for i in rows],
            [self.col_labels[j] for j in cols],
        )

    def permuted(self, row_perm: Sequence[int], col_perm: Sequence[int]) -> "RationalMatrix":
        """Matrix whose row ``i`` is this matrix's row ``row_perm[i]`` (same for columns)."""
        if sorted(row_perm) != list(range(self.m)) or sorted(col_perm) != list(range(self.n)):
            raise ValueError("not a permutation")
        return self.submatrix(row_perm, col_perm)

    def append_row(self, values: Sequence, label=None) -> "RationalMatrix":
        if len(values) != self.n:
            raise ValueError("row length mismatch")
        if label is None:
            label = _fresh_label(self.row_labels)
        return RationalMatrix(self._rows + (tuple(values),), self.row_labels + (label,), self.col_labels)

    def relabeled(self, row_labels=None, col_labels=None) -> "RationalMatrix":
        return RationalMatrix(
            self._rows,
            self.row_labels if row_labels is None else row_labels,
            self.col_labels if col_labels is None else col_labels,
        )

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(list(zip(*self._rows)), self.col_labels, self.row_labels)


def _fresh_label(existing: Sequence[Hashable]):
    ints = [x for x in existing if isinstance(x, int) and not isinstance(x, bool)]
    candidate = max(ints, default=-1) + 1
    taken = set(existing)
    while candidate in taken:
        candidate += 1
    return candidate


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------


def format_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_token(token: str) -> Fraction:
    if "/" in token:
        p, q = token.split("/", 1)
        p, q = int(p), int(q)
        if q <= 0:
            raise ValueError("denominator must be positive")
        return Fraction(p, q)
    return Fraction(int(token))


def parse_matrix(text: str) -> RationalMatrix:
    """Parse the ``m n`` header plus ``m`` rows format. Lines starting with '#' are skipped."""
    lines = [(no, ln) for no, ln in enumerate(text.splitlines(), 1) if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise MatrixFormatError("empty input")
    no, header = lines[0]
    parts = header.split()
    if len(parts) != 2:
        raise MatrixFormatError("header must be 'm n'", no, 1)
    try:
        m, n = int(parts[0]), int(parts[1])
    except ValueError:
        raise MatrixFormatError("header must contain two integers", no, 1) from None
    if m < 1 or n < 1:
        raise MatrixFormatError("dimensions must be positive", no, 1)
    body = lines[1:]
    if len(body) != m:
        raise MatrixFormatError(f"expected {m} rows, found {len(body)}", body[-1][0] if body else no)
    rows = []
    for no, ln in body:
        tokens = ln.split()
        if len(tokens) != n:
            raise MatrixFormatError(f"expected {n} entries, found {len(tokens)}", no)
        row = []
        col = 1
        for tok in tokens:
            col = ln.index(tok, col - 1) + 1
            try:
                row.append(parse_token(tok))
            except (ValueError, ZeroDivisionError):
                raise MatrixFormatError(f"bad entry {tok!r}", no, col) from None
            col += len(tok)
        rows.append(row)
    return RationalMatrix(rows)


def format_matrix(S: RationalMatrix) -> str:
    out = [f"{S.m} {S.n}"]
    out.extend(" ".join(format_fraction(x) for x in row) for row in S.rows)
    return "\n".join(out) + "\n"


def read_matrix(path) -> RationalMatrix:
    with open(path) as fh:
        return parse_matrix(fh.read())


def write_matrix(S: RationalMatrix, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_matrix(S))


# ---------------------------------------------------------------------------
# rank
# ---------------------------------------------------------------------------


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    out = []
    for r in rows:
        den = 1
        for x in r:
            den = den * x.denominator // math.gcd(den, x.denominator)
        out.append([int(x * den) for x in r])
    return out


def rank(S: RationalMatrix | Sequence[Sequence]) -> int:
    """Exact rank by fraction-free (Bareiss) elimination."""
    rows = S.rows if isinstance(S, RationalMatrix) else [[to_fraction(x) for x in r] for r in S]
    a = _integer_rows(rows)
    if not a:
        return 0
    m, n = len(a), len(a[0])
    r = 0
    prev = 1
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        for i in range(r + 1, m):
            aic = a[i][c]
            row_i, row_r = a[i], a[r]
            for j in range(c + 1, n):
                row_i[j] = (p * row_i[j] - aic * row_r[j]) // prev
            row_i[c] = 0
        prev = p
        r += 1
        if r == m:
            break
    return r


# ---------------------------------------------------------------------------
# column distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ColumnDistribution:
    """Distinct columns (restricted to some rows) with their occurrence counts."""

    support: tuple[tuple[Fraction, ...], ...]
    counts: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.counts)

    def as_dict(self) -> dict:
        return dict(zip(self.support, self.counts))

    def probability(self, c) -> Fraction:
        return Fraction(self.as_dict().get(tuple(c), 0), self.total)


def _check_rowset(S: RationalMatrix, X: Iterable[int]) -> list[int]:
    X = sorted(set(X))
    if not X:
        raise ValueError("row set must be nonempty")
    if X[0] < 0 or X[-1] >= S.m:
        raise ValueError("row index out of range")
    return X


def restricted_columns(S: RationalMatrix, X: Sequence[int]) -> list[tuple[Fraction, ...]]:
    rows = [S.rows[i] for i in X]
    return list(zip(*rows)) if rows else [()] * S.n


def column_multiset(S: RationalMatrix, X: Iterable[int]) -> ColumnDistribution:
    """Distribution of the columns of ``S`` restricted to rows ``X``, in first-seen order."""
    X = _check_rowset(S, X)
    counts = Counter(restricted_columns(S, X))
    return ColumnDistribution(tuple(counts), tuple(counts.values()))


def complement(S: RationalMatrix, X: Iterable[int]) -> list[int]:
    Xs = set(X)
    return [i for i in range(S.m) if i not in Xs]


# ---------------------------------------------------------------------------
# isomorphism
# ---------------------------------------------------------------------------


def _refine(S, T, rc_s, cc_s, rc_t, cc_t):
    """Jointly refine row/column colourings of S and T to equitable partitions.

    Returns the refined colourings or None if the colour multisets diverge.
    """
    while True:
        n_before = len(set(rc_s)) + len(set(cc_s))
        sig_rs = [(rc_s[i], tuple(sorted(Counter(zip(S.rows[i], cc_s)).items()))) for i in range(S.m)]
        sig_rt = [(rc_t[i], tuple(sorted(Counter(zip(T.rows[i], cc_t)).items()))) for i in range(T.m)]
        if Counter(sig_rs) != Counter(sig_rt):
            return None
        ids = {s: k for k, s in enumerate(sorted(set(sig_rs)))}
        rc_s = [ids[s] for s in sig_rs]
        rc_t = [ids[s] for s in sig_rt]
        cols_s, cols_t = S.columns(), T.columns()
        sig_cs = [(cc_s[j], tuple(sorted(Counter(zip(cols_s[j], rc_s)).items()))) for j in range(S.n)]
        sig_ct = [(cc_t[j], tuple(sorted(Counter(zip(cols_t[j], rc_t)).items()))) for j in range(T.n)]
        if Counter(sig_cs) != Counter(sig_ct):
            return None
        ids = {s: k for k, s in enumerate(sorted(set(sig_cs)))}
        cc_s = [ids[s] for s in sig_cs]
        cc_t = [ids[s] for s in sig_ct]
        if len(set(rc_s)) + len(set(cc_s)) == n_before:
            return rc_s, cc_s, rc_t, cc_t


def _search(S, T, rc_s, cc_s, rc_t, cc_t):
    refined = _refine(S, T, rc_s, cc_s, rc_t, cc_t)
    if refined is None:
        return None
    rc_s, cc_s, rc_t, cc_t = refined
    # pick the smallest non-singleton cell among rows and columns
    best = None
    for axis, colours in (("r", rc_s), ("c", cc_s)):
        sizes = Counter(colours)
        for colour, size in sizes.items():
            if size > 1 and (best is None or size < best[2]):
                best = (axis, colour, size)
    if best is None:
        rp = {c: i for i, c in enumerate(rc_s)}
        cp = {c: j for j, c in enumerate(cc_s)}
        row_perm = [rp[c] for c in rc_t]
        col_perm = [cp[c] for c in cc_t]
        for i in range(T.m):
            srow = S.rows[row_perm[i]]
            if any(T.rows[i][j] != srow[col_perm[j]] for j in range(T.n)):
                return None
        return row_perm, col_perm
    axis, colour, _ = best
    fresh = max(max(rc_s), max(cc_s)) + 1
    if axis == "r":
        x = rc_s.index(colour)
        new_s = list(rc_s)
        new_s[x] = fresh
        for y in (i for i, c in enumerate(rc_t) if c == colour):
            new_t = list(rc_t)
            new_t[y] = fresh
            found = _search(S, T, new_s, cc_s, new_t, cc_t)
            if found:
                return found
    else:
        x = cc_s.index(colour)
        new_s = list(cc_s)
        new_s[x] = fresh
        for y in (j for j, c in enumerate(cc_t) if c == colour):
            new_t = list(cc_t)
            new_t[y] = fresh
            found = _search(S, T, rc_s, new_s, rc_t, new_t)
            if found:
                return found
    return None


def is_isomorphic(S: RationalMatrix, T: RationalMatrix) -> tuple[list[int], list[int]] | None:
    """Find permutations with ``T[i][j] == S[row_perm[i]][col_perm[j]]``.

    Uses colour refinement on the row/column incidence structure followed by
    backtracking over ambiguous cells. Exponential in the worst case.
    """
    if S.shape != T.shape:
        return None
    if Counter(x for r in S.rows for x in r) != Counter(x for r in T.rows for x in r):
        return None
    return _search(S, T, [0] * S.m, [0] * S.n, [0] * T.m, [0] * T.n)


# ---------------------------------------------------------------------------
# non-redundant form
# ---------------------------------------------------------------------------


def dedupe_columns(S: RationalMatrix) -> RationalMatrix:
    seen = {}
    for j, c in enumerate(S.columns()):
        seen.setdefault(c, j)
    return S.submatrix(None, sorted(seen.values()))


def make_nonredundant(S: RationalMatrix):
    """Strip duplicate and constant rows, redundant columns and non-facet rows.

    Returns ``(matrix, removed_row_labels, removed_col_labels)``. A column is
    redundant if it lies in the convex hull of the remaining columns; a row is
    redundant if its zero set is strictly contained in another row's zero set.
    Repeats until nothing changes, so the result is a fixed point.
    """
    from .polyhedra import in_convex_hull  # circular at import time

    if not S.is_nonnegative():
        raise ValueError("make_nonredundant expects a nonnegative matrix")
    removed_rows: list = []
    removed_cols: list = []
    cur = S
    while True:
        changed = False
        # duplicate columns
        seen = set()
        keep = []
        for j, c in enumerate(cur.columns()):
            if c in seen:
                removed_cols.append(cur.col_labels[j])
            else:
                seen.add(c)
                keep.append(j)
        if len(keep) < cur.n:
            cur = cur.submatrix(None, keep)
            changed = True
        # columns in the convex hull of the others; a distinct 0/1 point is
        # never a convex combination of other 0/1 points
        if cur.n > 1 and not cur.is_binary():
            cols = cur.columns()
            j = 0
            while j < len(cols) and len(cols) > 1:
                others = cols[:j] + cols[j + 1:]
                if in_convex_hull(cols[j], RationalMatrix.from_columns(others)) is not None:
                    removed_cols.append(cur.col_labels[j])
                    cur = cur.submatrix(None, [t for t in range(cur.n) if t != j])
                    cols = cur.columns()
                    changed = True
                else:
                    j += 1
        # duplicate rows, constant rows, non-maximal zero sets
        zero_sets = [frozenset(j for j, x in enumerate(r) if x == 0) for r in cur.rows]
        keep = []
        seen_rows = set()
        for i, r in enumerate(cur.rows):
            z = zero_sets[i]
            drop = r in seen_rows or not z or len(z) == cur.n
            if not drop:
                drop = any(z < zero_sets[t] for t in range(cur.m) if len(zero_sets[t]) < cur.n)
            seen_rows.add(r)
            if drop:
                removed_rows.append(cur.row_labels[i])
            else:
                keep.append(i)
        if not keep:
            keep = [0]
            removed_rows.remove(cur.row_labels[0])
        if len(keep) < cur.m:
            cur = cur.submatrix(keep, None)
            changed = True
        if not changed:
            return cur, removed_rows, removed_cols
