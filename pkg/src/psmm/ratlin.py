"""Exact linear algebra over the rationals.

Everything downstream (cohomology, monomial differentials, quotient
bases) funnels through this module.  All arithmetic is exact: entries
are `fractions.Fraction`, floating point is forbidden here because
quasi-isomorphism and minimality checks are rank statements.

Two layers:

* `RatMatrix` with `rref` / `solve` / `kernel_basis` / `quotient_basis`
  -- dense, for the small systems that dominate the algebraic side.
* `ColumnReducer` -- a sparse incremental column-elimination engine for
  the large coboundary matrices of Vietoris-Rips stages.  Semantics are
  identical to the dense route; the representation is a performance
  decision only.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import DimensionMismatch

QQ = Fraction


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


class RatMatrix:
    """Immutable dense matrix of rationals in lowest terms."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows: int, cols: int, data: Sequence[Sequence]):
        if rows < 0 or cols < 0:
            raise DimensionMismatch("negative dimensions")
        if len(data) != rows or any(len(r) != cols for r in data):
            raise DimensionMismatch("data shape does not match (rows, cols)")
        self.rows = rows
        self.cols = cols
        self._data = tuple(tuple(_frac(x) for x in row) for row in data)

    # -- constructors -------------------------------------------------

    @staticmethod
    def from_rows(data: Sequence[Sequence]) -> "RatMatrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        return RatMatrix(rows, cols, data)

    @staticmethod
    def from_columns(cols: Sequence[Sequence], rows: Optional[int] = None) -> "RatMatrix":
        if not cols:
            return RatMatrix(rows or 0, 0, [[] for _ in range(rows or 0)])
        n = len(cols[0])
        data = [[cols[j][i] for j in range(len(cols))] for i in range(n)]
        return RatMatrix(n, len(cols), data)

    @staticmethod
    def zeros(rows: int, cols: int) -> "RatMatrix":
        return RatMatrix(rows, cols, [[0] * cols for _ in range(rows)])

    @staticmethod
    def identity(n: int) -> "RatMatrix":
        return RatMatrix(n, n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    # -- access -------------------------------------------------------

    def __getitem__(self, ij) -> Fraction:
        i, j = ij
        return self._data[i][j]

    def row(self, i: int) -> tuple:
        return self._data[i]

    def column(self, j: int) -> list:
        return [self._data[i][j] for i in range(self.rows)]

    def columns(self) -> list:
        return [self.column(j) for j in range(self.cols)]

    def tolist(self) -> list:
        return [list(r) for r in self._data]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RatMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self._data == other._data
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self._data))

    def __repr__(self):
        return f"RatMatrix({self.rows}x{self.cols})"

    def is_zero(self) -> bool:
        return all(x == 0 for row in self._data for x in row)

    # -- arithmetic ---------------------------------------------------

    def transpose(self) -> "RatMatrix":
        return RatMatrix(
            self.cols, self.rows,
            [[self._data[i][j] for i in range(self.rows)] for j in range(self.cols)],
        )

    def matmul(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"{self.cols} != {other.rows}")
        out = [[Fraction(0)] * other.cols for _ in range(self.rows)]
        for i in range(self.rows):
            ri = self._data[i]
            for k in range(self.cols):
                a = ri[k]
                if a == 0:
                    continue
                rk = other._data[k]
                oi = out[i]
                for j in range(other.cols):
                    if rk[j] != 0:
                        oi[j] += a * rk[j]
        return RatMatrix(self.rows, other.cols, out)

    def __matmul__(self, other):
        return self.matmul(other)

    def apply(self, vec: Sequence) -> list:
        if len(vec) != self.cols:
            raise DimensionMismatch(f"vector length {len(vec)} != {self.cols}")
        v = [_frac(x) for x in vec]
        return [sum((a * b for a, b in zip(row, v) if a != 0), Fraction(0)) for row in self._data]

    def hstack(self, other: "RatMatrix") -> "RatMatrix":
        if self.rows != other.rows:
            raise DimensionMismatch("row counts differ")
        return RatMatrix(
            self.rows, self.cols + other.cols,
            [list(self._data[i]) + list(other._data[i]) for i in range(self.rows)],
        )

    def sub(self, other: "RatMatrix") -> "RatMatrix":
        if self.rows != other.rows or self.cols != other.cols:
            raise DimensionMismatch("shape mismatch")
        return RatMatrix(
            self.rows, self.cols,
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self._data, other._data)],
        )


@dataclass(frozen=True)
class RrefResult:
    reduced: RatMatrix
    pivot_columns: tuple
    rank: int


def rref(m: RatMatrix) -> RrefResult:
    """Unique reduced row echelon form with pivot columns and rank.

    Columns are processed left to right (uniqueness); within a column
    the pivot row is the candidate with the fewest nonzeros, which keeps
    elimination cheap on the sparse incidence-style matrices that
    dominate this codebase.
    """
    a = [list(row) for row in m._data]
    nr, nc = m.rows, m.cols
    pivots = []
    r = 0
    for c in range(nc):
        if r >= nr:
            break
        best = -1
        best_nnz = None
        for i in range(r, nr):
            if a[i][c] != 0:
                nnz = sum(1 for x in a[i] if x != 0)
                if best_nnz is None or nnz < best_nnz:
                    best, best_nnz = i, nnz
        if best < 0:
            continue
        a[r], a[best] = a[best], a[r]
        piv = a[r][c]
        if piv != 1:
            a[r] = [x / piv for x in a[r]]
        for i in range(nr):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return RrefResult(RatMatrix(nr, nc, a), tuple(pivots), len(pivots))


def rank(m: RatMatrix) -> int:
    return rref(m).rank


def solve(a: RatMatrix, b: Sequence) -> Optional[list]:
    """Particular solution of a·x = b, or None when b is outside im(a).

    Deterministic: free variables are set to zero, so reruns agree
    bit for bit.
    """
    if len(b) != a.rows:
        raise DimensionMismatch(f"rhs length {len(b)} != {a.rows}")
    aug = a.hstack(RatMatrix.from_columns([list(b)], rows=a.rows))
    res = rref(aug)
    if a.cols in res.pivot_columns:
        return None
    x = [Fraction(0)] * a.cols
    for r, c in enumerate(res.pivot_columns):
        x[c] = res.reduced[r, a.cols]
    return x


def kernel_basis(a: RatMatrix) -> RatMatrix:
    """Columns spanning the null space; count = cols - rank."""
    res = rref(a)
    piv = set(res.pivot_columns)
    free = [c for c in range(a.cols) if c not in piv]
    cols = []
    for fc in free:
        v = [Fraction(0)] * a.cols
        v[fc] = Fraction(1)
        for r, pc in enumerate(res.pivot_columns):
            v[pc] = -res.reduced[r, fc]
        cols.append(v)
    return RatMatrix.from_columns(cols, rows=a.cols)


def quotient_basis(ambient_dim: int, subspace: RatMatrix, vectors: RatMatrix) -> list:
    """Indices of `vectors` columns forming a basis of span(vectors)
    modulo span(subspace).

    Greedy: a column is kept iff it enlarges the span of subspace plus
    the columns kept so far.
    """
    if subspace.cols and subspace.rows != ambient_dim:
        raise DimensionMismatch("subspace ambient dimension mismatch")
    if vectors.cols and vectors.rows != ambient_dim:
        raise DimensionMismatch("vectors ambient dimension mismatch")
    red = ColumnReducer(ambient_dim)
    for j in range(subspace.cols):
        red.add(subspace.column(j))
    kept = []
    for j in range(vectors.cols):
        if red.add(vectors.column(j)):
            kept.append(j)
    return kept


def inverse(a: RatMatrix) -> RatMatrix:
    if a.rows != a.cols:
        raise DimensionMismatch("not square")
    res = rref(a.hstack(RatMatrix.identity(a.rows)))
    if res.pivot_columns[: a.rows] != tuple(range(a.rows)):
        raise DimensionMismatch("matrix not invertible")
    data = [[res.reduced[i, a.cols + j] for j in range(a.cols)] for i in range(a.rows)]
    return RatMatrix(a.rows, a.cols, data)


# ---------------------------------------------------------------------------
# Sparse incremental eliminator
# ---------------------------------------------------------------------------


class ColumnReducer:
    """Incremental exact column elimination over the rationals.

    Columns are sparse dicts {row: Fraction}.  Each added column is
    reduced against the stored echelon columns by its lowest nonzero
    row.  With `record=True` the reducer tracks the combination of
    input columns producing each reduced column, which yields kernel
    vectors and solve coefficients; rank-only mode skips that
    bookkeeping to stay lean on large coboundary matrices.
    """

    def __init__(self, nrows: int, record: bool = False):
        self.nrows = nrows
        self.record = record
        self._pivots: dict[int, dict[int, Fraction]] = {}
        self._combos: dict[int, dict[int, Fraction]] = {}
        self._ncols = 0
        self.rank = 0
        self.kernel_combos: list[dict[int, Fraction]] = []

    @staticmethod
    def _to_sparse(col) -> dict:
        if isinstance(col, dict):
            return {i: _frac(v) for i, v in col.items() if v != 0}
        return {i: _frac(v) for i, v in enumerate(col) if v != 0}

    def _reduce(self, c: dict, combo: Optional[dict]):
        while c:
            low = max(c)
            p = self._pivots.get(low)
            if p is None:
                return c, combo, low
            f = c[low] / p[low]
            for r, v in p.items():
                nv = c.get(r, Fraction(0)) - f * v
                if nv == 0:
                    c.pop(r, None)
                else:
                    c[r] = nv
            if combo is not None:
                pc = self._combos[low]
                for k, v in pc.items():
                    nv = combo.get(k, Fraction(0)) - f * v
                    if nv == 0:
                        combo.pop(k, None)
                    else:
                        combo[k] = nv
        return c, combo, None

    def add(self, col) -> bool:
        """Add one column; True iff it was independent of those stored."""
        c = self._to_sparse(col)
        for r in c:
            if r >= self.nrows:
                raise DimensionMismatch(f"row index {r} out of range {self.nrows}")
        combo = {self._ncols: Fraction(1)} if self.record else None
        idx = self._ncols
        self._ncols += 1
        c, combo, low = self._reduce(c, combo)
        if low is None:
            if self.record:
                self.kernel_combos.append(combo)
            return False
        self._pivots[low] = c
        if self.record:
            self._combos[low] = combo
        return True

    def residual(self, col) -> dict:
        """Reduce a vector against the stored columns without adding it."""
        c = self._to_sparse(col)
        c, _, _ = self._reduce(dict(c), None)
        return c

    def contains(self, col) -> bool:
        return not self.residual(col)

    def solve(self, col) -> Optional[dict]:
        """Coefficients {column_index: coeff} expressing col over the
        independent stored columns, or None if outside their span.
        Requires record=True."""
        if not self.record:
            raise ValueError("solve requires record=True")
        c = self._to_sparse(col)
        combo: dict[int, Fraction] = {}
        c, combo, low = self._reduce(c, combo)
        if low is not None:
            return None
        return {k: -v for k, v in combo.items()}


def sparse_rank(columns: Iterable, nrows: int) -> int:
    red = ColumnReducer(nrows)
    for c in columns:
        red.add(c)
    return sum(1 for _ in red._pivots)


def sparse_kernel(columns: Sequence, nrows: int) -> list:
    """Kernel combinations of the given columns as sparse dicts."""
    red = ColumnReducer(nrows, record=True)
    for c in columns:
        red.add(c)
    return red.kernel_combos
