from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psmm.errors import DimensionMismatch
from psmm.ratlin import (
    ColumnReducer,
    RatMatrix,
    inverse,
    kernel_basis,
    quotient_basis,
    rref,
    solve,
    sparse_kernel,
    sparse_rank,
)


def M(rows):
    return RatMatrix.from_rows(rows)


small_entries = st.integers(min_value=-4, max_value=4)


@st.composite
def small_matrices(draw, max_dim=5):
    r = draw(st.integers(min_value=0, max_value=max_dim))
    c = draw(st.integers(min_value=0, max_value=max_dim))
    data = [[draw(small_entries) for _ in range(c)] for _ in range(r)]
    return RatMatrix(r, c, data)


class TestRref:
    def test_identity(self):
        res = rref(RatMatrix.identity(2))
        assert res.reduced == RatMatrix.identity(2)
        assert res.pivot_columns == (0, 1)
        assert res.rank == 2

    def test_rank_one(self):
        res = rref(M([[1, 2], [2, 4]]))
        assert res.reduced == M([[1, 2], [0, 0]])
        assert res.pivot_columns == (0,)
        assert res.rank == 1

    def test_zero(self):
        res = rref(RatMatrix.zeros(3, 3))
        assert res.reduced == RatMatrix.zeros(3, 3)
        assert res.pivot_columns == ()
        assert res.rank == 0

    @given(small_matrices())
    def test_idempotent(self, m):
        once = rref(m).reduced
        assert rref(once).reduced == once

    @given(small_matrices(), st.integers(0, 10 ** 6))
    def test_unique_under_row_permutation(self, m, seed):
        import random as _random
        rows = list(m.tolist())
        _random.Random(seed).shuffle(rows)
        permuted = RatMatrix(m.rows, m.cols, rows)
        assert rref(permuted).reduced == rref(m).reduced
        assert rref(permuted).pivot_columns == rref(m).pivot_columns

    def test_fraction_normalization(self):
        m = M([["2/4", 1]])
        assert m[0, 0] == Fraction(1, 2)


class TestSolve:
    def test_identity_case(self):
        b = [Fraction(3), Fraction(-7)]
        assert solve(RatMatrix.identity(2), b) == b

    def test_underdetermined(self):
        x = solve(M([[1, 1]]), [3])
        assert x is not None
        assert x[0] + x[1] == 3

    def test_inconsistent(self):
        assert solve(M([[1], [0]]), [0, 1]) is None

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            solve(M([[1, 1]]), [1, 2])

    @given(small_matrices(max_dim=4), st.data())
    @settings(max_examples=60)
    def test_exact_residual(self, a, data):
        # rhs constructed inside the image so a solution must exist
        coeffs = [data.draw(small_entries) for _ in range(a.cols)]
        b = a.apply(coeffs) if a.cols else [Fraction(0)] * a.rows
        x = solve(a, b)
        assert x is not None
        assert a.apply(x) == b


class TestKernel:
    def test_identity_empty(self):
        k = kernel_basis(RatMatrix.identity(3))
        assert k.cols == 0

    def test_line(self):
        k = kernel_basis(M([[1, 2]]))
        assert k.cols == 1
        v = k.column(0)
        assert v[0] * 1 + v[1] * 2 == 0
        assert v != [0, 0]

    def test_zero_map(self):
        k = kernel_basis(RatMatrix.zeros(1, 3))
        assert k.cols == 3

    @given(small_matrices())
    def test_rank_nullity(self, a):
        assert rref(a).rank + kernel_basis(a).cols == a.cols

    @given(small_matrices())
    def test_kernel_annihilated(self, a):
        k = kernel_basis(a)
        for j in range(k.cols):
            assert all(x == 0 for x in a.apply(k.column(j)))


class TestQuotientBasis:
    def test_empty_subspace(self):
        idx = quotient_basis(3, RatMatrix.zeros(3, 0), RatMatrix.identity(3))
        assert idx == [0, 1, 2]

    def test_kills_subspace_vector(self):
        e1 = RatMatrix.from_columns([[1, 0]], rows=2)
        vecs = RatMatrix.identity(2)
        assert quotient_basis(2, e1, vecs) == [1]

    def test_full_subspace(self):
        assert quotient_basis(2, RatMatrix.identity(2), RatMatrix.identity(2)) == []

    def test_shape_check(self):
        with pytest.raises(DimensionMismatch):
            quotient_basis(2, RatMatrix.identity(3), RatMatrix.identity(2))


class TestInverse:
    def test_roundtrip(self):
        a = M([[2, 1], [1, 1]])
        assert a.matmul(inverse(a)) == RatMatrix.identity(2)

    def test_singular(self):
        with pytest.raises(DimensionMismatch):
            inverse(M([[1, 2], [2, 4]]))


class TestSparseEngine:
    @given(small_matrices())
    def test_sparse_rank_matches_dense(self, a):
        cols = [dict(enumerate(a.column(j))) for j in range(a.cols)]
        assert sparse_rank(cols, a.rows) == rref(a).rank

    @given(small_matrices())
    def test_sparse_kernel_matches_dense(self, a):
        combos = sparse_kernel(a.columns(), a.rows)
        assert len(combos) == kernel_basis(a).cols
        for combo in combos:
            v = [Fraction(0)] * a.cols
            for j, c in combo.items():
                v[j] = c
            assert all(x == 0 for x in a.apply(v))

    def test_solve_coefficients(self):
        red = ColumnReducer(2, record=True)
        red.add([1, 0])
        red.add([1, 1])
        sol = red.solve([3, 2])
        # 3*e0 + 2*e1 = 1*(1,0) + 2*(1,1)
        assert sol == {0: Fraction(1), 1: Fraction(2)}
        assert red.solve([0, 0]) == {}

    def test_solve_outside_span(self):
        red = ColumnReducer(2, record=True)
        red.add([1, 0])
        assert red.solve([0, 1]) is None
