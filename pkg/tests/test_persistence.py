import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psmm.errors import InputError
from psmm.gvec import GradedLinearMap, GradedVectorSpace
from psmm.persistence import (
    INF,
    Barcode,
    PersistentGVec,
    bottleneck,
    barcode,
    direct_sum,
    interleaving_check,
    interval_module,
)
from psmm.ratlin import RatMatrix

GRID2 = (Fraction(1), Fraction(2))


def module_from_dims(grid, dims, mats, deg=0):
    spaces = [GradedVectorSpace.from_dims({deg: d} if d else {}) for d in dims]
    maps = []
    for k in range(len(dims) - 1):
        m = RatMatrix.from_rows(mats[k]) if dims[k + 1] and dims[k] else \
            RatMatrix.zeros(dims[k + 1], dims[k])
        maps.append(GradedLinearMap(spaces[k], spaces[k + 1],
                                    {deg: m} if not m.is_zero() else {}))
    return PersistentGVec(grid, spaces, maps)


def random_interval_sum(rng, grid, deg=0, max_bars=4):
    stops = [0] + list(grid) + [INF]
    mods = []
    for _ in range(rng.randint(1, max_bars)):
        i = rng.randint(0, len(stops) - 2)
        j = rng.randint(i + 1, len(stops) - 1)
        mods.append(interval_module((stops[i], stops[j]), grid, deg))
    return direct_sum(mods), sorted((m.barcode().expanded(deg) or [(0, 0)])[0]
                                    for m in mods)


class TestIntervalModule:
    def test_full_interval(self):
        p = interval_module((0, INF), GRID2, deg=1)
        assert [s.dim(1) for s in p.spaces] == [1, 1, 1]
        assert p.barcode().degree(1) == ((0, INF, 1),)

    def test_middle_interval(self):
        p = interval_module((Fraction(1), Fraction(2)), GRID2, deg=0)
        assert [s.dim(0) for s in p.spaces] == [0, 1, 0]
        assert p.barcode().degree(0) == ((Fraction(1), Fraction(2), 1),)

    def test_direct_sum_dims(self):
        a = interval_module((0, Fraction(1)), GRID2, deg=0)
        b = interval_module((Fraction(1), INF), GRID2, deg=0)
        s = direct_sum([a, b])
        assert [sp.dim(0) for sp in s.spaces] == [1, 1, 1]
        assert s.maps[0].matrix(0).is_zero()
        assert s.barcode().degree(0) == ((0, Fraction(1), 1), (Fraction(1), INF, 1))

    def test_malformed_interval(self):
        with pytest.raises(InputError):
            interval_module((Fraction(2), Fraction(1)), GRID2, 0)
        with pytest.raises(InputError):
            interval_module((Fraction(1, 3), INF), GRID2, 0)


class TestBarcode:
    def test_two_bars_zero_map(self):
        p = module_from_dims((Fraction(1),), [1, 1], [[[0]]])
        assert p.barcode().degree(0) == ((0, Fraction(1), 1), (Fraction(1), INF, 1))

    def test_pointwise_dimension_consistency(self):
        rng = random.Random(42)
        for _ in range(20):
            grid = tuple(Fraction(k + 1) for k in range(rng.randint(1, 4)))
            p, _ = random_interval_sum(rng, grid)
            bc = p.barcode()
            stops = [0] + list(grid) + [INF]
            for k, sp in enumerate(p.spaces):
                covering = sum(
                    m for (b, e, m) in bc.degree(0)
                    if b <= stops[k] and stops[k + 1] <= e
                )
                assert covering == sp.dim(0)

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=40, deadline=None)
    def test_roundtrip_random_sums(self, seed):
        rng = random.Random(seed)
        grid = tuple(Fraction(k + 1) for k in range(rng.randint(1, 4)))
        stops = [0] + list(grid) + [INF]
        expected = {}
        mods = []
        for _ in range(rng.randint(1, 4)):
            i = rng.randint(0, len(stops) - 2)
            j = rng.randint(i + 1, len(stops) - 1)
            key = (stops[i], stops[j])
            expected[key] = expected.get(key, 0) + 1
            mods.append(interval_module(key, grid, 0))
        s = direct_sum(mods)
        got = {(b, e): m for (b, e, m) in s.barcode().degree(0)}
        assert got == expected

    def test_decomposition_matches_rank_barcode(self):
        rng = random.Random(7)
        for _ in range(15):
            grid = tuple(Fraction(k + 1) for k in range(rng.randint(1, 3)))
            dims = [rng.randint(0, 3) for _ in range(len(grid) + 1)]
            mats = []
            for k in range(len(grid)):
                mats.append([[Fraction(rng.randint(-1, 1))
                              for _ in range(dims[k])] for _ in range(dims[k + 1])])
            p = module_from_dims(grid, dims, mats)
            assert p.barcode().bars == p.decomposition_barcode().bars

    def test_contravariant_reporting(self):
        # two-point-space H^0 pattern: dims 2 at stage 0, 1 at stage 1,
        # contravariant restriction map is injective transpose-like
        s0 = GradedVectorSpace.from_dims({0: 2})
        s1 = GradedVectorSpace.from_dims({0: 1})
        f = GradedLinearMap(s1, s0, {0: RatMatrix.from_rows([[1], [1]])})
        p = PersistentGVec.from_contravariant((Fraction(1),), [s0, s1], [f])
        bars = p.barcode().degree(0)
        assert bars == ((0, Fraction(1), 1), (0, INF, 1))


class TestBottleneck:
    def test_identical(self):
        b = Barcode.from_dict({1: [(0, Fraction(1), 1)]})
        assert bottleneck(b, b).sup == 0

    def test_single_pair_shift(self):
        b1 = Barcode.from_dict({0: [(0, 1.0, 1)]})
        b2 = Barcode.from_dict({0: [(0, 1.2, 1)]})
        r = bottleneck(b1, b2)
        assert abs(r.degree(0) - 0.2) < 1e-12

    def test_unmatched_infinite_bar(self):
        b1 = Barcode.from_dict({4: [(0, INF, 1)]})
        b2 = Barcode()
        assert bottleneck(b1, b2).sup == INF

    def test_multiplicity_mismatch_uses_diagonal(self):
        b1 = Barcode.from_dict({0: [(0, Fraction(4), 2)]})
        b2 = Barcode.from_dict({0: [(0, Fraction(4), 1)]})
        assert bottleneck(b1, b2).sup == Fraction(2)

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=40, deadline=None)
    def test_against_exhaustive_matching_oracle(self, seed):
        import itertools

        def naive_bottleneck(bars1, bars2):
            from psmm.persistence import _half_length, _pair_cost
            best = None
            n, m = len(bars1), len(bars2)
            for k in range(min(n, m) + 1):
                for left in itertools.permutations(range(n), k):
                    for right in itertools.permutations(range(m), k):
                        cost = 0
                        for i, j in zip(left, right):
                            cost = max(cost, _pair_cost(bars1[i], bars2[j]))
                        for i in set(range(n)) - set(left):
                            cost = max(cost, _half_length(bars1[i]))
                        for j in set(range(m)) - set(right):
                            cost = max(cost, _half_length(bars2[j]))
                        if best is None or cost < best:
                            best = cost
            return 0 if best is None else best

        rng = random.Random(seed)

        def random_bars():
            out = []
            for _ in range(rng.randint(0, 3)):
                b = Fraction(rng.randint(0, 5), 2)
                e = b + Fraction(rng.randint(1, 5), 2) if rng.random() < 0.8 else INF
                out.append((b, e))
            return out

        bars1, bars2 = random_bars(), random_bars()
        mine = bottleneck(Barcode.from_dict({0: [(b, e, 1) for b, e in bars1]}),
                          Barcode.from_dict({0: [(b, e, 1) for b, e in bars2]}))
        assert mine.degree(0) == naive_bottleneck(bars1, bars2)

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=30, deadline=None)
    def test_pseudometric(self, seed):
        rng = random.Random(seed)

        def random_barcode():
            bars = []
            for _ in range(rng.randint(0, 3)):
                b = Fraction(rng.randint(0, 6), 2)
                e = b + Fraction(rng.randint(1, 6), 2)
                bars.append((b, e if rng.random() < 0.8 else INF, 1))
            return Barcode.from_dict({0: bars}) if bars else Barcode()

        x, y, z = random_barcode(), random_barcode(), random_barcode()
        dxy = bottleneck(x, y).sup
        assert dxy == bottleneck(y, x).sup
        assert bottleneck(x, x).sup == 0
        dxz, dzy = bottleneck(x, z).sup, bottleneck(z, y).sup
        assert dxy <= dxz + dzy


class TestInterleavingOracle:
    def test_equal_modules_at_zero(self):
        p = interval_module((0, Fraction(1)), GRID2, 0)
        assert interleaving_check(p, p, 0)

    def test_example_shift(self):
        grid = (Fraction(1), Fraction(6, 5))
        p = interval_module((0, Fraction(1)), grid, 0)
        q = interval_module((0, Fraction(6, 5)), grid, 0)
        assert interleaving_check(p, q, Fraction(1, 5))
        assert not interleaving_check(p, q, Fraction(1, 10))

    def test_grid_mismatch(self):
        p = interval_module((0, Fraction(1)), (Fraction(1),), 0)
        q = interval_module((0, Fraction(1)), GRID2, 0)
        with pytest.raises(InputError):
            interleaving_check(p, q, 0)

    def test_equal_barcodes_interleave_at_zero(self):
        rng = random.Random(5)
        grid = tuple(Fraction(k + 1) for k in range(3))
        p, _ = random_interval_sum(rng, grid)
        # a permuted direct sum of the same intervals
        bars = p.barcode().degree(0)
        mods = []
        for (b, e, m) in bars:
            mods.extend([interval_module((b, e), grid, 0)] * m)
        rng.shuffle(mods)
        q = direct_sum(mods)
        assert interleaving_check(p, q, 0)

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=20, deadline=None)
    def test_oracle_matches_bottleneck(self, seed):
        rng = random.Random(seed)
        grid = tuple(Fraction(k + 1) for k in range(rng.randint(1, 4)))
        p, _ = random_interval_sum(rng, grid)
        q, _ = random_interval_sum(rng, grid)
        d = bottleneck(p.barcode(), q.barcode()).sup
        if d == INF:
            assert not interleaving_check(p, q, Fraction(100))
            return
        assert interleaving_check(p, q, d)
        candidates = sorted({x for x in [d - Fraction(1, 4), d / 2] if 0 <= x < d})
        for smaller in candidates:
            assert not interleaving_check(p, q, smaller)

    def test_graded_modules_checked_per_degree(self):
        grid = (Fraction(1), Fraction(2))
        p = direct_sum([interval_module((0, Fraction(2)), grid, 0)])
        p2 = direct_sum([interval_module((0, Fraction(2)), grid, 0),
                         interval_module((Fraction(1), INF), grid, 3)])
        # identical in degree 0 but q has an extra degree-3 feature
        d = bottleneck(p.barcode(), p2.barcode())
        assert d.per_degree[0] == 0 and d.per_degree[3] == INF
        assert not interleaving_check(p, p2, Fraction(5))

    def test_functor_stability_shadow(self):
        # explicitly interleaved pair: shifted interval modules
        grid = tuple(Fraction(k) for k in range(1, 5))
        p = interval_module((Fraction(1), Fraction(3)), grid, 0)
        q = interval_module((Fraction(2), Fraction(4)), grid, 0)
        assert interleaving_check(p, q, Fraction(1))
        assert bottleneck(p.barcode(), q.barcode()).sup <= Fraction(1)
