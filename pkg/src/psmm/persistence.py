"""Persistence modules of graded vector spaces over a finite grid.

Modules are stored covariantly; contravariant families (cohomology and
the generator spaces of models, whose arrows run against the filtration)
are re-indexed by reversing the grid and endpoints are mapped back when
bars are reported.  Bars follow the half-open (b, e] convention of the
open Rips filtration, with stage k constant on (d_k, d_{k+1}].

The barcode comes from the rank function by inclusion-exclusion.  An
independent decomposition routine (elder-rule basis propagation, self
verified against the raw matrices) supplies explicit bases for the
interleaving oracle, which certifies answers in both directions: True
answers carry an explicitly checked pair of shift morphisms, False
answers a violated rank inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import DimensionMismatch, InputError
from .gvec import GradedLinearMap, GradedVectorSpace
from .ratlin import ColumnReducer, RatMatrix

INF = math.inf


@dataclass(frozen=True)
class Barcode:
    """Per degree, a sorted multiset of (birth, death, multiplicity)."""

    bars: tuple = ()  # tuple of (degree, ((b, e, mult), ...))

    @staticmethod
    def from_dict(d: dict) -> "Barcode":
        items = []
        for deg in sorted(d):
            merged: dict = {}
            for (b, e, m) in d[deg]:
                if not (b < e):
                    raise InputError(f"bar with b >= e: ({b}, {e}]")
                merged[(b, e)] = merged.get((b, e), 0) + m
            if merged:
                items.append((deg, tuple(sorted(
                    (b, e, m) for (b, e), m in merged.items()))))
        return Barcode(tuple(items))

    def degree(self, deg: int) -> tuple:
        for d, bars in self.bars:
            if d == deg:
                return bars
        return ()

    def degrees(self) -> list:
        return [d for d, _ in self.bars]

    def expanded(self, deg: int) -> list:
        out = []
        for (b, e, m) in self.degree(deg):
            out.extend([(b, e)] * m)
        return out

    def total_bars(self) -> int:
        return sum(m for _, bars in self.bars for (_, _, m) in bars)

    def to_json(self) -> list:
        def num(x):
            if x == INF:
                return "inf"
            if isinstance(x, Fraction):
                return str(x)
            return x
        return [
            {"degree": d,
             "bars": [{"birth": num(b), "death": num(e), "mult": m}
                      for (b, e, m) in bars]}
            for d, bars in self.bars
        ]


class PersistentGVec:
    """Graded vector spaces over stages 0..m with connecting maps.

    `maps[k]` runs stage k -> stage k+1 in the stored (covariant)
    indexing; `reversed_grid` records that the family arrived
    contravariantly and endpoints must be mirrored on report.
    """

    def __init__(self, grid: Sequence, spaces: Sequence[GradedVectorSpace],
                 maps: Sequence[GradedLinearMap], reversed_grid: bool = False):
        if len(spaces) != len(grid) + 1:
            raise DimensionMismatch("need one stage per grid interval")
        if len(maps) != max(len(spaces) - 1, 0):
            raise DimensionMismatch("need one map per consecutive stage pair")
        for k, f in enumerate(maps):
            for deg in set(spaces[k].degrees()) | set(spaces[k + 1].degrees()):
                m = f.matrix(deg)
                if m.rows != spaces[k + 1].dim(deg) or m.cols != spaces[k].dim(deg):
                    raise DimensionMismatch(f"map {k} shape at degree {deg}")
        self.grid = tuple(grid)
        self.spaces = list(spaces)
        self.maps = list(maps)
        self.reversed_grid = reversed_grid

    @property
    def num_stages(self) -> int:
        return len(self.spaces)

    @staticmethod
    def from_contravariant(grid, spaces, maps) -> "PersistentGVec":
        """maps[k]: stage k+1 -> stage k; re-indexed to covariant form."""
        return PersistentGVec(grid, list(spaces)[::-1], list(maps)[::-1],
                              reversed_grid=True)

    def degrees(self) -> list:
        out = set()
        for s in self.spaces:
            out.update(s.degrees())
        return sorted(out)

    def degree_data(self, deg: int):
        dims = [s.dim(deg) for s in self.spaces]
        mats = [f.matrix(deg) for f in self.maps]
        return dims, mats

    # -- rank function and barcode -------------------------------------

    def _ranks(self, deg: int):
        dims, mats = self.degree_data(deg)
        m = self.num_stages
        r = {}
        for i in range(m):
            comp = RatMatrix.identity(dims[i])
            r[(i, i)] = dims[i]
            for j in range(i + 1, m):
                comp = mats[j - 1].matmul(comp)
                from .ratlin import rank as _rank
                r[(i, j)] = _rank(comp)
        return r

    def _zero(self):
        if self.grid and isinstance(self.grid[0], float):
            return 0.0
        return Fraction(0)

    def _stage_interval_endpoints(self, i: int, j: int):
        """Parameter endpoints of a bar spanning stored stages i..j."""
        m = len(self.grid)
        if self.reversed_grid:
            oi, oj = m - j, m - i  # original stages oi..oj
        else:
            oi, oj = i, j
        birth = self._zero() if oi == 0 else self.grid[oi - 1]
        death = INF if oj == m else self.grid[oj]
        return birth, death

    def barcode(self) -> Barcode:
        out: dict[int, list] = {}
        m = self.num_stages
        for deg in self.degrees():
            r = self._ranks(deg)

            def rr(i, j):
                if i < 0 or j > m - 1 or i > j:
                    return 0
                return r[(i, j)]

            for i in range(m):
                for j in range(i, m):
                    mult = rr(i, j) - rr(i - 1, j) - rr(i, j + 1) + rr(i - 1, j + 1)
                    if mult > 0:
                        b, e = self._stage_interval_endpoints(i, j)
                        out.setdefault(deg, []).append((b, e, mult))
                    elif mult < 0:
                        raise InputError("negative multiplicity: not a persistence module")
        return Barcode.from_dict(out)

    # -- decomposition with explicit bases ------------------------------

    def decompose(self, deg: int):
        """Interval decomposition with explicit bases (elder rule).

        Returns a list of bars {birth, death, vecs} where vecs[k] is the
        bar's basis vector at stage k (alive for birth <= k < death) and
        death = num_stages for bars that never die.  Verified against
        the raw matrices before returning.
        """
        dims, mats = self.degree_data(deg)
        m = self.num_stages
        bars: list[dict] = []
        active: list[int] = []
        for k in range(m):
            red = ColumnReducer(max(dims[k], 1), record=True)
            added_bars = []
            survivors = []
            if k > 0:
                for b in active:
                    vec = mats[k - 1].apply(bars[b]["vecs"][k - 1])
                    if red.add(vec):
                        added_bars.append(b)
                        bars[b]["vecs"][k] = vec
                        survivors.append(b)
                    else:
                        added_bars.append(b)
                        sol = red.solve(vec)
                        bars[b]["death"] = k
                        if sol:
                            for idx, c in sol.items():
                                sb = added_bars[idx]
                                for st in range(bars[b]["birth"], k):
                                    corr = bars[sb]["vecs"][st]
                                    cur = bars[b]["vecs"][st]
                                    bars[b]["vecs"][st] = [
                                        x - c * y for x, y in zip(cur, corr)]
            for e in range(dims[k]):
                unit = [Fraction(0)] * dims[k]
                unit[e] = Fraction(1)
                if red.add(unit):
                    added_bars.append(len(bars))
                    survivors.append(len(bars))
                    bars.append({"birth": k, "death": m, "vecs": {k: unit}})
            active = survivors
        self._verify_decomposition(deg, bars)
        return bars

    def _verify_decomposition(self, deg: int, bars: list):
        dims, mats = self.degree_data(deg)
        m = self.num_stages
        for k in range(m):
            red = ColumnReducer(max(dims[k], 1))
            count = 0
            for bar in bars:
                if bar["birth"] <= k < bar["death"]:
                    if not red.add(bar["vecs"][k]):
                        raise InputError("decomposition basis dependent")
                    count += 1
            if count != dims[k]:
                raise InputError("decomposition basis incomplete")
        for bar in bars:
            for k in range(bar["birth"], min(bar["death"], m - 1)):
                img = mats[k].apply(bar["vecs"][k])
                if k + 1 < bar["death"]:
                    if img != bar["vecs"][k + 1]:
                        raise InputError("decomposition not map-compatible")
                elif any(c != 0 for c in img):
                    raise InputError("dying bar has nonzero image")

    def decomposition_barcode(self) -> Barcode:
        out: dict[int, list] = {}
        for deg in self.degrees():
            for bar in self.decompose(deg):
                b, e = self._stage_interval_endpoints(bar["birth"], bar["death"] - 1)
                out.setdefault(deg, []).append((b, e, 1))
        return Barcode.from_dict(out)

    # -- evaluation over real parameters --------------------------------

    def stage_of(self, t) -> Optional[int]:
        """Stored-index stage at parameter t; None when the module is 0.

        For reversed (contravariant) families the parameter is mirrored.
        """
        if self.reversed_grid:
            m = len(self.grid)
            if t <= 0:
                return None
            k = sum(1 for d in self.grid if d < t)
            return m - k
        if t <= 0:
            return None
        return sum(1 for d in self.grid if d < t)

    def dim_at(self, t, deg: int) -> int:
        k = self.stage_of(t)
        return 0 if k is None else self.spaces[k].dim(deg)

    def map_between(self, t, s, deg: int) -> RatMatrix:
        """Matrix of the structure map from time t to time s >= t."""
        if s < t:
            raise InputError("backwards structure map")
        kt, ks = self.stage_of(t), self.stage_of(s)
        rows = 0 if ks is None else self.spaces[ks].dim(deg)
        cols = 0 if kt is None else self.spaces[kt].dim(deg)
        if kt is None or ks is None:
            return RatMatrix.zeros(rows, cols)
        if self.reversed_grid and ks > kt:
            raise InputError("reversed module evaluated backwards")
        comp = RatMatrix.identity(cols)
        step = 1
        for k in range(kt, ks, step):
            comp = self.maps[k].matrix(deg).matmul(comp)
        return comp


def interval_module(interval, grid, deg: int) -> PersistentGVec:
    """Interval-like persistent object: Q on stages inside (b, e], zero
    outside, identities inside, zero across the boundary."""
    b, e = interval
    if not (b < e):
        raise InputError(f"malformed interval ({b}, {e}]")
    stops = [0] + list(grid) + [INF]
    if b not in stops or (e != INF and e not in stops):
        raise InputError("interval endpoints must lie on the grid")
    m = len(grid)
    spaces = []
    for k in range(m + 1):
        lo = stops[k]
        hi = stops[k + 1]
        inside = (b <= lo) and (hi <= e)
        spaces.append(GradedVectorSpace.from_dims({deg: 1} if inside else {}))
    maps = []
    for k in range(m):
        if spaces[k].dim(deg) and spaces[k + 1].dim(deg):
            maps.append(GradedLinearMap(spaces[k], spaces[k + 1],
                                        {deg: RatMatrix.identity(1)}))
        else:
            maps.append(GradedLinearMap(spaces[k], spaces[k + 1], {}))
    return PersistentGVec(grid, spaces, maps)


def direct_sum(modules: Sequence[PersistentGVec]) -> PersistentGVec:
    grid = modules[0].grid
    if any(p.grid != grid or p.reversed_grid != modules[0].reversed_grid
           for p in modules):
        raise InputError("direct sum needs a shared grid")
    m = len(grid)
    spaces = []
    for k in range(m + 1):
        dims: dict[int, int] = {}
        for p in modules:
            for d in p.spaces[k].degrees():
                dims[d] = dims.get(d, 0) + p.spaces[k].dim(d)
        spaces.append(GradedVectorSpace.from_dims(dims))
    maps = []
    for k in range(m):
        mats = {}
        degs = set(spaces[k].degrees()) | set(spaces[k + 1].degrees())
        for d in degs:
            blocks = [p.maps[k].matrix(d) for p in modules]
            rows = sum(b.rows for b in blocks)
            cols = sum(b.cols for b in blocks)
            data = [[Fraction(0)] * cols for _ in range(rows)]
            r0 = c0 = 0
            for bm in blocks:
                for i in range(bm.rows):
                    for j in range(bm.cols):
                        data[r0 + i][c0 + j] = bm[i, j]
                r0 += bm.rows
                c0 += bm.cols
            mat = RatMatrix(rows, cols, data)
            if not mat.is_zero():
                mats[d] = mat
        maps.append(GradedLinearMap(spaces[k], spaces[k + 1], mats))
    return PersistentGVec(grid, spaces, maps,
                          reversed_grid=modules[0].reversed_grid)


def barcode(p: PersistentGVec) -> Barcode:
    return p.barcode()


# ---------------------------------------------------------------------------
# Bottleneck distance
# ---------------------------------------------------------------------------


def _pair_cost(b1, b2):
    db = abs(b1[0] - b2[0])
    if b1[1] == INF and b2[1] == INF:
        de = 0
    elif b1[1] == INF or b2[1] == INF:
        return INF
    else:
        de = abs(b1[1] - b2[1])
    return max(db, de)


def _half_length(b):
    if b[1] == INF:
        return INF
    return (b[1] - b[0]) / 2


def _diag_adjacency(bars1, bars2, delta):
    """Left nodes: bars1 then diagonal copies of bars2; right nodes:
    bars2 then diagonal slots.  A perfect matching exists iff the bars
    admit a delta-matching with deletions costing half-length."""
    n, m = len(bars1), len(bars2)
    size = n + m
    adj = [[] for _ in range(size)]
    for i, b1 in enumerate(bars1):
        for j, b2 in enumerate(bars2):
            if _pair_cost(b1, b2) <= delta:
                adj[i].append(j)
        if _half_length(b1) <= delta:
            for j in range(m, size):
                adj[i].append(j)
    for k, b2 in enumerate(bars2):
        i = n + k
        if _half_length(b2) <= delta:
            adj[i].append(k)
        for j in range(m, size):
            adj[i].append(j)
    return adj


def _max_matching(adj, size):
    match_r = [-1] * size

    def try_kuhn(u, seen):
        for v in adj[u]:
            if seen[v]:
                continue
            seen[v] = True
            if match_r[v] == -1 or try_kuhn(match_r[v], seen):
                match_r[v] = u
                return True
        return False

    matched = 0
    for u in range(size):
        seen = [False] * size
        if try_kuhn(u, seen):
            matched += 1
    return matched, match_r


def _matching_feasible(bars1, bars2, delta) -> bool:
    size = len(bars1) + len(bars2)
    matched, _ = _max_matching(_diag_adjacency(bars1, bars2, delta), size)
    return matched == size


def _bottleneck_degree(bars1, bars2):
    if not bars1 and not bars2:
        return 0
    inf1 = sum(1 for b in bars1 if b[1] == INF)
    inf2 = sum(1 for b in bars2 if b[1] == INF)
    if inf1 != inf2:
        return INF
    cands = {0}
    for b1 in bars1:
        for b2 in bars2:
            c = _pair_cost(b1, b2)
            if c != INF:
                cands.add(c)
    for b in list(bars1) + list(bars2):
        h = _half_length(b)
        if h != INF:
            cands.add(h)
    cands = sorted(cands)
    lo, hi = 0, len(cands) - 1
    if not _matching_feasible(bars1, bars2, cands[hi]):
        return INF
    while lo < hi:
        mid = (lo + hi) // 2
        if _matching_feasible(bars1, bars2, cands[mid]):
            hi = mid
        else:
            lo = mid + 1
    return cands[lo]


@dataclass(frozen=True)
class BottleneckResult:
    per_degree: dict
    sup: object

    def degree(self, d):
        return self.per_degree.get(d, 0)


def bottleneck(b1: Barcode, b2: Barcode) -> BottleneckResult:
    degrees = sorted(set(b1.degrees()) | set(b2.degrees()))
    per = {}
    sup = 0
    for d in degrees:
        v = _bottleneck_degree(b1.expanded(d), b2.expanded(d))
        per[d] = v
        sup = max(sup, v)
    return BottleneckResult(per, sup)


def _matching_at(bars1, bars2, delta):
    """One feasible matching (list of (i, j) real-real pairs) at delta,
    or None; deleted bars are those not in any pair."""
    n, m = len(bars1), len(bars2)
    size = n + m
    matched, match_r = _max_matching(_diag_adjacency(bars1, bars2, delta), size)
    if matched != size:
        return None
    return [(match_r[v], v) for v in range(m) if 0 <= match_r[v] < n]


# ---------------------------------------------------------------------------
# Interleaving oracle
# ---------------------------------------------------------------------------


def _sample_points(grid, delta):
    stops = {0}
    for d in list(grid) + [0]:
        for k in (-2, -1, 0, 1, 2):
            stops.add(d + k * delta)
    stops = sorted(stops)
    samples = []
    prev = None
    for x in stops:
        if prev is not None and x > prev:
            samples.append(prev + (x - prev) / 2)
        prev = x
    samples.append(stops[-1] + 1)
    samples.insert(0, stops[0] - 1)
    return samples


def _rank_conditions_hold(p, q, delta, deg) -> bool:
    from .ratlin import rank as _rank
    samples = [t for t in _sample_points(p.grid, delta)]
    for a in range(len(samples)):
        for b in range(a, len(samples)):
            t, s = samples[a], samples[b]
            if _rank(p.map_between(t, s + 2 * delta, deg)) > \
                    _rank(q.map_between(t + delta, s + delta, deg)):
                return False
            if _rank(q.map_between(t, s + 2 * delta, deg)) > \
                    _rank(p.map_between(t + delta, s + delta, deg)):
                return False
    return True


class _DecomposedModule:
    """Interval view of one degree of a module, in parameter terms."""

    def __init__(self, p: PersistentGVec, deg: int):
        self.intervals = []
        for bar in p.decompose(deg):
            b, e = p._stage_interval_endpoints(bar["birth"], bar["death"] - 1)
            self.intervals.append((b, e))

    def alive(self, t) -> list:
        return [i for i, (b, e) in enumerate(self.intervals)
                if b < t and (e == INF or t <= e)]

    def internal_map(self, t, s) -> RatMatrix:
        at, as_ = self.alive(t), self.alive(s)
        data = [[Fraction(1) if (j == i) else Fraction(0) for j in at] for i in as_]
        return RatMatrix(len(as_), len(at), data)


def _shift_matrix(src: "_DecomposedModule", dst: "_DecomposedModule",
                  pairs, t, delta, windows) -> RatMatrix:
    """f_t: src(t) -> dst(t + delta) from a matching; component 1 on the
    overlap window of each matched pair, 0 elsewhere."""
    alive_s = src.alive(t)
    alive_d = dst.alive(t + delta)
    data = [[Fraction(0)] * len(alive_s) for _ in alive_d]
    pos_s = {i: c for c, i in enumerate(alive_s)}
    pos_d = {j: r for r, j in enumerate(alive_d)}
    for (i, j) in pairs:
        lo, hi = windows[(i, j)]
        if i in pos_s and j in pos_d and lo < t and (hi == INF or t <= hi):
            data[pos_d[j]][pos_s[i]] = Fraction(1)
    return RatMatrix(len(alive_d), len(alive_s), data)


def interleaving_check(p: PersistentGVec, q: PersistentGVec, delta) -> bool:
    """Decide existence of a delta-interleaving on the shared grid.

    True answers construct explicit shift morphisms from a matched
    decomposition and verify every naturality square and both triangle
    families at a refined sample set.  False answers exhibit a violated
    rank inequality (a composite of structure maps that cannot factor
    through the other module).
    """
    if p.grid != q.grid:
        raise InputError("interleaving check needs a shared refined grid")
    if p.reversed_grid or q.reversed_grid:
        raise InputError("re-index contravariant modules before the check")
    if delta < 0:
        raise InputError("delta must be nonnegative")
    degrees = sorted(set(p.degrees()) | set(q.degrees()))
    for deg in degrees:
        if not _rank_conditions_hold(p, q, delta, deg):
            return False
    for deg in degrees:
        dp = _DecomposedModule(p, deg)
        dq = _DecomposedModule(q, deg)
        pairs = _matching_at(dp.intervals, dq.intervals, delta)
        if pairs is None:
            return False
        if not _verify_interleaving(dp, dq, pairs, delta, p.grid):
            raise InputError("witness verification failed: internal error")
    return True


def _verify_interleaving(dp, dq, pairs, delta, grid) -> bool:
    windows_f = {}
    windows_g = {}
    for (i, j) in pairs:
        b, e = dp.intervals[i]
        b2, e2 = dq.intervals[j]
        windows_f[(i, j)] = (b, (e2 - delta) if e2 != INF else INF)
        windows_g[(j, i)] = (b2, (e - delta) if e != INF else INF)
    gpairs = [(j, i) for (i, j) in pairs]
    samples = _sample_points(grid, delta)

    def f_at(t):
        return _shift_matrix(dp, dq, pairs, t, delta, windows_f)

    def g_at(t):
        return _shift_matrix(dq, dp, gpairs, t, delta, windows_g)

    for a in range(len(samples) - 1):
        t, s = samples[a], samples[a + 1]
        # squares for f and for g
        if dq.internal_map(t + delta, s + delta).matmul(f_at(t)) != \
                f_at(s).matmul(dp.internal_map(t, s)):
            return False
        if dp.internal_map(t + delta, s + delta).matmul(g_at(t)) != \
                g_at(s).matmul(dq.internal_map(t, s)):
            return False
    for t in samples:
        if g_at(t + delta).matmul(f_at(t)) != dp.internal_map(t, t + 2 * delta):
            return False
        if f_at(t + delta).matmul(g_at(t)) != dq.internal_map(t, t + 2 * delta):
            return False
    return True
