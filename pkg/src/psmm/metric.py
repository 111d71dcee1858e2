"""Finite metric spaces, Vietoris-Rips filtrations, and a brute-force
Gromov-Hausdorff oracle for small spaces.

Distances are either exact rationals or binary64 floats, tracked per
instance.  The Rips convention is the open one, diam < t, realized as
left-open right-closed constancy intervals (d_k, d_{k+1}] over the grid
of distinct positive pairwise distances.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import CapExceeded, InputError

Num = Union[Fraction, float]


def _parse_entry(x) -> Num:
    if isinstance(x, bool):
        raise InputError(f"invalid distance entry {x!r}")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as e:
            raise InputError(f"bad rational literal {x!r}") from e
    if isinstance(x, float):
        return x
    raise InputError(f"invalid distance entry {x!r}")


@dataclass(frozen=True)
class MetricSpace:
    """Finite point set with symmetric nonnegative pairwise distances."""

    dist: tuple  # tuple of tuples, Fraction or float
    names: Optional[tuple] = None
    exact: bool = True
    triangle_ok: bool = True

    @property
    def n(self) -> int:
        return len(self.dist)

    def d(self, i: int, j: int) -> Num:
        return self.dist[i][j]

    def positive_distances(self) -> list:
        vals = {self.dist[i][j] for i in range(self.n) for j in range(i + 1, self.n)}
        vals.discard(Fraction(0))
        vals.discard(0.0)
        return sorted(vals)

    def scaled(self, lam: Num) -> "MetricSpace":
        rows = tuple(tuple(x * lam for x in row) for row in self.dist)
        return MetricSpace(rows, self.names, self.exact and isinstance(lam, (int, Fraction)),
                           self.triangle_ok)


def metric_from_matrix(matrix: Sequence[Sequence], names=None) -> MetricSpace:
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise InputError("distance matrix is not square")
    rows = [[_parse_entry(x) for x in row] for row in matrix]
    exact = all(isinstance(x, Fraction) for row in rows for x in row)
    if not exact:
        rows = [[float(x) for x in row] for row in rows]
    for i in range(n):
        if rows[i][i] != 0:
            raise InputError(f"nonzero diagonal at {i}")
        for j in range(i + 1, n):
            if rows[i][j] != rows[j][i]:
                raise InputError(f"asymmetric entries at ({i},{j})")
            if rows[i][j] < 0:
                raise InputError(f"negative distance at ({i},{j})")
    tri = all(
        rows[i][k] <= rows[i][j] + rows[j][k]
        for i in range(n) for j in range(n) for k in range(n)
    )
    if names is not None:
        names = tuple(str(x) for x in names)
        if len(names) != n:
            raise InputError("names length mismatch")
    return MetricSpace(tuple(tuple(r) for r in rows), names, exact, tri)


def metric_from_points(points: Sequence[Sequence]) -> MetricSpace:
    """Euclidean distances computed in binary64."""
    pts = [tuple(float(c) for c in p) for p in points]
    if pts and any(len(p) != len(pts[0]) for p in pts):
        raise InputError("inconsistent point dimensions")
    n = len(pts)
    rows = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d = math.dist(pts[i], pts[j])
            rows[i][j] = rows[j][i] = d
    return MetricSpace(tuple(tuple(r) for r in rows), None, exact=False, triangle_ok=True)


def load_metric(source) -> MetricSpace:
    """Load a metric space from a JSON dict, file path, or file object."""
    if isinstance(source, (str,)):
        with open(source) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as e:
                raise InputError(f"malformed JSON: {e}") from e
    elif hasattr(source, "read"):
        try:
            data = json.load(source)
        except json.JSONDecodeError as e:
            raise InputError(f"malformed JSON: {e}") from e
    else:
        data = source
    if not isinstance(data, dict):
        raise InputError("metric input must be a JSON object")
    if "points" in data:
        return metric_from_points(data["points"])
    if "distance_matrix" in data:
        return metric_from_matrix(data["distance_matrix"], data.get("names"))
    raise InputError("expected 'points' or 'distance_matrix'")


# ---------------------------------------------------------------------------
# Simplicial complexes and Rips filtrations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimplicialComplex:
    """Downward-closed simplex set, stored per dimension.

    Simplices are strictly increasing vertex tuples in the global
    vertex order; vertices run 0..n_vertices-1 and every singleton is
    present.
    """

    n_vertices: int
    simplices: dict = field(default_factory=dict)  # dim -> tuple of tuples

    @property
    def top_dim(self) -> int:
        dims = [d for d, s in self.simplices.items() if s]
        return max(dims) if dims else -1

    def dim_simplices(self, d: int) -> tuple:
        return self.simplices.get(d, ())

    def simplex_count(self) -> int:
        return sum(len(s) for s in self.simplices.values())

    def contains(self, s: tuple) -> bool:
        return s in set(self.simplices.get(len(s) - 1, ()))

    def validate(self):
        seen = {s for group in self.simplices.values() for s in group}
        for d, group in self.simplices.items():
            for s in group:
                if len(s) != d + 1 or list(s) != sorted(set(s)):
                    raise InputError(f"bad simplex {s} in dimension {d}")
                if d > 0:
                    for face in itertools.combinations(s, d):
                        if face not in seen:
                            raise InputError(f"missing face {face} of {s}")
        for v in range(self.n_vertices):
            if (v,) not in seen:
                raise InputError(f"missing vertex ({v},)")

    def find_cone_apex(self) -> Optional[tuple]:
        """(apex, complete) when the complex is a cone over the apex,
        possibly truncated in its top dimension; None otherwise.

        complete=True means sigma u {apex} is present for every simplex
        avoiding the apex, so the complex is a genuine cone and all
        reduced cohomology vanishes.  complete=False means only top-dim
        simplices lack their coface, which still forces vanishing in
        degrees < top_dim.
        """
        D = self.top_dim
        if D < 0:
            return None
        edges = {frozenset(e) for e in self.dim_simplices(1)}
        present = {s for group in self.simplices.values() for s in group}
        for v in range(self.n_vertices):
            if not all(v == u or frozenset((u, v)) in edges for u in range(self.n_vertices)):
                continue
            ok = True
            complete = True
            for d in range(0, D + 1):
                for s in self.dim_simplices(d):
                    if v in s:
                        continue
                    if tuple(sorted(s + (v,))) not in present:
                        if d < D:
                            ok = False
                            break
                        complete = False
                if not ok:
                    break
            if ok:
                return (v, complete)
        return None


def complex_from_simplices(n_vertices: int, maximal: Sequence[Sequence[int]]) -> SimplicialComplex:
    """Downward closure of the given simplices (plus all vertices)."""
    by_dim: dict[int, set] = {0: {(v,) for v in range(n_vertices)}}
    for s in maximal:
        s = tuple(sorted(set(int(v) for v in s)))
        if s and (min(s) < 0 or max(s) >= n_vertices):
            raise InputError(f"vertex out of range in {s}")
        for k in range(1, len(s) + 1):
            for face in itertools.combinations(s, k):
                by_dim.setdefault(k - 1, set()).add(face)
    return SimplicialComplex(n_vertices, {d: tuple(sorted(g)) for d, g in by_dim.items()})


@dataclass(frozen=True)
class FilteredComplex:
    """Rips filtration over the grid of distinct positive distances.

    Stage k holds the simplices of diameter <= d_k (d_0 := 0), which is
    VR_t for every t in (d_k, d_{k+1}], with d_{m+1} = infinity.
    """

    critical_values: tuple
    stages: tuple  # SimplicialComplex per index 0..m

    @property
    def num_stages(self) -> int:
        return len(self.stages)

    def stage_of_param(self, t) -> Optional[int]:
        if t <= 0:
            return None
        k = 0
        for d in self.critical_values:
            if d < t:
                k += 1
        return k


def build_filtration(m: MetricSpace, max_dim: int, simplex_cap: int = 2_000_000) -> FilteredComplex:
    """Clique-expand the neighborhood graph once at the final scale,
    track simplex diameters, and slice stages by diameter."""
    if max_dim < 0:
        raise InputError("max_dim must be >= 0")
    n = m.n
    crit = m.positive_distances()
    zero = Fraction(0) if m.exact else 0.0

    # adjacency at the final scale is the complete graph; enumerate all
    # simplices with their diameters, ascending dimension
    simplices: dict[int, list] = {0: [((v,), zero) for v in range(n)]}
    total = n
    for d in range(1, max_dim + 1):
        cur = []
        for s, diam in simplices[d - 1]:
            last = s[-1]
            for v in range(last + 1, n):
                nd = diam
                for u in s:
                    duv = m.d(u, v)
                    if duv > nd:
                        nd = duv
                cur.append((s + (v,), nd))
        total += len(cur)
        if total > simplex_cap:
            raise CapExceeded(f"simplex count exceeds cap {simplex_cap}")
        simplices[d] = cur

    stages = []
    for k in range(len(crit) + 1):
        bound = zero if k == 0 else crit[k - 1]
        by_dim = {}
        for d, group in simplices.items():
            sel = tuple(s for s, diam in group if diam <= bound)
            if sel:
                by_dim[d] = sel
        stages.append(SimplicialComplex(n, by_dim))
    return FilteredComplex(tuple(crit), tuple(stages))


# ---------------------------------------------------------------------------
# Gromov-Hausdorff by correspondence distortion
# ---------------------------------------------------------------------------


def _distortion_feasible(dx, dy, delta) -> bool:
    """Is there a correspondence with distortion <= delta?

    Any correspondence contains one of the form graph(phi) u
    graph(psi)^T for maps phi: X->Y, psi: Y->X, with no larger
    distortion.  The search assigns phi- and psi-values in interleaved
    order so the coupling constraints prune early, with all pairwise
    checks reduced to one precomputed boolean table over point pairs.
    """
    nx, ny = len(dx), len(dy)
    # ok[a*ny + b][c*ny + d]: the pairs (a, b), (c, d) of X x Y are
    # compatible, |dx[a][c] - dy[b][d]| <= delta
    npairs = nx * ny
    ok = [bytearray(npairs) for _ in range(npairs)]
    for a in range(nx):
        for b in range(ny):
            row = ok[a * ny + b]
            dxa = dx[a]
            for c in range(nx):
                dxac = dxa[c]
                dyb = dy[b]
                base = c * ny
                for d in range(ny):
                    if abs(dxac - dyb[d]) <= delta:
                        row[base + d] = 1

    # variables: phi(x_i) in Y and psi(y_j) in X, interleaved; each
    # assignment is a pair index into the table
    variables = []
    for k in range(max(nx, ny)):
        if k < nx:
            variables.append(("x", k))
        if k < ny:
            variables.append(("y", k))
    assigned: list[int] = []

    def backtrack(v: int) -> bool:
        if v == len(variables):
            return True
        kind, k = variables[v]
        if kind == "x":
            candidates = (k * ny + b for b in range(ny))
        else:
            candidates = (a * ny + k for a in range(nx))
        for pair in candidates:
            row = ok[pair]
            if all(row[p] for p in assigned) and row[pair]:
                assigned.append(pair)
                if backtrack(v + 1):
                    return True
                assigned.pop()
        return False

    return backtrack(0)


def _integerize(dx, dy):
    """Common integer scaling of two exact distance matrices, so the
    feasibility search runs on machine integers."""
    from math import lcm
    dens = {v.denominator for row in dx for v in row}
    dens |= {v.denominator for row in dy for v in row}
    scale = 1
    for d in dens:
        scale = lcm(scale, d)
    ix = tuple(tuple(int(v * scale) for v in row) for row in dx)
    iy = tuple(tuple(int(v * scale) for v in row) for row in dy)
    return ix, iy, scale


def gh_bruteforce(x: MetricSpace, y: MetricSpace, cap: int = 30) -> Num:
    """Half the minimum correspondence distortion, exactly.

    Searches the finite candidate set of achievable distortions by
    bisection, deciding each candidate by pruned backtracking.
    """
    if x.n * y.n > cap:
        raise CapExceeded(f"|X|*|Y| = {x.n * y.n} exceeds cap {cap}")
    if x.n == 0 or y.n == 0:
        raise InputError("empty metric space")
    dx, dy = x.dist, y.dist
    scale = None
    if x.exact and y.exact:
        dx, dy, scale = _integerize(dx, dy)
    vals_x = {dx[i][j] for i in range(x.n) for j in range(x.n)}
    vals_y = {dy[i][j] for i in range(y.n) for j in range(y.n)}
    cands = sorted({abs(a - b) for a in vals_x for b in vals_y})
    lo, hi = 0, len(cands) - 1
    # cands[hi] is always feasible: distortion never exceeds max |dx-dy|
    while lo < hi:
        mid = (lo + hi) // 2
        if _distortion_feasible(dx, dy, cands[mid]):
            hi = mid
        else:
            lo = mid + 1
    best = cands[lo]
    if scale is not None:
        return Fraction(best, 2 * scale)
    return best * 0.5
