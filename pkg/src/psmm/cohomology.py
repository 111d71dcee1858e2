"""Simplicial rational cohomology with cup products.

Produces per-stage cohomology rings (basis classes with representative
cocycles plus multiplication structure constants) and the maps induced
by stage inclusions.  Cup products use the Alexander-Whitney formula in
the global vertex order; the ring is graded-commutative and associative
after projection to cohomology, and both facts are asserted during
construction.

Heavy stages are handled lazily: ranks of the sparse coboundaries give
all dimensions, and representative cocycles are only extracted in
degrees where the cohomology is nonzero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import InputError, TruncationError
from .gvec import GradedLinearMap, GradedVectorSpace
from .metric import SimplicialComplex
from .ratlin import ColumnReducer, RatMatrix


def coboundary_columns(cx: SimplicialComplex, p: int):
    """Sparse columns of delta^p: C^p -> C^{p+1}, indexed by p-simplices."""
    lower = cx.dim_simplices(p)
    upper = cx.dim_simplices(p + 1)
    low_index = {s: i for i, s in enumerate(lower)}
    cols = [dict() for _ in lower]
    for ui, t in enumerate(upper):
        for i in range(len(t)):
            face = t[:i] + t[i + 1:]
            j = low_index[face]
            cols[j][ui] = Fraction(1 if i % 2 == 0 else -1)
    return cols, len(upper)


def coboundaries(cx: SimplicialComplex, max_deg: int) -> list:
    """Dense coboundary matrices delta^0 .. delta^max_deg."""
    out = []
    for p in range(max_deg + 1):
        cols, nup = coboundary_columns(cx, p)
        data = [[Fraction(0)] * len(cols) for _ in range(nup)]
        for j, col in enumerate(cols):
            for i, v in col.items():
                data[i][j] = v
        out.append(RatMatrix(nup, len(cols), data))
    return out


def cup_product(cx: SimplicialComplex, a, p: int, b, q: int):
    """Alexander-Whitney product of cochains: front face times back face.

    Cochains are dicts over simplex indices or dense sequences over the
    ordered simplices of their degree; the result matches the input
    style of `a`.
    """
    sa = a if isinstance(a, dict) else {i: Fraction(v) for i, v in enumerate(a) if v}
    sb = b if isinstance(b, dict) else {i: Fraction(v) for i, v in enumerate(b) if v}
    ip = {s: i for i, s in enumerate(cx.dim_simplices(p))}
    iq = {s: i for i, s in enumerate(cx.dim_simplices(q))}
    out = {}
    for idx, s in enumerate(cx.dim_simplices(p + q)):
        va = sa.get(ip.get(s[: p + 1], -1))
        if not va:
            continue
        vb = sb.get(iq.get(s[p:], -1))
        if not vb:
            continue
        out[idx] = va * vb
    if isinstance(a, dict):
        return out
    dense = [Fraction(0)] * len(cx.dim_simplices(p + q))
    for i, v in out.items():
        dense[i] = v
    return dense


class StageCohomology:
    """Lazy cohomology engine for one simplicial complex.

    Dimensions come from sparse coboundary ranks; representative
    cocycles and class coordinates are materialized per degree on
    demand.  A cone apex shortcut skips the large eliminations on
    contractible-through-truncation stages.
    """

    def __init__(self, cx: SimplicialComplex, use_cone_shortcut: bool = True):
        self.cx = cx
        self._cols = {}
        self._nupper = {}
        self._rank = {}
        self._reps = {}
        self._class_red = {}
        self._cone = cx.find_cone_apex() if use_cone_shortcut else None

    def n_cochains(self, k: int) -> int:
        return len(self.cx.dim_simplices(k))

    def _columns(self, k: int):
        if k not in self._cols:
            cols, nup = coboundary_columns(self.cx, k)
            self._cols[k] = cols
            self._nupper[k] = nup
        return self._cols[k], self._nupper[k]

    def rank_delta(self, k: int) -> int:
        if k < 0 or self.n_cochains(k) == 0:
            return 0
        if k not in self._rank:
            cols, nup = self._columns(k)
            red = ColumnReducer(nup)
            r = 0
            for c in cols:
                if red.add(c):
                    r += 1
            self._rank[k] = r
        return self._rank[k]

    def _cone_trivial(self, k: int) -> bool:
        """True if the cone shortcut certifies H^k = 0 (k >= 1)."""
        if self._cone is None or k < 1:
            return False
        _, complete = self._cone
        return complete or k < self.cx.top_dim

    def h_dim(self, k: int) -> int:
        if k < 0:
            return 0
        if k == 0 and self._cone is not None:
            return 1
        if self._cone_trivial(k):
            return 0
        n = self.n_cochains(k)
        if n == 0:
            return 0
        return n - self.rank_delta(k) - self.rank_delta(k - 1)

    def h_reps(self, k: int) -> list:
        """Representative cocycles (sparse dicts over k-simplex indices)."""
        if k in self._reps:
            return self._reps[k]
        if self.h_dim(k) == 0:
            self._reps[k] = []
            return []
        if k == 0 and self._cone is not None:
            # connected: the constant-1 cochain spans H^0
            rep = {i: Fraction(1) for i in range(self.n_cochains(0))}
            self._reps[0] = [rep]
            return self._reps[0]
        cols, _ = self._columns(k)
        kernel = ColumnReducer(self.n_cochains(k + 1) if self.n_cochains(k + 1) else 1,
                               record=True)
        for c in cols:
            kernel.add(c)
        quot = ColumnReducer(self.n_cochains(k))
        if k > 0:
            img_cols, _ = self._columns(k - 1)
            for c in img_cols:
                quot.add(c)
        reps = []
        for combo in kernel.kernel_combos:
            if quot.add(combo):
                reps.append(dict(combo))
        self._reps[k] = reps
        return reps

    def _class_reducer(self, k: int) -> ColumnReducer:
        """Reducer loaded with im(delta^{k-1}) then the chosen reps, with
        recording, so rep coefficients of any cocycle can be read off."""
        if k not in self._class_red:
            red = ColumnReducer(self.n_cochains(k), record=True)
            if k > 0:
                img_cols, _ = self._columns(k - 1)
                for c in img_cols:
                    red.add(c)
            offsets = []
            for rep in self.h_reps(k):
                offsets.append(red._ncols)
                if not red.add(rep):
                    raise InputError("dependent representative")  # pragma: no cover
            self._class_red[k] = (red, offsets)
        return self._class_red[k]

    def class_of(self, k: int, cochain: dict) -> list:
        """Coordinates of a cocycle's class in the chosen H^k basis."""
        if self.h_dim(k) == 0:
            return []
        red, offsets = self._class_reducer(k)
        sol = red.solve(cochain)
        if sol is None:
            raise InputError("cochain is not a cocycle modulo boundaries")
        return [sol.get(off, Fraction(0)) for off in offsets]

    def betti(self, k: int) -> int:
        return self.h_dim(k)


def cohomology_basis(cx: SimplicialComplex, deg: int) -> list:
    """Representative cocycles of H^deg as dense vectors."""
    eng = StageCohomology(cx, use_cone_shortcut=False)
    n = eng.n_cochains(deg)
    out = []
    for rep in eng.h_reps(deg):
        v = [Fraction(0)] * n
        for i, c in rep.items():
            v[i] = c
        out.append(v)
    return out


# ---------------------------------------------------------------------------
# Cohomology rings
# ---------------------------------------------------------------------------


@dataclass
class CohoClass:
    label: str
    cocycle: Optional[dict]  # sparse rep over simplex indices; None for abstract rings


class CohomologyRing:
    """Graded basis of H* with representatives and structure constants.

    Doubles as a formal CDGA (zero differential) for minimal-model
    construction: `dim`, `d_matrix`, `mul_basis`, `unit_coords` make up
    the finite-CDGA interface shared with Sullivan algebras.
    """

    zero_differential = True

    def __init__(self, max_deg: int, engine: Optional[StageCohomology] = None):
        self.max_deg = max_deg
        self.trunc = max_deg
        self.engine = engine
        self.basis: dict[int, list] = {}
        self.structure: dict[tuple, dict] = {}
        self._materialized: set = set()
        self._unit: Optional[list] = None

    # -- construction ---------------------------------------------------

    @staticmethod
    def from_complex(cx: SimplicialComplex, max_deg: int,
                     eager_through: Optional[int] = None) -> "CohomologyRing":
        ring = CohomologyRing(max_deg, StageCohomology(cx))
        hi = max_deg if eager_through is None else min(eager_through, max_deg)
        for k in range(hi + 1):
            ring.ensure_degree(k)
        ring._check_ring_axioms(hi)
        return ring

    @staticmethod
    def from_data(max_deg: int, labels: dict, structure: dict,
                  unit: Optional[Sequence] = None) -> "CohomologyRing":
        """Abstract ring: labels maps degree -> list of names; structure
        maps (p, i, q, j) -> {index: coeff} in degree p+q."""
        ring = CohomologyRing(max_deg)
        for k, names in labels.items():
            ring.basis[k] = [CohoClass(str(n), None) for n in names]
        for key, val in structure.items():
            ring.structure[tuple(key)] = {i: Fraction(c) for i, c in val.items() if c}
        ring._materialized = set(range(max_deg + 1))
        n0 = len(ring.basis.get(0, ()))
        if n0 != 1 or (unit is not None and list(unit) != [1]):
            raise InputError("abstract rings must have H^0 = Q with the unit as basis")
        ring._unit = [Fraction(1)]
        for p in range(ring.max_deg + 1):
            for i in range(len(ring.basis.get(p, ()))):
                ring.structure.setdefault((0, 0, p, i), {i: Fraction(1)})
                ring.structure.setdefault((p, i, 0, 0), {i: Fraction(1)})
        ring._check_ring_axioms(max_deg)
        return ring

    # -- lazy materialization --------------------------------------------

    def ensure_degree(self, k: int):
        if k in self._materialized or k > self.max_deg:
            return
        if self.engine is None:
            self._materialized.add(k)
            self.basis.setdefault(k, [])
            return
        reps = self.engine.h_reps(k)
        self.basis[k] = [CohoClass(f"h{k}_{i}", rep) for i, rep in enumerate(reps)]
        self._materialized.add(k)
        # structure constants against all previously materialized degrees
        for p in sorted(self._materialized):
            q = k  # new degree
            for (dp, dq) in ((p, q), (q, p)):
                if dp + dq > self.max_deg:
                    continue
                self._compute_structure(dp, dq)

    def _compute_structure(self, p: int, q: int):
        if self.dim(p) == 0 or self.dim(q) == 0 or p + q > self.max_deg:
            return
        self.ensure_degree(p + q)
        for i, ci in enumerate(self.basis[p]):
            for j, cj in enumerate(self.basis[q]):
                if (p, i, q, j) in self.structure:
                    continue
                if self.dim(p + q) == 0:
                    self.structure[(p, i, q, j)] = {}
                    continue
                prod = cup_product(self.engine.cx, ci.cocycle, p, cj.cocycle, q)
                coords = self.engine.class_of(p + q, prod)
                self.structure[(p, i, q, j)] = {
                    t: c for t, c in enumerate(coords) if c != 0
                }

    # -- ring axioms -----------------------------------------------------

    def _check_ring_axioms(self, through: int):
        # graded commutativity with exact Koszul signs
        for p in range(through + 1):
            for q in range(through + 1 - p):
                sign = -1 if (p % 2 and q % 2) else 1
                for i in range(self.dim(p)):
                    for j in range(self.dim(q)):
                        ab = self.mul_basis(p, i, q, j)
                        ba = self.mul_basis(q, j, p, i)
                        if {t: sign * c for t, c in ba.items()} != ab:
                            raise InputError(
                                f"graded commutativity fails at ({p},{i})x({q},{j})")
        # associativity on basis triples within truncation
        for p in range(1, through + 1):
            for q in range(1, through + 1 - p):
                for r in range(1, through + 1 - p - q):
                    for i in range(self.dim(p)):
                        for j in range(self.dim(q)):
                            for t in range(self.dim(r)):
                                left = self._mul_elem(p + q, self.mul_basis(p, i, q, j), r, t)
                                right = self._mul_elem_rev(p, i, q + r, self.mul_basis(q, j, r, t))
                                if left != right:
                                    raise InputError("associativity fails")

    def _mul_elem(self, p: int, coeffs: dict, q: int, j: int) -> dict:
        out: dict[int, Fraction] = {}
        for i, c in coeffs.items():
            for t, v in self.mul_basis(p, i, q, j).items():
                nv = out.get(t, Fraction(0)) + c * v
                if nv == 0:
                    out.pop(t, None)
                else:
                    out[t] = nv
        return out

    def _mul_elem_rev(self, p: int, i: int, q: int, coeffs: dict) -> dict:
        out: dict[int, Fraction] = {}
        for j, c in coeffs.items():
            for t, v in self.mul_basis(p, i, q, j).items():
                nv = out.get(t, Fraction(0)) + c * v
                if nv == 0:
                    out.pop(t, None)
                else:
                    out[t] = nv
        return out

    # -- finite-CDGA interface --------------------------------------------

    def dim(self, k: int) -> int:
        if k < 0:
            return 0
        if k > self.max_deg:
            raise TruncationError(f"degree {k} beyond ring truncation {self.max_deg}")
        self.ensure_degree(k)
        return len(self.basis.get(k, ()))

    def labels(self, k: int) -> list:
        self.ensure_degree(k)
        return [c.label for c in self.basis.get(k, ())]

    def d_matrix(self, k: int) -> RatMatrix:
        n_next = self.dim(k + 1) if k + 1 <= self.max_deg else 0
        return RatMatrix.zeros(n_next, self.dim(k))

    def mul_basis(self, p: int, i: int, q: int, j: int) -> dict:
        if p + q > self.max_deg:
            return {}
        self.ensure_degree(p)
        self.ensure_degree(q)
        key = (p, i, q, j)
        if key not in self.structure:
            if self.engine is not None:
                self._compute_structure(p, q)
            else:
                return {}
        return dict(self.structure.get(key, {}))

    def unit_coords(self) -> list:
        if self._unit is not None:
            return list(self._unit)
        if self.engine is None:
            raise InputError("abstract ring without unit")
        one = {i: Fraction(1) for i in range(self.engine.n_cochains(0))}
        self._unit = self.engine.class_of(0, one)
        return list(self._unit)

    def space(self, through: Optional[int] = None) -> GradedVectorSpace:
        hi = self.max_deg if through is None else through
        dims = {k: self.dim(k) for k in range(hi + 1)}
        labels = {k: tuple(self.labels(k)) for k in range(hi + 1) if dims[k]}
        return GradedVectorSpace.from_dims(dims, labels)

    def unital_core(self) -> "CohomologyRing":
        """The subring Q.1 + H^+, used as the formal CDGA of a stage.

        Collapses the degree-0 part to the unit line (the cohomology of
        the wedge of the stage's components); positive degrees and their
        products are untouched.
        """
        if self.engine is not None and self.dim(0) == 1:
            return self
        core = CohomologyRing(self.max_deg, self.engine)
        core.basis = dict(self.basis)
        core.basis[0] = [CohoClass("one", None if self.engine is None else
                                   {i: Fraction(1) for i in range(self.engine.n_cochains(0))})]
        core._materialized = set(self._materialized) | {0}
        core._unit = [Fraction(1)]
        for (p, i, q, j), v in self.structure.items():
            if p >= 1 and q >= 1:
                core.structure[(p, i, q, j)] = dict(v)
        for p in range(core.max_deg + 1):
            ncells = len(core.basis.get(p, ()))
            for i in range(ncells):
                core.structure[(0, 0, p, i)] = {i: Fraction(1)}
                core.structure[(p, i, 0, 0)] = {i: Fraction(1)}
        return core

    def dump(self) -> dict:
        """Structured debug dump of everything materialized."""
        return {
            "max_deg": self.max_deg,
            "dims": {k: len(v) for k, v in sorted(self.basis.items())},
            "labels": {k: [c.label for c in v] for k, v in sorted(self.basis.items())},
            "products": {
                f"({p},{i})*({q},{j})": {str(t): str(c) for t, c in v.items()}
                for (p, i, q, j), v in sorted(self.structure.items())
                if v
            },
        }


def cohomology_ring(cx: SimplicialComplex, max_deg: int) -> CohomologyRing:
    return CohomologyRing.from_complex(cx, max_deg)


def ring_from_json(data: dict, min_max_deg: int = 0) -> CohomologyRing:
    """Abstract ring from its file form: named classes per degree and
    products of positive classes; omitted products are zero and the
    Koszul-symmetric counterpart of each listed product is filled in.
    """
    classes = data.get("classes", [])
    max_deg = int(data.get("max_degree",
                           max([c["degree"] for c in classes] + [min_max_deg])))
    if max_deg < min_max_deg:
        raise InputError(
            f"ring file covers degrees <= {max_deg} but {min_max_deg} are needed")
    labels: dict[int, list] = {0: ["one"]}
    where = {}
    for c in classes:
        name, deg = str(c["name"]), int(c["degree"])
        if deg < 1 or deg > max_deg:
            raise InputError(f"class {name} has degree {deg} outside 1..{max_deg}")
        if name in where:
            raise InputError(f"duplicate class name {name}")
        labels.setdefault(deg, []).append(name)
        where[name] = (deg, len(labels[deg]) - 1)
    def lookup(name):
        try:
            return where[str(name)]
        except KeyError:
            raise InputError(f"unknown class name {name!r}") from None

    structure = {}
    for prod in data.get("products", []):
        (p, i) = lookup(prod["left"])
        (q, j) = lookup(prod["right"])
        if p + q > max_deg:
            raise InputError("product lands beyond max_degree")
        result = {}
        for term in prod.get("result", []):
            (r, t) = lookup(term["class"])
            if r != p + q:
                raise InputError("product term has wrong degree")
            result[t] = Fraction(str(term.get("coeff", 1)))
        structure[(p, i, q, j)] = result
    sign_filled = dict(structure)
    for (p, i, q, j), val in structure.items():
        key = (q, j, p, i)
        if key not in sign_filled:
            sign = -1 if (p % 2 and q % 2) else 1
            sign_filled[key] = {t: sign * c for t, c in val.items()}
    return CohomologyRing.from_data(max_deg, labels, sign_filled)


def induced_ring_map(ring_small: CohomologyRing, ring_big: CohomologyRing,
                     max_deg: Optional[int] = None, verify: bool = True) -> GradedLinearMap:
    """Map H*(big stage) -> H*(small stage) induced by the inclusion of
    the small stage, by restricting representative cocycles.
    """
    if ring_small.engine is None or ring_big.engine is None:
        raise InputError("induced maps need complex-backed rings")
    hi = min(ring_small.max_deg, ring_big.max_deg) if max_deg is None else max_deg
    small = ring_small.engine
    big = ring_big.engine
    mats = {}
    for k in range(hi + 1):
        nb = ring_big.dim(k)
        ns = ring_small.dim(k)
        if nb == 0 or ns == 0:
            continue
        small_index = {s: i for i, s in enumerate(small.cx.dim_simplices(k))}
        big_simplices = big.cx.dim_simplices(k)
        cols = []
        for cls in ring_big.basis[k]:
            restricted = {}
            for bi, c in cls.cocycle.items():
                si = small_index.get(big_simplices[bi])
                if si is not None:
                    restricted[si] = c
            cols.append(small.class_of(k, restricted))
        m = RatMatrix.from_columns(cols, rows=ns)
        if not m.is_zero():
            mats[k] = m
    out = GradedLinearMap(ring_big.space(hi), ring_small.space(hi), mats)
    if verify:
        _verify_multiplicative(out, ring_small, ring_big, hi)
    return out


def _verify_multiplicative(f: GradedLinearMap, ring_small: CohomologyRing,
                           ring_big: CohomologyRing, hi: int):
    for p in range(hi + 1):
        for q in range(hi + 1 - p):
            for i in range(ring_big.dim(p)):
                for j in range(ring_big.dim(q)):
                    prod = ring_big.mul_basis(p, i, q, j)
                    lhs = [Fraction(0)] * ring_small.dim(p + q)
                    for t, c in prod.items():
                        col = f.matrix(p + q).column(t)
                        for r in range(len(lhs)):
                            lhs[r] += c * col[r]
                    fi = f.matrix(p).column(i)
                    fj = f.matrix(q).column(j)
                    rhs = [Fraction(0)] * ring_small.dim(p + q)
                    for a, ca in enumerate(fi):
                        if ca == 0:
                            continue
                        for b, cb in enumerate(fj):
                            if cb == 0:
                                continue
                            for t, c in ring_small.mul_basis(p, a, q, b).items():
                                rhs[t] += ca * cb * c
                    if lhs != rhs:
                        raise InputError(
                            f"induced map not multiplicative at ({p},{i})x({q},{j})")
