"""Free graded-commutative differential algebras.

Monomials in named generators (degrees >= 1) are kept in a canonical
form: generator indices sorted by (degree, name), odd generators at
most once, Koszul signs normalized away during sorting.  Polynomials
are sparse dicts {monomial: Fraction}.

Degree bases are materialized through an explicit truncation degree;
symbolic polynomial arithmetic (multiplication, Leibniz differential,
the d^2 = 0 check) is exact and truncation-free.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import DimensionMismatch, InputError, TruncationError
from .gvec import GradedLinearMap, GradedVectorSpace
from .ratlin import ColumnReducer, RatMatrix, kernel_basis, quotient_basis

Monomial = tuple  # sorted generator indices
Poly = dict  # Monomial -> Fraction


def poly_add(p: Poly, q: Poly) -> Poly:
    out = dict(p)
    for m, c in q.items():
        nc = out.get(m, Fraction(0)) + c
        if nc == 0:
            out.pop(m, None)
        else:
            out[m] = nc
    return out


def poly_scale(p: Poly, c) -> Poly:
    c = Fraction(c)
    if c == 0:
        return {}
    return {m: c * v for m, v in p.items()}


class SullivanAlgebra:
    """Free CDGA on ordered generators with a degree +1 differential.

    Generators are stored sorted by (degree, name); the differential is
    a polynomial per generator, validated so that the degree is raised
    by exactly one and d(d(g)) = 0 identically.
    """

    def __init__(self, generators: Sequence, differential: dict, truncation_degree: int,
                 _validated: bool = False):
        gens = [(str(n), int(d)) for n, d in generators]
        if len({n for n, _ in gens}) != len(gens):
            raise InputError("duplicate generator names")
        if any(d < 1 for _, d in gens):
            raise InputError("generator degrees must be >= 1")
        self.generators = tuple(sorted(gens, key=lambda nd: (nd[1], nd[0])))
        self.index = {n: i for i, (n, _) in enumerate(self.generators)}
        self.degrees = tuple(d for _, d in self.generators)
        self.names = tuple(n for n, _ in self.generators)
        if truncation_degree < 1:
            raise InputError("truncation degree must be >= 1")
        self.trunc = truncation_degree
        self.diff: dict[int, Poly] = {}
        for name, poly in differential.items():
            if name not in self.index:
                raise InputError(f"differential on unknown generator {name!r}")
            self.diff[self.index[name]] = self._canon_poly(poly)
        self._monomials: dict[int, list] = {}
        self._mono_index: dict[int, dict] = {}
        self._dmat: dict[int, RatMatrix] = {}
        self._mulcache: dict = {}
        if not _validated:
            self._validate()

    # -- canonical monomial arithmetic ---------------------------------

    def gen_degree(self, i: int) -> int:
        return self.degrees[i]

    def monomial_degree(self, m: Monomial) -> int:
        return sum(self.degrees[i] for i in m)

    def sort_monomial(self, indices: Sequence[int]) -> Optional[tuple]:
        """Canonicalize an arbitrary index sequence: (monomial, sign) or
        None when an odd generator repeats."""
        sign = 1
        lst = list(indices)
        # insertion sort, counting odd-odd transpositions
        for i in range(1, len(lst)):
            j = i
            while j > 0 and lst[j - 1] > lst[j]:
                if self.degrees[lst[j - 1]] % 2 and self.degrees[lst[j]] % 2:
                    sign = -sign
                lst[j - 1], lst[j] = lst[j], lst[j - 1]
                j -= 1
        for a, b in zip(lst, lst[1:]):
            if a == b and self.degrees[a] % 2:
                return None
        return tuple(lst), sign

    def mul_monomials(self, m1: Monomial, m2: Monomial) -> Optional[tuple]:
        """(product monomial, Koszul sign) or None when it vanishes."""
        key = (m1, m2)
        hit = self._mulcache.get(key, 0)
        if hit != 0:
            return hit
        odd_suffix = 0
        suffix_odds = []
        for i in range(len(m1) - 1, -1, -1):
            if self.degrees[m1[i]] % 2:
                odd_suffix += 1
            suffix_odds.append(odd_suffix)
        suffix_odds.reverse()  # suffix_odds[i] = #odd in m1[i:]
        merged = []
        sign = 1
        i = j = 0
        res = None
        while True:
            if i < len(m1) and (j >= len(m2) or m1[i] <= m2[j]):
                g = m1[i]
                i += 1
            elif j < len(m2):
                g = m2[j]
                if self.degrees[g] % 2 and i < len(m1) and suffix_odds[i] % 2:
                    sign = -sign
                j += 1
            else:
                break
            if merged and merged[-1] == g and self.degrees[g] % 2:
                self._mulcache[key] = None
                return None
            merged.append(g)
        res = (tuple(merged), sign)
        self._mulcache[key] = res
        return res

    def poly_mul(self, p: Poly, q: Poly) -> Poly:
        out: Poly = {}
        for m1, c1 in p.items():
            for m2, c2 in q.items():
                r = self.mul_monomials(m1, m2)
                if r is None:
                    continue
                m, s = r
                nc = out.get(m, Fraction(0)) + s * c1 * c2
                if nc == 0:
                    out.pop(m, None)
                else:
                    out[m] = nc
        return out

    def d_monomial(self, m: Monomial) -> Poly:
        out: Poly = {}
        sign = 1
        for pos, g in enumerate(m):
            dg = self.diff.get(g)
            if dg:
                prefix, suffix = m[:pos], m[pos + 1:]
                for mono, coeff in dg.items():
                    r1 = self.mul_monomials(prefix, mono)
                    if r1 is None:
                        continue
                    r2 = self.mul_monomials(r1[0], suffix)
                    if r2 is None:
                        continue
                    total = sign * r1[1] * r2[1] * coeff
                    nc = out.get(r2[0], Fraction(0)) + total
                    if nc == 0:
                        out.pop(r2[0], None)
                    else:
                        out[r2[0]] = nc
            if self.degrees[g] % 2:
                sign = -sign
        return out

    def d_poly(self, p: Poly) -> Poly:
        out: Poly = {}
        for m, c in p.items():
            out = poly_add(out, poly_scale(self.d_monomial(m), c))
        return out

    def _canon_poly(self, terms) -> Poly:
        """Accepts {'coeff','monomial'} dicts, (coeff, names) pairs, or an
        already-canonical {index-tuple: Fraction} dict."""
        if isinstance(terms, dict):
            out: Poly = {}
            for m, c in terms.items():
                idxs = [self.index[g] if isinstance(g, str) else g for g in m]
                res = self.sort_monomial(idxs)
                if res is None:
                    raise InputError(f"odd generator squared in monomial {m}")
                mono, sign = res
                c = sign * Fraction(c)
                if c != 0:
                    out[mono] = out.get(mono, Fraction(0)) + c
            return {m: c for m, c in out.items() if c != 0}
        out = {}
        for term in terms:
            if isinstance(term, dict):
                coeff, names = term["coeff"], term["monomial"]
            else:
                coeff, names = term
            try:
                idxs = [self.index[str(n)] for n in names]
            except KeyError as e:
                raise InputError(f"unknown generator in monomial: {e}")
            res = self.sort_monomial(idxs)
            if res is None:
                raise InputError(f"odd generator squared in monomial {names}")
            mono, sign = res
            c = sign * Fraction(coeff)
            if c != 0:
                out[mono] = out.get(mono, Fraction(0)) + c
        return {m: c for m, c in out.items() if c != 0}

    def _validate(self):
        for i, poly in self.diff.items():
            want = self.degrees[i] + 1
            for m in poly:
                if self.monomial_degree(m) != want:
                    raise InputError(
                        f"differential of {self.names[i]} has a term of degree "
                        f"{self.monomial_degree(m)}, expected {want}")
        for i in range(len(self.generators)):
            dd = self.d_poly(self.diff.get(i, {}))
            if dd:
                raise InputError(f"d(d({self.names[i]})) != 0")

    # -- degree bases ---------------------------------------------------

    def monomials(self, deg: int) -> list:
        if deg > self.trunc:
            raise TruncationError(f"degree {deg} beyond truncation {self.trunc}")
        if deg in self._monomials:
            return self._monomials[deg]
        out: list = []

        def extend(start: int, remaining: int, acc: list):
            if remaining == 0:
                out.append(tuple(acc))
                return
            for g in range(start, len(self.generators)):
                d = self.degrees[g]
                if d > remaining:
                    continue
                acc.append(g)
                extend(g + 1 if d % 2 else g, remaining - d, acc)
                acc.pop()

        if deg >= 0:
            extend(0, deg, [])
        self._monomials[deg] = out
        self._mono_index[deg] = {m: i for i, m in enumerate(out)}
        return out

    def monomial_label(self, m: Monomial) -> str:
        if not m:
            return "1"
        parts = []
        for g, grp in itertools.groupby(m):
            k = len(list(grp))
            parts.append(self.names[g] if k == 1 else f"{self.names[g]}^{k}")
        return "*".join(parts)

    def poly_to_vec(self, p: Poly, deg: int) -> list:
        self.monomials(deg)
        idx = self._mono_index[deg]
        vec = [Fraction(0)] * len(idx)
        for m, c in p.items():
            if self.monomial_degree(m) != deg:
                raise DimensionMismatch("inhomogeneous polynomial")
            vec[idx[m]] = c
        return vec

    def vec_to_poly(self, vec: Sequence, deg: int) -> Poly:
        basis = self.monomials(deg)
        return {basis[i]: Fraction(c) for i, c in enumerate(vec) if c != 0}

    # -- finite-CDGA interface -------------------------------------------

    def dim(self, k: int) -> int:
        if k < 0:
            return 0
        return len(self.monomials(k))

    def labels(self, k: int) -> list:
        return [self.monomial_label(m) for m in self.monomials(k)]

    def d_matrix(self, k: int) -> RatMatrix:
        if k in self._dmat:
            return self._dmat[k]
        rows = self.dim(k + 1) if k + 1 <= self.trunc else 0
        cols = []
        for m in self.monomials(k):
            dm = self.d_monomial(m)
            cols.append(self.poly_to_vec(dm, k + 1) if rows else [])
        mat = RatMatrix.from_columns(cols, rows=rows) if cols else RatMatrix.zeros(rows, 0)
        self._dmat[k] = mat
        return mat

    def mul_basis(self, p: int, i: int, q: int, j: int) -> dict:
        if p + q > self.trunc:
            return {}
        m1 = self.monomials(p)[i]
        m2 = self.monomials(q)[j]
        r = self.mul_monomials(m1, m2)
        if r is None:
            return {}
        self.monomials(p + q)
        return {self._mono_index[p + q][r[0]]: Fraction(r[1])}

    def unit_coords(self) -> list:
        return [Fraction(1)]

    # -- linear part and minimality ----------------------------------------

    def generator_space(self) -> GradedVectorSpace:
        dims: dict[int, int] = {}
        labels: dict[int, list] = {}
        for name, d in self.generators:
            dims[d] = dims.get(d, 0) + 1
            labels.setdefault(d, []).append(name)
        return GradedVectorSpace.from_dims(dims, {k: tuple(v) for k, v in labels.items()})

    def gen_offset(self, i: int) -> tuple:
        """(degree, position) of generator i within its degree block."""
        d = self.degrees[i]
        pos = sum(1 for j in range(i) if self.degrees[j] == d)
        return d, pos

    def is_minimal(self) -> bool:
        """No linear term in any differential: im(d) in wedge^{>=2}."""
        return all(
            all(len(m) >= 2 for m in poly)
            for poly in self.diff.values()
        )

    def dump(self) -> dict:
        return {
            "generators": [{"name": n, "degree": d} for n, d in self.generators],
            "differential": {
                self.names[i]: [
                    {"coeff": str(c), "monomial": [self.names[g] for g in m]}
                    for m, c in sorted(p.items())
                ]
                for i, p in sorted(self.diff.items()) if p
            },
            "truncation": self.trunc,
        }


def make_sullivan(generators, differential, truncation_degree) -> SullivanAlgebra:
    return SullivanAlgebra(generators, differential, truncation_degree)


def monomial_basis(alg: SullivanAlgebra, deg: int) -> list:
    """Canonical monomials of the given total degree, in the fixed
    deterministic order."""
    return alg.monomials(deg)


def linear_part(alg: SullivanAlgebra):
    """(V, Q(d)): the generator space and the word-length-1 component of
    the differential as matrices V^k -> V^{k+1}."""
    space = alg.generator_space()
    by_deg: dict[int, list] = {}
    for i, (_, d) in enumerate(alg.generators):
        by_deg.setdefault(d, []).append(i)
    qmats: dict[int, RatMatrix] = {}
    for d, idxs in by_deg.items():
        tgt = by_deg.get(d + 1, [])
        cols = []
        for i in idxs:
            col = [Fraction(0)] * len(tgt)
            for m, c in alg.diff.get(i, {}).items():
                if len(m) == 1:
                    col[tgt.index(m[0])] = c
            cols.append(col)
        m = RatMatrix.from_columns(cols, rows=len(tgt))
        if not m.is_zero():
            qmats[d] = m
    return space, qmats


def is_minimal(alg: SullivanAlgebra) -> bool:
    return alg.is_minimal()


# ---------------------------------------------------------------------------
# Morphisms
# ---------------------------------------------------------------------------


class CDGAMorphism:
    """Degree-preserving algebra map from a Sullivan algebra into any
    finite CDGA (another Sullivan algebra or a cohomology ring).

    Images are coordinate vectors in the target's degree basis, one per
    source generator; monomial images are folded out of products in the
    target and cached.
    """

    def __init__(self, source: SullivanAlgebra, target, images: Sequence,
                 check: bool = True):
        self.source = source
        self.target = target
        if len(images) != len(source.generators):
            raise InputError("one image per generator required")
        self.images = []
        for i, vec in enumerate(images):
            d = source.degrees[i]
            vec = [Fraction(x) for x in vec]
            if len(vec) != target.dim(d):
                raise DimensionMismatch(
                    f"image of {source.names[i]} has wrong length at degree {d}")
            self.images.append(vec)
        self._mono_image: dict = {}
        self._mats: dict[int, RatMatrix] = {}
        if check:
            self.verify_chain_map()

    def max_checkable(self) -> int:
        return min(self.source.trunc, self.target.trunc)

    def _image_of_monomial(self, m: Monomial) -> dict:
        """Sparse coords of phi(m) in the target basis of its degree."""
        if m in self._mono_image:
            return self._mono_image[m]
        if not m:
            res = {i: c for i, c in enumerate(self.target.unit_coords()) if c != 0}
            self._mono_image[m] = res
            return res
        head, tail = m[0], m[1:]
        dh = self.source.degrees[head]
        acc = {i: c for i, c in enumerate(self.images[head]) if c != 0}
        deg = dh
        for g in tail:
            dg = self.source.degrees[g]
            img = {i: c for i, c in enumerate(self.images[g]) if c != 0}
            nxt: dict[int, Fraction] = {}
            for i, ci in acc.items():
                for j, cj in img.items():
                    for t, v in self.target.mul_basis(deg, i, dg, j).items():
                        nv = nxt.get(t, Fraction(0)) + ci * cj * v
                        if nv == 0:
                            nxt.pop(t, None)
                        else:
                            nxt[t] = nv
            acc = nxt
            deg += dg
            if not acc:
                break
        self._mono_image[m] = acc
        return acc

    def matrix(self, k: int) -> RatMatrix:
        if k in self._mats:
            return self._mats[k]
        rows = self.target.dim(k)
        cols = []
        for m in self.source.monomials(k):
            img = self._image_of_monomial(m)
            col = [Fraction(0)] * rows
            for i, c in img.items():
                col[i] = c
            cols.append(col)
        mat = RatMatrix.from_columns(cols, rows=rows)
        self._mats[k] = mat
        return mat

    def apply_vec(self, k: int, vec: Sequence) -> list:
        return self.matrix(k).apply(vec)

    def apply_poly(self, p: Poly) -> dict:
        """Image of a homogeneous polynomial as sparse target coords."""
        out: dict[int, Fraction] = {}
        for m, c in p.items():
            for i, v in self._image_of_monomial(m).items():
                nv = out.get(i, Fraction(0)) + c * v
                if nv == 0:
                    out.pop(i, None)
                else:
                    out[i] = nv
        return out

    def verify_chain_map(self, through: Optional[int] = None):
        hi = self.max_checkable() - 1 if through is None else through
        for k in range(hi + 1):
            if self.source.dim(k) == 0 and self.source.dim(k + 1) == 0:
                continue  # both sides are empty maps
            lhs = self.matrix(k + 1).matmul(self.source.d_matrix(k))
            rhs = self.target.d_matrix(k).matmul(self.matrix(k))
            if lhs != rhs:
                raise InputError(f"morphism does not commute with d at degree {k}")

    def compose_after(self, inner: "CDGAMorphism") -> "CDGAMorphism":
        """self o inner, where inner's target is self's source."""
        if inner.target is not self.source:
            raise InputError("composition mismatch")
        images = []
        for i in range(len(inner.source.generators)):
            d = inner.source.degrees[i]
            images.append(self.apply_vec(d, inner.images[i]))
        return CDGAMorphism(inner.source, self.target, images, check=False)


def linear_part_map(phi: CDGAMorphism) -> GradedLinearMap:
    """Word-length-1 coefficients of generator images; Q is functorial."""
    src = phi.source.generator_space()
    if isinstance(phi.target, SullivanAlgebra):
        tgt_space = phi.target.generator_space()
        by_deg: dict[int, list] = {}
        for i, (_, d) in enumerate(phi.target.generators):
            by_deg.setdefault(d, []).append(i)
        mats: dict[int, RatMatrix] = {}
        src_by_deg: dict[int, list] = {}
        for i, (_, d) in enumerate(phi.source.generators):
            src_by_deg.setdefault(d, []).append(i)
        for d, idxs in src_by_deg.items():
            tgt = by_deg.get(d, [])
            mono = phi.target.monomials(d)
            cols = []
            for i in idxs:
                col = [Fraction(0)] * len(tgt)
                for mi, c in enumerate(phi.images[i]):
                    if c != 0 and len(mono[mi]) == 1:
                        col[tgt.index(mono[mi][0])] = c
                cols.append(col)
            m = RatMatrix.from_columns(cols, rows=len(tgt))
            if not m.is_zero():
                mats[d] = m
        return GradedLinearMap(src, tgt_space, mats)
    raise InputError("linear part of a morphism needs a free target")


# ---------------------------------------------------------------------------
# Cohomology of a finite CDGA
# ---------------------------------------------------------------------------


class CdgaCohomology:
    """Kernel-mod-image cohomology of anything with the finite-CDGA
    interface, with representatives and class coordinates."""

    def __init__(self, alg, max_deg: int):
        self.alg = alg
        # a zero differential is exact at the truncation edge; otherwise
        # degree max_deg needs d into max_deg + 1
        limit = alg.trunc if getattr(alg, "zero_differential", False) else alg.trunc - 1
        if max_deg > limit:
            raise TruncationError(
                f"cohomology through {max_deg} needs truncation > {max_deg}")
        self.max_deg = max_deg
        self._reps: dict[int, list] = {}
        self._red: dict[int, tuple] = {}

    def dim(self, k: int) -> int:
        return len(self.reps(k))

    def reps(self, k: int) -> list:
        """Representative cocycles as dense coordinate vectors."""
        if k in self._reps:
            return self._reps[k]
        if k < 0 or k > self.max_deg:
            return []
        n = self.alg.dim(k)
        if n == 0:
            self._reps[k] = []
            return []
        if getattr(self.alg, "zero_differential", False):
            # H^k is the degree itself; avoids touching degree k+1
            reps = []
            for i in range(n):
                v = [Fraction(0)] * n
                v[i] = Fraction(1)
                reps.append(v)
            self._reps[k] = reps
            return reps
        ker = kernel_basis(self.alg.d_matrix(k))
        img = self.alg.d_matrix(k - 1) if k > 0 else RatMatrix.zeros(n, 0)
        keep = quotient_basis(n, img, ker)
        self._reps[k] = [ker.column(j) for j in keep]
        return self._reps[k]

    def _class_reducer(self, k: int):
        if k not in self._red:
            n = self.alg.dim(k)
            red = ColumnReducer(n, record=True)
            if k > 0 and not getattr(self.alg, "zero_differential", False):
                img = self.alg.d_matrix(k - 1)
                for j in range(img.cols):
                    red.add(img.column(j))
            offsets = []
            for rep in self.reps(k):
                offsets.append(red._ncols)
                red.add(rep)
            self._red[k] = (red, offsets)
        return self._red[k]

    def class_of(self, k: int, vec) -> list:
        """Coordinates of a cocycle's class in the chosen basis."""
        if self.dim(k) == 0:
            return []
        red, offsets = self._class_reducer(k)
        sol = red.solve(vec if isinstance(vec, dict) else
                        {i: Fraction(c) for i, c in enumerate(vec) if c})
        if sol is None:
            raise InputError("vector is not a cocycle modulo exact elements")
        return [sol.get(off, Fraction(0)) for off in offsets]

    def space(self) -> GradedVectorSpace:
        return GradedVectorSpace.from_dims({k: self.dim(k) for k in range(self.max_deg + 1)})


def cdga_cohomology(alg: SullivanAlgebra, max_deg: int):
    """Graded vector space of H^* with representative polynomials."""
    h = CdgaCohomology(alg, max_deg)
    dims = {k: h.dim(k) for k in range(max_deg + 1)}
    reps = {
        k: [alg.vec_to_poly(r, k) for r in h.reps(k)]
        for k in range(max_deg + 1) if dims[k]
    }
    return GradedVectorSpace.from_dims(dims), reps


def induced_cohomology_map(phi: CDGAMorphism, h_src: CdgaCohomology,
                           h_tgt: CdgaCohomology, max_deg: int) -> GradedLinearMap:
    """H(phi) on the chosen representative bases."""
    mats = {}
    for k in range(max_deg + 1):
        if h_src.dim(k) == 0 or h_tgt.dim(k) == 0:
            continue
        cols = [h_tgt.class_of(k, phi.apply_vec(k, rep)) for rep in h_src.reps(k)]
        m = RatMatrix.from_columns(cols, rows=h_tgt.dim(k))
        if not m.is_zero():
            mats[k] = m
    return GradedLinearMap(
        GradedVectorSpace.from_dims({k: h_src.dim(k) for k in range(max_deg + 1)}),
        GradedVectorSpace.from_dims({k: h_tgt.dim(k) for k in range(max_deg + 1)}),
        mats,
    )


def check_homotopy_necessary(phi0: CDGAMorphism, phi1: CDGAMorphism,
                             max_deg: Optional[int] = None) -> dict:
    """Necessary conditions for phi0 ~ phi1: equal maps on cohomology,
    and equal linear parts (the latter is only a valid necessary
    condition when H^1(source) = 0).  Neither is claimed sufficient.
    """
    if phi0.source is not phi1.source or phi0.target is not phi1.target:
        raise InputError("morphisms must share source and target")
    hi = min(phi0.max_checkable(), phi1.max_checkable()) - 1 if max_deg is None else max_deg
    h_src = CdgaCohomology(phi0.source, hi)
    h_tgt = CdgaCohomology(phi0.target, hi)
    h0 = induced_cohomology_map(phi0, h_src, h_tgt, hi)
    h1 = induced_cohomology_map(phi1, h_src, h_tgt, hi)
    h_equal = h0.equals(h1)
    q_equal = None
    if isinstance(phi0.target, SullivanAlgebra):
        q_equal = linear_part_map(phi0).equals(linear_part_map(phi1))
    return {
        "h_equal": h_equal,
        "q_equal": q_equal,
        "h1_source_zero": h_src.dim(1) == 0,
        "necessary_conditions_met": h_equal and (q_equal is not False),
    }
