"""Inductive construction of degree-truncated minimal models and of
representatives of CDGA morphisms between them.

The input is anything with the finite-CDGA interface (a cohomology ring
with zero differential, or a Sullivan algebra).  Generators are adjoined
in nondecreasing degree: an iterated degree-1 extension first (capped,
with an explicit non-convergence flag, since minimal models of
non-nilpotent fundamental groups are infinitely generated), then one
pass per degree k >= 2 adding closed generators onto the cokernel of
H^k(rho) followed by generators killing the kernel of H^{k+1}(rho).
Minimality of the k >= 2 passes is automatic: no degree-(k+1) generator
exists yet, so the new differentials have no linear term; the degree-1
stage lands in words of length two by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cdga import CDGAMorphism, CdgaCohomology, SullivanAlgebra
from .errors import CapExceeded, InputError, LiftError
from .ratlin import RatMatrix, kernel_basis, quotient_basis, rank, solve


@dataclass
class MinimalModel:
    model: SullivanAlgebra
    rho: CDGAMorphism  # model -> input, cohomology-exact through verified_degree
    input: object
    verified_degree: int
    deg1_converged: bool
    report: dict
    h_input: CdgaCohomology
    h_model: CdgaCohomology


class _Builder:
    """Accumulates generators in addition order; names are zero-padded
    so the algebra's canonical (degree, name) order equals addition
    order and differentials only mention earlier generators."""

    def __init__(self, target):
        self.target = target
        self.entries = []  # (name, degree, diff poly in name-tuples, rho coords)
        self.counters: dict[int, int] = {}

    def add(self, degree: int, diff_poly: dict, rho_vec) -> str:
        c = self.counters.get(degree, 0)
        self.counters[degree] = c + 1
        name = f"v{degree}_{c:03d}"
        self.entries.append((name, degree, diff_poly, list(rho_vec)))
        return name

    def build(self, trunc: int):
        gens = [(n, d) for n, d, _, _ in self.entries]
        diff = {n: [(coeff, list(names)) for names, coeff in p.items()]
                for n, d, p, _ in self.entries if p}
        alg = SullivanAlgebra(gens, diff, trunc)
        order = sorted(range(len(self.entries)),
                       key=lambda i: (self.entries[i][1], self.entries[i][0]))
        assert order == sorted(order)  # addition order is canonical order
        images = [self.entries[i][3] for i in order]
        rho = CDGAMorphism(alg, self.target, images, check=True)
        return alg, rho


def _h_map_matrix(rho: CDGAMorphism, h_model: CdgaCohomology,
                  h_input: CdgaCohomology, k: int) -> RatMatrix:
    cols = [h_input.class_of(k, rho.apply_vec(k, rep)) for rep in h_model.reps(k)]
    return RatMatrix.from_columns(cols, rows=h_input.dim(k))


def minimal_model(a, max_deg: int, deg1_cap: int = 8,
                  gen_cap: int = 512) -> MinimalModel:
    """Minimal Sullivan model of a path-connected finite CDGA, with a
    quasi-isomorphism onto it verified degreewise through max_deg."""
    h_input = CdgaCohomology(a, max_deg + 1)
    if h_input.dim(0) != 1 or all(c == 0 for c in h_input.class_of(0, a.unit_coords())):
        raise InputError("input is not path-connected: H^0 != Q")

    builder = _Builder(a)
    deg1_converged = True

    def total_gens():
        return len(builder.entries)

    # -- degree 1: iterated extension ---------------------------------
    if max_deg >= 1 and h_input.dim(1) > 0:
        for rep in h_input.reps(1):
            builder.add(1, {}, rep)
        deg1_converged = False
        for iteration in range(deg1_cap + 1):
            alg, rho = builder.build(trunc=3)
            h_model = CdgaCohomology(alg, 2)
            if h_model.dim(2) == 0:
                deg1_converged = True
                break
            hk = _h_map_matrix(rho, h_model, h_input, 2)
            ker = kernel_basis(hk)
            if ker.cols == 0:
                deg1_converged = True
                break
            if iteration == deg1_cap:
                break
            if total_gens() + ker.cols > gen_cap:
                raise CapExceeded(f"generator cap {gen_cap} exceeded in degree 1")
            for j in range(ker.cols):
                combo = ker.column(j)
                zeta_vec = [Fraction(0)] * alg.dim(2)
                for i, c in enumerate(combo):
                    if c != 0:
                        for r, v in enumerate(h_model.reps(2)[i]):
                            zeta_vec[r] += c * v
                zeta = alg.vec_to_poly(zeta_vec, 2)
                zeta_names = {tuple(alg.names[g] for g in m): c for m, c in zeta.items()}
                rho_rhs = rho.apply_vec(2, zeta_vec)
                x = solve(a.d_matrix(1), rho_rhs)
                if x is None:
                    raise InputError("d x = rho(d z) unsolvable: invariant breach")
                builder.add(1, zeta_names, x)

    # -- degrees 2..max_deg: one pass each ------------------------------
    for k in range(2, max_deg + 1):
        alg, rho = builder.build(trunc=k + 2)
        h_model = CdgaCohomology(alg, k + 1)
        # cokernel of H^k(rho): new closed generators
        if h_input.dim(k) > 0:
            hk = _h_map_matrix(rho, h_model, h_input, k)
            coker = quotient_basis(h_input.dim(k), hk,
                                   RatMatrix.identity(h_input.dim(k)))
            if total_gens() + len(coker) > gen_cap:
                raise CapExceeded(f"generator cap {gen_cap} exceeded at degree {k}")
            for idx in coker:
                builder.add(k, {}, h_input.reps(k)[idx])
            if coker:
                alg, rho = builder.build(trunc=k + 2)
                h_model = CdgaCohomology(alg, k + 1)
        # kernel of H^{k+1}(rho): new generators with decomposable d
        if h_model.dim(k + 1) > 0:
            hk1 = _h_map_matrix(rho, h_model, h_input, k + 1)
            ker = kernel_basis(hk1)
            if total_gens() + ker.cols > gen_cap:
                raise CapExceeded(f"generator cap {gen_cap} exceeded at degree {k}")
            for j in range(ker.cols):
                combo = ker.column(j)
                zeta_vec = [Fraction(0)] * alg.dim(k + 1)
                for i, c in enumerate(combo):
                    if c != 0:
                        for r, v in enumerate(h_model.reps(k + 1)[i]):
                            zeta_vec[r] += c * v
                zeta = alg.vec_to_poly(zeta_vec, k + 1)
                zeta_names = {tuple(alg.names[g] for g in m): c for m, c in zeta.items()}
                rho_rhs = rho.apply_vec(k + 1, zeta_vec)
                x = solve(a.d_matrix(k), rho_rhs)
                if x is None:
                    raise InputError("d x = rho(d z) unsolvable: invariant breach")
                builder.add(k, zeta_names, x)

    alg, rho = builder.build(trunc=max_deg + 2)
    if not alg.is_minimal():
        raise InputError("constructed model is not minimal: invariant breach")
    h_model = CdgaCohomology(alg, max_deg + 1)
    mm = MinimalModel(alg, rho, a, -1, deg1_converged, {}, h_input, h_model)
    mm.report = verify_quasi_iso(mm, max_deg)
    mm.verified_degree = mm.report["verified_degree"]
    return mm


def verify_quasi_iso(mm: MinimalModel, max_deg: int) -> dict:
    """Per-degree (dim H^k(model), dim H^k(input), rank H^k(rho));
    verified_degree is the largest prefix where all three agree."""
    per_degree = []
    verified = -1
    prefix_ok = True
    for k in range(max_deg + 1):
        dm = mm.h_model.dim(k)
        di = mm.h_input.dim(k)
        if dm == 0 or di == 0:
            r = 0
        else:
            r = rank(_h_map_matrix(mm.rho, mm.h_model, mm.h_input, k))
        per_degree.append({"degree": k, "dim_model": dm, "dim_input": di, "rank": r})
        if prefix_ok and dm == di == r:
            verified = k
        else:
            prefix_ok = False
    return {"per_degree": per_degree, "verified_degree": verified}


def _f_matrix(f, k: int) -> RatMatrix:
    return f.matrix(k)


def sullivan_representative(f, mmA: MinimalModel, mmB: MinimalModel,
                            max_deg: int) -> CDGAMorphism:
    """Morphism mmA.model -> mmB.model covering f: A -> B.

    For each generator v of the source model, phi(v) is a deterministic
    solution of the joint exact system

        d phi(v) = phi(d v)
        mu_B(phi(v)) + d_B(eta) = f(mu_A(v))

    whose solvability follows from H(mu_B) being an isomorphism (the eta
    unknown absorbs the coboundary ambiguity; with a zero differential
    on B the second equation is exact, making mu_B o phi = f o mu_A on
    the nose).  Contract: H(mu_B o phi) = H(f o mu_A) exactly; the full
    homotopy is not certified.
    """
    src = mmA.model
    tgt = mmB.model
    B = mmB.input
    images = []
    partial = {}

    def apply_partial(poly: dict, deg: int) -> list:
        out = [Fraction(0)] * tgt.dim(deg)
        for mono, coeff in poly.items():
            acc = {i: c for i, c in enumerate(tgt.unit_coords()) if c != 0}
            acc_deg = 0
            for g in mono:
                img = partial[g]
                dg = src.degrees[g]
                nxt: dict[int, Fraction] = {}
                for i, ci in acc.items():
                    for j, cj in enumerate(img):
                        if cj == 0:
                            continue
                        for t, v in tgt.mul_basis(acc_deg, i, dg, j).items():
                            nv = nxt.get(t, Fraction(0)) + ci * cj * v
                            if nv == 0:
                                nxt.pop(t, None)
                            else:
                                nxt[t] = nv
                acc = nxt
                acc_deg += dg
                if not acc:
                    break
            for i, c in acc.items():
                out[i] += coeff * c
        return out

    for gi in range(len(src.generators)):
        k = src.degrees[gi]
        dv = src.diff.get(gi, {})
        for mono in dv:
            if any(g >= gi for g in mono):
                raise InputError("generator order violates the Sullivan filtration")
        rhs1 = apply_partial(dv, k + 1)
        rhs2 = _f_matrix(f, k).apply(mmA.rho.images[gi])

        n_y = tgt.dim(k)
        n_eta = B.dim(k - 1) if k >= 1 else 0
        d_mod = tgt.d_matrix(k)
        mu_b = mmB.rho.matrix(k)
        d_inp = B.d_matrix(k - 1) if k >= 1 else RatMatrix.zeros(B.dim(0), 0)

        top = d_mod.hstack(RatMatrix.zeros(d_mod.rows, n_eta))
        bottom = mu_b.hstack(d_inp)
        system = RatMatrix(
            top.rows + bottom.rows, n_y + n_eta,
            top.tolist() + bottom.tolist(),
        )
        rhs = rhs1 + rhs2
        sol = solve(system, rhs)
        if sol is None:
            raise LiftError(
                f"no lift for generator {src.names[gi]} (degree {k}): "
                "truncation too small or invariant breach")
        y = sol[:n_y]
        partial[gi] = y
        images.append(y)

    phi = CDGAMorphism(src, tgt, images, check=True)
    verify_representative(phi, f, mmA, mmB, max_deg)
    return phi


def verify_representative(phi: CDGAMorphism, f, mmA: MinimalModel,
                          mmB: MinimalModel, max_deg: int):
    """Exact check of H(mu_B o phi) = H(f o mu_A) on the chosen bases."""
    hi = min(max_deg, mmA.verified_degree if mmA.verified_degree >= 0 else max_deg)
    h_b = mmB.h_input
    for k in range(hi + 1):
        if mmA.h_model.dim(k) == 0 or h_b.dim(k) == 0:
            continue  # one side is the zero space, nothing to compare
        for rep in mmA.h_model.reps(k):
            lhs_vec = mmB.rho.apply_vec(k, phi.apply_vec(k, rep))
            rhs_vec = _f_matrix(f, k).apply(mmA.rho.apply_vec(k, rep))
            if h_b.class_of(k, lhs_vec) != h_b.class_of(k, rhs_vec):
                raise LiftError(f"representative breaks H-contract at degree {k}")
