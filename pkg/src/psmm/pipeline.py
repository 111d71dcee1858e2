"""End-to-end orchestration: filtration -> per-stage rings -> persistent
minimal model -> V and H barcodes -> lower-bound report.

Per stage the model input is the cohomology ring with zero differential
(the formal CDGA of the stage).  This computes the true minimal model
exactly for formal stages -- spheres and their wedges and products,
which covers every worked example here -- and is documented as an
approximation otherwise: Massey products are invisible to it.
Disconnected stages are modeled through their unital core Q.1 + H^+,
the cohomology of the wedge of their components, so that every stage is
path-connected as the model construction requires.

A persistent-CDGA input mode takes per-grid CDGAs and structure maps
verbatim, which covers non-metric comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .cdga import (
    CDGAMorphism,
    induced_cohomology_map,
    linear_part_map,
    make_sullivan,
)
from .cohomology import CohomologyRing, induced_ring_map
from .config import Config
from .errors import CapExceeded, InputError, LiftError
from .gvec import GradedLinearMap, GradedVectorSpace
from .metric import MetricSpace, build_filtration, gh_bruteforce
from .minmodel import minimal_model, sullivan_representative
from .persistence import INF, Barcode, BottleneckResult, PersistentGVec, bottleneck
from .ratlin import RatMatrix
from .util import num_to_json, pmap


@dataclass
class PersistentSullivanModel:
    """Per-stage minimal models with contravariant representatives.

    reps[k] covers the induced map H(stage k+1) -> H(stage k), going
    from the later stage's model to the earlier stage's model.
    """

    grid: tuple
    models: list
    reps: list
    h_spaces: list
    h_maps: list
    max_degree: int
    h1_stages: list
    nonconverged_stages: list
    degraded_pairs: list = field(default_factory=list)
    source: str = "metric"

    @property
    def num_stages(self) -> int:
        return len(self.models)

    def caveats(self) -> list:
        out = []
        if self.h1_stages:
            out.append(
                f"stages {self.h1_stages} have H^1 != 0: degree-1 homotopy bars "
                "and their linear parts lie outside the simply-connected chain")
        if self.nonconverged_stages:
            out.append(
                f"degree-1 construction did not converge at stages "
                f"{self.nonconverged_stages}: V^1 truncated at the iteration cap")
        if self.degraded_pairs:
            out.append(
                f"no lift exists within the truncated degree-1 models for stage "
                f"pairs {self.degraded_pairs}: zero representatives substituted")
        return out


@dataclass
class PersistentCDGA:
    """User-supplied persistent CDGA over a finite grid; maps run from
    stage k+1 to stage k (contravariant, like cohomology)."""

    grid: tuple
    stages: list
    maps: list  # CDGAMorphism per consecutive pair


def persistent_cdga_from_json(data: dict, min_trunc: int = 0) -> PersistentCDGA:
    grid = tuple(float(x) if isinstance(x, float) else Fraction(str(x))
                 for x in data.get("grid", ()))
    if list(grid) != sorted(set(grid)) or any(g <= 0 for g in grid):
        raise InputError("grid must be strictly increasing positive values")
    stage_specs = data.get("stages")
    if not stage_specs:
        raise InputError("persistent CDGA needs at least one stage")
    if len(stage_specs) != len(grid) + 1:
        raise InputError("need exactly one stage per grid interval")
    stages = []
    for spec in stage_specs:
        gens = [(g["name"], g["degree"]) for g in spec.get("generators", [])]
        trunc = max(int(spec.get("truncation", 6)), min_trunc)
        stages.append(make_sullivan(gens, spec.get("differential", {}), trunc))
    maps_spec = data.get("maps", [])
    if len(maps_spec) != max(len(stages) - 1, 0):
        raise InputError("need one structure map per consecutive stage pair")
    maps = []
    for k, mp in enumerate(maps_spec):
        src, tgt = stages[k + 1], stages[k]
        images = []
        img_spec = mp.get("images", {})
        for i, (name, d) in enumerate(src.generators):
            terms = img_spec.get(name, [])
            poly = tgt._canon_poly(terms)
            images.append(tgt.poly_to_vec(poly, d))
        maps.append(CDGAMorphism(src, tgt, images))
    return PersistentCDGA(grid, stages, maps)


def _core_map(ring_map: GradedLinearMap, core_small: CohomologyRing,
              core_big: CohomologyRing, max_deg: int) -> GradedLinearMap:
    """Restrict an induced ring map to the unital cores: the unit line
    maps by the identity, positive degrees are untouched."""
    mats = {0: RatMatrix.identity(1)}
    for k in range(1, max_deg + 1):
        m = ring_map.matrix(k)
        if not m.is_zero():
            mats[k] = m
    return GradedLinearMap(core_big.space(max_deg), core_small.space(max_deg), mats)


def _zero_representative(mm_src, mm_tgt) -> CDGAMorphism:
    """Zero on generators; a chain map since minimal differentials are
    decomposable.  Fallback when no lift exists within truncated
    degree-1 models."""
    src, tgt = mm_src.model, mm_tgt.model
    images = [[Fraction(0)] * tgt.dim(src.degrees[i])
              for i in range(len(src.generators))]
    return CDGAMorphism(src, tgt, images)


def _representative_or_degrade(f, mm_src, mm_tgt, max_degree: int,
                               pair: int, degraded: list) -> CDGAMorphism:
    try:
        return sullivan_representative(f, mm_src, mm_tgt, max_degree)
    except LiftError:
        if mm_src.deg1_converged and mm_tgt.deg1_converged:
            raise
        degraded.append(pair)
        return _zero_representative(mm_src, mm_tgt)


def persistent_model(m: MetricSpace, cfg: Optional[Config] = None,
                     functoriality_check: bool = True) -> PersistentSullivanModel:
    """Formality pipeline for a metric space: Rips filtration, stage
    rings, formal minimal models, representatives of the consecutive
    induced maps, with H- and Q-functoriality spot checks."""
    cfg = cfg or Config()
    filt = build_filtration(m, cfg.max_dim, cfg.simplex_cap)
    ring_deg = cfg.max_degree + 1

    rings = pmap(
        lambda cx: CohomologyRing.from_complex(cx, ring_deg, eager_through=cfg.max_degree),
        filt.stages)
    cores = [r.unital_core() for r in rings]
    models = pmap(lambda core: minimal_model(core, cfg.max_degree, cfg.deg1_cap), cores)

    n = len(filt.stages)
    ring_maps = [induced_ring_map(rings[k], rings[k + 1], cfg.max_degree)
                 for k in range(n - 1)]
    core_maps = [_core_map(ring_maps[k], cores[k], cores[k + 1], cfg.max_degree)
                 for k in range(n - 1)]
    degraded: list = []
    reps = [_representative_or_degrade(core_maps[k], models[k + 1], models[k],
                                       cfg.max_degree, k, degraded)
            for k in range(n - 1)]

    psm = PersistentSullivanModel(
        grid=filt.critical_values,
        models=models,
        reps=reps,
        h_spaces=[r.space(cfg.max_degree) for r in rings],
        h_maps=ring_maps,
        max_degree=cfg.max_degree,
        h1_stages=[k for k, r in enumerate(rings) if r.dim(1) > 0],
        nonconverged_stages=[k for k, mm in enumerate(models) if not mm.deg1_converged],
        degraded_pairs=degraded,
        source="metric",
    )
    if functoriality_check:
        _check_functoriality(psm, core_maps)
    return psm


def _check_functoriality(psm: PersistentSullivanModel, core_maps: list):
    """Composites over length-2 spans: the representative of g o f must
    agree with rep(g) o rep(f) on cohomology and on linear parts.
    Spans touching non-converged or degraded stages are skipped; the
    functoriality guarantee does not extend to truncated degree-1
    constructions."""
    skip = set(psm.nonconverged_stages)
    for k in range(len(core_maps) - 1):
        if {k, k + 1, k + 2} & skip or {k, k + 1} & set(psm.degraded_pairs):
            continue
        composite = core_maps[k].compose(core_maps[k + 1])
        direct = sullivan_representative(
            composite, psm.models[k + 2], psm.models[k], psm.max_degree)
        chained = psm.reps[k].compose_after(psm.reps[k + 1])
        if not linear_part_map(direct).equals(linear_part_map(chained)):
            raise InputError(f"Q-functoriality fails across stages {k}..{k + 2}")
        h_src = psm.models[k + 2].h_model
        h_tgt = psm.models[k].h_model
        hd = induced_cohomology_map(direct, h_src, h_tgt, psm.max_degree)
        hc = induced_cohomology_map(chained, h_src, h_tgt, psm.max_degree)
        if not hd.equals(hc):
            raise InputError(f"H-functoriality fails across stages {k}..{k + 2}")


def persistent_model_from_cdgas(pc: PersistentCDGA,
                                cfg: Optional[Config] = None) -> PersistentSullivanModel:
    """Verbatim persistent-CDGA mode: per-stage models of the given
    algebras and representatives along the given structure maps."""
    cfg = cfg or Config()
    models = [minimal_model(alg, cfg.max_degree, cfg.deg1_cap) for alg in pc.stages]
    degraded: list = []
    reps = [_representative_or_degrade(pc.maps[k], models[k + 1], models[k],
                                       cfg.max_degree, k, degraded)
            for k in range(len(pc.maps))]
    h_spaces = []
    for mm in models:
        h_spaces.append(GradedVectorSpace.from_dims(
            {k: mm.h_input.dim(k) for k in range(cfg.max_degree + 1)}))
    h_maps = [
        induced_cohomology_map(pc.maps[k], models[k + 1].h_input,
                               models[k].h_input, cfg.max_degree)
        for k in range(len(pc.maps))
    ]
    return PersistentSullivanModel(
        grid=pc.grid,
        models=models,
        reps=reps,
        h_spaces=h_spaces,
        h_maps=h_maps,
        max_degree=cfg.max_degree,
        h1_stages=[k for k, mm in enumerate(models) if mm.h_input.dim(1) > 0],
        nonconverged_stages=[k for k, mm in enumerate(models)
                             if not mm.deg1_converged],
        degraded_pairs=degraded,
        source="cdga",
    )


def v_barcode(psm: PersistentSullivanModel) -> Barcode:
    """Rational-homotopy barcode: generator spaces of the models with
    the linear parts of the representatives, decomposed per degree.
    Degree-n bars read as rank-(pi_n tensor Q) intervals; dualization
    keeps interval endpoints over a finite grid."""
    spaces = [mm.model.generator_space() for mm in psm.models]
    vmaps = [linear_part_map(rep) for rep in psm.reps]
    module = PersistentGVec.from_contravariant(psm.grid, spaces, vmaps)
    return module.barcode()


def h_barcode(source, cfg: Optional[Config] = None) -> Barcode:
    """Persistent-cohomology barcode from the induced-map matrices.

    Accepts a built PersistentSullivanModel or a raw MetricSpace; the
    metric path stops at rings and induced maps, skipping the models.
    """
    if isinstance(source, MetricSpace):
        cfg = cfg or Config()
        filt = build_filtration(source, cfg.max_dim, cfg.simplex_cap)
        rings = pmap(
            lambda cx: CohomologyRing.from_complex(cx, cfg.max_degree,
                                                   eager_through=cfg.max_degree),
            filt.stages)
        spaces = [r.space(cfg.max_degree) for r in rings]
        maps = [induced_ring_map(rings[k], rings[k + 1], cfg.max_degree)
                for k in range(len(rings) - 1)]
        module = PersistentGVec.from_contravariant(filt.critical_values, spaces, maps)
        return module.barcode()
    psm = source
    module = PersistentGVec.from_contravariant(psm.grid, psm.h_spaces, psm.h_maps)
    return module.barcode()


# ---------------------------------------------------------------------------
# Bounds report
# ---------------------------------------------------------------------------


@dataclass
class BoundsReport:
    dB_H: BottleneckResult
    dB_V: BottleneckResult
    dB_V_verdict_value: object  # sup over degrees >= 2
    gh2: Optional[object]
    verdicts: list
    caveats: list

    def bracket(self):
        lower = max(self.dB_H.sup, self.dB_V_verdict_value)
        return (lower, self.gh2)

    def to_json(self) -> dict:
        lower, upper = self.bracket()
        return {
            "dB_H": {**{str(k): num_to_json(v) for k, v in sorted(self.dB_H.per_degree.items())},
                     "sup": num_to_json(self.dB_H.sup)},
            "dB_V": {**{str(k): num_to_json(v) for k, v in sorted(self.dB_V.per_degree.items())},
                     "sup": num_to_json(self.dB_V.sup)},
            "gh2": num_to_json(self.gh2),
            "verdicts": self.verdicts,
            "caveats": self.caveats,
            "ho_cdga_bracket": {
                "lower": num_to_json(lower),
                "upper": num_to_json(upper),
                "note": "lower bounds and a doubled Gromov-Hausdorff upper bound "
                        "bracket the homotopy-category interleaving distance; "
                        "the distance itself is never computed",
            },
        }

    def table(self) -> str:
        rows = ["quantity        value", "-" * 30]

        def fmt(x):
            if x is None:
                return "-"
            if x == INF:
                return "inf"
            if isinstance(x, Fraction):
                return f"{x} ({float(x):.6g})"
            return f"{x:.6g}"

        rows.append(f"dB_H (sup)      {fmt(self.dB_H.sup)}")
        rows.append(f"dB_V (deg>=2)   {fmt(self.dB_V_verdict_value)}")
        rows.append(f"dB_V (sup)      {fmt(self.dB_V.sup)}")
        rows.append(f"2*d_GH          {fmt(self.gh2)}")
        for v in self.verdicts:
            status = {True: "PASS", False: "FAIL", None: "SKIPPED"}[v["holds"]]
            rows.append(f"{v['name']}: {status}")
        for c in self.caveats:
            rows.append(f"caveat: {c}")
        lower, upper = self.bracket()
        rows.append(f"bracket on homotopy-category distance: "
                    f"[{fmt(lower)}, {fmt(upper)}]")
        return "\n".join(rows)


# ---------------------------------------------------------------------------
# Model dump serialization
# ---------------------------------------------------------------------------


def _mat_to_json(m: RatMatrix) -> list:
    return [[num_to_json(x) for x in row] for row in m.tolist()]


def _gmap_to_json(f: GradedLinearMap, max_deg: int) -> dict:
    out = {}
    for k in range(max_deg + 1):
        m = f.matrix(k)
        if not m.is_zero() or (m.rows and m.cols):
            out[str(k)] = _mat_to_json(m)
    return out


def psm_to_json(psm: PersistentSullivanModel) -> dict:
    """Full dump: per-stage models with rho images and verification,
    plus the matrices needed to rebuild both barcodes exactly."""
    from .util import num_to_json as nj
    stages = []
    for k, mm in enumerate(psm.models):
        vspace = mm.model.generator_space()
        stages.append({
            "model": mm.model.dump(),
            "rho": {
                name: [nj(c) for c in mm.rho.images[i]]
                for i, (name, _) in enumerate(mm.model.generators)
            },
            "verification": mm.report,
            "deg1_converged": mm.deg1_converged,
            "v_dims": {str(d): vspace.dim(d) for d in vspace.degrees()},
            "h_dims": {str(d): psm.h_spaces[k].dim(d)
                       for d in psm.h_spaces[k].degrees()},
        })
    reps = []
    for rep in psm.reps:
        reps.append({
            "images": {
                name: [nj(c) for c in rep.images[i]]
                for i, (name, _) in enumerate(rep.source.generators)
            },
            "q_matrices": _gmap_to_json(linear_part_map(rep), psm.max_degree),
        })
    return {
        "format": "psmm-model",
        "source": psm.source,
        "max_degree": psm.max_degree,
        "grid": [nj(g) for g in psm.grid],
        "stages": stages,
        "representatives": reps,
        "h_maps": [_gmap_to_json(f, psm.max_degree) for f in psm.h_maps],
        "h1_stages": psm.h1_stages,
        "nonconverged_stages": psm.nonconverged_stages,
        "caveats": psm.caveats(),
    }


def _space_from_dims(dims: dict) -> GradedVectorSpace:
    return GradedVectorSpace.from_dims({int(k): v for k, v in dims.items()})


def _gmap_from_json(data: dict, src: GradedVectorSpace,
                    tgt: GradedVectorSpace) -> GradedLinearMap:
    from .util import num_from_json as nf
    mats = {}
    for k, rows in data.items():
        m = RatMatrix.from_rows([[nf(x) for x in row] for row in rows]) if rows \
            else RatMatrix.zeros(tgt.dim(int(k)), src.dim(int(k)))
        if not m.is_zero():
            mats[int(k)] = m
    return GradedLinearMap(src, tgt, mats)


def barcodes_from_json(data: dict):
    """(V barcode, H barcode) rebuilt from a model dump."""
    from .util import num_from_json as nf
    if data.get("format") != "psmm-model":
        raise InputError("not a model dump")
    grid = tuple(nf(g) for g in data["grid"])
    v_spaces = [_space_from_dims(s["v_dims"]) for s in data["stages"]]
    h_spaces = [_space_from_dims(s["h_dims"]) for s in data["stages"]]
    v_maps = []
    h_maps = []
    for k, rep in enumerate(data["representatives"]):
        v_maps.append(_gmap_from_json(rep["q_matrices"], v_spaces[k + 1], v_spaces[k]))
    for k, hm in enumerate(data["h_maps"]):
        h_maps.append(_gmap_from_json(hm, h_spaces[k + 1], h_spaces[k]))
    v_module = PersistentGVec.from_contravariant(grid, v_spaces, v_maps)
    h_module = PersistentGVec.from_contravariant(grid, h_spaces, h_maps)
    return v_module.barcode(), h_module.barcode()


def _as_psm(x, cfg: Config) -> PersistentSullivanModel:
    if isinstance(x, PersistentSullivanModel):
        return x
    if isinstance(x, PersistentCDGA):
        return persistent_model_from_cdgas(x, cfg)
    if isinstance(x, MetricSpace):
        return persistent_model(x, cfg)
    raise InputError(f"cannot compare object of type {type(x).__name__}")


def bounds_report(x, y, cfg: Optional[Config] = None,
                  with_gh: bool = True) -> BoundsReport:
    """Lower-bound chain between two inputs (metric spaces or persistent
    CDGAs), with an optional brute-force 2*d_GH sandwich when both are
    small metric spaces."""
    cfg = cfg or Config()
    psm_x = _as_psm(x, cfg)
    psm_y = _as_psm(y, cfg)

    db_h = bottleneck(h_barcode(psm_x), h_barcode(psm_y))
    db_v = bottleneck(v_barcode(psm_x), v_barcode(psm_y))
    reliable = [v for k, v in db_v.per_degree.items() if k >= 2]
    db_v_verdict = max(reliable) if reliable else 0

    caveats = psm_x.caveats() + psm_y.caveats()
    if any(k == 1 for k in db_v.per_degree):
        caveats.append("degree-1 homotopy bars reported but outside the "
                       "proved lower-bound chain")

    gh2 = None
    if with_gh and isinstance(x, MetricSpace) and isinstance(y, MetricSpace):
        try:
            gh2 = 2 * gh_bruteforce(x, y, cfg.gh_cap)
        except CapExceeded:
            caveats.append(f"gh2 omitted: |X|*|Y| exceeds cap {cfg.gh_cap}")

    verdicts = []
    h1_caveat = bool(psm_x.h1_stages or psm_y.h1_stages)
    if gh2 is None:
        verdicts.append({"name": "dB_H <= 2*d_GH", "holds": None})
        verdicts.append({"name": "dB_V(deg>=2) <= 2*d_GH", "holds": None,
                         "caveated": h1_caveat})
    else:
        verdicts.append({
            "name": "dB_H <= 2*d_GH",
            "holds": bool(db_h.sup <= gh2),
            "lhs": num_to_json(db_h.sup),
            "rhs": num_to_json(gh2),
        })
        verdicts.append({
            "name": "dB_V(deg>=2) <= 2*d_GH",
            "holds": bool(db_v_verdict <= gh2),
            "lhs": num_to_json(db_v_verdict),
            "rhs": num_to_json(gh2),
            "caveated": h1_caveat,
        })
    return BoundsReport(db_h, db_v, db_v_verdict, gh2, verdicts, caveats)
