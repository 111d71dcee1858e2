"""Command-line entry points.

Exit codes: 0 success, 2 invalid input, 3 resource cap exceeded,
4 degree-1 non-convergence (output still written, flagged).  Data goes
to stdout when no -o is given; diagnostics go to stderr.  Same input
and flags produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys

from .cdga import make_sullivan
from .config import Config
from .errors import CapExceeded, InputError, LiftError, TruncationError
from .metric import gh_bruteforce, load_metric
from .minmodel import minimal_model
from .pipeline import (
    barcodes_from_json,
    bounds_report,
    h_barcode,
    persistent_cdga_from_json,
    persistent_model,
    persistent_model_from_cdgas,
    psm_to_json,
    v_barcode,
)
from .util import num_to_json

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_CAP = 3
EXIT_DEG1 = 4


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as e:
        raise InputError(f"no such file: {path}") from e
    except json.JSONDecodeError as e:
        raise InputError(f"malformed JSON in {path}: {e}") from e


def _emit(obj: dict, output: str | None):
    blob = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if output:
        with open(output, "w") as fh:
            fh.write(blob)
    else:
        sys.stdout.write(blob)


def _config_from_args(args) -> Config:
    return Config(
        max_degree=args.max_degree,
        max_dim=args.max_dim,
        deg1_cap=args.deg1_cap,
        simplex_cap=args.simplex_cap,
        gh_cap=args.gh_cap,
        tolerance=args.tolerance,
        output=args.output,
        fmt=args.format,
    )


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--max-degree", type=int, default=4)
    p.add_argument("--max-dim", type=int, default=None,
                   help="simplex dimension cap (default max_degree + 1)")
    p.add_argument("--deg1-cap", type=int, default=8,
                   help="iterations for the degree-1 extension")
    p.add_argument("--simplex-cap", type=int, default=2_000_000)
    p.add_argument("--gh-cap", type=int, default=30,
                   help="cap on |X|*|Y| for the brute-force Gromov-Hausdorff")
    p.add_argument("--tolerance", type=float, default=0.0,
                   help="echoed into reports for downstream comparisons")
    p.add_argument("--format", choices=("json",), default="json")
    p.add_argument("-o", "--output", default=None)


def _load_comparand(path: str, cfg: Config):
    data = _read_json(path)
    if "points" in data or "distance_matrix" in data:
        return load_metric(data)
    if "stages" in data:
        return persistent_cdga_from_json(data, min_trunc=cfg.max_degree + 2)
    raise InputError(f"{path}: expected a metric space or a persistent CDGA")


def _build_psm(path: str, cfg: Config):
    data = _read_json(path)
    if "points" in data or "distance_matrix" in data:
        return persistent_model(load_metric(data), cfg)
    if "stages" in data and data.get("format") != "psmm-model":
        pc = persistent_cdga_from_json(data, min_trunc=cfg.max_degree + 2)
        return persistent_model_from_cdgas(pc, cfg)
    raise InputError(f"{path}: expected a metric space or a persistent CDGA")


def cmd_model(args) -> int:
    cfg = _config_from_args(args)
    psm = _build_psm(args.input, cfg)
    _emit(psm_to_json(psm), args.output)
    if psm.nonconverged_stages:
        print(f"warning: degree-1 construction did not converge at stages "
              f"{psm.nonconverged_stages}", file=sys.stderr)
        return EXIT_DEG1
    return EXIT_OK


def cmd_barcode(args) -> int:
    cfg = _config_from_args(args)
    data = _read_json(args.input)
    code = EXIT_OK
    if data.get("format") == "psmm-model":
        vb, hb = barcodes_from_json(data)
        bc = vb if args.invariant == "V" else hb
        if data.get("nonconverged_stages"):
            code = EXIT_DEG1
    else:
        psm = _build_psm(args.input, cfg)
        bc = v_barcode(psm) if args.invariant == "V" else h_barcode(psm)
        if psm.nonconverged_stages:
            code = EXIT_DEG1
    _emit({"invariant": args.invariant, "barcode": bc.to_json()}, args.output)
    if code == EXIT_DEG1:
        print("warning: degree-1 non-convergence; barcode flagged", file=sys.stderr)
    return code


def cmd_compare(args) -> int:
    cfg = _config_from_args(args)
    left = _load_comparand(args.left, cfg)
    right = _load_comparand(args.right, cfg)
    report = bounds_report(left, right, cfg, with_gh=args.gh)
    blob = report.to_json()
    if cfg.tolerance:
        blob["tolerance"] = cfg.tolerance
    _emit(blob, args.output)
    print(report.table(), file=sys.stderr)
    return EXIT_OK


def cmd_minimal_model(args) -> int:
    cfg = _config_from_args(args)
    data = _read_json(args.input)
    if "cohomology_ring" in data:
        from .cohomology import ring_from_json
        alg = ring_from_json(data["cohomology_ring"],
                             min_max_deg=cfg.max_degree + 1)
    else:
        gens = [(g["name"], g["degree"]) for g in data.get("generators", [])]
        trunc = max(int(data.get("truncation", 6)), cfg.max_degree + 2)
        alg = make_sullivan(gens, data.get("differential", {}), trunc)
    mm = minimal_model(alg, cfg.max_degree, cfg.deg1_cap)
    out = {
        "format": "psmm-minimal-model",
        "model": mm.model.dump(),
        "rho": {
            name: [num_to_json(c) for c in mm.rho.images[i]]
            for i, (name, _) in enumerate(mm.model.generators)
        },
        "verification": mm.report,
        "is_minimal": mm.model.is_minimal(),
        "deg1_converged": mm.deg1_converged,
    }
    _emit(out, args.output)
    if not mm.deg1_converged:
        print("warning: degree-1 construction did not converge", file=sys.stderr)
        return EXIT_DEG1
    return EXIT_OK


def cmd_gh(args) -> int:
    cfg = _config_from_args(args)
    x = load_metric(_read_json(args.left))
    y = load_metric(_read_json(args.right))
    val = gh_bruteforce(x, y, cfg.gh_cap)
    _emit({"gh": num_to_json(val), "gh2": num_to_json(2 * val)}, args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="psmm",
        description="Persistent minimal models of Rips filtrations: "
                    "homotopy and cohomology barcodes with lower-bound reports.",
        epilog="PSMM_THREADS bounds internal parallelism (default 1); "
               "results are identical either way.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("model", help="persistent model dump from a metric "
                                     "space or persistent CDGA")
    p.add_argument("--input", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_model)

    p = sub.add_parser("barcode", help="V or H barcode")
    p.add_argument("--input", required=True,
                   help="metric space, persistent CDGA, or model dump")
    p.add_argument("--invariant", choices=("V", "H"), required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_barcode)

    p = sub.add_parser("compare", help="lower-bound report for two inputs")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--gh", action="store_true",
                   help="include the brute-force 2*d_GH upper bound")
    _add_common(p)
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("minimal-model", help="minimal model of one CDGA file")
    p.add_argument("--input", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_minimal_model)

    p = sub.add_parser("gh", help="brute-force Gromov-Hausdorff distance")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_gh)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (InputError, TruncationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except CapExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    except LiftError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())
