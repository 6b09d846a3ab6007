"""Command line interface: ``minsurf <verb> ...`` (or ``python -m minsurf``).

Exit codes: 0 success, 2 validation or configuration errors, 3 hypothesis
errors (comparison preconditions, general position), 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .catalog import NAMES, builtin, examples
from .errors import (ConfigError, DomainError, FlatSurfaceError, GeneralPositionError,
                     HypothesisError, MinsurfError, PoleError, UnknownEntry, ValidationError)
from .experiment import dumps_json, emit_report, fmt, load_config, renormalize, run_experiment
from .metricgeo import (DEFAULT_STENCIL, comparison_check, distance_csv, flat_metric,
                        geodesic_distances, hyperbolic_metric, hyperbolic_truncation, metric_csv,
                        read_metric_csv, sample_metric, superharmonicity_check)
from .projgeom import HyperplaneSet, omission_margin
from .weierstrass import DEFAULT_QUAD_ORDER, WeierstrassData, sample_rows

log = logging.getLogger("minsurf")

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_HYPOTHESIS = 0, 1, 2, 3


def load_data(arg: str) -> WeierstrassData:
    """A JSON file path, or failing that a catalog name such as ``voss(2,-2,2i)``."""
    path = Path(arg)
    if path.is_file():
        try:
            return WeierstrassData.from_json(json.loads(path.read_text()))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    try:
        return builtin(arg).data
    except UnknownEntry:
        raise ConfigError(f"{arg!r} is neither a readable file nor a catalog entry") from None


def load_planes(arg: str) -> HyperplaneSet:
    path = Path(arg)
    if path.is_file():
        try:
            return HyperplaneSet.from_json(json.loads(path.read_text()))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    try:
        return builtin(arg).omitted
    except UnknownEntry:
        raise ConfigError(f"{arg!r} is neither a readable file nor a catalog entry") from None


def parse_point(text: str) -> complex:
    try:
        u, v = (float(t) for t in text.split(","))
    except ValueError:
        raise ConfigError(f"expected 'u,v', got {text!r}") from None
    return complex(u, v)


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    p = Path(out)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text)
    log.info("wrote %s", p)


# --- verbs ---------------------------------------------------------------------------

def cmd_validate(args) -> int:
    data = load_data(args.data)
    report = data.report
    _write(dumps_json(report.to_json()) + "\n", None)
    return EXIT_OK if report.valid else EXIT_INPUT


def cmd_sample(args) -> int:
    data = load_data(args.data)
    cols = ["u", "v"] + [f"x{k + 1}" for k in range(data.m)] + ["lambda", "K"]
    lines = [",".join(cols)]
    for row in sample_rows(data, args.n, args.quad_order):
        lines.append(",".join(fmt(float(x)) for x in row))
    _write("\n".join(lines) + "\n", args.out)
    if args.metric_out:
        _write(metric_csv(sample_metric(data, args.n)), args.metric_out)
    return EXIT_OK


def cmd_geodesic(args) -> int:
    data = load_data(args.data)
    data.require_valid()
    src = parse_point(args.source)
    data.domain.require(src)
    field = geodesic_distances(sample_metric(data, args.n), src, args.stencil)
    _write(distance_csv(field), args.out)
    return EXIT_OK


def cmd_omit(args) -> int:
    data = load_data(args.data)
    hset = load_planes(args.planes)
    lines = ["plane_index,min_margin,argmin_u,argmin_v"]
    for r in omission_margin(data, hset, args.n):
        lines.append(f"{r.plane_index},{fmt(r.min_margin)},{fmt(r.argmin_u)},{fmt(r.argmin_v)}")
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_renormalize(args) -> int:
    res = renormalize(load_data(args.data), args.n, args.stencil)
    payload = {"report": res.report, "data": res.data.to_json()}
    _write(dumps_json(payload) + "\n", args.out)
    return EXIT_OK if res.report["bound_ok"] and res.report["unit_ok"] else EXIT_FAIL


def cmd_experiment(args) -> int:
    config = load_config(args.config)
    report = run_experiment(config)
    out = args.out or config.output
    if out is None:
        raise ConfigError("no output directory: set 'output' in the config or pass --out")
    csv_path, json_path = emit_report(report, out)
    sys.stdout.write(f"empirical_C {fmt(report.empirical_C)}\n"
                     f"stability {fmt(report.stability)}\n"
                     f"rows {csv_path}\nsummary {json_path}\n")
    return EXIT_OK


def cmd_catalog(args) -> int:
    if args.action == "list":
        for name in NAMES:
            sys.stdout.write(name + "\n")
        for e in examples():
            sys.stdout.write(f"  e.g. {e.name}: {e.notes}\n")
        return EXIT_OK
    if not args.name:
        raise ConfigError("catalog show needs a name")
    try:
        entry = builtin(args.name)
    except UnknownEntry as exc:
        raise ConfigError(f"unknown catalog entry: {exc}") from None
    _write(dumps_json(entry.to_json()) + "\n", None)
    return EXIT_OK


def cmd_lemma21(args) -> int:
    metric = read_metric_csv(args.metric)
    res = comparison_check(metric, args.R, stencil=args.stencil)
    sh = superharmonicity_check(res.rho, metric)
    h = res.hypotheses
    payload = {
        "R": args.R,
        "hypotheses": {"status": h.status, "k_min": h.k_min, "k_max": h.k_max,
                       "boundary_distance": h.boundary_distance,
                       "boundary_margin": h.boundary_margin, "boundary_tol": h.boundary_tol},
        "min_slack": res.min_slack,
        "min_rel_slack": res.min_rel_slack,
        "argmin_cell": list(res.argmin),
        "superharmonic_max": sh.max_laplacian,
        "superharmonic_argmax": list(sh.argmax),
    }
    _write(dumps_json(payload) + "\n", None)
    return EXIT_OK


def cmd_metric(args) -> int:
    if args.kind == "hyperbolic":
        metric = hyperbolic_truncation(args.n, args.R) if args.R is not None else hyperbolic_metric(args.n)
    else:
        metric = flat_metric(args.n, args.c)
    _write(metric_csv(metric), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="minsurf", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"minsurf {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("validate", help="check isotropy, common zeros and poles")
    p.add_argument("data", help="Weierstrass data JSON file or catalog name")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sample", help="immersion, conformal factor and curvature on a grid")
    p.add_argument("data")
    p.add_argument("--n", type=int, default=65)
    p.add_argument("--out", default=None)
    p.add_argument("--metric-out", default=None, help="also write the metric grid CSV")
    p.add_argument("--quad-order", type=int, default=DEFAULT_QUAD_ORDER)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("geodesic", help="grid geodesic distances from a point")
    p.add_argument("data")
    p.add_argument("--n", type=int, default=129)
    p.add_argument("--from", dest="source", default="0,0", help="source point u,v")
    p.add_argument("--out", default=None)
    p.add_argument("--stencil", type=int, default=DEFAULT_STENCIL)
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("omit", help="per-plane omission margins of the Gauss map")
    p.add_argument("data")
    p.add_argument("planes", help="hyperplane set JSON file or catalog name")
    p.add_argument("--n", type=int, default=129)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_omit)

    p = sub.add_parser("renormalize", help="point-picking rescale to |K| = 1")
    p.add_argument("data")
    p.add_argument("--n", type=int, default=129)
    p.add_argument("--out", default=None)
    p.add_argument("--stencil", type=int, default=DEFAULT_STENCIL)
    p.set_defaults(func=cmd_renormalize)

    p = sub.add_parser("experiment", help="run a config and write rows.csv + summary.json")
    p.add_argument("config")
    p.add_argument("--out", default=None, help="output directory (overrides the config)")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("catalog", help="built-in surfaces")
    p.add_argument("action", choices=["list", "show"])
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("lemma21", help="hyperbolic comparison check on a metric grid CSV")
    p.add_argument("--metric", required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--stencil", type=int, default=DEFAULT_STENCIL)
    p.set_defaults(func=cmd_lemma21)

    p = sub.add_parser("metric", help="write a synthetic metric grid CSV")
    p.add_argument("kind", choices=["hyperbolic", "flat"])
    p.add_argument("--n", type=int, default=129)
    p.add_argument("--R", type=float, default=None, help="hyperbolic truncation radius")
    p.add_argument("--c", type=float, default=1.0, help="flat metric constant")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_metric)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (HypothesisError, GeneralPositionError) as exc:
        return _fail(exc, EXIT_HYPOTHESIS)
    except (ValidationError, ConfigError, DomainError, PoleError, FlatSurfaceError) as exc:
        return _fail(exc, EXIT_INPUT)
    except (MinsurfError, OSError) as exc:
        return _fail(exc, EXIT_FAIL)


def _fail(exc: Exception, code: int) -> int:
    print(f"minsurf: error: {exc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
