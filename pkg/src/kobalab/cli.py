"""Command-line front end.

One subcommand per scientific question; JSON or CSV reports on stdout or to a
file.  Exit codes: 0 pass, 1 assertion failure, 2 input error, 3 solver
non-convergence or undecided diagnostics.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import boundary as bd
from . import dynamics as dyn
from . import hyperbolicity as hyp
from . import metric as mt
from .config import SolverConfig, load_config
from .domains import classify_ends, is_c_proper, load_domain, recession_directions
from .errors import (KobalabError, MetricDegenerateError, PreconditionError,
                     RejectedInputError, SolverError, UndecidedError,
                     VerificationError)
from .gallery import run_gallery
from .points import point_from_json

EXIT_PASS = 0
EXIT_ASSERTION = 1
EXIT_INPUT = 2
EXIT_SOLVER = 3


def _parse_point(text: str, dim: int):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RejectedInputError(f"cannot parse point {text!r}: {exc}") from exc
    if isinstance(obj, list) and obj and isinstance(obj[0], (int, float)) and dim == 1:
        obj = [obj]
    return point_from_json(obj, dim)


def _emit(args, payload, csv_rows=None, csv_fields=None):
    if args.format == "csv" and csv_rows is not None:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=csv_fields or list(csv_rows[0]))
        writer.writeheader()
        for row in csv_rows:
            writer.writerow(row)
        text = buf.getvalue()
    else:
        text = json.dumps(payload, sort_keys=True, indent=2, default=_json_default)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [[c.real, c.imag] for c in np.atleast_1d(obj.astype(complex))]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _config_from_args(args) -> SolverConfig:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_(seed=args.seed)
    return cfg


def cmd_distance(args) -> int:
    domain = load_domain(args.domain)
    cfg = _config_from_args(args)
    x = _parse_point(args.x, domain.dim)
    y = _parse_point(args.y, domain.dim)
    est = mt.distance(domain, x, y, cfg)
    payload = {
        "domain": domain.to_json(),
        "estimate": est.to_json(),
        "node_count": 0 if est.path is None else len(est.path.nodes),
    }
    _emit(args, payload)
    return EXIT_PASS


def cmd_delta(args) -> int:
    domain = load_domain(args.domain)
    cfg = _config_from_args(args)
    radii = [float(r) for r in args.radius_schedule.split(",")]
    rows = []
    reports = []
    for r in radii:
        rep = hyp.four_point_delta(domain, hyp.radius_sampler(domain, r),
                                   args.n_samples, cfg, seed=cfg.seed)
        reports.append({"radius": r, **rep.to_json()})
        rows.append({"sample_radius": r, "delta": rep.delta_four_point})
    payload = {"domain": domain.to_json(), "n_samples": args.n_samples,
               "reports": reports}
    _emit(args, payload, csv_rows=rows, csv_fields=["sample_radius", "delta"])
    return EXIT_PASS


def cmd_ends(args) -> int:
    domain = load_domain(args.domain)
    cfg = _config_from_args(args)
    report = recession_directions(domain, domain.default_witness(), seed=cfg.seed)
    ends = classify_ends(domain, report)
    proper, approx = is_c_proper(domain, report)
    payload = {
        "domain": domain.to_json(),
        "recession": report.to_json(),
        "ends": ends.to_json(),
        "c_proper": proper,
        "c_proper_approximate": approx,
    }
    _emit(args, payload)
    return EXIT_PASS


def cmd_iterate(args) -> int:
    domain = load_domain(args.domain)
    cfg = _config_from_args(args)
    fmap = dyn.load_map(args.map)
    fmap.validate_on(domain, seed=cfg.seed)
    x0 = _parse_point(args.x0, domain.dim)
    trace = dyn.iterate(domain, fmap, x0, args.n_iter, cfg)
    cls = dyn.classify_orbit(domain, trace, config=cfg, map_spec=fmap)
    rows = trace.to_csv_rows()
    payload = {"classification": cls.to_json(), "trace": rows}
    _emit(args, payload, csv_rows=rows)
    return EXIT_PASS


def cmd_commute(args) -> int:
    domain = load_domain(args.domain)
    cfg = _config_from_args(args)
    f = dyn.load_map(args.map)
    g = dyn.load_map(args.map_g)
    f.validate_on(domain, seed=cfg.seed)
    g.validate_on(domain, seed=cfg.seed)
    x0 = _parse_point(args.x0, domain.dim)
    audit = dyn.selector_bound_audit(domain, f, g, x0, args.m_max, cfg)
    payload = audit.to_json()
    payload["bound_holds"] = audit.ok()
    rows = [{"m": m, "n": n, "dist": d} for m, n, d in audit.returns]
    _emit(args, payload, csv_rows=rows)
    return EXIT_PASS if audit.ok() else EXIT_ASSERTION


def cmd_verify_extension(args) -> int:
    domain = load_domain(args.domain)
    cfg = _config_from_args(args)
    with open(args.targets, "r", encoding="utf-8") as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise RejectedInputError(f"malformed targets JSON: {exc}") from exc
    targets = []
    for t in spec["targets"]:
        if t.get("kind") == "end":
            targets.append(bd.IdealPoint.end(t.get("end_id", 0),
                                             point_from_json(t["direction"], domain.dim)))
        else:
            targets.append(bd.IdealPoint.finite(point_from_json(t["point"], domain.dim)))
    x0 = point_from_json(spec["x0"], domain.dim)
    report = bd.extension_correspondence_test(domain, targets, x0, cfg)
    _emit(args, report.to_json())
    if report.passed:
        return EXIT_PASS
    return EXIT_SOLVER if report.inconclusive else EXIT_ASSERTION


def cmd_gallery(args) -> int:
    cfg = _config_from_args(args)
    report = run_gallery(args.which, cfg)
    _emit(args, report)
    ok = True
    if args.which == "8.1":
        ok = report["non_extension_witnessed"]
    elif args.which == "8.2":
        ok = report["bounded"]
    elif args.which == "8.3":
        ok = report["isometry_overlaps"] == report["isometry_pairs"]
    return EXIT_PASS if ok else EXIT_ASSERTION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kobalab",
        description="numerical experiments on the invariant geometry of convex domains",
        epilog="CSV columns: distance -> (none); delta -> sample_radius,delta; "
               "iterate -> n,re*,im*,step_dist,norm; commute -> m,n,dist.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--domain", required=True, help="domain spec JSON file")
        p.add_argument("--config", default=None, help="solver config JSON file")
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("distance", help="interval distance estimate between two points")
    common(p)
    p.add_argument("--x", required=True, help='point as JSON [[re,im],...]')
    p.add_argument("--y", required=True)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("delta", help="four-point hyperbolicity statistic over radii")
    common(p)
    p.add_argument("--n-samples", type=int, default=200)
    p.add_argument("--radius-schedule", default="0.5,0.7,0.9")
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("ends", help="recession directions, end count, C-properness")
    common(p)
    p.set_defaults(func=cmd_ends)

    p = sub.add_parser("iterate", help="orbit trace and trichotomy classification")
    common(p)
    p.add_argument("--map", required=True, help="map spec JSON file")
    p.add_argument("--x0", required=True)
    p.add_argument("--n-iter", type=int, default=200)
    p.set_defaults(func=cmd_iterate)

    p = sub.add_parser("commute", help="compact-return table plus selector bound audit")
    common(p)
    p.add_argument("--map", required=True)
    p.add_argument("--map-g", required=True)
    p.add_argument("--x0", required=True)
    p.add_argument("--m-max", type=int, default=20)
    p.set_defaults(func=cmd_commute)

    p = sub.add_parser("verify-extension",
                       help="ray-class versus ideal-point correspondence check")
    common(p)
    p.add_argument("--targets", required=True, help="targets JSON file")
    p.set_defaults(func=cmd_verify_extension)

    p = sub.add_parser("gallery", help="counterexample gallery (8.1 | 8.2 | 8.3)")
    p.add_argument("--which", required=True, choices=("8.1", "8.2", "8.3"))
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_gallery)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RejectedInputError, PreconditionError, FileNotFoundError,
            json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except VerificationError as exc:
        print(f"assertion failure: {exc}", file=sys.stderr)
        return EXIT_ASSERTION
    except (SolverError, UndecidedError, MetricDegenerateError) as exc:
        print(f"solver: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except KobalabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ASSERTION


if __name__ == "__main__":
    sys.exit(main())
