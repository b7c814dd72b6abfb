"""Command-line frontend.

Subcommands:
  point       all convergence tests at one (A, B) or (U, Kp) point
  sweep       grid sweep to CSV, optional pixmap heatmaps, manifest
  plant       no-learning gain limits and within-trial step response
  boundaries  analytic region curves and numeric iso-contours to CSV
  compare     agreement statistics from a sweep CSV, or the printed-
              bounds audit for the 3-term one-sided filters

Every flag can also be supplied through a JSON config file (--config);
explicit flags win over the file.  Outputs are byte-reproducible for a
fixed configuration and seed, and each sweep emits a manifest listing
the checksum of every file it wrote.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import __version__
from .learning import (LearningFunction, UnsupportedKindError,
                       learning_from_token, parse_taps)
from .output import (CSV_COLUMNS, format_float, read_sweep_csv, sha256_of,
                     write_heatmaps, write_manifest, write_sweep_csv)
from .plant import (ABPoint, PlantParams, ab_from_plant, classify_gain,
                    no_ilc_gain_limits, plant_from_ab, simulate_trial)
from .sweep import (METHODS, SweepConfig, Tri, audit_printed_bounds,
                    compare_methods, evaluate_point, extract_boundary,
                    run_sweep)
from .zdomain import analytic_curves

_TRI_TEXT = {Tri.TRUE: "true", Tri.FALSE: "false", Tri.MARGINAL: "marginal",
             None: "n/a"}


def _parse_grid(text: str):
    """Parse "amin:amax:steps,bmin:bmax:steps"."""
    try:
        a_part, b_part = text.split(",")
        amin, amax, asteps = a_part.split(":")
        bmin, bmax, bsteps = b_part.split(":")
        return ((float(amin), float(amax), int(asteps)),
                (float(bmin), float(bmax), int(bsteps)))
    except ValueError as exc:
        raise SystemExit(
            f"error: bad --grid {text!r}; expected "
            "amin:amax:steps,bmin:bmax:steps") from exc


def _resolve_learning(args) -> LearningFunction:
    v = 1.0 if args.v is None else float(args.v)
    if getattr(args, "taps", None):
        if getattr(args, "learning", None):
            raise SystemExit("error: give --learning or --taps, not both")
        return parse_taps(args.taps, gain_v=v)
    if getattr(args, "learning", None):
        try:
            return learning_from_token(args.learning, gain_v=v)
        except ValueError as exc:
            raise SystemExit(f"error: {exc}") from exc
    raise SystemExit("error: a learning function is required "
                     "(--learning <token> or --taps \"s:c,...\")")


def _resolve_point(args) -> ABPoint:
    has_ab = args.A is not None or args.B is not None
    has_ukp = args.U is not None or args.Kp is not None
    if has_ab and has_ukp:
        raise SystemExit("error: give --A/--B or --U/--Kp, not both")
    if has_ab:
        if args.A is None or args.B is None:
            raise SystemExit("error: both --A and --B are required")
        return ABPoint(float(args.A), float(args.B))
    if has_ukp:
        if args.U is None or args.Kp is None:
            raise SystemExit("error: both --U and --Kp are required")
        if args.U <= 0:
            raise SystemExit("error: --U must be > 0")
        return ab_from_plant(PlantParams(u_product=float(args.U),
                                         kp=float(args.Kp)))
    raise SystemExit("error: coordinates required (--A/--B or --U/--Kp)")


def _apply_config(args, parser_defaults: dict):
    """Layer values: parser default < config file < explicit flag."""
    if not getattr(args, "config", None):
        return args
    try:
        file_vals = json.loads(open(args.config).read())
    except (OSError, json.JSONDecodeError) as exc:
        raise SystemExit(f"error: cannot read config {args.config}: {exc}")
    if not isinstance(file_vals, dict):
        raise SystemExit(f"error: config {args.config} must hold a JSON object")
    for key, val in file_vals.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise SystemExit(f"error: config key {key!r} is not a flag of "
                             f"this subcommand")
        if getattr(args, attr) == parser_defaults.get(attr):
            setattr(args, attr, val)
    return args


def _add_common_point_flags(sp):
    sp.add_argument("--A", type=float, default=None, help="gain coordinate A")
    sp.add_argument("--B", type=float, default=None, help="pole coordinate B")
    sp.add_argument("--U", type=float, default=None,
                    help="lag-rate times sample-period product")
    sp.add_argument("--Kp", type=float, default=None, help="proportional gain")


def _add_learning_flags(sp):
    sp.add_argument("--learning", default=None,
                    help="named filter token (l1, l2back, l2ahead, l3sym, "
                         "l3symhalf, l3ahead, l3back)")
    sp.add_argument("--taps", default=None,
                    help="custom taps \"shift:coeff,...\", e.g. "
                         "\"0:1,1:0.5,-1:0.5\"")
    sp.add_argument("--v", type=float, default=None,
                    help="learning gain (default 1)")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ilcmap",
        description="Convergence-domain maps for an iterative learning "
                    "controller around a sampled one-pole plant.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("point", help="all tests at a single point")
    _add_common_point_flags(sp)
    _add_learning_flags(sp)
    sp.add_argument("--N", type=int, default=128, help="trial length")
    sp.add_argument("--iters", type=int, default=800,
                    help="direct-iteration budget")
    sp.add_argument("--methods", default=",".join(METHODS),
                    help="comma list from: " + ",".join(METHODS))
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--grid-size", type=int, default=1024,
                    help="phase-grid resolution for the supremum search")
    sp.add_argument("--out", default=None, help="also write a one-row CSV")
    sp.add_argument("--config", default=None, help="JSON config file")

    sp = sub.add_parser("sweep", help="grid sweep to CSV/heatmaps")
    _add_learning_flags(sp)
    sp.add_argument("--grid", default="0.05:0.95:81,-0.9:0.9:81",
                    help="amin:amax:steps,bmin:bmax:steps")
    sp.add_argument("--N", type=int, default=128)
    sp.add_argument("--iters", type=int, default=800)
    sp.add_argument("--methods", default=",".join(METHODS))
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--grid-size", type=int, default=1024)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out", required=False, default=None,
                    help="output CSV path (required)")
    sp.add_argument("--image", default=None,
                    help="prefix for pixmap heatmaps of every field")
    sp.add_argument("--config", default=None)

    sp = sub.add_parser("plant", help="gain limits and step response")
    sp.add_argument("--U", type=float, required=True)
    sp.add_argument("--Kp", type=float, required=True)
    sp.add_argument("--steps", type=int, default=40)
    sp.add_argument("--reference", type=float, default=1.0)
    sp.add_argument("--out", default=None, help="step-response CSV path")

    sp = sub.add_parser("boundaries",
                        help="region boundary curves and contours to CSV")
    _add_learning_flags(sp)
    sp.add_argument("--grid", default="0.05:0.95:81,-0.9:0.9:81")
    sp.add_argument("--from-sweep", dest="from_sweep", default=None,
                    help="sweep CSV to extract numeric contours from")
    sp.add_argument("--field", default="rho",
                    help="numeric contour source: zsup, sigma or rho")
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("compare",
                        help="method agreement from a sweep CSV, or the "
                             "printed-bounds audit")
    sp.add_argument("--from-sweep", dest="from_sweep", default=None)
    sp.add_argument("--eps-boundary", type=float, default=1.5,
                    help="near-boundary exclusion radius in grid cells")
    sp.add_argument("--audit", default=None,
                    help="audit printed bounds of l3ahead or l3back")
    sp.add_argument("--v", type=float, default=None)
    sp.add_argument("--grid", default="0.05:0.95:41,-0.95:0.95:41")
    sp.add_argument("--out", default=None)
    return p


def cmd_point(args) -> int:
    point = _resolve_point(args)
    lf = _resolve_learning(args)
    methods = tuple(m for m in args.methods.split(",") if m)
    if not methods:
        raise SystemExit("error: --methods must name at least one method")
    rep = evaluate_point(point, lf, n=args.N, j_max=args.iters,
                         methods=methods, grid_size=args.grid_size,
                         rng_seed=args.seed)
    try:
        params = plant_from_ab(point)
        coord_note = f" (U={params.u_product:.6g}, Kp={params.kp:.6g})"
    except ValueError:
        coord_note = " (outside the valid plant range)"
    print(f"point A={point.a_gain:.6g} B={point.b_pole:.6g}{coord_note}")
    print(f"learning {lf.label()} v={lf.gain_v:g}  N={args.N} "
          f"iters={args.iters} seed={args.seed}")
    if rep.sup_t is not None:
        print(f"sup|T|       = {rep.sup_t:.9g} (touch-discounted "
              f"{rep.sup_t_strict:.9g})  mc_z: {_TRI_TEXT[rep.mc_z]}")
    if rep.sigma_sq is not None:
        print(f"sigma_max^2  = {rep.sigma_sq:.9g}  "
              f"mc_sigma: {_TRI_TEXT[rep.mc_sigma]}")
    if rep.rho is not None:
        print(f"rho          = {rep.rho:.9g}  ac_rho: {_TRI_TEXT[rep.ac_rho]}")
    if rep.mc_iter is not None:
        stop = "none" if rep.iter_mc_stop is None else rep.iter_mc_stop
        start = "none" if rep.iter_mc_start is None else rep.iter_mc_start
        print(f"iteration    : mc={_TRI_TEXT[rep.mc_iter]} "
              f"ac={_TRI_TEXT[rep.ac_iter]} "
              f"(mc_start={start}, mc_stop={stop})")
    if rep.mc_analytic is not None:
        note = " [necessary-only]" if "necessary-only" in rep.flags else ""
        print(f"analytic MC  : {_TRI_TEXT[rep.mc_analytic]}{note}")
    if rep.ac_analytic is not None:
        note = " [empirical-fit]" if "empirical-fit" in rep.flags else ""
        print(f"analytic AC  : {_TRI_TEXT[rep.ac_analytic]}{note}")
    if rep.flags:
        print("flags        : " + ";".join(rep.flags))
    if args.out:
        write_sweep_csv(args.out, [rep])
        print(f"wrote {args.out}")
    return 0


def cmd_sweep(args) -> int:
    if not args.out:
        raise SystemExit("error: sweep requires --out for the CSV")
    lf = _resolve_learning(args)
    methods = tuple(m for m in args.methods.split(",") if m)
    if not methods:
        raise SystemExit("error: --methods must name at least one method")
    a_range, b_range = _parse_grid(args.grid)
    config = SweepConfig(a_range=a_range, b_range=b_range, learning=lf,
                         n=args.N, j_max=args.iters, methods=methods,
                         seed=args.seed, grid_size=args.grid_size)
    reports, stats = run_sweep(config, workers=args.workers)
    outputs = []
    try:
        write_sweep_csv(args.out, reports)
        outputs.append(args.out)
        if args.image:
            outputs.extend(write_heatmaps(args.image, reports))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    resolved = config.as_dict()
    resolved["workers"] = args.workers
    manifest_path = args.out + ".manifest.json"
    write_manifest(manifest_path, resolved, outputs,
                   tool_version=__version__, seed=args.seed)
    for pair, counts in sorted(stats.pairs.items()):
        print(f"{pair[0]} vs {pair[1]}: agree {counts.both_true}+"
              f"{counts.both_false}, disagree {counts.disagree}, "
              f"marginal {counts.either_marginal}, "
              f"near-boundary {counts.near_boundary}")
    print(f"wrote {args.out} and {manifest_path} "
          f"({len(outputs)} output file(s))")
    return 0


def cmd_plant(args) -> int:
    if args.U <= 0:
        raise SystemExit("error: --U must be > 0")
    limits = no_ilc_gain_limits(args.U)
    point = ab_from_plant(PlantParams(u_product=args.U, kp=args.Kp))
    label = classify_gain(args.U, args.Kp)
    print(f"U={args.U:g} Kp={args.Kp:g} -> A={point.a_gain:.9g} "
          f"B={point.b_pole:.9g}")
    print(f"gain bounds: stability Kp < {limits.kp_limit_divergence:.9g}, "
          f"monotone response Kp < {limits.kp_limit_oscillation:.9g}, "
          f"floor Kp > {limits.kp_floor:g}")
    lo, hi = limits.stable_interval
    print(f"stable interval: {lo:g} < Kp < {hi:.9g}; oscillation-free above "
          f"floor up to Kp < {limits.kp_limit_oscillation:.9g}")
    print(f"classification: {label}")
    resp = simulate_trial(point, reference=args.reference, steps=args.steps)
    if args.out:
        lines = ["k,y"] + [f"{k},{format_float(float(y))}"
                           for k, y in enumerate(resp.samples)]
        with open(args.out, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        print(f"wrote {args.out} ({args.steps + 1} samples, "
              f"{resp.classification})")
    else:
        shown = ", ".join(f"{y:.6g}" for y in resp.samples[:8])
        print(f"step response ({resp.classification}): {shown}"
              + (", ..." if len(resp.samples) > 8 else ""))
    return 0


def cmd_boundaries(args) -> int:
    lf = None
    if args.learning or args.taps:
        lf = _resolve_learning(args)
    rows: list[tuple[str, str, float, float]] = []
    a_range, b_range = _parse_grid(args.grid)
    a_vals = [a_range[0] + k * (a_range[1] - a_range[0]) / (a_range[2] - 1)
              for k in range(a_range[2])]
    bmin, bmax = b_range[0], b_range[1]

    have_curves = False
    if lf is not None:
        try:
            for name, fn in analytic_curves(lf.kind, lf.gain_v):
                for a in a_vals:
                    b = fn(a)
                    if bmin <= b <= bmax:
                        rows.append(("analytic", name, a, b))
            have_curves = True
        except UnsupportedKindError as exc:
            if not args.from_sweep:
                raise SystemExit(f"error: {exc}; supply --from-sweep for "
                                 "numeric contours instead")
            print(f"note: {exc}")

    if args.from_sweep:
        reports = read_sweep_csv(args.from_sweep)
        token = args.field
        source = {"zsup": "zsup", "sup_T": "zsup", "sigma": "sigma",
                  "sigma_sq": "sigma", "rho": "rho"}.get(token)
        if source is None:
            raise SystemExit(f"error: no numeric contour field {token!r}")
        # CSV carries the plain supremum only; contour it for zsup
        field = {"zsup": "sup_T", "sigma": "sigma_sq",
                 "rho": "rho"}[source]
        try:
            polylines = extract_boundary(reports, field)
        except ValueError as exc:
            raise SystemExit(f"error: {exc}")
        for k, line in enumerate(polylines):
            for a, b in line:
                rows.append((source, f"contour-{k}", a, b))
    elif not have_curves:
        raise SystemExit("error: nothing to emit; give --learning with a "
                         "closed-form kind and/or --from-sweep")

    lines = ["source,curve,A,B"]
    for source, curve, a, b in rows:
        lines.append(f"{source},{curve},{format_float(a)},{format_float(b)}")
    with open(args.out, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {args.out} ({len(rows)} vertices)")
    return 0


def cmd_compare(args) -> int:
    if args.audit:
        from .learning import LearningKind
        try:
            kind = next(k for k in LearningKind if k.token == args.audit)
        except StopIteration:
            raise SystemExit(f"error: unknown kind {args.audit!r}")
        a_range, b_range = _parse_grid(args.grid)
        v = 1.0 if args.v is None else args.v
        try:
            rows, stats = audit_printed_bounds(kind, v=v, a_range=a_range,
                                               b_range=b_range)
        except UnsupportedKindError as exc:
            raise SystemExit(f"error: {exc}")
        if args.out:
            lines = ["A,B,printed_mc,sup_T_strict,sup_T,numeric_mc"]
            for a, b, printed, strict, sup, tri in rows:
                lines.append(f"{format_float(a)},{format_float(b)},"
                             f"{int(printed)},{format_float(strict)},"
                             f"{format_float(sup)},{tri.value}")
            with open(args.out, "w") as fh:
                fh.write("\n".join(lines) + "\n")
            print(f"wrote {args.out} ({len(rows)} rows)")
        print(f"audit {kind.token} v={v:g} on {stats['grid'][0]}x"
              f"{stats['grid'][1]} grid:")
        print(f"  numeric MC-true points:           "
              f"{stats['numeric_mc_true']}")
        print(f"  numeric-true but printed-false:   "
              f"{stats['numeric_true_printed_false']} "
              "(violations of the necessary direction)")
        print(f"  printed-true but numeric-false:   "
              f"{stats['printed_true_numeric_false']} "
              "(insufficiency of the printed bounds)")
        if stats["printed_bounds_suspect"]:
            print("  FLAG: printed bounds disagree with the numeric "
                  "supremum verdict; see the table for details")
        return 0

    if not args.from_sweep:
        raise SystemExit("error: give --from-sweep CSV or --audit <kind>")
    reports = read_sweep_csv(args.from_sweep)
    try:
        stats = compare_methods(reports, eps_boundary=args.eps_boundary)
    except ValueError as exc:
        raise SystemExit(f"error: {exc}")
    print(f"grid {stats.grid_shape[0]}x{stats.grid_shape[1]}, "
          f"near-boundary exclusion {stats.boundary_exclusion} cells")
    header = f"{'pair':34s} {'agree_T':>8s} {'agree_F':>8s} " \
             f"{'disagree':>8s} {'marginal':>8s} {'boundary':>8s} {'n/a':>6s}"
    print(header)
    for (fa, fb), c in sorted(stats.pairs.items()):
        print(f"{fa + ' vs ' + fb:34s} {c.both_true:8d} {c.both_false:8d} "
              f"{c.disagree:8d} {c.either_marginal:8d} "
              f"{c.near_boundary:8d} {c.unpopulated:6d}")
    print(f"learning transients: {stats.ac_true_mc_false} points pass AC(rho)"
          f" and fail MC(sigma); {stats.ac_true_mc_false_with_transient} of "
          "them show growth before decay in the iteration trace")
    if args.out:
        lines = ["method_a,method_b,both_true,both_false,disagree,"
                 "either_marginal,near_boundary,unpopulated"]
        for (fa, fb), c in sorted(stats.pairs.items()):
            lines.append(f"{fa},{fb},{c.both_true},{c.both_false},"
                         f"{c.disagree},{c.either_marginal},"
                         f"{c.near_boundary},{c.unpopulated}")
        with open(args.out, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        print(f"wrote {args.out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        defaults = {a.dest: a.default
                    for a in parser._subparsers._group_actions[0]
                    .choices[args.command]._actions}
        args = _apply_config(args, defaults)
    handler = {
        "point": cmd_point,
        "sweep": cmd_sweep,
        "plant": cmd_plant,
        "boundaries": cmd_boundaries,
        "compare": cmd_compare,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
