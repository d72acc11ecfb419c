"""Command-line front end.

Artifacts are deterministic: identical configs produce byte-identical
JSON/CSV/PPM outputs.  Wall time therefore goes to stderr; pass --timing to
embed it in the artifact (opting out of byte-identity).  All floats are
rounded to 12 significant digits before serialization.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from typing import Optional

import numpy as np

from . import __version__
from .embed import TileParams, boundary_stats, rasterize_tile, tile_membership
from .numsys import NumberSystem, VerificationBudgetError, expand, verify_number_system
from .polycore import ModulusContext, parse_poly, parse_ring_poly
from .spectra import count_region, enumerate_region, region_bounds
from .stats import border_hits, clt_harness, pattern_count, resolve_preset, weyl_sum


def _round12(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip() != ""]


def _config_dict(args: argparse.Namespace) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


_T0 = time.perf_counter()


def _metadata(args: argparse.Namespace) -> dict:
    meta = {"version": __version__, "config": _config_dict(args)}
    if getattr(args, "timing", False):
        meta["wall_time_s"] = time.perf_counter() - _T0
    return meta


def _emit_json(payload: dict, args: argparse.Namespace) -> None:
    payload = dict(payload)
    payload["metadata"] = _metadata(args)
    text = json.dumps(_round12(payload), indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_preamble(args: argparse.Namespace) -> str:
    cfg = json.dumps(_round12(_config_dict(args)), sort_keys=True)
    return f"# polynum {__version__}\n# config: {cfg}\n"


def _fig_path(out: str, suffix: str) -> str:
    stem = out.rsplit(".", 1)[0] if "." in out.split("/")[-1] else out
    return f"{stem}{suffix}"


def _ns_from(args: argparse.Namespace) -> NumberSystem:
    return NumberSystem(parse_poly(args.poly), _ints(args.digits))


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        report = verify_number_system(
            parse_poly(args.poly), _ints(args.digits),
            search_slack=args.slack, state_budget=args.budget,
        )
    except VerificationBudgetError as exc:
        _emit_json({"verdict": "inconclusive", "error": str(exc)}, args)
        return 1
    _emit_json(report.to_json_dict(), args)
    return 0


def cmd_expand(args: argparse.Namespace) -> int:
    ns = _ns_from(args)
    g = ns.ctx.residue(parse_poly(args.element))
    e = expand(g, ns, step_cap=args.step_cap)
    _emit_json(
        {"element": args.element, "digits": list(e.digits), "length": e.length},
        args,
    )
    return 0


def cmd_enumerate(args: argparse.Namespace) -> int:
    ctx = ModulusContext(parse_poly(args.poly))
    region = region_bounds(args.T, ctx)
    lines = [_csv_preamble(args)]
    lines.append(",".join(f"coeff_{i}" for i in range(ctx.n)) + "\n")
    for r in enumerate_region(region, budget=args.budget):
        lines.append(",".join(str(c) for c in r.coeff_vector()) + "\n")
    text = "".join(lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_count(args: argparse.Namespace) -> int:
    ctx = ModulusContext(parse_poly(args.poly))
    rc = count_region(region_bounds(args.T, ctx), budget=args.budget)
    _emit_json(
        {"count": rc.count, "normalized": rc.normalized, "boundary_band": rc.boundary_band},
        args,
    )
    return 0


def _write_ppm(pixels: np.ndarray, path: str) -> tuple[int, int]:
    """Binary P6, white = covered cell, black = empty; rows top-down."""
    if pixels.ndim != 2 or pixels.shape[1] not in (1, 2):
        raise ValueError("PPM rendering supports 1- and 2-dimensional rasters")
    if pixels.shape[1] == 1:
        pixels = np.column_stack([pixels[:, 0], np.zeros(len(pixels), dtype=np.int64)])
    xmin, ymin = pixels.min(axis=0)
    xmax, ymax = pixels.max(axis=0)
    w = int(xmax - xmin + 1)
    h = int(ymax - ymin + 1)
    img = np.zeros((h, w), dtype=np.uint8)
    img[(ymax - pixels[:, 1]).astype(int), (pixels[:, 0] - xmin).astype(int)] = 255
    rgb = np.repeat(img[:, :, None], 3, axis=2)
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode())
        fh.write(rgb.tobytes())
    return w, h


def cmd_tile(args: argparse.Namespace) -> int:
    ns = _ns_from(args)
    params = TileParams(depth=args.depth, grid=args.size)
    if args.point is not None:
        x = tuple(float(t) for t in args.point.split(","))
        res = tile_membership(x, ns, params)
        _emit_json({"status": res.status, "digits": list(res.digits)}, args)
        return 0
    if not args.out:
        raise ValueError("tile rasterization needs --out for the PPM image")
    raster = rasterize_tile(ns, params)
    w, h = _write_ppm(raster.pixels, args.out)
    if args.cloud_csv:
        with open(args.cloud_csv, "w") as fh:
            fh.write(_csv_preamble(args))
            fh.write(",".join(f"x_{i}" for i in range(raster.points.shape[1])) + "\n")
            for row in raster.points:
                fh.write(",".join(f"{v:.12g}" for v in row) + "\n")
    if args.fig:
        from .figures import save_tile_figure

        save_tile_figure(raster, _fig_path(args.out, ".png"))
    summary = {
        "image": args.out,
        "width": w,
        "height": h,
        "depth": raster.depth,
        "area_grid": raster.area_grid,
        "area_estimate": raster.area_estimate,
        "sup_norm": raster.sup_norm,
    }
    print(json.dumps(_round12(summary)), file=sys.stderr)
    return 0


def cmd_boundary(args: argparse.Namespace) -> int:
    ns = _ns_from(args)
    report = boundary_stats(ns, scales=tuple(_ints(args.scales)), depth=args.depth)
    payload = {
        "counts": {str(s): c for s, c in sorted(report.counts.items())},
        "scales": list(report.scales),
        "depth": report.depth,
        "dimension_estimate": report.dimension_estimate,
        "mu_estimate": report.mu_estimate,
    }
    _emit_json(payload, args)
    if args.fig:
        if not args.out:
            raise ValueError("--fig needs --out to derive the figure path")
        from .figures import save_boundary_figure

        save_boundary_figure(report, _fig_path(args.out, "_boxes.png"))
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    ns = _ns_from(args)
    P = parse_ring_poly(args.P, ns.ctx)
    f = resolve_preset(args.f)
    report = clt_harness(
        P, f, args.T, ns, C=args.C, bins=args.bins, workers=args.workers,
    )
    _emit_json(report.to_json_dict(), args)
    if args.out:
        hist_path = _fig_path(args.out, "_hist.csv")
        with open(hist_path, "w") as fh:
            fh.write(_csv_preamble(args))
            fh.write("bin_left,bin_right,count\n")
            for i, c in enumerate(report.histogram_counts):
                left = report.histogram_edges[i]
                right = report.histogram_edges[i + 1]
                fh.write(f"{left:.12g},{right:.12g},{c}\n")
        if args.fig:
            from .figures import save_histogram_figure

            save_histogram_figure(report, _fig_path(args.out, "_hist.png"))
    return 0


def cmd_weyl(args: argparse.Namespace) -> int:
    ns = _ns_from(args)
    P = parse_ring_poly(args.P, ns.ctx)
    report = weyl_sum(
        [_ints(args.h)], [args.l], P, args.T, ns, C=args.C, workers=args.workers,
    )
    _emit_json(report.to_json_dict(), args)
    return 0


def cmd_patterns(args: argparse.Namespace) -> int:
    ns = _ns_from(args)
    P = parse_ring_poly(args.P, ns.ctx)
    report = pattern_count(
        _ints(args.positions), _ints(args.pattern), P, args.T, ns,
        C=args.C, workers=args.workers,
    )
    payload = {
        "count": report.count,
        "total": report.total,
        "expected": report.expected,
        "relative_error": report.relative_error,
        "frequency": report.frequency,
        "admissible": report.admissible,
        "window": list(report.window),
    }
    _emit_json(payload, args)
    return 0


def cmd_border(args: argparse.Namespace) -> int:
    ns = _ns_from(args)
    P = parse_ring_poly(args.P, ns.ctx)
    report = border_hits(
        args.l, P, args.T, ns, depth=args.depth, C=args.C, workers=args.workers,
    )
    payload = {
        "hits": report.hits,
        "total": report.total,
        "ratio": report.ratio,
        "level": report.level,
        "depth": report.depth,
        "admissible": report.admissible,
    }
    _emit_json(payload, args)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="artifact path (default: stdout)")
    common.add_argument("--seed", type=int, default=0, help="seed recorded in metadata")
    common.add_argument("--workers", type=int, default=1, help="worker threads")
    common.add_argument("--fig", action="store_true", help="also render a PNG figure")
    common.add_argument(
        "--timing", action="store_true",
        help="embed wall time in the artifact (breaks byte-identity)",
    )

    parser = argparse.ArgumentParser(
        prog="polynum",
        description="Number systems in Z[X]/(p): expansion, regions, tiles, statistics.",
    )
    parser.add_argument("--version", action="version", version=f"polynum {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name: str, func, help_: str, poly=True, digits=True):
        p = sub.add_parser(name, parents=[common], help=help_)
        if poly:
            p.add_argument("--poly", required=True, help='modulus, e.g. "2,2,1" or "X^2+2*X+2"')
        if digits:
            p.add_argument("--digits", required=True, help='digit set, e.g. "0,1"')
        p.set_defaults(func=func)
        return p

    p = add("verify", cmd_verify, "decide whether (p, N) is a number system")
    p.add_argument("--slack", type=float, default=0.05)
    p.add_argument("--budget", type=int, default=200_000)

    p = add("expand", cmd_expand, "digit expansion of an element")
    p.add_argument("--element", required=True, help='residue, e.g. "6" or "1,1"')
    p.add_argument("--step-cap", type=int, default=None, dest="step_cap")

    p = add("enumerate", cmd_enumerate, "list the residues of R(T) as CSV", digits=False)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--budget", type=int, default=5_000_000)

    p = add("count", cmd_count, "count R(T)", digits=False)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--budget", type=int, default=5_000_000)

    p = add("tile", cmd_tile, "raster the fundamental domain (PPM), or test a point")
    p.add_argument("--depth", type=int, default=12, help="refutation depth v")
    p.add_argument("--size", type=int, default=512, help="pixels per unit")
    p.add_argument("--point", default=None, help='membership query, e.g. "0.3,0.4"')
    p.add_argument("--cloud-csv", default=None, dest="cloud_csv")

    p = add("boundary", cmd_boundary, "boundary box-counting statistics")
    p.add_argument("--scales", default="2,3,4,5")
    p.add_argument("--depth", type=int, default=16)

    p = add("stats", cmd_stats, "empirical limit-law harness")
    p.add_argument("--P", required=True, help='polynomial in Y, e.g. "Y^2"')
    p.add_argument("--f", default="sumdigits", help="additive preset (sumdigits, indicator:<a>)")
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--C", type=float, default=3.0)
    p.add_argument("--bins", type=int, default=64)

    p = add("weyl", cmd_weyl, "exponential sum over R(T)")
    p.add_argument("--P", required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--h", required=True, help='frequency vector, e.g. "1,0"')
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--C", type=float, default=3.0)

    p = add("patterns", cmd_patterns, "digit-pattern counts over R(T)")
    p.add_argument("--P", required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--positions", required=True, help='e.g. "4,9"')
    p.add_argument("--pattern", required=True, help='digit values, e.g. "1,0"')
    p.add_argument("--C", type=float, default=3.0)

    p = add("border", cmd_border, "boundary-band hits F_l over R(T)")
    p.add_argument("--P", required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--C", type=float, default=3.0)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    global _T0
    _T0 = time.perf_counter()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.func(args)
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        print(json.dumps({"error": f"{type(exc).__name__}: {exc}"}), file=sys.stderr)
        return 1
    print(f"wall time {time.perf_counter() - _T0:.3f} s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
