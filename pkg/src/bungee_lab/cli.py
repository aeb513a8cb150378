"""Command line interface.

Exit codes: 0 when the requested check found no violations (or a
preset met every expectation), 1 when violations were found or a check
was inconclusive, 2 for usage or expression errors.  Reports go to
stdout as JSON; one-line summaries go to stderr.

Regions are given as --grid "cx,cy,w,h" (sampling and root finding)
or --grid "cx,cy,w,h,nx,ny" (rendering, which needs pixel counts).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

from .expr import ParseError, constant_value, parse
from .grid import GridSpec, classify_grid, mask_stats
from .orbit import OrbitParams, Rect, classify_point, find_fixed_points
from .presets import DEFAULT_SAMPLES, PRESETS, run_preset
from .render import DEFAULT_N_SHADE, render_ppm
from .verify import (
    SamplerSpec,
    pair,
    verify_commute,
    verify_composition_containments,
    verify_invariance,
    verify_partition,
    verify_property_a,
    verify_translate,
)


class CliError(Exception):
    """Bad input discovered after argparse; exits with status 2."""


def _parse_complex(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]))
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise CliError(f"expected a complex number as RE or RE,IM, got {text!r}")


def _load_expr(text: str):
    try:
        return parse(text)
    except ParseError as exc:
        marker = " " * exc.offset + "^"
        raise CliError(f"bad expression: {exc}\n  {text}\n  {marker}") from exc


def _load_constant(text: str) -> complex:
    e = _load_expr(text)
    try:
        return constant_value(e)
    except ValueError as exc:
        raise CliError(f"bad constant expression {text!r}: {exc}") from exc


def _split_grid(text: str) -> list[float]:
    parts = text.split(",")
    if len(parts) not in (4, 6):
        raise CliError(
            f"--grid wants cx,cy,w,h or cx,cy,w,h,nx,ny, got {text!r}"
        )
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise CliError(f"bad --grid value {text!r}: {exc}") from exc


def _grid_rect(text: str) -> Rect:
    nums = _split_grid(text)
    try:
        return Rect(complex(nums[0], nums[1]), nums[2], nums[3])
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _grid_spec(text: str) -> GridSpec:
    nums = _split_grid(text)
    if len(nums) != 6:
        raise CliError("rendering needs the full --grid cx,cy,w,h,nx,ny form")
    nx, ny = int(nums[4]), int(nums[5])
    if nx != nums[4] or ny != nums[5]:
        raise CliError("pixel counts nx, ny must be integers")
    try:
        return GridSpec(complex(nums[0], nums[1]), nums[2], nums[3], nx, ny)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _add_orbit_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--escape-radius", type=float, default=1e8)
    p.add_argument("--bound-radius", type=float, default=1e4)
    p.add_argument("--min-osc", type=int, default=3)
    p.add_argument("--tail-window", type=int, default=10)


def _orbit_params(args) -> OrbitParams:
    try:
        return OrbitParams(
            max_iter=args.max_iter,
            escape_radius=args.escape_radius,
            bound_radius=args.bound_radius,
            min_oscillations=args.min_osc,
            tail_window=args.tail_window,
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _add_sampler_args(p: argparse.ArgumentParser, grid: str = "0,0,4,4") -> None:
    p.add_argument("--grid", default=grid, metavar="CX,CY,W,H")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=42)


def _sampler(args) -> SamplerSpec:
    try:
        return SamplerSpec(_grid_rect(args.grid), args.samples, args.seed)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _emit(payload, out_path: str | None) -> None:
    text = json.dumps(payload, indent=2)
    print(text)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _note(line: str) -> None:
    print(line, file=sys.stderr)


def _reports_exit(reports) -> int:
    bad = False
    for r in reports:
        flag = "" if r.violations == 0 else "  <- violations"
        if r.detail.get("inconclusive"):
            flag = "  <- inconclusive"
        _note(
            f"{r.relation}: {r.violations} violations, "
            f"{r.samples_confident}/{r.samples_total} usable samples{flag}"
        )
        bad = bad or r.violations > 0 or bool(r.detail.get("inconclusive"))
    return 1 if bad else 0


# ---------------------------------------------------------------------------
# Commands


def _cmd_classify(args) -> int:
    f = _load_expr(args.f)
    z0 = _parse_complex(args.z0)
    params = _orbit_params(args)
    result, trace = classify_point(f, z0, params)
    mags = list(trace.magnitudes)
    payload = {
        "function": str(f),
        "z0": pair(z0),
        "verdict": result.verdict.label,
        "confidence": result.confidence,
        "termination": {
            "kind": result.termination.kind,
            "step": result.termination.step,
        },
        "oscillations": result.oscillation_count,
        "params": params.to_dict(),
        "log10_magnitudes_head": mags[:10],
        "log10_magnitudes_tail": mags[-10:],
    }
    _emit(payload, getattr(args, "out", None))
    _note(
        f"{result.verdict.label} ({result.confidence}), "
        f"terminated {result.termination.kind} at step {result.termination.step}, "
        f"{result.oscillation_count} oscillations"
    )
    return 0


def _cmd_render(args) -> int:
    f = _load_expr(args.f)
    params = _orbit_params(args)
    spec = _grid_spec(args.grid)
    grid = classify_grid(f, spec, params, workers=args.workers)
    data = render_ppm(grid, n_shade=args.n_shade)
    with open(args.out, "wb") as fh:
        fh.write(data)
    stats = mask_stats(grid)
    payload = {
        "function": str(f),
        "grid": spec.to_dict(),
        "params": params.to_dict(),
        "stats": stats,
        "out": args.out,
        "sha256": hashlib.sha256(data).hexdigest(),
    }
    _emit(payload, None)
    _note(f"wrote {args.out} ({spec.nx}x{spec.ny}), counts {stats['counts']}")
    return 0


def _cmd_fixed_points(args) -> int:
    f = _load_expr(args.f)
    region = _grid_rect(args.grid)
    reports = find_fixed_points(f, region, starts=args.starts)
    payload = [
        {
            "location": pair(r.location),
            "multiplier": pair(r.multiplier),
            "kind": r.kind,
            "root_of_unity_order": r.root_of_unity_order,
            "residual": r.residual,
        }
        for r in reports
    ]
    _emit({"function": str(f), "fixed_points": payload}, getattr(args, "out", None))
    _note(f"{len(reports)} fixed point(s) in region")
    return 0


def _run_preset_checks(name: str, samples: int, seed: int, out: str | None) -> int:
    try:
        results = run_preset(name, samples=samples, seed=seed)
    except KeyError as exc:
        raise CliError(str(exc.args[0])) from None
    _emit([c.to_dict() for c in results], out)
    ok = True
    for c in results:
        _note(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  ({c.expectation})")
        ok = ok and c.passed
    return 0 if ok else 1


def _list_presets() -> int:
    listing = [
        {"name": p.name, "description": p.description} for p in PRESETS.values()
    ]
    listing.append(
        {"name": "all-paper", "description": "run every preset in sequence"}
    )
    _emit(listing, None)
    return 0


def _cmd_verify(args) -> int:
    if args.list_presets:
        return _list_presets()
    if args.preset is not None:
        if args.relation is not None:
            raise CliError("give either --preset or a relation subcommand, not both")
        samples = DEFAULT_SAMPLES if args.samples is None else args.samples
        seed = 42 if args.seed is None else args.seed
        return _run_preset_checks(args.preset, samples, seed, args.out)
    if args.relation is None:
        raise CliError(
            "verify needs a relation subcommand "
            "(containment, invariance, commute, translate, property-a, partition) "
            "or --preset NAME"
        )

    params = _orbit_params(args)
    sampler = _sampler(args)
    strict = bool(getattr(args, "strict", False))

    if args.relation == "containment":
        f = _load_expr(args.f)
        g = _load_expr(args.g)
        reports = verify_composition_containments(
            f,
            g,
            sampler,
            params,
            strict=strict,
            bu_mode="all" if args.bu_mode == "intersection" else "any",
        )
    elif args.relation == "invariance":
        f = _load_expr(args.f)
        g = _load_expr(args.g)
        kinds = (
            ("escaping", "bounded") if args.kind == "both" else (args.kind,)
        )
        reports = [
            verify_invariance(f, g, kind, sampler, params, strict=strict)
            for kind in kinds
        ]
    elif args.relation == "commute":
        f = _load_expr(args.f)
        g = _load_expr(args.g)
        reports = [verify_commute(f, g, sampler, params, tol=args.tol)]
    elif args.relation == "translate":
        f = _load_expr(args.f)
        c = _load_constant(args.C)
        reports = [
            verify_translate(f, c, sampler, params, n_max=args.n_max, tol=args.tol)
        ]
    elif args.relation == "property-a":
        f = _load_expr(args.f)
        g = _load_expr(args.g)
        reports = [verify_property_a(f, g, sampler, params)]
    elif args.relation == "partition":
        f = _load_expr(args.f)
        reports = [verify_partition(f, sampler, params)]
    else:  # pragma: no cover - argparse restricts choices
        raise CliError(f"unknown relation {args.relation!r}")

    payload = [r.to_dict() for r in reports]
    _emit(payload[0] if len(payload) == 1 else payload, getattr(args, "out", None))
    return _reports_exit(reports)


def _cmd_preset(args) -> int:
    if args.list or args.name is None:
        return _list_presets()
    return _run_preset_checks(args.name, args.samples, args.seed, args.out)


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="bungee-lab",
        description=(
            "Classify orbits of complex maps as escaping, bounded, or "
            "bungee; render verdict grids; check set relations by sampling."
        ),
    )
    sub = p.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("classify", help="classify one seed point")
    pc.add_argument("--f", required=True, metavar="EXPR")
    pc.add_argument("--z0", required=True, metavar="RE,IM")
    pc.add_argument("--out", default=None)
    _add_orbit_args(pc)

    pr = sub.add_parser("render", help="render a verdict grid to PPM")
    pr.add_argument("--f", required=True, metavar="EXPR")
    pr.add_argument("--grid", default="0,0,4,4,512,512", metavar="CX,CY,W,H,NX,NY")
    pr.add_argument("--out", required=True)
    pr.add_argument("--n-shade", type=int, default=DEFAULT_N_SHADE)
    pr.add_argument("--workers", type=int, default=None)
    _add_orbit_args(pr)

    pf = sub.add_parser("fixed-points", help="locate fixed points by Newton search")
    pf.add_argument("--f", required=True, metavar="EXPR")
    pf.add_argument("--grid", default="0,0,4,4", metavar="CX,CY,W,H")
    pf.add_argument("--starts", type=int, default=32)
    pf.add_argument("--out", default=None)

    pv = sub.add_parser("verify", help="sampling checks of set relations")
    pv.add_argument("--preset", default=None, metavar="NAME")
    pv.add_argument("--list-presets", action="store_true")
    pv.add_argument("--samples", type=int, default=None)
    pv.add_argument("--seed", type=int, default=None)
    pv.add_argument("--out", default=None)
    vsub = pv.add_subparsers(dest="relation")
    pv.set_defaults(relation=None)

    def common(sp, g_required=True, grid="0,0,4,4"):
        sp.add_argument("--f", required=True, metavar="EXPR")
        if g_required:
            sp.add_argument("--g", required=True, metavar="EXPR")
        _add_sampler_args(sp, grid)
        _add_orbit_args(sp)
        sp.add_argument("--strict", action="store_true")
        sp.add_argument("--out", default=None)

    sp = vsub.add_parser("containment", help="composition containments for f, g")
    common(sp)
    sp.add_argument("--bu-mode", choices=("union", "intersection"), default="union")

    sp = vsub.add_parser("invariance", help="forward invariance of S(f) under g")
    common(sp)
    sp.add_argument(
        "--kind", choices=("escaping", "bounded", "bungee", "both"), default="both"
    )

    sp = vsub.add_parser("commute", help="compare f(g(z)) with g(f(z))")
    common(sp, grid="0,0,2,2")
    sp.add_argument("--tol", type=float, default=1e-9)

    sp = vsub.add_parser("translate", help="iterates of f + C against f")
    common(sp, g_required=False)
    sp.add_argument("--C", required=True, metavar="EXPR")
    sp.add_argument("--n-max", type=int, default=20)
    sp.add_argument("--tol", type=float, default=1e-9)

    sp = vsub.add_parser(
        "property-a", help="f sends confidently escaping g-orbits far out"
    )
    common(sp)

    sp = vsub.add_parser("partition", help="verdict breakdown for one map")
    common(sp, g_required=False)

    pp = sub.add_parser("preset", help="run a canned verification suite")
    pp.add_argument("name", nargs="?", default=None)
    pp.add_argument("--list", action="store_true")
    pp.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    pp.add_argument("--seed", type=int, default=42)
    pp.add_argument("--out", default=None)

    return p


_HANDLERS = {
    "classify": _cmd_classify,
    "render": _cmd_render,
    "fixed-points": _cmd_fixed_points,
    "verify": _cmd_verify,
    "preset": _cmd_preset,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _HANDLERS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
