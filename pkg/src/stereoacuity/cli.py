"""Command-line interface.

Subcommands: levels, render, simulate, analyze, decode, serve.
Exit codes: 0 success, 1 analysis-level warnings, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import service
from .dataset import read_dataset
from .decoder import estimate_disparity, infer_figure
from .errors import DatasetError, StereoacuityError
from .geometry import (
    DEFAULT_N_LEVELS,
    DEFAULT_REFERENCE_M,
    DISPLAY_PRESETS,
    DisplayProfile,
    build_level_table,
)
from .ol import is_ol
from .persist import level_table_to_dict, record_to_dict
from .pngio import read_png, write_png
from .renderer import Orientation, StereogramSpec, render
from .staircase import DeterministicObserver, PsychometricObserver, simulate
from .stats import analyze


def _profile_from_args(args) -> DisplayProfile:
    if getattr(args, "preset", None):
        if args.preset not in DISPLAY_PRESETS:
            raise StereoacuityError(
                f"unknown preset {args.preset!r}; known: {', '.join(sorted(DISPLAY_PRESETS))}"
            )
        return DISPLAY_PRESETS[args.preset]
    return DisplayProfile(ppi=args.ppi, width_px=args.width_px, height_px=args.height_px)


def _add_profile_args(parser):
    parser.add_argument("--preset", help="named display preset (e.g. ipad-retina-264)")
    parser.add_argument("--ppi", type=float, default=264.0, help="pixels per inch")
    parser.add_argument("--width-px", type=int, default=2048)
    parser.add_argument("--height-px", type=int, default=1536)


def cmd_levels(args) -> int:
    profile = _profile_from_args(args)
    table = build_level_table(
        profile, args.distance, n_levels=args.n, reference_m=args.reference
    )
    if args.json:
        print(json.dumps(level_table_to_dict(table), indent=2))
        return 0
    k = f" (k={table.scale_k})" if table.scale_k is not None else ""
    print(f"Levels at {table.distance_m} m, {profile.ppi} ppi{k}")
    print(f"{'level':>5} {'shift_px':>8} {'arcsec':>12} {'rounded':>8}")
    for lv in table.levels:
        print(f"{lv.index:>5} {lv.pixel_shift:>8} {lv.arcsec:>12.3f} {lv.arcsec_rounded:>8}")
    return 0


def cmd_render(args) -> int:
    profile = _profile_from_args(args)
    table = build_level_table(profile, args.distance, n_levels=args.n)
    if not 1 <= args.level <= len(table.levels):
        raise StereoacuityError(f"level {args.level} outside 1..{len(table.levels)}")
    spec = StereogramSpec(
        profile=profile,
        distance_m=args.distance,
        level=table.level(args.level),
        orientation=Orientation(args.orientation),
        seed=args.seed,
        dot_coverage=args.coverage,
    )
    write_png(render(spec), args.out)
    print(f"wrote {args.out}")
    return 0


def _parse_observer(raw: str):
    kind, _, params = raw.partition(":")
    try:
        if kind == "deterministic":
            return DeterministicObserver(threshold_arcsec=float(params))
        if kind == "psychometric":
            parts = [float(p) for p in params.split(",")]
            if len(parts) == 2:
                threshold, slope = parts
                lapse = 0.0
            else:
                threshold, slope, lapse = parts
            return PsychometricObserver(
                threshold_arcsec=threshold, slope_arcsec=slope, lapse_rate=lapse
            )
    except (ValueError, TypeError):
        pass
    raise StereoacuityError(
        f"cannot parse observer {raw!r}; use deterministic:THETA or "
        "psychometric:THETA,SLOPE[,LAPSE]"
    )


def cmd_simulate(args) -> int:
    if args.runs < 1:
        raise StereoacuityError(f"--runs must be >= 1, got {args.runs}")
    profile = _profile_from_args(args)
    table = build_level_table(profile, args.distance, n_levels=args.n)
    observer = _parse_observer(args.observer)
    records = []
    for run in range(args.runs):
        seed = int(np.random.SeedSequence([args.seed, run]).generate_state(1)[0])
        records.append(simulate(observer, table, seed, profile=profile))

    outcomes = {}
    for rec in records:
        key = "OL" if is_ol(rec.outcome) else f"{rec.outcome:.1f}"
        outcomes[key] = outcomes.get(key, 0) + 1
    summary = {
        "runs": args.runs,
        "observer": args.observer,
        "mean_trials": sum(len(r.trials) for r in records) / len(records),
        "outcome_counts": outcomes,
    }
    print(
        json.dumps(
            {"summary": summary, "sessions": [record_to_dict(r) for r in records]},
            indent=2,
        )
    )
    return 0


def cmd_analyze(args) -> int:
    records = read_dataset(args.input)
    report = analyze(records)
    if args.json_out:
        Path(args.json_out).write_text(json.dumps(report.to_dict(), indent=2), encoding="utf-8")
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(report.text_tables())
    warnings = [
        c.name
        for c in report.between_days + report.between_instruments
        if c.kappa is None or c.wilcoxon is None
    ]
    if warnings:
        print(f"warning: incomplete comparisons: {', '.join(warnings)}", file=sys.stderr)
        return 1
    return 0


def cmd_decode(args) -> int:
    img = read_png(args.image)
    dmap = estimate_disparity(img, search_range=args.search_range, block_px=args.block_px)
    shift, detection = infer_figure(dmap)
    out = {
        "block_px": dmap.block_px,
        "stride_px": dmap.stride_px,
        "search_range": dmap.search_range,
        "pixel_shift": shift,
        "orientation": detection.orientation.value,
        "template_iou": detection.iou,
        "lags": dmap.lags.tolist(),
        "confidence": np.round(dmap.confidence, 3).tolist(),
    }
    print(json.dumps(out))
    return 0


def cmd_serve(args) -> int:
    service.serve(port=args.port, host=args.host, log_path=args.log)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stereoacuity",
        description="Random-dot anaglyph stereoacuity toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("levels", help="print the disparity level table")
    _add_profile_args(p)
    p.add_argument("--distance", type=float, required=True, help="viewing distance in m")
    p.add_argument("--n", type=int, default=DEFAULT_N_LEVELS)
    p.add_argument("--reference", type=float, default=DEFAULT_REFERENCE_M)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_levels)

    p = sub.add_parser("render", help="render a stimulus to PNG")
    _add_profile_args(p)
    p.add_argument("--distance", type=float, required=True)
    p.add_argument("--level", type=int, required=True, help="1-based level index")
    p.add_argument(
        "--orientation", choices=[o.value for o in Orientation], required=True
    )
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--coverage", type=float, default=0.25)
    p.add_argument("--n", type=int, default=DEFAULT_N_LEVELS)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("simulate", help="run simulated observers")
    _add_profile_args(p)
    p.add_argument("--observer", required=True, help="deterministic:THETA or psychometric:THETA,SLOPE[,LAPSE]")
    p.add_argument("--distance", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--n", type=int, default=DEFAULT_N_LEVELS)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="analyze a measurement CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--json", action="store_true", help="print JSON instead of text tables")
    p.add_argument("--json-out", help="also write the JSON report to a file")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("decode", help="recover disparity and orientation from a PNG")
    p.add_argument("--image", required=True)
    p.add_argument("--search-range", type=int, default=12)
    p.add_argument("--block-px", type=int, default=None)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("serve", help="run the local session service")
    p.add_argument("--port", type=int, default=service.DEFAULT_PORT)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--log", help="JSONL session log path")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DatasetError as exc:
        where = f" (line {exc.line_number})" if exc.line_number else ""
        print(f"error: {exc}{where}", file=sys.stderr)
        return 2
    except StereoacuityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
