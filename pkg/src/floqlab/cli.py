"""Command-line front end.

Angles are accepted either in radians (plain numbers) or in units of pi
with a trailing "pi", e.g. --tx 0.5pi.  An optional JSON config file
provides per-command defaults that explicit flags override.  Exit codes:
0 success, 1 I/O or usage error, 2 no band inversion found, 3 pulse
verification failure.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import FloqlabError, NoBisError
from .lattice import count_edge_modes, default_edge_cells, lattice_spectrum
from .model import Frame, ModelParams
from .pulsegen import compile_schedule, verify_schedule
from .quench import QuenchSpec, bis_report, evolve_polarizations
from .serialize import config_hash, write_csv, write_json
from .topology import BOUNDARY_TOL, DEFAULT_RESOLUTION, phase_diagram

VERIFY_DISTANCE = 1e-10


def parse_angle(text: str) -> float:
    text = text.strip().lower()
    if text.endswith("pi"):
        return float(text[:-2] or "1") * np.pi
    return float(text)


def parse_frame(text: str) -> Frame:
    return Frame(text.lower())


def _add_common(parser):
    parser.add_argument("--config", type=Path, default=None,
                        help="JSON file with defaults for this command")
    parser.add_argument("-o", "--output-dir", type=Path, default=Path("."))


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="floqlab", description=__doc__)
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phase-diagram", help="invariants over a (tx, ty) grid")
    _add_common(p)
    p.add_argument("--tx-min", type=parse_angle, default=0.0)
    p.add_argument("--tx-max", type=parse_angle, default=3 * np.pi)
    p.add_argument("--ty-min", type=parse_angle, default=0.0)
    p.add_argument("--ty-max", type=parse_angle, default=3 * np.pi)
    p.add_argument("--cells", type=int, default=60, help="cells per axis")
    p.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION)
    p.add_argument("--boundary-tol", type=float, default=BOUNDARY_TOL)
    p.add_argument("--workers", type=int, default=None,
                   help="parallel workers (default: FLOQLAB_WORKERS or 1)")
    p.set_defaults(func=cmd_phase_diagram)

    p = sub.add_parser("quench", help="quench traces and BIS winding report")
    _add_common(p)
    p.add_argument("--tx", type=parse_angle, required=True)
    p.add_argument("--ty", type=parse_angle, required=True)
    p.add_argument("--frame", choices=["sym1", "sym2", "both"], default="both")
    p.add_argument("--steps", type=int, default=60)
    p.add_argument("--grid", type=int, default=512)
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--floor-tol", type=float, default=None)
    p.set_defaults(func=cmd_quench)

    p = sub.add_parser("spectrum", help="open/periodic lattice eigenphases")
    _add_common(p)
    p.add_argument("--tx", type=parse_angle, required=True)
    p.add_argument("--ty", type=parse_angle, required=True)
    p.add_argument("--frame", type=parse_frame, default=Frame.SYM1)
    p.add_argument("--length", type=int, default=40, help="unit cells")
    p.add_argument("--boundary", choices=["open", "periodic"], default="open")
    p.add_argument("--edge-cells", type=int, default=None)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("edges", help="count 0- and pi-gap edge modes")
    _add_common(p)
    p.add_argument("--tx", type=parse_angle, required=True)
    p.add_argument("--ty", type=parse_angle, required=True)
    p.add_argument("--frame", type=parse_frame, default=Frame.SYM1)
    p.add_argument("--length", type=int, default=40)
    p.add_argument("--e-tol", type=float, default=1e-3)
    p.add_argument("--edge-cells", type=int, default=None)
    p.add_argument("--weight-tol", type=float, default=0.5)
    p.set_defaults(func=cmd_edges)

    p = sub.add_parser("pulses", help="compile a frame evolution to pulses")
    _add_common(p)
    p.add_argument("--tx", type=parse_angle, required=True)
    p.add_argument("--ty", type=parse_angle, required=True)
    p.add_argument("--k", type=parse_angle, required=True)
    p.add_argument("--frame", type=parse_frame, default=Frame.SYM1)
    p.add_argument("--periods", type=int, default=1)
    p.add_argument("--omega-ref", type=float, required=True,
                   help="reference Rabi rate (rad/s); no physical default")
    p.add_argument("--keep-zero-pulses", action="store_true")
    p.add_argument("--verify", action="store_true",
                   help="re-simulate the schedule and check the distance")
    p.set_defaults(func=cmd_pulses)
    return top


def _apply_config_file(args: argparse.Namespace, argv) -> argparse.Namespace:
    if args.config is None:
        return args
    with args.config.open("r", encoding="utf-8") as fh:
        overrides = json.load(fh)
    block = overrides.get(args.command, overrides)
    merged = vars(args).copy()
    explicit = _explicit_flags(argv)
    for key, value in block.items():
        attr = key.replace("-", "_")
        if attr in merged and attr not in explicit:
            if attr == "frame" and args.command in ("spectrum", "edges", "pulses"):
                value = parse_frame(value)
            merged[attr] = value
    return argparse.Namespace(**merged)


def _explicit_flags(argv):
    # flags given on the command line win over the config file
    explicit = set()
    for token in argv:
        if token.startswith("--"):
            explicit.add(token[2:].split("=", 1)[0].replace("-", "_"))
    return explicit


def cmd_phase_diagram(args) -> int:
    cfg = {
        "command": "phase-diagram",
        "tx_range": [args.tx_min, args.tx_max],
        "ty_range": [args.ty_min, args.ty_max],
        "cells": args.cells,
        "resolution": args.resolution,
        "boundary_tol": args.boundary_tol,
    }
    h = config_hash(cfg)
    diagram = phase_diagram(
        (args.tx_min, args.tx_max),
        (args.ty_min, args.ty_max),
        cells=args.cells,
        resolution=args.resolution,
        boundary_tol=args.boundary_tol,
        workers=args.workers,
    )
    rows = []
    counts = {}
    for cell in diagram.cells:
        inv = cell.invariants
        rows.append(
            (
                cell.tx,
                cell.ty,
                "" if inv is None else inv.nu0,
                "" if inv is None else inv.nu_pi,
                int(cell.boundary),
                cell.min_gap0,
                cell.min_gap_pi,
            )
        )
        if inv is not None:
            key = f"({inv.nu0},{inv.nu_pi})"
            counts[key] = counts.get(key, 0) + 1
    args.output_dir.mkdir(parents=True, exist_ok=True)
    write_csv(
        args.output_dir / "phase_diagram.csv",
        ["t_x", "t_y", "nu0", "nu_pi", "boundary_flag", "min_gap0", "min_gap_pi"],
        rows,
        h,
    )
    write_json(
        args.output_dir / "phase_diagram.json",
        {
            "config": cfg,
            "cells_total": len(diagram.cells),
            "cells_boundary": sum(c.boundary for c in diagram.cells),
            "phase_counts": counts,
        },
        h,
    )
    print(f"phase diagram: {len(diagram.cells)} cells -> {args.output_dir}")
    return 0


def cmd_quench(args) -> int:
    frames = [Frame.SYM1, Frame.SYM2] if args.frame == "both" else [Frame(args.frame)]
    cfg = {
        "command": "quench",
        "tx": args.tx,
        "ty": args.ty,
        "frames": [f.value for f in frames],
        "steps": args.steps,
        "grid": args.grid,
        "shots": args.shots,
        "seed": args.seed,
        "floor_tol": args.floor_tol,
    }
    h = config_hash(cfg)
    args.output_dir.mkdir(parents=True, exist_ok=True)
    params = ModelParams(args.tx, args.ty)
    frame_blocks = {}
    for frame in frames:
        spec = QuenchSpec(
            params=params,
            frame=frame,
            steps=args.steps,
            resolution=args.grid,
            shots=args.shots,
            seed=args.seed,
        )
        trace = evolve_polarizations(spec)
        sx = trace.sx_sampled if trace.sx_sampled is not None else trace.sx_avg
        sy = trace.sy_sampled if trace.sy_sampled is not None else trace.sy_avg
        ex = trace.sx_stderr if trace.sx_stderr is not None else np.zeros_like(sx)
        ey = trace.sy_stderr if trace.sy_stderr is not None else np.zeros_like(sy)
        write_csv(
            args.output_dir / f"quench_{frame.value}.csv",
            ["k", "sigma_x_avg", "sigma_y_avg", "stderr_x", "stderr_y"],
            zip(trace.k_grid.tolist(), sx.tolist(), sy.tolist(), ex.tolist(), ey.tolist()),
            h,
        )
        try:
            report = bis_report(trace, floor_tol=args.floor_tol)
        except NoBisError as exc:
            print(json.dumps({
                "error": "no BIS found",
                "detail": str(exc),
                "frame": frame.value,
                "config_hash": h,
            }, sort_keys=True))
            return 2
        frame_blocks[frame.value] = {
            "bis": [s.k for s in report.slopes],
            "slopes": [
                {
                    "k": s.k,
                    "g": s.g,
                    "raw_slope": s.raw_slope,
                    "group": "k+" if s.positive_group else "k-",
                }
                for s in report.slopes
            ],
            "nu": report.nu,
        }
    payload = {"config": cfg, "frames": frame_blocks}
    if len(frames) == 2:
        nu1 = frame_blocks["sym1"]["nu"]
        nu2 = frame_blocks["sym2"]["nu"]
        payload["nu0"] = (nu1 + nu2) // 2
        payload["nu_pi"] = (nu1 - nu2) // 2
    write_json(args.output_dir / "bis_report.json", payload, h)
    summary = {k: v["nu"] for k, v in frame_blocks.items()}
    print(f"quench windings {summary} -> {args.output_dir}")
    return 0


def cmd_spectrum(args) -> int:
    cfg = {
        "command": "spectrum",
        "tx": args.tx,
        "ty": args.ty,
        "frame": args.frame.value,
        "length": args.length,
        "boundary": args.boundary,
        "edge_cells": args.edge_cells,
    }
    h = config_hash(cfg)
    spectrum = lattice_spectrum(
        ModelParams(args.tx, args.ty),
        args.frame,
        args.length,
        args.boundary,
        args.edge_cells,
    )
    args.output_dir.mkdir(parents=True, exist_ok=True)
    write_csv(
        args.output_dir / f"spectrum_{args.frame.value}.csv",
        ["index", "phase", "edge_weight_left", "edge_weight_right"],
        [
            (i, float(spectrum.phases[i]),
             float(spectrum.edge_weight_left[i]), float(spectrum.edge_weight_right[i]))
            for i in range(len(spectrum.phases))
        ],
        h,
    )
    print(f"spectrum: {len(spectrum.phases)} states -> {args.output_dir}")
    return 0


def cmd_edges(args) -> int:
    cfg = {
        "command": "edges",
        "tx": args.tx,
        "ty": args.ty,
        "frame": args.frame.value,
        "length": args.length,
        "e_tol": args.e_tol,
        "edge_cells": args.edge_cells,
        "weight_tol": args.weight_tol,
    }
    h = config_hash(cfg)
    params = ModelParams(args.tx, args.ty)
    n_zero, n_pi = count_edge_modes(
        params, args.frame, args.length,
        e_tol=args.e_tol, edge_cells=args.edge_cells, weight_tol=args.weight_tol,
    )
    spectrum = lattice_spectrum(params, args.frame, args.length, "open", args.edge_cells)
    args.output_dir.mkdir(parents=True, exist_ok=True)
    write_csv(
        args.output_dir / f"spectrum_{args.frame.value}.csv",
        ["index", "phase", "edge_weight_left", "edge_weight_right"],
        [
            (i, float(spectrum.phases[i]),
             float(spectrum.edge_weight_left[i]), float(spectrum.edge_weight_right[i]))
            for i in range(len(spectrum.phases))
        ],
        h,
    )
    write_json(
        args.output_dir / "edges.json",
        {
            "config": cfg,
            "n_zero": n_zero,
            "n_pi": n_pi,
            "edge_cells": args.edge_cells or default_edge_cells(args.length),
        },
        h,
    )
    print(f"edge modes: n_zero={n_zero} n_pi={n_pi} -> {args.output_dir}")
    return 0


def cmd_pulses(args) -> int:
    cfg = {
        "command": "pulses",
        "tx": args.tx,
        "ty": args.ty,
        "k": args.k,
        "frame": args.frame.value,
        "periods": args.periods,
        "omega_ref": args.omega_ref,
        "elide_zero": not args.keep_zero_pulses,
    }
    h = config_hash(cfg)
    params = ModelParams(args.tx, args.ty)
    schedule = compile_schedule(
        args.k, params, args.frame, args.periods, args.omega_ref,
        elide_zero=not args.keep_zero_pulses,
    )
    payload = {"config": cfg}
    payload.update(schedule.to_dict())
    status = 0
    if args.verify:
        distance = verify_schedule(schedule, args.k, params, args.frame, args.periods)
        payload["verify_distance"] = distance
        print(f"round-trip distance {distance:.3e}")
        if distance >= VERIFY_DISTANCE:
            status = 3
    args.output_dir.mkdir(parents=True, exist_ok=True)
    write_json(args.output_dir / "schedule.json", payload, h)
    print(f"{len(schedule.pulses)} pulses -> {args.output_dir}")
    return status


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(argv)
    args = _apply_config_file(args, argv)
    try:
        return args.func(args)
    except FloqlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
