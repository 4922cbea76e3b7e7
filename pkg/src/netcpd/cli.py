"""Command-line front end: simulate, detect, refine, sweep, validate.

Every run writes a ``manifest.json`` beside its outputs holding the
package version, the fully resolved configuration (defaults included),
the seeds, and a SHA-256 digest of each file written, which is enough
to reproduce the run exactly.  Manifests never contain wall-clock
values.  Environment variables: ``NETCPD_OUT_DIR`` overrides the output
directory when ``--out-dir`` is absent, and ``NETCPD_THREADS`` is
recorded in the manifest as the intended thread budget (results do not
depend on it).

Exit codes: 0 success, 2 configuration error, 3 data error, 4 runtime
failure inside an algorithm.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

from . import __version__
from .binseg import (
    BinsegConfig,
    Detection,
    DetectionResult,
    binseg_detect,
    default_threshold,
    estimate_density,
    load_detections,
    save_detections,
)
from .harness import (
    PipelineConfig,
    SweepGrid,
    localization_curve,
    phase_sweep,
    pipeline_from_dict,
    write_sweep_csv,
    write_sweep_json,
)
from .intervals import draw_intervals, recommended_interval_count
from .model import generate_sequence, load_scenario, save_scenario, split_sample
from .refine import (
    RefineConfig,
    RefinedPoint,
    RefineResult,
    default_refine_params,
    load_refined,
    local_refine,
    save_refined,
)
from .seqio import load_edge_list, load_sequence_bits, save_sequence_bits
from .usvt import SpectralError

_EXIT_OK = 0
_EXIT_CONFIG = 2
_EXIT_DATA = 3
_EXIT_RUNTIME = 4


class _ConfigError(Exception):
    """Bad flags, bad config file, or parameters outside their ranges."""


class _DataError(Exception):
    """Missing or malformed input data files."""


# ---------------------------------------------------------------------------
# Shared plumbing


def _out_dir(args) -> Path:
    raw = args.out_dir or os.environ.get("NETCPD_OUT_DIR") or "."
    path = Path(raw)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _thread_count() -> int:
    raw = os.environ.get("NETCPD_THREADS")
    if raw:
        try:
            value = int(raw)
        except ValueError as exc:
            raise _ConfigError(f"NETCPD_THREADS must be an integer, got {raw!r}") from exc
        if value < 1:
            raise _ConfigError("NETCPD_THREADS must be at least 1")
        return value
    return os.cpu_count() or 1


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def _write_manifest(out_dir: Path, subcommand: str, config: dict,
                    outputs: list[Path]) -> Path:
    manifest = {
        "tool": "netcpd",
        "version": __version__,
        "subcommand": subcommand,
        "thread_count": _thread_count(),
        "config": config,
        "outputs": {path.name: _sha256(path) for path in outputs},
    }
    path = out_dir / "manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _load_sequence(path_str: str):
    """Read an adjacency sequence, sniffing binary versus edge-list text."""
    path = Path(path_str)
    try:
        with open(path, "rb") as fh:
            magic = fh.read(4)
    except OSError as exc:
        raise _DataError(f"cannot read {path}: {exc}") from exc
    try:
        if magic == b"NSQ1":
            return load_sequence_bits(path)
        return load_edge_list(path)
    except ValueError as exc:
        raise _DataError(f"{path}: {exc}") from exc


def _load_scenario_file(path_str: str):
    path = Path(path_str)
    try:
        return load_scenario(path)
    except OSError as exc:
        raise _ConfigError(f"cannot read {path}: {exc}") from exc
    except (ValueError, KeyError, TypeError) as exc:
        raise _ConfigError(f"{path}: {exc}") from exc


def _resolve_two_sample(args):
    """Return (seq_a, seq_b, out_scale, meta) for detect/refine inputs.

    One input file means parity splitting with estimates reported on the
    original time axis (doubling); two files are used as independent
    samples directly.
    """
    seq_a, loops_a = _load_sequence(args.data)
    if args.data_b is not None:
        seq_b, loops_b = _load_sequence(args.data_b)
        if loops_a != loops_b:
            raise _DataError("inputs disagree on the self-loop convention")
        if seq_a.shape != seq_b.shape:
            raise _DataError(
                f"inputs disagree on shape: {seq_a.shape} vs {seq_b.shape}"
            )
        meta = {
            "protocol": "pair",
            "n_steps": int(seq_a.shape[0]),
            "n_nodes": int(seq_a.shape[1]),
            "self_loops": loops_a,
            "out_scale": 1,
        }
        return seq_a, seq_b, 1, meta
    if seq_a.shape[0] < 4:
        raise _DataError("parity splitting needs at least four snapshots")
    halves = split_sample(seq_a)
    meta = {
        "protocol": "split",
        "n_steps": int(seq_a.shape[0]),
        "n_nodes": int(seq_a.shape[1]),
        "self_loops": loops_a,
        "out_scale": 2,
    }
    return halves.first, halves.second, 2, meta


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_simulate(args) -> int:
    if args.seed is None:
        raise _ConfigError("simulate requires --seed")
    scenario = _load_scenario_file(args.scenario)
    out = _out_dir(args)
    seq = generate_sequence(scenario, args.seed)
    seq_path = out / "sequence.nsq"
    save_sequence_bits(seq_path, seq, self_loops=scenario.self_loops)
    echo_path = out / "scenario.json"
    save_scenario(echo_path, scenario)
    config = {
        "scenario": str(args.scenario),
        "seed": args.seed,
        "n_steps": scenario.n_steps,
        "n_nodes": int(scenario.thetas[0].shape[0]),
        "n_changes": len(scenario.change_points),
        "change_points": list(scenario.change_points),
        "self_loops": scenario.self_loops,
        "out_dir": str(out),
    }
    _write_manifest(out, "simulate", config, [seq_path, echo_path])
    print(f"wrote {seq_path} ({scenario.n_steps} snapshots, "
          f"{scenario.thetas[0].shape[0]} nodes)")
    return _EXIT_OK


def _cmd_detect(args) -> int:
    seq_a, seq_b, out_scale, meta = _resolve_two_sample(args)
    out = _out_dir(args)
    horizon = int(seq_a.shape[0])
    n_nodes = int(seq_a.shape[1])
    density_hat = estimate_density(seq_a, seq_b)
    if args.threshold is not None:
        threshold = args.threshold
    else:
        threshold = default_threshold(
            n_nodes, density_hat, horizon, scale=args.threshold_scale
        )
        if threshold <= 0:
            threshold = sys.float_info.min
    n_intervals = args.intervals
    if n_intervals is None:
        n_intervals = recommended_interval_count(horizon, max(2, horizon // 8))
    try:
        intervals = draw_intervals(horizon, n_intervals, args.seed,
                                   length_cap=args.length_cap)
        config = BinsegConfig(threshold=threshold, intervals=intervals,
                              trim=args.trim)
    except ValueError as exc:
        raise _ConfigError(str(exc)) from exc
    result = binseg_detect(seq_a, seq_b, config)
    if out_scale != 1:
        result = DetectionResult(
            detections=tuple(
                Detection(
                    estimate=det.estimate * out_scale,
                    score=det.score,
                    win_start=det.win_start * out_scale,
                    win_end=det.win_end * out_scale,
                    depth=det.depth,
                )
                for det in result.detections
            ),
            n_steps=meta["n_steps"],
        )
    table_path = out / "detections.csv"
    save_detections(table_path, result)
    config_echo = {
        "data": str(args.data),
        "data_b": str(args.data_b) if args.data_b else None,
        "seed": args.seed,
        "threshold": repr(float(threshold)),
        "threshold_scale": args.threshold_scale,
        "density_hat": repr(float(density_hat)),
        "n_intervals": n_intervals,
        "length_cap": args.length_cap,
        "trim": args.trim,
        "intervals": [list(pair) for pair in intervals.pairs],
        "out_dir": str(out),
        **meta,
    }
    _write_manifest(out, "detect", config_echo, [table_path])
    print(f"{len(result)} change point(s) -> {table_path}")
    for est in result.estimates:
        print(f"  t = {est}")
    return _EXIT_OK


def _cmd_refine(args) -> int:
    seq_a, seq_b, out_scale, meta = _resolve_two_sample(args)
    out = _out_dir(args)
    try:
        prelim_table = load_detections(Path(args.prelim))
    except OSError as exc:
        raise _DataError(f"cannot read {args.prelim}: {exc}") from exc
    except ValueError as exc:
        raise _DataError(f"{args.prelim}: {exc}") from exc
    prelim = prelim_table.estimates
    if out_scale != 1:
        mapped = tuple(est // out_scale for est in prelim)
        if any(b - a < 1 for a, b in zip((0, *mapped),
                                         (*mapped, seq_a.shape[0]))):
            raise _DataError(
                "preliminary estimates collapse onto each other after the "
                "parity-split index mapping"
            )
        prelim = mapped
    horizon = int(seq_a.shape[0])
    n_nodes = int(seq_a.shape[1])
    density_hat = estimate_density(seq_a, seq_b)
    defaults = default_refine_params(n_nodes, density_hat, max(horizon, 2))
    try:
        refine_config = RefineConfig(
            eig_threshold=args.eig_threshold
            if args.eig_threshold is not None
            else defaults.eig_threshold,
            clip=args.clip if args.clip is not None else defaults.clip,
            trim=args.refine_trim,
        )
    except ValueError as exc:
        raise _ConfigError(str(exc)) from exc
    result = local_refine(seq_a, seq_b, prelim, refine_config)
    if out_scale != 1:
        result = RefineResult(
            points=tuple(
                RefinedPoint(
                    estimate=p.estimate * out_scale,
                    prelim=p.prelim * out_scale,
                    win_start=p.win_start * out_scale,
                    win_end=p.win_end * out_scale,
                    scale=p.scale,
                    fallback=p.fallback,
                )
                for p in result.points
            ),
            n_steps=meta["n_steps"],
        )
    table_path = out / "refined.csv"
    save_refined(table_path, result)
    config_echo = {
        "data": str(args.data),
        "data_b": str(args.data_b) if args.data_b else None,
        "prelim": str(args.prelim),
        "eig_threshold": repr(float(refine_config.eig_threshold)),
        "clip": repr(float(refine_config.clip)),
        "refine_trim": args.refine_trim,
        "density_hat": repr(float(density_hat)),
        "out_dir": str(out),
        **meta,
    }
    _write_manifest(out, "refine", config_echo, [table_path])
    flagged = sum(1 for p in result.points if p.fallback)
    print(f"{len(result)} refined estimate(s) -> {table_path} "
          f"({flagged} fallback)")
    for p in result.points:
        mark = " (fallback)" if p.fallback else ""
        print(f"  t = {p.estimate}{mark}")
    return _EXIT_OK


def _sweep_config(path_str: str) -> dict:
    path = Path(path_str)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise _ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise _ConfigError(f"{path}: top level must be an object")
    return raw


_SWEEP_KEYS = {
    "kind", "axes", "n_reps", "base_seed", "pipeline", "tolerance_frac",
    "min_used", "self_loops", "cross_frac", "change_fracs",
    "refine_spectral_scale", "refine_log_scale",
}


def _cmd_sweep(args) -> int:
    raw = _sweep_config(args.config)
    unknown = set(raw) - _SWEEP_KEYS
    if unknown:
        raise _ConfigError(f"unknown sweep config keys: {sorted(unknown)}")
    kind = raw.get("kind")
    if kind not in ("phase", "localization"):
        raise _ConfigError('sweep config needs "kind": "phase" or "localization"')
    for key in ("axes", "n_reps", "base_seed"):
        if key not in raw:
            raise _ConfigError(f'sweep config needs "{key}"')
    try:
        grid = SweepGrid(
            axes=tuple((str(name), tuple(values)) for name, values in raw["axes"]),
            n_reps=int(raw["n_reps"]),
            base_seed=int(raw["base_seed"]),
        )
        pipeline = pipeline_from_dict(raw.get("pipeline", {}))
    except (TypeError, ValueError) as exc:
        raise _ConfigError(str(exc)) from exc
    out = _out_dir(args)
    checkpoint_path = out / "cells.ndjson"
    if checkpoint_path.exists() and not args.resume:
        raise _ConfigError(
            f"{checkpoint_path} exists; pass --resume to continue that sweep "
            "or remove the file to start over"
        )
    try:
        if kind == "phase":
            summary = phase_sweep(
                grid, pipeline,
                tolerance_frac=float(raw.get("tolerance_frac", 1.0 / 3.0)),
                checkpoint_path=checkpoint_path,
            )
        else:
            summary = localization_curve(
                grid, pipeline,
                min_used=int(raw.get("min_used", 10)),
                self_loops=bool(raw.get("self_loops", True)),
                cross_frac=float(raw.get("cross_frac", 0.6)),
                change_fracs=tuple(raw.get("change_fracs", (1 / 3, 2 / 3))),
                refine_spectral_scale=float(raw.get("refine_spectral_scale", 2.6)),
                refine_log_scale=float(raw.get("refine_log_scale", 0.0)),
                checkpoint_path=checkpoint_path,
            )
    except ValueError as exc:
        raise _ConfigError(str(exc)) from exc
    csv_path = out / "sweep.csv"
    json_path = out / "sweep.json"
    write_sweep_csv(csv_path, summary)
    write_sweep_json(json_path, summary)
    config_echo = {
        "config_file": str(args.config),
        "resume": bool(args.resume),
        "base_seed": summary.base_seed,
        "n_reps": summary.n_reps,
        "out_dir": str(out),
        **summary.config,
    }
    _write_manifest(out, "sweep", config_echo,
                    [csv_path, json_path, checkpoint_path])
    print(f"{len(summary.rows)} cell(s) -> {csv_path}")
    return _EXIT_OK


def _cmd_validate(args) -> int:
    checked = 0
    if args.scenario:
        scenario = _load_scenario_file(args.scenario)
        print(f"ok scenario {args.scenario}: {scenario.n_steps} snapshots, "
              f"{len(scenario.change_points)} change(s)")
        checked += 1
    if args.data:
        seq, self_loops = _load_sequence(args.data)
        print(f"ok sequence {args.data}: shape {tuple(seq.shape)}, "
              f"self_loops={self_loops}")
        checked += 1
    if args.detections:
        try:
            table = load_detections(Path(args.detections))
        except OSError as exc:
            raise _DataError(f"cannot read {args.detections}: {exc}") from exc
        except ValueError as exc:
            raise _DataError(f"{args.detections}: {exc}") from exc
        print(f"ok detections {args.detections}: {len(table)} row(s)")
        checked += 1
    if args.refined:
        try:
            table = load_refined(Path(args.refined))
        except OSError as exc:
            raise _DataError(f"cannot read {args.refined}: {exc}") from exc
        except ValueError as exc:
            raise _DataError(f"{args.refined}: {exc}") from exc
        print(f"ok refined {args.refined}: {len(table)} row(s)")
        checked += 1
    if args.sweep_config:
        raw = _sweep_config(args.sweep_config)
        unknown = set(raw) - _SWEEP_KEYS
        if unknown:
            raise _ConfigError(
                f"unknown sweep config keys: {sorted(unknown)}"
            )
        if raw.get("kind") not in ("phase", "localization"):
            raise _ConfigError(
                'sweep config needs "kind": "phase" or "localization"'
            )
        print(f"ok sweep config {args.sweep_config}: kind={raw['kind']}")
        checked += 1
    if checked == 0:
        raise _ConfigError("validate needs at least one file argument")
    return _EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netcpd",
        description="Change-point detection in sequences of random networks.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sim = sub.add_parser(
        "simulate", help="sample an adjacency sequence from a scenario file"
    )
    sim.add_argument("--scenario", required=True,
                     help="scenario JSON describing segments and change points")
    sim.add_argument("--seed", type=int, default=None, required=False,
                     help="base seed (required)")
    sim.add_argument("--out-dir", default=None)

    def add_two_sample(p):
        p.add_argument("--data", required=True,
                       help="adjacency sequence (binary .nsq or edge-list text)")
        p.add_argument("--data-b", default=None,
                       help="second independent sequence; omit to parity-split "
                            "--data and report estimates on its original axis")
        p.add_argument("--out-dir", default=None)

    det = sub.add_parser("detect", help="random-interval binary segmentation")
    add_two_sample(det)
    det.add_argument("--seed", type=int, default=0,
                     help="seed for the interval draw (default 0)")
    det.add_argument("--intervals", type=int, default=None,
                     help="number of random windows (default: sized from the "
                          "horizon with an assumed spacing of T/8)")
    det.add_argument("--threshold", type=float, default=None,
                     help="acceptance threshold; default calibrates from the "
                          "data density")
    det.add_argument("--threshold-scale", type=float, default=1.5,
                     help="prefactor of the default threshold (default 1.5)")
    det.add_argument("--trim", type=float, default=0.05,
                     help="fraction of each window excluded at both ends "
                          "(default 0.05)")
    det.add_argument("--length-cap", type=int, default=None,
                     help="maximum window length for the interval draw")

    ref = sub.add_parser("refine", help="spectral re-localization of estimates")
    add_two_sample(ref)
    ref.add_argument("--prelim", required=True,
                     help="detections CSV with the preliminary estimates")
    ref.add_argument("--eig-threshold", type=float, default=None,
                     help="eigenvalue cut; default uses the theory constants "
                          "on the estimated density")
    ref.add_argument("--clip", type=float, default=None,
                     help="entry clip of the denoised direction; default is "
                          "the estimated density")
    ref.add_argument("--refine-trim", type=float, default=0.5,
                     help="window trim between neighbouring estimates "
                          "(default 0.5)")

    swp = sub.add_parser("sweep", help="seeded Monte Carlo sweep from a JSON config")
    swp.add_argument("--config", required=True,
                     help="sweep config JSON (kind, axes, n_reps, base_seed, ...)")
    swp.add_argument("--out-dir", default=None)
    swp.add_argument("--resume", action="store_true",
                     help="reuse finished cells from cells.ndjson in out-dir")

    val = sub.add_parser("validate", help="schema-check files without running")
    val.add_argument("--scenario", default=None)
    val.add_argument("--data", default=None)
    val.add_argument("--detections", default=None)
    val.add_argument("--refined", default=None)
    val.add_argument("--sweep-config", default=None)

    return parser


_COMMANDS = {
    "simulate": _cmd_simulate,
    "detect": _cmd_detect,
    "refine": _cmd_refine,
    "sweep": _cmd_sweep,
    "validate": _cmd_validate,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help/--version
        return int(exc.code or 0)
    try:
        _thread_count()
        return _COMMANDS[args.subcommand](args)
    except _ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except _DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return _EXIT_DATA
    except FileNotFoundError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return _EXIT_DATA
    except (SpectralError, ValueError, ArithmeticError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return _EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
