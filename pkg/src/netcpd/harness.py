"""Seeded Monte Carlo experiments: sweeps, rate curves, aggregation.

Every random choice in a sweep descends from one base seed through
``SeedSequence(base_seed, spawn_key=(cell_index, rep_index))``, whose
children seed, in order: scenario construction, first sequence, second
sequence, interval draw, chance baseline.  Identical grid and base seed
therefore reproduce every table byte for byte; no wall-clock values are
ever written to output files.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
import time
from dataclasses import dataclass, replace
from typing import Any

import numpy as np
from scipy import stats

from . import __version__
from ._util import as_rng
from .binseg import BinsegConfig, binseg_detect, default_threshold, estimate_density
from .intervals import draw_intervals, recommended_interval_count
from .model import (
    Scenario,
    generate_sequence,
    lecam_hard_instance,
    scenario_digest,
    scenario_parameters,
    split_sample,
    two_block_swap_scenario,
)
from .refine import RefineConfig, local_refine

_PROTOCOLS = ("pair", "split")


# ---------------------------------------------------------------------------
# Seeds and metrics


def spawn_seeds(base_seed: int, cell_index: int, rep_index: int, count: int = 5):
    """Independent child seeds for one replication of one grid cell."""
    parent = np.random.SeedSequence(base_seed, spawn_key=(cell_index, rep_index))
    return tuple(parent.spawn(count))


def matched_max_error(estimates, truth) -> float:
    """Largest matched distance when counts agree, else infinity.

    Both inputs sorted ascending; with equal counts the order-preserving
    pairing minimizes the maximum distance on a line, which makes the
    metric symmetric under any relabeling.
    """
    estimates = sorted(estimates)
    truth = sorted(truth)
    if len(estimates) != len(truth):
        return math.inf
    if not truth:
        return 0.0
    return float(max(abs(a - b) for a, b in zip(estimates, truth)))


def coverage_gap(targets, candidates) -> float:
    """One-sided Hausdorff: how far the worst target is from its nearest candidate."""
    targets = list(targets)
    if not targets:
        return 0.0
    if not candidates:
        return math.inf
    return float(max(min(abs(c - t) for c in candidates) for t in targets))


# ---------------------------------------------------------------------------
# Single trials


@dataclass(frozen=True)
class PipelineConfig:
    """How one trial turns a scenario into estimates.

    ``protocol="pair"`` samples two independent sequences; ``"split"``
    samples one and detects on its parity halves, mapping estimates back
    to the original scale (doubling).  A ``threshold`` of None calibrates
    the detection threshold from the data at ``threshold_scale``;
    ``n_intervals`` of None sizes the interval pool from the scenario's
    true minimum spacing.  ``refine`` of None skips refinement.
    """

    protocol: str = "pair"
    n_intervals: int | None = None
    interval_factor: float = 4.0
    threshold: float | None = None
    threshold_scale: float = 1.5
    trim: float = 0.05
    length_cap: int | None = None
    refine: RefineConfig | None = None

    def __post_init__(self) -> None:
        if self.protocol not in _PROTOCOLS:
            raise ValueError(f"protocol must be one of {_PROTOCOLS}")


@dataclass(frozen=True)
class ScenarioSummary:
    """Scenario facts carried on every report."""

    n_nodes: int
    n_steps: int
    n_changes: int
    min_spacing: int
    density: float
    min_rel_jump: float
    max_jump_rank: int
    digest: str


@dataclass(frozen=True)
class TrialReport:
    """Outcome of one trial: estimates, errors, flags, in-memory timings."""

    scenario: ScenarioSummary
    protocol: str
    truth: tuple[int, ...]
    prelim: tuple[int, ...]
    refined: tuple[int, ...] | None
    threshold: float
    n_intervals: int
    prelim_error: float
    refined_error: float | None
    prelim_coverage_gap: float
    prelim_spurious_gap: float
    refine_fallback: bool
    refine_failed: bool
    detect_seconds: float
    refine_seconds: float

    @property
    def k_hat(self) -> int:
        return len(self.prelim)

    @property
    def count_correct(self) -> bool:
        return len(self.prelim) == len(self.truth)


def summarize_scenario(scenario: Scenario) -> ScenarioSummary:
    params = scenario_parameters(scenario)
    ranks = [
        int(np.linalg.matrix_rank(np.asarray(b) - np.asarray(a)))
        for a, b in zip(scenario.thetas[:-1], scenario.thetas[1:])
    ]
    return ScenarioSummary(
        n_nodes=scenario.n_nodes,
        n_steps=scenario.n_steps,
        n_changes=scenario.n_changes,
        min_spacing=params.min_spacing,
        density=params.density,
        min_rel_jump=params.min_rel_jump,
        max_jump_rank=max(ranks, default=0),
        digest=scenario_digest(scenario),
    )


def run_trial(scenario: Scenario, config: PipelineConfig, seeds) -> TrialReport:
    """Sample, detect, optionally refine, and score one replication.

    ``seeds`` supplies at least three independent seed children (first
    sequence, second sequence, interval draw); the split protocol leaves
    the second unused by design so both protocols consume the same layout.
    """
    if len(seeds) < 3:
        raise ValueError("need three seed children: seq_a, seq_b, intervals")
    truth = scenario.change_points
    params = scenario_parameters(scenario)
    if config.protocol == "pair":
        seq_a = generate_sequence(scenario, as_rng(seeds[0]))
        seq_b = generate_sequence(scenario, as_rng(seeds[1]))
        out_scale = 1
        spacing = params.min_spacing
    else:
        halves = split_sample(generate_sequence(scenario, as_rng(seeds[0])))
        seq_a, seq_b = halves.first, halves.second
        out_scale = 2
        spacing = max(1, params.min_spacing // 2)
    n_steps_eff = seq_a.shape[0]

    n_intervals = config.n_intervals
    if n_intervals is None:
        n_intervals = recommended_interval_count(
            n_steps_eff, spacing, factor=config.interval_factor
        )
    intervals = draw_intervals(
        n_steps_eff, n_intervals, as_rng(seeds[2]), length_cap=config.length_cap
    )
    threshold = config.threshold
    if threshold is None:
        threshold = default_threshold(
            scenario.n_nodes,
            estimate_density(seq_a, seq_b),
            n_steps_eff,
            scale=config.threshold_scale,
        )
        if threshold <= 0:  # all-empty graphs; any positive value is equivalent
            threshold = float(np.finfo(np.float64).tiny)

    started = time.perf_counter()
    detection = binseg_detect(
        seq_a, seq_b, BinsegConfig(threshold=threshold, intervals=intervals,
                                   trim=config.trim)
    )
    detect_seconds = time.perf_counter() - started
    prelim = tuple(out_scale * b for b in detection.estimates)

    refined = None
    refined_error = None
    refine_fallback = False
    refine_failed = False
    refine_seconds = 0.0
    if config.refine is not None and detection.estimates:
        started = time.perf_counter()
        try:
            refinement = local_refine(
                seq_a, seq_b, detection.estimates, config.refine
            )
            refined = tuple(out_scale * b for b in refinement.estimates)
            refine_fallback = refinement.any_fallback
        except ValueError:
            # Estimates too crowded for the trim; keep the preliminary ones.
            refined = prelim
            refine_failed = True
        refine_seconds = time.perf_counter() - started
        refined_error = matched_max_error(refined, truth)
    elif config.refine is not None:
        refined = ()
        refined_error = matched_max_error(refined, truth)

    return TrialReport(
        scenario=summarize_scenario(scenario),
        protocol=config.protocol,
        truth=truth,
        prelim=prelim,
        refined=refined,
        threshold=float(threshold),
        n_intervals=n_intervals,
        prelim_error=matched_max_error(prelim, truth),
        refined_error=refined_error,
        prelim_coverage_gap=coverage_gap(truth, prelim),
        prelim_spurious_gap=coverage_gap(prelim, truth),
        refine_fallback=refine_fallback,
        refine_failed=refine_failed,
        detect_seconds=detect_seconds,
        refine_seconds=refine_seconds,
    )


# ---------------------------------------------------------------------------
# Grids


@dataclass(frozen=True)
class SweepGrid:
    """Ordered named axes crossed into cells, plus replication count and seed."""

    axes: tuple[tuple[str, tuple], ...]
    n_reps: int
    base_seed: int

    def __post_init__(self) -> None:
        if not self.axes or any(not values for _, values in self.axes):
            raise ValueError("every axis needs at least one value")
        if self.n_reps < 1:
            raise ValueError("n_reps must be at least 1")

    def cells(self):
        """(cell_index, {axis: value}) in row-major order over the axes."""
        names = [name for name, _ in self.axes]
        for index, combo in enumerate(
            itertools.product(*(values for _, values in self.axes))
        ):
            yield index, dict(zip(names, combo))

    @property
    def n_cells(self) -> int:
        total = 1
        for _, values in self.axes:
            total *= len(values)
        return total


def _uniform_guesses(rng: np.random.Generator, k: int, n_steps: int):
    """A chance detector: k distinct uniform change points (empty if k = 0)."""
    if k == 0:
        return ()
    picks = rng.choice(np.arange(1, n_steps), size=k, replace=False)
    return tuple(int(v) for v in np.sort(picks))


# ---------------------------------------------------------------------------
# Phase-transition sweep


@dataclass(frozen=True)
class PhaseSummary:
    """Per-cell success table plus monotone-trend statistics."""

    rows: tuple[dict, ...]
    spearman_rho: float
    spearman_pvalue: float
    n_reps: int
    base_seed: int
    config: dict


def phase_sweep(
    grid: SweepGrid,
    pipeline: PipelineConfig,
    tolerance_frac: float = 1.0 / 3.0,
    checkpoint_path=None,
) -> PhaseSummary:
    """Success probability of exact recovery across hard-instance cells.

    Axes understood: ``snr`` (the product density * rel_jump^2 * n *
    spacing; converted to a contrast per cell) or ``contrast`` directly,
    plus optional ``n_nodes``, ``density``, ``spacing``, ``n_steps``
    (defaults 50, 0.5, 30, 90).  Success means the estimated count is
    exact and every matched error is within ``tolerance_frac`` of the
    spacing.  The chance column replays the same rule on uniform guesses.
    With ``checkpoint_path`` set, finished cells are journaled there and
    an interrupted sweep resumes without recomputing them.
    """
    config = {
        "kind": "phase",
        "axes": [[name, list(values)] for name, values in grid.axes],
        "tolerance_frac": tolerance_frac,
        "pipeline": _pipeline_dict(pipeline),
    }
    checkpoint = _Checkpoint(
        checkpoint_path,
        {"config": config, "base_seed": grid.base_seed, "n_reps": grid.n_reps},
    )
    rows = []
    for cell_index, cell in grid.cells():
        saved = checkpoint.get(cell_index)
        if saved is not None:
            rows.append(saved["row"])
            continue
        n_nodes = int(cell.get("n_nodes", 50))
        density = float(cell.get("density", 0.5))
        spacing = int(cell.get("spacing", 30))
        n_steps = int(cell.get("n_steps", 90))
        if "contrast" in cell:
            contrast = float(cell["contrast"])
        else:
            contrast = math.sqrt(
                float(cell["snr"]) / (density * n_nodes * spacing)
            )
        if not 0 < contrast <= 1:
            raise ValueError(
                f"cell {cell_index}: contrast {contrast:.3f} outside (0, 1]; "
                "snr target unreachable at this density/spacing"
            )
        snr_nominal = density * contrast**2 * n_nodes * spacing
        tolerance = max(1, math.floor(tolerance_frac * spacing))
        n_correct = 0
        chance_correct = 0
        errors = []
        for rep in range(grid.n_reps):
            seeds = spawn_seeds(grid.base_seed, cell_index, rep)
            scenario_rng = as_rng(seeds[0])
            side = "early" if scenario_rng.random() < 0.5 else "late"
            scenario = lecam_hard_instance(
                n_nodes, density, contrast, spacing, n_steps,
                side=side, seed_or_rng=scenario_rng,
            )
            report = run_trial(scenario, pipeline, seeds[1:4])
            if report.count_correct and report.prelim_error <= tolerance:
                n_correct += 1
                errors.append(report.prelim_error)
            guesses = _uniform_guesses(
                as_rng(seeds[4]), len(scenario.change_points), n_steps
            )
            if matched_max_error(guesses, scenario.change_points) <= tolerance:
                chance_correct += 1
        rows.append(
            {
                "cell_index": cell_index,
                "snr": repr(snr_nominal),
                "snr_root": repr(math.sqrt(density) * contrast),
                "n_nodes": n_nodes,
                "density": repr(density),
                "contrast": repr(contrast),
                "spacing": spacing,
                "n_steps": n_steps,
                "tolerance": tolerance,
                "n_reps": grid.n_reps,
                "n_correct": n_correct,
                "success_rate": repr(n_correct / grid.n_reps),
                "chance_correct": chance_correct,
                "chance_rate": repr(chance_correct / grid.n_reps),
                "mean_error_correct": repr(float(np.mean(errors)))
                if errors
                else "",
            }
        )
        checkpoint.put(cell_index, {"row": rows[-1]})
    snrs = [float(row["snr"]) for row in rows]
    rates = [float(row["success_rate"]) for row in rows]
    if len(rows) >= 2 and len(set(rates)) > 1:
        trend = stats.spearmanr(snrs, rates, alternative="greater")
        rho, pvalue = float(trend.statistic), float(trend.pvalue)
    else:
        rho, pvalue = math.nan, math.nan
    return PhaseSummary(
        rows=tuple(rows),
        spearman_rho=rho,
        spearman_pvalue=pvalue,
        n_reps=grid.n_reps,
        base_seed=grid.base_seed,
        config=config,
    )


# ---------------------------------------------------------------------------
# Localization-rate curve


@dataclass(frozen=True)
class SlopeFit:
    """Log-log regression result with a symmetric 95% confidence interval."""

    slope: float
    intercept: float
    stderr: float
    ci_low: float
    ci_high: float
    n_points: int


@dataclass(frozen=True)
class LocalizationSummary:
    """Per-cell error table, slope fit, and matched-seed stage comparison."""

    rows: tuple[dict, ...]
    fit: SlopeFit | None
    dropped_cells: tuple[int, ...]
    excluded_floor_cells: tuple[int, ...]
    mean_prelim_error: float
    mean_refined_error: float
    n_reps: int
    base_seed: int
    config: dict


def fit_loglog_slope(xs, ys) -> SlopeFit:
    """OLS of log(y) on log(x) with a t-based 95% interval on the slope."""
    xs = np.log(np.asarray(xs, dtype=np.float64))
    ys = np.log(np.asarray(ys, dtype=np.float64))
    if xs.size < 3:
        raise ValueError("need at least three points to fit a slope")
    result = stats.linregress(xs, ys)
    half = float(stats.t.ppf(0.975, xs.size - 2)) * result.stderr
    return SlopeFit(
        slope=float(result.slope),
        intercept=float(result.intercept),
        stderr=float(result.stderr),
        ci_low=float(result.slope - half),
        ci_high=float(result.slope + half),
        n_points=int(xs.size),
    )


def localization_curve(
    grid: SweepGrid,
    pipeline: PipelineConfig,
    min_used: int = 10,
    self_loops: bool = True,
    cross_frac: float = 0.6,
    change_fracs: tuple[float, ...] = (1 / 3, 2 / 3),
    refine_spectral_scale: float = 2.6,
    refine_log_scale: float = 0.0,
    checkpoint_path=None,
) -> LocalizationSummary:
    """Median refined error against the rate coordinate rel_jump^2 n^2 density.

    Axes understood: ``n_nodes``, ``density``, ``rel_jump``, plus optional
    ``n_steps`` (default 120); each cell places changes at the horizon
    fractions in ``change_fracs``.  Cells with fewer than ``min_used``
    count-correct replications are dropped from the fit (reported); so are
    cells whose median refined error sits below one time step, where the
    integer resolution floor flattens the curve and a half-step median
    (the average of the two middle order statistics) would fake extra
    decay.  The spectral stage is retuned per cell, since
    the noise level moves with the node count and density: the eigenvalue
    cut is ``refine_spectral_scale * sqrt(n * density) + refine_log_scale
    * log(n_steps)`` and the entry clip equals the density.
    ``pipeline.refine`` must therefore be None.  With ``checkpoint_path``
    set, finished cells are journaled there and an interrupted sweep
    resumes without recomputing them.
    """
    if pipeline.refine is not None:
        raise ValueError(
            "localization_curve derives refinement settings per cell; "
            "pass pipeline.refine=None and use the scale arguments"
        )
    if not change_fracs or any(not 0.0 < f < 1.0 for f in change_fracs):
        raise ValueError("change_fracs must be fractions strictly inside (0, 1)")
    config = {
        "kind": "localization",
        "axes": [[name, list(values)] for name, values in grid.axes],
        "min_used": min_used,
        "self_loops": self_loops,
        "cross_frac": cross_frac,
        "change_fracs": list(change_fracs),
        "refine_spectral_scale": refine_spectral_scale,
        "refine_log_scale": refine_log_scale,
        "pipeline": _pipeline_dict(pipeline),
    }
    checkpoint = _Checkpoint(
        checkpoint_path,
        {"config": config, "base_seed": grid.base_seed, "n_reps": grid.n_reps},
    )
    records = []
    for cell_index, cell in grid.cells():
        saved = checkpoint.get(cell_index)
        if saved is not None:
            records.append(
                (saved["row"], float(saved["sum_prelim"]),
                 float(saved["sum_refined"]))
            )
            continue
        n_nodes = int(cell["n_nodes"])
        density = float(cell["density"])
        rel_jump = float(cell["rel_jump"])
        n_steps = int(cell.get("n_steps", 120))
        change_points = tuple(int(round(f * n_steps)) for f in change_fracs)
        if any(b - a < 1 for a, b in zip((0, *change_points), (*change_points, n_steps))):
            raise ValueError("change_fracs collide at this horizon")
        scenario = two_block_swap_scenario(
            n_nodes, density, rel_jump, change_points, n_steps,
            cross_frac=cross_frac, self_loops=self_loops,
        )
        params = scenario_parameters(scenario)
        coordinate = params.min_rel_jump**2 * n_nodes**2 * params.density
        cell_pipeline = replace(
            pipeline,
            refine=RefineConfig(
                eig_threshold=refine_spectral_scale * math.sqrt(n_nodes * density)
                + refine_log_scale * math.log(n_steps),
                clip=density,
            ),
        )
        prelim_errs, refined_errs = [], []
        fallbacks = 0
        for rep in range(grid.n_reps):
            seeds = spawn_seeds(grid.base_seed, cell_index, rep)
            report = run_trial(scenario, cell_pipeline, seeds[1:4])
            if report.count_correct:
                prelim_errs.append(report.prelim_error)
                refined_errs.append(report.refined_error)
                fallbacks += int(report.refine_fallback)
        n_used = len(refined_errs)
        median_refined = float(np.median(refined_errs)) if refined_errs else math.nan
        median_prelim = float(np.median(prelim_errs)) if prelim_errs else math.nan
        mean_refined = float(np.mean(refined_errs)) if refined_errs else math.nan
        mean_prelim = float(np.mean(prelim_errs)) if prelim_errs else math.nan
        row = {
            "cell_index": cell_index,
            "n_nodes": n_nodes,
            "density": repr(density),
            "rel_jump": repr(rel_jump),
            "n_steps": n_steps,
            "coordinate": repr(float(coordinate)),
            "n_reps": grid.n_reps,
            "n_used": n_used,
            "median_refined_error": repr(median_refined),
            "median_prelim_error": repr(median_prelim),
            "mean_refined_error": repr(mean_refined),
            "mean_prelim_error": repr(mean_prelim),
            "n_fallback": fallbacks,
        }
        sum_prelim = float(sum(prelim_errs))
        sum_refined = float(sum(refined_errs))
        checkpoint.put(
            cell_index,
            {"row": row, "sum_prelim": repr(sum_prelim),
             "sum_refined": repr(sum_refined)},
        )
        records.append((row, sum_prelim, sum_refined))
    rows = []
    dropped = []
    floor_cells = []
    xs, ys = [], []
    total_prelim = total_refined = 0.0
    total_used = 0
    for row, sum_prelim, sum_refined in records:
        rows.append(row)
        cell_index = int(row["cell_index"])
        n_used = int(row["n_used"])
        if n_used < min_used:
            dropped.append(cell_index)
            continue
        total_prelim += sum_prelim
        total_refined += sum_refined
        total_used += n_used
        median_refined = float(row["median_refined_error"])
        if median_refined < 1.0:
            floor_cells.append(cell_index)
            continue
        xs.append(float(row["coordinate"]))
        ys.append(median_refined)
    fit = fit_loglog_slope(xs, ys) if len(xs) >= 3 else None
    return LocalizationSummary(
        rows=tuple(rows),
        fit=fit,
        dropped_cells=tuple(dropped),
        excluded_floor_cells=tuple(floor_cells),
        mean_prelim_error=total_prelim / total_used if total_used else math.nan,
        mean_refined_error=total_refined / total_used if total_used else math.nan,
        n_reps=grid.n_reps,
        base_seed=grid.base_seed,
        config=config,
    )


# ---------------------------------------------------------------------------
# Output files


def pipeline_from_dict(data: dict) -> PipelineConfig:
    """Inverse of the manifest encoding produced by sweep summaries."""
    allowed = {
        "protocol", "n_intervals", "interval_factor", "threshold",
        "threshold_scale", "trim", "length_cap", "refine",
    }
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(f"unknown pipeline fields: {sorted(unknown)}")
    kwargs = {k: v for k, v in data.items() if k != "refine"}
    refine = data.get("refine")
    if refine is not None:
        extra = set(refine) - {"eig_threshold", "clip", "trim"}
        if extra:
            raise ValueError(f"unknown refine fields: {sorted(extra)}")
        refine = RefineConfig(**refine)
    return PipelineConfig(refine=refine, **kwargs)


class _Checkpoint:
    """Cell-level resume ledger: a header line, then one JSON line per cell.

    The header pins the sweep configuration; resuming against a file
    written under any other configuration is refused, since per-cell
    seeds would no longer mean the same thing.
    """

    def __init__(self, path, header: dict) -> None:
        self.path = path
        self.saved: dict[int, dict] = {}
        if path is None:
            return
        header_line = json.dumps(header, sort_keys=True)
        try:
            with open(path, "r", encoding="utf-8") as fh:
                lines = [line for line in fh.read().splitlines() if line]
        except FileNotFoundError:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(header_line + "\n")
            return
        if not lines or lines[0] != header_line:
            raise ValueError(
                "checkpoint file was written by a different sweep configuration"
            )
        for line in lines[1:]:
            record = json.loads(line)
            self.saved[int(record["cell_index"])] = record

    def get(self, cell_index: int) -> dict | None:
        return self.saved.get(cell_index)

    def put(self, cell_index: int, payload: dict) -> None:
        if self.path is None:
            return
        record = {"cell_index": cell_index, **payload}
        with open(self.path, "a", encoding="utf-8") as fh:
            # key order is preserved so resumed rows serialize byte-identically
            fh.write(json.dumps(record) + "\n")


def _pipeline_dict(pipeline: PipelineConfig) -> dict:
    data = {
        "protocol": pipeline.protocol,
        "n_intervals": pipeline.n_intervals,
        "interval_factor": pipeline.interval_factor,
        "threshold": pipeline.threshold,
        "threshold_scale": pipeline.threshold_scale,
        "trim": pipeline.trim,
        "length_cap": pipeline.length_cap,
        "refine": None,
    }
    if pipeline.refine is not None:
        data["refine"] = {
            "eig_threshold": pipeline.refine.eig_threshold,
            "clip": pipeline.refine.clip,
            "trim": pipeline.refine.trim,
        }
    return data


def write_sweep_csv(path, summary) -> None:
    """Cell table as CSV under a schema-version comment; repr'd floats."""
    rows = summary.rows
    if not rows:
        raise ValueError("summary has no rows")
    kind = summary.config["kind"]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(
            f"# netcpd-sweep v1 kind={kind} base_seed={summary.base_seed} "
            f"n_reps={summary.n_reps}\n"
        )
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


def write_sweep_json(path, summary) -> None:
    """Sweep summary (grid, seeds, aggregates, version) as canonical JSON."""
    payload: dict[str, Any] = {
        "software_version": __version__,
        "base_seed": summary.base_seed,
        "n_reps": summary.n_reps,
        "config": summary.config,
        "rows": list(summary.rows),
    }
    if isinstance(summary, PhaseSummary):
        payload["spearman_rho"] = summary.spearman_rho
        payload["spearman_pvalue"] = summary.spearman_pvalue
    else:
        payload["dropped_cells"] = list(summary.dropped_cells)
        payload["excluded_floor_cells"] = list(summary.excluded_floor_cells)
        payload["mean_prelim_error"] = summary.mean_prelim_error
        payload["mean_refined_error"] = summary.mean_refined_error
        if summary.fit is not None:
            payload["fit"] = {
                "slope": summary.fit.slope,
                "intercept": summary.fit.intercept,
                "stderr": summary.fit.stderr,
                "ci_low": summary.fit.ci_low,
                "ci_high": summary.fit.ci_high,
                "n_points": summary.fit.n_points,
            }
        else:
            payload["fit"] = None
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")
