"""Tests for the Monte Carlo experiment harness."""

import math

import numpy as np
import pytest

import netcpd.harness as harness_mod
from netcpd.harness import (
    PipelineConfig,
    SweepGrid,
    coverage_gap,
    fit_loglog_slope,
    localization_curve,
    matched_max_error,
    phase_sweep,
    pipeline_from_dict,
    run_trial,
    spawn_seeds,
    write_sweep_csv,
    write_sweep_json,
)
from netcpd.model import Scenario
from netcpd.refine import RefineConfig


def deterministic_scenario(n=8, t=40, cps=(20,)):
    """Probabilities in {0, 1}: sampling reproduces the levels exactly."""
    levels = [np.zeros((n, n)), np.ones((n, n))]
    thetas = tuple(levels[k % 2] for k in range(len(cps) + 1))
    return Scenario(thetas=thetas, change_points=cps, n_steps=t)


class TestMetrics:
    def test_matched_error_equal_counts(self):
        assert matched_max_error((18, 41), (20, 40)) == 2.0
        assert matched_max_error((40, 19), (20, 40)) == 1.0  # order-free

    def test_matched_error_count_mismatch_is_inf(self):
        assert matched_max_error((20,), (20, 40)) == math.inf
        assert matched_max_error((20, 40), ()) == math.inf

    def test_matched_error_empty_truth(self):
        assert matched_max_error((), ()) == 0.0

    def test_coverage_gap(self):
        assert coverage_gap((20, 40), (19,)) == 21.0
        assert coverage_gap((), (5,)) == 0.0
        assert coverage_gap((5,), ()) == math.inf


class TestSeeds:
    def test_children_are_deterministic(self):
        a = spawn_seeds(7, 2, 3)
        b = spawn_seeds(7, 2, 3)
        for x, y in zip(a, b):
            assert x.generate_state(4).tolist() == y.generate_state(4).tolist()

    def test_cells_and_reps_differ(self):
        base = spawn_seeds(7, 0, 0)[0].generate_state(4).tolist()
        other_rep = spawn_seeds(7, 0, 1)[0].generate_state(4).tolist()
        other_cell = spawn_seeds(7, 1, 0)[0].generate_state(4).tolist()
        assert base != other_rep and base != other_cell


class TestRunTrial:
    def test_noiseless_pair_recovers_exactly(self):
        scenario = deterministic_scenario()
        report = run_trial(
            scenario, PipelineConfig(threshold=5.0), spawn_seeds(0, 0, 0)[1:4]
        )
        assert report.prelim == (20,)
        assert report.prelim_error == 0.0
        assert report.k_hat == 1 and report.count_correct
        assert report.refined is None

    def test_noiseless_split_maps_back_to_original_scale(self):
        scenario = deterministic_scenario(t=40, cps=(20,))
        config = PipelineConfig(protocol="split", threshold=5.0)
        report = run_trial(scenario, config, spawn_seeds(0, 0, 0)[1:4])
        assert report.prelim == (20,)
        assert report.prelim_error == 0.0

    def test_split_odd_change_point_lands_within_parity(self):
        scenario = deterministic_scenario(t=44, cps=(21,))
        config = PipelineConfig(protocol="split", threshold=5.0)
        report = run_trial(scenario, config, spawn_seeds(1, 0, 0)[1:4])
        assert report.prelim_error <= 2.0

    def test_refinement_stage_runs(self):
        scenario = deterministic_scenario()
        config = PipelineConfig(
            threshold=5.0, refine=RefineConfig(eig_threshold=0.5, clip=10.0)
        )
        report = run_trial(scenario, config, spawn_seeds(0, 0, 0)[1:4])
        assert report.refined == (20,)
        assert report.refined_error == 0.0
        assert not report.refine_fallback and not report.refine_failed

    def test_null_scenario_counts_false_positives(self):
        scenario = Scenario(
            thetas=(np.full((10, 10), 0.5),), change_points=(), n_steps=30
        )
        report = run_trial(
            scenario, PipelineConfig(), spawn_seeds(3, 0, 0)[1:4]
        )
        assert report.truth == ()
        if report.k_hat == 0:
            assert report.prelim_error == 0.0
        else:
            assert report.prelim_error == math.inf

    def test_all_empty_graphs_do_not_crash_threshold(self):
        scenario = Scenario(
            thetas=(np.zeros((6, 6)),), change_points=(), n_steps=20
        )
        report = run_trial(
            scenario, PipelineConfig(), spawn_seeds(4, 0, 0)[1:4]
        )
        assert report.k_hat == 0

    def test_refine_window_error_flagged_not_raised(self, monkeypatch):
        def crowded(*args, **kwargs):
            raise ValueError("window leaves no room")

        monkeypatch.setattr(harness_mod, "local_refine", crowded)
        scenario = deterministic_scenario()
        config = PipelineConfig(
            threshold=5.0, refine=RefineConfig(eig_threshold=0.5, clip=10.0)
        )
        report = run_trial(scenario, config, spawn_seeds(0, 0, 0)[1:4])
        assert report.refine_failed
        assert report.refined == report.prelim

    def test_scenario_summary_fields(self):
        scenario = deterministic_scenario(n=6, t=30, cps=(15,))
        report = run_trial(
            scenario, PipelineConfig(threshold=5.0), spawn_seeds(0, 0, 0)[1:4]
        )
        summary = report.scenario
        assert summary.n_nodes == 6
        assert summary.n_changes == 1
        assert summary.min_spacing == 15
        assert summary.density == 1.0
        assert summary.max_jump_rank == 1  # all-ones jump matrix

    def test_bad_protocol_rejected(self):
        with pytest.raises(ValueError, match="protocol"):
            PipelineConfig(protocol="triple")


class TestSweepGrid:
    def test_row_major_cell_order(self):
        grid = SweepGrid(
            axes=(("a", (1, 2)), ("b", (10, 20, 30))), n_reps=1, base_seed=0
        )
        cells = list(grid.cells())
        assert grid.n_cells == 6
        assert cells[0] == (0, {"a": 1, "b": 10})
        assert cells[1] == (1, {"a": 1, "b": 20})
        assert cells[3] == (3, {"a": 2, "b": 10})

    def test_validation(self):
        with pytest.raises(ValueError):
            SweepGrid(axes=(("a", ()),), n_reps=1, base_seed=0)
        with pytest.raises(ValueError):
            SweepGrid(axes=(("a", (1,)),), n_reps=0, base_seed=0)


def tiny_phase_summary(base_seed=11):
    grid = SweepGrid(
        axes=(
            ("snr", (0.05, 12.0)),
            ("n_nodes", (20,)),
            ("spacing", (15,)),
            ("n_steps", (45,)),
        ),
        n_reps=5,
        base_seed=base_seed,
    )
    return phase_sweep(grid, PipelineConfig(threshold_scale=0.5))


class TestPhaseSweep:
    def test_row_structure_and_ranges(self):
        summary = tiny_phase_summary()
        assert len(summary.rows) == 2
        for row in summary.rows:
            assert 0 <= row["n_correct"] <= summary.n_reps
            assert 0.0 <= float(row["success_rate"]) <= 1.0
            assert 0.0 <= float(row["chance_rate"]) <= 1.0
            assert row["tolerance"] == 5
        contrasts = [float(row["contrast"]) for row in summary.rows]
        assert contrasts[0] < contrasts[1]

    def test_snr_axis_reproduces_target(self):
        summary = tiny_phase_summary()
        row = summary.rows[1]
        assert float(row["snr"]) == pytest.approx(12.0)
        expected = math.sqrt(12.0 / (0.5 * 20 * 15))
        assert float(row["contrast"]) == pytest.approx(expected)

    def test_unreachable_snr_rejected(self):
        grid = SweepGrid(
            axes=(("snr", (1000.0,)), ("n_nodes", (20,)), ("spacing", (15,)),
                  ("n_steps", (45,))),
            n_reps=2,
            base_seed=0,
        )
        with pytest.raises(ValueError, match="contrast"):
            phase_sweep(grid, PipelineConfig())

    def test_determinism(self):
        a = tiny_phase_summary()
        b = tiny_phase_summary()
        assert a.rows == b.rows
        assert a.spearman_rho == b.spearman_rho or (
            math.isnan(a.spearman_rho) and math.isnan(b.spearman_rho)
        )


def tiny_localization_summary(base_seed=13):
    grid = SweepGrid(
        axes=(
            ("n_nodes", (30,)),
            ("density", (0.5,)),
            ("rel_jump", (0.3, 0.42, 0.55, 0.7)),
            ("n_steps", (60,)),
        ),
        n_reps=8,
        base_seed=base_seed,
    )
    pipeline = PipelineConfig(threshold_scale=0.5)
    return localization_curve(
        grid, pipeline, min_used=4, refine_spectral_scale=2.5
    )


class TestLocalizationCurve:
    def test_rows_and_bookkeeping(self):
        summary = tiny_localization_summary()
        assert len(summary.rows) == 4
        for row in summary.rows:
            assert row["n_used"] <= summary.n_reps
        used = [row for row in summary.rows if row["cell_index"]
                not in summary.dropped_cells]
        assert used, "at least one cell should keep enough successes"

    def test_rejects_preset_refine(self):
        grid = SweepGrid(
            axes=(("n_nodes", (20,)), ("density", (0.5,)),
                  ("rel_jump", (0.5,))),
            n_reps=2,
            base_seed=0,
        )
        preset = PipelineConfig(
            refine=RefineConfig(eig_threshold=1.0, clip=0.5)
        )
        with pytest.raises(ValueError, match="per cell"):
            localization_curve(grid, preset)

    def test_bad_change_fracs(self):
        grid = SweepGrid(
            axes=(("n_nodes", (20,)), ("density", (0.5,)),
                  ("rel_jump", (0.5,))),
            n_reps=2,
            base_seed=0,
        )
        with pytest.raises(ValueError, match="change_fracs"):
            localization_curve(grid, PipelineConfig(), change_fracs=(0.5, 1.2))

    def test_two_change_layout(self):
        summary = tiny_localization_summary()
        assert summary.config["change_fracs"] == [1 / 3, 2 / 3]
        assert summary.config["refine_spectral_scale"] == 2.5

    def test_determinism(self):
        a = tiny_localization_summary()
        b = tiny_localization_summary()
        assert a.rows == b.rows


class TestCheckpoint:
    def _grid(self, base_seed=11):
        return SweepGrid(
            axes=(
                ("snr", (0.05, 12.0)),
                ("n_nodes", (20,)),
                ("spacing", (15,)),
                ("n_steps", (45,)),
            ),
            n_reps=5,
            base_seed=base_seed,
        )

    def test_phase_resume_matches_fresh(self, tmp_path):
        pipeline = PipelineConfig(threshold_scale=0.5)
        fresh = phase_sweep(self._grid(), pipeline)
        path = tmp_path / "cells.ndjson"
        phase_sweep(self._grid(), pipeline, checkpoint_path=path)
        lines = path.read_text().splitlines()
        assert len(lines) == 1 + 2
        # keep the header and the first finished cell only
        path.write_text("\n".join(lines[:2]) + "\n")
        resumed = phase_sweep(self._grid(), pipeline, checkpoint_path=path)
        assert resumed.rows == fresh.rows
        assert resumed.spearman_rho == fresh.spearman_rho or (
            math.isnan(resumed.spearman_rho) and math.isnan(fresh.spearman_rho)
        )
        assert len(path.read_text().splitlines()) == 3

    def test_localization_resume_matches_fresh(self, tmp_path):
        fresh = tiny_localization_summary()
        path = tmp_path / "cells.ndjson"
        grid = SweepGrid(
            axes=(
                ("n_nodes", (30,)),
                ("density", (0.5,)),
                ("rel_jump", (0.3, 0.42, 0.55, 0.7)),
                ("n_steps", (60,)),
            ),
            n_reps=8,
            base_seed=13,
        )
        pipeline = PipelineConfig(threshold_scale=0.5)
        localization_curve(
            grid, pipeline, min_used=4, refine_spectral_scale=2.5,
            checkpoint_path=path,
        )
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:3]) + "\n")
        resumed = localization_curve(
            grid, pipeline, min_used=4, refine_spectral_scale=2.5,
            checkpoint_path=path,
        )
        assert resumed.rows == fresh.rows
        assert resumed.mean_refined_error == fresh.mean_refined_error

    def test_mismatched_checkpoint_rejected(self, tmp_path):
        pipeline = PipelineConfig(threshold_scale=0.5)
        path = tmp_path / "cells.ndjson"
        phase_sweep(self._grid(), pipeline, checkpoint_path=path)
        with pytest.raises(ValueError, match="different sweep"):
            phase_sweep(self._grid(base_seed=12), pipeline,
                        checkpoint_path=path)


class TestPipelineFromDict:
    def test_round_trip(self):
        pipeline = PipelineConfig(
            protocol="split",
            n_intervals=7,
            threshold_scale=0.4,
            refine=RefineConfig(eig_threshold=3.0, clip=0.25, trim=0.4),
        )
        encoded = harness_mod._pipeline_dict(pipeline)
        assert pipeline_from_dict(encoded) == pipeline

    def test_unknown_keys_rejected(self):
        with pytest.raises(ValueError, match="unknown pipeline"):
            pipeline_from_dict({"tau": 3.0})
        with pytest.raises(ValueError, match="unknown refine"):
            pipeline_from_dict({"refine": {"eig_threshold": 1.0, "clip": 1.0,
                                           "extra": 2}})


class TestSlopeFit:
    def test_exact_power_law(self):
        xs = [1.0, 2.0, 4.0, 8.0, 16.0]
        ys = [10.0 / x for x in xs]
        fit = fit_loglog_slope(xs, ys)
        assert fit.slope == pytest.approx(-1.0)
        assert fit.ci_low <= -1.0 <= fit.ci_high
        assert fit.stderr == pytest.approx(0.0, abs=1e-12)

    def test_needs_three_points(self):
        with pytest.raises(ValueError):
            fit_loglog_slope([1.0, 2.0], [1.0, 0.5])


class TestOutputFiles:
    def test_phase_files_byte_identical_across_runs(self, tmp_path):
        paths = []
        for run in ("one", "two"):
            summary = tiny_phase_summary()
            csv_path = tmp_path / f"{run}.csv"
            json_path = tmp_path / f"{run}.json"
            write_sweep_csv(csv_path, summary)
            write_sweep_json(json_path, summary)
            paths.append((csv_path.read_bytes(), json_path.read_bytes()))
        assert paths[0] == paths[1]

    def test_localization_files_byte_identical_across_runs(self, tmp_path):
        blobs = []
        for run in ("one", "two"):
            summary = tiny_localization_summary()
            csv_path = tmp_path / f"{run}.csv"
            json_path = tmp_path / f"{run}.json"
            write_sweep_csv(csv_path, summary)
            write_sweep_json(json_path, summary)
            blobs.append((csv_path.read_bytes(), json_path.read_bytes()))
        assert blobs[0] == blobs[1]

    def test_csv_has_schema_comment(self, tmp_path):
        summary = tiny_phase_summary()
        path = tmp_path / "sweep.csv"
        write_sweep_csv(path, summary)
        first = path.read_text().splitlines()[0]
        assert first.startswith("# netcpd-sweep v1 kind=phase")

    def test_json_records_version_and_config(self, tmp_path):
        import json as json_mod

        from netcpd import __version__

        summary = tiny_phase_summary()
        path = tmp_path / "sweep.json"
        write_sweep_json(path, summary)
        data = json_mod.loads(path.read_text())
        assert data["software_version"] == __version__
        assert data["config"]["pipeline"]["protocol"] == "pair"
