import filecmp
import math
import pickle

import pandas as pd
import pytest

import pdstretch
from pdstretch import evaluate
from pdstretch.evaluate import CHECK_NAMES, TrialError, animals_connected, n0_trial, path_trial
from pdstretch.harness import (REPORT_COLUMNS, ExperimentConfig, animal_tail_checks, animal_tail_fraction,
                               animal_tail_study, emit, estimate_L0, estimate_N0, pixel_event_study,
                               random_polyline_check, resolve_workers, run_path_trials, run_trials, theorem_checks,
                               variance_scaling_checks, variance_scaling_study, walk_count_study)
from pdstretch.metrics import RESULTS_COLUMNS, gate, joint_agreement, summarize
from pdstretch.sampling import SamplingError, TruncationError


def small_config(**kwargs):
    settings = dict(intensity=300, k=1, trials=3, master_seed=42, workers=1)
    settings.update(kwargs)
    return ExperimentConfig(**settings)


class TestExperimentConfig:
    def test_defaults(self):
        cfg = ExperimentConfig()
        assert cfg.intensity == 1e5
        assert cfg.paths == ("SW", "UP", "GP", "SP")
        assert cfg.engine == "qhull"

    def test_coercion(self):
        cfg = ExperimentConfig(trials=10.0, paths=["sp", "up"], variance_intensities=[1e3, "1e4"])
        assert cfg.trials == 10 and isinstance(cfg.trials, int)
        assert cfg.paths == ("SP", "UP")
        assert cfg.variance_intensities == (1e3, 1e4)

    @pytest.mark.parametrize("settings", [
        dict(trials=0),
        dict(trials=2.5),
        dict(intensity=-1),
        dict(k=0),
        dict(paths=[]),
        dict(paths=["SP", "XP"]),
        dict(engine="delaunator"),
        dict(margin=0),
        dict(workers=0),
    ])
    def test_invalid(self, settings):
        pytest.raises(ValueError, ExperimentConfig, **settings)

    def test_from_dict(self):
        cfg = ExperimentConfig.from_dict({"trials": None, "margin": None, "k": 2})
        assert cfg.trials == 100
        assert cfg.k == 2.0
        pytest.raises(ValueError, ExperimentConfig.from_dict, {"window": 3})


class TestWorkers:
    def test_environment_cap(self, monkeypatch):
        monkeypatch.setenv("PDS_STRETCH_THREADS", "2")
        assert resolve_workers(8) == 2
        assert resolve_workers(1) == 1

    def test_invalid_environment(self, monkeypatch):
        monkeypatch.setenv("PDS_STRETCH_THREADS", "0")
        pytest.raises(ValueError, resolve_workers, 4)
        monkeypatch.setenv("PDS_STRETCH_THREADS", "many")
        pytest.raises(ValueError, resolve_workers, 4)

    def test_pool_keeps_order(self, monkeypatch):
        monkeypatch.delenv("PDS_STRETCH_THREADS", raising=False)
        serial = run_trials(n0_trial, 6, workers=1, intensity=200, master_seed=3)
        parallel = run_trials(n0_trial, 6, workers=2, intensity=200, master_seed=3)
        assert serial == parallel


class TestPathTrials:
    def test_rows(self):
        trials = run_path_trials(small_config())
        assert list(trials.columns) == ["trial", "seed", "path", "length", "size"]
        assert len(trials) == 12
        assert trials["length"][trials["path"] == "SW"].isna().all()
        assert (trials["length"][trials["path"] != "SW"] >= 1.0).all()

    def test_reproducible(self):
        a = pdstretch.harness.run_path_experiment(small_config())
        b = pdstretch.harness.run_path_experiment(small_config())
        pd.testing.assert_frame_equal(a, b)
        assert list(a.columns) == RESULTS_COLUMNS
        assert a["path"].tolist() == ["SW", "UP", "GP", "SP"]

    def test_engines_agree(self):
        a = run_path_trials(small_config(engine="qhull"))
        b = run_path_trials(small_config(engine="incremental"))
        pd.testing.assert_series_equal(a["size"], b["size"])
        pd.testing.assert_series_equal(a["length"], b["length"])

    def test_failed_trial(self, monkeypatch):
        def broken(*args, **kwargs):
            raise SamplingError("no usable sample")

        monkeypatch.setattr(evaluate, "make_instance", broken)
        with pytest.raises(TrialError) as info:
            path_trial(2, 300, 1, master_seed=42)
        assert info.value.index == 2
        assert "no usable sample" in str(info.value)

    def test_redraw_near_window_edge(self, monkeypatch):
        calls = []

        def first_too_close(inst, vertex_ids):
            calls.append(inst.seed)
            if len(calls) == 1:
                raise TruncationError("path vertex near the window edge")
            return 1.0

        monkeypatch.setattr(evaluate, "require_clearance", first_too_close)
        rows = path_trial(0, 300, 1, master_seed=42)
        assert len(calls) == 2 and calls[0] != calls[1]
        assert {row["seed"] for row in rows} == {calls[1]}

    def test_never_clear_of_window_edge(self, monkeypatch):
        def too_close(inst, vertex_ids):
            raise TruncationError("path vertex near the window edge")

        monkeypatch.setattr(evaluate, "require_clearance", too_close)
        with pytest.raises(TrialError) as info:
            path_trial(1, 300, 1, master_seed=42)
        assert "clear of the window edge" in str(info.value)

    def test_trial_error_pickles(self):
        err = pickle.loads(pickle.dumps(TrialError(1, 99, "walk left the hull")))
        assert (err.index, err.seed, err.reason) == (1, 99, "walk left the hull")


class TestOrigin:
    def test_n0(self):
        summary = estimate_N0(100, 300, seed=1, workers=1)
        assert summary.count == 300
        assert summary.within(4.0, 0.5)

    def test_l0(self):
        summary, scaled = estimate_L0(400, 200, seed=1, workers=1)
        assert summary.mean > 0
        assert scaled.mean == pytest.approx(summary.mean * math.sqrt(400))
        assert scaled.within(6.8, 1.0)


class TestStudies:
    def test_walk_count_study(self):
        table = walk_count_study([200, 400], trials=3, seed=0, workers=1)
        assert table["intensity"].tolist() == [200, 400]
        assert (table["trials"] == 3).all()
        assert table["target"].iloc[0] == pytest.approx(2.1615, abs=1e-4)

    def test_variance_study(self):
        table = variance_scaling_study([400, 200], trials=4, seed=0, workers=1)
        assert table["intensity"].tolist() == [200, 400]
        assert (table["var_length"] > 0).all()
        assert ((table["tail_fraction"] >= 0) & (table["tail_fraction"] <= 1)).all()
        pytest.raises(ValueError, variance_scaling_study, [200], 4, 0)

    def test_variance_checks(self):
        table = pd.DataFrame({"intensity": [1e4, 1e5, 1e6], "var_length": [4e-4, 1e-4, 2.5e-5]})
        table["var_times_sqrt_n"] = table["var_length"] * table["intensity"] ** 0.5
        assert variance_scaling_checks(table) == {"variance_decreasing": True, "scaled_variance_stable": True}
        table.loc[2, ["var_length", "var_times_sqrt_n"]] = [2e-4, 0.2]
        assert variance_scaling_checks(table) == {"variance_decreasing": False, "scaled_variance_stable": False}

    def test_pixel_event_study(self):
        table = pixel_event_study(50, 1e-3, trials=1, seed=0)
        assert table["pixels"].iloc[0] == 25
        assert bool(table["within_bound"].iloc[0])


class TestTheorems:
    def test_random_polylines(self):
        assert random_polyline_check(300, 0) == (300, 0, None)

    def test_small_run(self):
        cfg = ExperimentConfig(intensity=153, k=2, trials=2, master_seed=7, workers=1, rho=1e-4, polylines=50)
        report, instances = theorem_checks(cfg)
        assert list(report.columns) == REPORT_COLUMNS
        assert report["check"].tolist() == list(CHECK_NAMES) + ["animal_bound_random_polylines"]
        assert (report["failures"] == 0).all(), report
        assert 0.0 <= animal_tail_fraction(instances) <= 1.0

    def test_sp_animals_connected(self):
        zigzag = [(0, 0), (0.5, 0.5), (1.5, -0.5), (2.5, 0.5), (3.5, -0.5), (4, 0)]
        assert animals_connected(zigzag)

    def test_animal_tail_study(self):
        table = animal_tail_study([4, 2], intensity=153, trials=2, seed=7, workers=1)
        assert list(table.columns) == ["k", "intensity", "trials", "threshold", "tail_fraction", "se"]
        assert table["k"].tolist() == [2.0, 4.0]
        assert table["threshold"].tolist() == pytest.approx([3.55, 6.1])
        assert ((table["tail_fraction"] >= 0) & (table["tail_fraction"] <= 1)).all()
        pytest.raises(ValueError, animal_tail_study, [5], 153, 2, 7)

    def test_animal_tail_checks(self):
        table = pd.DataFrame({"k": [20.0, 5.0], "tail_fraction": [0.01, 0.2], "se": [0.01, 0.04]})
        assert animal_tail_checks(table) == {"tail_fraction_not_increasing": True}
        table["tail_fraction"] = [0.6, 0.2]
        assert animal_tail_checks(table) == {"tail_fraction_not_increasing": False}

    def test_integer_k(self):
        pytest.raises(ValueError, theorem_checks, ExperimentConfig(k=1.5, trials=1))

    @pytest.mark.slow
    def test_full_run(self):
        cfg = ExperimentConfig(intensity=153, k=5, trials=100, master_seed=42, rho=1e-4)
        report, _ = theorem_checks(cfg)
        assert (report["failures"] == 0).all(), report

    @pytest.mark.slow
    def test_animal_tail_shrinks_with_k(self):
        table = animal_tail_study([5, 20], intensity=153, trials=100, seed=42)
        assert animal_tail_checks(table)["tail_fraction_not_increasing"], table


class TestEmit:
    def test_missing_directory(self, tmp_path):
        pytest.raises(OSError, emit, pd.DataFrame({"a": [1]}), str(tmp_path / "missing" / "out.csv"))

    def test_svg_needs_columns(self, tmp_path):
        pytest.raises(ValueError, emit, pd.DataFrame({"intensity": [1]}), str(tmp_path / "out.svg"))

    def test_csv_nan(self, tmp_path):
        emit(pd.DataFrame({"a": [1.0, math.nan]}), str(tmp_path / "out.csv"))
        assert (tmp_path / "out.csv").read_text().splitlines() == ["a", "1.0", "NaN"]

    def test_svg_is_deterministic(self, tmp_path):
        table = pd.DataFrame({"intensity": [1e3, 1e4, 1e5], "mean": [1.2, 1.19, 1.185], "std": [0.05, 0.02, 0.01]})
        for name in ("a.svg", "b.svg"):
            emit(table, str(tmp_path / name), mean="mean", std="std", reference=1.1821)
        assert (tmp_path / "a.svg").read_text().startswith("<?xml")
        assert filecmp.cmp(tmp_path / "a.svg", tmp_path / "b.svg", shallow=False)


@pytest.mark.slow
class TestDeskScaleExperiment:
    # mean length and mean size / sqrt(n) bands at n = 1e5, k = 1
    BANDS = {("SP", "length"): (1.030, 1.050), ("GP", "length"): (1.090, 1.125), ("UP", "length"): (1.165, 1.200),
             ("SW", "size"): (2.10, 2.22), ("UP", "size"): (1.04, 1.12), ("SP", "size"): (0.89, 0.96)}

    def test_path_means(self):
        trials = run_path_trials(ExperimentConfig(intensity=1e5, k=1, trials=100, master_seed=42))
        for (path, column), (low, high) in self.BANDS.items():
            values = trials.loc[trials["path"] == path, column].to_numpy(dtype=float)
            if column == "size":
                values = values / math.sqrt(1e5)
            passed, band, widened = gate(summarize(values), (low + high) / 2.0, (high - low) / 2.0)
            assert passed and not widened, (path, column, band)

    def test_n0(self):
        summary = estimate_N0(1000, 10 ** 4, seed=42)
        assert summary.within(4.0, 0.15)
        assert summary.within(4.0)

    def test_n0_scale_invariance(self):
        assert joint_agreement(estimate_N0(100, 10 ** 4, seed=1), estimate_N0(1000, 10 ** 4, seed=2))

    def test_l0(self):
        _, scaled = estimate_L0(1000, 10 ** 4, seed=42)
        assert scaled.within(6.8, 0.5)

    def test_l0_scale_invariance(self):
        _, coarse = estimate_L0(1000, 10 ** 4, seed=42)
        _, fine = estimate_L0(10 ** 4, 10 ** 4, seed=43)
        assert joint_agreement(coarse, fine)

    def test_walk_count(self):
        table = walk_count_study([1e5], trials=100, seed=42)
        assert abs(table["mean_edges_over_sqrt_n"].iloc[0] - 2.1615) <= 0.06

    def test_variance(self):
        table = variance_scaling_study([1e4, 1e5, 1e6], trials=500, seed=42)
        assert variance_scaling_checks(table)["variance_decreasing"]
        assert table.set_index("intensity").loc[1e5, "tail_fraction"] < 0.05

    def test_pixel_events(self):
        for rho in (1e-4, 1e-7):
            table = pixel_event_study(153, rho, trials=800, seed=42)
            assert bool(table["within_bound"].iloc[0])
