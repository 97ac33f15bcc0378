import json
import warnings

import numpy as np
import pytest

from tickcorr.core import TickSeries
from tickcorr.experiments import (
    DEFAULT_RHO_GRID,
    ExperimentReport,
    make_synthetic_taq,
    model_config,
    read_taq_csv,
    run_missing_data_sweep,
    run_reno_extended,
    run_taq_pipeline,
    summarize_correlations,
    taq_volatility_report,
)
from tickcorr.simulators import derive_rng, simulate


def write_taq(path, rows):
    lines = ["timestamp,ticker,price,volume"] + [",".join(map(str, r)) for r in rows]
    path.write_text("\n".join(lines) + "\n")


def synthetic_file(tmp_path, **kwargs):
    path = tmp_path / "taq.csv"
    make_synthetic_taq(str(path), **kwargs)
    return str(path)


class TestSummarizeCorrelations:
    def test_identity(self):
        assert summarize_correlations(np.eye(4)) == (0.0, 0.0)

    def test_uniform_half(self):
        m = np.full((3, 3), 0.5)
        np.fill_diagonal(m, 1.0)
        mean, std = summarize_correlations(m)
        assert mean == 0.5 and std == 0.0

    def test_hand_arithmetic(self):
        m = np.eye(3)
        m[0, 1] = m[1, 0] = 0.2
        m[0, 2] = m[2, 0] = -0.4
        m[1, 2] = m[2, 1] = 0.6
        mean, std = summarize_correlations(m)
        assert np.isclose(mean, 0.4)
        assert np.isclose(std, np.std([0.2, 0.4, 0.6], ddof=1))


class TestDefaultGrid:
    def test_grid_contents(self):
        grid = np.asarray(DEFAULT_RHO_GRID)
        assert grid.size == 19
        assert grid[0] == -0.99 and grid[-1] == 0.99
        assert 0.0 in grid and 0.8 in grid


class TestReports:
    def test_mean_std_and_rows(self):
        rep = ExperimentReport(name="x", panel_name="p", sweep_name="s")
        for r, v in enumerate([0.1, 0.2, 0.3]):
            rep.add("a", 1.0, "MM", r, v)
        assert np.isclose(rep.mean("a", 1.0, "MM"), 0.2)
        assert np.isclose(rep.std("a", 1.0, "MM"), np.std([0.1, 0.2, 0.3], ddof=1))
        assert rep.summary_rows()[0][:3] == ("a", 1.0, "MM")

    def test_save_files_and_determinism(self, tmp_path):
        out1, out2 = str(tmp_path / "r1.csv"), str(tmp_path / "r2.csv")
        for out in (out1, out2):
            rep = run_missing_data_sweep(
                fractions=(0.0, 0.4), rho_grid=(0.5,), reps=3, n_steps=500, seed=5, threads=2
            )
            rep.save(out)
        assert (tmp_path / "r1.csv").read_bytes() == (tmp_path / "r2.csv").read_bytes()
        assert (tmp_path / "r1.reps.csv").read_bytes() == (tmp_path / "r2.reps.csv").read_bytes()
        meta = json.loads((tmp_path / "r1.meta.json").read_text())
        assert meta["seed"] == 5 and meta["reps"] == 3
        header = (tmp_path / "r1.csv").read_text().splitlines()[0]
        assert header == "fraction,rho,estimator,mean,std,reps"

    def test_thread_count_does_not_change_results(self):
        a = run_missing_data_sweep(fractions=(0.0, 0.2), rho_grid=(0.4,), reps=4, n_steps=400, seed=1, threads=1)
        b = run_missing_data_sweep(fractions=(0.0, 0.2), rho_grid=(0.4,), reps=4, n_steps=400, seed=1, threads=4)
        for key in a.keys():
            assert a.estimates[key] == b.estimates[key]

    def test_single_grid_point_reproducible_in_isolation(self):
        full = run_missing_data_sweep(
            fractions=(0.0, 0.3), rho_grid=(0.2, 0.6), reps=3, n_steps=400, seed=9, threads=1
        )
        point = run_missing_data_sweep(
            fractions=(0.3,), rho_grid=(0.6,), reps=3, n_steps=400, seed=9, threads=1
        )
        # the derived seed depends only on the (panel, grid, rep) indices
        assert point.estimates[("0.3", 0.6, "MM")] != full.estimates[("0.3", 0.6, "MM")]
        lone = run_missing_data_sweep(
            fractions=(0.0, 0.3), rho_grid=(0.2, 0.6), reps=3, n_steps=400, seed=9, threads=4
        )
        assert lone.estimates[("0.3", 0.6, "MM")] == full.estimates[("0.3", 0.6, "MM")]


class TestModelConfig:
    def test_labels(self):
        for label, sim in [
            ("gbm", "gbm"), ("merton-0.5", "merton"), ("vg", "vg"),
            ("garch-reno", "garch"), ("ou", "ou"), ("ou-fast", "ou"),
        ]:
            name, cfg = model_config(label, 0.3, 100)
            assert name == sim
            simulate(name, cfg, rng=derive_rng(0))  # constructs and runs

    def test_merton_lambda_parsed(self):
        _, cfg = model_config("merton-0.5", 0.3, 100)
        assert cfg.model_params["lam"] == (0.5, 0.5)

    def test_unknown(self):
        with pytest.raises(ValueError, match="unknown model"):
            model_config("heston", 0.3, 100)


class TestReadTaq:
    def test_malformed_rows_with_line_numbers(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(
            "timestamp,ticker,price,volume\n"
            "1,AAA,100.0,5\n"
            "2,AAA,not_a_price,5\n"
            "3,AAA,100.0,0\n"
        )
        with pytest.raises(ValueError, match="line 3.*line 4"):
            read_taq_csv(str(path))

    def test_header_checked(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time,sym,px,qty\n1,A,100,1\n")
        with pytest.raises(ValueError, match="header"):
            read_taq_csv(str(path))

    def test_unsorted_input_stably_sorted(self, tmp_path):
        path = tmp_path / "taq.csv"
        write_taq(path, [(5, "A", 101.0, 1), (1, "A", 100.0, 2), (5, "A", 103.0, 3)])
        data = read_taq_csv(str(path))
        assert np.array_equal(data["A"].times, [1.0, 5.0, 5.0])
        assert np.array_equal(data["A"].prices, [100.0, 101.0, 103.0])  # stable


class TestTaqPipeline:
    def test_identical_tickers_unit_correlation_every_clock(self, tmp_path):
        rng = np.random.default_rng(3)
        times = np.sort(rng.choice(np.arange(4_000), 400, replace=False))
        prices = np.round(100 * np.exp(np.cumsum(rng.normal(0, 1e-3, 400))), 2)
        volumes = rng.integers(1, 20, 400)
        rows = []
        for t, p, v in zip(times, prices, volumes):
            rows += [(int(t), "AAA", p, int(v)), (int(t), "BBB", p, int(v))]
        path = tmp_path / "twin.csv"
        write_taq(path, rows)
        cases = [
            ("TAQ", None, None),
            ("CALENDAR_CLOSE", 60.0, None),
            ("CALENDAR_VWAP", 60.0, None),
            ("INTRINSIC", None, 16),
            ("SYNC_VOLUME", None, 16),
        ]
        for clock, scale, buckets in cases:
            for est in ("mm", "hy"):
                result = run_taq_pipeline(
                    str(path), clock=clock, scale=scale, estimator=est, buckets_per_day=buckets
                )
                assert abs(result.rho[0, 1] - 1.0) < 1e-10, (clock, est)

    def test_synthetic_bundle_mm_hy_agree_on_minute_bars(self, tmp_path):
        path = synthetic_file(tmp_path, n_assets=2, rho=0.6, n_seconds=20_000, seed=4)
        mm = run_taq_pipeline(path, clock="CALENDAR_CLOSE", scale=60.0, estimator="mm")
        hy = run_taq_pipeline(path, clock="CALENDAR_CLOSE", scale=60.0, estimator="hy")
        assert abs(mm.rho[0, 1] - hy.rho[0, 1]) < 0.1

    def test_sparse_ticker_dropped_with_warning(self, tmp_path):
        path = tmp_path / "taq.csv"
        rows = [(t, "AAA", 100.0 + 0.01 * t, 1) for t in range(0, 600, 10)]
        rows += [(t, "BBB", 50.0 + 0.01 * t, 1) for t in range(0, 600, 15)]
        rows += [(7, "CCC", 10.0, 1)]  # single trade
        write_taq(path, rows)
        with pytest.warns(UserWarning, match="CCC"):
            result = run_taq_pipeline(str(path), clock="TAQ", estimator="hy")
        assert result.asset_ids == ("AAA", "BBB")
        assert "CCC" in result.dropped

    def test_multiday_sums_per_day_windows(self, tmp_path):
        # two days of data: overnight gap never contributes a return
        rng = np.random.default_rng(8)
        rows = []
        for day in (0, 1):
            base = day * 86_400 + 30_000
            for t in range(0, 2_000, 5):
                p1 = round(100 + 0.001 * t + rng.normal(0, 0.05), 3)
                p2 = round(50 + 0.0005 * t + rng.normal(0, 0.03), 3)
                rows += [(base + t, "AAA", abs(p1) + 1, 2), (base + t, "BBB", abs(p2) + 1, 3)]
        path = tmp_path / "taq.csv"
        write_taq(path, rows)
        result = run_taq_pipeline(str(path), clock="TAQ", estimator="hy")
        assert result.n_days == 2
        assert sorted(result.cutoffs) == []  # hy records no cutoffs
        mm = run_taq_pipeline(str(path), clock="TAQ", estimator="mm")
        assert sorted(mm.cutoffs) == [0, 1]

    def test_session_filter(self, tmp_path):
        # in-session prices proportional (identical log returns); the
        # out-of-session trades would wreck the correlation if kept
        rows = [(100 + t, "AAA", 100.0 * (1 + t / 50), 1) for t in range(10)]
        rows += [(100 + t, "BBB", 50.0 * (1 + t / 50), 1) for t in range(10)]
        rows += [(86_000, "AAA", 1.0, 1), (86_000, "BBB", 500.0, 1)]
        path = tmp_path / "taq.csv"
        write_taq(path, rows)
        result = run_taq_pipeline(str(path), clock="TAQ", estimator="hy", session=(0.0, 1_000.0))
        assert result.rho[0, 1] == pytest.approx(1.0, abs=1e-9)
        unfiltered = run_taq_pipeline(str(path), clock="TAQ", estimator="hy")
        assert unfiltered.rho[0, 1] < 0.99

    def test_matrix_csv_round_trip(self, tmp_path):
        path = synthetic_file(tmp_path, n_assets=3, rho=0.4, n_seconds=10_000, seed=2)
        result = run_taq_pipeline(path, clock="TAQ", estimator="hy")
        out = tmp_path / "corr.csv"
        result.write_matrix_csv(str(out))
        lines = out.read_text().splitlines()
        assert lines[0].split(",")[0] == "ticker"
        meta = json.loads((tmp_path / "corr.meta.json").read_text())
        assert meta["estimator"] == "hy"
        loaded = np.asarray([[float(x) for x in line.split(",")[1:]] for line in lines[1:]])
        assert np.allclose(loaded, result.rho)

    def test_sync_volume_hy_exceeds_mm(self):
        data = make_synthetic_taq(None, n_assets=4, rho=0.6, n_seconds=28_800, seed=1)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            hy = run_taq_pipeline(data, clock="SYNC_VOLUME", buckets_per_day=480, estimator="hy")
            mm = run_taq_pipeline(data, clock="SYNC_VOLUME", buckets_per_day=480, estimator="mm")
        assert hy.mean_abs_corr > mm.mean_abs_corr

    def test_volatility_report(self, tmp_path):
        path = synthetic_file(tmp_path, n_assets=2, rho=0.3, n_seconds=25_000, seed=6)
        rows = taq_volatility_report(path, scales=((600.0, "10m"), (60.0, "1m")))
        assert {r["ticker"] for r in rows} == {"SYN1", "SYN2"}
        for r in rows:
            assert r["adv"] > 0
            assert r["sigma2_daily_10m"] > 0 and r["sigma2_daily_1m"] > 0


class TestRenoExtendedStructure:
    def test_hy_baselines_constant_across_grid(self):
        rep = run_reno_extended(models=("gbm",), n_grid=(10, 40), reps=2, n_steps=3_000, seed=3, threads=1)
        assert rep.reps("gbm", 10, "HY-async") == pytest.approx(rep.reps("gbm", 40, "HY-async"))
        assert rep.metadata["nyquist_from_mean_gap"]["gbm"] > 0
