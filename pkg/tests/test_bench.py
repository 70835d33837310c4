import numpy as np
import pytest

from tempagg.bench import (
    DEFAULT_DAY_COUNTS,
    DEFAULT_STEP_COUNTS,
    RunConfig,
    _Job,
    _run_job,
    emit_report,
    load_csv,
    resolve_model,
    run_grid,
)
from tempagg import Tolerances, normalize
from tempagg.esom import (
    CapacityFixed,
    EnergySystemSpec,
    Sink,
    Source,
    save_spec,
)


def write_csv(path, text: str):
    path.write_text(text)
    return path


class TestLoadCsv:
    def test_plain_numeric_table(self, tmp_path):
        path = write_csv(tmp_path / "a.csv", "x,y\n1,2\n3,4\n5,6\n")
        ts = load_csv(path)
        assert ts.attribute_names == ("x", "y")
        assert ts.values.shape == (2, 3)
        np.testing.assert_array_equal(ts.values[0], [1.0, 3.0, 5.0])

    def test_timestamp_column_is_validated_and_dropped(self, tmp_path):
        path = write_csv(
            tmp_path / "a.csv",
            "timestamp,x\n2030-01-01T00:00,1\n2030-01-01T01:00,2\n",
        )
        ts = load_csv(path)
        assert ts.attribute_names == ("x",)
        assert ts.n_steps == 2

    def test_unnamed_time_column_is_detected(self, tmp_path):
        path = write_csv(
            tmp_path / "a.csv",
            "when,x\n2030-01-01T00:00,1\n2030-01-01T01:00,2\n",
        )
        ts = load_csv(path)
        assert ts.attribute_names == ("x",)

    def test_non_increasing_timestamps_fail(self, tmp_path):
        path = write_csv(
            tmp_path / "a.csv",
            "timestamp,x\n2030-01-01T01:00,1\n2030-01-01T01:00,2\n",
        )
        with pytest.raises(ValueError, match="strictly increasing at row 3"):
            load_csv(path)

    def test_ragged_row_reports_its_line(self, tmp_path):
        path = write_csv(tmp_path / "a.csv", "x,y\n1,2\n3\n")
        with pytest.raises(ValueError, match="row 3"):
            load_csv(path)

    def test_non_numeric_cell_names_row_and_column(self, tmp_path):
        path = write_csv(tmp_path / "a.csv", "x,y\n1,2\n3,oops\n")
        with pytest.raises(ValueError, match="row 3.*'y'"):
            load_csv(path)

    def test_non_finite_cell_is_rejected(self, tmp_path):
        path = write_csv(tmp_path / "a.csv", "x\n1\nnan\n")
        with pytest.raises(ValueError, match="non-finite"):
            load_csv(path)

    def test_duplicate_columns_rejected(self, tmp_path):
        path = write_csv(tmp_path / "a.csv", "x,x\n1,2\n")
        with pytest.raises(ValueError, match="duplicate"):
            load_csv(path)

    def test_empty_and_header_only_files_fail(self, tmp_path):
        with pytest.raises(ValueError, match="empty"):
            load_csv(write_csv(tmp_path / "e.csv", ""))
        with pytest.raises(ValueError, match="no data rows"):
            load_csv(write_csv(tmp_path / "h.csv", "x,y\n"))

    def test_single_column_series(self, tmp_path):
        ts = load_csv(write_csv(tmp_path / "a.csv", "x\n1\n2\n3\n"))
        assert ts.values.shape == (1, 3)


class TestResolveModel:
    def test_bundled_names(self):
        assert resolve_model("building").name == "building"
        assert resolve_model("dispatch").name == "dispatch"

    def test_scenario_path(self, tmp_path):
        path = tmp_path / "tiny.json"
        save_spec(tiny_spec(), path)
        assert resolve_model(str(path)).name == "tiny"

    def test_unknown_model_rejected(self):
        with pytest.raises(ValueError, match="unknown model"):
            resolve_model("nonsense")


def tiny_spec() -> EnergySystemSpec:
    return EnergySystemSpec(
        name="tiny",
        regions=("r",),
        commodities=("electricity",),
        components=(
            Source(
                name="cheap",
                region="r",
                commodity="electricity",
                capacity=CapacityFixed(6.0),
                variable_cost=1.0,
            ),
            Source(
                name="dear",
                region="r",
                commodity="electricity",
                capacity=CapacityFixed(100.0),
                variable_cost=2.0,
            ),
            Sink(name="load", region="r", commodity="electricity", demand_attr="demand"),
        ),
    )


@pytest.fixture()
def tiny_run(tmp_path):
    rng = np.random.default_rng(5)
    demand = 3.0 + 4.0 * rng.random(48)
    lines = ["demand"] + [repr(float(v)) for v in demand]
    profiles = write_csv(tmp_path / "profiles.csv", "\n".join(lines) + "\n")
    scenario = tmp_path / "tiny.json"
    save_spec(tiny_spec(), scenario)
    return RunConfig(
        model=str(scenario),
        profiles=profiles,
        out_dir=tmp_path / "out",
        step_counts=(2, 12, 48),
        day_counts=(1, 2),
        period_length=24,
    )


class TestRunGrid:
    def test_grid_rows_and_files(self, tiny_run):
        result = run_grid(tiny_run)
        assert len(result.reports) == 5
        assert all(r.status == "ok" for r in result.reports)
        by_key = {(r.mode, r.cluster_count): r for r in result.reports}

        # singleton clusters reproduce the reference exactly
        full_match = by_key[("steps", 48)]
        assert abs(full_match.deviation_rel) <= 1e-9
        two_days = by_key[("days", 2)]
        assert abs(two_days.deviation_rel) <= 1e-9
        assert two_days.equivalent_steps == 48

        # aggregation never overestimates on this convex dispatch problem
        for r in result.reports:
            assert r.objective <= r.reference_objective + 1e-9
            assert r.mean_dev_max <= 1e-9
            assert r.phase_seconds.keys() == {"cluster", "build", "solve", "map-back"}

        out = tiny_run.out_dir
        for name in ("report.csv", "indicators.csv", "breakdown.csv", "timings.csv"):
            assert (out / name).exists()
        curves = out / "duration_curves"
        assert (curves / "full.csv").exists()
        assert (curves / "steps.12.csv").exists()
        assert (curves / "days.2.csv").exists()

        # duration curves are descending and in raw demand units
        curve = np.loadtxt(curves / "full.csv", skiprows=1)
        assert np.all(np.diff(curve) <= 1e-12)
        assert curve.max() > 3.0

    def test_report_csv_is_byte_identical_across_runs(self, tiny_run, tmp_path):
        run_grid(tiny_run)
        first = (tiny_run.out_dir / "report.csv").read_bytes()
        second_cfg = RunConfig(
            model=tiny_run.model,
            profiles=tiny_run.profiles,
            out_dir=tmp_path / "out2",
            step_counts=tiny_run.step_counts,
            day_counts=tiny_run.day_counts,
            period_length=tiny_run.period_length,
        )
        run_grid(second_cfg)
        second = (second_cfg.out_dir / "report.csv").read_bytes()
        assert first == second

    def test_counts_beyond_horizon_are_rejected(self, tiny_run):
        config = RunConfig(
            model=tiny_run.model,
            profiles=tiny_run.profiles,
            out_dir=tiny_run.out_dir,
            step_counts=(49,),
            day_counts=(1,),
        )
        with pytest.raises(ValueError, match="exceeds"):
            run_grid(config)

    def test_indivisible_period_length_is_rejected(self, tiny_run):
        config = RunConfig(
            model=tiny_run.model,
            profiles=tiny_run.profiles,
            out_dir=tiny_run.out_dir,
            mode="days",
            day_counts=(1,),
            period_length=7,
        )
        with pytest.raises(ValueError, match="not divisible"):
            run_grid(config)

    def test_export_lp_writes_instance_files(self, tiny_run, tmp_path):
        config = RunConfig(
            model=tiny_run.model,
            profiles=tiny_run.profiles,
            out_dir=tmp_path / "lp_out",
            mode="steps",
            step_counts=(4,),
            export_lp=True,
        )
        run_grid(config)
        assert (tmp_path / "lp_out" / "lp" / "tiny.steps.4.lp").exists()


class TestErrorRows:
    def test_failed_job_is_reported_not_raised(self, tmp_path):
        rng = np.random.default_rng(1)
        ts_norm, params = normalize_demand(rng)
        job = _Job(
            model="tiny",
            mode="steps",
            cluster_count=999,
            spec=tiny_spec(),
            normalized=ts_norm,
            params=params,
            step_hours=1.0,
            period_length=24,
            reference_objective=1.0,
            tolerances=Tolerances(),
            extremes=False,
            export_lp=False,
            out_dir=tmp_path,
        )
        report = _run_job(job)
        assert report.status == "error"
        assert "ValueError" in report.error
        assert report.total_seconds >= 0.0

    def test_error_rows_have_empty_numeric_cells(self, tiny_run, tmp_path):
        result = run_grid(tiny_run)
        rng = np.random.default_rng(1)
        ts_norm, params = normalize_demand(rng)
        bad = _run_job(
            _Job(
                model="tiny",
                mode="steps",
                cluster_count=999,
                spec=tiny_spec(),
                normalized=ts_norm,
                params=params,
                step_hours=1.0,
                period_length=24,
                reference_objective=1.0,
                tolerances=Tolerances(),
                extremes=False,
                export_lp=False,
                out_dir=tmp_path,
            )
        )
        result.reports.append(bad)
        emit_report(result, tmp_path / "with_error")
        lines = (tmp_path / "with_error" / "report.csv").read_text().splitlines()
        error_line = next(line for line in lines[1:] if ",error," in line)
        cells = error_line.split(",")
        assert cells[4] == "error"
        assert cells[6] == ""  # rmse_tot stays empty on failure


def normalize_demand(rng):
    from tempagg import TimeSeriesSet

    demand = 3.0 + 4.0 * rng.random(48)
    ts = TimeSeriesSet(("demand",), demand[None, :])
    return normalize(ts)


class TestDefaults:
    def test_default_grids_cover_the_endpoints(self):
        assert DEFAULT_STEP_COUNTS[-1] == 8760
        assert DEFAULT_DAY_COUNTS[-1] == 365
        shared = {c * 24 for c in DEFAULT_DAY_COUNTS} & set(DEFAULT_STEP_COUNTS)
        assert {120, 240, 480, 960, 1920, 3840} <= shared

    def test_config_validation(self, tmp_path):
        with pytest.raises(ValueError, match="mode"):
            RunConfig(model="m", profiles=tmp_path, out_dir=tmp_path, mode="hours")
        with pytest.raises(ValueError, match="unique"):
            RunConfig(
                model="m", profiles=tmp_path, out_dir=tmp_path, step_counts=(2, 2)
            )
        with pytest.raises(ValueError, match="positive"):
            RunConfig(
                model="m", profiles=tmp_path, out_dir=tmp_path, day_counts=(0,)
            )
        with pytest.raises(ValueError, match="workers"):
            RunConfig(model="m", profiles=tmp_path, out_dir=tmp_path, workers=0)
