import numpy as np
import pytest

from qewa.drift import (
    DriftConfig,
    DriftDetector,
    run_drift_file,
    run_drift_stream,
    synthetic_error_stream,
    write_events,
    write_trace,
)


def config(**kw):
    base = dict(q=0.8, threshold=2.0, warmup_samples=96, lam=0.05)
    base.update(kw)
    return DriftConfig(**base)


class TestConfig:
    def test_warmup_must_cover_estimator_warmup(self):
        with pytest.raises(ValueError):
            DriftConfig(warmup_samples=5, estimator_warmup=10)

    def test_threshold_must_be_finite(self):
        with pytest.raises(ValueError):
            DriftConfig(threshold=float("inf"))


class TestDetector:
    def test_small_constant_errors_never_fire(self):
        # the estimate stays inside the hull of the observations, all far
        # below the threshold
        det = DriftDetector(config())
        for _ in range(5000):
            assert det.observe(0.5) is None

    def test_huge_threshold_never_fires(self):
        det = DriftDetector(config(threshold=1e12))
        rng = np.random.default_rng(2)
        for x in rng.normal(0, 100, 5000):
            assert det.observe(x) is None

    def test_step_stream_fires_once_then_resets(self):
        # noisy baseline with one 50-sample error burst at index 501
        errs = synthetic_error_stream(2550, [501], shift_len=50, seed=1)
        cfg = config(warmup_samples=400, lam=0.1, estimator_warmup=300)
        events, _ = run_drift_stream(errs, cfg)
        assert len(events) == 1
        assert 500 < events[0].sample_index <= 700
        assert events[0].quantile_estimate > 2.0

    def test_no_events_during_warmup(self):
        errs = np.full(95, 50.0)  # would fire instantly if armed
        events, trace = run_drift_stream(errs, config())
        assert events == []

    def test_events_separated_by_warmup(self):
        rng = np.random.default_rng(4)
        errs = np.abs(rng.normal(5.0, 0.5, 3000))  # persistently high
        events, _ = run_drift_stream(errs, config())
        assert len(events) >= 2
        gaps = np.diff([e.sample_index for e in events])
        assert np.all(gaps >= 96)

    def test_reset_can_be_disabled(self):
        rng = np.random.default_rng(4)
        errs = np.abs(rng.normal(5.0, 0.5, 500))
        with_reset, _ = run_drift_stream(errs, config())
        without, _ = run_drift_stream(errs, config(reset_on_event=False))
        assert len(without) > len(with_reset)

    def test_magnitude_is_used(self):
        errs = np.full(1000, -5.0)
        events, _ = run_drift_stream(errs, config())
        assert len(events) >= 1

    def test_rejects_non_finite(self):
        det = DriftDetector(config())
        with pytest.raises(ValueError):
            det.observe(float("nan"))

    def test_pure_function_of_input(self):
        errs = synthetic_error_stream(3000, [1500], seed=8)
        a = run_drift_stream(errs, config())
        b = run_drift_stream(errs, config())
        assert [e.sample_index for e in a[0]] == [e.sample_index for e in b[0]]
        assert a[1] == b[1]

    def test_shift_fixture_fires_per_shift(self):
        shifts = [2000, 4000, 6000]
        errs = synthetic_error_stream(8000, shifts, shift_len=50, seed=5)
        cfg = config(warmup_samples=400, lam=0.1, estimator_warmup=300)
        events, _ = run_drift_stream(errs, cfg)
        assert len(events) == 3
        for e, k in zip(events, shifts):
            assert 0 < e.sample_index - k <= 200


class TestFileRunner:
    def test_plain_lines(self, tmp_path):
        p = tmp_path / "errs.txt"
        p.write_text("1.0\n1.0\n1.0\n")
        events, trace = run_drift_file(p, config())
        assert events == []
        assert len(trace) == 3

    def test_shorter_than_warmup_has_not_ready_markers(self, tmp_path):
        p = tmp_path / "errs.txt"
        p.write_text("".join("1.0\n" for _ in range(5)))
        events, trace = run_drift_file(p, config())
        assert events == []
        assert all(row[2] is None for row in trace)

    def test_csv_column(self, tmp_path):
        p = tmp_path / "errs.csv"
        p.write_text("t,err\n1,0.5\n2,0.6\n")
        events, trace = run_drift_file(p, config(), column="err")
        assert [row[1] for row in trace] == [0.5, 0.6]

    def test_unparseable_line_reports_line_number(self, tmp_path):
        p = tmp_path / "errs.txt"
        p.write_text("1.0\nbogus\n")
        with pytest.raises(ValueError, match=":2:"):
            run_drift_file(p, config())

    def test_empty_file(self, tmp_path):
        p = tmp_path / "errs.txt"
        p.write_text("")
        events, trace = run_drift_file(p, config())
        assert events == [] and trace == []

    def test_trace_and_event_csv(self, tmp_path):
        errs = synthetic_error_stream(3000, [1500], shift_len=50, seed=3)
        cfg = config(warmup_samples=400, lam=0.1, estimator_warmup=300)
        events, trace = run_drift_stream(errs, cfg)
        tp = tmp_path / "trace.csv"
        ep = tmp_path / "events.csv"
        write_trace(trace, tp)
        write_events(events, ep)
        lines = tp.read_text().splitlines()
        assert lines[0] == "n,err,q_hat,event"
        assert len(lines) == 3001
        elines = ep.read_text().splitlines()
        assert elines[0] == "sample_index,quantile_estimate,threshold"
        assert len(elines) == 1 + len(events)
