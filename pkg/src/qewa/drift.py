"""Concept-drift detection on a scalar prediction-error stream.

Tracks an upper quantile (default the 80th percentile) of the absolute
error stream and emits a retrain event whenever the estimate crosses a
fixed threshold. After an event the tracker re-enters warmup by default,
modeling the fresh error regime of a retrained model.
"""

import csv
import math
from dataclasses import dataclass

from .estimators import QewaEstimator


@dataclass
class DriftConfig:
    q: float = 0.8
    threshold: float = 2.0
    warmup_samples: int = 96      # e.g. 24 h of 15-minute samples
    lam: float = 0.05
    gamma: float | None = None    # default lam/100
    reset_on_event: bool = True
    estimator_warmup: int = 10

    def __post_init__(self):
        if not math.isfinite(self.threshold):
            raise ValueError(f"threshold must be finite, got {self.threshold!r}")
        if self.warmup_samples < self.estimator_warmup:
            raise ValueError(
                f"warmup_samples ({self.warmup_samples}) must cover the "
                f"estimator warmup ({self.estimator_warmup})"
            )


@dataclass(frozen=True)
class DriftEvent:
    sample_index: int
    quantile_estimate: float
    threshold: float


class DriftDetector:
    """Streaming detector: feed errors one by one, receive retrain events."""

    def __init__(self, config: DriftConfig):
        self.config = config
        self.n_seen = 0
        self._reset_tracker()

    def _reset_tracker(self):
        c = self.config
        self.tracker = QewaEstimator(q=c.q, lam=c.lam, gamma=c.gamma,
                                     warmup=c.estimator_warmup)
        self.since_reset = 0

    def observe(self, err) -> DriftEvent | None:
        """Consume one error value (magnitude is used); returns an event
        when the tracked quantile exceeds the threshold past warmup."""
        err = float(err)
        if not math.isfinite(err):
            raise ValueError(f"error value must be finite, got {err!r}")
        self.tracker.observe(abs(err))
        self.n_seen += 1
        self.since_reset += 1

        if self.since_reset < self.config.warmup_samples or not self.tracker.ready:
            return None
        estimate = self.tracker.estimate()
        if estimate > self.config.threshold:
            event = DriftEvent(sample_index=self.n_seen,
                               quantile_estimate=estimate,
                               threshold=self.config.threshold)
            assert event.quantile_estimate > event.threshold
            if self.config.reset_on_event:
                self._reset_tracker()
            return event
        return None

    def current_estimate(self) -> float | None:
        return self.tracker.q_hat if self.tracker.ready else None


def run_drift_stream(values, config: DriftConfig):
    """Run the detector over an iterable of error values.

    Returns ``(events, trace)`` where trace rows are
    ``(n, err, q_hat_or_None, event_flag)``.
    """
    detector = DriftDetector(config)
    events = []
    trace = []
    for n, err in enumerate(values, start=1):
        event = detector.observe(err)
        if event is not None:
            events.append(event)
        trace.append((n, float(err), detector.current_estimate(),
                      event is not None))
    return events, trace


def parse_error_file(path, column=None):
    """Yield error values from a file: one value per line, or a CSV with a
    named error column. Raises ValueError with the offending line number."""
    with open(path, newline="") as fh:
        if column is not None:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or column not in reader.fieldnames:
                raise ValueError(f"column {column!r} not found in {path}")
            for lineno, row in enumerate(reader, start=2):
                try:
                    yield float(row[column])
                except (TypeError, ValueError):
                    raise ValueError(
                        f"{path}:{lineno}: cannot parse {row.get(column)!r}"
                    ) from None
        else:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    yield float(line)
                except ValueError:
                    raise ValueError(
                        f"{path}:{lineno}: cannot parse {line!r}"
                    ) from None


def run_drift_file(path, config: DriftConfig, column=None):
    """File-driven variant of :func:`run_drift_stream`."""
    return run_drift_stream(parse_error_file(path, column), config)


def write_trace(trace, path):
    """Trace CSV: header ``n,err,q_hat,event``; q_hat empty during warmup."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "err", "q_hat", "event"])
        for n, err, q_hat, event in trace:
            w.writerow([n, f"{err:.17g}",
                        "" if q_hat is None else f"{q_hat:.17g}",
                        int(event)])


def write_events(events, path):
    """Events CSV: header ``sample_index,quantile_estimate,threshold``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sample_index", "quantile_estimate", "threshold"])
        for e in events:
            w.writerow([e.sample_index, f"{e.quantile_estimate:.17g}",
                        f"{e.threshold:.17g}"])


def synthetic_error_stream(n, shift_indices, shift_len=50, base_sigma=0.5,
                           shift_mean=5.0, seed=0):
    """Synthetic drifting error stream: baseline |N(0, base_sigma)| errors
    with the mean shifted to ``shift_mean`` for ``shift_len`` samples at
    each index in ``shift_indices`` (1-based). Stand-in fixture for a real
    forecasting-error stream."""
    import numpy as np

    rng = np.random.default_rng(seed)
    errs = np.abs(rng.normal(0.0, base_sigma, n))
    for k in shift_indices:
        i0 = k - 1
        i1 = min(i0 + shift_len, n)
        errs[i0:i1] = np.abs(rng.normal(shift_mean, base_sigma, i1 - i0))
    return errs
