"""RMSE benchmark harness.

Runs estimators over synthetic streams against the analytic quantile
oracle, sweeps tuning-parameter grids, measures post-switch recovery time
and writes machine-readable CSV result tables. All estimators of one
stream consume the identical sample path (common random numbers).
"""

import csv
import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .streams import OracleQuantile, StreamSpec, params, generate, true_quantiles

# Grid defaults: bracket the useful range of the step-size parameter and
# the conditional-mean/step-size rate ratio (best results sit at small
# ratios, around 1/100).
DEFAULT_LAMBDA_GRID = tuple(np.logspace(math.log10(1e-3), math.log10(0.5), 30))
DEFAULT_RATIO_GRID = (1.0, 0.1, 0.01, 0.001)
DEFAULT_QUANTILES = (0.5, 0.7, 0.9)

CSV_HEADER = ["estimator", "params", "stream", "q", "rmse", "recovery_time",
              "failed", "wall_ms"]

ESTIMATOR_KINDS = ("qewa", "dumiqe", "frugal", "ewa_mean", "clairvoyant", "constant")


@dataclass
class BenchRecord:
    estimator: str
    params: dict
    stream: str
    q: float
    rmse: float
    recovery_time: float | None = None
    failed: bool = False
    wall_ms: float = 0.0


@dataclass
class BenchConfig:
    streams: list[StreamSpec]
    estimators: list[dict]
    quantiles: tuple = DEFAULT_QUANTILES
    burn_in: int = 0

    def __post_init__(self):
        if not self.streams:
            raise ValueError("config needs at least one stream")
        if not self.estimators:
            raise ValueError("config needs at least one estimator")
        for q in self.quantiles:
            if not (0.0 < q < 1.0):
                raise ValueError(f"quantile must be in (0, 1), got {q!r}")
        for s in self.streams:
            if self.burn_in >= s.length:
                raise ValueError("burn_in must be smaller than the stream length")


def load_config(path) -> BenchConfig:
    """Read a benchmark configuration from a JSON file.

    Keys are documented in docs/bench-config.md.
    """
    with open(path) as fh:
        raw = json.load(fh)
    n_samples = int(raw.get("n_samples", 10**6))
    streams = []
    for s in raw["streams"]:
        streams.append(StreamSpec(
            family=s["family"],
            dynamics=s["dynamics"],
            a=float(s.get("a", 2.0)),
            b=float(s.get("b", 6.0)),
            period=int(s.get("T", 100)),
            length=int(s.get("N", n_samples)),
            seed=int(s.get("seed", 0)),
        ))
    estimators = raw["estimators"]
    for e in estimators:
        if e.get("kind") not in ESTIMATOR_KINDS:
            raise ValueError(f"unknown estimator kind {e.get('kind')!r}")
    return BenchConfig(
        streams=streams,
        estimators=estimators,
        quantiles=tuple(raw.get("quantiles", DEFAULT_QUANTILES)),
        burn_in=int(raw.get("burn_in", 0)),
    )


def expand_estimators(entries) -> list[tuple[str, dict]]:
    """Expand per-kind parameter grids into concrete (kind, params) variants."""
    variants = []
    for e in entries:
        kind = e["kind"]
        if kind == "qewa":
            lams = e.get("lambda", list(DEFAULT_LAMBDA_GRID))
            ratios = e.get("ratio", [0.01])
            warmup = int(e.get("warmup", 10))
            for lam, ratio in itertools.product(lams, ratios):
                variants.append((kind, {"lambda": float(lam), "ratio": float(ratio),
                                        "warmup": warmup}))
        elif kind == "dumiqe":
            for lam in e.get("lambda", list(DEFAULT_LAMBDA_GRID)):
                variants.append((kind, {"lambda": float(lam)}))
        elif kind == "frugal":
            for step in e.get("step", [0.01, 0.1, 1.0]):
                variants.append((kind, {"step": float(step)}))
        elif kind == "ewa_mean":
            for alpha in e.get("alpha", [0.01, 0.1]):
                variants.append((kind, {"alpha": float(alpha)}))
        elif kind == "clairvoyant":
            variants.append((kind, {}))
        elif kind == "constant":
            for value in e.get("value", [0.0]):
                variants.append((kind, {"value": float(value)}))
        else:
            raise ValueError(f"unknown estimator kind {kind!r}")
    return variants


def run_trace(kind, est_params, q, xs, oracle=None) -> np.ndarray:
    """Per-sample estimate trace for one estimator variant over ``xs``."""
    trace = np.empty(len(xs), dtype=np.float64)
    if kind == "qewa":
        lam = est_params["lambda"]
        gamma = est_params.get("gamma", est_params.get("ratio", 0.01) * lam)
        _kernels.qewa_path(xs, q, lam, gamma, est_params.get("warmup", 10), trace)
    elif kind == "dumiqe":
        _kernels.dumiqe_path(xs, q, est_params["lambda"], trace)
    elif kind == "frugal":
        _kernels.frugal_path(xs, q, est_params["step"], trace,
                             est_params.get("initial"))
    elif kind == "ewa_mean":
        _kernels.ewa_path(xs, est_params["alpha"], trace)
    elif kind == "clairvoyant":
        if oracle is None:
            raise ValueError("clairvoyant estimator needs the oracle trace")
        trace[:] = oracle
    elif kind == "constant":
        trace[:] = est_params["value"]
    else:
        raise ValueError(f"unknown estimator kind {kind!r}")
    return trace


def run_rmse(spec: StreamSpec, kind, est_params, q, burn_in=0,
             xs=None, oracle=None) -> BenchRecord:
    """Feed the whole stream through one estimator variant and score it.

    RMSE is the root mean square of (true quantile - estimate) over all
    steps past ``burn_in``; during estimator warmup the provisional
    estimate (empirical quantile of the buffer) is scored. A non-finite
    trace flags the record failed instead of aborting the sweep.
    """
    t0 = time.perf_counter()
    if xs is None:
        xs = generate(spec)
    if oracle is None:
        oracle = true_quantiles(OracleQuantile(spec, q))
    trace = run_trace(kind, est_params, q, xs, oracle)
    scored = trace[burn_in:]
    ok = bool(np.isfinite(scored).all())
    if ok:
        err = oracle[burn_in:] - scored
        with np.errstate(over="ignore"):
            rmse = float(np.sqrt(np.mean(err * err)))
        ok = math.isfinite(rmse)
    if not ok:
        rmse = math.nan
    wall_ms = (time.perf_counter() - t0) * 1e3
    return BenchRecord(estimator=kind, params=dict(est_params), stream=spec.label(),
                       q=q, rmse=rmse, failed=not ok, wall_ms=wall_ms)


def switch_indices(spec: StreamSpec) -> np.ndarray:
    """0-based indices where a switch stream's parameter jumps."""
    p = params(spec)
    return np.nonzero(p[1:] != p[:-1])[0] + 1


def recovery_time(spec: StreamSpec, kind, est_params, q, delta,
                  xs=None, oracle=None) -> float:
    """Mean number of steps after each switch until the estimate first
    re-enters the ``delta`` band around the true quantile.

    Epochs that never recover before the next switch contribute T/2.
    """
    if spec.dynamics != "switch":
        raise ValueError("recovery_time is defined for switch streams")
    if delta <= 0.0:
        raise ValueError(f"delta must be > 0, got {delta!r}")
    if xs is None:
        xs = generate(spec)
    if oracle is None:
        oracle = true_quantiles(OracleQuantile(spec, q))
    trace = run_trace(kind, est_params, q, xs, oracle)
    inside = np.abs(trace - oracle) <= delta

    switches = switch_indices(spec)
    if len(switches) == 0:
        raise ValueError("stream too short to contain a switch")
    half = spec.period / 2.0
    times = []
    bounds = list(switches) + [len(xs)]
    for k, nxt in zip(switches, bounds[1:]):
        hit = np.nonzero(inside[k:nxt])[0]
        times.append(float(hit[0]) if len(hit) else half)
    return float(np.mean(times))


def _run_task(args):
    spec, kind, est_params, q, burn_in = args
    return run_rmse(spec, kind, est_params, q, burn_in)


def run_sweep(config: BenchConfig, jobs=1) -> list[BenchRecord]:
    """Cartesian product of (stream, estimator variant, quantile).

    Results come back in deterministic configuration order regardless of
    ``jobs``; every estimator of one stream sees the identical sample path.
    """
    variants = expand_estimators(config.estimators)
    tasks = [(spec, kind, est_params, q, config.burn_in)
             for spec in config.streams
             for kind, est_params in variants
             for q in config.quantiles]

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_run_task, tasks, chunksize=8))

    records = []
    cache_spec = None
    xs = None
    oracles: dict = {}
    for spec, kind, est_params, q, burn_in in tasks:
        if spec is not cache_spec:
            cache_spec = spec
            xs = generate(spec)
            oracles = {}
        if q not in oracles:
            oracles[q] = true_quantiles(OracleQuantile(spec, q))
        records.append(run_rmse(spec, kind, est_params, q, burn_in,
                                xs=xs, oracle=oracles[q]))
    return records


def match_dumiqe_lambda(spec_stationary: StreamSpec, q, target_rmse,
                        burn_in, lam_lo=1e-4, lam_hi=0.5, rel_tol=0.01,
                        max_iter=60):
    """Bisect the multiplicative tracker's step size so its stationary RMSE
    matches ``target_rmse`` within ``rel_tol`` (matched-error protocol for
    fair switch-stream comparisons)."""
    xs = generate(spec_stationary)
    oracle = true_quantiles(OracleQuantile(spec_stationary, q))

    def rmse_at(lam):
        return run_rmse(spec_stationary, "dumiqe", {"lambda": lam}, q,
                        burn_in, xs=xs, oracle=oracle).rmse

    lo, hi = lam_lo, lam_hi
    f_lo, f_hi = rmse_at(lo), rmse_at(hi)
    if not (f_lo <= target_rmse <= f_hi):
        raise ValueError(
            f"target RMSE {target_rmse:g} not bracketed by lambda range "
            f"[{lam_lo:g}, {lam_hi:g}] (RMSE {f_lo:g}..{f_hi:g})"
        )
    lam = lo
    for _ in range(max_iter):
        lam = math.sqrt(lo * hi)
        r = rmse_at(lam)
        if abs(r - target_rmse) <= rel_tol * target_rmse:
            return lam
        if r < target_rmse:
            lo = lam
        else:
            hi = lam
    return lam


def format_params(p: dict) -> str:
    parts = []
    for k in sorted(p):
        v = p[k]
        if isinstance(v, float):
            parts.append(f"{k}={v:.17g}")
        else:
            parts.append(f"{k}={v}")
    return ";".join(parts)


def parse_params(s: str) -> dict:
    out: dict = {}
    if not s:
        return out
    for part in s.split(";"):
        k, v = part.split("=", 1)
        try:
            out[k] = int(v)
        except ValueError:
            out[k] = float(v)
    return out


def write_records(records, path) -> None:
    """Write result rows as CSV with the fixed header."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for r in records:
            w.writerow([
                r.estimator,
                format_params(r.params),
                r.stream,
                f"{r.q:.17g}",
                f"{r.rmse:.17g}",
                "" if r.recovery_time is None else f"{r.recovery_time:.17g}",
                int(r.failed),
                f"{r.wall_ms:.17g}",
            ])


def read_records(path) -> list[BenchRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected header {header!r}")
        for row in reader:
            records.append(BenchRecord(
                estimator=row[0],
                params=parse_params(row[1]),
                stream=row[2],
                q=float(row[3]),
                rmse=float(row[4]),
                recovery_time=None if row[5] == "" else float(row[5]),
                failed=bool(int(row[6])),
                wall_ms=float(row[7]),
            ))
    return records
