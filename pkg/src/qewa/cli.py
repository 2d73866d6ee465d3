"""Command-line interface.

Subcommands: ``gen`` (emit a synthetic stream as CSV), ``track`` (run one
estimator over numbers from a file or stdin), ``bench`` (run a configured
RMSE sweep), ``drift`` (quantile-threshold drift detection on an error
stream).

Exit codes: 0 success, 1 runtime/IO error, 2 usage error, 3 drift events
emitted under ``--fail-on-event``. All floats print with 17 significant
digits so identical invocations are byte-identical.
"""

import argparse
import sys

from . import bench as bench_mod
from . import drift as drift_mod
from .estimators import DumiqeEstimator, EwaMean, FrugalEstimator, QewaEstimator
from .streams import OracleQuantile, StreamSpec, generate, true_quantiles

GEN_QUANTILES = (0.5, 0.7, 0.9)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qewa",
                                description="streaming quantile tracking toolkit")
    p.add_argument("--verbose", action="store_true", help="chatty progress output")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic stream as CSV")
    g.add_argument("--family", required=True, choices=["normal", "chi_squared"])
    g.add_argument("--dynamics", required=True,
                   choices=["periodic", "switch", "stationary"])
    g.add_argument("--a", type=float, default=2.0)
    g.add_argument("--b", type=float, default=6.0)
    g.add_argument("--T", type=int, default=100)
    g.add_argument("--N", type=int, default=1000)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default="-", help="output path, - for stdout")

    t = sub.add_parser("track", help="run one estimator over a number stream")
    t.add_argument("--estimator", required=True,
                   choices=["qewa", "dumiqe", "frugal", "ewa-mean"])
    t.add_argument("--q", type=float, default=0.5)
    t.add_argument("--lambda", dest="lam", type=float, default=0.01)
    t.add_argument("--ratio", type=float, default=0.01,
                   help="conditional-mean rate as a fraction of lambda")
    t.add_argument("--warmup", type=int, default=10)
    t.add_argument("--step", type=float, default=0.1)
    t.add_argument("--alpha", type=float, default=0.1)
    t.add_argument("--input", default="-", help="input path, - for stdin")
    t.add_argument("--column", default=None,
                   help="read this CSV column instead of bare numbers")
    t.add_argument("--out", default="-")

    b = sub.add_parser("bench", help="run a configured RMSE sweep")
    b.add_argument("--config", required=True, help="JSON config, see docs/bench-config.md")
    b.add_argument("--out", required=True, help="records CSV output path")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--timing", action="store_true",
                   help="record wall-clock times (off by default so identical "
                        "invocations stay byte-identical)")

    d = sub.add_parser("drift", help="quantile-threshold drift detection")
    d.add_argument("--q", type=float, default=0.8)
    d.add_argument("--threshold", type=float, default=2.0)
    d.add_argument("--lambda", dest="lam", type=float, default=0.05)
    d.add_argument("--ratio", type=float, default=0.01)
    d.add_argument("--warmup", type=int, default=96)
    d.add_argument("--input", required=True, help="error stream path, - for stdin")
    d.add_argument("--column", default=None)
    d.add_argument("--trace-out", default=None)
    d.add_argument("--events-out", default=None)
    d.add_argument("--no-reset", action="store_true",
                   help="do not re-enter warmup after an event")
    d.add_argument("--fail-on-event", action="store_true",
                   help="exit 3 if any event fired")
    return p


def _open_out(path):
    if path == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


def cmd_gen(args) -> int:
    try:
        spec = StreamSpec(family=args.family, dynamics=args.dynamics, a=args.a,
                          b=args.b, period=args.T, length=args.N, seed=args.seed)
    except ValueError as exc:
        print(f"qewa gen: {exc}", file=sys.stderr)
        return 2
    xs = generate(spec)
    oracles = [true_quantiles(OracleQuantile(spec, q)) for q in GEN_QUANTILES]
    fh, close = _open_out(args.out)
    try:
        fh.write("n,x,true_q50,true_q70,true_q90\n")
        for i in range(spec.length):
            fh.write(f"{i + 1},{_fmt(xs[i])},{_fmt(oracles[0][i])},"
                     f"{_fmt(oracles[1][i])},{_fmt(oracles[2][i])}\n")
    except OSError as exc:
        print(f"qewa gen: {exc}", file=sys.stderr)
        return 1
    finally:
        if close:
            fh.close()
    return 0


def _make_tracker(args):
    if args.estimator == "qewa":
        return QewaEstimator(q=args.q, lam=args.lam, gamma=args.ratio * args.lam,
                             warmup=args.warmup)
    if args.estimator == "dumiqe":
        return DumiqeEstimator(q=args.q, lam=args.lam)
    if args.estimator == "frugal":
        return FrugalEstimator(q=args.q, step=args.step)
    return EwaMean(alpha=args.alpha)


def _iter_numbers(fh, column, name):
    if column is not None:
        import csv

        reader = csv.DictReader(fh)
        if reader.fieldnames is None or column not in reader.fieldnames:
            raise ValueError(f"{name}: column {column!r} not found")
        for lineno, row in enumerate(reader, start=2):
            try:
                yield float(row[column])
            except (TypeError, ValueError):
                raise ValueError(
                    f"{name}:{lineno}: cannot parse {row.get(column)!r}"
                ) from None
    else:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield float(line)
            except ValueError:
                raise ValueError(f"{name}:{lineno}: cannot parse {line!r}") from None


def cmd_track(args) -> int:
    try:
        tracker = _make_tracker(args)
    except ValueError as exc:
        print(f"qewa track: {exc}", file=sys.stderr)
        return 2
    if args.input == "-":
        in_fh = sys.stdin
        in_name = "<stdin>"
    else:
        try:
            in_fh = open(args.input, newline="")
        except OSError as exc:
            print(f"qewa track: {exc}", file=sys.stderr)
            return 1
        in_name = args.input
    out_fh, close_out = _open_out(args.out)
    try:
        out_fh.write("n,x,q_hat\n")
        for n, x in enumerate(_iter_numbers(in_fh, args.column, in_name), start=1):
            tracker.observe(x)
            est = _fmt(tracker.estimate()) if tracker.ready else ""
            out_fh.write(f"{n},{_fmt(x)},{est}\n")
    except ValueError as exc:
        print(f"qewa track: {exc}", file=sys.stderr)
        return 1
    finally:
        if close_out:
            out_fh.close()
        if in_fh is not sys.stdin:
            in_fh.close()
    return 0


def cmd_bench(args) -> int:
    try:
        config = bench_mod.load_config(args.config)
    except FileNotFoundError as exc:
        print(f"qewa bench: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, TypeError) as exc:
        print(f"qewa bench: bad config: {exc}", file=sys.stderr)
        return 2
    records = bench_mod.run_sweep(config, jobs=max(1, args.jobs))
    if not args.timing:
        for r in records:
            r.wall_ms = 0.0
    try:
        bench_mod.write_records(records, args.out)
    except OSError as exc:
        print(f"qewa bench: {exc}", file=sys.stderr)
        return 1
    for spec in config.streams:
        label = spec.label()
        mine = [r for r in records if r.stream == label]
        ok = [r for r in mine if not r.failed]
        best = min(ok, key=lambda r: r.rmse) if ok else None
        n_failed = sum(r.failed for r in mine)
        if best is not None:
            print(f"{label}: {len(mine)} records, {n_failed} failed, "
                  f"best rmse {best.rmse:.6g} "
                  f"({best.estimator} {bench_mod.format_params(best.params)} "
                  f"q={best.q:g})")
        else:
            print(f"{label}: {len(mine)} records, all failed")
    return 0


def cmd_drift(args) -> int:
    try:
        config = drift_mod.DriftConfig(
            q=args.q, threshold=args.threshold, warmup_samples=args.warmup,
            lam=args.lam, gamma=args.ratio * args.lam,
            reset_on_event=not args.no_reset,
        )
    except ValueError as exc:
        print(f"qewa drift: {exc}", file=sys.stderr)
        return 2
    try:
        if args.input == "-":
            values = _iter_numbers(sys.stdin, args.column, "<stdin>")
            events, trace = drift_mod.run_drift_stream(values, config)
        else:
            events, trace = drift_mod.run_drift_file(args.input, config,
                                                     column=args.column)
    except FileNotFoundError as exc:
        print(f"qewa drift: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"qewa drift: {exc}", file=sys.stderr)
        return 1
    try:
        if args.trace_out:
            drift_mod.write_trace(trace, args.trace_out)
        if args.events_out:
            drift_mod.write_events(events, args.events_out)
    except OSError as exc:
        print(f"qewa drift: {exc}", file=sys.stderr)
        return 1
    if args.verbose or not (args.trace_out or args.events_out):
        for e in events:
            print(f"event at n={e.sample_index}: quantile estimate "
                  f"{e.quantile_estimate:.6g} > threshold {e.threshold:g}")
    if args.fail_on_event and events:
        return 3
    return 0


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    if args.command == "gen":
        return cmd_gen(args)
    if args.command == "track":
        return cmd_track(args)
    if args.command == "bench":
        return cmd_bench(args)
    return cmd_drift(args)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
