"""Command-line entry point: sieve / walk / stats / perron / report.

Configuration precedence is defaults < config file (plain ``key=value``
lines, ``#`` comments) < flags, over one flat namespace. All data goes to
stdout-independent files under --out-dir; progress goes to stderr only.
Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, fields

from . import __version__, perron, sieve, stats, walks
from .errors import DomainError
from .io import write_csv, write_json
from .sieve import Kind
from .stats import PhiKind
from .zeta import leading_constant


@dataclass
class RunConfig:
    command: str
    n_max: int = 10**6
    block_len: int = sieve.DEFAULT_BLOCK_LEN
    checkpoint_stride: int = 10**6
    phi: str = "log"
    out_dir: str = "."
    format: str = "both"  # csv, json, both

    def comment(self) -> str:
        cfg = " ".join(f"{f.name}={getattr(self, f.name)}" for f in fields(self))
        return f"summatory-workbench v{__version__} | {cfg}"


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _read_config_file(path: str) -> dict:
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key] = value
    return out


_INT_KEYS = {"n_max", "block_len", "checkpoint_stride", "stride", "lo", "hi", "lag", "window", "workers"}
_FLOAT_KEYS = {"x", "T", "t"}


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    """Fill argparse ``None`` slots from the config file, coercing types."""
    if not getattr(args, "config", None):
        return args
    file_cfg = _read_config_file(args.config)
    for key, value in file_cfg.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr) or getattr(args, attr) is not None:
            continue
        if attr in _INT_KEYS:
            setattr(args, attr, int(value))
        elif attr in _FLOAT_KEYS:
            setattr(args, attr, float(value))
        else:
            setattr(args, attr, value)
    return args


def _apply_defaults(args: argparse.Namespace, defaults: dict) -> None:
    for key, value in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)


def _out(args, name: str) -> str:
    os.makedirs(args.out_dir, exist_ok=True)
    return os.path.join(args.out_dir, name)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_sieve(args) -> int:
    cfg = RunConfig("sieve", n_max=args.hi, block_len=args.block_len, out_dir=args.out_dir, format=args.format)
    rows = []
    for blo, bhi, mu, lam in sieve.iter_mu_lambda_blocks(args.lo, args.hi, args.block_len, args.workers):
        rows.extend(zip(range(blo, bhi), mu.tolist(), lam.tolist()))
    write_csv(_out(args, "sieve.csv"), ["n", "mu", "lambda"], rows, cfg.comment())
    _progress(f"sieve: wrote {len(rows)} rows")
    return 0


def _cmd_walk(args) -> int:
    cfg = RunConfig(
        "walk",
        n_max=args.n_max,
        block_len=args.block_len,
        checkpoint_stride=args.stride,
        out_dir=args.out_dir,
        format=args.format,
    )
    series = walks.accumulate(
        args.n_max,
        args.stride,
        block_len=args.block_len,
        workers=args.workers,
        progress=sys.stderr if args.n_max >= 10**8 else None,
    )
    if cfg.format in ("csv", "both"):
        walks.save_checkpoints(series, _out(args, "checkpoints.csv"), cfg.comment())
    if cfg.format in ("json", "both"):
        write_json(_out(args, "walk_summary.json"), series.summary.to_json_dict(), cfg.comment())
    _progress(f"walk: {len(series)} checkpoints to n={args.n_max}")
    return 0


def _stats_rows(args, cfg: RunConfig) -> tuple[list, list, dict]:
    kind = Kind.parse(args.kind)
    n = args.n_max
    op = args.op
    if op == "distribution":
        dist = stats.value_distribution(kind, n, block_len=args.block_len, workers=args.workers)
        cols = ["kind", "n", "value", "mass"]
        rows = [(kind.value, n, int(v), m) for v, m in zip(dist.support, dist.masses)]
        summary = {"op": op, "kind": kind.value, "n": n, "masses": dict(zip(map(str, map(int, dist.support)), dist.masses))}
    elif op == "moments":
        mom = stats.moments(kind, n, block_len=args.block_len, workers=args.workers)
        cols = ["kind", "n", "mean", "variance"]
        rows = [(kind.value, n, mom.mean, mom.variance)]
        summary = {"op": op, "kind": kind.value, "n": n, "mean": mom.mean, "variance": mom.variance}
    elif op == "charfn":
        val = stats.char_fn(kind, n, args.t, block_len=args.block_len, workers=args.workers)
        cols = ["kind", "n", "t", "re", "im"]
        rows = [(kind.value, n, args.t, val.real, val.imag)]
        summary = {"op": op, "kind": kind.value, "n": n, "t": args.t, "re": val.real, "im": val.imag}
    elif op == "lagcov":
        cov = stats.lag_covariance(kind, n, args.lag, block_len=args.block_len, workers=args.workers)
        cols = ["kind", "n", "h", "cov"]
        rows = [(kind.value, n, cov.h, cov.cov)]
        summary = {"op": op, "kind": kind.value, "n": n, "h": cov.h, "cov": cov.cov}
    elif op == "blocksums":
        samples, ks = stats.block_sums_distribution(kind, n, args.window, block_len=args.block_len, workers=args.workers)
        mean, var = stats.sample_mean_var(samples)
        cols = ["block", "normalized_sum"]
        rows = list(enumerate(samples.tolist()))
        summary = {
            "op": op, "kind": kind.value, "n": n, "window": args.window,
            "blocks": ks.sample_size, "ks_vs_normal": ks.statistic, "mean": mean, "variance": var,
        }
    elif op == "blockscaling":
        windows = [int(w) for w in args.windows.split(",")]
        table = stats.block_scaling(kind, n, windows, block_len=args.block_len, workers=args.workers)
        cols = ["kind", "n", "window", "stddev", "stddev_over_sqrt_w"]
        rows = [(kind.value, n, w, sd, sd / math.sqrt(w)) for w, sd in table]
        summary = {"op": op, "kind": kind.value, "n": n, "rows": [{"window": w, "stddev": sd} for w, sd in table]}
    elif op == "average":
        stride = max(1, n // 1000)
        series = walks.accumulate(n, stride, block_len=args.block_len, workers=args.workers)
        points = [p for p in range(stride * 10, n + 1, max(stride, (n - stride * 10) // 50 // stride * stride or stride))]
        points = sorted({p for p in points if p >= 10} | {n})
        values, fit = stats.average_summatory(series, points)
        cols = ["n", "average_L", "fitted"]
        rows = [(p, a, fit.coefficient * math.sqrt(p)) for p, a in values]
        summary = {
            "op": op, "kind": "liouville", "n": n,
            "fit_coefficient": fit.coefficient, "fit_residual": fit.residual,
            "fit_range": [fit.n_lo, fit.n_hi],
        }
    elif op == "envelope":
        phi = PhiKind.parse(args.phi)
        rep = stats.envelope_check(n, phi, kind, block_len=args.block_len, workers=args.workers)
        cols = ["rank", "n", "ratio"]
        rows = [(i + 1, loc, r) for i, (loc, r) in enumerate(rep.top_ratios)]
        summary = {
            "op": op, "kind": kind.value, "n": n, "phi": phi.value,
            "violations": rep.violations, "violation_locations": rep.violation_locations[:100],
            "top_ratios": [{"n": loc, "ratio": r} for loc, r in rep.top_ratios],
        }
    else:  # pragma: no cover - argparse restricts choices
        raise DomainError(f"unknown stats op {op}")
    return cols, rows, summary


def _cmd_stats(args) -> int:
    cfg = RunConfig(
        "stats",
        n_max=args.n_max,
        block_len=args.block_len,
        phi=args.phi or "log",
        out_dir=args.out_dir,
        format=args.format,
    )
    cols, rows, summary = _stats_rows(args, cfg)
    name = f"stats_{args.op}_{args.kind}"
    if cfg.format in ("csv", "both"):
        write_csv(_out(args, name + ".csv"), cols, rows, cfg.comment())
    if cfg.format in ("json", "both"):
        write_json(_out(args, name + ".json"), summary, cfg.comment())
    _progress(f"stats {args.op}: done (n={args.n_max})")
    return 0


def _target_name(kind: Kind) -> str:
    return "mertens" if kind is Kind.MOBIUS else "liouville"


def _cmd_perron(args) -> int:
    cfg = RunConfig("perron", n_max=int(args.x), out_dir=args.out_dir, format=args.format)
    target = Kind.parse(args.target)
    cols = ["target", "x", "T", "approx", "exact", "abs_error", "evaluations"]
    if args.scan_ts:
        ts_values = [float(v) for v in args.scan_ts.split(",")]
        scan = perron.remainder_scan(target, args.x, ts_values)
        rows = [
            (_target_name(target), args.x, t, r.approx, r.exact, r.abs_error, r.evaluations)
            for (t, _), r in zip(scan.rows, scan.results)
        ]
        summary = {
            "op": "remainder_scan", "target": _target_name(target), "x": args.x,
            "rows": [{"T": t, "abs_error": e} for t, e in scan.rows], "slope": scan.slope,
        }
    else:
        job = perron.PerronJob(x=args.x, big_t=args.T, target=target)
        res = perron.perron_truncated(job)
        rows = [(_target_name(target), args.x, args.T, res.approx, res.exact, res.abs_error, res.evaluations)]
        summary = {
            "op": "perron", "target": _target_name(target), "x": args.x, "T": args.T,
            "approx": res.approx, "exact": res.exact, "abs_error": res.abs_error,
            "rounded_matches": round(res.approx) == res.exact,
        }
    if cfg.format in ("csv", "both"):
        write_csv(_out(args, "perron.csv"), cols, rows, cfg.comment())
    if cfg.format in ("json", "both"):
        write_json(_out(args, "perron.json"), summary, cfg.comment())
    _progress("perron: done")
    return 0


def _cmd_report(args) -> int:
    cfg = RunConfig(
        "report",
        n_max=args.n_max,
        block_len=args.block_len,
        checkpoint_stride=args.stride,
        phi=args.phi or "log",
        out_dir=args.out_dir,
        format=args.format,
    )
    comment = cfg.comment()
    n = args.n_max
    report: dict = {"version": __version__, "n_max": n}
    _progress(f"report: n_max={n}")

    # value distributions and moments for both kinds, from one counts pass each
    dist_rows = []
    mom_rows = []
    for kind in (Kind.MOBIUS, Kind.LIOUVILLE):
        counts = stats.sign_counts(kind, n, block_len=args.block_len, workers=args.workers)
        dist = stats.distribution_from_counts(kind, counts, n)
        mom = stats.moments_from_counts(counts, n)
        dist_rows += [(kind.value, n, int(v), m) for v, m in zip(dist.support, dist.masses)]
        mom_rows.append((kind.value, n, mom.mean, mom.variance))
        report[f"distribution_{kind.value}"] = {str(int(v)): m for v, m in zip(dist.support, dist.masses)}
        report[f"moments_{kind.value}"] = {"mean": mom.mean, "variance": mom.variance}
    write_csv(_out(args, "report_distribution.csv"), ["kind", "n", "value", "mass"], dist_rows, comment)
    write_csv(_out(args, "report_moments.csv"), ["kind", "n", "mean", "variance"], mom_rows, comment)
    _progress("report: distributions done")

    # lag-1 covariance decay over a geometric n ladder
    lag_rows = []
    ladder = [10**k for k in range(4, 12) if 10**k <= n] or [n]
    for kind in (Kind.MOBIUS, Kind.LIOUVILLE):
        for nn in ladder:
            cov = stats.lag_covariance(kind, nn, 1, block_len=args.block_len, workers=args.workers)
            lag_rows.append((kind.value, nn, 1, cov.cov))
    report["lag_covariance"] = [
        {"kind": k, "n": nn, "h": h, "cov": c} for k, nn, h, c in lag_rows
    ]
    write_csv(_out(args, "report_lag_covariance.csv"), ["kind", "n", "h", "cov"], lag_rows, comment)
    _progress("report: lag covariance done")

    # block scaling
    windows = [w for w in (1000, 2000, 4000, 8000) if 100 * w <= n] or [max(100, n // 100)]
    scal_rows = []
    for kind in (Kind.MOBIUS, Kind.LIOUVILLE):
        for w, sd in stats.block_scaling(kind, n, windows, block_len=args.block_len, workers=args.workers):
            scal_rows.append((kind.value, n, w, sd, sd / math.sqrt(w)))
    report["block_scaling"] = [
        {"kind": k, "window": w, "stddev": sd} for k, _, w, sd, _ in scal_rows
    ]
    write_csv(
        _out(args, "report_block_scaling.csv"),
        ["kind", "n", "window", "stddev", "stddev_over_sqrt_w"],
        scal_rows,
        comment,
    )
    _progress("report: block scaling done")

    # walk, average fit, ratio diagnostic
    series = walks.accumulate(n, args.stride, block_len=args.block_len, workers=args.workers)
    walks.save_checkpoints(series, _out(args, "report_checkpoints.csv"), comment)
    report["walk_summary"] = series.summary.to_json_dict()
    sample = sorted({k * args.stride for k in (1, 2, 5, 10, 20, 50, 100, 200, 500, 1000)} & set(range(0, n + 1)))
    sample = [p for p in sample if p >= 10] or [series.n_max]
    values, fit = stats.average_summatory(series, sample)
    write_csv(
        _out(args, "report_average.csv"),
        ["n", "average_L", "fitted"],
        [(p, a, fit.coefficient * math.sqrt(p)) for p, a in values],
        comment,
    )
    report["average_fit"] = {"coefficient": fit.coefficient, "residual": fit.residual, "range": [fit.n_lo, fit.n_hi]}
    ratio = walks.ratio_diagnostic(series, sample)
    write_csv(
        _out(args, "report_ratio.csv"),
        ["x", "max_abs_M", "max_abs_L", "ratio"],
        [(r.x, r.max_abs_m, r.max_abs_l, r.ratio) for r in ratio.rows],
        comment,
    )
    report["ratio_diagnostic"] = [
        {"x": r.x, "max_abs_M": r.max_abs_m, "max_abs_L": r.max_abs_l, "ratio": r.ratio} for r in ratio.rows
    ]
    _progress("report: walk done")

    # envelope
    phi = PhiKind.parse(cfg.phi)
    env_rows = []
    for kind in (Kind.MOBIUS, Kind.LIOUVILLE):
        rep = stats.envelope_check(n, phi, kind, block_len=args.block_len, workers=args.workers)
        env_rows += [(kind.value, phi.value, i + 1, loc, r) for i, (loc, r) in enumerate(rep.top_ratios)]
        report[f"envelope_{kind.value}"] = {"violations": rep.violations, "phi": phi.value}
    write_csv(_out(args, "report_envelope.csv"), ["kind", "phi", "rank", "n", "ratio"], env_rows, comment)
    _progress("report: envelope done")

    # Perron: recovery row and remainder scan at modest scale
    perron_rows = []
    for kind in (Kind.MOBIUS, Kind.LIOUVILLE):
        exact = walks.partial_sums(100)
        exact_v = exact[0] if kind is Kind.MOBIUS else exact[1]
        res = perron.perron_truncated(perron.PerronJob(x=100.5, big_t=1000.0, target=kind), exact=exact_v)
        perron_rows.append((_target_name(kind), 100.5, 1000.0, res.approx, res.exact, res.abs_error, res.evaluations))
        scan = perron.remainder_scan(kind, 1000.5, [250.0, 500.0, 1000.0], exact=walks.partial_sums(1000)[0 if kind is Kind.MOBIUS else 1])
        for (t, _), r in zip(scan.rows, scan.results):
            perron_rows.append((_target_name(kind), 1000.5, t, r.approx, r.exact, r.abs_error, r.evaluations))
        report[f"perron_scan_{_target_name(kind)}"] = {"x": 1000.5, "slope": scan.slope, "rows": [{"T": t, "abs_error": e} for t, e in scan.rows]}
    write_csv(
        _out(args, "report_perron.csv"),
        ["target", "x", "T", "approx", "exact", "abs_error", "evaluations"],
        perron_rows,
        comment,
    )
    report["leading_constant"] = leading_constant()
    write_json(_out(args, "report.json"), report, comment)
    _progress("report: complete")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="summatory",
        description="Workbench for the Mertens and Liouville summatory functions.",
    )
    parser.add_argument("--version", action="version", version=f"summatory-workbench {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value config file (defaults < file < flags)")
        p.add_argument("--out-dir", dest="out_dir", default=None)
        p.add_argument("--format", choices=["csv", "json", "both"], default=None)
        p.add_argument("--block-len", dest="block_len", type=int, default=None)
        p.add_argument("--workers", type=int, default=None, help="sieve worker processes (default 1)")

    p = sub.add_parser("sieve", help="dump mu/lambda over a range as CSV")
    common(p)
    p.add_argument("--lo", type=int, default=None)
    p.add_argument("--hi", type=int, default=None)
    p.add_argument("--kind", default=None, help="unused for the dump; kept for config parity")

    p = sub.add_parser("walk", help="checkpointed M(x), L(x) walk")
    common(p)
    p.add_argument("--n-max", dest="n_max", type=int, default=None)
    p.add_argument("--stride", type=int, default=None)

    p = sub.add_parser("stats", help="distributional statistics")
    common(p)
    p.add_argument("--op", required=True, choices=[
        "distribution", "moments", "charfn", "lagcov", "blocksums", "blockscaling", "average", "envelope",
    ])
    p.add_argument("--kind", default=None)
    p.add_argument("--n-max", dest="n_max", type=int, default=None)
    p.add_argument("--t", type=float, default=None, help="charfn argument")
    p.add_argument("--lag", type=int, default=None)
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--windows", default=None, help="comma list for blockscaling")
    p.add_argument("--phi", choices=["log", "loglog", "sqrt_log"], default=None)

    p = sub.add_parser("perron", help="truncated Perron quadrature")
    common(p)
    p.add_argument("--target", default=None)
    p.add_argument("--x", type=float, default=None)
    p.add_argument("--T", dest="T", type=float, default=None)
    p.add_argument("--scan-ts", dest="scan_ts", default=None, help="comma list of T values for a remainder scan")

    p = sub.add_parser("report", help="full reproduction suite")
    common(p)
    p.add_argument("--n-max", dest="n_max", type=int, default=None)
    p.add_argument("--stride", type=int, default=None)
    p.add_argument("--phi", choices=["log", "loglog", "sqrt_log"], default=None)
    return parser


_DEFAULTS = {
    "sieve": {"lo": 1, "hi": 101, "kind": "mobius"},
    "walk": {"n_max": 10**6, "stride": 10**5},
    "stats": {"kind": "liouville", "n_max": 10**6, "t": 1.0, "lag": 1, "window": 1000,
              "windows": "1000,2000,4000", "phi": "log"},
    "perron": {"target": "mertens", "x": 100.5, "T": 1000.0},
    "report": {"n_max": 10**6, "stride": 10**4, "phi": "log"},
}

_COMMANDS = {
    "sieve": _cmd_sieve,
    "walk": _cmd_walk,
    "stats": _cmd_stats,
    "perron": _cmd_perron,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _merge_config(args)
        _apply_defaults(args, _DEFAULTS.get(args.command, {}))
        _apply_defaults(args, {"out_dir": ".", "format": "both", "block_len": sieve.DEFAULT_BLOCK_LEN, "workers": 1})
        return _COMMANDS[args.command](args)
    except BrokenPipeError:
        return 1
    except Exception as exc:  # runtime failures exit 1, with the reason on stderr
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
