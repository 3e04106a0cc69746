"""Command-line front end for source experiments.

Subcommands
-----------
entropy    block entropies and mean-entropy estimators, CSV/JSON output
hps        high-probability subspace sweep over (n, eps)
theorem1   direct compression experiments (code at rate ~ h + delta)
theorem2   converse experiments (code below h - delta, fidelity capped)
validate   source validity diagnostics

Sources come either from ``--preset`` (``example1``, ``maxmixed(d)``,
``product(p1,...,pk)``) or from ``--source FILE`` holding the JSON source
document.  All runs are deterministic given flags and seed: grid points
execute in a thread pool and output rows are sorted before writing, so
reruns produce byte-identical files.

Exit codes: 0 success, 1 exact-inequality self-check failure (an
implementation bug, not a physics result), 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cache import cached_eig_fn
from .coding import (
    RankUnderflow,
    converse_coding_experiment,
    direct_coding_experiment,
    high_prob_subspace,
)
from .entropy import mean_entropy_trace
from .linalg import hermitian_eig
from .sources import (
    DEFAULT_SIZE_CAP,
    DensityMatrix,
    SizeCapExceeded,
    SourceModel,
    correlated_source,
    example1_source,
    maximally_mixed_source,
    product_source,
    source_fingerprint,
    source_from_json,
    validate_source,
)

__all__ = ["main"]

_MAX_WORKERS = 4


class ConfigError(ValueError):
    """Bad flags, presets or input files; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    """Resolved run parameters shared by all subcommands."""

    source: SourceModel
    out: Path | None
    cache_dir: Path | None
    size_cap: int
    out_format: str

    def eig_fn(self):
        if self.cache_dir is None:
            return None
        return cached_eig_fn(self.source, self.cache_dir, size_cap=self.size_cap)


_PRESET_RE = re.compile(r"^([a-z0-9_]+)(?:\(([^)]*)\))?$")


def _parse_preset(text: str) -> SourceModel:
    match = _PRESET_RE.match(text.strip())
    if not match:
        raise ConfigError(f"cannot parse preset {text!r}")
    name, args = match.group(1), match.group(2)
    if name == "example1":
        if args:
            raise ConfigError("preset example1 takes no arguments")
        return correlated_source(example1_source())
    if name == "maxmixed":
        if not args:
            raise ConfigError("preset maxmixed needs a dimension, e.g. maxmixed(3)")
        d = int(args)
        if d < 2:
            raise ConfigError(f"maxmixed dimension must be >= 2, got {d}")
        return maximally_mixed_source(d)
    if name == "product":
        if not args:
            raise ConfigError(
                "preset product needs diagonal weights, e.g. product(0.7,0.3)"
            )
        weights = np.array([float(x) for x in args.split(",")])
        if weights.size < 2 or (weights < 0).any() or abs(weights.sum() - 1.0) > 1e-9:
            raise ConfigError(
                "product weights must be >= 2 nonnegative numbers summing to 1"
            )
        return product_source(np.diag(weights).astype(complex))
    raise ConfigError(f"unknown preset {name!r}")


def _resolve_source(args) -> SourceModel:
    preset = getattr(args, "preset", None)
    source_path = getattr(args, "source", None)
    if (preset is None) == (source_path is None):
        raise ConfigError("exactly one of --preset or --source is required")
    if preset is not None:
        return _parse_preset(preset)
    path = Path(source_path)
    if not path.exists():
        raise ConfigError(f"source file not found: {path}")
    try:
        return source_from_json(path.read_text())
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"cannot load source from {path}: {exc}") from exc


def _make_config(args, out_required: bool = True) -> RunConfig:
    out = getattr(args, "out", None)
    if out is None and out_required:
        raise ConfigError("--out is required for this command")
    return RunConfig(
        source=_resolve_source(args),
        out=Path(out) if out else None,
        cache_dir=Path(args.cache_dir) if getattr(args, "cache_dir", None) else None,
        size_cap=args.cap,
        out_format=getattr(args, "format", "csv"),
    )


def _write_text(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _json_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def cmd_entropy(args) -> int:
    cfg = _make_config(args)
    trace = mean_entropy_trace(
        cfg.source, args.n_max, size_cap=cfg.size_cap, eig_fn=cfg.eig_fn()
    )
    if cfg.out_format == "json":
        payload = {
            "rows": [
                {
                    "n": int(trace.n[i]),
                    "S": trace.entropy[i],
                    "S_over_n": trace.per_site[i],
                    "increment": trace.increment[i],
                }
                for i in range(len(trace.n))
            ],
            "h_hat_ratio": trace.h_hat_ratio,
            "h_hat_increment": trace.h_hat_increment,
            "estimator_gap": trace.estimator_gap,
        }
        _write_text(cfg.out, _json_dumps(payload))
    else:
        _write_text(cfg.out, trace.to_csv())
    print(
        f"mean entropy estimates (nats/site): ratio-min {trace.h_hat_ratio:.9f}, "
        f"last-increment {trace.h_hat_increment:.9f}, gap {trace.estimator_gap:.3e}"
    )
    print(f"wrote {len(trace.n)} rows to {cfg.out}")
    return 0


def cmd_hps(args) -> int:
    cfg = _make_config(args)
    eps_list = args.eps
    eig_fn = cfg.eig_fn()
    rows = []
    for n in range(1, args.n_max + 1):
        block = cfg.source.density(n, size_cap=cfg.size_cap)
        eigen = eig_fn(n, block.matrix) if eig_fn else hermitian_eig(block.matrix, check=False)
        for eps in eps_list:
            hp = high_prob_subspace(block, eps, eigen=eigen)
            rows.append(
                {
                    "n": n,
                    "eps": eps,
                    "dim": hp.dim,
                    "log_dim_per_site": hp.log_dim / n,
                    "captured_weight": hp.captured_weight,
                }
            )
    rows.sort(key=lambda r: (r["n"], r["eps"]))
    if cfg.out_format == "json":
        _write_text(cfg.out, _json_dumps(rows))
    else:
        lines = ["n,eps,dim,log_dim_per_site,captured_weight"]
        for r in rows:
            lines.append(
                f"{r['n']},{r['eps']:.17g},{r['dim']},"
                f"{r['log_dim_per_site']:.17g},{r['captured_weight']:.17g}"
            )
        _write_text(cfg.out, "\n".join(lines) + "\n")
    print(f"wrote {len(rows)} rows to {cfg.out}")
    return 0


def _run_grid(points, worker):
    """Evaluate worker over grid points in a thread pool; order-preserving."""
    if len(points) == 1:
        return [worker(points[0])]
    with ThreadPoolExecutor(max_workers=min(_MAX_WORKERS, len(points))) as pool:
        return list(pool.map(worker, points))


def _write_reports(cfg: RunConfig, reports) -> int:
    base = cfg.out
    if base.suffix in (".json", ".csv"):
        base = base.with_suffix("")
    json_path = base.with_suffix(".json")
    csv_path = base.with_suffix(".csv")
    _write_text(json_path, _json_dumps([r.to_dict() for r in reports]))
    header = reports[0].CSV_HEADER
    _write_text(csv_path, "\n".join([header] + [r.csv_row() for r in reports]) + "\n")
    failures = 0
    for r in reports:
        status = "ok" if r.all_exact_ok else "EXACT-CHECK FAILED"
        extra = (
            f"F={r.fidelity:.6f} >= {1 - r.eps:.6f}"
            if r.kind == "direct"
            else f"max F'={r.fidelity_sqrt:.6f} <= sqrt(eta)={r.upper_bound:.6f}"
        )
        print(
            f"{r.kind} n={r.n} delta={r.delta} seed={r.seed}: rate={r.rate:.6f} "
            f"{extra} [{status}]"
        )
        failures += 0 if r.all_exact_ok else 1
    print(f"wrote {json_path} and {csv_path}")
    if failures:
        print(
            f"{failures} report(s) violated an exact inequality; "
            "this indicates an implementation bug",
            file=sys.stderr,
        )
        return 1
    return 0


def cmd_theorem1(args) -> int:
    cfg = _make_config(args)

    def worker(point):
        n, eps = point
        return direct_coding_experiment(
            cfg.source,
            n,
            eps,
            args.delta,
            mixer_seed=args.seed,
            size_cap=cfg.size_cap,
            eig_fn=cfg.eig_fn(),
        )

    points = sorted((n, eps) for n in args.n for eps in args.eps)
    reports = _run_grid(points, worker)
    return _write_reports(cfg, reports)


def cmd_theorem2(args) -> int:
    cfg = _make_config(args)

    def worker(n):
        return converse_coding_experiment(
            cfg.source,
            n,
            args.delta,
            trials=args.trials,
            seed=args.seed,
            size_cap=cfg.size_cap,
            eig_fn=cfg.eig_fn(),
        )

    points = sorted(args.n)
    try:
        reports = _run_grid(points, worker)
    except RankUnderflow as exc:
        raise ConfigError(str(exc)) from exc
    return _write_reports(cfg, reports)


def cmd_validate(args) -> int:
    cfg = _make_config(args, out_required=False)
    source = cfg.source
    print(f"source fingerprint: {source_fingerprint(source)}")
    if source.kind == "finitely_correlated":
        report = validate_source(source.payload)
        for line in report.lines():
            print(line)
        return 0 if report.all_ok else 1
    res = DensityMatrix(
        site_dim=source.site_dim, n_sites=1, matrix=source.payload
    ).residuals()
    ok = (
        res["hermiticity"] <= 1e-9
        and res["min_eigenvalue"] >= -1e-9
        and res["trace_error"] <= 1e-9
    )
    print(
        f"single-site density {'pass' if ok else 'FAIL'}  "
        f"herm {res['hermiticity']:.3e}  min eig {res['min_eigenvalue']:.3e}  "
        f"trace err {res['trace_error']:.3e}"
    )
    return 0 if ok else 1


def _add_source_flags(parser):
    parser.add_argument("--preset", help="built-in source, e.g. example1, maxmixed(3), product(0.7,0.3)")
    parser.add_argument("--source", help="path to a JSON source document")


def _add_common_flags(parser, with_format: bool = True):
    parser.add_argument("--out", help="output file path")
    parser.add_argument("--cache-dir", help="directory for eigendecomposition cache")
    parser.add_argument(
        "--cap",
        type=int,
        default=DEFAULT_SIZE_CAP,
        help=f"block dimension cap (default {DEFAULT_SIZE_CAP})",
    )
    if with_format:
        parser.add_argument(
            "--format",
            choices=("csv", "json"),
            default="csv",
            help="output format (default csv)",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsource",
        description="Stationary quantum source experiments: entropy rates, "
        "high-probability subspaces and block-coding fidelity.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="block entropies and mean-entropy estimators")
    _add_source_flags(p)
    p.add_argument("--n-max", type=int, required=True, help="largest block length")
    _add_common_flags(p)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("hps", help="high-probability subspace sweep")
    _add_source_flags(p)
    p.add_argument("--n-max", type=int, required=True, help="largest block length")
    p.add_argument(
        "--eps",
        type=float,
        action="append",
        required=True,
        help="subspace level; repeat for a sweep",
    )
    _add_common_flags(p)
    p.set_defaults(func=cmd_hps)

    p = sub.add_parser("theorem1", help="direct compression experiments")
    _add_source_flags(p)
    p.add_argument("--n", type=int, action="append", required=True, help="block length; repeatable")
    p.add_argument("--eps", type=float, action="append", required=True, help="fidelity target 1-eps; repeatable")
    p.add_argument("--delta", type=float, required=True, help="rate slack above the entropy estimate")
    p.add_argument("--seed", type=int, default=0, help="mixer seed (default 0)")
    _add_common_flags(p, with_format=False)
    p.set_defaults(func=cmd_theorem1)

    p = sub.add_parser("theorem2", help="converse bound experiments")
    _add_source_flags(p)
    p.add_argument("--n", type=int, action="append", required=True, help="block length; repeatable")
    p.add_argument("--delta", type=float, required=True, help="rate deficit below the entropy estimate")
    p.add_argument("--trials", type=int, default=8, help="subspace/ensemble trials (default 8)")
    p.add_argument("--seed", type=int, default=0, help="trial seed (default 0)")
    _add_common_flags(p, with_format=False)
    p.set_defaults(func=cmd_theorem2)

    p = sub.add_parser("validate", help="source validity diagnostics")
    _add_source_flags(p)
    _add_common_flags(p, with_format=False)
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SizeCapExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
