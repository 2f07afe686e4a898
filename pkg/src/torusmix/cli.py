"""Command-line harness: simulate | sweep | analyze | certify | scalecheck.

Configuration is plain JSON (see README for the schema); every key can be
overridden by a flag. Exit codes: 0 success, 2 configuration/input error,
3 runtime numerical failure. Outputs are files; each output directory gets a
manifest.json recording the configuration hash and package versions, and in
deterministic (serial) mode repeated invocations produce byte-identical CSVs.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    fit_decay_rate,
    fit_envelope,
    rate_vs_parameter,
    scaling_check,
    scaling_fixture,
)
from .errors import ConfigError, InsufficientDataError, TorusmixError
from .fieldio import load_field, save_field, save_heatmap, save_mask_png
from .figures import (
    plot_envelope,
    plot_log_mix_norm_curves,
    plot_mix_norm_curves,
    plot_rate_vs_parameter,
)
from .mixedness import h_neg1_certificate, is_mixed, mixing_scale_scan, super_level_set
from .norms import MixTimeSeries
from .solver import DEFAULT_SNAPSHOT_TIMES, SolverConfig, run
from .spectral import GridSpec

DEFAULT_A_LIST = tuple(Fraction(k, 12) for k in range(6, 12))

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


@dataclass
class ExperimentConfig:
    """Everything the CLI needs for one invocation."""

    n: int = 256
    dim: int = 2
    t_final: float = 5.0
    cfl: float = 0.5
    a: float = 11.0 / 12.0
    a_list: tuple = tuple(float(f) for f in DEFAULT_A_LIST)
    snapshot_times: tuple = DEFAULT_SNAPSHOT_TIMES
    p_list: tuple = (1.0, 2.0)
    outdir: str = "torusmix_out"
    workers: int = 0  # 0 = one per sweep member, capped by cpu/env
    serial: bool = False
    seed: int = 0
    dealias: bool = True
    degeneracy_floor: float = 1e-10
    stop_at_spectral_fill: bool = True
    fill_threshold: float = 0.01

    def validate(self):
        for a in (self.a, *self.a_list):
            if not (0.0 < a <= 1.0):
                raise ConfigError(f"a values must lie in (0, 1], got {a}")
        if not self.a_list:
            raise ConfigError("a_list must be nonempty")
        self.solver_config(self.a).validate()
        return self

    def solver_config(self, a=None) -> SolverConfig:
        return SolverConfig(
            n=self.n,
            dim=self.dim,
            t_final=self.t_final,
            cfl=self.cfl,
            snapshot_times=tuple(self.snapshot_times),
            p_list=tuple(self.p_list),
            dealias_products=self.dealias,
            degeneracy_floor=self.degeneracy_floor,
            stop_at_spectral_fill=self.stop_at_spectral_fill,
            fill_threshold=self.fill_threshold,
        )

    def effective_workers(self, njobs: int) -> int:
        if self.serial:
            return 1
        cap = int(os.environ.get("TORUSMIX_MAX_WORKERS", os.cpu_count() or 1))
        want = self.workers if self.workers > 0 else njobs
        return max(1, min(want, njobs, cap))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "dim": self.dim,
            "t_final": self.t_final,
            "cfl": self.cfl,
            "a": self.a,
            "a_list": list(self.a_list),
            "snapshot_times": list(self.snapshot_times),
            "p_list": list(self.p_list),
            "outdir": self.outdir,
            "workers": self.workers,
            "serial": self.serial,
            "seed": self.seed,
            "dealias": self.dealias,
            "degeneracy_floor": self.degeneracy_floor,
            "stop_at_spectral_fill": self.stop_at_spectral_fill,
            "fill_threshold": self.fill_threshold,
        }


def _parse_a(text: str) -> float:
    """Accept decimals or fractions like 11/12."""
    return float(Fraction(text))


def load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if getattr(args, "config", None):
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        known = set(cfg.to_dict())
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key, val in raw.items():
            if key in ("a_list", "snapshot_times", "p_list"):
                val = tuple(
                    _parse_a(v) if isinstance(v, str) else float(v) for v in val
                )
            if key == "a" and isinstance(val, str):
                val = _parse_a(val)
            setattr(cfg, key, val)
    override_keys = [
        "n", "t_final", "cfl", "outdir", "workers", "seed",
        "degeneracy_floor", "fill_threshold",
    ]
    for key in override_keys:
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    if getattr(args, "a", None) is not None:
        cfg.a = _parse_a(args.a)
    if getattr(args, "a_list", None) is not None:
        cfg.a_list = tuple(_parse_a(tok) for tok in args.a_list.split(","))
    if getattr(args, "snapshot_times", None) is not None:
        cfg.snapshot_times = tuple(
            float(tok) for tok in args.snapshot_times.split(",") if tok
        )
    if getattr(args, "serial", False):
        cfg.serial = True
    if getattr(args, "no_stop_at_fill", False):
        cfg.stop_at_spectral_fill = False
    return cfg.validate()


# ---------------------------------------------------------------------------
# Output plumbing


def _config_hash(payload: dict) -> str:
    canon = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(canon).hexdigest()


def _write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def write_manifest(outdir: Path, config_payload: dict, files: list) -> None:
    _write_json(
        outdir / "manifest.json",
        {
            "config_hash": _config_hash(config_payload),
            "config": config_payload,
            "files": sorted(files),
            "versions": {"torusmix": __version__, "numpy": np.__version__},
        },
    )


def _execute_run(cfg: ExperimentConfig, a: float, outdir: Path) -> dict:
    """Run one simulation and write its artifacts; returns the summary."""
    outdir.mkdir(parents=True, exist_ok=True)
    result = run(cfg.solver_config(a), a)
    files = ["timeseries.csv", "summary.json"]
    result.series.to_csv(outdir / "timeseries.csv")
    vmax = float(np.abs(result.snapshots[0][1].values).max()) if result.snapshots else 1.0
    for t, snap in result.snapshots:
        stem = f"snapshot_t{t:.4f}"
        save_field(outdir / f"{stem}.tmf", snap, time=t)
        save_heatmap(outdir / f"{stem}.png", snap, vmax=vmax, title=f"t = {t:g}")
        files += [f"{stem}.tmf", f"{stem}.png"]
    summary = dict(result.summary)
    summary["a"] = a
    _write_json(outdir / "summary.json", summary)
    payload = dict(cfg.to_dict())
    payload["a"] = a
    write_manifest(outdir, payload, files + ["manifest.json"])
    return summary


# ---------------------------------------------------------------------------
# Subcommands


def cmd_simulate(args) -> int:
    cfg = load_config(args)
    outdir = Path(cfg.outdir)
    summary = _execute_run(cfg, cfg.a, outdir)
    print(f"simulate: a={cfg.a:g} n={cfg.n} -> {outdir}")
    print(
        f"  final t={summary['final_time']:g} steps={summary['n_steps']} "
        f"fill={summary['spectral_fill_time']}"
    )
    return EXIT_OK


def _sweep_member(payload):
    cfg_dict, a, outdir = payload
    cfg = ExperimentConfig(**cfg_dict)
    return a, _execute_run(cfg, a, Path(outdir))


def cmd_sweep(args) -> int:
    cfg = load_config(args)
    outdir = Path(cfg.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    jobs = []
    for a in cfg.a_list:
        rundir = outdir / f"a_{a:.4f}"
        jobs.append((cfg.to_dict(), a, str(rundir)))
    workers = cfg.effective_workers(len(jobs))
    failures = {}
    summaries = {}
    if workers == 1:
        for job in jobs:
            try:
                a, summary = _sweep_member(job)
                summaries[a] = summary
            except Exception as exc:  # keep the sweep going
                failures[job[1]] = f"{type(exc).__name__}: {exc}"
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            futs = {pool.submit(_sweep_member, job): job[1] for job in jobs}
            for fut in concurrent.futures.as_completed(futs):
                a = futs[fut]
                try:
                    _, summary = fut.result()
                    summaries[a] = summary
                except Exception as exc:
                    failures[a] = f"{type(exc).__name__}: {exc}"
    for a, msg in sorted(failures.items()):
        print(f"sweep member a={a:g} FAILED: {msg}", file=sys.stderr)

    files = []
    fits = []
    curves = []
    for a in sorted(summaries):
        rundir = outdir / f"a_{a:.4f}"
        series = MixTimeSeries.read_csv(rundir / "timeseries.csv")
        fill = summaries[a]["spectral_fill_time"]
        t_hi = min(cfg.t_final, fill if fill is not None else cfg.t_final)
        # settle for one time unit before fitting; short runs fit what they have
        t_lo = 1.0 if t_hi > 1.2 else t_hi / 5.0
        try:
            fits.append((a, fit_decay_rate(series, (t_lo, t_hi))))
        except InsufficientDataError as exc:
            print(f"sweep member a={a:g}: rate fit skipped ({exc})", file=sys.stderr)
        curves.append((f"a={a:g}", series))

    table = rate_vs_parameter(fits)
    with open(outdir / "rates.csv", "w", encoding="utf-8") as fh:
        fh.write("a,slope,intercept,r_squared,rate_reciprocal\n")
        for row in table.rows():
            fh.write(",".join(repr(x) for x in row) + "\n")
    files.append("rates.csv")
    if curves:
        plot_mix_norm_curves(outdir / "mix_norm_vs_t.png", curves)
        plot_log_mix_norm_curves(outdir / "log_mix_norm_vs_t.png", curves)
        files += ["mix_norm_vs_t.png", "log_mix_norm_vs_t.png"]
    if table.degenerate:
        print("sweep: rate-vs-a fit degenerate (fewer than 2 members)")
    else:
        plot_rate_vs_parameter(outdir / "rate_vs_a.png", table)
        files.append("rate_vs_a.png")
        print(
            f"sweep: rate-vs-a linear fit slope={table.slope:.4f} "
            f"R^2={table.r_squared:.4f}"
        )
    write_manifest(outdir, cfg.to_dict(), files + ["manifest.json"])
    if failures:
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_analyze(args) -> int:
    rundir = Path(args.rundir)
    csv_path = rundir / "timeseries.csv"
    if not csv_path.exists():
        raise ConfigError(f"no timeseries.csv under {rundir}")
    series = MixTimeSeries.read_csv(csv_path)
    summary = {}
    summary_path = rundir / "summary.json"
    if summary_path.exists():
        summary = json.loads(summary_path.read_text())
    fill = summary.get("spectral_fill_time")
    t_max = series.time[-1]
    t0 = args.window_start if args.window_start is not None else 1.0
    t1 = args.window_end
    if t1 is None:
        t1 = min(t_max, fill) if fill is not None else t_max
    fit = fit_decay_rate(series, (t0, t1))
    env = fit_envelope(series, args.p, (t0, t1))
    outdir = Path(args.outdir) if args.outdir else rundir
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "rate_fit.csv", "w", encoding="utf-8") as fh:
        fh.write("t0,t1,slope,intercept,r_squared,rate_reciprocal,n_samples\n")
        fh.write(
            ",".join(
                repr(x)
                for x in (
                    fit.t0, fit.t1, fit.slope, fit.intercept,
                    fit.r_squared, fit.rate_reciprocal, fit.n_samples,
                )
            )
            + "\n"
        )
    plot_envelope(outdir / "envelope.png", series, env)
    _write_json(
        outdir / "analysis.json",
        {
            "rate_fit": {
                "t0": fit.t0, "t1": fit.t1, "slope": fit.slope,
                "intercept": fit.intercept, "r_squared": fit.r_squared,
                "rate_reciprocal": fit.rate_reciprocal,
            },
            "envelope": {
                "p": env.p, "prefactor": env.prefactor,
                "rate_coeff": env.rate_coeff, "holds": env.holds,
                "margin": env.margin,
            },
        },
    )
    print(
        f"analyze: slope={fit.slope:.4f} R^2={fit.r_squared:.4f} "
        f"envelope holds={env.holds}"
    )
    return EXIT_OK


def cmd_certify(args) -> int:
    try:
        field_obj, _t = load_field(args.field)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read field file {args.field}: {exc}") from exc
    mask = super_level_set(field_obj, args.level)
    deltas = [float(tok) for tok in args.deltas.split(",")]
    scan = mixing_scale_scan(mask, args.kappa, deltas)
    reports = [is_mixed(mask, d, args.kappa) for d in deltas]
    certs = []
    for d in deltas:
        rep = next(r for r in reports if r.delta == d)
        eps = args.eps
        if d * (1 + eps) <= 0.5:
            cert = h_neg1_certificate(
                field_obj.without_mean(), rep.worst_center, d, eps
            )
            certs.append({"delta": d, "center": rep.worst_center, "value": cert})
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    payload = {
        "field": str(args.field),
        "level": args.level,
        "kappa": args.kappa,
        "mask_measure": mask.measure,
        "reports": [json.loads(r.to_json()) for r in reports],
        "scan": json.loads(scan.to_json()),
        "certificates": certs,
    }
    _write_json(outdir / "certify.json", payload)
    save_mask_png(outdir / "mask.png", mask.indicator)
    write_manifest(
        outdir,
        {"field": str(args.field), "level": args.level, "kappa": args.kappa,
         "deltas": deltas, "eps": args.eps},
        ["certify.json", "mask.png", "manifest.json"],
    )
    print(
        f"certify: measure={mask.measure:.4f} "
        f"semi-mixing scale={scan.semi_mixing_scale} r0 proxy={scan.r0_proxy}"
    )
    return EXIT_OK


def cmd_scalecheck(args) -> int:
    if not (0.0 < args.a <= 1.0):
        raise ConfigError(f"a must lie in (0, 1], got {args.a}")
    grid = GridSpec(args.n, 2)
    theta, u = scaling_fixture(grid, args.a)
    report = scaling_check(theta, u, args.a, p=args.p)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    _write_json(outdir / "scalecheck.json", report.to_dict())
    write_manifest(
        outdir,
        {"a": args.a, "n": args.n, "p": args.p},
        ["scalecheck.json", "manifest.json"],
    )
    print(
        f"scalecheck: a={args.a:g} n={args.n} "
        f"mix mismatch={report.mix_norm_mismatch:.3e} "
        f"grad mismatch={report.grad_norm_mismatch:.3e}"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torusmix",
        description="Optimal mixing of a passive scalar on the torus.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--n", type=int, help="grid points per axis")
        p.add_argument("--t-final", dest="t_final", type=float)
        p.add_argument("--cfl", type=float)
        p.add_argument("--a", help="bump scale, decimal or fraction like 11/12")
        p.add_argument("--outdir")
        p.add_argument("--workers", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--serial", action="store_true",
                       help="force one worker (deterministic mode)")
        p.add_argument("--snapshot-times", dest="snapshot_times",
                       help="comma-separated times")
        p.add_argument("--no-stop-at-fill", dest="no_stop_at_fill",
                       action="store_true",
                       help="keep integrating past the spectral-fill time")
        p.add_argument("--degeneracy-floor", dest="degeneracy_floor", type=float)
        p.add_argument("--fill-threshold", dest="fill_threshold", type=float)

    p_sim = sub.add_parser("simulate", help="one mixing run, CSV + snapshots")
    add_common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_swp = sub.add_parser("sweep", help="run the bump-scale sweep and rate table")
    add_common(p_swp)
    p_swp.add_argument("--a-list", dest="a_list",
                       help="comma-separated a values (fractions allowed)")
    p_swp.set_defaults(func=cmd_sweep)

    p_ana = sub.add_parser("analyze", help="rate fit + envelope for a finished run")
    p_ana.add_argument("rundir", help="directory holding timeseries.csv")
    p_ana.add_argument("--window-start", type=float, default=None)
    p_ana.add_argument("--window-end", type=float, default=None)
    p_ana.add_argument("--p", type=float, default=2.0)
    p_ana.add_argument("--outdir", default=None)
    p_ana.set_defaults(func=cmd_analyze)

    p_cert = sub.add_parser("certify", help="mixedness verdicts for a field file")
    p_cert.add_argument("field", help="field snapshot (.tmf or .csv)")
    p_cert.add_argument("--level", type=float, default=0.5,
                        help="super level set threshold in (0, 1]")
    p_cert.add_argument("--kappa", type=float, default=0.25)
    p_cert.add_argument("--deltas", default="0.03125,0.0625,0.125,0.25",
                        help="comma-separated scales")
    p_cert.add_argument("--eps", type=float, default=0.5)
    p_cert.add_argument("--outdir", default="certify_out")
    p_cert.set_defaults(func=cmd_certify)

    p_sc = sub.add_parser("scalecheck", help="verify the rescaling identities")
    p_sc.add_argument("--a", type=float, default=0.5)
    p_sc.add_argument("--n", type=int, default=512)
    p_sc.add_argument("--p", type=float, default=2.0)
    p_sc.add_argument("--outdir", default="scalecheck_out")
    p_sc.set_defaults(func=cmd_scalecheck)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TorusmixError as exc:
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
