"""Command-line driver.

Example::

    pocs run --mode pocs-noiseless --n 100 --s 10 --m-grid 5:70:5 \\
        --trials 100 --seed 42 --out-dir results/

Exit codes: 0 success, 1 configuration error, 2 I/O error, 3 a failed
battery in ``metrics-suite`` mode.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .experiments import ConfigError, ExperimentConfig, Mode, config_from_mapping, load_config_file, run
from .outputs import OutputError, emit_outputs, write_suite_csv

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_BATTERY = 0, 1, 2, 3

_FLAG_KEYS = {
    "mode": "mode",
    "n": "n",
    "s": "s",
    "m_grid": "m_grid",
    "trials": "trials",
    "alphas": "noise_alphas",
    "noise_kind": "noise_kind",
    "seed": "base_seed",
    "threshold": "success_threshold",
    "kappa": "kappa",
    "workers": "workers",
    "rip_m": "rip_m",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pocs", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="run an experiment and write CSV/SVG outputs")
    p.add_argument("--config", type=Path, help="flat 'key = value' config file")
    p.add_argument("--mode", choices=[m.value for m in Mode])
    p.add_argument("--n", help="signal dimension (default 100)")
    p.add_argument("--s", help="sparsity (default 10)")
    p.add_argument("--m-grid", dest="m_grid", help="comma list or inclusive a:b[:step] range")
    p.add_argument("--trials", help="trials per grid point (default 100)")
    p.add_argument("--alphas", help="comma list of alpha, tau = pi / 10**alpha")
    p.add_argument("--noise-kind", dest="noise_kind", choices=["uniform-disc", "uniform-phase"])
    p.add_argument("--seed", help="64-bit base seed")
    p.add_argument("--threshold", help="relative-error success threshold (default 1e-3)")
    p.add_argument("--kappa", help="amplitude constant (default sqrt(pi/2))")
    p.add_argument("--workers", help="worker processes (default 1)")
    p.add_argument("--rip-m", dest="rip_m", help="measurements for the metrics-suite RIP row")
    p.add_argument("--out-dir", dest="out_dir", type=Path, default=Path("results"))
    p.add_argument("-v", "--verbose", action="store_true")

    b = sub.add_parser("bench", help="time compiled kernels against the numpy fallback")
    b.add_argument("--repeat", type=int, default=2000)
    return parser


def resolve_config(args) -> ExperimentConfig:
    values = load_config_file(args.config) if args.config else {}
    for flag, key in _FLAG_KEYS.items():
        v = getattr(args, flag, None)
        if v is not None:
            values[key] = v
    return config_from_mapping(values)


def _cmd_run(args) -> int:
    try:
        cfg = resolve_config(args)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    metadata = {
        "mode": cfg.mode.value,
        "n": cfg.n,
        "s": cfg.s,
        "m_grid": ",".join(map(str, cfg.m_grid)),
        "trials": cfg.trials,
        "kappa": repr(cfg.kappa),
        "success_threshold": repr(cfg.success_threshold),
        "base_seed": cfg.base_seed,
    }
    if cfg.mode is Mode.METRICS_SUITE:
        from .suite import run_metrics_suite

        report = run_metrics_suite(cfg)
        try:
            args.out_dir.mkdir(parents=True, exist_ok=True)
            write_suite_csv(report, args.out_dir / "metrics_report.csv")
        except OSError as exc:
            print(f"I/O error: {exc}", file=sys.stderr)
            return EXIT_IO
        for r in report.rows:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.battery:28s} {r.statistic:.6g} "
                  f"(threshold {r.threshold:.6g})  {r.detail}")
        return EXIT_OK if report.passed else EXIT_BATTERY

    if cfg.mode is Mode.POCS_NOISY:
        metadata["noise_kind"] = cfg.noise_kind.value
        metadata["noise_alphas"] = ",".join(repr(a) for a in cfg.noise_alphas)
        metadata["fidelity"] = "ORACLE ||A_eps x|| from the known noise"
    table = run(cfg)
    try:
        paths = emit_outputs(table, args.out_dir, metadata)
    except OutputError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    for r in table.rows:
        print(f"m={r.m:3d} m/s={r.m_over_s:5.2f} tau={r.tau:.3g} "
              f"success={r.success_rate:.2f} snr={r.mean_snr_db:.1f} dB")
    for kind, path in paths.items():
        print(f"wrote {kind}: {path}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING)
    if args.command == "bench":
        from .bench import main as bench_main

        return bench_main(repeat=args.repeat)
    return _cmd_run(args)


if __name__ == "__main__":
    sys.exit(main())
