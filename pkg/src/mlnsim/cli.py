"""Command-line front end.

    mlnsim <command> [--preset X] [--config FILE] [--seed U64] [--trials N]
                     [--snr-grid A:STEP:B] [--query dft|hadamard|random-unitary]
                     [--events N] [--max-trials N] [--out DIR]

Commands:
    measure        print and write the rank-based measure report
    verify-lemmas  empirically validate the almost-sure rank predictions
    pep            PEP curves for both query schemes, ratio curve, exponents
    ber            BER sweep for both query schemes plus gain summary
    reproduce      full pipeline (measure + lemmas + pep + ber) for a preset

Exit codes: 0 success, 1 usage error, 2 validation failure (or a failed
run; partial outputs are removed), 3 verify-lemmas check failure.
MLNSIM_THREADS caps worker parallelism (default: machine core count).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .config import (
    COMMANDS,
    ConfigError,
    DEFAULT_EXPONENT_GRID,
    ExperimentConfig,
    load_config,
)
from .linalg import make_rng
from .measure import compare_queries, empirical_rank_check
from .pep import (
    DivergentAverageError,
    decay_exponent_checked,
    pep_curve_to_csv,
    pep_eigen_product_mc,
    pep_ratio_curve,
    ratio_curve_to_csv,
)
from .query import UNITARY_KINDS
from .simulate import LevelNotCrossedError, SnrSweepConfig, gain_at_ber, simulate_ber

REPRODUCE_BER_GRID = tuple(float(s) for s in range(0, 25, 2))
REPRODUCE_RATIO_GRID = tuple(float(s) for s in range(10, 41, 5))

GAIN_LEVELS = (1e-2, 1e-3)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="mlnsim",
        description="Backscatter MIMO query-scheme simulation laboratory.",
        epilog=__doc__.split("Commands:")[1],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("command", choices=COMMANDS, help="what to run")
    parser.add_argument("--preset", default=None, help="example1 | example2 | example3")
    parser.add_argument("--config", default=None, metavar="FILE", help="JSON config file")
    parser.add_argument("--seed", type=int, default=None, help="root RNG seed (default 0)")
    parser.add_argument(
        "--trials", type=int, default=None,
        help="Monte Carlo trials for verify-lemmas/pep (defaults 1000 / 100000)",
    )
    parser.add_argument(
        "--snr-grid", default=None, metavar="A:STEP:B",
        help="SNR grid in dB (defaults: ber 0:2:40, pep 10:5:45)",
    )
    parser.add_argument(
        "--query", default=None, choices=UNITARY_KINDS,
        help="unitary construction compared against the uniform query (default dft)",
    )
    parser.add_argument(
        "--events", type=int, default=None, metavar="N",
        help="target error events per BER point (default 200)",
    )
    parser.add_argument(
        "--max-trials", type=int, default=None, metavar="N",
        help="trial cap per BER point (default 2000000)",
    )
    parser.add_argument("--out", default=None, metavar="DIR", help="output directory (default mlnsim-out)")
    return parser


class _Artifacts:
    """Tracks files written by one run so failures can clean up."""

    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        self.paths: list[str] = []

    def write(self, name: str, text: str) -> str:
        os.makedirs(self.out_dir, exist_ok=True)
        path = os.path.join(self.out_dir, name)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        self.paths.append(path)
        return path

    def discard_all(self):
        for p in self.paths:
            try:
                os.unlink(p)
            except OSError:
                pass


def _slug(cfg: ExperimentConfig) -> str:
    return cfg.preset or "custom"


def _run_measure(cfg: ExperimentConfig, art: _Artifacts) -> int:
    report = compare_queries(cfg.delta, cfg.dims.N)
    text = json.dumps(report.to_dict(), indent=2)
    print(text)
    art.write(f"measure_{_slug(cfg)}.json", text + "\n")
    return 0


def _run_verify_lemmas(cfg: ExperimentConfig, art: _Artifacts) -> int:
    rng = make_rng(cfg.seed, (10,))
    report = empirical_rank_check(cfg.delta, cfg.dims.N, cfg.trials, rng)
    text = json.dumps(report.to_dict(), indent=2)
    print(text)
    art.write(f"lemma_check_{_slug(cfg)}.json", text + "\n")
    if not report.passed:
        print("rank predictions NOT met on sampled draws", file=sys.stderr)
        return 3
    return 0


def _exponent_summary(estimates, nominal: int) -> dict:
    window = [e for e in estimates if e.snr_db >= DEFAULT_EXPONENT_GRID[0]]
    if len(window) < 3 or window[-1].snr_db - window[0].snr_db < 10.0:
        window = estimates
    try:
        fitted = decay_exponent_checked(window, nominal)
        return {"nominal": nominal, "fitted": fitted, "divergent": False}
    except DivergentAverageError as exc:
        return {"nominal": nominal, "fitted": None, "divergent": True, "diagnostic": str(exc)}
    except ValueError as exc:
        return {"nominal": nominal, "fitted": None, "divergent": False, "diagnostic": str(exc)}


def _run_pep(cfg: ExperimentConfig, art: _Artifacts) -> int:
    slug = _slug(cfg)
    measures = compare_queries(cfg.delta, cfg.dims.N)
    curves = {}
    for i, scheme in enumerate(("unitary", "uniform")):
        rng = make_rng(cfg.seed, (20, i))
        curves[scheme] = [
            pep_eigen_product_mc(scheme, cfg.delta, cfg.dims, snr, cfg.trials, rng)
            for snr in cfg.snr_grid_db
        ]
        art.write(f"pep_{slug}_{scheme}.csv", pep_curve_to_csv(curves[scheme]))
    ratio = pep_ratio_curve(
        cfg.delta, cfg.dims, list(cfg.snr_grid_db), cfg.trials, make_rng(cfg.seed, (21,))
    )
    art.write(f"pep_{slug}_ratio.csv", ratio_curve_to_csv(ratio))
    summary = {
        "preset": cfg.preset,
        "snr_grid_db": list(cfg.snr_grid_db),
        "trials": cfg.trials,
        "unitary": _exponent_summary(curves["unitary"], measures.r_unitary),
        "uniform": _exponent_summary(curves["uniform"], measures.r_uniform),
    }
    text = json.dumps(summary, indent=2)
    print(text)
    art.write(f"pep_{slug}_summary.json", text + "\n")
    return 0


def _run_ber(cfg: ExperimentConfig, art: _Artifacts) -> int:
    slug = _slug(cfg)
    grid = cfg.snr_grid_db
    if cfg.command == "reproduce" and not cfg.snr_grid_explicit:
        grid = REPRODUCE_BER_GRID
    curves = {}
    for kind in (cfg.query, "uniform"):
        sweep = SnrSweepConfig(
            dims=cfg.dims,
            query_kind=kind,
            codebook=cfg.codebook,
            snr_grid_db=grid,
            max_trials_per_point=cfg.max_trials_per_point,
            target_error_events=cfg.target_error_events,
            seed=cfg.seed,
        )
        curves[kind] = simulate_ber(sweep)
        art.write(f"ber_{slug}_{kind}.csv", curves[kind].to_csv())
    summary = {"preset": cfg.preset, "query": cfg.query, "snr_grid_db": list(grid)}
    for level in GAIN_LEVELS:
        key = f"gain_db_at_{level:g}"
        try:
            summary[key] = gain_at_ber(curves[cfg.query], curves["uniform"], level)
        except LevelNotCrossedError as exc:
            summary[key] = None
            summary[key + "_note"] = str(exc)
    text = json.dumps(summary, indent=2)
    print(text)
    art.write(f"ber_{slug}_summary.json", text + "\n")
    return 0


def _run_reproduce(cfg: ExperimentConfig, art: _Artifacts) -> int:
    status = _run_measure(cfg, art)
    status = max(status, _run_verify_lemmas(cfg, art))
    pep_cfg = cfg if cfg.snr_grid_explicit else _with_grid(cfg, REPRODUCE_RATIO_GRID + (45.0,))
    status = max(status, _run_pep(pep_cfg, art))
    status = max(status, _run_ber(cfg, art))
    return status


def _with_grid(cfg: ExperimentConfig, grid: tuple) -> ExperimentConfig:
    from dataclasses import replace

    return replace(cfg, snr_grid_db=tuple(grid))


_RUNNERS = {
    "measure": _run_measure,
    "verify-lemmas": _run_verify_lemmas,
    "pep": _run_pep,
    "ber": _run_ber,
    "reproduce": _run_reproduce,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    overrides = {
        "command": args.command,
        "preset": args.preset,
        "seed": args.seed,
        "trials": args.trials,
        "snr_grid_db": args.snr_grid,
        "query": args.query,
        "target_error_events": args.events,
        "max_trials_per_point": args.max_trials,
        "out": args.out,
    }
    try:
        cfg = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"mlnsim {args.command}: {exc}", file=sys.stderr)
        return 2
    art = _Artifacts(cfg.output_dir)
    try:
        return _RUNNERS[cfg.command](cfg, art)
    except Exception as exc:
        art.discard_all()
        print(f"mlnsim {cfg.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
