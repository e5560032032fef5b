"""Command-line front end: ``petzrenyi {chiral,wedge,subspace,selftest}``.

Every run writes its CSV tables into ``--out-dir`` and finishes with a
flat ``manifest.txt`` holding the resolved configuration and a SHA-256
digest of each table.  Feeding the manifest back through ``--config``
reproduces the run; ``--verify`` additionally fails when a table differs.

Exit codes: 0 success, 2 usage or domain error, 3 numerical
non-convergence (or a failed verification), 4 non-factorial subspace.
"""

from __future__ import annotations

import argparse
import functools
import logging
import sys
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .config import RunConfig
from .data import (
    HEADERS,
    RunManifest,
    parse_cauchy_data,
    parse_subspace,
    parse_test_function,
    require_verified,
    write_csv,
)
from .engine import PetzRenyiEngine
from .errors import ConvergenceError, PetzRenyiError, UsageError
from .fock import TruncatedFock
from .selftest import SelfTest
from .spectral import alpha_derivative_from_measure, entropy_from_vector_measure
from .subspace import modular_operator, vector_spectral_measure

log = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

Runner = Callable[[RunConfig, PetzRenyiEngine, RunManifest, Path], None]


def _table(manifest: RunManifest, out_dir: Path, name: str, rows) -> None:
    path = write_csv(out_dir / f"{name}.csv", HEADERS[name], rows)
    manifest.record(path)


def _endpoint(name: str, res) -> tuple[str, float, float]:
    return (name, float(np.real(res.value)), float(res.error_estimate))


# -- runs ----------------------------------------------------------------


def run_chiral(cfg: RunConfig, engine: PetzRenyiEngine, manifest: RunManifest, out_dir: Path) -> None:
    """``alpha_curve.csv``, ``beta_sweep.csv`` and ``endpoints.csv`` for one test function."""
    f = parse_test_function(cfg.test_function)
    curve = engine.sweep.chiral_alpha_curve(f, cfg.beta, cfg.grid.interior())
    _table(manifest, out_dir, "alpha_curve", curve.rows())
    _table(manifest, out_dir, "beta_sweep", engine.sweep.beta_sweep(f, cfg.betas))

    chiral = engine.chiral
    ladder = engine.sweep.chiral_alpha_ladder(f, cfg.beta, *cfg.ladder_k)
    endpoints = [
        _endpoint("relative_entropy", chiral.relative_entropy_chiral(f, cfg.beta)),
        ("alpha_ladder_limit", float(np.real(ladder.extrapolated)), ladder.error_estimate),
        _endpoint("first_correction", chiral.alpha_derivative_at_one(f, cfg.beta)),
        _endpoint("zero_temperature_entropy", chiral.zero_temperature_entropy(f)),
    ]
    _table(manifest, out_dir, "endpoints", endpoints)


def run_wedge(cfg: RunConfig, engine: PetzRenyiEngine, manifest: RunManifest, out_dir: Path) -> None:
    """``alpha_curve.csv`` and ``endpoints.csv`` for one set of Cauchy data."""
    data = parse_cauchy_data(cfg.cauchy_data, cfg.mass)
    curve = engine.sweep.wedge_alpha_curve(data, cfg.grid.interior(), cfg.wedge_method)
    _table(manifest, out_dir, "alpha_curve", curve.rows())

    wedge = engine.wedge
    ladder = engine.sweep.wedge_alpha_ladder(data, *cfg.wedge_ladder_k)
    endpoints = [
        _endpoint("relative_entropy", wedge.relative_entropy_wedge(data)),
        _endpoint("noether_charge", wedge.noether_charge(data)),
        ("alpha_ladder_limit", float(np.real(ladder.extrapolated)), ladder.error_estimate),
    ]
    _table(manifest, out_dir, "endpoints", endpoints)


def run_subspace(cfg: RunConfig, engine: PetzRenyiEngine, manifest: RunManifest, out_dir: Path) -> None:
    """``subspace_table.csv`` (spectral vs. Fock), the spectra and ``endpoints.csv``."""
    rng = np.random.default_rng(cfg.seed)
    L, f = parse_subspace(cfg.subspace_file, rng)
    M = modular_operator(L)
    c = M.mode_coefficients(f)
    mean = float(np.vdot(c, c).real)
    amp = float(np.max(M.delta_eigenvalues))
    fock = TruncatedFock.for_coherent(M.modes, mean, amp, max_cutoff=cfg.fock_cutoff)
    rows = engine.sweep.subspace_table(L, f, cfg.grid, fock)
    _table(manifest, out_dir, "subspace_table", rows)
    worst = max(r[3] for r in rows)
    if worst > 1e-6:
        log.warning("spectral and Fock entropies differ by %.3e", worst)

    measure = vector_spectral_measure(M, f)
    _table(manifest, out_dir, "spectral_measure", measure.rows())
    _table(manifest, out_dir, "modular_spectrum", M.spectrum_rows(f))
    endpoints = [
        ("entropy", entropy_from_vector_measure(measure), 0.0),
        ("first_correction", alpha_derivative_from_measure(measure, vector=True), 0.0),
        ("fock_cutoff", float(fock.cutoff), 0.0),
    ]
    _table(manifest, out_dir, "endpoints", endpoints)


def run_selftest(cfg: RunConfig, engine: PetzRenyiEngine, manifest: RunManifest, out_dir: Path,
                 quick: bool = False) -> None:
    """``selftest.csv``; raises ``ConvergenceError`` when a check fails."""
    battery = SelfTest(engine, cfg.seed, cfg.fock_cutoff, cfg.ladder_k, cfg.wedge_ladder_k)
    results = battery.run(quick)
    _table(manifest, out_dir, "selftest", [r.row() for r in results])
    failed = [r.check for r in results if not r.passed]
    if failed:
        raise ConvergenceError(f"{len(failed)} selftest checks failed: {', '.join(failed)}")


RUNNERS: dict[str, Runner] = {
    "chiral": run_chiral,
    "wedge": run_wedge,
    "subspace": run_subspace,
    "selftest": run_selftest,
}


def execute(cfg: RunConfig, runner: Runner, out_dir: Path | None = None) -> RunManifest:
    """Run ``runner`` and write the manifest last, flagged when incomplete."""
    out_dir = Path(cfg.out_dir if out_dir is None else out_dir)
    engine = PetzRenyiEngine.from_config(cfg)
    manifest = RunManifest(cfg.model, cfg.as_dict())
    try:
        runner(cfg, engine, manifest, out_dir)
    except PetzRenyiError as exc:
        manifest.status = f"partial ({type(exc).__name__})"
        raise
    finally:
        manifest.write(out_dir)
    return manifest


# -- argument parsing ------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha-grid", help="'0.1,0.5,0.9' or 'start:stop:count'")
    common.add_argument("--tol", help="absolute quadrature tolerance")
    common.add_argument("--out-dir", help="directory for CSV tables and the manifest")
    common.add_argument("--config", type=Path, help="INI configuration file or run manifest")
    common.add_argument("--seed", help="seed for every random draw")
    common.add_argument("--ladder-k", help="first and last k of alpha = 1 - 2**-k, e.g. '3,7'")
    common.add_argument(
        "--verify", action="store_true",
        help="fail when an output differs from the digests in the --config manifest",
    )
    noise = common.add_mutually_exclusive_group()
    noise.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    noise.add_argument("-q", "--quiet", action="store_true", help="warnings only")

    parser = argparse.ArgumentParser(
        prog="petzrenyi",
        description="Petz-Renyi and relative entropies of coherent excitations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    chiral = sub.add_parser("chiral", parents=[common], help="thermal chiral current on the half-line")
    chiral.add_argument("--beta", help="inverse temperature")
    chiral.add_argument("--betas", help="comma-separated beta sweep")
    chiral.add_argument("--test-function", help="'bump a b', 'poly-bump a b k' or 'csv:path'")
    chiral.add_argument("--epsilons", help="regulator ladder in units of beta")

    wedge = sub.add_parser("wedge", parents=[common], help="free scalar in the Rindler wedge")
    wedge.add_argument("--mass", help="field mass")
    wedge.add_argument("--cauchy-data", help="'gauss-bump c w', 'momentum-bump c w', "
                                             "'wave-packet c w' or 'csv:path'")
    wedge.add_argument("--method", dest="wedge_method", choices=("momentum", "kernel"))
    wedge.add_argument("--wedge-ladder-k", help="k range of the wedge alpha -> 1 ladder, e.g. '5,9'")

    subspace = sub.add_parser("subspace", parents=[common], help="finite-mode standard subspace")
    subspace.add_argument("--subspace-file", help="'canonical lam', 'random pairs' or an INI file")
    subspace.add_argument("--fock-cutoff", help="largest Fock cutoff for the oracle")

    selftest = sub.add_parser("selftest", parents=[common], help="run the acceptance battery")
    selftest.add_argument("--fock-cutoff", help="largest Fock cutoff for the oracle")
    selftest.add_argument("--wedge-ladder-k", help="k range of the wedge alpha -> 1 ladder")
    selftest.add_argument("--quick", action="store_true", help="skip the slow field-model limits")
    return parser


_OVERRIDES = (
    "alpha_grid", "tol", "out_dir", "seed", "ladder_k", "beta", "betas", "test_function",
    "epsilons", "mass", "cauchy_data", "wedge_method", "wedge_ladder_k", "subspace_file",
    "fock_cutoff",
)


def overrides_from_args(args: argparse.Namespace) -> dict[str, str | None]:
    return {key: getattr(args, key, None) for key in _OVERRIDES}


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args)
    try:
        recorded = None
        if args.verify:
            if args.config is None:
                raise UsageError("verify", "--verify needs --config pointing at a run manifest")
            recorded = RunManifest.read(args.config)
        cfg = RunConfig.resolve(args.config, overrides_from_args(args), model=args.command)
        runner = RUNNERS[args.command]
        if args.command == "selftest" and args.quick:
            runner = functools.partial(run_selftest, quick=True)
        execute(cfg, runner)
        if recorded is not None:
            require_verified(recorded, Path(cfg.out_dir))
    except PetzRenyiError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
