"""Command-line experiment runner.

Runs registered experiments and writes machine-readable JSON reports::

    groupmomentum helicity-abc --grid 64
    groupmomentum period-t4 --tol period_gamma4=1e-10 --output t4.json
    groupmomentum --config hopf.ini
    groupmomentum --all

Exit codes: ``0`` when every comparison passes, ``1`` on a tolerance (or
expected-verdict) failure and ``2`` on invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .config import ExperimentConfig, load_config
from .errors import ConfigInvalid, UnknownExperiment
from .experiments import DEFAULT_SUITE, EXISTENCE_VERDICTS, REGISTRY

PASS = "PASS"
FAIL = "FAIL"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2


def _plain(value: Any) -> Any:
    """Convert numpy scalars/arrays (recursively) to JSON-serializable values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


def run_experiment(config: ExperimentConfig) -> dict[str, Any]:
    """Run one experiment and build its report.

    Every residual is compared with its tolerance (``value <= tol``); every
    existence verdict is compared with the expected verdict.  The status is
    ``FAIL`` iff any comparison fails.

    Raises:
        UnknownExperiment: If the name is not registered.
        ConfigInvalid: If a tolerance override names no residual of the
            experiment or an expected verdict is not a known verdict.
    """
    if config.experiment not in REGISTRY:
        raise UnknownExperiment(config.experiment)
    spec = REGISTRY[config.experiment]
    params = config.resolved_parameters()
    expected = params.get("expected")
    if expected is not None and expected not in EXISTENCE_VERDICTS:
        raise ConfigInvalid(f"expected verdict must be one of {EXISTENCE_VERDICTS}, got {expected!r}")
    start = time.perf_counter()
    result = spec.routine(params, config.resolved_grid(), np.random.default_rng(config.seed))
    wall = time.perf_counter() - start

    unknown = sorted(set(config.tolerances) - set(result.residuals))
    if unknown:
        raise ConfigInvalid(f"{config.experiment}: tolerance overrides for unknown residuals {unknown}")
    tolerances = {**result.tolerances, **config.tolerances}
    verdicts: dict[str, str] = {}
    failed = False
    for key, value in result.residuals.items():
        ok = bool(value <= tolerances[key])
        verdicts[key] = PASS if ok else FAIL
        failed |= not ok
    for key, verdict in result.existence.items():
        verdicts[key] = verdict
        failed |= verdict != result.expected.get(key, verdict)
    return {
        "experiment": config.experiment,
        "status": FAIL if failed else PASS,
        "residuals": _plain(result.residuals),
        "tolerances": _plain({k: tolerances[k] for k in result.residuals}),
        "verdicts": verdicts,
        "expected": dict(result.expected),
        "info": _plain(result.info),
        "provenance": {"version": __version__, "config": _plain(config.echo()), "wall_time": wall},
    }


def run_suite(names: Sequence[str] | Sequence[ExperimentConfig]) -> dict[str, Any]:
    """Run several experiments sequentially; the suite fails if any child fails.

    Names are validated before anything runs, so an unknown name raises
    :class:`UnknownExperiment` without partial work.
    """
    configs = [n if isinstance(n, ExperimentConfig) else ExperimentConfig(str(n)) for n in names]
    start = time.perf_counter()
    reports = [run_experiment(c) for c in configs]
    return {
        "suite": [c.experiment for c in configs],
        "status": FAIL if any(r["status"] == FAIL for r in reports) else PASS,
        "experiments": reports,
        "provenance": {"version": __version__, "wall_time": time.perf_counter() - start},
    }


def strip_timing(report: dict[str, Any]) -> dict[str, Any]:
    """Copy of a (suite) report without wall-clock entries, for comparisons."""
    out = json.loads(json.dumps(report))
    for rep in [out, *out.get("experiments", [])]:
        rep.get("provenance", {}).pop("wall_time", None)
    return out


def dumps(report: dict[str, Any]) -> str:
    """Serialize a report; floats are written with full double precision."""
    return json.dumps(report, indent=2) + "\n"


def _key_values(items: Sequence[str], what: str) -> dict[str, str]:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigInvalid(f"{what} must be given as key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="groupmomentum",
        description="Run momentum-map, Poisson-Lie, orbit and fluid verification experiments.")
    parser.add_argument("experiments", nargs="*", help="experiment names (see --list)")
    parser.add_argument("--config", help="INI configuration file naming one experiment")
    parser.add_argument("--output", help="also write the JSON report to this path")
    parser.add_argument("--tol", action="append", default=[], metavar="KEY=VALUE",
                        help="override the tolerance of one residual")
    parser.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                        help="override an experiment parameter")
    parser.add_argument("--seed", type=int, help="seed of the random generator")
    parser.add_argument("--grid", type=int, help="grid nodes per axis")
    parser.add_argument("--all", action="store_true", help="run the default suite")
    parser.add_argument("--list", action="store_true", help="list experiments and exit")
    return parser


def _configs(args: argparse.Namespace) -> list[ExperimentConfig]:
    tols = _key_values(args.tol, "--tol")
    params = _key_values(args.param, "--param")
    base = []
    if args.config:
        base.append(load_config(args.config))
    names = list(DEFAULT_SUITE) if args.all else []
    names += args.experiments
    for name in names:
        if name not in REGISTRY:
            raise UnknownExperiment(name)
        base.append(ExperimentConfig(name))
    out = []
    for cfg in base:
        # In a suite, --grid only applies to grid-based experiments.
        use_grid = args.grid is not None and (len(base) == 1 or REGISTRY[cfg.experiment].grid is not None)
        out.append(ExperimentConfig(
            cfg.experiment,
            parameters={**cfg.parameters, **params},
            tolerances={**cfg.tolerances, **tols},
            grid=args.grid if use_grid else cfg.grid,
            seed=args.seed if args.seed is not None else cfg.seed,
        ))
    return out


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.list:
        for name, spec in REGISTRY.items():
            print(f"{name:26s} {spec.summary}")
        return EXIT_OK
    try:
        configs = _configs(args)
        report = run_experiment(configs[0]) if len(configs) == 1 else run_suite(configs)
    except UnknownExperiment as exc:
        print(f"error: unknown experiment {exc.args[0]!r}; known: {', '.join(REGISTRY)}", file=sys.stderr)
        return EXIT_INVALID
    except ConfigInvalid as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = dumps(report)
    sys.stdout.write(text)
    if args.output:
        Path(args.output).write_text(text)
    return EXIT_OK if report["status"] == PASS else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
