"""Command-line front end: ``coinwalk <command> ...``.

Exit codes: 0 success, 1 validation error, 2 I/O error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import experiments as ex
from .analysis import AnalysisError, FidelitySeries, fidelity_series, hellinger_fidelity
from .circuit import CircuitError, deserialize, serialize
from .noise import LAMBDA_FIELDS, NoiseModel, NoiseModelError, calibrate, default_model
from .simulator import SimulationError
from .transpiler import census_report, transpile
from .walk import CoinInit, WalkSpec, walk_circuit

VALIDATION_ERRORS = (CircuitError, NoiseModelError, AnalysisError, SimulationError,
                     ex.FileFormatError, ValueError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("COINWALK_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"COINWALK_SEED must be an integer, got {env!r}") from None


def _noise(spec: str | None, strength: float | None, native: bool) -> NoiseModel | None:
    if spec in (None, "none"):
        return None
    model = default_model() if spec == "table2" else NoiseModel.loads(Path(spec).read_text())
    if strength is not None:
        model = replace(model, strength=strength)
    if native:
        model = replace(model, mode="native")
    return model


def _walk_spec(nodes: int, steps: int, coin_init: str = "zero", optimized: bool = False) -> WalkSpec:
    n = ex.position_qubits(nodes)
    if optimized and nodes != 4:
        raise UsageError("--optimized requires --nodes 4")
    return WalkSpec(n, steps, CoinInit(coin_init), optimized)


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def parse_grid(text: str) -> dict[str, list[float]]:
    """``lambda_1q=0,0.005;lambda_multi=0:0.6:4`` -> value lists.

    Values are a comma list or ``lo:hi:count`` (inclusive, evenly spaced).
    Short names ``1q``, ``2q``, ``3q``, ``multi`` are accepted.
    """
    grid = {}
    for part in filter(None, (p.strip() for p in text.split(";"))):
        if "=" not in part:
            raise UsageError(f"grid entry {part!r} needs name=values")
        name, values = (s.strip() for s in part.split("=", 1))
        if not name.startswith("lambda_"):
            name = "lambda_" + name
        if name not in LAMBDA_FIELDS:
            raise UsageError(f"unknown grid parameter {name!r}")
        if ":" in values:
            lo, hi, num = values.split(":")
            grid[name] = [float(v) for v in np.linspace(float(lo), float(hi), int(num))]
        else:
            grid[name] = [float(v) for v in values.split(",") if v.strip()]
        if not grid[name]:
            raise UsageError(f"grid parameter {name} has no values")
    if not grid:
        raise UsageError("empty grid")
    return grid


# -- commands --------------------------------------------------------------


def cmd_build(args) -> int:
    spec = _walk_spec(args.nodes, args.steps, args.coin_init, args.optimized)
    _write(args.out, serialize(walk_circuit(spec)) + "\n")
    return 0


def cmd_transpile(args) -> int:
    source = deserialize(Path(args.input).read_text())
    native = transpile(source)
    _write(args.out, serialize(native) + "\n")
    if args.report is not None:
        report = census_report(source, native, args.steps)
        _write(args.report, json.dumps(report, indent=1) + "\n")
    return 0


def cmd_run(args) -> int:
    spec = _walk_spec(args.nodes, args.steps, args.coin_init, args.optimized)
    noise = _noise(args.noise, args.strength, args.native_noise)
    results = ex.run_walk(spec, noise, args.mode, args.shots, args.repeats, _seed(args))
    backend = "exact" if noise is None else f"noisy-{noise.mode}"
    ex.write_run(results, args.out, args.nodes, backend)
    if args.plot:
        from .plotting import plot_distributions

        ideal = ex.run_walk(spec) if noise is not None else None
        plot_distributions([r.exact for r in (ideal or results)],
                           [r.exact for r in results] if ideal else None,
                           spec.num_position_qubits, Path(args.out) / "distributions.svg")
    return 0


def cmd_sweep(args) -> int:
    base = _noise(args.noise, None, args.native_noise)
    if base is None:
        raise UsageError("sweep needs a noise model (--noise table2 or a noise/v1 file)")
    strengths = ex.DEFAULT_STRENGTHS if args.strengths is None else tuple(
        float(s) for s in args.strengths.split(",")
    )
    config = ex.SweepConfig(args.nodes, args.steps, strengths, args.mode, args.shots,
                            args.repeats, _seed(args), base, CoinInit(args.coin_init))
    results = ex.sweep(config, jobs=args.jobs)
    _write(args.out, ex.sweep_csv(results))
    if args.plot:
        from .plotting import plot_fidelity

        plot_fidelity({f"{s:.0%}": series for s, series in results.items()}, args.plot)
    return 0


def cmd_fidelity(args) -> int:
    a, b = ex.load_outcomes(args.a), ex.load_outcomes(args.b)
    print(f"{hellinger_fidelity(a.distribution, b.distribution):.6f}")
    return 0


def cmd_compare(args) -> int:
    series = ex.compare_directories(args.reference, args.candidate)
    _write(args.out, series.to_csv())
    if args.plot:
        from .plotting import plot_fidelity

        plot_fidelity({"candidate": series}, args.plot)
    return 0


def _reference_series(path: str, spec: WalkSpec) -> FidelitySeries:
    p = Path(path)
    if p.is_file():
        return FidelitySeries.from_csv(p.read_text())
    device = ex.load_step_directory(p)
    ideal = ex.reference_distributions(spec)
    extra = sorted(set(device) - set(ideal))
    if extra:
        raise UsageError(f"reference holds steps {extra} beyond --steps {spec.steps}")
    return fidelity_series(
        {s: ideal[s] for s in device},
        {s: [o.distribution for o in files] for s, files in device.items()},
    )


def cmd_calibrate(args) -> int:
    spec = _walk_spec(args.nodes, args.steps)
    reference = _reference_series(args.reference, spec)
    model, mse = calibrate(reference, spec, parse_grid(args.grid), args.noise_mode, args.jobs)
    _write(args.out, model.dumps() + "\n")
    print(f"mse={mse:.6g}")
    return 0


# -- parser ----------------------------------------------------------------


def _walk_args(p):
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--coin-init", choices=[c.value for c in CoinInit], default="zero")


def _noise_args(p):
    p.add_argument("--noise", default=None,
                   help="'table2' for the built-in model, a noise/v1 file, or 'none'")
    p.add_argument("--native-noise", action="store_true",
                   help="transpile first and apply only 1q/2q noise")
    p.add_argument("--mode", choices=["exact", "sampled"], default="exact")
    p.add_argument("--shots", type=int, default=ex.DEFAULT_SHOTS)
    p.add_argument("--repeats", type=int, default=ex.DEFAULT_REPEATS)
    p.add_argument("--seed", type=int, default=None, help="falls back to $COINWALK_SEED")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="coinwalk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="write a walk circuit (circuit/v1)")
    _walk_args(p)
    p.add_argument("--optimized", action="store_true", help="4-node STEP gate")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("transpile", help="lower a circuit file to native gates")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report", nargs="?", const="-", default=None,
                   help="census report path (stdout when given without a value)")
    p.add_argument("--steps", type=int, default=None, help="walk steps, for per-step totals")
    p.set_defaults(func=cmd_transpile)

    p = sub.add_parser("run", help="simulate steps 0..T and write per-step files")
    _walk_args(p)
    p.add_argument("--optimized", action="store_true")
    _noise_args(p)
    p.add_argument("--strength", type=float, default=None)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--plot", action="store_true", help="also write distributions.svg")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="fidelity against step for several noise strengths")
    _walk_args(p)
    _noise_args(p)
    p.set_defaults(noise="table2")
    p.add_argument("--strengths", default=None, help="comma list, ascending")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--plot", default=None, help="SVG path for the fidelity curves")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fidelity", help="Hellinger fidelity of two outcome files")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("compare", help="per-step fidelity of a candidate directory")
    p.add_argument("--reference", required=True)
    p.add_argument("--candidate", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--plot", default=None)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("calibrate", help="grid-search a noise model against reference data")
    p.add_argument("--reference", required=True, help="directory of per-step files or fidelity CSV")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--grid", required=True)
    p.add_argument("--noise-mode", choices=["abstract", "native"], default="abstract")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_calibrate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, *VALIDATION_ERRORS) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
