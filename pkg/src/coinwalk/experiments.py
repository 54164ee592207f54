"""Per-step walk runs, noise-strength sweeps and the counts/distribution files.

Every t-step result comes from a freshly built t-step circuit; nothing is
measured mid-circuit.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .analysis import FidelityPoint, FidelitySeries, fidelity_series, normalize_counts
from .noise import NoiseModel, default_model, scaled
from .simulator import run_exact, sample_counts
from .walk import CoinInit, WalkSpec, walk_circuit

DEFAULT_STRENGTHS = (0.0, 0.02, 0.06, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
DEFAULT_SHOTS = 4096
DEFAULT_REPEATS = 10
COUNTS_FORMAT = "counts/v1"
DIST_FORMAT = "distribution/v1"


class FileFormatError(ValueError):
    pass


def position_qubits(nodes: int) -> int:
    if nodes < 2 or nodes & (nodes - 1):
        raise ValueError(f"node count must be a power of two >= 2, got {nodes}")
    return nodes.bit_length() - 1


def derived_seed(seed: int, *keys: int) -> int:
    """Independent, reproducible seed for one (step, repeat, ...) cell."""
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class StepResult:
    step: int
    exact: dict[str, float]
    counts: tuple[dict[str, int], ...] = ()

    @property
    def distributions(self) -> list[dict[str, float]]:
        if self.counts:
            return [normalize_counts(c) for c in self.counts]
        return [self.exact]


def run_walk(spec: WalkSpec, noise: NoiseModel | None = None, mode: str = "exact",
             shots: int = DEFAULT_SHOTS, repeats: int = DEFAULT_REPEATS,
             seed: int = 0) -> list[StepResult]:
    """Results for steps ``0..spec.steps`` of the walk."""
    if mode not in ("exact", "sampled"):
        raise ValueError(f"mode must be exact or sampled, got {mode!r}")
    results = []
    for t in range(spec.steps + 1):
        dist = run_exact(walk_circuit(spec.with_steps(t)), noise)
        counts = ()
        if mode == "sampled":
            counts = tuple(sample_counts(dist, shots, derived_seed(seed, t, r)) for r in range(repeats))
        results.append(StepResult(t, dist, counts))
    return results


def reference_distributions(spec: WalkSpec) -> dict[int, dict[str, float]]:
    return {r.step: r.exact for r in run_walk(spec)}


@dataclass(frozen=True)
class SweepConfig:
    nodes: int
    max_steps: int
    strengths: tuple[float, ...] = DEFAULT_STRENGTHS
    mode: str = "exact"
    shots: int = DEFAULT_SHOTS
    repeats: int = DEFAULT_REPEATS
    seed: int = 0
    noise_model: NoiseModel = field(default_factory=default_model)
    coin_init: CoinInit = CoinInit.ZERO

    def __post_init__(self):
        position_qubits(self.nodes)
        strengths = tuple(float(s) for s in self.strengths)
        if not strengths:
            raise ValueError("at least one strength is required")
        if list(strengths) != sorted(set(strengths)):
            raise ValueError("strengths must be distinct and ascending")
        if any(not 0 <= s <= 1 for s in strengths):
            raise ValueError("strengths must lie in [0, 1]")
        object.__setattr__(self, "strengths", strengths)
        if self.max_steps < 0:
            raise ValueError("max_steps must be >= 0")
        if self.mode not in ("exact", "sampled"):
            raise ValueError(f"mode must be exact or sampled, got {self.mode!r}")

    @property
    def walk(self) -> WalkSpec:
        return WalkSpec(position_qubits(self.nodes), self.max_steps, self.coin_init)


def _sweep_cell(args) -> FidelitySeries:
    config, reference, strength = args
    results = run_walk(config.walk, scaled(config.noise_model, strength), config.mode,
                       config.shots, config.repeats, config.seed)
    return fidelity_series(reference, {r.step: r.distributions for r in results})


def sweep(config: SweepConfig, jobs: int = 1) -> dict[float, FidelitySeries]:
    """Fidelity series against the noiseless walk for every noise strength."""
    reference = reference_distributions(config.walk)
    tasks = [(config, reference, s) for s in config.strengths]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            series = list(pool.map(_sweep_cell, tasks))
    else:
        series = [_sweep_cell(t) for t in tasks]
    return dict(zip(config.strengths, series))


def sweep_csv(results: Mapping[float, FidelitySeries]) -> str:
    lines = ["strength,step,fidelity,std_error"]
    for strength, series in results.items():
        for p in series.points:
            lines.append(f"{strength:.6g},{p.step},{p.fidelity_mean:.6g},{p.std_error:.6g}")
    return "\n".join(lines) + "\n"


def parse_sweep_csv(text: str) -> dict[float, FidelitySeries]:
    rows = text.strip().splitlines()
    if not rows or rows[0] != "strength,step,fidelity,std_error":
        raise FileFormatError("unexpected sweep CSV header")
    grouped: dict[float, list] = {}
    for row in rows[1:]:
        s, step, f, err = row.split(",")
        grouped.setdefault(float(s), []).append((int(step), float(f), float(err)))
    return {
        s: FidelitySeries(tuple(FidelityPoint(t, f, e, 1) for t, f, e in pts))
        for s, pts in grouped.items()
    }


# -- files -----------------------------------------------------------------


def counts_document(counts: Mapping[str, int], nodes: int, steps: int, backend: str) -> dict:
    return {
        "format": COUNTS_FORMAT,
        "backend": backend,
        "nodes": nodes,
        "steps": steps,
        "shots": int(sum(counts.values())),
        "counts": dict(sorted(counts.items())),
    }


def distribution_document(dist: Mapping[str, float], nodes: int, steps: int, backend: str) -> dict:
    return {
        "format": DIST_FORMAT,
        "backend": backend,
        "nodes": nodes,
        "steps": steps,
        "probabilities": dict(sorted(dist.items())),
    }


def dump_document(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


@dataclass(frozen=True)
class OutcomeFile:
    """A loaded counts/v1 or distribution/v1 document."""

    nodes: int
    steps: int
    backend: str
    distribution: dict[str, float]
    counts: dict[str, int] | None = None


def parse_outcomes(doc) -> OutcomeFile:
    if not isinstance(doc, dict):
        raise FileFormatError("outcome document must be an object")
    fmt = doc.get("format")
    try:
        nodes, steps = int(doc["nodes"]), int(doc["steps"])
        backend = str(doc.get("backend", ""))
        if fmt == COUNTS_FORMAT:
            counts = {str(k): int(v) for k, v in doc["counts"].items()}
            if sum(counts.values()) != int(doc["shots"]):
                raise FileFormatError("counts do not sum to shots")
            return OutcomeFile(nodes, steps, backend, normalize_counts(counts), counts)
        if fmt == DIST_FORMAT:
            dist = {str(k): float(v) for k, v in doc["probabilities"].items()}
            if any(p < 0 for p in dist.values()) or not math.isclose(sum(dist.values()), 1, abs_tol=1e-9):
                raise FileFormatError("probabilities must be non-negative and sum to 1")
            return OutcomeFile(nodes, steps, backend, dist)
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        if isinstance(exc, FileFormatError):
            raise
        raise FileFormatError(f"malformed {fmt} document: {exc!r}") from exc
    raise FileFormatError(f"unknown outcome format {fmt!r}")


def load_outcomes(path: str | Path) -> OutcomeFile:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: not JSON ({exc})") from exc
    return parse_outcomes(doc)


def load_step_directory(path: str | Path) -> dict[int, list[OutcomeFile]]:
    """All outcome files in a directory, grouped by their ``steps`` field."""
    path = Path(path)
    if not path.is_dir():
        raise FileNotFoundError(f"{path} is not a directory")
    grouped: dict[int, list[OutcomeFile]] = {}
    for f in sorted(path.glob("*.json")):
        out = load_outcomes(f)
        grouped.setdefault(out.steps, []).append(out)
    if not grouped:
        raise FileFormatError(f"{path} holds no outcome files")
    return dict(sorted(grouped.items()))


def compare_directories(reference: str | Path, candidate: str | Path) -> FidelitySeries:
    """Fidelity of candidate repeats against a single reference file per step."""
    ref = load_step_directory(reference)
    cand = load_step_directory(candidate)
    for step, files in ref.items():
        if len(files) != 1:
            raise FileFormatError(f"reference has {len(files)} files for step {step}, expected 1")
    return fidelity_series(
        {s: f[0].distribution for s, f in ref.items()},
        {s: [o.distribution for o in f] for s, f in cand.items()},
    )


def write_run(results: Sequence[StepResult], out_dir: str | Path, nodes: int, backend: str) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for r in results:
        if r.counts:
            for i, c in enumerate(r.counts):
                p = out_dir / f"step_{r.step:02d}_rep_{i:02d}.json"
                p.write_text(dump_document(counts_document(c, nodes, r.step, backend)))
                written.append(p)
        else:
            p = out_dir / f"step_{r.step:02d}.json"
            p.write_text(dump_document(distribution_document(r.exact, nodes, r.step, backend)))
            written.append(p)
    return written

