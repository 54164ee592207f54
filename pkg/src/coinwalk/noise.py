"""Depolarizing noise models classed by gate width, and grid-search calibration."""
from __future__ import annotations

import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .analysis import FidelitySeries, hellinger_fidelity
from .circuit import Gate
from .simulator import depolarizing_bound, run_exact
from .walk import WalkSpec, walk_circuit

MODES = ("abstract", "native")
LAMBDA_FIELDS = ("lambda_1q", "lambda_2q", "lambda_3q", "lambda_multi")
# smallest gate width each class covers, for the depolarizing upper bound
_CLASS_WIDTH = {"lambda_1q": 1, "lambda_2q": 2, "lambda_3q": 3, "lambda_multi": 4}

# per-gate error rates that emulate the 5-qubit device at full strength
DEFAULT_RATES = {"lambda_1q": 0.005, "lambda_2q": 0.02, "lambda_3q": 0.04, "lambda_multi": 0.6}


class NoiseModelError(ValueError):
    pass


@dataclass(frozen=True)
class NoiseModel:
    lambda_1q: float = 0.0
    lambda_2q: float = 0.0
    lambda_3q: float = 0.0
    lambda_multi: float = 0.0
    strength: float = 1.0
    mode: str = "abstract"

    def __post_init__(self):
        for name in LAMBDA_FIELDS:
            value = getattr(self, name)
            bound = depolarizing_bound(_CLASS_WIDTH[name])
            if not 0 <= value <= bound:
                raise NoiseModelError(f"{name}={value} outside [0, {bound:.6g}]")
        if not 0 <= self.strength <= 1:
            raise NoiseModelError(f"strength {self.strength} outside [0, 1]")
        if self.mode not in MODES:
            raise NoiseModelError(f"mode must be one of {MODES}, got {self.mode!r}")

    @property
    def lambdas(self) -> tuple[float, float, float, float]:
        return tuple(getattr(self, name) for name in LAMBDA_FIELDS)

    def lambda_for(self, gate: Gate) -> float:
        """Effective depolarizing parameter for one gate, classed by operand count."""
        width = len(gate.operands)
        if width == 1:
            lam = self.lambda_1q
        elif width == 2:
            lam = self.lambda_2q
        elif width == 3:
            lam = self.lambda_3q
        else:
            lam = self.lambda_multi
        return self.strength * lam

    def to_document(self) -> dict:
        doc = {"format": "noise/v1"}
        doc.update({name: getattr(self, name) for name in LAMBDA_FIELDS})
        doc["strength"] = self.strength
        doc["mode"] = self.mode
        return doc

    @classmethod
    def from_document(cls, doc) -> NoiseModel:
        if not isinstance(doc, dict) or doc.get("format") != "noise/v1":
            raise NoiseModelError("not a noise/v1 document")
        missing = [k for k in LAMBDA_FIELDS + ("strength", "mode") if k not in doc]
        if missing:
            raise NoiseModelError(f"noise document missing {missing}")
        try:
            values = {k: float(doc[k]) for k in LAMBDA_FIELDS + ("strength",)}
        except (TypeError, ValueError) as exc:
            raise NoiseModelError(f"non-numeric noise parameter: {exc}") from exc
        return cls(mode=doc["mode"], **values)

    def dumps(self) -> str:
        return json.dumps(self.to_document(), indent=1)

    @classmethod
    def loads(cls, text: str) -> NoiseModel:
        try:
            return cls.from_document(json.loads(text))
        except json.JSONDecodeError as exc:
            raise NoiseModelError(f"malformed noise document: {exc}") from exc


def default_model() -> NoiseModel:
    return NoiseModel(**DEFAULT_RATES, strength=1.0, mode="abstract")


def scaled(model: NoiseModel, strength: float) -> NoiseModel:
    return replace(model, strength=strength)


def lambda_for(model: NoiseModel, gate: Gate) -> float:
    return model.lambda_for(gate)


# -- calibration -----------------------------------------------------------


def simulated_fidelities(model: NoiseModel, walk: WalkSpec,
                         steps: Sequence[int] | None = None) -> np.ndarray:
    """Fidelity of the noisy walk against the noiseless walk, one fresh circuit per step."""
    steps = range(walk.steps + 1) if steps is None else steps
    out = []
    for t in steps:
        circ = walk_circuit(walk.with_steps(t))
        out.append(hellinger_fidelity(run_exact(circ), run_exact(circ, model)))
    return np.array(out)


def _objective(args) -> float:
    model, walk, steps, target = args
    return float(np.mean((simulated_fidelities(model, walk, steps) - target) ** 2))


def grid_models(grid: Mapping[str, Sequence[float]], mode: str = "abstract") -> list[NoiseModel]:
    """Every combination of the listed lambda values; unlisted classes are zero."""
    unknown = set(grid) - set(LAMBDA_FIELDS)
    if unknown:
        raise NoiseModelError(f"unknown grid parameters {sorted(unknown)}")
    axes = [sorted(set(float(v) for v in grid.get(name, [0.0]))) for name in LAMBDA_FIELDS]
    if any(not a for a in axes):
        raise NoiseModelError("empty calibration grid")
    return [NoiseModel(*combo, strength=1.0, mode=mode) for combo in itertools.product(*axes)]


def grid_search(reference: FidelitySeries, walk: WalkSpec,
                grid: Mapping[str, Sequence[float]], mode: str = "abstract",
                jobs: int = 1) -> list[tuple[NoiseModel, float]]:
    """Mean squared fidelity error of every grid model, in lexicographic lambda order."""
    if reference.steps != list(range(walk.steps + 1)):
        raise NoiseModelError(
            f"reference covers steps {reference.steps}, walk needs 0..{walk.steps}"
        )
    models = grid_models(grid, mode)
    target = reference.fidelities
    tasks = [(m, walk, reference.steps, target) for m in models]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            scores = list(pool.map(_objective, tasks))
    else:
        scores = [_objective(t) for t in tasks]
    return list(zip(models, scores))


def calibrate(reference: FidelitySeries, walk: WalkSpec,
              grid: Mapping[str, Sequence[float]], mode: str = "abstract",
              jobs: int = 1) -> tuple[NoiseModel, float]:
    """Grid model whose simulated fidelity series best matches ``reference``.

    Ties go to the lexicographically smallest (lambda_1q, lambda_2q,
    lambda_3q, lambda_multi).  Returns the model and its mean squared error.
    """
    scored = grid_search(reference, walk, grid, mode, jobs)
    return min(scored, key=lambda ms: (ms[1], ms[0].lambdas))
