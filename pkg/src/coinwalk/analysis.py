"""Hellinger distance/fidelity between outcome distributions and per-step series."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np


class AnalysisError(ValueError):
    pass


def normalize_counts(counts: Mapping[str, int]) -> dict[str, float]:
    shots = sum(counts.values())
    if shots < 1:
        raise AnalysisError("counts contain zero shots")
    if any(c < 0 for c in counts.values()):
        raise AnalysisError("negative count")
    return {k: c / shots for k, c in counts.items()}


def _key_length(*dists: Mapping[str, float]) -> None:
    lengths = {len(k) for d in dists for k in d}
    if len(lengths) > 1:
        raise AnalysisError(f"bitstring lengths differ: {sorted(lengths)}")


def bhattacharyya(p: Mapping[str, float], q: Mapping[str, float]) -> float:
    """Sum of sqrt(p_i q_i); outcomes missing from either side count as zero."""
    _key_length(p, q)
    return math.fsum(math.sqrt(p[k] * q[k]) for k in p.keys() & q.keys() if p[k] > 0 and q[k] > 0)


def hellinger_distance(p: Mapping[str, float], q: Mapping[str, float]) -> float:
    bc = min(bhattacharyya(p, q), 1.0)
    return math.sqrt(1.0 - bc)


def hellinger_fidelity(p: Mapping[str, float], q: Mapping[str, float]) -> float:
    """(1 - H**2)**2, which is 1 for equal distributions and 0 for disjoint ones."""
    return (1.0 - hellinger_distance(p, q) ** 2) ** 2


@dataclass(frozen=True)
class FidelityPoint:
    step: int
    fidelity_mean: float
    std_error: float
    repeats: int


@dataclass(frozen=True)
class FidelitySeries:
    points: tuple[FidelityPoint, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        steps = [p.step for p in self.points]
        if any(b <= a for a, b in zip(steps, steps[1:])):
            raise AnalysisError("steps must be strictly increasing")

    @property
    def steps(self) -> list[int]:
        return [p.step for p in self.points]

    @property
    def fidelities(self) -> np.ndarray:
        return np.array([p.fidelity_mean for p in self.points])

    def __getitem__(self, step: int) -> FidelityPoint:
        for p in self.points:
            if p.step == step:
                return p
        raise KeyError(step)

    def __len__(self) -> int:
        return len(self.points)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "fidelity", "std_error", "repeats"])
        for p in self.points:
            w.writerow([p.step, f"{p.fidelity_mean:.6g}", f"{p.std_error:.6g}", p.repeats])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> FidelitySeries:
        rows = csv.DictReader(io.StringIO(text))
        if rows.fieldnames != ["step", "fidelity", "std_error", "repeats"]:
            raise AnalysisError(f"unexpected fidelity CSV header {rows.fieldnames}")
        return cls(tuple(
            FidelityPoint(int(r["step"]), float(r["fidelity"]), float(r["std_error"]), int(r["repeats"]))
            for r in rows
        ))

    @classmethod
    def from_values(cls, fidelities: Iterable[float], steps: Iterable[int] | None = None) -> FidelitySeries:
        fidelities = list(fidelities)
        steps = range(len(fidelities)) if steps is None else steps
        return cls(tuple(FidelityPoint(s, float(f), 0.0, 1) for s, f in zip(steps, fidelities)))


def fidelity_series(reference: Mapping[int, Mapping[str, float]],
                    candidate: Mapping[int, Sequence[Mapping[str, float]]]) -> FidelitySeries:
    """Per-step fidelity of every candidate repeat against the reference.

    ``std_error`` is the sample standard deviation over repeats divided by
    sqrt(repeats), and 0 for a single repeat.
    """
    if sorted(reference) != sorted(candidate):
        raise AnalysisError(
            f"step ranges differ: {sorted(reference)} vs {sorted(candidate)}"
        )
    points = []
    for step in sorted(reference):
        repeats = list(candidate[step])
        if not repeats:
            raise AnalysisError(f"step {step} has no candidate repeats")
        f = np.array([hellinger_fidelity(reference[step], d) for d in repeats])
        r = len(f)
        err = float(np.std(f, ddof=1) / math.sqrt(r)) if r > 1 else 0.0
        points.append(FidelityPoint(step, float(f.mean()), err, r))
    return FidelitySeries(tuple(points))
