"""Coined discrete-time quantum walks on cycle graphs of ``2**n`` nodes.

Register layout: position qubits ``0..n-1`` (qubit 0 least significant),
coin on qubit ``n``.  Coin 0 moves the walker +1, coin 1 moves it -1, and
the shift never changes the coin.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate, cnot, h, mcx, new_circuit, rz, x


class CoinInit(enum.Enum):
    ZERO = "zero"
    ONE = "one"
    SYMMETRIC = "symmetric"  # (|0> + i|1>)/sqrt(2)


@dataclass(frozen=True)
class WalkSpec:
    num_position_qubits: int
    steps: int
    coin_init: CoinInit = CoinInit.ZERO
    use_optimized_4node: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coin_init", CoinInit(self.coin_init))
        if self.num_position_qubits < 1:
            raise ValueError("need at least one position qubit")
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if self.use_optimized_4node and self.num_position_qubits != 2:
            raise ValueError("the optimized STEP gate only exists for 4 nodes (n=2)")

    @property
    def nodes(self) -> int:
        return 2**self.num_position_qubits

    @property
    def coin(self) -> int:
        return self.num_position_qubits

    @property
    def num_qubits(self) -> int:
        return self.num_position_qubits + 1

    def with_steps(self, steps: int) -> WalkSpec:
        return WalkSpec(self.num_position_qubits, steps, self.coin_init, self.use_optimized_4node)


def _check_n(n: int):
    if n < 1:
        raise ValueError(f"need n >= 1 position qubits, got {n}")


def _carry_cascade(n: int) -> list[Gate]:
    coin = n
    gates = []
    for j in range(n - 1, -1, -1):
        gates.append(mcx((coin,) + tuple(range(j)), j))
    return gates


def increment_gates(n: int) -> list[Gate]:
    """+1 mod 2**n on the position register when the coin is 0."""
    _check_n(n)
    return [x(n)] + _carry_cascade(n) + [x(n)]


def decrement_gates(n: int) -> list[Gate]:
    """-1 mod 2**n on the position register when the coin is 1 (x-1 = ~(~x+1))."""
    _check_n(n)
    flips = [x(q) for q in range(n)]
    return flips + _carry_cascade(n) + flips


def four_node_step_gates() -> list[Gate]:
    """Combined shift for the 4-node cycle: two CNOTs and an X, no Toffolis."""
    return [cnot(0, 1), cnot(2, 1), x(0)]


def _fragment(n: int, gates: list[Gate]) -> Circuit:
    return Circuit(n + 1, tuple(gates), tuple(range(n - 1, -1, -1)))


def increment_circuit(n: int) -> Circuit:
    return _fragment(n, increment_gates(n))


def decrement_circuit(n: int) -> Circuit:
    return _fragment(n, decrement_gates(n))


def shift_circuit(n: int) -> Circuit:
    return _fragment(n, increment_gates(n) + decrement_gates(n))


def four_node_step() -> Circuit:
    return _fragment(2, four_node_step_gates())


def coin_init_gates(coin_init: CoinInit, coin: int) -> list[Gate]:
    if coin_init is CoinInit.ONE:
        return [x(coin)]
    if coin_init is CoinInit.SYMMETRIC:
        # H then a quarter-turn phase gives (|0> + i|1>)/sqrt(2) up to global phase
        return [h(coin), rz(math.pi / 2, coin)]
    return []


def step_gates(spec: WalkSpec) -> list[Gate]:
    n = spec.num_position_qubits
    if spec.use_optimized_4node:
        shift = four_node_step_gates()
    else:
        shift = increment_gates(n) + decrement_gates(n)
    return [h(spec.coin)] + shift


def walk_circuit(spec: WalkSpec) -> Circuit:
    n = spec.num_position_qubits
    circ = new_circuit(n + 1, range(n - 1, -1, -1))
    gates = coin_init_gates(spec.coin_init, spec.coin)
    block = step_gates(spec)
    for _ in range(spec.steps):
        gates.extend(block)
    return circ.extend(gates)


# -- independent oracle ----------------------------------------------------

ORACLE_CAP = 2**20


def _initial_amplitudes(spec: WalkSpec) -> np.ndarray:
    amps = np.zeros((spec.nodes, 2), dtype=complex)
    if spec.coin_init is CoinInit.ZERO:
        amps[0, 0] = 1
    elif spec.coin_init is CoinInit.ONE:
        amps[0, 1] = 1
    else:
        amps[0] = np.array([1, 1j]) / math.sqrt(2)
    return amps


def oracle_step(amps: np.ndarray) -> np.ndarray:
    """One application of coin-then-shift on an ``(N, 2)`` amplitude table."""
    a0, a1 = amps[:, 0], amps[:, 1]
    flipped = np.empty_like(amps)
    flipped[:, 0] = (a0 + a1) / math.sqrt(2)
    flipped[:, 1] = (a0 - a1) / math.sqrt(2)
    out = np.empty_like(amps)
    out[:, 0] = np.roll(flipped[:, 0], 1)  # amplitude at x moves to x+1
    out[:, 1] = np.roll(flipped[:, 1], -1)  # amplitude at x moves to x-1
    return out


def walk_amplitudes(spec: WalkSpec) -> np.ndarray:
    if 2 * spec.nodes > ORACLE_CAP:
        raise ValueError("walk oracle is capped at 2**20 basis states")
    amps = _initial_amplitudes(spec)
    for _ in range(spec.steps):
        amps = oracle_step(amps)
    return amps


def walk_oracle(spec: WalkSpec) -> dict[str, float]:
    """Position distribution of the walk computed directly on amplitudes.

    Does not touch the circuit IR; nodes with zero probability are omitted.
    """
    probs = np.sum(np.abs(walk_amplitudes(spec)) ** 2, axis=1)
    n = spec.num_position_qubits
    return {format(node, f"0{n}b"): float(p) for node, p in enumerate(probs) if p > 1e-15}
