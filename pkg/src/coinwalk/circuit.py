"""Gate set, circuit IR, serialization and a brute-force unitary builder.

Bit convention: qubit 0 is the least-significant bit of a basis-state index.
Output bitstrings list ``measured_qubits`` in order, most-significant first.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

FORMAT_VERSION = 1
UNITARY_QUBIT_CAP = 10

SINGLE_QUBIT_NAMES = ("H", "X", "SX", "ID", "RZ")
KIND_NAMES = SINGLE_QUBIT_NAMES + ("CNOT", "MCX")


class CircuitError(ValueError):
    """Raised for malformed gates, circuits or circuit documents."""


@dataclass(frozen=True)
class GateKind:
    name: str
    angle: float | None = None
    num_controls: int | None = None

    def __post_init__(self):
        if self.name not in KIND_NAMES:
            raise CircuitError(f"unknown gate kind {self.name!r}")
        if self.name == "RZ":
            if self.angle is None or not math.isfinite(self.angle):
                raise CircuitError("RZ needs a finite angle")
        elif self.angle is not None:
            raise CircuitError(f"{self.name} takes no angle")
        if self.name == "MCX":
            if self.num_controls is None or self.num_controls < 2:
                raise CircuitError("MCX needs num_controls >= 2")
        elif self.num_controls is not None:
            raise CircuitError(f"{self.name} takes no num_controls")

    @property
    def arity(self) -> int:
        if self.name == "CNOT":
            return 2
        if self.name == "MCX":
            return self.num_controls + 1
        return 1

    @property
    def label(self) -> str:
        """Census key: the kind name, with the control count appended for MCX."""
        if self.name == "MCX":
            return f"MCX{self.num_controls}"
        return self.name


H = GateKind("H")
X = GateKind("X")
SX = GateKind("SX")
ID = GateKind("ID")
CNOT = GateKind("CNOT")


def RZ(angle: float) -> GateKind:
    return GateKind("RZ", angle=float(angle))


def MCX(num_controls: int) -> GateKind:
    return GateKind("MCX", num_controls=num_controls)


@dataclass(frozen=True)
class Gate:
    """A gate kind applied to operands (controls first, target last)."""

    kind: GateKind
    operands: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "operands", tuple(int(q) for q in self.operands))
        if len(self.operands) != self.kind.arity:
            raise CircuitError(
                f"{self.kind.label} expects {self.kind.arity} operands, got {len(self.operands)}"
            )
        if len(set(self.operands)) != len(self.operands):
            raise CircuitError(f"duplicate operands {list(self.operands)}")
        if any(q < 0 for q in self.operands):
            raise CircuitError(f"negative qubit index in {list(self.operands)}")

    @property
    def controls(self) -> tuple[int, ...]:
        return self.operands[:-1]

    @property
    def target(self) -> int:
        return self.operands[-1]


def h(q: int) -> Gate:
    return Gate(H, (q,))


def x(q: int) -> Gate:
    return Gate(X, (q,))


def sx(q: int) -> Gate:
    return Gate(SX, (q,))


def id_(q: int) -> Gate:
    return Gate(ID, (q,))


def rz(angle: float, q: int) -> Gate:
    return Gate(RZ(angle), (q,))


def cnot(control: int, target: int) -> Gate:
    return Gate(CNOT, (control, target))


def mcx(controls: Sequence[int], target: int) -> Gate:
    """Multi-controlled X; one control gives a CNOT and none gives a bare X."""
    controls = tuple(controls)
    if not controls:
        return x(target)
    if len(controls) == 1:
        return cnot(controls[0], target)
    return Gate(MCX(len(controls)), controls + (target,))


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...] = ()
    measured_qubits: tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "measured_qubits", tuple(int(q) for q in self.measured_qubits))
        if self.num_qubits < 1:
            raise CircuitError("num_qubits must be >= 1")
        m = self.measured_qubits
        if len(set(m)) != len(m):
            raise CircuitError(f"duplicate measured qubit in {list(m)}")
        if any(not 0 <= q < self.num_qubits for q in m):
            raise CircuitError(f"measured qubit out of range in {list(m)}")
        for g in self.gates:
            self._check(g)

    def _check(self, gate: Gate):
        if not isinstance(gate, Gate):
            raise CircuitError(f"not a gate: {gate!r}")
        if any(q >= self.num_qubits for q in gate.operands):
            raise CircuitError(
                f"{gate.kind.label} operands {list(gate.operands)} out of range for "
                f"{self.num_qubits} qubits"
            )

    def append(self, gate: Gate) -> Circuit:
        self._check(gate)
        return Circuit(self.num_qubits, self.gates + (gate,), self.measured_qubits)

    def extend(self, gates: Iterable[Gate]) -> Circuit:
        return Circuit(self.num_qubits, self.gates + tuple(gates), self.measured_qubits)

    def then(self, other: Circuit) -> Circuit:
        """Concatenate: run ``self`` first, then ``other``."""
        if other.num_qubits != self.num_qubits:
            raise CircuitError("cannot concatenate circuits of different widths")
        return self.extend(other.gates)

    def __len__(self) -> int:
        return len(self.gates)


def new_circuit(num_qubits: int, measured_qubits: Sequence[int] | None = None) -> Circuit:
    if measured_qubits is None:
        measured_qubits = range(num_qubits - 1, -1, -1)
    return Circuit(num_qubits, (), tuple(measured_qubits))


def append(circuit: Circuit, gate: Gate) -> Circuit:
    return circuit.append(gate)


def gate_census(circuit: Circuit | Iterable[Gate]) -> dict[str, int]:
    gates = circuit.gates if isinstance(circuit, Circuit) else circuit
    return dict(Counter(g.kind.label for g in gates))


# -- gate matrices ---------------------------------------------------------
# Local matrices index operands with operands[0] as the most-significant bit.

_S2 = 1 / math.sqrt(2)
_FIXED = {
    "H": np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "SX": 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]]),
    "ID": np.eye(2, dtype=complex),
}


def gate_matrix(kind: GateKind) -> np.ndarray:
    """Dense ``2**arity`` square matrix of a gate kind."""
    if kind.name in _FIXED:
        return _FIXED[kind.name].copy()
    if kind.name == "RZ":
        half = kind.angle / 2
        return np.diag([np.exp(-1j * half), np.exp(1j * half)])
    # CNOT and MCX: identity except the last two basis states swap.
    dim = 2**kind.arity
    u = np.eye(dim, dtype=complex)
    u[[dim - 2, dim - 1]] = u[[dim - 1, dim - 2]]
    return u


def embed(gate: Gate, num_qubits: int) -> np.ndarray:
    """Full-register matrix of one gate, built by enumerating basis states."""
    k = len(gate.operands)
    local = gate_matrix(gate.kind)
    dim = 2**num_qubits
    basis = np.arange(dim)
    # local index of every basis state, operands[0] most significant
    local_idx = np.zeros(dim, dtype=np.int64)
    mask = 0
    for pos, q in enumerate(gate.operands):
        local_idx |= ((basis >> q) & 1) << (k - 1 - pos)
        mask |= 1 << q
    rest = basis & ~mask
    full = np.zeros((dim, dim), dtype=complex)
    for out in range(2**k):
        row = rest.copy()
        for pos, q in enumerate(gate.operands):
            row |= ((out >> (k - 1 - pos)) & 1) << q
        full[row, basis] = local[out, local_idx]
    return full


def unitary_of(circuit: Circuit) -> np.ndarray:
    """Product of all gate unitaries in application order."""
    n = circuit.num_qubits
    if n > UNITARY_QUBIT_CAP:
        raise CircuitError(f"unitary_of is capped at {UNITARY_QUBIT_CAP} qubits, got {n}")
    u = np.eye(2**n, dtype=complex)
    for g in circuit.gates:
        u = embed(g, n) @ u
    return u


def equal_up_to_phase(a: np.ndarray, b: np.ndarray) -> float:
    """Max-norm distance between ``a`` and ``b`` after aligning global phase.

    The phase is read off the largest-magnitude entry of ``b``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    i = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(a[i]) == 0:
        return float(np.max(np.abs(a - b)))
    phase = b[i] / a[i]
    phase /= abs(phase)
    return float(np.max(np.abs(a * phase - b)))


# -- serialization ---------------------------------------------------------


def to_document(circuit: Circuit) -> dict:
    gates = []
    for g in circuit.gates:
        entry = {"kind": g.kind.name}
        if g.kind.name == "RZ":
            entry["angle"] = g.kind.angle
        if g.kind.name in ("CNOT", "MCX"):
            entry["controls"] = list(g.controls)
        entry["target"] = g.target
        gates.append(entry)
    return {
        "version": FORMAT_VERSION,
        "num_qubits": circuit.num_qubits,
        "measured_qubits": list(circuit.measured_qubits),
        "gates": gates,
    }


def _gate_from_entry(entry, index: int) -> Gate:
    if not isinstance(entry, dict):
        raise CircuitError(f"gate {index}: expected an object")
    kind = entry.get("kind")
    if kind not in KIND_NAMES:
        raise CircuitError(f"gate {index}: unknown kind {kind!r}")
    if "target" not in entry:
        raise CircuitError(f"gate {index}: missing target")
    target = entry["target"]
    controls = entry.get("controls")
    if kind in ("CNOT", "MCX"):
        if not isinstance(controls, list):
            raise CircuitError(f"gate {index}: {kind} needs a controls array")
    elif controls is not None:
        raise CircuitError(f"gate {index}: {kind} takes no controls")
    if kind == "RZ":
        angle = entry.get("angle")
        if not isinstance(angle, (int, float)) or isinstance(angle, bool):
            raise CircuitError(f"gate {index}: RZ needs a numeric angle")
        return Gate(RZ(angle), (target,))
    if "angle" in entry:
        raise CircuitError(f"gate {index}: {kind} takes no angle")
    for q in (controls or []) + [target]:
        if not isinstance(q, int) or isinstance(q, bool):
            raise CircuitError(f"gate {index}: qubit indices must be integers")
    if kind == "CNOT":
        if len(controls) != 1:
            raise CircuitError(f"gate {index}: CNOT needs exactly one control")
        return Gate(CNOT, (controls[0], target))
    if kind == "MCX":
        return Gate(MCX(len(controls)), tuple(controls) + (target,))
    return Gate(GateKind(kind), (target,))


def from_document(doc) -> Circuit:
    if not isinstance(doc, dict):
        raise CircuitError("circuit document must be an object")
    if doc.get("version") != FORMAT_VERSION:
        raise CircuitError(f"unsupported circuit version {doc.get('version')!r}")
    for key in ("num_qubits", "measured_qubits", "gates"):
        if key not in doc:
            raise CircuitError(f"missing field {key!r}")
    if not isinstance(doc["gates"], list) or not isinstance(doc["measured_qubits"], list):
        raise CircuitError("gates and measured_qubits must be arrays")
    gates = [_gate_from_entry(e, i) for i, e in enumerate(doc["gates"])]
    return Circuit(doc["num_qubits"], tuple(gates), tuple(doc["measured_qubits"]))


def serialize(circuit: Circuit) -> str:
    return json.dumps(to_document(circuit), indent=1)


def deserialize(text: str) -> Circuit:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitError(f"malformed circuit document: {exc}") from exc
    return from_document(doc)
