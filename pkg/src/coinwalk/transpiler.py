"""Lowering to the native gate set {CNOT, ID, RZ, SX, X}.

H becomes RZ(pi/2) SX RZ(pi/2).  An MCX with k controls becomes an
H-conjugated C^k-Z, and the C^k-Z is synthesized as a phase polynomial:

    pi * x_0 x_1 ... x_k = sum over nonempty subsets S of
                           (-1)**(|S|-1) * pi / 2**k * parity(S)

Every parity term is one RZ on a qubit that temporarily holds that parity.
The terms are visited in Gray-code order so each move costs one CNOT,
giving 2**(k+1) - 2 CNOTs and 2**(k+1) - 1 RZs, ancilla-free.
"""
from __future__ import annotations

import math
from typing import Iterable, Sequence

from .circuit import Circuit, Gate, CircuitError, cnot, gate_census, rz, sx

NATIVE_KINDS = frozenset({"CNOT", "ID", "RZ", "SX", "X"})
_ZERO_TOL = 1e-12


def decompose_h(qubit: int) -> list[Gate]:
    return [rz(math.pi / 2, qubit), sx(qubit), rz(math.pi / 2, qubit)]


def _gray_sequence(bits: int) -> list[int]:
    return [i ^ (i >> 1) for i in range(2**bits)]


def phase_network(qubits: Sequence[int]) -> list[Gate]:
    """C^k-Z on ``qubits`` (k = len - 1), up to global phase, from CNOTs and RZs.

    The last qubit is the first accumulator; it cycles through every parity
    that includes it, then hands over to the remaining qubits recursively.
    """
    qubits = list(qubits)
    m = len(qubits)
    if m < 2:
        raise ValueError("phase network needs at least two qubits")
    unit = math.pi / 2 ** (m - 1)
    gates: list[Gate] = []
    for end in range(m, 0, -1):
        acc = qubits[end - 1]
        others = qubits[: end - 1]
        codes = _gray_sequence(len(others))
        prev = 0
        for code in codes:
            changed = code ^ prev
            if changed:
                gates.append(cnot(others[changed.bit_length() - 1], acc))
            weight = bin(code).count("1") + 1
            gates.append(rz((-1) ** (weight - 1) * unit, acc))
            prev = code
        if prev:
            gates.append(cnot(others[prev.bit_length() - 1], acc))
    return gates


def decompose_mcx(controls: Sequence[int], target: int) -> list[Gate]:
    """Native (unmerged) sequence for an X controlled on every qubit in ``controls``."""
    controls = tuple(controls)
    if len(controls) < 2:
        raise CircuitError("decompose_mcx needs at least two controls")
    operands = controls + (target,)
    if len(set(operands)) != len(operands):
        raise CircuitError(f"duplicate operands {list(operands)}")
    return decompose_h(target) + phase_network(operands) + decompose_h(target)


def merge_rz(gates: Iterable[Gate] | Circuit) -> list[Gate] | Circuit:
    """Fuse runs of RZ on the same qubit and drop rotations that are 0 mod 4pi.

    Accepts a gate list or a circuit and returns the same type.
    """
    if isinstance(gates, Circuit):
        return Circuit(gates.num_qubits, tuple(merge_rz(gates.gates)), gates.measured_qubits)
    out: list[Gate | None] = []
    # index in ``out`` of a pending RZ on each qubit, cleared by any other gate on it
    pending: dict[int, int] = {}
    for g in gates:
        if g.kind.name == "RZ":
            q = g.target
            if q in pending:
                i = pending[q]
                out[i] = rz(out[i].kind.angle + g.kind.angle, q)
            else:
                pending[q] = len(out)
                out.append(g)
            continue
        for q in g.operands:
            pending.pop(q, None)
        out.append(g)
    return [g for g in out if not (g.kind.name == "RZ" and _is_trivial(g.kind.angle))]


def _is_trivial(angle: float) -> bool:
    r = math.remainder(angle, 4 * math.pi)
    return abs(r) <= _ZERO_TOL


def lower_gate(g: Gate) -> list[Gate]:
    name = g.kind.name
    if name in NATIVE_KINDS:
        return [g]
    if name == "H":
        return decompose_h(g.target)
    if name == "MCX":
        return decompose_mcx(g.controls, g.target)
    raise CircuitError(f"no lowering for {g.kind.label}")


def transpile(circuit: Circuit) -> Circuit:
    lowered: list[Gate] = []
    for g in circuit.gates:
        lowered.extend(lower_gate(g))
    return Circuit(circuit.num_qubits, tuple(merge_rz(lowered)), circuit.measured_qubits)


def is_native(circuit: Circuit) -> bool:
    return all(g.kind.name in NATIVE_KINDS for g in circuit.gates)


def census_report(source: Circuit, native: Circuit, steps: int | None = None) -> dict:
    """Before/after gate counts; with ``steps`` also the average per walk step."""
    before, after = gate_census(source), gate_census(native)
    report = {
        "before": dict(sorted(before.items())),
        "after": dict(sorted(after.items())),
        "total_before": len(source),
        "total_after": len(native),
    }
    if steps:
        report["steps"] = steps
        report["per_step_total"] = {
            "before": len(source) / steps,
            "after": len(native) / steps,
        }
    return report
