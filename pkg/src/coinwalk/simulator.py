"""Exact statevector and density-matrix evolution of circuits.

States are stored as dense numpy arrays.  Internally they are reshaped to
one axis per qubit; with C ordering, qubit ``q`` of an ``n``-qubit register
lives on axis ``n - 1 - q``.
"""
from __future__ import annotations

import itertools
from typing import TYPE_CHECKING, Mapping, Sequence

import numpy as np

from .circuit import Circuit, Gate, gate_matrix
from .transpiler import transpile

if TYPE_CHECKING:
    from .noise import NoiseModel

DENSITY_QUBIT_CAP = 12
PROB_FLOOR = 1e-15


class SimulationError(ValueError):
    pass


def _axes(qubits: Sequence[int], n: int) -> list[int]:
    return [n - 1 - q for q in qubits]


def _apply_local(tensor: np.ndarray, matrix: np.ndarray, axes: list[int]) -> np.ndarray:
    """Contract a ``2**k`` square matrix into the given tensor axes."""
    k = len(axes)
    m = matrix.reshape((2,) * (2 * k))
    out = np.tensordot(m, tensor, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes)


def zero_state(num_qubits: int) -> np.ndarray:
    psi = np.zeros(2**num_qubits, dtype=complex)
    psi[0] = 1
    return psi


def evolve_statevector(circuit: Circuit, initial: np.ndarray | None = None) -> np.ndarray:
    n = circuit.num_qubits
    psi = zero_state(n) if initial is None else np.asarray(initial, dtype=complex)
    if psi.shape != (2**n,):
        raise SimulationError(f"state of shape {psi.shape} does not fit {n} qubits")
    t = psi.reshape((2,) * n)
    for g in circuit.gates:
        t = _apply_local(t, gate_matrix(g.kind), _axes(g.operands, n))
    return t.reshape(-1)


def density_from_state(psi: np.ndarray) -> np.ndarray:
    return np.outer(psi, psi.conj())


def _num_qubits_of(rho: np.ndarray) -> int:
    dim = rho.shape[0]
    n = dim.bit_length() - 1
    if rho.shape != (dim, dim) or 2**n != dim:
        raise SimulationError(f"not a register density matrix: shape {rho.shape}")
    return n


def apply_gate_density(rho: np.ndarray, gate: Gate) -> np.ndarray:
    """rho -> U rho U^dagger."""
    n = _num_qubits_of(rho)
    u = gate_matrix(gate.kind)
    t = rho.reshape((2,) * (2 * n))
    rows = _axes(gate.operands, n)
    cols = [a + n for a in rows]
    t = _apply_local(t, u, rows)
    t = _apply_local(t, u.conj(), cols)
    return t.reshape(rho.shape)


def depolarizing_bound(k: int) -> float:
    return 4**k / (4**k - 1)


def apply_depolarizing(rho: np.ndarray, qubits: Sequence[int], lam: float) -> np.ndarray:
    """(1 - lam) rho + lam * Tr_qubits(rho) (x) I / 2**k, re-embedded in place."""
    qubits = list(qubits)
    k = len(qubits)
    if k == 0:
        raise SimulationError("depolarizing channel needs at least one qubit")
    if len(set(qubits)) != k:
        raise SimulationError(f"duplicate qubits {qubits}")
    if not 0 <= lam <= depolarizing_bound(k):
        raise SimulationError(f"lambda {lam} outside [0, {depolarizing_bound(k)}] for {k} qubit(s)")
    if lam == 0:
        return rho
    n = _num_qubits_of(rho)
    if any(not 0 <= q < n for q in qubits):
        raise SimulationError(f"qubits {qubits} out of range")
    rows = _axes(qubits, n)
    rest = [a for a in range(n) if a not in rows]
    order = rest + rows + [a + n for a in rest] + [a + n for a in rows]
    dr, dk = 2 ** (n - k), 2**k
    t = rho.reshape((2,) * (2 * n)).transpose(order).reshape(dr, dk, dr, dk)
    reduced = np.einsum("akbk->ab", t)
    mixed = reduced[:, None, :, None] * (np.eye(dk) / dk)[None, :, None, :]
    out = (1 - lam) * t + lam * mixed
    out = out.reshape((2,) * (2 * n)).transpose(np.argsort(order))
    return out.reshape(rho.shape)


_PAULIS = [
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]]),
    np.array([[1, 0], [0, -1]], dtype=complex),
]


def depolarizing_pauli_form(rho: np.ndarray, qubits: Sequence[int], lam: float) -> np.ndarray:
    """Same channel written as (1 - lam) rho + lam/4**k * sum_P P rho P.

    Builds every Pauli string as a full-register matrix; small registers only.
    """
    n = _num_qubits_of(rho)
    k = len(qubits)
    total = np.zeros_like(rho)
    for paulis in itertools.product(_PAULIS, repeat=k):
        factors = [np.eye(2, dtype=complex)] * n
        for q, p in zip(qubits, paulis):
            factors[n - 1 - q] = p
        full = factors[0]
        for f in factors[1:]:
            full = np.kron(full, f)
        total += full @ rho @ full.conj().T
    return (1 - lam) * rho + lam / 4**k * total


def _bitstrings(measured: Sequence[int], n: int) -> tuple[np.ndarray, int]:
    """Index of the measured-bit pattern for every basis state."""
    basis = np.arange(2**n)
    m = len(measured)
    idx = np.zeros(2**n, dtype=np.int64)
    for pos, q in enumerate(measured):
        idx |= ((basis >> q) & 1) << (m - 1 - pos)
    return idx, m


def marginal_distribution(probs: np.ndarray, measured: Sequence[int], n: int) -> dict[str, float]:
    """Sum full-register basis probabilities onto the measured qubits."""
    idx, m = _bitstrings(measured, n)
    marg = np.bincount(idx, weights=np.clip(probs, 0, None), minlength=2**m)
    return {format(i, f"0{m}b"): float(p) for i, p in enumerate(marg) if p > PROB_FLOOR}


def evolve_density(circuit: Circuit, noise: NoiseModel | None = None,
                   initial: np.ndarray | None = None) -> np.ndarray:
    n = circuit.num_qubits
    if n > DENSITY_QUBIT_CAP:
        raise SimulationError(f"density-matrix simulation capped at {DENSITY_QUBIT_CAP} qubits")
    rho = density_from_state(zero_state(n)) if initial is None else np.array(initial, dtype=complex)
    for g in circuit.gates:
        rho = apply_gate_density(rho, g)
        if noise is not None:
            lam = noise.lambda_for(g)
            if lam:
                rho = apply_depolarizing(rho, g.operands, lam)
    return rho


def run_exact(circuit: Circuit, noise: NoiseModel | None = None) -> dict[str, float]:
    """Exact outcome distribution over ``circuit.measured_qubits``.

    Without noise this goes through the statevector path.  With noise the
    density matrix is evolved with a depolarizing channel after every gate
    on that gate's operands; native-mode models transpile first.
    """
    n = circuit.num_qubits
    if noise is None:
        probs = np.abs(evolve_statevector(circuit)) ** 2
    else:
        if noise.mode == "native":
            circuit = transpile(circuit)
        probs = np.real(np.diag(evolve_density(circuit, noise)))
    return marginal_distribution(probs, circuit.measured_qubits, n)


def sample_counts(dist: Mapping[str, float], shots: int, seed: int | None) -> dict[str, int]:
    """Multinomial draw of ``shots`` outcomes; identical for identical seeds."""
    if shots < 1:
        raise SimulationError("shots must be >= 1")
    keys = sorted(dist)
    p = np.array([dist[k] for k in keys], dtype=float)
    p = np.clip(p, 0, None)
    p /= p.sum()
    draws = np.random.default_rng(seed).multinomial(shots, p)
    return {k: int(c) for k, c in zip(keys, draws) if c}
