import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coinwalk.circuit import Gate, cnot, h, id_, new_circuit, rz, unitary_of, x
from coinwalk.noise import NoiseModel, default_model, scaled
from coinwalk.simulator import (
    SimulationError,
    apply_depolarizing,
    apply_gate_density,
    density_from_state,
    depolarizing_pauli_form,
    evolve_density,
    evolve_statevector,
    marginal_distribution,
    run_exact,
    sample_counts,
    zero_state,
)
from coinwalk.walk import WalkSpec, walk_circuit, walk_oracle

from conftest import assert_dist_close, circuits, random_density


def check_density(rho):
    assert np.max(np.abs(rho - rho.conj().T)) <= 1e-10
    assert abs(np.trace(rho) - 1) <= 1e-10
    assert np.linalg.eigvalsh(rho).min() >= -1e-9


class TestStatevector:
    def test_empty_circuit(self):
        psi = np.array([0.6, 0.8j])
        assert np.array_equal(evolve_statevector(new_circuit(1), psi), psi)

    def test_hadamard(self):
        psi = evolve_statevector(new_circuit(1).append(h(0)))
        np.testing.assert_allclose(psi, [1 / math.sqrt(2)] * 2, atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(SimulationError):
            evolve_statevector(new_circuit(2), np.ones(2))

    def test_eight_node_eight_steps(self):
        for t in range(9):
            spec = WalkSpec(3, t)
            psi = evolve_statevector(walk_circuit(spec))
            assert abs(np.linalg.norm(psi) - 1) <= 1e-10
            got = marginal_distribution(np.abs(psi) ** 2, (2, 1, 0), 4)
            assert_dist_close(got, walk_oracle(spec), 1e-9)

    @settings(max_examples=40, deadline=None)
    @given(circuits())
    def test_matches_unitary_oracle(self, c):
        psi = evolve_statevector(c)
        assert np.max(np.abs(psi - unitary_of(c)[:, 0])) <= 1e-12


class TestGateDensity:
    def test_identity(self, rng):
        rho = random_density(2, rng)
        np.testing.assert_allclose(apply_gate_density(rho, id_(1)), rho, atol=1e-15)

    def test_x(self):
        got = apply_gate_density(np.diag([1, 0]).astype(complex), x(0))
        np.testing.assert_allclose(got, np.diag([0, 1]), atol=1e-15)

    def test_h(self):
        got = apply_gate_density(np.diag([1, 0]).astype(complex), h(0))
        np.testing.assert_allclose(got, np.full((2, 2), 0.5), atol=1e-15)

    @settings(max_examples=30, deadline=None)
    @given(circuits(max_qubits=4), st.integers(0, 2**32 - 1))
    def test_conjugation_matches_unitary(self, c, seed):
        rho = random_density(c.num_qubits, np.random.default_rng(seed))
        u = unitary_of(c)
        got = evolve_density(c, initial=rho)
        assert np.max(np.abs(got - u @ rho @ u.conj().T)) <= 1e-12
        check_density(got)


class TestDepolarizing:
    def test_zero_lambda(self, rng):
        rho = random_density(2, rng)
        assert np.array_equal(apply_depolarizing(rho, [0], 0.0), rho)

    def test_full_one_qubit(self):
        got = apply_depolarizing(np.diag([1, 0]).astype(complex), [0], 1.0)
        np.testing.assert_allclose(got, np.diag([0.5, 0.5]), atol=1e-15)

    def test_one_qubit_maximum(self):
        got = apply_depolarizing(np.diag([1, 0]).astype(complex), [0], 4 / 3)
        np.testing.assert_allclose(got, np.diag([1 / 3, 2 / 3]), atol=1e-15)

    @pytest.mark.parametrize("n, qubits", [(1, [0]), (2, [0]), (2, [1]), (2, [0, 1]),
                                           (2, [1, 0]), (3, [2, 0]), (3, [1]), (4, [3, 1])])
    def test_pauli_form(self, n, qubits, rng):
        rho = random_density(n, rng)
        for lam in (0.0, 0.3, 1.0, 4**len(qubits) / (4**len(qubits) - 1)):
            diff = apply_depolarizing(rho, qubits, lam) - depolarizing_pauli_form(rho, qubits, lam)
            assert np.max(np.abs(diff)) <= 1e-12

    def test_partial_acts_locally(self):
        # |01><01| with qubit 0 depolarized fully -> I/2 on qubit 0, qubit 1 stays |0>
        rho = np.zeros((4, 4), dtype=complex)
        rho[1, 1] = 1
        got = apply_depolarizing(rho, [0], 1.0)
        np.testing.assert_allclose(got, np.diag([0.5, 0.5, 0, 0]), atol=1e-15)

    @pytest.mark.parametrize("k, lam", [(1, 4 / 3 + 1e-9), (2, 16 / 15 + 1e-9), (1, -0.1)])
    def test_bound(self, k, lam, rng):
        with pytest.raises(SimulationError):
            apply_depolarizing(random_density(2, rng), list(range(k)), lam)

    def test_empty_qubits(self, rng):
        with pytest.raises(SimulationError):
            apply_depolarizing(random_density(1, rng), [], 0.1)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 4), st.data(), st.integers(0, 2**32 - 1))
    def test_preserves_state_properties(self, n, data, seed):
        qubits = data.draw(st.permutations(range(n)))[: data.draw(st.integers(1, n))]
        k = len(qubits)
        lam = data.draw(st.floats(0, 4**k / (4**k - 1)))
        rho = random_density(n, np.random.default_rng(seed), rank=data.draw(st.integers(1, 2**n)))
        out = apply_depolarizing(rho, qubits, lam)
        assert abs(np.trace(out) - np.trace(rho)) <= 1e-12
        check_density(out)


class TestRunExact:
    def test_zero_steps(self):
        assert_dist_close(run_exact(walk_circuit(WalkSpec(3, 0))), {"000": 1.0}, 1e-12)

    def test_one_step(self):
        assert_dist_close(run_exact(walk_circuit(WalkSpec(3, 1))), {"001": 0.5, "111": 0.5}, 1e-12)

    def test_full_depolarization_after_h(self):
        c = new_circuit(1, [0]).append(h(0))
        model = NoiseModel(lambda_1q=1.0)
        # without noise H|0> measures 50/50 too; check the state actually went mixed
        rho = evolve_density(c, model)
        np.testing.assert_allclose(rho, np.eye(2) / 2, atol=1e-15)
        assert_dist_close(run_exact(c, model), {"0": 0.5, "1": 0.5}, 1e-12)

    @pytest.mark.parametrize("n, t", [(2, 3), (3, 4), (4, 2)])
    def test_zero_noise_matches_noiseless(self, n, t):
        c = walk_circuit(WalkSpec(n, t))
        zero = NoiseModel(0.0, 0.0, 0.0, 0.0)
        assert_dist_close(run_exact(c, zero), run_exact(c), 1e-10)
        assert_dist_close(run_exact(c, scaled(default_model(), 0.0)), run_exact(c), 1e-10)

    def test_noisy_state_is_valid(self):
        rho = evolve_density(walk_circuit(WalkSpec(4, 3)), default_model())
        check_density(rho)

    def test_native_mode_transpiles(self):
        c = walk_circuit(WalkSpec(3, 2))
        native = NoiseModel(0.0, 0.0, 0.5, 0.5, mode="native")
        # 3q and multi classes never see a native gate
        assert_dist_close(run_exact(c, native), run_exact(c), 1e-10)

    @settings(max_examples=30, deadline=None)
    @given(circuits(max_qubits=5))
    def test_marginal_consistency(self, c):
        probs = np.abs(evolve_statevector(c)) ** 2
        full = marginal_distribution(probs, range(c.num_qubits - 1, -1, -1), c.num_qubits)
        expected = {}
        for bits, p in full.items():
            # full bitstring position i holds qubit n-1-i
            key = "".join(bits[c.num_qubits - 1 - q] for q in c.measured_qubits)
            expected[key] = expected.get(key, 0.0) + p
        assert_dist_close(run_exact(c), expected, 1e-12)

    def test_marginal_order(self):
        # X on qubit 0 only; measuring [0, 2] renders qubit 0 first
        c = new_circuit(3, [0, 2]).append(x(0))
        assert run_exact(c) == {"10": 1.0}

    def test_density_path_bell_state(self):
        c = new_circuit(2, [1, 0]).extend([h(0), cnot(0, 1), rz(0.4, 1)])
        assert_dist_close(run_exact(c, NoiseModel()), {"00": 0.5, "11": 0.5}, 1e-12)

    def test_capacity(self):
        with pytest.raises(SimulationError):
            run_exact(new_circuit(13), NoiseModel())


class TestSampling:
    def test_point_mass(self):
        assert sample_counts({"101": 1.0}, 1000, 5) == {"101": 1000}

    def test_deterministic(self):
        dist = walk_oracle(WalkSpec(4, 7))
        assert sample_counts(dist, 4096, 11) == sample_counts(dist, 4096, 11)
        assert sample_counts(dist, 4096, 11) != sample_counts(dist, 4096, 12)

    def test_sums_to_shots(self):
        assert sum(sample_counts({"0": 0.3, "1": 0.7}, 777, 1).values()) == 777

    def test_uniform_within_six_sigma(self):
        dist = {format(i, "04b"): 1 / 16 for i in range(16)}
        counts = sample_counts(dist, 4096, 2021)
        sigma = math.sqrt(4096 * (1 / 16) * (15 / 16))
        assert len(counts) == 16
        assert all(abs(c - 256) <= 6 * sigma for c in counts.values())

    def test_shots_positive(self):
        with pytest.raises(SimulationError):
            sample_counts({"0": 1.0}, 0, 1)


def test_zero_state():
    assert np.array_equal(density_from_state(zero_state(1)), np.diag([1, 0]))


def test_gate_instance_validation_surfaces():
    with pytest.raises(ValueError):
        Gate(h(0).kind, (0, 1))
