import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coinwalk.analysis import FidelitySeries
from coinwalk.circuit import cnot, h, id_, mcx, rz, sx, x
from coinwalk.noise import (
    DEFAULT_RATES,
    NoiseModel,
    NoiseModelError,
    calibrate,
    default_model,
    grid_models,
    grid_search,
    lambda_for,
    scaled,
    simulated_fidelities,
)
from coinwalk.walk import WalkSpec

ALL_GATES = [h(0), x(0), sx(0), id_(0), rz(0.2, 0), cnot(0, 1), mcx([0, 1], 2),
             mcx([0, 1, 2], 3), mcx([0, 1, 2, 3], 4)]


class TestDefaults:
    def test_table_values(self):
        m = default_model()
        assert m.lambda_1q == 0.005
        assert m.lambda_2q == 0.02
        assert m.lambda_3q == 0.04
        assert m.lambda_multi == 0.6
        assert m.strength == 1.0
        assert m.mode == "abstract"

    def test_lambda_for_classes(self):
        m = default_model()
        assert lambda_for(m, mcx([0, 1, 2], 3)) == 0.6
        assert lambda_for(m, mcx([0, 1, 2, 3], 4)) == 0.6
        assert lambda_for(m, mcx([0, 1], 2)) == 0.04
        assert lambda_for(m, cnot(0, 1)) == 0.02
        assert lambda_for(m, id_(0)) == 0.005
        assert lambda_for(m, h(0)) == 0.005


class TestScaled:
    def test_cnot_at_ten_percent(self):
        assert lambda_for(scaled(default_model(), 0.1), cnot(0, 1)) == pytest.approx(0.002, abs=1e-15)

    def test_h_at_two_percent(self):
        assert lambda_for(scaled(default_model(), 0.02), h(0)) == pytest.approx(0.0001, abs=1e-15)

    def test_zero(self):
        m = scaled(default_model(), 0.0)
        assert all(m.lambda_for(g) == 0 for g in ALL_GATES)

    def test_fields_untouched(self):
        m = scaled(default_model(), 0.3)
        assert m.lambdas == default_model().lambdas

    @pytest.mark.parametrize("s", [-0.1, 1.01])
    def test_range(self, s):
        with pytest.raises(NoiseModelError):
            scaled(default_model(), s)

    @given(st.floats(0, 1), st.floats(0, 1))
    def test_monotone(self, a, b):
        lo, hi = sorted((a, b))
        for g in ALL_GATES:
            assert scaled(default_model(), lo).lambda_for(g) <= scaled(default_model(), hi).lambda_for(g)


class TestValidation:
    @pytest.mark.parametrize("kwargs", [
        {"lambda_1q": -0.01},
        {"lambda_1q": 4 / 3 + 1e-6},
        {"lambda_2q": 16 / 15 + 1e-6},
        {"lambda_multi": 1.01},
        {"mode": "pulse"},
    ])
    def test_rejects(self, kwargs):
        with pytest.raises(NoiseModelError):
            NoiseModel(**kwargs)

    def test_every_gate_classified(self):
        m = NoiseModel(0.1, 0.2, 0.3, 0.4)
        assert [m.lambda_for(g) for g in ALL_GATES] == [0.1] * 5 + [0.2, 0.3, 0.4, 0.4]


class TestDocument:
    def test_round_trip(self):
        m = NoiseModel(0.001, 0.01, 0.1, 0.5, 0.7, "native")
        assert NoiseModel.loads(m.dumps()) == m

    def test_field_names(self):
        doc = json.loads(default_model().dumps())
        assert doc == {"format": "noise/v1", **DEFAULT_RATES, "strength": 1.0, "mode": "abstract"}

    @pytest.mark.parametrize("text", [
        "{}",
        "nope",
        json.dumps({"format": "noise/v1", "lambda_1q": 0}),
        json.dumps({"format": "noise/v1", **DEFAULT_RATES, "strength": "x", "mode": "abstract"}),
    ])
    def test_rejects(self, text):
        with pytest.raises(NoiseModelError):
            NoiseModel.loads(text)


SMALL_WALK = WalkSpec(3, 5)


class TestCalibrate:
    def test_recovers_table_values(self):
        truth = default_model()
        reference = FidelitySeries.from_values(simulated_fidelities(truth, SMALL_WALK))
        grid = {name: [0.0, value, 2 * value if value < 0.5 else 0.9] for name, value in DEFAULT_RATES.items()}
        model, mse = calibrate(reference, SMALL_WALK, grid)
        assert model.lambdas == truth.lambdas
        assert mse == 0.0

    def test_noiseless_reference_gives_zero_model(self):
        reference = FidelitySeries.from_values([1.0] * (SMALL_WALK.steps + 1))
        model, mse = calibrate(reference, SMALL_WALK, {k: [0.0, v] for k, v in DEFAULT_RATES.items()})
        assert model.lambdas == (0.0, 0.0, 0.0, 0.0)
        assert mse < 1e-24

    def test_half_strength_picks_smaller_mse(self):
        half = simulated_fidelities(scaled(default_model(), 0.5), SMALL_WALK)
        reference = FidelitySeries.from_values(half)
        # independent MSE of the two candidates
        zero_mse = np.mean((1.0 - half) ** 2)
        full_mse = np.mean((simulated_fidelities(default_model(), SMALL_WALK) - half) ** 2)
        both = {k: [0.0, v] for k, v in DEFAULT_RATES.items()}
        scored = {m.lambdas: s for m, s in grid_search(reference, SMALL_WALK, both)}
        assert scored[(0.0, 0.0, 0.0, 0.0)] == pytest.approx(zero_mse, abs=1e-12)
        assert scored[tuple(DEFAULT_RATES.values())] == pytest.approx(full_mse, abs=1e-12)
        model, _ = calibrate(reference, SMALL_WALK, both)
        best = min(scored.values())
        assert scored[model.lambdas] == best

    def test_objective_minimal_over_grid(self):
        reference = FidelitySeries.from_values(
            simulated_fidelities(NoiseModel(0.01, 0.03, 0.0, 0.2), SMALL_WALK))
        grid = {"lambda_1q": [0.0, 0.02], "lambda_2q": [0.0, 0.05], "lambda_multi": [0.1, 0.3]}
        scored = grid_search(reference, SMALL_WALK, grid)
        assert len(scored) == 8
        model, mse = calibrate(reference, SMALL_WALK, grid)
        assert all(mse <= s for _, s in scored)

    def test_tie_break_lexicographic(self):
        # a zero-step walk has no gates, so every model ties
        walk = WalkSpec(2, 0)
        reference = FidelitySeries.from_values([1.0])
        model, _ = calibrate(reference, walk, {"lambda_1q": [0.3, 0.1, 0.2], "lambda_2q": [0.5, 0.4]})
        assert model.lambdas == (0.1, 0.4, 0.0, 0.0)

    def test_step_mismatch(self):
        with pytest.raises(NoiseModelError):
            calibrate(FidelitySeries.from_values([1.0, 1.0]), SMALL_WALK, {"lambda_1q": [0.0]})

    def test_empty_grid(self):
        with pytest.raises(NoiseModelError):
            grid_models({"lambda_1q": []})
        with pytest.raises(NoiseModelError):
            grid_models({"lambda_9q": [0.1]})
