"""
Fitting gate error rates to a fidelity curve
============================================

Pretend a device produced the fidelity series of some unknown noise model,
then recover its per-class error rates by grid search.
"""
from coinwalk import FidelitySeries, NoiseModel, WalkSpec, calibrate, simulated_fidelities
from coinwalk.noise import grid_search

walk = WalkSpec(3, 6)
hidden = NoiseModel(lambda_1q=0.01, lambda_2q=0.02, lambda_3q=0.05, lambda_multi=0.4)
device = FidelitySeries.from_values(simulated_fidelities(hidden, walk))
print("device curve:", device.fidelities.round(3).tolist())

grid = {
    "lambda_1q": [0.0, 0.01, 0.02],
    "lambda_2q": [0.0, 0.02],
    "lambda_3q": [0.02, 0.05],
    "lambda_multi": [0.2, 0.4, 0.6],
}
model, mse = calibrate(device, walk, grid)
print("fitted:", model.lambdas, f"mse={mse:.2g}")

# how sharply the objective picks the winner
scored = sorted(grid_search(device, walk, grid), key=lambda ms: ms[1])
for m, score in scored[:4]:
    print(m.lambdas, f"{score:.2e}")

# a grid that misses the truth still returns the closest point it has
model, mse = calibrate(device, walk, {"lambda_2q": [0.01, 0.03], "lambda_multi": [0.3, 0.5]})
print("off-grid fit:", model.lambdas, f"mse={mse:.2g}")
