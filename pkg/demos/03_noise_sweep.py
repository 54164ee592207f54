"""
Fidelity under scaled depolarizing noise
========================================

Sweep the noise strength on a 16-node, 16-step walk and watch the
Hellinger fidelity against the noiseless run decay towards its floor.
Pass an output path to also draw the curves (needs matplotlib).
"""
import sys

from coinwalk import SweepConfig, default_model, sweep

config = SweepConfig(nodes=16, max_steps=16, strengths=(0.0, 0.02, 0.1, 0.3, 1.0),
                     noise_model=default_model())
results = sweep(config)

print("step " + " ".join(f"{s:>6.0%}" for s in results))
for t in range(config.max_steps + 1):
    print(f"{t:>4} " + " ".join(f"{series[t].fidelity_mean:6.3f}" for series in results.values()))

# sampled mode adds shot noise and error bars; the seed makes it repeatable
noisy = sweep(SweepConfig(nodes=8, max_steps=4, strengths=(0.1,), mode="sampled",
                          shots=1024, repeats=10, seed=7))
for p in noisy[0.1].points:
    print(f"step {p.step}: {p.fidelity_mean:.3f} +/- {p.std_error:.3f}")

if len(sys.argv) > 1:
    from coinwalk.plotting import plot_fidelity

    plot_fidelity({f"{s:.0%}": series for s, series in results.items()}, sys.argv[1])
