"""
Coined walk on an 8-node cycle
==============================

Build the walk circuit step by step, simulate it, and compare against the
direct amplitude recursion.
"""
from coinwalk import CoinInit, WalkSpec, gate_census, run_exact, walk_circuit, walk_oracle

# three position qubits give 8 nodes; the coin sits on qubit 3
spec = WalkSpec(num_position_qubits=3, steps=0)

for t in range(9):
    circuit = walk_circuit(spec.with_steps(t))
    dist = run_exact(circuit)
    oracle = walk_oracle(spec.with_steps(t))
    worst = max(abs(dist.get(k, 0) - oracle.get(k, 0)) for k in set(dist) | set(oracle))
    row = " ".join(f"{dist.get(format(x, '03b'), 0):.3f}" for x in range(8))
    print(f"t={t}  {row}   max|circuit - oracle| = {worst:.1e}")

# one step costs a Hadamard, the two carry cascades, and the X gates around them
print(gate_census(walk_circuit(spec.with_steps(1))))

# a symmetric coin start spreads the walker evenly both ways
sym = walk_oracle(WalkSpec(3, 3, CoinInit.SYMMETRIC))
print({k: round(v, 3) for k, v in sorted(sym.items())})

# the 4-node walk can use a three-gate STEP block instead of the cascades
short = walk_circuit(WalkSpec(2, 4, use_optimized_4node=True))
print(gate_census(short), {k: round(v, 6) for k, v in run_exact(short).items()})
