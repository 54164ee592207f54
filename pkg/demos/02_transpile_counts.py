"""
Lowering to the native gate set
===============================

Multi-controlled X gates are the expensive part of the walk once they are
lowered to CNOT, RZ, SX, X and ID.
"""
from coinwalk import WalkSpec, census_report, gate_census, mcx, new_circuit, transpile, walk_circuit

for k in (2, 3, 4):
    lone = new_circuit(k + 1).append(mcx(range(k), k))
    native = transpile(lone)
    print(f"MCX({k}) -> {len(native)} gates {gate_census(native)}")

# per-step cost of the walk grows quickly with the number of nodes
for n in (2, 3, 4):
    c = walk_circuit(WalkSpec(n, 1))
    report = census_report(c, transpile(c), steps=1)
    print(f"{2**n:>2} nodes: {report['total_before']:>3} gates before, {report['total_after']:>4} after")

# the optimized 4-node step needs no lowering besides the Hadamard coin
opt = walk_circuit(WalkSpec(2, 1, use_optimized_4node=True))
print(gate_census(transpile(opt)))
