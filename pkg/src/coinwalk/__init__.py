"""Coined discrete-time quantum walks on cycle graphs: circuits, native-gate
transpilation, exact noisy simulation and Hellinger-fidelity experiments."""

from .analysis import (FidelitySeries, fidelity_series, hellinger_distance,
                       hellinger_fidelity, normalize_counts)
from .circuit import Circuit, Gate, GateKind, gate_census, mcx, new_circuit, unitary_of
from .experiments import SweepConfig, run_walk, sweep
from .noise import NoiseModel, calibrate, default_model, scaled, simulated_fidelities
from .simulator import apply_depolarizing, evolve_statevector, run_exact, sample_counts
from .transpiler import census_report, decompose_h, decompose_mcx, merge_rz, transpile
from .walk import CoinInit, WalkSpec, walk_circuit, walk_oracle

__version__ = "0.1.0"
