import math

import numpy as np
import pytest
from hypothesis import strategies as st

from coinwalk.circuit import Circuit, cnot, h, id_, mcx, rz, sx, x


def assert_dist_close(got, expected, tol):
    """Compare distributions outcome by outcome; missing keys count as zero."""
    keys = set(got) | set(expected)
    worst = max((abs(got.get(k, 0.0) - expected.get(k, 0.0)) for k in keys), default=0.0)
    assert worst <= tol, f"max outcome difference {worst:g} > {tol:g}\n got={got}\n exp={expected}"


def random_density(n, rng, rank=None):
    dim = 2**n
    rank = dim if rank is None else rank
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


@st.composite
def circuits(draw, min_qubits=1, max_qubits=5, max_gates=12, native_only=False):
    n = draw(st.integers(min_qubits, max_qubits))
    qubit = st.integers(0, n - 1)
    angle = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)
    gates = []
    for _ in range(draw(st.integers(0, max_gates))):
        choices = ["X", "SX", "ID", "RZ"] + ([] if native_only else ["H"])
        if n >= 2:
            choices.append("CNOT")
        if n >= 3 and not native_only:
            choices.append("MCX")
        kind = draw(st.sampled_from(choices))
        if kind in ("CNOT", "MCX"):
            width = 2 if kind == "CNOT" else draw(st.integers(3, n))
            ops = draw(st.permutations(range(n)))[:width]
            gates.append(mcx(ops[:-1], ops[-1]))
        elif kind == "RZ":
            gates.append(rz(draw(angle), draw(qubit)))
        else:
            gates.append({"X": x, "SX": sx, "ID": id_, "H": h}[kind](draw(qubit)))
    measured = draw(st.permutations(range(n)))[: draw(st.integers(1, n))]
    return Circuit(n, tuple(gates), tuple(measured))


@pytest.fixture
def rng():
    return np.random.default_rng(20211018)


# -- acceptance reporting ----------------------------------------------------

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria[marker] = "PASS" if report.passed else "FAIL"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = marker.args


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), status in sorted(_criteria.items()):
        terminalreporter.write_line(f"{status}  criterion {number}: {title}")
