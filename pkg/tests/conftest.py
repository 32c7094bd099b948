import numpy as np
import pytest

from jointrange.joint_range import pauli
from jointrange.linalg import expectation, random_hermitian, random_unit_vector
from jointrange.paths import correct

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


@pytest.fixture
def paulis():
    return pauli()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def isotropic_instance(n, rng, k=2):
    """``k`` random Hermitian constraints sharing an isotropic vector, plus two polished isotropic endpoints."""
    g = random_unit_vector(n, rng)
    mats = []
    for _ in range(k):
        R = random_hermitian(n, rng)
        mats.append(R - expectation(R, g) * np.eye(n))
    scale = max(np.linalg.norm(S, 2) for S in mats)
    ends = []
    while len(ends) < 2:
        h, ok = correct(random_unit_vector(n, rng), mats, 1e-15 * scale, max_iter=100)
        if ok:
            ends.append(h)
    return mats, ends[0], ends[1]


_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or report.outcome != "passed":
        props = dict(report.user_properties)
        _ACCEPTANCE[report.nodeid] = (report.outcome, props.get("summary", ""))


def _criterion_number(nodeid):
    return int(nodeid.split("test_criterion_")[1].split("_")[0])


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, (outcome, summary) in sorted(_ACCEPTANCE.items(), key=lambda kv: _criterion_number(kv[0])):
        num, _, name = nodeid.split("test_criterion_")[1].partition("_")
        label = f"criterion {num} ({name.replace('_', ' ')})"
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status} {label}: {summary}")
