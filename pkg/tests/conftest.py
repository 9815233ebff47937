import numpy as np
import pytest

from biharmonic_lab.spaces import ComplexProjective, EuclideanType, QuaternionProjective, Sphere

MODELS = [Sphere(3), ComplexProjective(2), QuaternionProjective(2), EuclideanType(3)]
RANK_ONE = MODELS[:3]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=MODELS, ids=lambda m: m.name)
def model(request):
    return request.param


@pytest.fixture(params=RANK_ONE, ids=lambda m: m.name)
def rank_one(request):
    return request.param


ACCEPTANCE_LOG: dict[int, str] = {}


@pytest.fixture
def acceptance_log(capsys):
    """Record and print one PASS/FAIL line for an acceptance criterion."""

    def record(number: int, title: str, ok: bool, detail: str = "") -> bool:
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}" + (f"  [{detail}]" if detail else "")
        ACCEPTANCE_LOG[number] = line
        with capsys.disabled():
            print(f"\n{line}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LOG):
            terminalreporter.write_line(ACCEPTANCE_LOG[key])
