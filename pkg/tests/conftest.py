import numpy as np
import pytest

from mubforge import catalog
from mubforge.analysis import collect
from mubforge.linalg import hadamard_basis
from mubforge.solver import SolverConfig


def pair_of(h):
    return (np.eye(h.shape[0]), hadamard_basis(h))


@pytest.fixture(scope="session")
def f6_pair():
    return pair_of(catalog.fourier(6))


@pytest.fixture(scope="session")
def f6_set(f6_pair):
    return collect(f6_pair, 5000, SolverConfig(rng_seed=42))


@pytest.fixture(scope="session")
def tao_set():
    return collect(pair_of(catalog.tao()), 10_000, SolverConfig(rng_seed=42))


@pytest.fixture(scope="session")
def dita0_set():
    return collect(pair_of(catalog.dita(0.0)), 10_000, SolverConfig(rng_seed=42))


# criterion number -> list of (passed, detail), filled by tests/test_acceptance.py
ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}


def record(criterion: int, passed: bool, detail: str) -> bool:
    ACCEPTANCE.setdefault(criterion, []).append((bool(passed), detail))
    print(f"criterion {criterion}: {'PASS' if passed else 'FAIL'} ({detail})")
    return bool(passed)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[k]
        ok = all(p for p, _ in parts)
        detail = "; ".join(d for _, d in parts)
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
