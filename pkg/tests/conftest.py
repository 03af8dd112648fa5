"""
Test configuration and fixtures for pysoac tests
"""

import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Callable, List, Sequence

import numpy as np
import pytest

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from pysoac.model import IlpModel, Relation, check_feasible
from pysoac.model_dsl import ilp, random_instance
from pysoac.solver import SolverConfig

# Test data directory (golden MPS / .sol corpus)
TEST_DATA_DIR = Path(__file__).parent / 'data'

GOLDEN_MPS = {
    'free_basic': TEST_DATA_DIR / 'free_basic.mps',
    'fixed_marker': TEST_DATA_DIR / 'fixed_marker.mps',
    'free_eq_ge': TEST_DATA_DIR / 'free_eq_ge.mps',
    'free_bv_objsense': TEST_DATA_DIR / 'free_bv_objsense.mps',
}

ERROR_MPS = {
    'error_ranges': (TEST_DATA_DIR / 'error_ranges.mps', 10, "ranges unsupported"),
    'error_general_integer': (TEST_DATA_DIR / 'error_general_integer.mps', 7, "not binary"),
    'error_no_objective': (TEST_DATA_DIR / 'error_no_objective.mps', 10, "no objective"),
    'error_duplicate_entry': (TEST_DATA_DIR / 'error_duplicate_entry.mps', 7, "duplicate entry"),
    'error_unknown_section': (TEST_DATA_DIR / 'error_unknown_section.mps', 7, "unknown section"),
}

# Small step budget keeping solver tests fast and deterministic
FAST_STEPS = 4000


def make_config(**overrides) -> SolverConfig:
    """Step-limited configuration for deterministic solver tests"""
    settings = dict(step_limit=FAST_STEPS, readout_stride=5, restart_after=2000)
    settings.update(overrides)
    return SolverConfig(**settings)


@pytest.fixture
def toy_model() -> IlpModel:
    """min -x1 - x2 s.t. x1 + x2 <= 1"""
    return ilp().named("toy").vars("x", [-1, -1]).le({"x1": 1, "x2": 1}, 1).build()


@pytest.fixture
def anytime_model() -> IlpModel:
    """Several distinct feasible objective values: pick at most 3 of 6 items"""
    return (ilp().named("pick3")
            .vars("x", [-5, -4, -3, -2, -1, -6])
            .le({f"x{k}": 1 for k in range(1, 7)}, 3, name="card")
            .le({"x1": 1, "x6": 1}, 1, name="conflict")
            .build())


@pytest.fixture
def infeasible_model() -> IlpModel:
    """x1 <= 0 and x1 >= 1"""
    return ilp().named("infeasible").var("x1", 1).le({"x1": 1}, 0).ge({"x1": 1}, 1).build()


@pytest.fixture
def random_models() -> Callable[..., List[IlpModel]]:
    """Factory for seeded random instances"""
    def _make(count: int, n: int, m: int, feasible: bool = True, seed0: int = 0) -> List[IlpModel]:
        return [random_instance(n, m, seed0 + k, feasible=feasible) for k in range(count)]
    return _make


@pytest.fixture
def temp_file():
    """Provide a temporary file that is cleaned up after the test."""
    files_created = []

    def _create_temp_file(content: str, suffix: str = '.mps') -> str:
        fd, path = tempfile.mkstemp(suffix=suffix)
        with os.fdopen(fd, 'w') as f:
            f.write(content)
        files_created.append(path)
        return path

    yield _create_temp_file

    for path in files_created:
        try:
            os.unlink(path)
        except (OSError, FileNotFoundError):
            pass


def model_to_mps(model: IlpModel) -> str:
    """Free-format MPS text of a model, for feeding the command line"""
    row_type = {Relation.LE: "L", Relation.GE: "G", Relation.EQ: "E"}
    lines = [f"NAME {model.name}", "ROWS", " N obj"]
    lines.extend(f" {row_type[row.relation]} {row.name}" for row in model.constraints)
    lines.append("COLUMNS")
    for j, name in enumerate(model.var_names):
        lines.append(f" {name} obj {model.objective[j]!r}")
        for row in model.constraints:
            for k, a in row.terms:
                if k == j:
                    lines.append(f" {name} {row.name} {a!r}")
    lines.append("RHS")
    lines.extend(f" RHS {row.name} {row.rhs!r}" for row in model.constraints)
    lines.append("BOUNDS")
    lines.extend(f" BV BND {name}" for name in model.var_names)
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def all_binary_vectors(n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    return ((idx[:, None] >> np.arange(n)) & 1).astype(int)


def exact_feasible(model: IlpModel, x: Sequence[int], tol: Fraction = Fraction(0)) -> bool:
    """Per-row recomputation in rational arithmetic"""
    for row in model.constraints:
        activity = sum(Fraction(a) * int(x[j]) for j, a in row.terms)
        rhs = Fraction(row.rhs)
        if row.relation == Relation.LE and activity - rhs > tol:
            return False
        if row.relation == Relation.GE and rhs - activity > tol:
            return False
        if row.relation == Relation.EQ and abs(activity - rhs) > tol:
            return False
    return True


# Helper functions for assertions
def assert_feasible(model: IlpModel, x: Sequence[int], tol: float = 1e-9):
    report = check_feasible(model, x, tol)
    assert report.feasible, f"expected feasible, violated rows: {report.violated_rows}"


def assert_strictly_decreasing(values: Sequence[float], label: str = "sequence"):
    for earlier, later in zip(values, values[1:]):
        assert later < earlier, f"{label} not strictly decreasing: {list(values)}"


def assert_state_within_bounds(state, params):
    assert np.all(np.abs(state.v) <= 1.0), "voltage left [-1, 1]"
    assert np.all((state.xs >= 0.0) & (state.xs <= 1.0)), "fast memory left [0, 1]"
    assert np.all((state.xl >= 1.0) & (state.xl <= params.xl_max)), "slow memory left [1, xl_max]"


# Pytest markers for test organization
def pytest_configure(config):
    """Configure pytest markers."""
    config.addinivalue_line("markers", "unit: Unit tests for individual components")
    config.addinivalue_line("markers", "integration: Integration tests for component interaction")
    config.addinivalue_line("markers", "slow: Tests that take significant time to run")
    config.addinivalue_line("markers", "property: Randomized property tests")
    config.addinivalue_line("markers", "cli: Command-line interface tests")
    config.addinivalue_line("markers", "dsl: Model builder DSL tests")
