"""
Tests for circuit construction and the objective gate.
"""

import numpy as np
import pytest

from pysoac.dynamics import gate_violation, gate_violations
from pysoac.errors import SoacError
from pysoac.model import check_feasible, normalize
from pysoac.model_dsl import ilp
from pysoac.soac import GateKind, add_objective_gate, build_soac, update_objective_bound

from .conftest import all_binary_vectors


@pytest.fixture
def eq_soac():
    model = ilp().vars("x", [1, -2]).eq({"x1": 1, "x2": 1}, 1).build()
    return build_soac(normalize(model))


@pytest.mark.unit
class TestBuildSoac:

    def test_gate_per_row(self, eq_soac):
        assert eq_soac.n_gates == 2
        assert eq_soac.var_to_gates[0] == (0, 1)
        assert eq_soac.var_to_gates[1] == (0, 1)
        assert all(g.kind == GateKind.CONSTRAINT for g in eq_soac.gates)
        assert eq_soac.objective_gate is None
        assert eq_soac.objective_bound is None

    def test_no_rows(self):
        soac = build_soac(normalize(ilp().vars("x", [1, 1]).build()))
        assert soac.gates == []
        assert soac.var_to_gates == ((), ())
        assert soac.matrix.shape == (0, 2)

    def test_adjacency_is_transpose_of_gate_terms(self, random_models):
        for model in random_models(5, 12, 9, seed0=40):
            soac = build_soac(normalize(model))
            for j in range(soac.n_vars):
                scanned = tuple(g.gate_index for g in soac.gates if j in [k for k, _ in g.terms])
                assert soac.var_to_gates[j] == scanned

    @pytest.mark.property
    def test_corner_satisfies_gates_iff_feasible(self, random_models):
        vectors = all_binary_vectors(12)
        models = random_models(2, 12, 8, seed0=70) + random_models(2, 12, 8, feasible=False, seed0=72)
        outcomes = set()
        for model in models:
            soac = build_soac(normalize(model))
            for x in vectors:
                satisfied = not np.any(gate_violations(soac, 2.0 * x - 1.0))
                assert satisfied == check_feasible(model, x, 0.0).feasible
                outcomes.add(satisfied)
        assert outcomes == {True, False}

    def test_matrix_mirrors_gates(self, random_models):
        model = random_models(1, 8, 5)[0]
        soac = build_soac(normalize(model))
        dense = soac.matrix.toarray()
        for gate in soac.gates:
            row = np.zeros(soac.n_vars)
            for j, a in gate.terms:
                row[j] = a
            assert np.array_equal(dense[gate.gate_index], row)
            assert soac.rhs[gate.gate_index] == gate.rhs


@pytest.mark.unit
class TestObjectiveGate:

    def test_scaled_terms(self, eq_soac):
        soac = add_objective_gate(eq_soac, [1, -2], 0.0)

        gate = soac.objective_gate
        assert gate.kind == GateKind.OBJECTIVE
        assert gate.terms == ((0, 0.5), (1, -1.0))
        assert gate.rhs == 0.0
        assert soac.objective_scale == 2.0
        assert soac.n_gates == 3
        assert soac.var_to_gates[0] == (0, 1, 2)
        assert eq_soac.n_gates == 2

    def test_zero_objective_leaves_circuit_unchanged(self, eq_soac):
        assert add_objective_gate(eq_soac, [0, 0], 0.0) is eq_soac

    def test_second_objective_gate_rejected(self, eq_soac):
        soac = add_objective_gate(eq_soac, [1, -2], 0.0)
        with pytest.raises(SoacError):
            add_objective_gate(soac, [1, -2], -1.0)

    def test_dimension_checked(self, eq_soac):
        with pytest.raises(SoacError):
            add_objective_gate(eq_soac, [1, 2, 3], 0.0)

    def test_loosest_bound_satisfied_everywhere(self):
        f = np.array([3.0, -2.0, 5.0, -1.0])
        model = ilp().vars("x", f.tolist()).build()
        soac = add_objective_gate(build_soac(normalize(model)), f, float(np.maximum(f, 0).sum()))
        for x in all_binary_vectors(4):
            v = 2.0 * x - 1.0
            assert gate_violation(soac.objective_gate, v) == 0.0

    def test_bound_update_strictly_decreases(self, eq_soac):
        soac = add_objective_gate(eq_soac, [1, -2], 0.0)

        update_objective_bound(soac, -1.0)
        assert soac.objective_bound == -1.0
        assert soac.rhs[soac.objective_gate_index] == -0.5

        with pytest.raises(SoacError, match="strictly decrease"):
            update_objective_bound(soac, -1.0)

    def test_update_to_same_bound_rejected(self, eq_soac):
        soac = add_objective_gate(eq_soac, [1, -2], 0.0)
        with pytest.raises(SoacError):
            update_objective_bound(soac, 0.0)

    def test_update_without_objective_gate(self, eq_soac):
        with pytest.raises(SoacError, match="no objective gate"):
            update_objective_bound(eq_soac, -1.0)
