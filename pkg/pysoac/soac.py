"""
Self-organizing algebraic circuit (SOAC) construction.

Every normalized constraint row becomes one algebraic gate. Once a first
feasible assignment is known, an objective gate sum_j f_j x_j <= b~ is
appended; its bound is the only mutable part of the circuit and is tightened
after each improving solution.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import StrEnum
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from .errors import SoacError
from .model import NormalizedModel

logger = logging.getLogger(__name__)


class GateKind(StrEnum):
    CONSTRAINT = "constraint"
    OBJECTIVE = "objective"


@dataclass(frozen=True)
class AlgebraicGate:
    """One gate enforcing sum(coef * x) <= rhs on its terminals"""
    terms: Tuple[Tuple[int, float], ...]
    rhs: float
    kind: GateKind
    gate_index: int

    def __post_init__(self):
        if not self.terms:
            raise SoacError(f"gate {self.gate_index} has no terms")


@dataclass
class Soac:
    """Gate list plus variable-to-gate adjacency.

    `matrix` and `rhs` mirror the gate list for vectorized dynamics. Each
    replica owns its Soac; constraint gates are shared, the objective rhs is not.
    """
    gates: List[AlgebraicGate]
    var_to_gates: Tuple[Tuple[int, ...], ...]
    n_vars: int
    objective_gate_index: Optional[int] = None
    objective_scale: float = 1.0
    matrix: sp.csr_matrix = field(default=None, repr=False)
    rhs: np.ndarray = field(default=None, repr=False)
    pattern_t: sp.csr_matrix = field(default=None, repr=False)

    def __post_init__(self):
        if self.matrix is None:
            self.matrix = _gates_to_csr(self.gates, self.n_vars)
        if self.rhs is None:
            self.rhs = np.asarray([g.rhs for g in self.gates], dtype=float)
        if self.pattern_t is None:
            pattern = self.matrix.copy()
            pattern.data = np.ones_like(pattern.data)
            self.pattern_t = pattern.T.tocsr()

    @property
    def n_gates(self) -> int:
        return len(self.gates)

    @property
    def objective_gate(self) -> Optional[AlgebraicGate]:
        if self.objective_gate_index is None:
            return None
        return self.gates[self.objective_gate_index]

    @property
    def objective_bound(self) -> Optional[float]:
        """Current b~ in objective units (unscaled)"""
        gate = self.objective_gate
        if gate is None:
            return None
        return gate.rhs * self.objective_scale


def _gates_to_csr(gates: Sequence[AlgebraicGate], n: int) -> sp.csr_matrix:
    indptr = [0]
    indices: List[int] = []
    data: List[float] = []
    for gate in gates:
        for j, a in gate.terms:
            indices.append(j)
            data.append(a)
        indptr.append(len(indices))
    return sp.csr_matrix(
        (np.asarray(data, dtype=float), np.asarray(indices, dtype=np.int64), np.asarray(indptr, dtype=np.int64)),
        shape=(len(gates), n),
    )


def _adjacency(gates: Sequence[AlgebraicGate], n: int) -> Tuple[Tuple[int, ...], ...]:
    incident: List[List[int]] = [[] for _ in range(n)]
    for gate in gates:
        for j, _ in gate.terms:
            incident[j].append(gate.gate_index)
    return tuple(tuple(g) for g in incident)


def build_soac(nm: NormalizedModel) -> Soac:
    """One CONSTRAINT gate per normalized row; no objective gate yet"""
    gates = [
        AlgebraicGate(row.terms, row.rhs, GateKind.CONSTRAINT, i)
        for i, row in enumerate(nm.rows)
    ]
    logger.debug("built SOAC with %d gates over %d variables", len(gates), nm.n)
    return Soac(gates, _adjacency(gates, nm.n), nm.n)


def add_objective_gate(soac: Soac, f: Sequence[float], b_tilde: float) -> Soac:
    """Return a new Soac with the gate sum_j f_j x_j <= b_tilde appended.

    Coefficients and bound are divided by max(1, max_j |f_j|). An all-zero
    objective leaves the circuit unchanged (feasibility-only run).
    """
    if soac.objective_gate_index is not None:
        raise SoacError("objective gate already present")
    f = np.asarray(f, dtype=float)
    if f.shape[0] != soac.n_vars:
        raise SoacError(f"objective has {f.shape[0]} entries, circuit has {soac.n_vars} variables")
    if not np.any(f):
        return soac

    scale = max(1.0, float(np.max(np.abs(f))))
    terms = tuple((int(j), float(f[j] / scale)) for j in np.flatnonzero(f))
    gate = AlgebraicGate(terms, b_tilde / scale, GateKind.OBJECTIVE, len(soac.gates))
    gates = soac.gates + [gate]
    logger.debug("objective gate added with bound %g", b_tilde)
    return Soac(gates, _adjacency(gates, soac.n_vars), soac.n_vars,
                objective_gate_index=gate.gate_index, objective_scale=scale)


def update_objective_bound(soac: Soac, new_b: float) -> None:
    """Replace the objective gate bound in place; it may only decrease"""
    index = soac.objective_gate_index
    if index is None:
        raise SoacError("circuit has no objective gate")
    scaled = new_b / soac.objective_scale
    current = soac.gates[index].rhs
    if not scaled < current:
        raise SoacError(f"objective bound must strictly decrease ({new_b} is not below {current * soac.objective_scale})")
    soac.gates[index] = replace(soac.gates[index], rhs=scaled)
    soac.rhs[index] = scaled
