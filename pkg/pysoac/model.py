"""
Data model for binary (0-1) integer linear programs.

An IlpModel holds a minimization objective plus equality and inequality rows
over binary variables. normalize() rewrites every row into the canonical
"a·x <= b" form with coefficients in [-1, 1], which is what the circuit
builder consumes.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import StrEnum
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from .errors import DimensionError, ModelValidationError

logger = logging.getLogger(__name__)

DEFAULT_FEASIBILITY_TOL = 1e-6

# Rounding slack for comparisons on rescaled rows
ROUNDOFF_EPS = 1e-12


class Relation(StrEnum):
    """Relation of a linear constraint row"""
    LE = "le"
    GE = "ge"
    EQ = "eq"


@dataclass(frozen=True)
class LinearConstraint:
    """A sparse linear row: sum(coef * x[var_index]) <relation> rhs"""
    terms: Tuple[Tuple[int, float], ...]
    relation: Relation
    rhs: float
    name: str = ""

    def __post_init__(self):
        terms = tuple((int(j), float(a)) for j, a in self.terms)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "relation", Relation(self.relation))
        object.__setattr__(self, "rhs", float(self.rhs))

        if not terms:
            raise ModelValidationError(f"constraint '{self.name}' has no terms")
        indices = [j for j, _ in terms]
        if len(set(indices)) != len(indices):
            raise ModelValidationError(f"constraint '{self.name}' repeats a variable index")
        if any(j < 0 for j in indices):
            raise ModelValidationError(f"constraint '{self.name}' has a negative variable index")
        if not all(math.isfinite(a) for _, a in terms) or not math.isfinite(self.rhs):
            raise ModelValidationError(f"constraint '{self.name}' has non-finite data")

    @property
    def indices(self) -> List[int]:
        return [j for j, _ in self.terms]

    @property
    def coefficients(self) -> List[float]:
        return [a for _, a in self.terms]

    def activity(self, x: Sequence[float]) -> float:
        """Left-hand side value a·x"""
        return sum(a * x[j] for j, a in self.terms)

    def max_abs_coefficient(self) -> float:
        return max(abs(a) for _, a in self.terms)


@dataclass(frozen=True)
class IlpModel:
    """Immutable 0-1 ILP instance. The objective is always minimized."""
    var_names: Tuple[str, ...]
    objective: Tuple[float, ...]
    eq_constraints: Tuple[LinearConstraint, ...] = ()
    ineq_constraints: Tuple[LinearConstraint, ...] = ()
    name: str = "model"

    def __post_init__(self):
        object.__setattr__(self, "var_names", tuple(str(v) for v in self.var_names))
        object.__setattr__(self, "objective", tuple(float(c) for c in self.objective))
        object.__setattr__(self, "eq_constraints", tuple(self.eq_constraints))
        object.__setattr__(self, "ineq_constraints", tuple(self.ineq_constraints))

        n = len(self.var_names)
        if n < 1:
            raise ModelValidationError("a model needs at least one variable")
        if len(set(self.var_names)) != n:
            raise ModelValidationError("variable names must be unique")
        if len(self.objective) != n:
            raise DimensionError(f"objective has {len(self.objective)} entries, expected {n}")
        if not all(math.isfinite(c) for c in self.objective):
            raise ModelValidationError("objective has non-finite coefficients")

        for row in self.eq_constraints:
            if row.relation != Relation.EQ:
                raise ModelValidationError(f"constraint '{row.name}' listed as equality but is {row.relation}")
        for row in self.ineq_constraints:
            if row.relation == Relation.EQ:
                raise ModelValidationError(f"constraint '{row.name}' listed as inequality but is EQ")
        for row in self.constraints:
            if max(row.indices) >= n:
                raise ModelValidationError(f"constraint '{row.name}' refers to a variable index >= {n}")

    @property
    def n(self) -> int:
        return len(self.var_names)

    @property
    def m_eq(self) -> int:
        return len(self.eq_constraints)

    @property
    def m_ineq(self) -> int:
        return len(self.ineq_constraints)

    @property
    def constraints(self) -> Tuple[LinearConstraint, ...]:
        """All rows, equalities first. Row indices elsewhere refer to this order."""
        return self.eq_constraints + self.ineq_constraints

    @cached_property
    def objective_vector(self) -> np.ndarray:
        return np.asarray(self.objective, dtype=float)

    @cached_property
    def var_index(self) -> Dict[str, int]:
        return {name: j for j, name in enumerate(self.var_names)}

    @cached_property
    def constraint_matrix(self) -> sp.csr_matrix:
        """CSR matrix of all rows in `constraints` order"""
        return _rows_to_csr(self.constraints, self.n)

    @cached_property
    def rhs_vector(self) -> np.ndarray:
        return np.asarray([row.rhs for row in self.constraints], dtype=float)

    @cached_property
    def relation_codes(self) -> np.ndarray:
        """+1 for LE rows, -1 for GE rows, 0 for EQ rows"""
        codes = {Relation.LE: 1, Relation.GE: -1, Relation.EQ: 0}
        return np.asarray([codes[row.relation] for row in self.constraints], dtype=int)

    def objective_is_integral(self) -> bool:
        return all(float(c).is_integer() for c in self.objective)

    def stats(self) -> Dict[str, int]:
        return {
            "n": self.n,
            "m_eq": self.m_eq,
            "m_ineq": self.m_ineq,
            "nonzeros": int(self.constraint_matrix.nnz),
        }


@dataclass(frozen=True)
class NormalizedModel:
    """All-LE rewrite of an IlpModel with unit-bounded coefficients.

    origin[i] is the index (in `source.constraints`) of the row that produced
    normalized row i.
    """
    objective: Tuple[float, ...]
    rows: Tuple[LinearConstraint, ...]
    row_scale: Tuple[float, ...]
    origin: Tuple[int, ...]
    source: Optional[IlpModel] = field(default=None, compare=False, repr=False)

    @property
    def n(self) -> int:
        return len(self.objective)

    @cached_property
    def matrix(self) -> sp.csr_matrix:
        return _rows_to_csr(self.rows, self.n)

    @cached_property
    def rhs(self) -> np.ndarray:
        return np.asarray([row.rhs for row in self.rows], dtype=float)

    def as_model(self, name: str = "normalized") -> IlpModel:
        """The normalized rows viewed as a plain IlpModel"""
        var_names = self.source.var_names if self.source is not None else tuple(f"x{j}" for j in range(self.n))
        return IlpModel(var_names, self.objective, (), self.rows, name=name)

    def is_feasible(self, x: Sequence[int], tol: float = 0.0) -> bool:
        """Feasibility of a binary vector against the normalized rows"""
        x = _as_binary_vector(x, self.n)
        if not self.rows:
            return True
        activity = self.matrix @ x
        slack = tol + ROUNDOFF_EPS * (1.0 + np.abs(self.rhs))
        return bool(np.all(activity - self.rhs <= slack))


@dataclass(frozen=True)
class Assignment:
    """A binary vector together with its objective value"""
    values: Tuple[int, ...]
    objective_value: float

    def __post_init__(self):
        values = tuple(int(v) for v in self.values)
        if any(v not in (0, 1) for v in values):
            raise ModelValidationError("assignment values must be 0 or 1")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "objective_value", float(self.objective_value))

    @classmethod
    def from_vector(cls, model: IlpModel, x: Sequence[int]) -> 'Assignment':
        return cls(tuple(int(v) for v in x), evaluate_objective(model, x))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def to_dict(self) -> Dict[str, object]:
        return {"values": list(self.values), "objective_value": self.objective_value}


@dataclass(frozen=True)
class Violation:
    """One violated row: violation is signed (positive means violated)"""
    row_index: int
    name: str
    relation: Relation
    activity: float
    rhs: float
    violation: float


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    violations: Tuple[Violation, ...] = ()
    tol: float = DEFAULT_FEASIBILITY_TOL

    @property
    def violated_rows(self) -> List[str]:
        return [v.name for v in self.violations]

    @property
    def max_violation(self) -> float:
        return max((v.violation for v in self.violations), default=0.0)

    def __bool__(self) -> bool:
        return self.feasible


def _rows_to_csr(rows: Sequence[LinearConstraint], n: int) -> sp.csr_matrix:
    indptr = [0]
    indices: List[int] = []
    data: List[float] = []
    for row in rows:
        for j, a in row.terms:
            indices.append(j)
            data.append(a)
        indptr.append(len(indices))
    return sp.csr_matrix(
        (np.asarray(data, dtype=float), np.asarray(indices, dtype=np.int64), np.asarray(indptr, dtype=np.int64)),
        shape=(len(rows), n),
    )


def _as_binary_vector(x: Sequence[int], n: int) -> np.ndarray:
    arr = np.asarray(x, dtype=float).reshape(-1)
    if arr.shape[0] != n:
        raise DimensionError(f"vector has {arr.shape[0]} entries, model has {n} variables")
    if not np.all((arr == 0.0) | (arr == 1.0)):
        raise ModelValidationError("vector entries must be 0 or 1")
    return arr


def normalize(model: IlpModel) -> NormalizedModel:
    """Rewrite every row as a·x <= b with coefficients scaled into [-1, 1].

    EQ rows become the pair {a·x <= b, -a·x <= -b}; GE rows are negated.
    Each row is divided by max(1, max_j |a_ij|).
    """
    rows: List[LinearConstraint] = []
    scales: List[float] = []
    origin: List[int] = []

    def _emit(source_index: int, terms, rhs: float, name: str):
        scale = max(1.0, max(abs(a) for _, a in terms))
        rows.append(LinearConstraint(
            tuple((j, a / scale) for j, a in terms),
            Relation.LE,
            rhs / scale,
            name,
        ))
        scales.append(scale)
        origin.append(source_index)

    for k, row in enumerate(model.constraints):
        negated = tuple((j, -a) for j, a in row.terms)
        if row.relation == Relation.LE:
            _emit(k, row.terms, row.rhs, row.name)
        elif row.relation == Relation.GE:
            _emit(k, negated, -row.rhs, row.name)
        else:
            _emit(k, row.terms, row.rhs, f"{row.name}+")
            _emit(k, negated, -row.rhs, f"{row.name}-")

    logger.debug("normalized %d rows into %d LE rows", len(model.constraints), len(rows))
    return NormalizedModel(model.objective, tuple(rows), tuple(scales), tuple(origin), source=model)


def evaluate_objective(model: IlpModel, x: Sequence[int]) -> float:
    """Objective value sum_j f_j x_j of a binary vector"""
    arr = _as_binary_vector(x, model.n)
    return float(model.objective_vector @ arr)


def check_feasible(model: IlpModel, x: Sequence[int], tol: float = DEFAULT_FEASIBILITY_TOL) -> FeasibilityReport:
    """Check every row of the source model and list the violated ones"""
    if tol < 0:
        raise ModelValidationError("tolerance must be nonnegative")
    arr = _as_binary_vector(x, model.n)
    if not model.constraints:
        return FeasibilityReport(True, (), tol)

    activity = model.constraint_matrix @ arr
    rhs = model.rhs_vector
    codes = model.relation_codes
    # LE: a·x - b, GE: b - a·x, EQ: a·x - b (compared in absolute value)
    signed = np.where(codes == -1, rhs - activity, activity - rhs)
    excess = np.where(codes == 0, np.abs(signed), signed)

    violations = []
    for i in np.flatnonzero(excess > tol):
        row = model.constraints[i]
        violations.append(Violation(int(i), row.name, row.relation, float(activity[i]), row.rhs, float(signed[i])))
    return FeasibilityReport(not violations, tuple(violations), tol)
