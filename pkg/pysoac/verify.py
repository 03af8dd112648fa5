"""
Independent verification: solution-file checking, optimality gap, the
trivial lower bound, and an exhaustive brute-force oracle for small models.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from .errors import ModelValidationError, OracleLimitError, UndefinedGapError, UnknownVariableError
from .model import DEFAULT_FEASIBILITY_TOL, ROUNDOFF_EPS, IlpModel, Violation, check_feasible, evaluate_objective
from .mps_io import SolFile

logger = logging.getLogger(__name__)

DEFAULT_MAX_VARS = 24
OBJECTIVE_MATCH_RTOL = 1e-4
_CHUNK_BITS = 16
_INTEGRAL_ATOL = 1e-9


@dataclass(frozen=True)
class BoundsReport:
    """Available lower bounds on the objective"""
    trivial_bound: float
    external_lp_bound: Optional[float] = None

    @property
    def best_known_lb(self) -> float:
        if self.external_lp_bound is None:
            return self.trivial_bound
        return max(self.trivial_bound, self.external_lp_bound)

    @property
    def source(self) -> str:
        if self.external_lp_bound is not None and self.external_lp_bound >= self.trivial_bound:
            return "external"
        return "trivial"

    def to_dict(self) -> Dict[str, Optional[float]]:
        return {
            "trivial_bound": self.trivial_bound,
            "external_lp_bound": self.external_lp_bound,
            "best_known_lb": self.best_known_lb,
        }


@dataclass(frozen=True)
class OracleResult:
    optimum: Optional[float]
    arg_optimum: Optional[Tuple[int, ...]]
    feasible_count: int
    enumerated: int

    @property
    def feasible(self) -> bool:
        return self.feasible_count > 0


@dataclass
class SolutionVerdict:
    """Outcome of checking a solution file against a model"""
    feasible: bool
    objective: float
    declared_objective: Optional[float] = None
    violated_rows: List[Violation] = field(default_factory=list)
    missing_vars: List[str] = field(default_factory=list)
    non_integral_vars: List[str] = field(default_factory=list)
    gap: Optional[float] = None

    @property
    def objective_matches(self) -> Optional[bool]:
        if self.declared_objective is None:
            return None
        return objectives_match(self.objective, self.declared_objective)

    def to_dict(self) -> Dict[str, object]:
        return {
            "feasible": self.feasible,
            "objective": self.objective,
            "declared_objective": self.declared_objective,
            "objective_matches": self.objective_matches,
            "violated_rows": [{"name": v.name, "violation": v.violation} for v in self.violated_rows],
            "missing_vars": list(self.missing_vars),
            "non_integral_vars": list(self.non_integral_vars),
            "gap": self.gap,
        }


def objectives_match(computed: float, declared: float, rtol: float = OBJECTIVE_MATCH_RTOL) -> bool:
    return abs(computed - declared) <= rtol * max(1.0, abs(declared))


def gap(o_best: float, o_lb: float) -> float:
    """(O_best - O_lb) / |O_best|.

    The absolute value keeps the gap nonnegative for negative objectives.
    """
    if o_best == 0:
        raise UndefinedGapError("gap is undefined when the best objective is 0")
    return (o_best - o_lb) / abs(o_best)


def gap_uses_absolute_denominator(o_best: float) -> bool:
    """True when |O_best| differs from O_best, i.e. the plain formula would flip sign"""
    return o_best < 0


def trivial_lower_bound(f: Sequence[float]) -> float:
    """sum_j min(f_j, 0): the minimum with every constraint dropped"""
    return float(np.minimum(np.asarray(f, dtype=float), 0.0).sum())


def bounds_report(f: Sequence[float], external_lp_bound: Optional[float] = None) -> BoundsReport:
    return BoundsReport(trivial_lower_bound(f), external_lp_bound)


def _exact_rows(model: IlpModel):
    """Constraint data with near-integer rows snapped to exact integers.

    Integer-valued float arithmetic is exact below 2**53, so snapped rows
    compare without rounding error.
    """
    A = model.constraint_matrix.toarray()
    b = model.rhs_vector.copy()
    for i in range(A.shape[0]):
        row = np.append(A[i], b[i])
        rounded = np.round(row)
        if np.all(np.abs(row - rounded) <= _INTEGRAL_ATOL):
            A[i] = rounded[:-1]
            b[i] = rounded[-1]
    return A, b


def _scan_chunk(A: np.ndarray, b: np.ndarray, codes: np.ndarray, f: np.ndarray,
                n: int, start: int, stop: int, reverse: bool) -> Tuple[int, Optional[float], Optional[int]]:
    """Enumerate codes [start, stop) and return (feasible count, best objective, its code)"""
    total = 1 << n
    idx = np.arange(start, stop, dtype=np.int64)
    if reverse:
        idx = total - 1 - idx
    X = ((idx[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(float)

    if A.shape[0]:
        activity = X @ A.T
        slack = ROUNDOFF_EPS * (1.0 + np.abs(b))
        ok_le = activity <= b + slack
        ok_ge = activity >= b - slack
        ok = np.where(codes == 1, ok_le, np.where(codes == -1, ok_ge, ok_le & ok_ge))
        feasible = np.all(ok, axis=1)
    else:
        feasible = np.ones(idx.shape[0], dtype=bool)

    count = int(np.count_nonzero(feasible))
    if count == 0:
        return 0, None, None
    objectives = X[feasible] @ f
    k = int(np.argmin(objectives))
    return count, float(objectives[k]), int(idx[feasible][k])


def brute_force(model: IlpModel, max_vars: int = DEFAULT_MAX_VARS, n_jobs: int = 1,
                reverse: bool = False) -> OracleResult:
    """Enumerate all 2**n binary vectors and return the feasible minimum.

    The enumeration range is split into chunks that joblib may scan in
    parallel; the result does not depend on the partitioning.
    """
    n = model.n
    if n > max_vars:
        raise OracleLimitError(f"model has {n} variables, oracle limit is {max_vars}")
    if n_jobs == 0:
        raise ModelValidationError("n_jobs must be nonzero; use -1 for all cores")

    A, b = _exact_rows(model)
    codes = model.relation_codes
    f = model.objective_vector
    total = 1 << n
    chunk = 1 << _CHUNK_BITS
    bounds = [(s, min(s + chunk, total)) for s in range(0, total, chunk)]

    parts = Parallel(n_jobs=n_jobs)(
        delayed(_scan_chunk)(A, b, codes, f, n, start, stop, reverse) for start, stop in bounds
    )

    feasible_count = sum(p[0] for p in parts)
    best_obj, best_code = None, None
    for count, obj, code in parts:
        if count and (best_obj is None or obj < best_obj):
            best_obj, best_code = obj, code
    if best_code is None:
        logger.debug("oracle: no feasible point among %d", total)
        return OracleResult(None, None, 0, total)

    arg = tuple(int((best_code >> j) & 1) for j in range(n))
    return OracleResult(best_obj, arg, feasible_count, total)


def check_solution_file(model: IlpModel, sol: SolFile, tol: float = DEFAULT_FEASIBILITY_TOL,
                        lower_bound: Optional[float] = None) -> SolutionVerdict:
    """Rebuild the assignment from a .sol file, check it, and recompute the objective"""
    index = model.var_index
    for entry in sol.entries:
        if entry.name not in index:
            raise UnknownVariableError(f"solution names unknown variable '{entry.name}'")

    values = dict((e.name, e) for e in sol.entries)
    missing = [name for name in model.var_names if name not in values]
    if missing:
        logger.warning("%d model variables missing from solution, taken as 0", len(missing))

    non_integral = [e.name for e in sol.entries if not e.integral]
    x = np.zeros(model.n, dtype=float)
    for e in sol.entries:
        if e.integral:
            x[index[e.name]] = e.value

    report = check_feasible(model, x, tol)
    objective = evaluate_objective(model, x)
    if non_integral:
        # Fractional entries are evaluated as-is for the objective
        objective = float(model.objective_vector @ np.asarray(
            [values[name].value if name in values else 0.0 for name in model.var_names]))

    verdict = SolutionVerdict(
        feasible=report.feasible and not non_integral,
        objective=objective,
        declared_objective=sol.declared_objective,
        violated_rows=list(report.violations),
        missing_vars=missing,
        non_integral_vars=non_integral,
    )
    if lower_bound is not None and objective != 0 and math.isfinite(lower_bound):
        verdict.gap = gap(objective, lower_bound)
    if verdict.objective_matches is False:
        logger.warning("declared objective %g differs from recomputed %g", sol.declared_objective, objective)
    return verdict
