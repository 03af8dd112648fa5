"""
pysoac - an anytime 0-1 integer linear programming solver that simulates a
self-organizing algebraic circuit.

This package provides:
- model: 0-1 ILP data model, normalization and feasibility checks
- mps_io: MPS model and .sol solution files
- soac / dynamics: circuit construction, flow field and integration
- solver: anytime replica portfolio with objective tightening
- verify: solution checking, gap, trivial bound and brute-force oracle
"""

from .errors import (PysoacError, ModelValidationError, DimensionError, MpsParseError, SolParseError,
                     SoacError, NonFiniteStateError, UndefinedGapError, OracleLimitError, UnknownVariableError)
from .model import (IlpModel, LinearConstraint, Relation, NormalizedModel, Assignment, FeasibilityReport,
                    normalize, evaluate_objective, check_feasible)
from .model_dsl import ilp, random_instance
from .mps_io import parse_mps, read_mps_file, write_sol, parse_sol, read_sol_file, SolFile
from .soac import Soac, AlgebraicGate, build_soac, add_objective_gate, update_objective_bound
from .dynamics import DynamicsParams, SoacState, gate_violation, flow, step, readout
from .solver import (SolverConfig, TightenParams, ReplicaResult, SolveReport, Termination,
                     init_state, run_replica, solve, tighten_bound)
from .verify import gap, trivial_lower_bound, brute_force, check_solution_file, BoundsReport, OracleResult

__version__ = "0.1.0"
__all__ = [
    "PysoacError", "ModelValidationError", "DimensionError", "MpsParseError", "SolParseError",
    "SoacError", "NonFiniteStateError", "UndefinedGapError", "OracleLimitError", "UnknownVariableError",
    "IlpModel", "LinearConstraint", "Relation", "NormalizedModel", "Assignment", "FeasibilityReport",
    "normalize", "evaluate_objective", "check_feasible",
    "ilp", "random_instance",
    "parse_mps", "read_mps_file", "write_sol", "parse_sol", "read_sol_file", "SolFile",
    "Soac", "AlgebraicGate", "build_soac", "add_objective_gate", "update_objective_bound",
    "DynamicsParams", "SoacState", "gate_violation", "flow", "step", "readout",
    "SolverConfig", "TightenParams", "ReplicaResult", "SolveReport", "Termination",
    "init_state", "run_replica", "solve", "tighten_bound",
    "gap", "trivial_lower_bound", "brute_force", "check_solution_file", "BoundsReport", "OracleResult",
]
