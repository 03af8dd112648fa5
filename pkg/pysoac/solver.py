"""
Anytime solver: integrate the circuit from random voltages, read it out
periodically, keep every feasible improvement, and tighten the objective gate
after each one. Several replicas with different seeds and parameter sets run
independently; the best result wins.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed
from scipy.stats import qmc

from .dynamics import DynamicsParams, SoacState, extend_memory, readout, step
from .errors import ModelValidationError, NonFiniteStateError
from .events import SolverEvent, SolverEventType
from .model import (DEFAULT_FEASIBILITY_TOL, Assignment, IlpModel, NormalizedModel,
                    check_feasible, evaluate_objective, normalize)
from .soac import Soac, add_objective_gate, build_soac, update_objective_bound
from .tracer import TrajectoryTracer
from .verify import BoundsReport, bounds_report, gap, trivial_lower_bound

logger = logging.getLogger(__name__)

Seed = Union[int, np.random.SeedSequence]


class Termination(StrEnum):
    TIMEOUT = "timeout"
    ABORTED = "aborted"
    BOUND_EXHAUSTED = "bound_exhausted"


@dataclass(frozen=True)
class TightenParams:
    """How far below O_best the next objective bound is placed.

    eps_abs=None resolves to 1e-6 * ||f||_1; integral=None detects
    integer-valued objectives, which step by whole units.
    """
    eps_abs: Optional[float] = None
    eps_rel: float = 0.0
    integral: Optional[bool] = None

    def __post_init__(self):
        if self.eps_abs is not None and not self.eps_abs > 0:
            raise ModelValidationError("eps_abs must be positive")
        if self.eps_rel < 0:
            raise ModelValidationError("eps_rel must be nonnegative")

    def to_dict(self) -> Dict[str, object]:
        return {"eps_abs": self.eps_abs, "eps_rel": self.eps_rel, "integral": self.integral}


def default_params_grid(size: int = 8, seed: int = 0) -> Tuple[DynamicsParams, ...]:
    """Default parameters first, then a Latin hypercube of log-scale factors in [1/2, 2] on (dt, beta, alpha)"""
    base = DynamicsParams()
    grid = [base]
    if size > 1:
        sample = qmc.LatinHypercube(d=3, seed=seed).random(size - 1)
        factors = 2.0 ** (2.0 * sample - 1.0)
        for dt_f, beta_f, alpha_f in factors:
            grid.append(DynamicsParams(
                dt=base.dt * float(dt_f),
                beta=base.beta * float(beta_f),
                gamma=base.gamma,
                alpha=base.alpha * float(alpha_f),
                delta=base.delta,
                xl_max=base.xl_max,
                zeta=base.zeta,
                threshold=base.threshold,
            ))
    return tuple(grid)


@dataclass(frozen=True)
class SolverConfig:
    """Solver settings.

    With step_limit set, every replica runs exactly that many integration
    steps and all times are reported on the dynamical clock, which makes
    runs reproducible bit for bit.
    """
    time_limit_seconds: float = 300.0
    n_replicas: int = 1
    base_seed: int = 0
    params_grid: Tuple[DynamicsParams, ...] = field(default_factory=default_params_grid)
    readout_stride: int = 10
    tighten: TightenParams = field(default_factory=TightenParams)
    step_limit: Optional[int] = None
    feasibility_tol: float = DEFAULT_FEASIBILITY_TOL
    n_jobs: int = 1
    lower_bound: Optional[float] = None
    restart_after: int = 20000
    max_restarts: int = 1000
    trace_stride: int = 0

    def __post_init__(self):
        object.__setattr__(self, "params_grid", tuple(self.params_grid))
        if not self.time_limit_seconds > 0:
            raise ModelValidationError("time limit must be positive")
        if self.n_replicas < 1:
            raise ModelValidationError("at least one replica is required")
        if self.n_jobs == 0:
            raise ModelValidationError("n_jobs must be nonzero; use -1 for all cores")
        if self.readout_stride < 1:
            raise ModelValidationError("readout stride must be at least 1")
        if not self.params_grid:
            raise ModelValidationError("params_grid must not be empty")
        if self.step_limit is not None and self.step_limit < 0:
            raise ModelValidationError("step limit must be nonnegative")
        if self.feasibility_tol < 0:
            raise ModelValidationError("feasibility tolerance must be nonnegative")
        if self.restart_after < 0 or self.max_restarts < 0 or self.trace_stride < 0:
            raise ModelValidationError("restart and trace settings must be nonnegative")

    def params_for(self, replica_index: int) -> DynamicsParams:
        return self.params_grid[replica_index % len(self.params_grid)]

    def seed_for(self, replica_index: int) -> int:
        return self.base_seed + replica_index

    @property
    def clock(self) -> str:
        return "dynamical" if self.step_limit is not None else "wall"

    def to_dict(self) -> Dict[str, object]:
        return {
            "time_limit_seconds": self.time_limit_seconds,
            "n_replicas": self.n_replicas,
            "base_seed": self.base_seed,
            "params_grid": [p.to_dict() for p in self.params_grid],
            "readout_stride": self.readout_stride,
            "tighten": self.tighten.to_dict(),
            "step_limit": self.step_limit,
            "feasibility_tol": self.feasibility_tol,
            "n_jobs": self.n_jobs,
            "lower_bound": self.lower_bound,
            "restart_after": self.restart_after,
            "max_restarts": self.max_restarts,
            "trace_stride": self.trace_stride,
        }


@dataclass(frozen=True)
class HistoryEntry:
    wall_time: float
    step: int
    objective: float


@dataclass
class ReplicaResult:
    replica_index: int
    seed: int
    params: DynamicsParams
    best: Optional[Assignment] = None
    history: List[HistoryEntry] = field(default_factory=list)
    steps_taken: int = 0
    restarts: int = 0
    termination: Termination = Termination.TIMEOUT
    events: List[SolverEvent] = field(default_factory=list)
    elapsed: float = 0.0
    tracer: Optional[TrajectoryTracer] = field(default=None, repr=False)

    @property
    def first_feasible_time(self) -> Optional[float]:
        return self.history[0].wall_time if self.history else None

    def to_dict(self) -> Dict[str, object]:
        return {
            "replica_index": self.replica_index,
            "seed": self.seed,
            "params": self.params.to_dict(),
            "best": self.best.to_dict() if self.best else None,
            "history": [[h.wall_time, h.step, h.objective] for h in self.history],
            "steps_taken": self.steps_taken,
            "restarts": self.restarts,
            "termination": str(self.termination),
            "first_feasible_time": self.first_feasible_time,
            "elapsed": self.elapsed,
        }


@dataclass
class SolveReport:
    model_name: str
    best: Optional[Assignment]
    per_replica: List[ReplicaResult]
    bounds: BoundsReport
    gap: Optional[float]
    wall_time: float
    seeds: List[int]
    clock: str = "wall"

    @property
    def lower_bound(self) -> float:
        return self.bounds.best_known_lb

    @property
    def feasible(self) -> bool:
        return self.best is not None

    @property
    def best_replica(self) -> Optional[int]:
        for result in self.per_replica:
            if result.best is not None and self.best is not None and result.best == self.best:
                return result.replica_index
        return None

    def merged_history(self) -> List[Tuple[float, int, float]]:
        """(time, replica, objective) of every improvement across replicas, by time"""
        merged = [(h.wall_time, r.replica_index, h.objective) for r in self.per_replica for h in r.history]
        return sorted(merged)

    def objective_at(self, seconds: float) -> Optional[float]:
        """Best objective any replica had found by the given time"""
        found = [obj for t, _, obj in self.merged_history() if t <= seconds]
        return min(found) if found else None

    def to_dict(self) -> Dict[str, object]:
        return {
            "model_name": self.model_name,
            "best": self.best.to_dict() if self.best else None,
            "bounds": self.bounds.to_dict(),
            "gap": self.gap,
            "wall_time": self.wall_time,
            "clock": self.clock,
            "seeds": list(self.seeds),
            "per_replica": [r.to_dict() for r in self.per_replica],
        }


def derive_seed(seed: int, restart: int) -> np.random.SeedSequence:
    """Seed for the restart-th re-initialization of a replica"""
    return np.random.SeedSequence(entropy=seed, spawn_key=(restart,))


def init_state(soac: Soac, seed: Seed) -> SoacState:
    """Voltages uniform on the open interval (-1, 1); xs = 0.5, xl = 1"""
    rng = np.random.default_rng(seed)
    low = np.nextafter(-1.0, 0.0)
    v = rng.uniform(low, 1.0, size=soac.n_vars)
    return SoacState(v, np.full(soac.n_gates, 0.5), np.ones(soac.n_gates), 0.0)


def tighten_bound(o_best: float, f: Sequence[float], tighten_params: TightenParams) -> float:
    """Next objective bound, strictly below o_best"""
    f = np.asarray(f, dtype=float)
    integral = tighten_params.integral
    if integral is None:
        integral = bool(np.all(np.mod(f, 1.0) == 0.0))
    if integral:
        delta = 1.0
    else:
        eps_abs = tighten_params.eps_abs
        if eps_abs is None:
            eps_abs = 1e-6 * float(np.abs(f).sum()) or 1e-6
        delta = max(eps_abs, tighten_params.eps_rel * abs(o_best))
    bound = o_best - delta
    if not bound < o_best:
        bound = float(np.nextafter(o_best, -math.inf))
    return float(bound)


class _WallClock:
    def __init__(self):
        self.start = time.perf_counter()

    def elapsed(self, state: SoacState, steps: int, dt: float) -> float:
        return time.perf_counter() - self.start


class _DynamicalClock:
    """Deterministic clock for step-limited runs: steps * dt"""

    def elapsed(self, state: SoacState, steps: int, dt: float) -> float:
        return steps * dt


def run_replica(nm: NormalizedModel, f: Sequence[float], config: SolverConfig, replica_index: int,
                model: Optional[IlpModel] = None) -> ReplicaResult:
    """Run one replica until its budget is spent or the bound is exhausted.

    Feasibility is always checked on the source model, never on gate
    violations. The objective gate is added after the first feasible readout.
    """
    model = model if model is not None else nm.source
    if model is None:
        raise ModelValidationError("normalized model carries no source model")
    f = np.asarray(f, dtype=float)
    seed = config.seed_for(replica_index)
    params = config.params_for(replica_index)
    result = ReplicaResult(replica_index, seed, params)
    tracer = TrajectoryTracer(config.trace_stride, params.threshold) if config.trace_stride and replica_index == 0 else None
    result.tracer = tracer

    soac = build_soac(nm)
    state = init_state(soac, seed)
    trivial_lb = trivial_lower_bound(f)
    clock = _DynamicalClock() if config.step_limit is not None else _WallClock()
    steps = 0
    last_progress = 0

    def _event(event_type: SolverEventType, **data) -> SolverEvent:
        event = SolverEvent(replica_index, event_type, clock.elapsed(state, steps, params.dt), steps, data)
        result.events.append(event)
        return event

    def _restart(reason: str):
        nonlocal state, last_progress
        result.restarts += 1
        state = init_state(soac, derive_seed(seed, result.restarts))
        last_progress = steps
        _event(SolverEventType.RESTART, reason=reason, restart=result.restarts)
        logger.log(logging.WARNING if reason == "non-finite" else logging.DEBUG,
                   "replica %d restart %d (%s)", replica_index, result.restarts, reason)

    while True:
        if config.step_limit is not None:
            if steps >= config.step_limit:
                break
        elif clock.elapsed(state, steps, params.dt) >= config.time_limit_seconds:
            break

        try:
            state = step(state, soac, params)
        except NonFiniteStateError as exc:
            if result.restarts >= config.max_restarts:
                result.termination = Termination.ABORTED
                _event(SolverEventType.TERMINATED, reason=f"aborted: {exc}")
                logger.error("replica %d aborted: %s", replica_index, exc)
                break
            _restart("non-finite")
            continue
        steps += 1
        if tracer is not None:
            tracer.record(state, soac, model)

        if steps % config.readout_stride:
            continue
        x = readout(state, params.threshold)
        if check_feasible(model, x, config.feasibility_tol).feasible:
            objective = evaluate_objective(model, x)
            if result.best is None or objective < result.best.objective_value:
                result.best = Assignment(tuple(int(v) for v in x), objective)
                now = clock.elapsed(state, steps, params.dt)
                result.history.append(HistoryEntry(now, steps, objective))
                logger.info(_event(SolverEventType.IMPROVED, objective=objective).progress_line())
                last_progress = steps

                bound = tighten_bound(objective, f, config.tighten)
                if bound < trivial_lb - 1e-9 * max(1.0, abs(trivial_lb)):
                    result.termination = Termination.BOUND_EXHAUSTED
                    _event(SolverEventType.TERMINATED, reason="bound below trivial lower bound", bound=bound)
                    break
                if soac.objective_gate_index is None:
                    soac = add_objective_gate(soac, f, bound)
                    state = extend_memory(state, soac.n_gates)
                else:
                    update_objective_bound(soac, bound)
                _event(SolverEventType.BOUND_TIGHTENED, bound=bound)
                continue

        if config.restart_after and steps - last_progress >= config.restart_after:
            _restart("stagnation")

    result.steps_taken = steps
    result.elapsed = clock.elapsed(state, steps, params.dt)
    if result.termination == Termination.TIMEOUT:
        _event(SolverEventType.TERMINATED, reason="budget spent")
    logger.debug("replica %d: %s after %d steps, best=%s", replica_index, result.termination, steps,
                 None if result.best is None else result.best.objective_value)
    return result


def _log_worker_progress(results: Sequence[ReplicaResult]) -> None:
    """Replay progress lines of replicas that ran in worker processes"""
    improved = [e for r in results for e in r.events if e.event_type == SolverEventType.IMPROVED]
    for event in sorted(improved, key=lambda e: (e.wall_time, e.replica)):
        logger.info(event.progress_line())


def solve(model: IlpModel, config: SolverConfig = SolverConfig()) -> SolveReport:
    """Run the replica portfolio and merge by minimum objective"""
    nm = normalize(model)
    f = model.objective_vector
    start = time.perf_counter()

    results: List[ReplicaResult] = Parallel(n_jobs=config.n_jobs)(
        delayed(run_replica)(nm, f, config, k, model) for k in range(config.n_replicas)
    )
    wall_time = time.perf_counter() - start
    if config.n_jobs != 1:
        _log_worker_progress(results)
    if config.step_limit is not None:
        wall_time = max(r.elapsed for r in results)

    best: Optional[Assignment] = None
    for result in results:
        if result.best is not None and (best is None or result.best.objective_value < best.objective_value):
            best = result.best

    bounds = bounds_report(f, config.lower_bound)
    report_gap = None
    if best is not None and best.objective_value != 0:
        report_gap = gap(best.objective_value, bounds.best_known_lb)

    logger.info("solve '%s': best=%s lb=%g", model.name,
                None if best is None else f"{best.objective_value:g}", bounds.best_known_lb)
    return SolveReport(
        model_name=model.name,
        best=best,
        per_replica=list(results),
        bounds=bounds,
        gap=report_gap,
        wall_time=wall_time,
        seeds=[config.seed_for(k) for k in range(config.n_replicas)],
        clock=config.clock,
    )
