"""
Flow field, bounded integration and digital readout of a SOAC.

State: terminal voltages v in [-1, 1] (one per variable), and per gate a fast
memory xs in [0, 1] and a slow memory xl in [1, xl_max]. A gate's violation is
the hinge C = max(0, a·v~ - b) evaluated at v~ = (v + 1) / 2. Violated gates
push their terminals down the gradient of sum_i xl_i xs_i C_i^2; variables
whose gates are all satisfied drift toward the nearest rail.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from .errors import ModelValidationError, NonFiniteStateError
from .soac import AlgebraicGate, Soac

logger = logging.getLogger(__name__)

# Violations at or below this are rounding noise from row scaling
GATE_EPS = 1e-12


@dataclass(frozen=True)
class DynamicsParams:
    """Tunable circuit parameters. Replicas run different parameter sets."""
    dt: float = 0.1
    beta: float = 20.0
    gamma: float = 0.05
    alpha: float = 1.0
    delta: float = 0.1
    xl_max: float = 1e4
    zeta: float = 0.01
    threshold: float = 0.0

    def __post_init__(self):
        values = (self.dt, self.beta, self.gamma, self.alpha, self.delta, self.xl_max, self.zeta, self.threshold)
        if not all(math.isfinite(v) for v in values):
            raise ModelValidationError("dynamics parameters must be finite")
        if self.dt <= 0:
            raise ModelValidationError("dt must be positive")
        if self.xl_max < 1:
            raise ModelValidationError("xl_max must be at least 1")
        if min(self.beta, self.gamma, self.alpha, self.delta, self.zeta) < 0:
            raise ModelValidationError("memory and damping rates must be nonnegative")

    def to_dict(self) -> Dict[str, float]:
        return {
            "dt": self.dt, "beta": self.beta, "gamma": self.gamma, "alpha": self.alpha,
            "delta": self.delta, "xl_max": self.xl_max, "zeta": self.zeta, "threshold": self.threshold,
        }


@dataclass
class SoacState:
    """Full dynamical state y of one replica"""
    v: np.ndarray
    xs: np.ndarray
    xl: np.ndarray
    t: float = 0.0

    def copy(self) -> 'SoacState':
        return SoacState(self.v.copy(), self.xs.copy(), self.xl.copy(), self.t)

    def within_bounds(self, params: DynamicsParams) -> bool:
        return bool(
            np.all(np.abs(self.v) <= 1.0)
            and np.all((self.xs >= 0.0) & (self.xs <= 1.0))
            and np.all((self.xl >= 1.0) & (self.xl <= params.xl_max))
        )

    def matches(self, soac: Soac) -> bool:
        return self.v.shape[0] == soac.n_vars and self.xs.shape[0] == soac.n_gates == self.xl.shape[0]


@dataclass
class StateDerivative:
    v: np.ndarray
    xs: np.ndarray
    xl: np.ndarray

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.v)) and np.all(np.isfinite(self.xs)) and np.all(np.isfinite(self.xl)))

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.v ** 2) + np.sum(self.xs ** 2) + np.sum(self.xl ** 2)))


def extend_memory(state: SoacState, n_gates: int, xs0: float = 0.5, xl0: float = 1.0) -> SoacState:
    """Append resting memories for gates added after the state was created"""
    extra = n_gates - state.xs.shape[0]
    if extra <= 0:
        return state
    return SoacState(
        state.v,
        np.concatenate([state.xs, np.full(extra, xs0)]),
        np.concatenate([state.xl, np.full(extra, xl0)]),
        state.t,
    )


def gate_violation(gate: AlgebraicGate, v: np.ndarray) -> float:
    """Hinge violation C = max(0, sum_j a_j (v_j + 1)/2 - b) of one gate"""
    s = sum(a * (v[j] + 1.0) / 2.0 for j, a in gate.terms)
    c = s - gate.rhs
    return float(c) if c > GATE_EPS else 0.0


def gate_violations(soac: Soac, v: np.ndarray) -> np.ndarray:
    """Violations of all gates at once"""
    if soac.n_gates == 0:
        return np.zeros(0)
    c = soac.matrix @ ((v + 1.0) / 2.0) - soac.rhs
    c[c <= GATE_EPS] = 0.0
    return c


def flow(state: SoacState, soac: Soac, params: DynamicsParams) -> StateDerivative:
    """Right-hand side F(y).

    v'_j  = -sum_{i in gates(j)} xl_i xs_i a_ij C_i      if some incident gate is violated
          =  zeta v_j (1 - v_j^2)                         otherwise
    xs'_i = beta (C_i - gamma)
    xl'_i = alpha (C_i - delta)
    """
    c = gate_violations(soac, state.v)
    if soac.n_gates:
        weights = state.xl * state.xs * c
        dv = -(soac.matrix.T @ weights)
        violated = (soac.pattern_t @ (c > 0.0).astype(float)) > 0.0
    else:
        dv = np.zeros_like(state.v)
        violated = np.zeros(state.v.shape[0], dtype=bool)

    settle = params.zeta * state.v * (1.0 - state.v ** 2)
    dv = np.where(violated, dv, settle)
    return StateDerivative(
        np.asarray(dv, dtype=float),
        params.beta * (c - params.gamma),
        params.alpha * (c - params.delta),
    )


def step(state: SoacState, soac: Soac, params: DynamicsParams) -> SoacState:
    """Forward Euler step followed by clamping every component to its box"""
    d = flow(state, soac, params)
    if not d.is_finite():
        raise NonFiniteStateError(f"non-finite flow at t={state.t:g}")
    return SoacState(
        np.clip(state.v + params.dt * d.v, -1.0, 1.0),
        np.clip(state.xs + params.dt * d.xs, 0.0, 1.0),
        np.clip(state.xl + params.dt * d.xl, 1.0, params.xl_max),
        state.t + params.dt,
    )


def readout(state: SoacState, threshold: float = 0.0) -> np.ndarray:
    """Digital readout: 1 where v_j > threshold, ties read as 0"""
    return (np.asarray(state.v) > threshold).astype(np.int64)


def violation_summary(state: SoacState, soac: Soac) -> Tuple[float, int]:
    """(max violation, number of violated gates) at the current voltages"""
    c = gate_violations(soac, state.v)
    if c.size == 0:
        return 0.0, 0
    return float(c.max()), int(np.count_nonzero(c))
