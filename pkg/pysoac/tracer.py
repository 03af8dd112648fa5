"""
Trajectory tracing for SOAC integration.
Records a sparse time series of the circuit for offline inspection.
"""

import csv
import io
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np

from .dynamics import SoacState, readout, violation_summary
from .errors import ModelValidationError
from .model import IlpModel, evaluate_objective
from .soac import Soac

TRACE_HEADER = ("t", "max_violation", "n_violated_gates", "objective_of_readout")


@dataclass(frozen=True)
class TraceRow:
    t: float
    max_violation: float
    n_violated_gates: int
    objective_of_readout: float


class TrajectoryTracer:
    """
    Records one row every `stride` calls to record().

    A tracer is owned by a single replica, so it carries no locking and
    pickles cleanly across process-based workers.
    """

    def __init__(self, stride: int = 100, threshold: float = 0.0):
        if stride < 1:
            raise ModelValidationError("trace stride must be at least 1")
        self.stride = stride
        self.threshold = threshold
        self.rows: List[TraceRow] = []
        self.calls = 0
        self.enabled = True

    def record(self, state: SoacState, soac: Soac, model: IlpModel) -> Optional[TraceRow]:
        """Count a step and record a row when the stride is reached"""
        if not self.enabled:
            return None
        self.calls += 1
        if self.calls % self.stride:
            return None
        max_violation, n_violated = violation_summary(state, soac)
        objective = evaluate_objective(model, readout(state, self.threshold))
        row = TraceRow(float(state.t), max_violation, n_violated, objective)
        self.rows.append(row)
        return row

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for row in self.rows:
            writer.writerow([repr(row.t), repr(row.max_violation), row.n_violated_gates, repr(row.objective_of_readout)])
        return buffer.getvalue()

    def save(self, filename: str):
        """Save trace to a CSV file"""
        with open(filename, 'w', newline='') as f:
            f.write(self.to_csv())

    def clear(self):
        self.rows.clear()
        self.calls = 0

    def enable(self):
        self.enabled = True

    def disable(self):
        self.enabled = False

    def get_stats(self) -> Dict[str, Any]:
        """Summary of the recorded trajectory"""
        if not self.rows:
            return {'total_rows': 0, 'time_span': 0.0, 'final_max_violation': None, 'min_readout_objective': None}
        return {
            'total_rows': len(self.rows),
            'time_span': self.rows[-1].t - self.rows[0].t,
            'final_max_violation': self.rows[-1].max_violation,
            'min_readout_objective': float(np.min([r.objective_of_readout for r in self.rows])),
        }
