"""
Shared event type definitions for solver progress reporting.

Replicas never touch shared state while running; they collect SolverEvents
locally and hand them back to the orchestrator with their result.
"""

import json
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any, Dict, Optional


class SolverEventType(StrEnum):
    """Types of events a replica records while running"""
    IMPROVED = "improved"
    BOUND_TIGHTENED = "bound_tightened"
    RESTART = "restart"
    TERMINATED = "terminated"


@dataclass
class SolverEvent:
    """One progress event of a replica.

    wall_time is measured on the replica's clock (wall clock, or dynamical
    time in step-limited runs).
    """
    replica: int
    event_type: SolverEventType
    wall_time: float
    step: int
    data: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if isinstance(self.event_type, str):
            self.event_type = SolverEventType(self.event_type)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary representation for serialization"""
        return {
            'replica': self.replica,
            'event_type': str(self.event_type),
            'wall_time': self.wall_time,
            'step': self.step,
            'data': self.data,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=str)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SolverEvent':
        return cls(
            replica=data['replica'],
            event_type=SolverEventType(data['event_type']),
            wall_time=data['wall_time'],
            step=data['step'],
            data=data.get('data', {}),
        )

    def progress_line(self) -> str:
        """The log line for an improving solution: t=<s> replica=<k> obj=<v>"""
        return f"t={self.wall_time:.3f} replica={self.replica} obj={self.get_objective():g}"

    # Convenience accessors for common data patterns
    def get_objective(self) -> Optional[float]:
        return self.data.get('objective')

    def get_bound(self) -> Optional[float]:
        return self.data.get('bound')

    def get_reason(self) -> Optional[str]:
        return self.data.get('reason')
