"""
Utilities for analyzing solver event streams.
Provides tools for filtering, counting, and validating event sequences.
"""
from typing import List

from .events import SolverEvent, SolverEventType


class EventMatcher:
    """Utility for matching and validating solver events"""

    @staticmethod
    def has_event_type(events: List[SolverEvent], event_type: SolverEventType) -> bool:
        return any(event.event_type == event_type for event in events)

    @staticmethod
    def count_event_type(events: List[SolverEvent], event_type: SolverEventType) -> int:
        return sum(1 for event in events if event.event_type == event_type)

    @staticmethod
    def find_events(events: List[SolverEvent], **filters) -> List[SolverEvent]:
        """Find events matching the given filters.

        `event_type` and `replica` match the event fields, any other key is
        looked up in the event data.
        """
        matches = []
        for event in events:
            match = True
            for key, value in filters.items():
                if key in ('event_type', 'replica'):
                    actual = getattr(event, key)
                elif key in event.data:
                    actual = event.data[key]
                else:
                    match = False
                    break
                if actual != value:
                    match = False
                    break
            if match:
                matches.append(event)
        return matches

    @staticmethod
    def assert_sequence(events: List[SolverEvent], expected_types: List[SolverEventType]) -> bool:
        """True when the events have exactly the expected sequence of types"""
        if len(events) != len(expected_types):
            return False
        return all(event.event_type == expected for event, expected in zip(events, expected_types))

    @staticmethod
    def improving_objectives(events: List[SolverEvent]) -> List[float]:
        """Objectives of IMPROVED events in the order they were recorded"""
        return [e.get_objective() for e in events if e.event_type == SolverEventType.IMPROVED]
