"""
Rendering of solver reports and solution verdicts.
Provides aligned key-value text, JSON serialization and rich tables.
"""

import json
from typing import Dict, List, Optional, Sequence, Tuple

from rich.table import Table

from .mps_io import format_number
from .solver import SolveReport
from .verify import SolutionVerdict, gap_uses_absolute_denominator


def _value(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return format_number(value) if value.is_integer() else f"{value:.6g}"
    return str(value)


def format_key_values(pairs: Sequence[Tuple[str, object]]) -> str:
    """Align 'key : value' lines on the longest key"""
    width = max((len(k) for k, _ in pairs), default=0)
    return "\n".join(f"{key.ljust(width)} : {_value(value)}" for key, value in pairs)


def format_gap(value: float) -> str:
    """Four significant digits: 0.25, 0, 0.01777"""
    return f"{value:.4g}"


def report_pairs(report: SolveReport, checkpoints: Sequence[float] = ()) -> List[Tuple[str, object]]:
    best = report.best
    pairs: List[Tuple[str, object]] = [
        ("model", report.model_name),
        ("status", "feasible" if best is not None else "no feasible solution"),
        ("objective", None if best is None else best.objective_value),
        ("lower_bound", report.lower_bound),
        ("lower_bound_source", report.bounds.source),
        ("gap", None if report.gap is None else format_gap(report.gap)),
    ]
    if best is not None and report.gap is not None and gap_uses_absolute_denominator(best.objective_value):
        pairs.append(("gap_note", "negative objective, |O_best| used as denominator"))
    first = [r.first_feasible_time for r in report.per_replica if r.first_feasible_time is not None]
    pairs.extend([
        ("first_feasible_time", min(first) if first else None),
        ("improvements", len(report.merged_history())),
        ("best_replica", report.best_replica),
        ("replicas", len(report.per_replica)),
        ("steps", sum(r.steps_taken for r in report.per_replica)),
        ("restarts", sum(r.restarts for r in report.per_replica)),
        ("clock", report.clock),
        ("time", report.wall_time),
        ("seeds", ",".join(str(s) for s in report.seeds)),
    ])
    for seconds in checkpoints:
        pairs.append((f"objective@{format_number(seconds)}", report.objective_at(seconds)))
    return pairs


def format_report(report: SolveReport, checkpoints: Sequence[float] = ()) -> str:
    """Aligned key-value text summary of a solve"""
    return format_key_values(report_pairs(report, checkpoints))


def format_verdict(verdict: SolutionVerdict) -> str:
    pairs: List[Tuple[str, object]] = [
        ("feasible", verdict.feasible),
        ("objective", verdict.objective),
        ("declared_objective", verdict.declared_objective),
        ("objective_matches", verdict.objective_matches),
        ("violated_rows", ",".join(v.name for v in verdict.violated_rows) or None),
        ("gap", None if verdict.gap is None else format_gap(verdict.gap)),
    ]
    if verdict.missing_vars:
        pairs.append(("missing_vars", len(verdict.missing_vars)))
    if verdict.non_integral_vars:
        pairs.append(("non_integral_vars", ",".join(verdict.non_integral_vars)))
    return format_key_values(pairs)


def report_to_json(report: SolveReport, config: Optional[Dict[str, object]] = None) -> str:
    """Machine-readable report; deterministic for step-limited runs"""
    payload = report.to_dict()
    if config is not None:
        payload["config"] = config
    return json.dumps(payload, indent=2, sort_keys=True)


def history_table(report: SolveReport) -> Table:
    """Rich table of every improving solution across replicas"""
    table = Table(title=f"Anytime history ({report.clock} clock)")
    table.add_column("time", justify="right")
    table.add_column("replica", justify="right")
    table.add_column("objective", justify="right")
    for t, replica, objective in report.merged_history():
        table.add_row(f"{t:.3f}", str(replica), _value(objective))
    return table
