"""
MPS model files and .sol solution files.

Both fixed- and free-format MPS are read. Only what a 0-1 program needs is
accepted: one N row, L/G/E rows, integer MARKERs and BV/UP/LO/UI/LI bounds
that keep every column inside {0, 1}. RANGES, SOS, extra N rows, objective
constants and maximization are rejected with a line-numbered error.
"""

import gzip
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .errors import DimensionError, MpsParseError, SolParseError
from .model import Assignment, IlpModel, LinearConstraint, Relation

logger = logging.getLogger(__name__)

SOL_INTEGRALITY_TOL = 1e-4

_SECTIONS = {"NAME", "ROWS", "COLUMNS", "RHS", "BOUNDS", "RANGES", "ENDATA", "OBJSENSE", "OBJSENS", "SOS"}
_ROW_TYPES = {"N": None, "L": Relation.LE, "G": Relation.GE, "E": Relation.EQ}
_VALUE_BOUNDS = {"UP", "LO", "FX", "UI", "LI"}
_FLAG_BOUNDS = {"BV", "FR", "MI", "PL"}


@dataclass
class RowRecord:
    name: str
    row_type: str
    line_no: int


@dataclass
class ColumnRecord:
    name: str
    line_no: int
    integer: bool = False
    entries: Dict[str, float] = field(default_factory=dict)
    lower: float = 0.0
    upper: Optional[float] = None
    binary: bool = False


@dataclass
class MpsDocument:
    """Records of an MPS file as read, before conversion to an IlpModel"""
    name: str = ""
    rows: List[RowRecord] = field(default_factory=list)
    columns: Dict[str, ColumnRecord] = field(default_factory=dict)
    rhs: Dict[str, float] = field(default_factory=dict)
    bounds: List[Tuple[str, str, Optional[float], int]] = field(default_factory=list)
    ranges: List[Tuple[str, float, int]] = field(default_factory=list)
    objective_row_name: Optional[str] = None
    format: str = "free"

    def stats(self) -> Dict[str, int]:
        """Dimension summary for cross-checking against published instance metadata"""
        constraint_rows = [r for r in self.rows if r.row_type != "N"]
        return {
            "n": len(self.columns),
            "m_eq": sum(1 for r in constraint_rows if r.row_type == "E"),
            "m_ineq": sum(1 for r in constraint_rows if r.row_type in ("L", "G")),
            "nonzeros": sum(
                1 for c in self.columns.values() for row in c.entries if row != self.objective_row_name
            ),
        }


@dataclass(frozen=True)
class SolEntry:
    name: str
    value: float
    integral: bool = True


@dataclass
class SolFile:
    entries: List[SolEntry] = field(default_factory=list)
    declared_objective: Optional[float] = None
    comments: List[str] = field(default_factory=list)

    @property
    def non_integral(self) -> List[str]:
        return [e.name for e in self.entries if not e.integral]

    def as_dict(self) -> Dict[str, float]:
        return {e.name: e.value for e in self.entries}

    def to_assignment(self, var_names: Sequence[str]) -> Assignment:
        """Assignment over var_names (missing names read as 0)"""
        values = self.as_dict()
        objective = self.declared_objective if self.declared_objective is not None else 0.0
        return Assignment(tuple(int(values.get(name, 0)) for name in var_names), objective)


def _is_header(line: str) -> bool:
    return bool(line) and not line[0].isspace()


def _looks_fixed(line: str) -> bool:
    """Fixed format places fields at columns 2, 5, 15, 25 (1-based)"""
    return (
        len(line) >= 25
        and line[:4].strip() == ""
        and line[4] != " "
        and line[13] == " "
        and line[14] != " "
        and line[23] == " "
        and line[24] != " "
    )


def _fixed_fields(line: str) -> List[str]:
    spans = ((1, 3), (4, 12), (14, 22), (24, 36), (39, 47), (49, 61))
    fields = [line[a:b].strip() for a, b in spans]
    while fields and not fields[-1]:
        fields.pop()
    return fields


def _number(token: str, line_no: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise MpsParseError(f"expected a number, got '{token}'", line_no) from None
    if not math.isfinite(value):
        raise MpsParseError(f"non-finite value '{token}'", line_no)
    return value


def _detect_format(lines: List[str]) -> str:
    section = None
    for raw in lines:
        line = raw.rstrip("\n\r")
        if not line.strip() or line.startswith("*"):
            continue
        if _is_header(line):
            section = line.split()[0].upper()
            continue
        if section == "COLUMNS" and "'MARKER'" not in line:
            return "fixed" if _looks_fixed(line) else "free"
    return "free"


class _MpsReader:
    """Line-oriented MPS reader building an MpsDocument"""

    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.doc = MpsDocument(format=_detect_format(self.lines))
        self.section: Optional[str] = None
        self.in_integer_block = False
        self.row_types: Dict[str, str] = {}
        self.seen_endata = False
        self.pending_objsense = False

    def fields(self, line: str) -> List[str]:
        if self.doc.format == "fixed" and "'MARKER'" not in line:
            fields = _fixed_fields(line)
            # Field 1 (the type column) is blank in COLUMNS and RHS records
            if self.section in ("COLUMNS", "RHS"):
                fields = fields[1:]
            return fields
        return line.split()

    def read(self) -> MpsDocument:
        for line_no, raw in enumerate(self.lines, start=1):
            line = raw.rstrip()
            if not line.strip() or line.lstrip().startswith("*"):
                continue
            if self.seen_endata:
                raise MpsParseError("content after ENDATA", line_no)
            if _is_header(line):
                self._header(line, line_no)
            else:
                self._data(line, line_no)
        if self.doc.objective_row_name is None:
            raise MpsParseError("no objective (N) row declared", len(self.lines))
        return self.doc

    def _header(self, line: str, line_no: int):
        tokens = line.split()
        keyword = tokens[0].upper()
        if keyword not in _SECTIONS:
            raise MpsParseError(f"unknown section '{tokens[0]}'", line_no)
        if keyword == "RANGES":
            raise MpsParseError("ranges unsupported", line_no)
        if keyword == "SOS":
            raise MpsParseError("SOS sections unsupported", line_no)
        self.section = keyword
        if keyword == "NAME":
            self.doc.name = line[4:].strip() if len(tokens) > 1 else ""
        elif keyword == "ENDATA":
            self.seen_endata = True
        elif keyword in ("OBJSENSE", "OBJSENS"):
            if len(tokens) > 1:
                self._objsense(tokens[1], line_no)
            else:
                self.pending_objsense = True

    def _objsense(self, token: str, line_no: int):
        sense = token.upper()
        if sense in ("MAX", "MAXIMIZE"):
            raise MpsParseError("maximization unsupported, negate the objective instead", line_no)
        if sense not in ("MIN", "MINIMIZE"):
            raise MpsParseError(f"unknown objective sense '{token}'", line_no)
        self.pending_objsense = False

    def _data(self, line: str, line_no: int):
        if self.section is None:
            raise MpsParseError("data line before any section", line_no)
        handler = {
            "ROWS": self._row,
            "COLUMNS": self._column,
            "RHS": self._rhs,
            "BOUNDS": self._bound,
        }.get(self.section)
        if self.section in ("OBJSENSE", "OBJSENS") and self.pending_objsense:
            self._objsense(line.strip(), line_no)
            return
        if handler is None:
            raise MpsParseError(f"unexpected data in section {self.section}", line_no)
        handler(self.fields(line), line_no)

    def _row(self, f: List[str], line_no: int):
        if len(f) != 2:
            raise MpsParseError("ROWS entry needs a type and a name", line_no)
        row_type, name = f[0].upper(), f[1]
        if row_type not in _ROW_TYPES:
            raise MpsParseError(f"unknown row type '{f[0]}'", line_no)
        if name in self.row_types:
            raise MpsParseError(f"row '{name}' declared twice", line_no)
        if row_type == "N":
            if self.doc.objective_row_name is not None:
                raise MpsParseError(f"extra free row '{name}' unsupported", line_no)
            self.doc.objective_row_name = name
        self.row_types[name] = row_type
        self.doc.rows.append(RowRecord(name, row_type, line_no))

    def _column(self, f: List[str], line_no: int):
        if len(f) >= 3 and f[1].strip("'").upper() == "MARKER":
            marker = f[2].strip("'").upper()
            if marker == "INTORG":
                self.in_integer_block = True
            elif marker == "INTEND":
                self.in_integer_block = False
            else:
                raise MpsParseError(f"unknown marker '{f[2]}'", line_no)
            return
        if len(f) not in (3, 5):
            raise MpsParseError("COLUMNS entry needs a column and one or two (row, value) pairs", line_no)

        name = f[0]
        column = self.doc.columns.get(name)
        if column is None:
            column = ColumnRecord(name, line_no, integer=self.in_integer_block)
            self.doc.columns[name] = column
        for row, token in zip(f[1::2], f[2::2]):
            if row not in self.row_types:
                raise MpsParseError(f"column '{name}' references undeclared row '{row}'", line_no)
            if row in column.entries:
                raise MpsParseError(f"duplicate entry for row '{row}' in column '{name}'", line_no)
            column.entries[row] = _number(token, line_no)

    def _rhs(self, f: List[str], line_no: int):
        # The RHS set name is optional in free format
        pairs = f[1:] if len(f) % 2 == 1 else f
        if not pairs:
            raise MpsParseError("RHS entry needs (row, value) pairs", line_no)
        for row, token in zip(pairs[0::2], pairs[1::2]):
            if row not in self.row_types:
                raise MpsParseError(f"RHS references undeclared row '{row}'", line_no)
            if row == self.doc.objective_row_name:
                raise MpsParseError("objective constants (RHS on the N row) unsupported", line_no)
            if row in self.doc.rhs:
                raise MpsParseError(f"duplicate RHS entry for row '{row}'", line_no)
            self.doc.rhs[row] = _number(token, line_no)

    def _bound(self, f: List[str], line_no: int):
        if not f:
            raise MpsParseError("empty BOUNDS entry", line_no)
        kind = f[0].upper()
        if kind in _VALUE_BOUNDS:
            if len(f) == 4:
                column, token = f[2], f[3]
            elif len(f) == 3:
                column, token = f[1], f[2]
            else:
                raise MpsParseError(f"{kind} bound needs a column and a value", line_no)
            value = _number(token, line_no)
        elif kind in _FLAG_BOUNDS:
            if len(f) in (3, 4):
                column = f[2]
            elif len(f) == 2:
                column = f[1]
            else:
                raise MpsParseError(f"{kind} bound needs a column", line_no)
            value = None
        else:
            raise MpsParseError(f"unknown bound type '{f[0]}'", line_no)
        if column not in self.doc.columns:
            raise MpsParseError(f"bound on undeclared column '{column}'", line_no)
        self.doc.bounds.append((kind, column, value, line_no))
        self._apply_bound(self.doc.columns[column], kind, value, line_no)

    def _apply_bound(self, column: ColumnRecord, kind: str, value: Optional[float], line_no: int):
        if kind == "BV":
            column.binary = True
            column.integer = True
            column.lower, column.upper = 0.0, 1.0
        elif kind in ("UP", "UI"):
            column.upper = value
            column.integer = column.integer or kind == "UI"
        elif kind in ("LO", "LI"):
            column.lower = value
            column.integer = column.integer or kind == "LI"
        elif kind == "FX":
            column.lower = column.upper = value
        else:
            raise MpsParseError(
                f"column '{column.name}': {kind} bound is not binary-representable; preprocess the model externally",
                line_no,
            )


def parse_mps_document(text: str) -> MpsDocument:
    """Read MPS text into section records"""
    return _MpsReader(text).read()


def _binary_domain(column: ColumnRecord) -> Tuple[float, float]:
    # Integer columns without an explicit upper bound follow the classic MPS default of 1
    upper = column.upper if column.upper is not None else 1.0
    lower = column.lower
    if not column.integer:
        raise MpsParseError(
            f"column '{column.name}' is continuous; only 0-1 variables are supported, preprocess the model externally",
            column.line_no,
        )
    if lower not in (0.0, 1.0) or upper not in (0.0, 1.0) or lower > upper:
        raise MpsParseError(
            f"column '{column.name}' has domain [{lower:g}, {upper:g}] which is not binary; "
            "preprocess the model externally",
            column.line_no,
        )
    return lower, upper


def document_to_model(doc: MpsDocument) -> IlpModel:
    """Convert parsed MPS records into an IlpModel"""
    var_names = list(doc.columns)
    col_index = {name: j for j, name in enumerate(var_names)}
    objective = [doc.columns[name].entries.get(doc.objective_row_name, 0.0) for name in var_names]

    terms: Dict[str, List[Tuple[int, float]]] = {r.name: [] for r in doc.rows if r.row_type != "N"}
    for name, column in doc.columns.items():
        for row, value in column.entries.items():
            if row in terms and value != 0.0:
                terms[row].append((col_index[name], value))

    eq_rows: List[LinearConstraint] = []
    ineq_rows: List[LinearConstraint] = []
    for record in doc.rows:
        if record.row_type == "N":
            continue
        relation = _ROW_TYPES[record.row_type]
        rhs = doc.rhs.get(record.name, 0.0)
        row_terms = terms[record.name]
        if not row_terms:
            satisfied = {Relation.LE: 0.0 <= rhs, Relation.GE: 0.0 >= rhs, Relation.EQ: rhs == 0.0}[relation]
            if not satisfied:
                raise MpsParseError(f"empty row '{record.name}' can never be satisfied", record.line_no)
            logger.warning("dropping empty row '%s'", record.name)
            continue
        constraint = LinearConstraint(tuple(row_terms), relation, rhs, record.name)
        (eq_rows if relation == Relation.EQ else ineq_rows).append(constraint)

    for name, column in doc.columns.items():
        lower, upper = _binary_domain(column)
        if lower == upper:
            eq_rows.append(LinearConstraint(((col_index[name], 1.0),), Relation.EQ, lower, f"{name}_fixed"))

    return IlpModel(tuple(var_names), tuple(objective), tuple(eq_rows), tuple(ineq_rows), name=doc.name or "model")


def parse_mps(text: str) -> IlpModel:
    """Parse fixed- or free-format MPS text into a 0-1 IlpModel"""
    doc = parse_mps_document(text)
    model = document_to_model(doc)
    logger.debug("parsed %s MPS '%s': %s", doc.format, model.name, model.stats())
    return model


def _read_text(path: Union[str, Path], error_type: type = MpsParseError) -> str:
    path = Path(path)
    try:
        if path.suffix == ".gz":
            with gzip.open(path, "rt", encoding="utf-8") as f:
                return f.read()
        return path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise error_type(f"{path.name} is not valid text: {exc.reason} at byte {exc.start}") from None


def read_mps_file(path: Union[str, Path]) -> IlpModel:
    """Read an .mps or .mps.gz file; a nameless model takes the file stem"""
    model = parse_mps(_read_text(path))
    if model.name == "model":
        stem = Path(path).name.split(".")[0]
        model = IlpModel(model.var_names, model.objective, model.eq_constraints, model.ineq_constraints, name=stem)
    return model


def format_number(value: float) -> str:
    """Shortest text that reads back to the same float; integers without a decimal point"""
    if float(value).is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))


def write_sol(assignment: Assignment, var_names: Sequence[str]) -> str:
    """Solution text: '=obj= <value>' then one 'name value' line per variable"""
    if len(var_names) != len(assignment.values):
        raise DimensionError(f"{len(var_names)} names for {len(assignment.values)} values")
    lines = [f"=obj= {format_number(assignment.objective_value)}"]
    lines.extend(f"{name} {value}" for name, value in zip(var_names, assignment.values))
    return "\n".join(lines) + "\n"


def parse_sol(text: str) -> SolFile:
    """Read .sol text. Values within 1e-4 of 0 or 1 are snapped to binary."""
    sol = SolFile()
    seen = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            comment = line[1:].strip()
            sol.comments.append(comment)
            if comment.lower().startswith("objective value"):
                sol.declared_objective = _sol_number(comment.split("=", 1)[-1].strip(), line_no)
            continue
        tokens = line.split()
        if tokens[0] == "=obj=":
            if len(tokens) != 2:
                raise SolParseError("'=obj=' line needs exactly one value", line_no)
            sol.declared_objective = _sol_number(tokens[1], line_no)
            continue
        # SCIP-style files append '(obj:...)' to each line
        if len(tokens) == 3 and tokens[2].startswith("(obj:"):
            tokens = tokens[:2]
        if len(tokens) != 2:
            raise SolParseError(f"malformed line '{line}'", line_no)
        name, value = tokens[0], _sol_number(tokens[1], line_no)
        if name in seen:
            raise SolParseError(f"variable '{name}' listed twice", line_no)
        seen.add(name)
        nearest = round(value)
        if nearest in (0, 1) and abs(value - nearest) <= SOL_INTEGRALITY_TOL:
            sol.entries.append(SolEntry(name, float(nearest), True))
        else:
            logger.debug("non-integral value %g for '%s'", value, name)
            sol.entries.append(SolEntry(name, value, False))
    return sol


def _sol_number(token: str, line_no: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise SolParseError(f"expected a number, got '{token}'", line_no) from None
    if not math.isfinite(value):
        raise SolParseError(f"value '{token}' is not finite", line_no)
    return value


def read_sol_file(path: Union[str, Path]) -> SolFile:
    return parse_sol(_read_text(path, SolParseError))
