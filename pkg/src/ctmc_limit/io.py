"""Reading and writing rate matrices as JSON or CSV.

JSON::

    {"states": ["a", "b"], "rates": [[-1, 1], [3, -3]], "metadata": {"k": "v"}}

CSV: one row of comma-separated numbers per line, optionally preceded by a
label header starting with ``#``::

    #a,b
    -1,1
    3,-3
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError, ShapeError


@dataclass(eq=False)
class MatrixDocument:
    rates: np.ndarray
    states: list = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        r = np.asarray(self.rates, dtype=np.float64)
        if r.ndim != 2 or r.shape[0] != r.shape[1] or r.shape[0] == 0:
            raise ShapeError(f"rates must be a non-empty square matrix, got shape {r.shape}")
        self.rates = r
        if self.states is not None:
            self.states = [str(s) for s in self.states]
            if len(self.states) != r.shape[0]:
                raise ShapeError(f"{len(self.states)} state labels for {r.shape[0]} states")
            if len(set(self.states)) != len(self.states):
                raise ShapeError("state labels must be unique")

    @property
    def n(self):
        return self.rates.shape[0]

    def __eq__(self, other):
        if not isinstance(other, MatrixDocument):
            return NotImplemented
        return (self.states == other.states and self.metadata == other.metadata
                and np.array_equal(self.rates, other.rates))


def _number(value, line=None, column=None):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"expected a number, got {value!r}", line, column)
    value = float(value)
    if not math.isfinite(value):
        raise ParseError(f"non-finite rate {value!r}", line, column)
    return value


def _square(rows):
    n = len(rows)
    if n == 0:
        raise ShapeError("matrix has no rows")
    for i, row in enumerate(rows):
        if len(row) != n:
            raise ShapeError(f"row {i} has {len(row)} entries, expected {n}")
    return np.array(rows, dtype=np.float64)


def loads_json(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(obj, dict) or "rates" not in obj:
        raise ParseError('expected an object with a "rates" member')
    rates = obj["rates"]
    if not isinstance(rates, list) or not all(isinstance(r, list) for r in rates):
        raise ParseError('"rates" must be an array of arrays')
    rows = [[_number(v) for v in row] for row in rates]
    states = obj.get("states")
    if states is not None and (not isinstance(states, list)
                               or not all(isinstance(s, str) for s in states)):
        raise ParseError('"states" must be an array of strings')
    metadata = obj.get("metadata") or {}
    if not isinstance(metadata, dict):
        raise ParseError('"metadata" must be an object')
    metadata = {str(k): str(v) for k, v in metadata.items()}
    return MatrixDocument(_square(rows), states, metadata)


def loads_csv(text):
    states = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if states is not None or rows:
                raise ParseError("label header must be the first line", lineno, 1)
            states = [s.strip() for s in line[1:].split(",")]
            continue
        row, col = [], 1
        for cell in raw.split(","):
            try:
                value = float(cell.strip())
            except ValueError:
                raise ParseError(f"invalid number {cell.strip()!r}", lineno, col) from None
            row.append(_number(value, lineno, col))
            col += len(cell) + 1
        rows.append(row)
    return MatrixDocument(_square(rows), states)


def _format_for(path, fmt):
    if fmt is not None:
        return fmt
    return "csv" if Path(path).suffix.lower() == ".csv" else "json"


def parse_matrix(path, fmt=None):
    """Read a :class:`MatrixDocument`; `fmt` defaults from the file suffix."""
    fmt = _format_for(path, fmt)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    if fmt == "json":
        return loads_json(text)
    if fmt == "csv":
        return loads_csv(text)
    raise ValueError(f"unknown format {fmt!r}")


def emit_matrix(doc, fmt="json"):
    """Serialize `doc`; floats are written with round-trip precision.

    CSV carries no metadata.
    """
    if fmt == "json":
        obj = {}
        if doc.states is not None:
            obj["states"] = doc.states
        obj["rates"] = doc.rates.tolist()
        if doc.metadata:
            obj["metadata"] = doc.metadata
        return json.dumps(obj, indent=1) + "\n"
    if fmt == "csv":
        lines = []
        if doc.states is not None:
            if any("," in s for s in doc.states):
                raise ValueError("CSV labels cannot contain commas")
            lines.append("#" + ",".join(doc.states))
        lines += [",".join(repr(float(v)) for v in row) for row in doc.rates]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")
