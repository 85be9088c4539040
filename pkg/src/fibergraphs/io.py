"""File formats: table JSON/CSV, fiber exports, and constraint matrices.

Table JSON is {"n": int, "r": int, "rows": [[int, ...], ...]}; table CSV is n
lines of n comma-separated integers with the dimension and margin inferred.
Malformed input is rejected with positional messages (1-based rows/columns).
"""

from __future__ import annotations

import json
from pathlib import Path

from .enumeration import Fiber
from .errors import InvalidDimensionError
from .tables import ContingencyTable, validate_table


def parse_rows_csv(text: str) -> list[list[int]]:
    """Raw integer rows from CSV text; positional errors on malformed cells."""
    rows: list[list[int]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        row = []
        for colno, cell in enumerate(line.split(","), start=1):
            try:
                row.append(int(cell.strip()))
            except ValueError:
                raise InvalidDimensionError(
                    f"line {lineno}, field {colno}: {cell.strip()!r} is not an integer"
                ) from None
        rows.append(row)
    if not rows:
        raise InvalidDimensionError("CSV input contains no rows")
    return rows


def parse_table_csv(text: str) -> ContingencyTable:
    """Table from CSV; n is the line count and r the first row's sum."""
    rows = parse_rows_csv(text)
    n = len(rows)
    for i, row in enumerate(rows, start=1):
        if len(row) != n:
            raise InvalidDimensionError(
                f"line {i} has {len(row)} fields, expected {n} ({n} lines present)"
            )
    return validate_table(n, sum(rows[0]), rows)


def parse_table_json(text: str) -> ContingencyTable:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidDimensionError(f"invalid JSON: {exc}") from None
    if not isinstance(payload, dict):
        raise InvalidDimensionError("table JSON must be an object")
    missing = {"n", "r", "rows"} - payload.keys()
    if missing:
        raise InvalidDimensionError(f"table JSON is missing keys: {sorted(missing)}")
    return validate_table(payload["n"], payload["r"], payload["rows"])


def load_table(path: str | Path) -> ContingencyTable:
    """Load a table, dispatching on the .json / .csv extension."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        return parse_table_json(text)
    if path.suffix.lower() == ".csv":
        return parse_table_csv(text)
    raise InvalidDimensionError(f"unrecognized table extension: {path.suffix!r}")


def load_rows(path: str | Path) -> list[list[int]]:
    """Raw rows from either format, without margin validation."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidDimensionError(f"invalid JSON: {exc}") from None
        rows = payload.get("rows") if isinstance(payload, dict) else payload
        if not isinstance(rows, list):
            raise InvalidDimensionError("JSON input does not contain a rows array")
        return [[int(x) for x in row] for row in rows]
    return parse_rows_csv(text)


def table_to_json(t: ContingencyTable) -> str:
    return json.dumps({"n": t.n, "r": t.r, "rows": t.rows()}, separators=(",", ":"))


def table_to_csv(t: ContingencyTable) -> str:
    return "\n".join(",".join(str(x) for x in row) for row in t.entries) + "\n"


def fiber_to_jsonl(fiber: Fiber) -> str:
    """One table per line, canonical order: {"id": k, "rows": [...]}."""
    lines = [
        json.dumps({"id": k, "rows": t.rows()}, separators=(",", ":"))
        for k, t in enumerate(fiber)
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def fiber_to_csv(fiber: Fiber) -> str:
    """Vertex id column plus row-major entry columns, with a header line."""
    n = fiber.n
    header = "id," + ",".join(f"r{i}c{j}" for i in range(1, n + 1) for j in range(1, n + 1))
    lines = [header]
    for k, t in enumerate(fiber):
        lines.append(f"{k}," + ",".join(str(x) for x in t.row_major()))
    return "\n".join(lines) + "\n"


def load_matrix_json(path: str | Path) -> list[list[int]]:
    """Integer matrix from {"rows": [[int, ...], ...]} (general fiber input)."""
    text = Path(path).read_text()
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidDimensionError(f"invalid JSON: {exc}") from None
    rows = payload.get("rows") if isinstance(payload, dict) else None
    if not isinstance(rows, list) or not rows:
        raise InvalidDimensionError('matrix JSON must be {"rows": [[int, ...], ...]}')
    width = len(rows[0])
    out = []
    for i, row in enumerate(rows, start=1):
        if len(row) != width:
            raise InvalidDimensionError(f"matrix row {i} has length {len(row)}, expected {width}")
        out.append([int(x) for x in row])
    return out


def parse_constraints(value: str) -> list[tuple[int, int]]:
    """Constraint list from a JSON array literal or from a JSON file path."""
    text = value
    if not value.lstrip().startswith("["):
        text = Path(value).read_text()
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidDimensionError(f"invalid constraint JSON: {exc}") from None
    if not isinstance(payload, list):
        raise InvalidDimensionError("constraints must be a JSON array of [i, j] pairs")
    out = []
    for k, pair in enumerate(payload, start=1):
        if not (isinstance(pair, list) and len(pair) == 2):
            raise InvalidDimensionError(f"constraint {k} is not an [i, j] pair")
        out.append((int(pair[0]), int(pair[1])))
    return out
