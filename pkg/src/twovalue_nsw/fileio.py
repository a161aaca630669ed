"""JSON instance and solution files."""
from __future__ import annotations

import json
import math
from typing import Any

from .core import Allocation, Instance, compute_values

FORMAT_VERSION = 1


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None, path: str | None = None):
        where = ""
        if line is not None:
            where = f"line {line}, column {column}: "
        elif path:
            where = f"{path}: "
        super().__init__(where + message)
        self.line, self.column, self.path = line, column, path


def _load(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno, e.colno) from None


def _int_field(doc: dict, name: str) -> int:
    if name not in doc:
        raise ParseError("missing field", path=name)
    value = doc[name]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"expected an integer, got {value!r}", path=name)
    return value


def parse_instance(text: str) -> Instance:
    doc = _load(text)
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", path="$")
    version = _int_field(doc, "version")
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported version {version}", path="version")
    p, n, m = (_int_field(doc, k) for k in ("p", "n", "m"))
    if p < 3 or p % 2 == 0:
        raise ParseError(f"p must be odd and at least 3, got {p}", path="p")
    if n < 1:
        raise ParseError(f"need at least one agent, got {n}", path="n")
    if m < 0:
        raise ParseError(f"negative good count {m}", path="m")
    rows = doc.get("heavy")
    if not isinstance(rows, list):
        raise ParseError("expected a list of rows", path="heavy")
    if len(rows) != n:
        raise ParseError(f"expected {n} rows, got {len(rows)}", path="heavy")
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != m:
            raise ParseError(f"expected a list of {m} entries", path=f"heavy[{i}]")
        for g, b in enumerate(row):
            if b not in (0, 1) or isinstance(b, float):
                raise ParseError(f"expected 0 or 1, got {b!r}", path=f"heavy[{i}][{g}]")
        out.append(tuple(bool(b) for b in row))
    return Instance(n, m, p, tuple(out))


def emit_instance(inst: Instance) -> str:
    rows = ",\n".join("    [" + ", ".join(str(int(b)) for b in row) + "]" for row in inst.heavy)
    body = f"[\n{rows}\n  ]" if rows else "[]"
    return (
        "{\n"
        f'  "version": {FORMAT_VERSION},\n'
        f'  "p": {inst.p},\n'
        f'  "n": {inst.n},\n'
        f'  "m": {inst.m},\n'
        f'  "heavy": {body}\n'
        "}\n"
    )


def solution_dict(alloc: Allocation, conversions: list[dict], trace: list[dict] | None = None) -> dict:
    product = math.prod(alloc.values2)
    doc = {
        "version": FORMAT_VERSION,
        "owner": list(alloc.owner),
        "as_heavy": [int(h) for h in alloc.as_heavy],
        "values_x2": list(alloc.values2),
        "nsw_product": str(product),
        "nsw_log10": math.log10(product) if product else None,
        "conversions": conversions,
    }
    if trace is not None:
        doc["trace"] = trace
    return doc


def emit_solution(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def validate_solution(inst: Instance, doc: dict) -> Allocation:
    """Rebuild the allocation from a solution document and check its recorded values."""
    try:
        owner = [int(i) for i in doc["owner"]]
        typing = [bool(h) for h in doc["as_heavy"]]
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"malformed solution: {e}", path="owner") from None
    if len(owner) != inst.m or len(typing) != inst.m:
        raise ParseError(f"expected {inst.m} goods", path="owner")
    alloc = Allocation.from_owners(inst, owner, typing)
    values = compute_values(inst, alloc)
    if values != doc.get("values_x2"):
        raise ParseError(f"values_x2 {doc.get('values_x2')} != recomputed {values}", path="values_x2")
    if str(math.prod(values)) != doc.get("nsw_product"):
        raise ParseError("nsw_product does not match the values", path="nsw_product")
    return alloc
