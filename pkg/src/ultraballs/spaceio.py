"""Reading and writing spaces (JSON, CSV) and exporting trees (JSON, DOT, Newick).

JSON space::

    {"points": ["a", "b"], "dist": [["0", "1"], ["1", "0"]]}

Entries are strings in decimal (``"0.25"``) or ratio (``"1/4"``) form;
plain JSON integers and floats are accepted too.

CSV space: the first row holds the point labels, followed by one row of
entries per point in the same order.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .metric import SpaceError, UltrametricSpace, ValidationReport, format_scalar, validate
from .reptree import RepTree

__all__ = [
    "InvalidSpace",
    "parse_space",
    "load_space",
    "space_to_json",
    "dump_space",
    "tree_to_json",
    "tree_to_dot",
    "tree_to_newick",
]


class InvalidSpace(ValueError):
    """Input parsed but is not an ultrametric space."""

    def __init__(self, report: ValidationReport):
        super().__init__("; ".join(report.lines()))
        self.report = report


def _from_json(text: str) -> tuple[list, list]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpaceError("unparsable-entry", f"bad JSON: {exc}") from None
    if not isinstance(doc, dict) or "points" not in doc or "dist" not in doc:
        raise SpaceError("non-square", 'expected an object with "points" and "dist"')
    points, dist = doc["points"], doc["dist"]
    if not isinstance(points, list) or not all(isinstance(p, str) for p in points):
        raise SpaceError("duplicate-labels", '"points" must be a list of strings')
    if not isinstance(dist, list) or not all(isinstance(r, list) for r in dist):
        raise SpaceError("non-square", '"dist" must be a list of rows')
    return points, dist


def _from_csv(text: str) -> tuple[list, list]:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows:
        raise SpaceError("empty", "empty CSV")
    points = [p.strip() for p in rows[0]]
    return points, [[x.strip() for x in r] for r in rows[1:]]


def parse_space(text: str, fmt: str = "json") -> UltrametricSpace | ValidationReport:
    points, dist = _from_json(text) if fmt == "json" else _from_csv(text)
    return validate(points, dist)


def load_space(path: str | Path) -> UltrametricSpace:
    """Read and validate a space; the format follows the file suffix.

    Raises :class:`SpaceError` for malformed input and :class:`InvalidSpace`
    when the matrix is not an ultrametric.
    """
    path = Path(path)
    fmt = "csv" if path.suffix.lower() == ".csv" else "json"
    result = parse_space(path.read_text(encoding="utf-8"), fmt)
    if isinstance(result, ValidationReport):
        raise InvalidSpace(result)
    return result


def space_to_json(s: UltrametricSpace) -> dict:
    return {
        "points": list(s.points),
        "dist": [[format_scalar(x) for x in row] for row in s.dist],
    }


def dump_space(s: UltrametricSpace, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(space_to_json(s)) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(s.points)
    for row in s.dist:
        writer.writerow([format_scalar(x) for x in row])
    return buf.getvalue()


def tree_to_json(t: RepTree) -> dict:
    nodes = []
    for v in range(len(t)):
        node = {"id": v, "children": list(t.children[v])}
        if t.children[v]:
            node["label"] = format_scalar(t.labels[v])
        else:
            node["point"] = t.names[t.points[v]]
        nodes.append(node)
    return {"root": t.root, "nodes": nodes}


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def tree_to_dot(t: RepTree) -> str:
    lines = ["digraph reptree {", "  node [shape=circle];"]
    for v in t.preorder:
        if t.children[v]:
            lines.append(f"  n{v} [label={_dot_quote(format_scalar(t.labels[v]))}];")
        else:
            lines.append(f"  n{v} [shape=box, label={_dot_quote(t.names[t.points[v]])}];")
    for v in t.preorder:
        for c in t.children[v]:
            lines.append(f"  n{v} -> n{c};")
    lines.append("}")
    return "\n".join(lines) + "\n"


_NEWICK_PLAIN = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_.-/")


def _newick_name(s: str) -> str:
    if s and set(s) <= _NEWICK_PLAIN:
        return s
    return "'" + s.replace("'", "''") + "'"


def tree_to_newick(t: RepTree) -> str:
    """Newick with point names on leaves and diameters as internal node labels."""
    out: list[str] = []
    stack: list[int | str] = [t.root]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        if not t.children[item]:
            out.append(_newick_name(t.names[t.points[item]]))
            continue
        out.append("(")
        stack.append(")" + _newick_name(format_scalar(t.labels[item])))
        for i, c in enumerate(reversed(t.children[item])):
            if i:
                stack.append(",")
            stack.append(c)
    return "".join(out) + ";\n"
