"""Canonical JSON and DOT encodings of IOD graphs.

Both encodings order nodes and edges lexicographically, so encoding a decoded
document reproduces it byte for byte.
"""

from __future__ import annotations

import json
import re

from .errors import GraphFormatError
from .graph import IODGraph, Node, NodeRole

FORMAT_VERSION = 1

_SHAPES = {
    NodeRole.INPUT: "box",
    NodeRole.OUTPUT: "doublecircle",
    NodeRole.INTERMEDIATE: "circle",
}


def graph_to_dict(graph: IODGraph) -> dict:
    nodes = []
    for node in graph.nodes:
        entry = {"id": node.name, "role": node.role.value}
        if node.tag is not None:
            entry["tag"] = node.tag
        nodes.append(entry)
    return {
        "format_version": FORMAT_VERSION,
        "nodes": nodes,
        "edges": [list(e) for e in graph.edge_list],
    }


def to_json(graph: IODGraph) -> str:
    return json.dumps(graph_to_dict(graph), indent=2, sort_keys=True) + "\n"


def graph_from_dict(data) -> IODGraph:
    if not isinstance(data, dict):
        raise GraphFormatError("graph document must be a JSON object")
    version = data.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise GraphFormatError(f"unsupported format_version {version!r}")
    raw_nodes = data.get("nodes")
    raw_edges = data.get("edges", [])
    if not isinstance(raw_nodes, list):
        raise GraphFormatError("'nodes' must be a list")
    if not isinstance(raw_edges, list):
        raise GraphFormatError("'edges' must be a list")
    nodes = []
    for index, entry in enumerate(raw_nodes):
        if not isinstance(entry, dict) or not isinstance(entry.get("id"), str):
            raise GraphFormatError(f"nodes[{index}] must be an object with a string 'id'")
        try:
            role = NodeRole(entry.get("role"))
        except ValueError:
            raise GraphFormatError(f"nodes[{index}] has unknown role {entry.get('role')!r}") from None
        tag = entry.get("tag")
        if tag is not None and not isinstance(tag, str):
            raise GraphFormatError(f"nodes[{index}].tag must be a string")
        nodes.append(Node(entry["id"], role, tag))
    edges = []
    for index, edge in enumerate(raw_edges):
        if not (isinstance(edge, list) and len(edge) == 2 and all(isinstance(x, str) for x in edge)):
            raise GraphFormatError(f"edges[{index}] must be a [src, dst] pair of strings")
        edges.append((edge[0], edge[1]))
    return IODGraph(nodes, edges)


def from_json(text: str) -> IODGraph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(exc.msg, exc.lineno, exc.colno) from None
    return graph_from_dict(data)


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _unquote(text: str) -> str:
    return re.sub(r"\\(.)", r"\1", text[1:-1])


def to_dot(graph: IODGraph, name: str = "iod") -> str:
    lines = [f"digraph {name} {{", f"  // format_version={FORMAT_VERSION}"]
    for node in graph.nodes:
        attrs = f"role={node.role.value}, shape={_SHAPES[node.role]}"
        if node.tag is not None:
            attrs += f", tag={_quote(node.tag)}"
        lines.append(f"  {_quote(node.name)} [{attrs}];")
    for src, dst in graph.edge_list:
        lines.append(f"  {_quote(src)} -> {_quote(dst)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


_Q = r'"(?:[^"\\]|\\.)*"'
_NODE_RE = re.compile(rf"^\s*({_Q})\s*\[(.*)\];\s*$")
_EDGE_RE = re.compile(rf"^\s*({_Q})\s*->\s*({_Q});\s*$")
_ATTR_RE = re.compile(rf"(\w+)=({_Q}|\w+)")


def from_dot(text: str) -> IODGraph:
    """Parse the DOT dialect written by :func:`to_dot`."""
    nodes, edges = [], []
    lines = text.splitlines()
    if not lines or not re.match(r"^\s*digraph\s+\w*\s*\{\s*$", lines[0]):
        raise GraphFormatError("expected 'digraph <name> {'", 1, 1)
    for lineno, line in enumerate(lines[1:], start=2):
        stripped = line.strip()
        if not stripped or stripped.startswith("//"):
            continue
        if stripped == "}":
            break
        if m := _EDGE_RE.match(line):
            edges.append((_unquote(m.group(1)), _unquote(m.group(2))))
            continue
        if m := _NODE_RE.match(line):
            attrs = {k: (_unquote(v) if v.startswith('"') else v) for k, v in _ATTR_RE.findall(m.group(2))}
            try:
                role = NodeRole(attrs.get("role"))
            except ValueError:
                raise GraphFormatError("node statement needs role=input|output|intermediate", lineno, 1) from None
            nodes.append(Node(_unquote(m.group(1)), role, attrs.get("tag")))
            continue
        raise GraphFormatError(f"unrecognised statement {stripped!r}", lineno, len(line) - len(line.lstrip()) + 1)
    else:
        raise GraphFormatError("missing closing '}'", len(lines), 1)
    return IODGraph(nodes, edges)
