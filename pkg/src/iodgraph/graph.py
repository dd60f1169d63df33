"""Input/output directed graphs, their validation and reachability primitives."""

from __future__ import annotations

import enum
import graphlib
from collections import deque
from collections.abc import Collection, Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property

from .errors import InvalidGraphError, UnknownNodeError

Edge = tuple[str, str]


class NodeRole(str, enum.Enum):
    INPUT = "input"
    OUTPUT = "output"
    INTERMEDIATE = "intermediate"


@dataclass(frozen=True)
class Node:
    name: str
    role: NodeRole
    tag: str | None = None


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    node: str | None = None
    edge: Edge | None = None

    def to_json(self) -> dict:
        out: dict = {"code": self.code, "message": self.message}
        if self.node is not None:
            out["node"] = self.node
        if self.edge is not None:
            out["edge"] = list(self.edge)
        return out


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def __bool__(self) -> bool:
        return self.ok


class IODGraph:
    """An immutable directed graph whose nodes are labelled input, output or intermediate.

    The constructor accepts structurally broken data (duplicate names, dangling
    edge endpoints, edges into inputs) so that :func:`validate` can report the
    problems. Operations that need a well-formed graph call
    :meth:`require_valid` first.
    """

    def __init__(self, nodes: Iterable[Node], edges: Iterable[Edge] = ()):
        self._nodes: tuple[Node, ...] = tuple(sorted(nodes, key=_node_key))
        self._edges: tuple[Edge, ...] = tuple(sorted((str(s), str(d)) for s, d in edges))

    # -- basic views -------------------------------------------------------

    @property
    def nodes(self) -> tuple[Node, ...]:
        return self._nodes

    @property
    def edge_list(self) -> tuple[Edge, ...]:
        """Edges in canonical order, duplicates preserved."""
        return self._edges

    @cached_property
    def edges(self) -> frozenset[Edge]:
        return frozenset(self._edges)

    @cached_property
    def _by_name(self) -> dict[str, Node]:
        out: dict[str, Node] = {}
        for node in self._nodes:
            out.setdefault(node.name, node)
        return out

    @property
    def names(self) -> frozenset[str]:
        return frozenset(self._by_name)

    def __contains__(self, name: object) -> bool:
        return name in self._by_name

    def __len__(self) -> int:
        return len(self._by_name)

    def node(self, name: str) -> Node:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownNodeError([name]) from None

    def role(self, name: str) -> NodeRole:
        return self.node(name).role

    def tag(self, name: str) -> str | None:
        return self.node(name).tag

    def _with_role(self, role: NodeRole) -> frozenset[str]:
        return frozenset(n.name for n in self._by_name.values() if n.role is role)

    @cached_property
    def inputs(self) -> frozenset[str]:
        return self._with_role(NodeRole.INPUT)

    @cached_property
    def outputs(self) -> frozenset[str]:
        return self._with_role(NodeRole.OUTPUT)

    @cached_property
    def intermediates(self) -> frozenset[str]:
        return self._with_role(NodeRole.INTERMEDIATE)

    @cached_property
    def successors(self) -> Mapping[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {name: [] for name in self._by_name}
        for src, dst in sorted(self.edges):
            if src in out and dst in out:
                out[src].append(dst)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def predecessors(self) -> Mapping[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {name: [] for name in self._by_name}
        for src, dst in sorted(self.edges):
            if src in out and dst in out:
                out[dst].append(src)
        return {k: tuple(v) for k, v in out.items()}

    # -- derived graphs ----------------------------------------------------

    def transpose(self) -> IODGraph:
        """Reverse every edge and swap the input and output roles."""
        swap = {NodeRole.INPUT: NodeRole.OUTPUT, NodeRole.OUTPUT: NodeRole.INPUT}
        nodes = [Node(n.name, swap.get(n.role, n.role), n.tag) for n in self._nodes]
        return IODGraph(nodes, [(d, s) for s, d in self._edges])

    def with_edges(self, add: Iterable[Edge] = (), remove: Iterable[Edge] = ()) -> IODGraph:
        drop = set(remove)
        kept = [e for e in self._edges if e not in drop]
        return IODGraph(self._nodes, kept + [tuple(e) for e in add])

    def without_nodes(self, names: Collection[str]) -> IODGraph:
        gone = set(names)
        return IODGraph(
            [n for n in self._nodes if n.name not in gone],
            [(s, d) for s, d in self._edges if s not in gone and d not in gone],
        )

    def rename(self, mapping: Mapping[str, str]) -> IODGraph:
        def r(name: str) -> str:
            return mapping.get(name, name)

        return IODGraph(
            [Node(r(n.name), n.role, n.tag) for n in self._nodes],
            [(r(s), r(d)) for s, d in self._edges],
        )

    # -- validity ----------------------------------------------------------

    @cached_property
    def report(self) -> ValidationReport:
        return _validate(self)

    def require_valid(self) -> IODGraph:
        if not self.report.ok:
            raise InvalidGraphError(self.report.violations)
        return self

    # -- identity ----------------------------------------------------------

    def _key(self):
        return (self._nodes, self._edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IODGraph):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return (
            f"IODGraph(inputs={sorted(self.inputs)}, outputs={sorted(self.outputs)}, "
            f"intermediates={sorted(self.intermediates)}, edges={list(self._edges)})"
        )


def _node_key(node: Node):
    return (node.name, node.role.value, node.tag is not None, node.tag or "")


def make_graph(
    inputs: Iterable[str],
    outputs: Iterable[str],
    edges: Iterable[Edge] = (),
    intermediates: Iterable[str] = (),
    tags: Mapping[str, str] | None = None,
) -> IODGraph:
    """Build a graph from role lists; edge endpoints not listed become intermediates."""
    tags = tags or {}
    edges = [tuple(e) for e in edges]
    roles: dict[str, NodeRole] = {}
    for name in inputs:
        roles[name] = NodeRole.INPUT
    for name in outputs:
        roles[name] = NodeRole.OUTPUT
    for name in intermediates:
        roles.setdefault(name, NodeRole.INTERMEDIATE)
    for src, dst in edges:
        roles.setdefault(src, NodeRole.INTERMEDIATE)
        roles.setdefault(dst, NodeRole.INTERMEDIATE)
    nodes = [Node(name, role, tags.get(name)) for name, role in roles.items()]
    return IODGraph(nodes, edges)


def _validate(graph: IODGraph) -> ValidationReport:
    out: list[Violation] = []
    seen: dict[str, Node] = {}
    for node in graph.nodes:
        prior = seen.get(node.name)
        if prior is None:
            seen[node.name] = node
            continue
        if {prior.role, node.role} == {NodeRole.INPUT, NodeRole.OUTPUT}:
            out.append(Violation("input_output_overlap", f"node {node.name!r} is both an input and an output", node=node.name))
        else:
            out.append(Violation("duplicate_node", f"node name {node.name!r} appears more than once", node=node.name))

    if not any(n.role is NodeRole.INPUT for n in graph.nodes):
        out.append(Violation("no_input", "graph has no input node"))
    if not any(n.role is NodeRole.OUTPUT for n in graph.nodes):
        out.append(Violation("no_output", "graph has no output node"))

    previous = None
    for edge in graph.edge_list:
        src, dst = edge
        if edge == previous:
            out.append(Violation("duplicate_edge", f"edge {src}->{dst} appears more than once", edge=edge))
            continue
        previous = edge
        missing = [n for n in (src, dst) if n not in seen]
        if missing:
            out.append(Violation("unknown_endpoint", f"edge {src}->{dst} references unknown node(s) {missing}", edge=edge))
            continue
        if seen[dst].role is NodeRole.INPUT:
            out.append(Violation("input_has_incoming", f"input {dst!r} has incoming edge {src}->{dst}", node=dst, edge=edge))
        if seen[src].role is NodeRole.OUTPUT:
            out.append(Violation("output_has_outgoing", f"output {src!r} has outgoing edge {src}->{dst}", node=src, edge=edge))
    return ValidationReport(tuple(out))


def validate(graph: IODGraph) -> ValidationReport:
    return graph.report


def is_feed_forward(graph: IODGraph) -> bool:
    """True when the graph has no directed cycle (self-loops count as cycles)."""
    graph.require_valid()
    sorter = graphlib.TopologicalSorter({n: graph.predecessors[n] for n in graph.names})
    try:
        sorter.prepare()
    except graphlib.CycleError:
        return False
    return True


def _check_known(graph: IODGraph, names: Iterable[str]) -> set[str]:
    names = set(names)
    unknown = names - graph.names
    if unknown:
        raise UnknownNodeError(unknown)
    return names


def _sweep(adjacency: Mapping[str, tuple[str, ...]], start: set[str]) -> frozenset[str]:
    seen = set(start)
    queue = deque(start)
    while queue:
        for nxt in adjacency[queue.popleft()]:
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return frozenset(seen)


def reachable_from(graph: IODGraph, sources: Iterable[str]) -> frozenset[str]:
    """Nodes reachable from any source by a directed path of length >= 0."""
    return _sweep(graph.successors, _check_known(graph, sources))


def reaches(graph: IODGraph, targets: Iterable[str]) -> frozenset[str]:
    """Nodes with a directed path (length >= 0) to some target."""
    return _sweep(graph.predecessors, _check_known(graph, targets))


def edge_universe_size(num_inputs: int, num_outputs: int, num_intermediates: int, self_loops: bool = True) -> int:
    """Number of edge slots a simple IOD graph with these role counts can use."""
    if min(num_inputs, num_outputs, num_intermediates) < 0:
        raise ValueError("counts must be non-negative")
    m = num_intermediates
    return (
        num_inputs * (m + num_outputs)
        + intermediate_slot_count(m, self_loops)
        + m * num_outputs
    )


def intermediate_slot_count(num_intermediates: int, self_loops: bool = True) -> int:
    m = num_intermediates
    return m * m if self_loops else m * (m - 1)
