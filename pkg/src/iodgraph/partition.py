"""IO partitions, their separating membranes, and contiguousness."""

from __future__ import annotations

import enum
import itertools
from collections import deque
from collections.abc import Hashable, Iterable, Iterator, Mapping
from dataclasses import dataclass

from .errors import PartitionError, UnknownNodeError
from .graph import Edge, IODGraph


@dataclass(frozen=True)
class IOPartition:
    """A split of a graph's nodes into an input part and an output part."""

    psi: frozenset[str]
    omega: frozenset[str]

    def to_json(self) -> dict:
        return {"psi": sorted(self.psi), "omega": sorted(self.omega)}

    @classmethod
    def from_json(cls, data: Mapping) -> IOPartition:
        return cls(frozenset(data["psi"]), frozenset(data["omega"]))


@dataclass(frozen=True)
class Membrane:
    """Cut edges of a partition: forward links go psi -> omega, backward links omega -> psi."""

    forward: frozenset[Edge]
    backward: frozenset[Edge]

    @property
    def cut(self) -> frozenset[Edge]:
        return self.forward | self.backward

    def to_json(self) -> dict:
        return {"forward": [list(e) for e in sorted(self.forward)], "backward": [list(e) for e in sorted(self.backward)]}


def make_partition(graph: IODGraph, psi: Iterable[str]) -> IOPartition:
    psi = frozenset(psi)
    unknown = psi - graph.names
    if unknown:
        raise UnknownNodeError(unknown)
    missing = graph.inputs - psi
    if missing:
        raise PartitionError(f"input part must contain every input; missing {sorted(missing)}")
    stray = graph.outputs & psi
    if stray:
        raise PartitionError(f"input part may not contain outputs; found {sorted(stray)}")
    return IOPartition(psi, graph.names - psi)


def check_partition(graph: IODGraph, partition: IOPartition) -> IOPartition:
    """Raise PartitionError unless ``partition`` is an IO partition of ``graph``."""
    if partition.psi & partition.omega:
        raise PartitionError(f"parts overlap on {sorted(partition.psi & partition.omega)}")
    if partition.psi | partition.omega != graph.names:
        raise PartitionError("partition does not cover exactly the nodes of the graph")
    if not graph.inputs <= partition.psi or not graph.outputs <= partition.omega:
        raise PartitionError("inputs must lie in the input part and outputs in the output part")
    return partition


def membrane(graph: IODGraph, partition: IOPartition) -> Membrane:
    check_partition(graph, partition)
    psi = partition.psi
    forward = frozenset(e for e in graph.edges if e[0] in psi and e[1] not in psi)
    backward = frozenset(e for e in graph.edges if e[0] not in psi and e[1] in psi)
    return Membrane(forward, backward)


def _sweep_within(adjacency: Mapping[str, tuple[str, ...]], start: Iterable[str], allowed: frozenset[str]) -> set[str]:
    seen = set(start)
    queue = deque(seen)
    while queue:
        for nxt in adjacency[queue.popleft()]:
            if nxt in allowed and nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def input_contiguity_violations(graph: IODGraph, partition: IOPartition) -> frozenset[str]:
    """Nodes of the input part that no input reaches without leaving the input part."""
    reached = _sweep_within(graph.successors, graph.inputs, partition.psi)
    return frozenset(partition.psi - reached)


def output_contiguity_violations(graph: IODGraph, partition: IOPartition) -> frozenset[str]:
    """Nodes of the output part with no path to an output inside the output part."""
    reached = _sweep_within(graph.predecessors, graph.outputs, partition.omega)
    return frozenset(partition.omega - reached)


def is_input_contiguous(graph: IODGraph, partition: IOPartition) -> bool:
    return not input_contiguity_violations(graph, partition)


def is_output_contiguous(graph: IODGraph, partition: IOPartition) -> bool:
    return not output_contiguity_violations(graph, partition)


def is_contiguous(graph: IODGraph, partition: IOPartition) -> bool:
    return is_input_contiguous(graph, partition) and is_output_contiguous(graph, partition)


class PartitionFilter(str, enum.Enum):
    ALL = "all"
    INPUT_CONTIGUOUS = "input-contiguous"
    OUTPUT_CONTIGUOUS = "output-contiguous"
    CONTIGUOUS = "contiguous"


@dataclass(frozen=True)
class LayerRespecting:
    """Keep only partitions that never split a layer between the two parts.

    With ``ordered`` the layers must also be comparable and every layer in the
    input part must come before every layer in the output part, so the cut
    falls between two consecutive layers.
    """

    layers: Mapping[str, Hashable]
    ordered: bool = False

    def accepts(self, partition: IOPartition) -> bool:
        side: dict[Hashable, bool] = {}
        for name, layer in self.layers.items():
            in_psi = name in partition.psi
            if side.setdefault(layer, in_psi) != in_psi:
                return False
        if self.ordered:
            front = [layer for layer, in_psi in side.items() if in_psi]
            back = [layer for layer, in_psi in side.items() if not in_psi]
            return not front or not back or max(front) < min(back)
        return True


_CHECKS = {
    PartitionFilter.ALL: lambda g, p: True,
    PartitionFilter.INPUT_CONTIGUOUS: is_input_contiguous,
    PartitionFilter.OUTPUT_CONTIGUOUS: is_output_contiguous,
    PartitionFilter.CONTIGUOUS: is_contiguous,
}


def partition_predicate(graph: IODGraph, filter: PartitionFilter | str | LayerRespecting = PartitionFilter.ALL):
    if isinstance(filter, LayerRespecting):
        missing = graph.names - set(filter.layers)
        if missing:
            raise PartitionError(f"layer map is missing nodes {sorted(missing)}")
        return lambda p: filter.accepts(p)
    check = _CHECKS[PartitionFilter(filter)]
    return lambda p: check(graph, p)


def enumerate_partitions(
    graph: IODGraph,
    filter: PartitionFilter | str | LayerRespecting = PartitionFilter.ALL,
) -> Iterator[IOPartition]:
    """Lazily yield the IO partitions of ``graph`` that pass ``filter``.

    Every subset of intermediates placed in the input part appears once, in
    lexicographic order of the membership vector over the sorted intermediates
    (so the first partition has only the inputs in the input part).
    """
    graph.require_valid()
    accept = partition_predicate(graph, filter)
    middle = sorted(graph.intermediates)
    for bits in itertools.product((False, True), repeat=len(middle)):
        psi = graph.inputs | {n for n, b in zip(middle, bits) if b}
        partition = IOPartition(frozenset(psi), graph.names - psi)
        if accept(partition):
            yield partition
