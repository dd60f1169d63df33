"""Informativeness, actionability and the no-dangling-nodes check."""

from __future__ import annotations

import enum
from collections.abc import Mapping
from dataclasses import dataclass

from .graph import IODGraph, reachable_from, reaches


class _Level(enum.IntEnum):
    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def parse(cls, text: str):
        try:
            return cls[text.upper()]
        except KeyError:
            raise ValueError(f"unknown level {text!r}; expected one of {[m.label for m in cls]}") from None


class InformativenessLevel(_Level):
    """How thoroughly inputs are connected to outputs.

    Integer order follows implication: a FULLY informative graph is also very
    and partially informative. Classifiers return the strongest level only.
    """

    NON = 0
    PARTIALLY = 1
    VERY = 2
    FULLY = 3


class ActionabilityLevel(_Level):
    """Output-side mirror of :class:`InformativenessLevel`."""

    NON = 0
    PARTIALLY = 1
    VERY = 2
    FULLY = 3


@dataclass(frozen=True)
class DanglingReport:
    satisfied: bool
    dangling: frozenset[str]

    def to_json(self) -> dict:
        return {"no_dangling_nodes": self.satisfied, "dangling": sorted(self.dangling)}


def output_reach(graph: IODGraph) -> dict[str, frozenset[str]]:
    """Map every input to the set of outputs it reaches (one sweep per input)."""
    graph.require_valid()
    outputs = graph.outputs
    return {i: reachable_from(graph, [i]) & outputs for i in sorted(graph.inputs)}


def informativeness_from_reach(reach: Mapping[str, frozenset[str]], outputs: frozenset[str]) -> InformativenessLevel:
    hits = [len(r) for r in reach.values()]
    if not any(hits):
        return InformativenessLevel.NON
    if not all(hits):
        return InformativenessLevel.PARTIALLY
    if all(h == len(outputs) for h in hits):
        return InformativenessLevel.FULLY
    return InformativenessLevel.VERY


def actionability_from_reach(reach: Mapping[str, frozenset[str]], outputs: frozenset[str]) -> ActionabilityLevel:
    covered = frozenset().union(*reach.values()) if reach else frozenset()
    if not covered:
        return ActionabilityLevel.NON
    if covered != outputs:
        return ActionabilityLevel.PARTIALLY
    if all(r == outputs for r in reach.values()):
        return ActionabilityLevel.FULLY
    return ActionabilityLevel.VERY


def informativeness(graph: IODGraph) -> InformativenessLevel:
    return informativeness_from_reach(output_reach(graph), graph.outputs)


def actionability(graph: IODGraph) -> ActionabilityLevel:
    return actionability_from_reach(output_reach(graph), graph.outputs)


def no_dangling_nodes(graph: IODGraph) -> DanglingReport:
    """Intermediates that lie on no input-to-output path are dangling."""
    graph.require_valid()
    useful = reachable_from(graph, graph.inputs) & reaches(graph, graph.outputs)
    dangling = graph.intermediates - useful
    return DanglingReport(not dangling, frozenset(dangling))


def classify(graph: IODGraph) -> dict:
    """Everything the ``classify`` command prints, as a JSON-ready dict."""
    reach = output_reach(graph)
    report = no_dangling_nodes(graph)
    return {
        "informativeness": informativeness_from_reach(reach, graph.outputs).label,
        "actionability": actionability_from_reach(reach, graph.outputs).label,
        "no_dangling_nodes": report.satisfied,
        "dangling": sorted(report.dangling),
    }


def prune_dangling(graph: IODGraph) -> IODGraph:
    """Drop dangling intermediates; the result satisfies the no-dangling-nodes condition.

    Removing a node that sits on no input-to-output path cannot break any
    such path, so one pass suffices.
    """
    return graph.without_nodes(no_dangling_nodes(graph).dangling)
