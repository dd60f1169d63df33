"""Deterministic builders for example and counterexample parent pairs.

Every builder returns the two parents, the partitions to cut them with and
the crossover membrane to splice them with, plus the informativeness the
resulting child is known to have. Node names are fixed (``i1``, ``o1``,
``a_1_2``, ``phi_1_2`` ...) so fixtures diff cleanly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .analysis import InformativenessLevel
from .crossover import CrossoverMembrane, MatchingSpec, build_crossover_membrane, crossover_child
from .graph import IODGraph, make_graph
from .partition import IOPartition, make_partition


@dataclass(frozen=True)
class ConstructionOutput:
    name: str
    input_parent: IODGraph
    output_parent: IODGraph
    input_partition: IOPartition
    output_partition: IOPartition
    membrane: CrossoverMembrane
    expected: InformativenessLevel

    @property
    def partitions(self) -> tuple[IOPartition, IOPartition]:
        return self.input_partition, self.output_partition

    def child(self) -> IODGraph:
        return crossover_child(self.input_parent, self.input_partition, self.output_parent,
                               self.output_partition, self.membrane)


Level = InformativenessLevel


def _complete_paths(j: int, k: int, level: Level) -> set[tuple[int, int]]:
    """Which (input, output) paths run all the way to their output.

    The remaining paths stop at an intermediate node with no outgoing links,
    which is how the parents are tuned to a target informativeness.
    """
    pairs = {(a, b) for a in range(1, j + 1) for b in range(1, k + 1)}
    if level is Level.FULLY:
        return pairs
    if level is Level.VERY:
        if k < 2:
            raise ValueError("a very (but not fully) informative parent needs at least two outputs")
        return {(a, 1) for a in range(1, j + 1)}
    if level is Level.PARTIALLY:
        if j < 2:
            raise ValueError("a partially (but not very) informative parent needs at least two inputs")
        return {(1, 1)}
    return set()


def build_theorem1_pair(j: int, k: int, parent_informativeness: Level | str = Level.FULLY) -> ConstructionOutput:
    """Parents of any chosen informativeness whose child is non-informative.

    The input parent has a path ``i -> a_i_k -> o_k`` per (input, output) pair
    plus a false input ``phi_i_k -> o_k`` per pair. The output parent mirrors it
    with paths ``i -> b_i_k -> o_k`` and false outputs ``i -> phi'_i_k``. The
    input parent is cut just before its outputs and the output parent just
    after its inputs. The membrane sends every real path of the input parent
    into a false output and feeds every false input into a real path, so the
    child's inputs reach no output.

    Paths that are truncated (to lower a parent's informativeness) do not
    cross the cut, so the output parent only carries false outputs for the
    input parent's complete paths; that keeps the forward link counts equal.
    """
    if j < 1 or k < 1:
        raise ValueError("j and k must be at least 1")
    if isinstance(parent_informativeness, str):
        parent_informativeness = Level.parse(parent_informativeness)
    complete = _complete_paths(j, k, parent_informativeness)
    ins = [f"i{a}" for a in range(1, j + 1)]
    outs = [f"o{b}" for b in range(1, k + 1)]
    pairs = [(a, b) for a in range(1, j + 1) for b in range(1, k + 1)]

    g_edges = []
    for a, b in pairs:
        g_edges.append((f"i{a}", f"a_{a}_{b}"))
        if (a, b) in complete:
            g_edges.append((f"a_{a}_{b}", f"o{b}"))
        g_edges.append((f"phi_{a}_{b}", f"o{b}"))
    g_in = make_graph(ins, outs, g_edges)

    h_edges = []
    for a, b in pairs:
        h_edges.append((f"i{a}", f"b_{a}_{b}"))
        if (a, b) in complete:
            h_edges.append((f"b_{a}_{b}", f"o{b}"))
            h_edges.append((f"i{a}", f"phi'_{a}_{b}"))
    g_out = make_graph(ins, outs, h_edges)

    part_a = make_partition(g_in, g_in.names - g_in.outputs)
    part_b = make_partition(g_out, g_out.inputs)
    forward = {}
    for a, b in pairs:
        if (a, b) in complete:
            forward[(f"a_{a}_{b}", f"o{b}")] = (f"i{a}", f"phi'_{a}_{b}")
        forward[(f"phi_{a}_{b}", f"o{b}")] = (f"i{a}", f"b_{a}_{b}")
    m = build_crossover_membrane(g_in, part_a, g_out, part_b, MatchingSpec.explicit(forward))
    return ConstructionOutput(f"theorem1_j{j}_k{k}_{parent_informativeness.label}",
                              g_in, g_out, part_a, part_b, m, Level.NON)


def build_theorem5_pair(j: int) -> ConstructionOutput:
    """Fully informative, dangle-free parents whose child is only very informative.

    Both parents have ``j`` inputs and ``j`` outputs joined by node-disjoint
    single-intermediate paths. The membrane takes inputs ``i`` of the input
    parent and outputs ``o'`` of the output parent in step, and reroutes all of
    ``i``'s paths into paths ending at ``o'``.
    """
    if j < 2:
        raise ValueError("j must be at least 2")
    idx = range(1, j + 1)
    ins = [f"i{t}" for t in idx]
    outs = [f"o{t}" for t in idx]
    g_in = make_graph(ins, outs, [e for t in idx for m in idx for e in ((f"i{t}", f"a_{t}_{m}"), (f"a_{t}_{m}", f"o{m}"))])
    g_out = make_graph(ins, outs, [e for t in idx for m in idx for e in ((f"i{t}", f"b_{t}_{m}"), (f"b_{t}_{m}", f"o{m}"))])
    part_a = make_partition(g_in, g_in.names - g_in.outputs)
    part_b = make_partition(g_out, g_out.inputs)

    forward = {}
    # step t pairs input i_t with output o'_t; within a step, output o_m of the
    # input parent is matched with input i'_m of the output parent
    for t in idx:
        for m in idx:
            forward[(f"a_{t}_{m}", f"o{m}")] = (f"i{m}", f"b_{m}_{t}")
    mem = build_crossover_membrane(g_in, part_a, g_out, part_b, MatchingSpec.explicit(forward))
    return ConstructionOutput(f"theorem5_j{j}", g_in, g_out, part_a, part_b, mem, Level.VERY)


def build_competing_conventions_pair() -> tuple[ConstructionOutput, ConstructionOutput]:
    """Two parents that both map I1->O1 and I2->O2 through differently ordered hidden nodes.

    The ``bad`` membrane crosses the conventions and the child maps I1->O2,
    I2->O1; the ``good`` membrane {(N1, N4), (N2, N3)} keeps the mapping.
    """
    g_in = make_graph(["I1", "I2"], ["O1", "O2"], [("I1", "N1"), ("N1", "O1"), ("I2", "N2"), ("N2", "O2")])
    g_out = make_graph(["I1", "I2"], ["O1", "O2"], [("I1", "N4"), ("N4", "O1"), ("I2", "N3"), ("N3", "O2")])
    part_a = make_partition(g_in, {"I1", "I2", "N1", "N2"})
    part_b = make_partition(g_out, {"I1", "I2"})

    def build(name, forward):
        m = build_crossover_membrane(g_in, part_a, g_out, part_b, MatchingSpec.explicit(forward))
        return ConstructionOutput(name, g_in, g_out, part_a, part_b, m, Level.VERY)

    bad = build("competing_bad", {("N1", "O1"): ("I2", "N3"), ("N2", "O2"): ("I1", "N4")})
    good = build("competing_good", {("N1", "O1"): ("I1", "N4"), ("N2", "O2"): ("I2", "N3")})
    return bad, good


def build_non_to_fully_pair() -> ConstructionOutput:
    """Two non-informative parents with a fully informative child.

    The input parent funnels both inputs into ``A``, which leads only to a dead
    end ``X``; its outputs are fed by ``Y``, which nothing reaches. The output
    parent is the mirror image: its inputs run into a dead end ``R`` while an
    unreachable ``P`` feeds ``Q``, which fans out to both outputs. Splicing
    ``A`` onto ``Q`` joins the two useful halves.
    """
    g_in = make_graph(["I1", "I2"], ["O1", "O2"],
                      [("I1", "A"), ("I2", "A"), ("A", "X"), ("Y", "O1"), ("Y", "O2")])
    g_out = make_graph(["I1", "I2"], ["O1", "O2"],
                       [("I1", "R"), ("I2", "R"), ("P", "Q"), ("Q", "O1"), ("Q", "O2")])
    part_a = make_partition(g_in, {"I1", "I2", "A"})
    part_b = make_partition(g_out, {"I1", "I2", "P", "R"})
    m = build_crossover_membrane(g_in, part_a, g_out, part_b, MatchingSpec.explicit({("A", "X"): ("P", "Q")}))
    return ConstructionOutput("non_to_fully", g_in, g_out, part_a, part_b, m, Level.FULLY)


def build_swap_example_pair() -> ConstructionOutput:
    """Worked example: three forward links and one backward link on each side.

    Input parent cut: F = {(A,C), (D,E), (D,O2)}, B = {(C,A)}.
    Output parent cut: F' = {(V,X), (W,Y), (I3,Y)}, B' = {(X,W)}.
    The membrane is {(A,Y), (D,Y), (D,X), (X,A)}. Internal edges are
    illustrative; both parents are fully informative.
    """
    g_in = make_graph(
        ["I1", "I2", "I3"], ["O1", "O2"],
        [("I1", "A"), ("I2", "A"), ("I2", "B"), ("B", "D"), ("I3", "D"),
         ("A", "C"), ("D", "E"), ("D", "O2"), ("C", "A"),
         ("C", "E"), ("C", "O1"), ("E", "O1"), ("E", "O2")],
    )
    g_out = make_graph(
        ["I1", "I2", "I3"], ["O1", "O2"],
        [("I1", "V"), ("I2", "W"), ("V", "W"),
         ("V", "X"), ("W", "Y"), ("I3", "Y"), ("X", "W"),
         ("X", "Z"), ("Y", "Z"), ("Y", "O2"), ("Z", "O1")],
    )
    part_a = make_partition(g_in, {"I1", "I2", "I3", "A", "B", "D"})
    part_b = make_partition(g_out, {"I1", "I2", "I3", "V", "W"})
    spec = MatchingSpec.explicit(
        {("A", "C"): ("W", "Y"), ("D", "E"): ("I3", "Y"), ("D", "O2"): ("V", "X")},
        {("X", "W"): ("C", "A")},
    )
    m = build_crossover_membrane(g_in, part_a, g_out, part_b, spec)
    return ConstructionOutput("swap_example", g_in, g_out, part_a, part_b, m, Level.FULLY)


# -- single-graph examples ----------------------------------------------------


def perceptron(layer_sizes: list[int]) -> IODGraph:
    """Fully connected layered graph; hidden nodes are named ``h<layer>_<k>``."""
    if len(layer_sizes) < 2 or min(layer_sizes) < 1:
        raise ValueError("need at least an input and an output layer, each non-empty")
    return make_graph(
        [f"i{k}" for k in range(1, layer_sizes[0] + 1)],
        [f"o{k}" for k in range(1, layer_sizes[-1] + 1)],
        [(s, d) for a, b in zip(_layer_names(layer_sizes), _layer_names(layer_sizes)[1:]) for s in a for d in b],
    )


def perceptron_layers(layer_sizes: list[int]) -> dict[str, int]:
    return {n: depth for depth, names in enumerate(_layer_names(layer_sizes)) for n in names}


def _layer_names(sizes: list[int]) -> list[list[str]]:
    last = len(sizes) - 1
    out = []
    for depth, size in enumerate(sizes):
        prefix = "i" if depth == 0 else "o" if depth == last else f"h{depth}_"
        out.append([f"{prefix}{k}" for k in range(1, size + 1)])
    return out


def partial_example() -> IODGraph:
    """I1 reaches both outputs (I1->V->W->Y->Z->O2 among others); I2 reaches nothing.

    Adding the edge I2->W makes the graph very informative.
    """
    return make_graph(
        ["I1", "I2"], ["O1", "O2"],
        [("I1", "V"), ("V", "W"), ("W", "Y"), ("Y", "Z"), ("Z", "O2"), ("W", "X"), ("X", "O1"), ("I2", "U")],
    )


def dangling_example() -> IODGraph:
    """``A`` is reached from an input but reaches no output; ``D`` reaches an output but is never reached."""
    return make_graph(
        ["I1", "I2"], ["O1", "O2"],
        [("I1", "B"), ("B", "O1"), ("B", "O2"), ("I2", "A"), ("D", "O2")],
    )


def no_dangling_example() -> IODGraph:
    """Every intermediate lies on an input-output path, yet input I2 is isolated."""
    return make_graph(["I1", "I2"], ["O1", "O2"], [("I1", "A"), ("A", "O1"), ("I1", "B"), ("B", "O2")])


def half_contiguous_example() -> tuple[IODGraph, IOPartition]:
    """A partition whose input part is contiguous but whose output part is not.

    ``C`` sits in the output part and only links back into the input part.
    """
    g = make_graph(["I1"], ["O1"], [("I1", "A"), ("A", "B"), ("B", "O1"), ("A", "C"), ("C", "A")])
    return g, make_partition(g, {"I1", "A"})
