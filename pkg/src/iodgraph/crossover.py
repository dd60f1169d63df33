"""Crossover of IOD graphs: compatibility, crossover membranes and children.

The input part of one parent is spliced onto the output part of the other.
Each forward link ``f`` of the input parent is paired with a distinct forward
link ``f'`` of the output parent and replaced by ``(source(f), dest(f'))``;
each backward link ``b'`` of the output parent is paired with a distinct
backward link ``b`` of the input parent and replaced by
``(source(b'), dest(b))``.

Node identity
-------------
Two parents frequently share node names (clones in a population, graphs
built from the same template). In the default ``"qualified"`` identity mode
the parents' node sets are treated as disjoint namespaces, so the
disjointness clauses of compatibility always hold, and any name that would
occur on both sides of the child is rewritten as ``"<namespace>:<name>"``.
``"strict"`` mode compares raw names literally and never renames.
"""

from __future__ import annotations

import enum
import itertools
import random
from collections import defaultdict
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field

from .errors import BudgetExceededError, IncompatibleError, InfeasibleMatchingError
from .graph import Edge, IODGraph, Node
from .partition import (
    IOPartition,
    LayerRespecting,
    PartitionFilter,
    check_partition,
    enumerate_partitions,
    make_partition,
    membrane,
    partition_predicate,
)

QUALIFIED = "qualified"
STRICT = "strict"
DEFAULT_NAMESPACES = ("a", "b")


class MatchingMode(str, enum.Enum):
    SEQUENTIAL = "sequential"
    RANDOM = "random"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class MatchingSpec:
    """How forward and backward links of the two parents are paired.

    ``forward`` maps each forward link of the input parent to a forward link of
    the output parent; ``backward`` maps each backward link of the output
    parent to a backward link of the input parent. Both are only used in
    explicit mode.
    """

    mode: MatchingMode = MatchingMode.SEQUENTIAL
    seed: int | None = None
    forward: Mapping[Edge, Edge] | None = None
    backward: Mapping[Edge, Edge] | None = None
    tag_constrained: bool = False

    def __post_init__(self):
        object.__setattr__(self, "mode", MatchingMode(self.mode))

    @classmethod
    def sequential(cls, tag_constrained: bool = False) -> MatchingSpec:
        return cls(MatchingMode.SEQUENTIAL, tag_constrained=tag_constrained)

    @classmethod
    def seeded(cls, seed: int, tag_constrained: bool = False) -> MatchingSpec:
        return cls(MatchingMode.RANDOM, seed=seed, tag_constrained=tag_constrained)

    @classmethod
    def explicit(cls, forward: Mapping[Edge, Edge], backward: Mapping[Edge, Edge] | None = None,
                 tag_constrained: bool = False) -> MatchingSpec:
        return cls(MatchingMode.EXPLICIT, forward=dict(forward), backward=dict(backward or {}),
                   tag_constrained=tag_constrained)

    def to_json(self) -> dict:
        out: dict = {"mode": self.mode.value, "tag_constrained": self.tag_constrained}
        if self.seed is not None:
            out["seed"] = self.seed
        if self.mode is MatchingMode.EXPLICIT:
            out["forward"] = [[list(f), list(g)] for f, g in sorted(self.forward.items())]
            out["backward"] = [[list(b2), list(b)] for b2, b in sorted(self.backward.items())]
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> MatchingSpec:
        mode = MatchingMode(data.get("mode", "sequential"))
        tagged = bool(data.get("tag_constrained", False))
        if mode is MatchingMode.EXPLICIT:
            fwd = {tuple(f): tuple(g) for f, g in data.get("forward", [])}
            bwd = {tuple(b2): tuple(b) for b2, b in data.get("backward", [])}
            return cls.explicit(fwd, bwd, tag_constrained=tagged)
        return cls(mode, seed=data.get("seed"), tag_constrained=tagged)


@dataclass(frozen=True)
class CrossoverMembrane:
    """Spliced links together with the parent links each one came from.

    ``forward_pairs`` holds ``(f, f')`` and ``backward_pairs`` holds ``(b, b')``,
    with ``f``/``b`` from the input parent and ``f'``/``b'`` from the output
    parent. Edge endpoints use the parents' raw node names.
    """

    forward_pairs: tuple[tuple[Edge, Edge], ...] = ()
    backward_pairs: tuple[tuple[Edge, Edge], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "forward_pairs", tuple(sorted(self.forward_pairs)))
        object.__setattr__(self, "backward_pairs", tuple(sorted(self.backward_pairs)))

    @property
    def forward_edges(self) -> tuple[Edge, ...]:
        return tuple((f[0], f2[1]) for f, f2 in self.forward_pairs)

    @property
    def backward_edges(self) -> tuple[Edge, ...]:
        return tuple((b2[0], b[1]) for b, b2 in self.backward_pairs)

    @property
    def edges(self) -> frozenset[Edge]:
        return frozenset(self.forward_edges) | frozenset(self.backward_edges)

    def to_json(self) -> dict:
        return {
            "edges": [list(e) for e in sorted(self.edges)],
            "forward_pairs": [[list(f), list(f2)] for f, f2 in self.forward_pairs],
            "backward_pairs": [[list(b), list(b2)] for b, b2 in self.backward_pairs],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> CrossoverMembrane:
        return cls(
            tuple((tuple(f), tuple(f2)) for f, f2 in data.get("forward_pairs", [])),
            tuple((tuple(b), tuple(b2)) for b, b2 in data.get("backward_pairs", [])),
        )


@dataclass(frozen=True)
class Compatibility:
    ok: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class _Cut:
    forward: tuple[Edge, ...]
    backward: tuple[Edge, ...]


def _cut(graph: IODGraph, partition: IOPartition) -> _Cut:
    m = membrane(graph, partition)
    return _Cut(tuple(sorted(m.forward)), tuple(sorted(m.backward)))


def _compatibility(part_a: IOPartition, cut_a: _Cut, part_b: IOPartition, cut_b: _Cut, identity: str) -> Compatibility:
    if identity not in (QUALIFIED, STRICT):
        raise ValueError(f"identity must be {QUALIFIED!r} or {STRICT!r}")
    if identity == STRICT:
        clash = part_a.psi & part_b.omega
        if clash:
            return Compatibility(False, f"input part of input parent shares nodes {sorted(clash)} with output part of output parent")
        clash = part_b.psi & part_a.omega
        if clash:
            return Compatibility(False, f"input part of output parent shares nodes {sorted(clash)} with output part of input parent")
    if len(cut_a.forward) != len(cut_b.forward):
        return Compatibility(False, f"forward link counts differ ({len(cut_a.forward)} vs {len(cut_b.forward)})")
    if len(cut_a.backward) != len(cut_b.backward):
        return Compatibility(False, f"backward link counts differ ({len(cut_a.backward)} vs {len(cut_b.backward)})")
    return Compatibility(True)


def crossover_compatible(g_in: IODGraph, part_a: IOPartition, g_out: IODGraph, part_b: IOPartition,
                         identity: str = QUALIFIED) -> Compatibility:
    """Check crossover compatibility; ``reason`` names the first failing clause."""
    check_partition(g_in.require_valid(), part_a)
    check_partition(g_out.require_valid(), part_b)
    return _compatibility(part_a, _cut(g_in, part_a), part_b, _cut(g_out, part_b), identity)


def _require_compatible(g_in, part_a, g_out, part_b, identity) -> tuple[_Cut, _Cut]:
    check_partition(g_in.require_valid(), part_a)
    check_partition(g_out.require_valid(), part_b)
    cut_a, cut_b = _cut(g_in, part_a), _cut(g_out, part_b)
    verdict = _compatibility(part_a, cut_a, part_b, cut_b, identity)
    if not verdict:
        raise IncompatibleError(verdict.reason)
    return cut_a, cut_b


def _tag_sort_key(tag: str | None):
    return (tag is not None, tag or "")


def _groups(left: Iterable[Edge], right: Iterable[Edge], left_key, right_key) -> list[tuple[list[Edge], list[Edge]]]:
    """Bucket both link lists by matching key; a perfect matching needs equal bucket sizes.

    Only links with equal keys may be paired, so the compatibility graph is a
    disjoint union of complete bipartite blocks and a perfect matching exists
    exactly when every block is balanced.
    """
    lhs: dict = defaultdict(list)
    rhs: dict = defaultdict(list)
    for e in left:
        lhs[left_key(e)].append(e)
    for e in right:
        rhs[right_key(e)].append(e)
    bad = {k: (len(lhs.get(k, ())), len(rhs.get(k, ()))) for k in set(lhs) | set(rhs)
           if len(lhs.get(k, ())) != len(rhs.get(k, ()))}
    if bad:
        detail = ", ".join(f"tag {k!r}: {a} vs {b}" for k, (a, b) in sorted(bad.items(), key=lambda kv: _tag_sort_key(kv[0])))
        raise InfeasibleMatchingError(f"no tag-respecting perfect matching ({detail})")
    return [(sorted(lhs[k]), sorted(rhs[k])) for k in sorted(lhs, key=_tag_sort_key)]


def _link_groups(g_in: IODGraph, g_out: IODGraph, cut_a: _Cut, cut_b: _Cut, tag_constrained: bool):
    if tag_constrained:
        fwd = _groups(cut_a.forward, cut_b.forward, lambda f: g_in.tag(f[0]), lambda f2: g_out.tag(f2[1]))
        # backward blocks are keyed on the output parent's b' (left) vs the input parent's b (right)
        bwd = _groups(cut_b.backward, cut_a.backward, lambda b2: g_out.tag(b2[0]), lambda b: g_in.tag(b[1]))
    else:
        fwd = [(list(cut_a.forward), list(cut_b.forward))]
        bwd = [(list(cut_b.backward), list(cut_a.backward))]
    return fwd, bwd


def _check_explicit(spec: MatchingSpec, g_in, g_out, cut_a: _Cut, cut_b: _Cut) -> CrossoverMembrane:
    fwd = dict(spec.forward or {})
    bwd = dict(spec.backward or {})
    if set(fwd) != set(cut_a.forward) or sorted(fwd.values()) != list(cut_b.forward):
        raise IncompatibleError("explicit forward mapping must be a bijection between the two forward link sets")
    if set(bwd) != set(cut_b.backward) or sorted(bwd.values()) != list(cut_a.backward):
        raise IncompatibleError("explicit backward mapping must be a bijection between the two backward link sets")
    if spec.tag_constrained:
        for f, f2 in fwd.items():
            if g_in.tag(f[0]) != g_out.tag(f2[1]):
                raise InfeasibleMatchingError(f"explicit pairing {f}->{f2} joins nodes with different tags")
        for b2, b in bwd.items():
            if g_out.tag(b2[0]) != g_in.tag(b[1]):
                raise InfeasibleMatchingError(f"explicit pairing {b2}->{b} joins nodes with different tags")
    return CrossoverMembrane(tuple(fwd.items()), tuple((b, b2) for b2, b in bwd.items()))


def build_crossover_membrane(g_in: IODGraph, part_a: IOPartition, g_out: IODGraph, part_b: IOPartition,
                             spec: MatchingSpec = MatchingSpec(), identity: str = QUALIFIED) -> CrossoverMembrane:
    """Pair the two parents' links according to ``spec``.

    Sequential pairing zips both link lists in lexicographic order. Random
    pairing shuffles the output parent's links with ``random.Random(seed)``,
    giving a uniform and reproducible bijection.
    """
    cut_a, cut_b = _require_compatible(g_in, part_a, g_out, part_b, identity)
    if spec.mode is MatchingMode.EXPLICIT:
        return _check_explicit(spec, g_in, g_out, cut_a, cut_b)
    fwd_groups, bwd_groups = _link_groups(g_in, g_out, cut_a, cut_b, spec.tag_constrained)
    rng = random.Random(spec.seed) if spec.mode is MatchingMode.RANDOM else None

    def pair(groups):
        out = []
        for left, right in groups:
            right = list(right)
            if rng is not None:
                rng.shuffle(right)
            out.extend(zip(left, right))
        return out

    forward_pairs = pair(fwd_groups)
    backward_pairs = [(b, b2) for b2, b in pair(bwd_groups)]
    return CrossoverMembrane(tuple(forward_pairs), tuple(backward_pairs))


def _pairings(groups) -> Iterator[list[tuple[Edge, Edge]]]:
    per_group = [
        [list(zip(left, perm)) for perm in itertools.permutations(right)]
        for left, right in groups
    ]
    for combo in itertools.product(*per_group):
        yield [p for chunk in combo for p in chunk]


def enumerate_crossover_membranes(g_in: IODGraph, part_a: IOPartition, g_out: IODGraph, part_b: IOPartition,
                                  dedupe: bool = False, tag_constrained: bool = False,
                                  identity: str = QUALIFIED) -> Iterator[CrossoverMembrane]:
    """Yield every crossover membrane, |F|!*|B|! of them unless ``dedupe``.

    With ``dedupe`` only the first pairing producing each distinct spliced
    edge set is yielded.
    """
    cut_a, cut_b = _require_compatible(g_in, part_a, g_out, part_b, identity)
    fwd_groups, bwd_groups = _link_groups(g_in, g_out, cut_a, cut_b, tag_constrained)
    seen: set[frozenset[Edge]] = set()
    for fwd in _pairings(fwd_groups):
        for bwd in _pairings(bwd_groups):
            m = CrossoverMembrane(tuple(fwd), tuple((b, b2) for b2, b in bwd))
            if dedupe:
                if m.edges in seen:
                    continue
                seen.add(m.edges)
            yield m


def _child_names(psi: frozenset[str], omega: frozenset[str], identity: str,
                 namespaces: tuple[str, str]) -> tuple[dict[str, str], dict[str, str]]:
    left = {n: n for n in psi}
    right = {n: n for n in omega}
    if identity == STRICT:
        return left, right
    clash = psi & omega
    used = set((psi | omega) - clash)
    # a qualified name may itself be taken (e.g. by an earlier child's "a:x");
    # keep prefixing the renamed node until it is free
    for mapping, ns in ((left, namespaces[0]), (right, namespaces[1])):
        for name in sorted(clash):
            new = f"{ns}:{name}"
            while new in used:
                new = f"{ns}:{new}"
            mapping[name] = new
            used.add(new)
    return left, right


def _check_membrane(m: CrossoverMembrane, cut_a: _Cut, cut_b: _Cut) -> None:
    if sorted(f for f, _ in m.forward_pairs) != list(cut_a.forward) or \
            sorted(f2 for _, f2 in m.forward_pairs) != list(cut_b.forward):
        raise IncompatibleError("membrane forward pairs do not match the partitions' forward links")
    if sorted(b for b, _ in m.backward_pairs) != list(cut_a.backward) or \
            sorted(b2 for _, b2 in m.backward_pairs) != list(cut_b.backward):
        raise IncompatibleError("membrane backward pairs do not match the partitions' backward links")


def crossover_child(g_in: IODGraph, part_a: IOPartition, g_out: IODGraph, part_b: IOPartition,
                    membrane: CrossoverMembrane, identity: str = QUALIFIED,
                    namespaces: tuple[str, str] = DEFAULT_NAMESPACES) -> IODGraph:
    """Assemble the child on the input part of ``g_in`` and the output part of ``g_out``.

    The child keeps the edges internal to each contributed part and adds the
    spliced membrane links. The sibling child (input part of ``g_out``, output
    part of ``g_in``) is obtained by swapping the argument roles.
    """
    cut_a, cut_b = _require_compatible(g_in, part_a, g_out, part_b, identity)
    _check_membrane(membrane, cut_a, cut_b)
    psi, omega = part_a.psi, part_b.omega
    left, right = _child_names(psi, omega, identity, namespaces)

    nodes = [Node(left[n], g_in.role(n), g_in.tag(n)) for n in psi]
    nodes += [Node(right[n], g_out.role(n), g_out.tag(n)) for n in omega]
    edges = {(left[s], left[d]) for s, d in g_in.edges if s in psi and d in psi}
    edges |= {(right[s], right[d]) for s, d in g_out.edges if s in omega and d in omega}
    edges |= {(left[s], right[d]) for s, d in membrane.forward_edges}
    edges |= {(right[s], left[d]) for s, d in membrane.backward_edges}
    return IODGraph(nodes, edges)


# -- end-to-end crossover ----------------------------------------------------


class SelectionMode(str, enum.Enum):
    RANDOM = "random"
    FIRST = "first"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class PartitionStrategy:
    """How :func:`crossover` picks a compatible pair of partitions.

    ``random`` draws uniformly (under the crossover seed) among all compatible
    pairs of filtered partitions, examining every partition of a parent when
    there are at most ``budget`` of them and a seeded sample of ``budget``
    otherwise; ``first`` takes the first compatible pair among the first
    ``budget`` partitions of each parent in enumeration order;
    ``explicit`` uses the given input parts.
    """

    mode: SelectionMode = SelectionMode.RANDOM
    input_filter: PartitionFilter | LayerRespecting = PartitionFilter.CONTIGUOUS
    output_filter: PartitionFilter | LayerRespecting = PartitionFilter.CONTIGUOUS
    input_psi: frozenset[str] | None = None
    output_psi: frozenset[str] | None = None
    budget: int = 4096

    def __post_init__(self):
        object.__setattr__(self, "mode", SelectionMode(self.mode))
        for key in ("input_filter", "output_filter"):
            flt = getattr(self, key)
            if not isinstance(flt, LayerRespecting):
                object.__setattr__(self, key, PartitionFilter(flt))

    @classmethod
    def explicit(cls, input_psi: Iterable[str], output_psi: Iterable[str]) -> PartitionStrategy:
        return cls(SelectionMode.EXPLICIT, input_psi=frozenset(input_psi), output_psi=frozenset(output_psi))

    def to_json(self) -> dict:
        out: dict = {"mode": self.mode.value, "budget": self.budget}
        for key, flt in (("input_filter", self.input_filter), ("output_filter", self.output_filter)):
            if isinstance(flt, LayerRespecting):
                out[key] = {"layers": dict(sorted(flt.layers.items())), "ordered": flt.ordered}
            else:
                out[key] = flt.value
        if self.mode is SelectionMode.EXPLICIT:
            out["input_psi"] = sorted(self.input_psi)
            out["output_psi"] = sorted(self.output_psi)
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> PartitionStrategy:
        def flt(raw):
            if isinstance(raw, Mapping):
                return LayerRespecting(dict(raw["layers"]), bool(raw.get("ordered", False)))
            return PartitionFilter(raw)

        return cls(
            SelectionMode(data.get("mode", "random")),
            flt(data.get("input_filter", "contiguous")),
            flt(data.get("output_filter", "contiguous")),
            frozenset(data["input_psi"]) if "input_psi" in data else None,
            frozenset(data["output_psi"]) if "output_psi" in data else None,
            int(data.get("budget", 4096)),
        )


@dataclass(frozen=True)
class CrossoverRecord:
    """A child plus everything needed to rebuild it from its parents."""

    child: IODGraph
    input_parent: str
    output_parent: str
    input_partition: IOPartition
    output_partition: IOPartition
    membrane: CrossoverMembrane
    seed: int | None = None
    identity: str = QUALIFIED
    namespaces: tuple[str, str] = DEFAULT_NAMESPACES
    matching: MatchingSpec = field(default_factory=MatchingSpec)

    def provenance(self) -> dict:
        return {
            "input_parent": self.input_parent,
            "output_parent": self.output_parent,
            "input_partition": self.input_partition.to_json(),
            "output_partition": self.output_partition.to_json(),
            "membrane": self.membrane.to_json(),
            "seed": self.seed,
            "identity": self.identity,
            "namespaces": list(self.namespaces),
            "matching": self.matching.to_json(),
        }


def replay(record: CrossoverRecord, g_in: IODGraph, g_out: IODGraph) -> IODGraph:
    """Rebuild the child of ``record`` from the same parents."""
    return crossover_child(g_in, record.input_partition, g_out, record.output_partition,
                           record.membrane, record.identity, record.namespaces)


def _candidates(graph: IODGraph, flt, budget: int,
                rng: random.Random | None) -> tuple[list[tuple[IOPartition, _Cut]], bool]:
    """Filtered partitions among at most ``budget`` examined ones, plus a truncation flag.

    Small graphs are enumerated completely. Past the budget, ``rng`` draws
    ``budget`` distinct random splits of the intermediates; without ``rng``
    the first ``budget`` in enumeration order are examined.
    """
    accept = partition_predicate(graph, flt)
    middle = sorted(graph.intermediates)
    out = []
    if rng is None or 2 ** len(middle) <= budget:
        stream = enumerate_partitions(graph, PartitionFilter.ALL)
        for examined, partition in enumerate(stream):
            if examined == budget:
                return out, True
            if accept(partition):
                out.append((partition, _cut(graph, partition)))
        return out, False
    codes = set()
    while len(codes) < budget:
        codes.add(rng.getrandbits(len(middle)))
    for code in sorted(codes):
        psi = graph.inputs | {n for k, n in enumerate(middle) if code >> k & 1}
        partition = IOPartition(frozenset(psi), graph.names - psi)
        if accept(partition):
            out.append((partition, _cut(graph, partition)))
    return out, True


def _select_partitions(g_in: IODGraph, g_out: IODGraph, strategy: PartitionStrategy, identity: str,
                       rng: random.Random) -> tuple[IOPartition, IOPartition]:
    if strategy.mode is SelectionMode.EXPLICIT:
        return make_partition(g_in, strategy.input_psi), make_partition(g_out, strategy.output_psi)

    sampler = rng if strategy.mode is SelectionMode.RANDOM else None
    side_a, cut_off_a = _candidates(g_in, strategy.input_filter, strategy.budget, sampler)
    side_b, cut_off_b = _candidates(g_out, strategy.output_filter, strategy.budget, sampler)
    by_key: dict[tuple[int, int], list] = defaultdict(list)
    for p, c in side_b:
        by_key[len(c.forward), len(c.backward)].append((p, c))

    def partners(p_a, c_a):
        for p_b, c_b in by_key.get((len(c_a.forward), len(c_a.backward)), ()):
            if identity == QUALIFIED or _compatibility(p_a, c_a, p_b, c_b, identity):
                yield p_b

    if strategy.mode is SelectionMode.FIRST:
        for p_a, c_a in side_a:
            for p_b in partners(p_a, c_a):
                return p_a, p_b
    elif identity == QUALIFIED:
        weights = [len(by_key.get((len(c.forward), len(c.backward)), ())) for _, c in side_a]
        total = sum(weights)
        if total:
            pick = rng.randrange(total)
            for (p_a, c_a), w in zip(side_a, weights):
                if pick < w:
                    return p_a, by_key[len(c_a.forward), len(c_a.backward)][pick][0]
                pick -= w
    else:
        pairs = [(p_a, p_b) for p_a, c_a in side_a for p_b in partners(p_a, c_a)]
        if pairs:
            return pairs[rng.randrange(len(pairs))]

    if cut_off_a or cut_off_b:
        raise BudgetExceededError(f"no compatible partition pair among {strategy.budget} examined partitions per parent")
    raise IncompatibleError("the parents have no compatible pair of partitions under the chosen filters")


def crossover(g_in: IODGraph, g_out: IODGraph, strategy: PartitionStrategy = PartitionStrategy(),
              matching: MatchingSpec = MatchingSpec(), seed: int | None = None, identity: str = QUALIFIED,
              namespaces: tuple[str, str] = DEFAULT_NAMESPACES, input_parent: str = "input_parent",
              output_parent: str = "output_parent") -> CrossoverRecord:
    """Select partitions, build a membrane and return the child with full provenance."""
    g_in.require_valid()
    g_out.require_valid()
    rng = random.Random(seed)
    part_a, part_b = _select_partitions(g_in, g_out, strategy, identity, rng)
    if matching.mode is MatchingMode.RANDOM and matching.seed is None:
        matching = MatchingSpec.seeded(rng.randrange(2**32), matching.tag_constrained)
    m = build_crossover_membrane(g_in, part_a, g_out, part_b, matching, identity)
    child = crossover_child(g_in, part_a, g_out, part_b, m, identity, namespaces)
    return CrossoverRecord(child, input_parent, output_parent, part_a, part_b, m, seed, identity,
                           tuple(namespaces), matching)
