"""Informativeness census over every graph of a fixed node layout.

A universe is a set of fixed edges (each input wired to an intermediate, each
output fed by an intermediate) plus a set of variable edge slots; every
subset of the slots is one graph. Graphs are tallied by how many variable
edges they contain.

The sweep is vectorised across graphs rather than within one graph: a block
of consecutive slot masks is held as a ``uint64`` array, each node's
reachable set is one word per graph, and a bitset Warshall closure pivoting
only on intermediates (the only nodes a path can pass through) runs on all
graphs of the block at once. Blocks are keyed by the high-order mask bits
and can be processed in parallel; tallies are summed, so the result does
not depend on scheduling.
"""

from __future__ import annotations

import io
import math
from collections.abc import Callable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analysis import InformativenessLevel
from .errors import BudgetExceededError
from .graph import Edge, IODGraph, Node, NodeRole

DEFAULT_BUDGET = 2**26
_SHARD_BITS = 20
_MAX_NODES = 64


@dataclass(frozen=True)
class CensusConfig:
    """Layout of the graph universe.

    ``input_wiring`` holds fixed ``(input, intermediate)`` edges and
    ``output_wiring`` fixed ``(intermediate, output)`` edges; ``None`` means the
    default wiring (inputs onto the first intermediates, outputs from the
    last ones). ``variable_universe`` defaults to every intermediate-to-
    intermediate slot including self-loops. Setting ``sample`` switches from
    the exhaustive sweep to ``sample`` uniformly drawn graphs per edge count.
    """

    num_inputs: int = 3
    num_outputs: int = 2
    num_intermediates: int = 5
    input_wiring: tuple[Edge, ...] | None = None
    output_wiring: tuple[Edge, ...] | None = None
    variable_universe: tuple[Edge, ...] | None = None
    sample: int | None = None
    seed: int | None = None
    budget: int = DEFAULT_BUDGET

    @property
    def inputs(self) -> list[str]:
        return [f"i{k}" for k in range(1, self.num_inputs + 1)]

    @property
    def outputs(self) -> list[str]:
        return [f"o{k}" for k in range(1, self.num_outputs + 1)]

    @property
    def intermediates(self) -> list[str]:
        return [f"n{k}" for k in range(1, self.num_intermediates + 1)]

    def fixed_edges(self) -> list[Edge]:
        ins, outs, mid = self.inputs, self.outputs, self.intermediates
        m = len(mid)
        if self.input_wiring is not None:
            wired_in = list(self.input_wiring)
        else:
            wired_in = [(name, mid[k % m]) for k, name in enumerate(ins)] if m else []
        if self.output_wiring is not None:
            wired_out = list(self.output_wiring)
        elif not m:
            wired_out = []
        elif m >= len(outs):
            wired_out = [(mid[m - len(outs) + k], name) for k, name in enumerate(outs)]
        else:
            wired_out = [(mid[k % m], name) for k, name in enumerate(outs)]
        return [tuple(e) for e in wired_in + wired_out]

    def slots(self) -> list[Edge]:
        if self.variable_universe is not None:
            return [tuple(e) for e in self.variable_universe]
        mid = self.intermediates
        return [(a, b) for a in mid for b in mid]

    def validate(self) -> CensusConfig:
        if min(self.num_inputs, self.num_outputs) < 1 or self.num_intermediates < 0:
            raise ValueError("need at least one input and one output, and a non-negative intermediate count")
        if self.num_inputs + self.num_outputs + self.num_intermediates > _MAX_NODES:
            raise ValueError(f"census layouts are limited to {_MAX_NODES} nodes")
        ins, outs, mid = set(self.inputs), set(self.outputs), set(self.intermediates)
        for src, dst in self.fixed_edges():
            ok = (src in ins and dst in mid) or (src in mid and dst in outs)
            if not ok:
                raise ValueError(f"fixed wiring edge {src}->{dst} must run input->intermediate or intermediate->output")
        slots = self.slots()
        if len(set(slots)) != len(slots):
            raise ValueError("variable universe lists a slot twice")
        fixed = set(self.fixed_edges())
        for src, dst in slots:
            if src not in ins | mid or dst not in mid | outs:
                raise ValueError(f"slot {src}->{dst} is not a permitted IOD edge in this layout")
            if (src, dst) in fixed:
                raise ValueError(f"slot {src}->{dst} duplicates a fixed wiring edge")
        if self.sample is not None and self.sample < 1:
            raise ValueError("sample size must be positive")
        return self

    def to_json(self) -> dict:
        return {
            "num_inputs": self.num_inputs,
            "num_outputs": self.num_outputs,
            "num_intermediates": self.num_intermediates,
            "input_wiring": [list(e) for e in self.fixed_edges() if e[0] in set(self.inputs)],
            "output_wiring": [list(e) for e in self.fixed_edges() if e[1] in set(self.outputs)],
            "variable_universe": [list(e) for e in self.slots()],
            "sample": self.sample,
            "seed": self.seed,
            "budget": self.budget,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> CensusConfig:
        def edges(key):
            return tuple(tuple(e) for e in data[key]) if data.get(key) is not None else None

        return cls(
            num_inputs=int(data.get("num_inputs", 3)),
            num_outputs=int(data.get("num_outputs", 2)),
            num_intermediates=int(data.get("num_intermediates", 5)),
            input_wiring=edges("input_wiring"),
            output_wiring=edges("output_wiring"),
            variable_universe=edges("variable_universe"),
            sample=data.get("sample"),
            seed=data.get("seed"),
            budget=int(data.get("budget", DEFAULT_BUDGET)),
        )


@dataclass(frozen=True)
class CensusRow:
    k: int
    total: int
    non: int
    partial: int
    very: int
    full: int


@dataclass(frozen=True)
class CensusTable:
    rows: tuple[CensusRow, ...]
    num_slots: int
    sampled: bool = False
    sample: int | None = None
    seed: int | None = None

    def row(self, k: int) -> CensusRow:
        return self.rows[k]

    @property
    def grand_total(self) -> int:
        return sum(r.total for r in self.rows)


# -- vectorised core -----------------------------------------------------------


@dataclass
class _Layout:
    inputs: list[int]
    intermediates: list[int]
    out_mask: int
    base: list[int]
    slots: list[tuple[int, int]]


def _layout(config: CensusConfig) -> _Layout:
    names = config.inputs + config.intermediates + config.outputs
    index = {n: k for k, n in enumerate(names)}
    base = [0] * len(names)
    for src, dst in config.fixed_edges():
        base[index[src]] |= 1 << index[dst]
    out_mask = 0
    for name in config.outputs:
        out_mask |= 1 << index[name]
    return _Layout(
        inputs=[index[n] for n in config.inputs],
        intermediates=[index[n] for n in config.intermediates],
        out_mask=out_mask,
        base=base,
        slots=[(index[s], index[d]) for s, d in config.slots()],
    )


def _classify(layout: _Layout, size: int, slot_bit: Callable[[int], np.ndarray]) -> np.ndarray:
    """Informativeness codes (0..3) for ``size`` graphs; ``slot_bit(b)`` is slot b's 0/1 column."""
    movers = layout.inputs + layout.intermediates
    rows = {u: np.full(size, layout.base[u], dtype=np.uint64) for u in movers}
    for b, (u, v) in enumerate(layout.slots):
        rows[u] |= slot_bit(b) << np.uint64(v)
    # bitset Warshall; inputs never have incoming edges and outputs never
    # outgoing ones, so only intermediates can be interior path nodes
    for k in layout.intermediates:
        pivot = rows[k]
        shift = np.uint64(k)
        for u in movers:
            if u != k:
                rows[u] |= ((rows[u] >> shift) & np.uint64(1)) * pivot
    out = np.uint64(layout.out_mask)
    some = np.zeros(size, dtype=bool)
    every = np.ones(size, dtype=bool)
    full = np.ones(size, dtype=bool)
    for i in layout.inputs:
        hit = rows[i] & out
        reached = hit != 0
        some |= reached
        every &= reached
        full &= hit == out
    codes = np.where(every, 2, np.where(some, 1, 0)).astype(np.uint8)
    codes[full] = 3
    return codes


def _tally(k: np.ndarray, codes: np.ndarray, num_slots: int) -> np.ndarray:
    flat = k.astype(np.intp) * 4 + codes
    return np.bincount(flat, minlength=(num_slots + 1) * 4).reshape(num_slots + 1, 4).astype(np.int64)


def _exhaustive_shard(layout: _Layout, lo: int, hi: int) -> np.ndarray:
    masks = np.arange(lo, hi, dtype=np.uint64)
    codes = _classify(layout, hi - lo, lambda b: (masks >> np.uint64(b)) & np.uint64(1))
    return _tally(np.bitwise_count(masks), codes, len(layout.slots))


def classify_masks(config: CensusConfig, masks: Sequence[int]) -> list[InformativenessLevel]:
    """Fast-path classification of specific universe members (bit b = slot b present)."""
    layout = _layout(config.validate())
    bits = np.array([[(m >> b) & 1 for b in range(len(layout.slots))] for m in masks], dtype=np.uint64)
    bits = bits.reshape(len(masks), len(layout.slots))
    codes = _classify(layout, len(masks), lambda b: bits[:, b])
    return [InformativenessLevel(int(c)) for c in codes]


def graph_for_mask(config: CensusConfig, mask: int) -> IODGraph:
    """The universe member with slot b present iff bit b of ``mask`` is set."""
    nodes = [Node(n, NodeRole.INPUT) for n in config.inputs]
    nodes += [Node(n, NodeRole.OUTPUT) for n in config.outputs]
    nodes += [Node(n, NodeRole.INTERMEDIATE) for n in config.intermediates]
    present = [s for b, s in enumerate(config.slots()) if mask >> b & 1]
    return IODGraph(nodes, config.fixed_edges() + present)


def _rows_from_counts(counts: np.ndarray) -> tuple[CensusRow, ...]:
    return tuple(
        CensusRow(k, int(row.sum()), int(row[0]), int(row[1]), int(row[2]), int(row[3]))
        for k, row in enumerate(counts)
    )


def run_census(config: CensusConfig, threads: int = 1,
               progress: Callable[[int, int], None] | None = None) -> CensusTable:
    """Classify every graph of the universe (or a stratified sample) and tally by edge count.

    ``progress(done, total)`` is called after each shard of an exhaustive sweep.
    """
    config.validate()
    layout = _layout(config)
    s = len(layout.slots)
    if config.sample is not None:
        return _sampled(config, layout)
    if 2**s > config.budget:
        raise BudgetExceededError(f"exhaustive census needs 2^{s} graphs, over the budget of {config.budget}")

    shard = 1 << min(s, _SHARD_BITS)
    bounds = [(lo, min(lo + shard, 2**s)) for lo in range(0, 2**s, shard)]
    counts = np.zeros((s + 1, 4), dtype=np.int64)

    def work(bound):
        return _exhaustive_shard(layout, *bound)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        for done, part in enumerate(pool.map(work, bounds), start=1):
            counts += part
            if progress is not None:
                progress(done, len(bounds))
    return CensusTable(_rows_from_counts(counts), s)


def _sampled(config: CensusConfig, layout: _Layout) -> CensusTable:
    s = len(layout.slots)
    n = config.sample
    rng = np.random.default_rng(config.seed)
    counts = np.zeros((s + 1, 4), dtype=np.int64)
    for k in range(s + 1):
        # a uniformly random k-subset per row: the k smallest of s iid uniforms
        order = np.argsort(rng.random((n, s)), axis=1)
        present = np.zeros((n, s), dtype=np.uint64)
        np.put_along_axis(present, order[:, :k], np.uint64(1), axis=1)
        codes = _classify(layout, n, lambda b: present[:, b])
        counts[k] = np.bincount(codes, minlength=4)
    return CensusTable(_rows_from_counts(counts), s, sampled=True, sample=n, seed=config.seed)


def expected_totals(num_slots: int) -> list[int]:
    return [math.comb(num_slots, k) for k in range(num_slots + 1)]


def emit_csv(table: CensusTable) -> bytes:
    buf = io.StringIO()
    if table.sampled:
        buf.write(f"# sampled: {table.sample} graphs per edge count, seed={table.seed}\n")
    buf.write("k,total,non,partial,very,full\n")
    for r in table.rows:
        buf.write(f"{r.k},{r.total},{r.non},{r.partial},{r.very},{r.full}\n")
    return buf.getvalue().encode()


def parse_csv(data: bytes | str) -> CensusTable:
    """Inverse of :func:`emit_csv` (the sample comment is read back too)."""
    text = data.decode() if isinstance(data, bytes) else data
    sample = seed = None
    rows = []
    for line in text.splitlines():
        if line.startswith("#"):
            parts = dict(p.split("=") for p in line.split() if "=" in p)
            sample = int(line.split()[2])
            seed = None if parts.get("seed", "None") == "None" else int(parts["seed"])
            continue
        if line.startswith("k,") or not line:
            continue
        rows.append(CensusRow(*map(int, line.split(","))))
    return CensusTable(tuple(rows), len(rows) - 1, sampled=sample is not None, sample=sample, seed=seed)

