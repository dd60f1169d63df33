"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion N PASS|FAIL`` line (also collected in the
terminal summary). Graph properties of crossover children are judged by the
slow reference implementations in ``oracles`` rather than by the library.
"""

import io
import itertools
import json
import math
import random
import time
from dataclasses import dataclass

import pytest

import oracles
from iodgraph import (
    IOPartition,
    MatchingSpec,
    enumerate_partitions,
    to_json,
    validate,
)
from iodgraph.analysis import prune_dangling
from iodgraph.census import CensusConfig, classify_masks, graph_for_mask, run_census
from iodgraph.cli import main
from iodgraph.constructions import (
    build_competing_conventions_pair,
    build_non_to_fully_pair,
    build_swap_example_pair,
    build_theorem1_pair,
    build_theorem5_pair,
)
from iodgraph.crossover import (
    QUALIFIED,
    STRICT,
    build_crossover_membrane,
    crossover_child,
    enumerate_crossover_membranes,
)
from iodgraph.graph import edge_universe_size

RANK = {"non": 0, "partially": 1, "very": 2, "fully": 3}
SUITE_PAIRS = 1000
SUITE_SEED = 20240611
MAX_NODES = 12


@dataclass
class Case:
    g_in: object
    part_a: IOPartition
    g_out: object
    part_b: IOPartition
    identity: str
    children: list


def _parent(rng, acyclic, prefix, dangle_free):
    ni, no = rng.randint(1, 3), rng.randint(1, 3)
    nm = rng.randint(0, min(6, MAX_NODES - ni - no))
    g = oracles.random_graph(rng, ni, no, nm, rng.uniform(0.15, 0.55), acyclic_only=acyclic, mid_prefix=prefix)
    return prune_dangling(g) if dangle_free else g


def _partition(graph, psi):
    psi = frozenset(psi)
    return IOPartition(psi, graph.names - psi)


def _pick_pair(rng, g_in, g_out, contiguous):
    """A uniformly random pair of partitions with matching link counts, found by brute force."""
    def options(g):
        by_size = {}
        for psi in oracles.all_psis(g):
            if contiguous and not (oracles.input_contiguous(g, psi) and oracles.output_contiguous(g, psi)):
                continue
            f, b = oracles.cut(g, psi)
            by_size.setdefault((len(f), len(b)), []).append(psi)
        return by_size

    left, right = options(g_in), options(g_out)
    pairs = [(a, b) for key in left if key in right for a in left[key] for b in right[key]]
    if not pairs:
        return None
    a, b = rng.choice(pairs)
    return _partition(g_in, a), _partition(g_out, b)


def _children(rng, g_in, part_a, g_out, part_b, identity):
    f, b = oracles.cut(g_in, part_a.psi)
    if math.factorial(len(f)) * math.factorial(len(b)) <= 64:
        membranes = list(enumerate_crossover_membranes(g_in, part_a, g_out, part_b, identity=identity))
    else:
        membranes = [build_crossover_membrane(g_in, part_a, g_out, part_b,
                                              MatchingSpec.seeded(rng.randrange(2**32)), identity)
                     for _ in range(16)]
    return [crossover_child(g_in, part_a, g_out, part_b, m, identity) for m in membranes]


def build_suite(seed, count):
    """``count`` random compatible pairs cycling through four families.

    Families alternate between cyclic and acyclic parents, and between
    unrestricted and (dangle-free parents, contiguous partitions). Even-numbered
    pairs use disjoint intermediate names under strict identity; odd ones share
    names and rely on qualified renaming.
    """
    rng = random.Random(seed)
    cases = []
    while len(cases) < count:
        t = len(cases)
        acyclic, careful = t % 2 == 1, t % 4 >= 2
        strict = t % 8 < 4
        g_in = _parent(rng, acyclic, "n", careful)
        g_out = _parent(rng, acyclic, "m" if strict else "n", careful)
        picked = _pick_pair(rng, g_in, g_out, careful)
        if picked is None:
            continue
        identity = STRICT if strict else QUALIFIED
        kids = _children(rng, g_in, picked[0], g_out, picked[1], identity)
        cases.append(Case(g_in, picked[0], g_out, picked[1], identity, kids))
    return cases


@pytest.fixture(scope="module")
def suite():
    start = time.perf_counter()
    cases = build_suite(SUITE_SEED, SUITE_PAIRS)
    ok = all(validate(c).ok for case in cases for c in case.children)
    return cases, ok, time.perf_counter() - start


def _contiguous_dangle_free(case):
    return (not oracles.dangling(case.g_in) and not oracles.dangling(case.g_out)
            and oracles.input_contiguous(case.g_in, case.part_a.psi)
            and oracles.output_contiguous(case.g_in, case.part_a.psi)
            and oracles.input_contiguous(case.g_out, case.part_b.psi)
            and oracles.output_contiguous(case.g_out, case.part_b.psi))


def test_children_of_random_compatible_pairs_are_valid(suite, acceptance):
    cases, ok, elapsed = suite
    n_children = sum(len(c.children) for c in cases)
    sizes_ok = all(len(c.g_in) <= MAX_NODES and len(c.g_out) <= MAX_NODES for c in cases)
    acceptance(1, "every child of a random compatible pair validates",
               ok and sizes_ok and len(cases) >= 1000 and elapsed < 30,
               f"{len(cases)} pairs, {n_children} children, {elapsed:.1f} s")


def test_children_of_acyclic_parents_are_acyclic(suite, acceptance):
    cases = [c for c in suite[0] if oracles.acyclic(c.g_in) and oracles.acyclic(c.g_out)]
    bad = [(c, k) for c in cases for k in c.children if not oracles.acyclic(k)]
    total = sum(len(c.children) for c in cases)
    detail = f"{len(cases)} acyclic pairs, {total} children, {len(bad)} cyclic"
    if bad:
        case, kid = bad[0]
        detail += f"; first: psi_a={sorted(case.part_a.psi)} psi_b={sorted(case.part_b.psi)} child edges={sorted(kid.edges)}"
    acceptance(2, "children of acyclic parents are acyclic", bool(cases) and not bad, detail)


def test_dangle_free_parents_with_contiguous_cuts_give_dangle_free_children(suite, acceptance):
    cases = [c for c in suite[0] if _contiguous_dangle_free(c)]
    bad = sum(1 for c in cases for k in c.children if oracles.dangling(k))
    acceptance(3, "no dangling nodes is inherited under contiguous partitions",
               len(cases) >= 100 and bad == 0, f"{len(cases)} pairs, {bad} children with dangling nodes")


def _transposed(case, rng):
    g_in, g_out = case.g_in.transpose(), case.g_out.transpose()
    part_a = _partition(g_in, case.part_a.omega)
    part_b = _partition(g_out, case.part_b.omega)
    kids = _children(rng, g_in, part_a, g_out, part_b, case.identity)
    return Case(g_in, part_a, g_out, part_b, case.identity, kids)


def _lower_bound_failures(cases, measure):
    checked = {1: 0, 2: 0}
    failures = 0
    for case in cases:
        floor = min(RANK[measure(case.g_in)], RANK[measure(case.g_out)])
        for need in (1, 2):
            if floor >= need:
                checked[need] += 1
                failures += sum(1 for k in case.children if RANK[measure(k)] < need)
    return checked, failures


def test_parent_levels_bound_child_levels(suite, acceptance):
    cases = [c for c in suite[0] if _contiguous_dangle_free(c)]
    info_checked, info_fail = _lower_bound_failures(cases, oracles.informativeness)
    rng = random.Random(SUITE_SEED + 1)
    mirrored = [_transposed(c, rng) for c in cases]
    act_checked, act_fail = _lower_bound_failures(mirrored, oracles.actionability)
    ok = info_fail == act_fail == 0 and min(info_checked[1], info_checked[2], act_checked[1], act_checked[2]) > 0
    acceptance(4, "partially/very parents give at least partially/very children, and the actionability mirror",
               ok, f"informativeness pairs {info_checked}, actionability pairs {act_checked}, "
                   f"failures {info_fail}+{act_fail}")


def test_fully_informative_parents_can_yield_non_informative_child(acceptance):
    bad = []
    for j, k in itertools.product((1, 2, 3), repeat=2):
        built = build_theorem1_pair(j, k)
        levels = (oracles.informativeness(built.input_parent), oracles.informativeness(built.output_parent),
                  oracles.informativeness(built.child()))
        if levels != ("fully", "fully", "non"):
            bad.append((j, k, levels))
    acceptance(5, "fully informative parents, non-informative child for all J,K in 1..3", not bad, str(bad or ""))


def test_fully_informative_dangle_free_parents_give_very_not_fully_child(acceptance):
    bad = []
    for j in (2, 3):
        built = build_theorem5_pair(j)
        for g, p in ((built.input_parent, built.input_partition), (built.output_parent, built.output_partition)):
            if not (oracles.informativeness(g) == "fully" and not oracles.dangling(g)
                    and oracles.input_contiguous(g, p.psi) and oracles.output_contiguous(g, p.psi)):
                bad.append((j, "parent"))
        if oracles.informativeness(built.child()) != "very":
            bad.append((j, "child"))
    acceptance(6, "fully informative dangle-free parents, very but not fully informative child",
               not bad, str(bad or ""))


def test_competing_conventions_membranes(acceptance):
    bad_pair, good_pair = build_competing_conventions_pair()
    b, g = bad_pair.child(), good_pair.child()
    ok = (oracles.path_exists(b, "I1", "O2") and not oracles.path_exists(b, "I1", "O1")
          and good_pair.membrane.edges == {("N1", "N4"), ("N2", "N3")}
          and oracles.path_exists(g, "I1", "O1") and oracles.path_exists(g, "I2", "O2"))
    acceptance(7, "bad membrane swaps conventions, good membrane keeps them", ok)


def test_non_informative_parents_can_yield_fully_informative_child(acceptance):
    built = build_non_to_fully_pair()
    levels = (oracles.informativeness(built.input_parent), oracles.informativeness(built.output_parent),
              oracles.informativeness(built.child()))
    acceptance(8, "non-informative parents, fully informative child", levels == ("non", "non", "fully"), str(levels))


@pytest.fixture(scope="module")
def full_census():
    start = time.perf_counter()
    table = run_census(CensusConfig())
    return table, time.perf_counter() - start


def test_edge_universe_and_census_totals(full_census, acceptance):
    table, _ = full_census
    totals = [r.total for r in table.rows]
    ok = (edge_universe_size(3, 2, 9, True) == 132
          and len(CensusConfig(3, 2, 5).slots()) == 25
          and table.num_slots == 25
          and totals == [math.comb(25, k) for k in range(26)]
          and table.row(13).total == 5_200_300
          and sum(totals) == table.grand_total == 33_554_432)
    acceptance(9, "edge universe 132, 25 census slots, binomial census totals", ok,
               f"total(13)={table.row(13).total}, sum={sum(totals)}")


def test_census_endpoints_spot_check_and_speed(full_census, acceptance):
    table, full_seconds = full_census
    config = CensusConfig()
    top = 2**25 - 1
    ends = (oracles.informativeness(graph_for_mask(config, 0)), oracles.informativeness(graph_for_mask(config, top)))
    rng = random.Random(31)
    masks = [rng.getrandbits(25) for _ in range(100)]
    fast = [lv.label for lv in classify_masks(config, masks)]
    slow = [oracles.informativeness(graph_for_mask(config, m)) for m in masks]
    start = time.perf_counter()
    run_census(CensusConfig(3, 2, 4))
    small_seconds = time.perf_counter() - start
    ok = (ends == ("non", "fully") and fast == slow
          and table.row(0).non == 1 and table.row(25).full == 1
          and full_seconds <= 600 and small_seconds <= 2)
    acceptance(10, "census endpoints, 100-graph spot check, sweep speed", ok,
               f"full sweep {full_seconds:.1f} s, 2^16 sweep {small_seconds:.2f} s")


def test_partition_count_law_and_contiguity_filter(acceptance):
    rng = random.Random(12)
    count_bad, filter_bad, graphs = 0, 0, 0
    for m in range(13):
        for _ in range(3 if m <= 10 else 1):
            g = oracles.random_graph(rng, rng.randint(1, 3), rng.randint(1, 3), m, rng.uniform(0.1, 0.4),
                                     acyclic_only=rng.random() < 0.5)
            graphs += 1
            if sum(1 for _ in enumerate_partitions(g)) != 2**m:
                count_bad += 1
            got = {p.psi for p in enumerate_partitions(g, "contiguous")}
            want = {psi for psi in oracles.all_psis(g)
                    if oracles.input_contiguous(g, psi) and oracles.output_contiguous(g, psi)}
            filter_bad += got != want
    acceptance(11, "2^m partitions and contiguous filter matches brute force",
               count_bad == filter_bad == 0, f"{graphs} graphs, m up to 12")


def _run_cli(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue().encode()


def test_identical_seeds_give_byte_identical_outputs(tmp_path, acceptance):
    pair = build_swap_example_pair()
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    a.write_text(to_json(pair.input_parent))
    b.write_text(to_json(pair.output_parent))
    evo = tmp_path / "evo.json"
    evo.write_text(json.dumps({"population_size": 6, "generations": 4, "seed": 5,
                               "population": [{"perceptron": [2, 3, 2], "copies": 2},
                                              {"perceptron": [2, 2, 2, 2], "copies": 2}]}))
    runs = {
        "crossover": ["crossover", str(a), str(b), "--seed", "11", "--matching", "random"],
        "census": ["census", "--sample", "40", "--seed", "3", "--quiet"],
        "evolve": ["evolve", str(evo)],
    }
    same = {}
    for name, argv in runs.items():
        first, second = _run_cli(argv), _run_cli(argv)
        same[name] = first == second and first[0] == 0 and len(first[1]) > 0
    acceptance(12, "crossover, sampled census and evolve are byte-identical across runs",
               all(same.values()), str(same))
