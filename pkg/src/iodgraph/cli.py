"""Command-line entry point: ``iodgraph <command> ...``.

Exit status: 0 success, 1 usage error, 2 invalid graph or input document,
3 incompatible partitions or infeasible matching, 4 search or census budget
exceeded. Failures print one JSON object to stderr.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from pathlib import Path

from . import analysis, census, constructions, crossover, evolution, partition, serialize
from .errors import GraphFormatError, IODGraphError
from .graph import IODGraph

EXIT_USAGE = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def load_graph(path: str) -> IODGraph:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    if text.lstrip().startswith("digraph"):
        return serialize.from_dot(text)
    return serialize.from_json(text)


def _render(graph: IODGraph, fmt: str) -> str:
    return serialize.to_dot(graph) if fmt == "dot" else serialize.to_json(graph)


def _names(text: str | None) -> list[str] | None:
    if text is None:
        return None
    return [n for n in text.split(",") if n]


# -- commands ------------------------------------------------------------------


def cmd_validate(args, out) -> int:
    report = load_graph(args.graph).report
    out.write(_dumps({"ok": report.ok, "violations": [v.to_json() for v in report.violations]}) + "\n")
    return 0 if report.ok else 2


def cmd_classify(args, out) -> int:
    out.write(_dumps(analysis.classify(load_graph(args.graph))) + "\n")
    return 0


def cmd_partitions(args, out) -> int:
    graph = load_graph(args.graph)
    if args.filter == "layer-respecting":
        if not args.layers:
            raise UsageError("--filter layer-respecting needs --layers FILE")
        flt = partition.LayerRespecting(json.loads(Path(args.layers).read_text()), ordered=args.ordered_layers)
    else:
        flt = partition.PartitionFilter(args.filter)
    stream = partition.enumerate_partitions(graph, flt)
    if args.limit is not None:
        stream = itertools.islice(stream, args.limit)
    if args.count_only:
        out.write(_dumps({"count": sum(1 for _ in stream)}) + "\n")
        return 0
    for p in stream:
        m = partition.membrane(graph, p)
        row = p.to_json()
        row.update(m.to_json())
        row["input_contiguous"] = partition.is_input_contiguous(graph, p)
        row["output_contiguous"] = partition.is_output_contiguous(graph, p)
        out.write(_dumps(row) + "\n")
    return 0


def _explicit_parts(args, g_in, g_out):
    psi_a, psi_b = _names(args.psi_a), _names(args.psi_b)
    if psi_a is None or psi_b is None:
        raise UsageError("both --psi-a and --psi-b are required")
    return partition.make_partition(g_in, psi_a), partition.make_partition(g_out, psi_b)


def cmd_membranes(args, out) -> int:
    g_in, g_out = load_graph(args.input_parent), load_graph(args.output_parent)
    part_a, part_b = _explicit_parts(args, g_in, g_out)
    stream = crossover.enumerate_crossover_membranes(g_in, part_a, g_out, part_b, dedupe=args.dedupe,
                                                     tag_constrained=args.tags, identity=args.identity)
    if args.limit is not None:
        stream = itertools.islice(stream, args.limit)
    if args.count_only:
        out.write(_dumps({"count": sum(1 for _ in stream)}) + "\n")
        return 0
    for m in stream:
        out.write(_dumps(m.to_json()) + "\n")
    return 0


def cmd_crossover(args, out) -> int:
    g_in, g_out = load_graph(args.input_parent), load_graph(args.output_parent)
    if args.psi_a is not None or args.psi_b is not None:
        if args.auto_contiguous:
            raise UsageError("--auto-contiguous cannot be combined with --psi-a/--psi-b")
        _explicit_parts(args, g_in, g_out)
        strategy = crossover.PartitionStrategy.explicit(_names(args.psi_a), _names(args.psi_b))
    else:
        mode = crossover.SelectionMode.FIRST if args.first else crossover.SelectionMode.RANDOM
        strategy = crossover.PartitionStrategy(mode=mode, budget=args.budget)

    if args.matching == "file":
        if not args.matching_file:
            raise UsageError("--matching file needs --matching-file")
        spec = crossover.MatchingSpec.from_json(json.loads(Path(args.matching_file).read_text()))
    elif args.matching == "random":
        spec = crossover.MatchingSpec(crossover.MatchingMode.RANDOM, tag_constrained=args.tags)
    else:
        spec = crossover.MatchingSpec.sequential(args.tags)

    record = crossover.crossover(g_in, g_out, strategy, spec, seed=args.seed, identity=args.identity,
                                 input_parent=args.input_parent, output_parent=args.output_parent)
    provenance = record.provenance()
    if args.child_out:
        Path(args.child_out).write_text(_render(record.child, args.format))
        out.write(_dumps({"format_version": serialize.FORMAT_VERSION, "provenance": provenance}) + "\n")
    elif args.format == "dot":
        out.write(_render(record.child, "dot"))
    else:
        out.write(_dumps({"format_version": serialize.FORMAT_VERSION,
                          "child": serialize.graph_to_dict(record.child),
                          "provenance": provenance}) + "\n")
    return 0


def cmd_construct(args, out) -> int:
    if args.which == "theorem1":
        built = [constructions.build_theorem1_pair(args.j, args.k, args.level)]
    elif args.which == "theorem5":
        built = [constructions.build_theorem5_pair(args.j)]
    elif args.which == "competing":
        built = list(constructions.build_competing_conventions_pair())
    else:
        built = [constructions.build_non_to_fully_pair()]

    target = Path(args.out_dir)
    target.mkdir(parents=True, exist_ok=True)
    ext = "dot" if args.format == "dot" else "json"
    summary = {"format_version": serialize.FORMAT_VERSION, "construction": args.which, "results": []}
    for item in built:
        prefix = "" if len(built) == 1 else item.name.split("_")[-1] + "_"
        child = item.child()
        files = {
            "input_parent": target / f"input_parent.{ext}",
            "output_parent": target / f"output_parent.{ext}",
            "child": target / f"{prefix}child.{ext}",
        }
        files["input_parent"].write_text(_render(item.input_parent, args.format))
        files["output_parent"].write_text(_render(item.output_parent, args.format))
        files["child"].write_text(_render(child, args.format))
        summary["results"].append({
            "name": item.name,
            "files": {k: str(v) for k, v in files.items()},
            "input_partition": item.input_partition.to_json(),
            "output_partition": item.output_partition.to_json(),
            "membrane": item.membrane.to_json(),
            "expected": item.expected.label,
            "input_parent": analysis.classify(item.input_parent),
            "output_parent": analysis.classify(item.output_parent),
            "child": analysis.classify(child),
        })
    out.write(_dumps(summary) + "\n")
    return 0


def cmd_census(args, out) -> int:
    data = json.loads(Path(args.config).read_text()) if args.config else {}
    for key, value in (("num_inputs", args.inputs), ("num_outputs", args.outputs),
                       ("num_intermediates", args.intermediates), ("sample", args.sample),
                       ("seed", args.seed), ("budget", args.budget)):
        if value is not None:
            data[key] = value
    config = census.CensusConfig.from_json(data)

    def progress(done, total):
        if not args.quiet:
            print(f"census: shard {done}/{total}", file=sys.stderr, flush=True)

    table = census.run_census(config, threads=args.threads, progress=progress)
    blob = census.emit_csv(table)
    if args.out:
        Path(args.out).write_bytes(blob)
    else:
        out.write(blob.decode())
    return 0


def _population(entries, base: Path) -> list[IODGraph]:
    graphs = []
    for entry in entries:
        if isinstance(entry, str):
            graphs.append(load_graph(str(base / entry)))
        elif isinstance(entry, dict) and "perceptron" in entry:
            graphs.extend([constructions.perceptron(entry["perceptron"])] * int(entry.get("copies", 1)))
        else:
            graphs.append(serialize.graph_from_dict(entry))
    return graphs


def cmd_evolve(args, out) -> int:
    path = Path(args.config)
    data = json.loads(path.read_text())
    if args.seed is not None:
        data["seed"] = args.seed
    if args.threads is not None:
        data["threads"] = args.threads
    config = evolution.EvolutionConfig.from_json(data)
    initial = _population(data.get("population", []), path.parent)
    result = evolution.evolve(initial, config)
    for entry in result.history:
        out.write(entry.to_json() + "\n")
    return 0


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="iodgraph", description="Crossover and informativeness tools for IOD graphs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check the IOD graph constraints")
    p.add_argument("graph")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("classify", help="informativeness, actionability and dangling nodes")
    p.add_argument("graph")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("partitions", help="enumerate IO partitions as JSON lines")
    p.add_argument("graph")
    p.add_argument("--filter", default="all",
                   choices=[f.value for f in partition.PartitionFilter] + ["layer-respecting"])
    p.add_argument("--layers", help="JSON object mapping every node to its layer")
    p.add_argument("--ordered-layers", action="store_true",
                   help="with layer-respecting, also require input-part layers to precede output-part layers")
    p.add_argument("--limit", type=int)
    p.add_argument("--count-only", action="store_true")
    p.set_defaults(func=cmd_partitions)

    def parents(p):
        p.add_argument("input_parent")
        p.add_argument("output_parent")
        p.add_argument("--psi-a", help="comma-separated input part of the input parent")
        p.add_argument("--psi-b", help="comma-separated input part of the output parent")
        p.add_argument("--identity", choices=[crossover.QUALIFIED, crossover.STRICT], default=crossover.QUALIFIED)
        p.add_argument("--tags", action="store_true", help="only pair links whose spliced endpoints share a tag")

    p = sub.add_parser("membranes", help="enumerate crossover membranes as JSON lines")
    parents(p)
    p.add_argument("--dedupe", action="store_true")
    p.add_argument("--limit", type=int)
    p.add_argument("--count-only", action="store_true")
    p.set_defaults(func=cmd_membranes)

    p = sub.add_parser("crossover", help="produce one crossover child with provenance")
    parents(p)
    p.add_argument("--auto-contiguous", action="store_true",
                   help="search contiguous partitions (the default when no --psi-a/--psi-b is given)")
    p.add_argument("--first", action="store_true", help="take the first compatible pair instead of a random one")
    p.add_argument("--budget", type=int, default=4096)
    p.add_argument("--matching", choices=["sequential", "random", "file"], default="sequential")
    p.add_argument("--matching-file")
    p.add_argument("--seed", type=int)
    p.add_argument("--child-out")
    p.add_argument("--format", choices=["json", "dot"], default="json")
    p.set_defaults(func=cmd_crossover)

    p = sub.add_parser("construct", help="write a named example or counterexample pair")
    p.add_argument("which", choices=["theorem1", "theorem5", "competing", "non-to-fully"])
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--level", default="fully", choices=[lv.label for lv in analysis.InformativenessLevel])
    p.add_argument("--out-dir", default=".")
    p.add_argument("--format", choices=["json", "dot"], default="json")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("census", help="tally informativeness by edge count as CSV")
    p.add_argument("--config", help="JSON census configuration; flags override its fields")
    p.add_argument("--inputs", type=int)
    p.add_argument("--outputs", type=int)
    p.add_argument("--intermediates", type=int)
    p.add_argument("--sample", type=int, help="graphs drawn per edge count instead of an exhaustive sweep")
    p.add_argument("--seed", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("evolve", help="run the crossover-only generational loop")
    p.add_argument("config")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_evolve)
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if args.command == "construct" and args.which == "theorem5" and args.j < 2:
            raise UsageError("theorem5 needs --j 2 or more")
        return args.func(args, out)
    except UsageError as exc:
        print(_dumps({"error": "usage", "message": str(exc)}), file=sys.stderr)
        return EXIT_USAGE
    except IODGraphError as exc:
        print(_dumps(exc.to_json()), file=sys.stderr)
        return exc.exit_code
    except (OSError, json.JSONDecodeError) as exc:
        err = exc if isinstance(exc, OSError) else GraphFormatError(exc.msg, exc.lineno, exc.colno)
        payload = err.to_json() if isinstance(err, IODGraphError) else {"error": "io", "message": str(err)}
        print(_dumps(payload), file=sys.stderr)
        return EXIT_USAGE if isinstance(err, OSError) else 2
    except ValueError as exc:
        print(_dumps({"error": "invalid_argument", "message": str(exc)}), file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
