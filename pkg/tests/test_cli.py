import io
import json
import subprocess
import sys

import pytest

from iodgraph import from_dot, from_json, graph_to_dict, make_graph, to_json
from iodgraph.cli import main
from iodgraph.constructions import build_swap_example_pair, perceptron, perceptron_layers
from iodgraph.serialize import graph_from_dict


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


@pytest.fixture
def swap_files(tmp_path):
    pair = build_swap_example_pair()
    a, b = tmp_path / "in.json", tmp_path / "out.json"
    a.write_text(to_json(pair.input_parent))
    b.write_text(to_json(pair.output_parent))
    return pair, str(a), str(b)


def test_classify_prints_json(swap_files):
    _, _, b = swap_files
    code, text = run(["classify", b])
    assert code == 0
    assert json.loads(text) == {"informativeness": "fully", "actionability": "fully",
                                "no_dangling_nodes": True, "dangling": []}


def test_construct_then_classify_child(tmp_path):
    code, text = run(["construct", "theorem1", "--j", "1", "--k", "1", "--out-dir", str(tmp_path)])
    assert code == 0
    summary = json.loads(text)
    assert summary["results"][0]["child"]["informativeness"] == "non"
    code, text = run(["classify", str(tmp_path / "child.json")])
    assert json.loads(text)["informativeness"] == "non"


@pytest.mark.parametrize("which, extra, expected", [
    ("theorem5", ["--j", "2"], ["very"]),
    ("non-to-fully", [], ["fully"]),
    ("competing", [], ["very", "very"]),
])
def test_construct_variants(tmp_path, which, extra, expected):
    code, text = run(["construct", which, "--out-dir", str(tmp_path)] + extra)
    assert code == 0
    results = json.loads(text)["results"]
    assert [r["child"]["informativeness"] for r in results] == expected
    for r in results:
        for path in r["files"].values():
            from_json(open(path).read())


def test_construct_dot_output(tmp_path):
    code, _ = run(["construct", "non-to-fully", "--format", "dot", "--out-dir", str(tmp_path)])
    assert code == 0
    assert from_dot((tmp_path / "child.dot").read_text()).names


def test_census_default_rows():
    code, text = run(["census", "--inputs", "3", "--outputs", "2", "--intermediates", "4", "--quiet"])
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "k,total,non,partial,very,full"
    assert len(lines) == 1 + 17


def test_census_sampled_reproducible(tmp_path):
    args = ["census", "--sample", "20", "--seed", "4", "--quiet"]
    assert run(args) == run(args)
    code, _ = run(args + ["--out", str(tmp_path / "c.csv")])
    assert code == 0 and (tmp_path / "c.csv").read_text().startswith("# sampled")


def test_census_budget_exit_code(capsys):
    code, _ = run(["census", "--budget", "1000", "--quiet"])
    assert code == 4
    assert json.loads(capsys.readouterr().err)["error"] == "budget_exceeded"


def test_validate_reports_violations(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"nodes": [{"id": "i", "role": "input"}, {"id": "o", "role": "output"}],
                                "edges": [["o", "i"]]}))
    code, text = run(["validate", str(path)])
    assert code == 2
    assert {v["code"] for v in json.loads(text)["violations"]} == {"input_has_incoming", "output_has_outgoing"}
    code, _ = run(["classify", str(path)])
    assert code == 2
    assert json.loads(capsys.readouterr().err)["error"] == "invalid_graph"


def test_malformed_file_has_position(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"nodes": [\n  {"id": "i",, }]}')
    code, _ = run(["classify", str(path)])
    assert code == 2
    err = json.loads(capsys.readouterr().err)
    assert err["line"] == 2 and err["column"] > 0


def test_usage_errors(capsys):
    assert run(["frobnicate"])[0] == 1
    assert json.loads(capsys.readouterr().err)["error"] == "usage"
    assert run(["classify", "/nonexistent/file.json"])[0] == 1
    capsys.readouterr()
    assert run([])[0] == 1


def test_partitions_stream(swap_files):
    _, a, _ = swap_files
    code, text = run(["partitions", a, "--count-only"])
    assert json.loads(text) == {"count": 2 ** 5}
    code, text = run(["partitions", a, "--limit", "3"])
    rows = [json.loads(line) for line in text.splitlines()]
    assert len(rows) == 3
    assert rows[0]["psi"] == ["I1", "I2", "I3"]
    assert {"forward", "backward", "omega", "input_contiguous", "output_contiguous"} <= set(rows[0])
    code, text = run(["partitions", a, "--filter", "contiguous"])
    assert all(json.loads(line)["output_contiguous"] for line in text.splitlines())


def test_partitions_layer_filter(tmp_path):
    g = perceptron([2, 2, 2, 2])
    (tmp_path / "g.json").write_text(to_json(g))
    (tmp_path / "layers.json").write_text(json.dumps(perceptron_layers([2, 2, 2, 2])))
    base = ["partitions", str(tmp_path / "g.json"), "--filter", "layer-respecting",
            "--layers", str(tmp_path / "layers.json"), "--count-only"]
    assert json.loads(run(base)[1]) == {"count": 4}
    assert json.loads(run(base + ["--ordered-layers"])[1]) == {"count": 3}
    assert run(base[:4] + ["--count-only"])[0] == 1


def test_membranes_stream(swap_files):
    _, a, b = swap_files
    psi = ["--psi-a", "I1,I2,I3,A,B,D", "--psi-b", "I1,I2,I3,V,W"]
    code, text = run(["membranes", a, b] + psi)
    assert code == 0 and len(text.splitlines()) == 6
    code, text = run(["membranes", a, b, "--dedupe", "--count-only"] + psi)
    assert json.loads(text) == {"count": 2}


def test_membranes_incompatible_exit_code(swap_files, capsys):
    _, a, b = swap_files
    code, _ = run(["membranes", a, b, "--psi-a", "I1,I2,I3", "--psi-b", "I1,I2,I3,V,W"])
    assert code == 3
    assert json.loads(capsys.readouterr().err)["error"] == "incompatible"


def test_crossover_with_matching_file_reproduces_worked_example(swap_files, tmp_path):
    pair, a, b = swap_files
    spec = {"mode": "explicit",
            "forward": [[list(f), list(f2)] for f, f2 in pair.membrane.forward_pairs],
            "backward": [[list(b2), list(bb)] for bb, b2 in pair.membrane.backward_pairs]}
    (tmp_path / "m.json").write_text(json.dumps(spec))
    code, text = run(["crossover", a, b, "--psi-a", "I1,I2,I3,A,B,D", "--psi-b", "I1,I2,I3,V,W",
                      "--matching", "file", "--matching-file", str(tmp_path / "m.json")])
    assert code == 0
    doc = json.loads(text)
    assert graph_from_dict(doc["child"]) == pair.child()
    assert doc["provenance"]["membrane"] == pair.membrane.to_json()


def test_crossover_seeded_is_reproducible_and_round_trips(swap_files, tmp_path):
    _, a, b = swap_files
    args = ["crossover", a, b, "--auto-contiguous", "--seed", "17", "--matching", "random"]
    first, second = run(args), run(args)
    assert first == second and first[0] == 0
    child = graph_from_dict(json.loads(first[1])["child"])
    assert to_json(graph_from_dict(graph_to_dict(child))) == to_json(child)

    code, text = run(args + ["--child-out", str(tmp_path / "child.dot"), "--format", "dot"])
    assert code == 0
    assert from_dot((tmp_path / "child.dot").read_text()) == child
    assert "provenance" in json.loads(text)


def test_crossover_flag_conflicts(swap_files):
    _, a, b = swap_files
    assert run(["crossover", a, b, "--psi-a", "I1,I2,I3"])[0] == 1
    assert run(["crossover", a, b, "--matching", "file"])[0] == 1


def test_evolve_from_config(tmp_path):
    single = make_graph(["i1", "i2"], ["o1"], [("i1", "o1"), ("i2", "o1")])
    (tmp_path / "g.json").write_text(to_json(single))
    cfg = {"population_size": 4, "generations": 3, "seed": 2,
           "population": [{"perceptron": [2, 3, 2], "copies": 2}, "g.json",
                          graph_to_dict(perceptron([2, 2, 2]))]}
    path = tmp_path / "evo.json"
    path.write_text(json.dumps(cfg))
    code, text = run(["evolve", str(path)])
    assert code == 0
    lines = [json.loads(line) for line in text.splitlines()]
    assert [line["generation"] for line in lines] == [0, 1, 2, 3]
    assert sum(lines[0]["distribution"].values()) == 4
    assert run(["evolve", str(path)]) == (code, text)
    assert run(["evolve", str(path), "--seed", "3"])[1].splitlines()[0] == text.splitlines()[0]


def test_module_entry_point(swap_files):
    _, a, _ = swap_files
    proc = subprocess.run([sys.executable, "-m", "iodgraph", "classify", a], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["informativeness"] == "fully"
    proc = subprocess.run([sys.executable, "-m", "iodgraph", "nope"], capture_output=True, text=True)
    assert proc.returncode == 1
    assert json.loads(proc.stderr)["error"] == "usage"
