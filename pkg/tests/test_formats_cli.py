import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from fsetmag import corpus
from fsetmag.cli import determinism_probe, infer_kind, main, run_captured
from fsetmag.fcat import FCat
from fsetmag.formats import ParseError, canonical, dumps, from_canonical, parse_input, parse_twists

GOLDEN = Path(__file__).parent / "golden"
COMMANDS = json.loads((GOLDEN / "commands.json").read_text())


def fails_at(text, kind, line=None, field=None):
    with pytest.raises(ParseError) as err:
        parse_input(text, kind)
    assert (err.value.line, err.value.field) == (line, field)
    return str(err.value)


def test_graph_diagnostics():
    assert "field 3" in fails_at("a -- b --\n", "graph", 1, "3")
    fails_at("a -- b\nc -> d\n", "graph", 2)
    fails_at("# nothing\n\na -- a\n", "graph", 3)
    fails_at("x y -- z\n", "graph", 1, "1")
    fails_at("# only a comment\n", "graph")


def test_metric_diagnostics():
    message = fails_at("0 1\n1 zero\n", "metric", 2, "2")
    assert message.startswith("line 2, field 2: ")
    fails_at("0 1/0 / 1 0", "metric", 1, "2")
    fails_at("0 1 2\n1 0\n2 1 0\n", "metric", 2)
    fails_at("labels: a b c\n0 1\n1 0\n", "metric", None, "labels")


def test_metric_text_forms():
    c = parse_input("labels: a b c  # three points\n0 1 inf\ninf 0 inf\n2 1 0\n", "metric")
    assert c.objects == ("a", "b", "c") and c.distance(0, 2) is None and c.distance(2, 0) == 2
    inline = parse_input("0 1/2 / 1/2 0", "metric")
    assert str(inline.distance(0, 1)) == "1/2"


def test_poset_diagnostics():
    fails_at("a < b\nrank a\n", "poset", 2)
    fails_at("a < < b\n", "poset", 1, "2")
    with pytest.raises(ParseError, match="unknown element"):
        parse_input("a < b\nrank z 1\n", "poset")


def test_twist_diagnostics():
    base = corpus.category("K3")
    assert parse_twists("2 0 : 1 0\n", base) == {(2, 0): (1, 0)}
    for text, field in [("2 0 1 0\n", None), ("2 : 1 0\n", "1"), ("2 7 : 1 0\n", "1"), ("2 0 : a b\n", "2")]:
        with pytest.raises(ParseError) as err:
            parse_twists(text, base)
        assert err.value.field == field


def test_json_diagnostics():
    with pytest.raises(ParseError, match="invalid JSON"):
        parse_input('{"kind": "graph",\n "vertices": [}', "graph")
    with pytest.raises(ParseError, match="expected kind"):
        parse_input('{"kind": "poset"}', "graph")
    with pytest.raises(ParseError) as err:
        parse_input('{"kind": "graph", "edges": []}', "graph")
    assert err.value.field == "vertices"
    with pytest.raises(ParseError, match="top-level"):
        from_canonical([1], "graph")


def test_text_only_kinds():
    with pytest.raises(ParseError, match="must be JSON"):
        parse_input("a -- b", "group")
    with pytest.raises(ParseError, match="unknown input kind"):
        parse_input("a -- b", "hypergraph")


@pytest.mark.parametrize("name", corpus.names())
def test_corpus_round_trips_through_canonical_json(name):
    kind, text = corpus.BUILTIN[name]
    first = canonical(parse_input(text, kind), kind)
    again = canonical(from_canonical(json.loads(dumps(first)), kind), kind)
    assert again == first


def test_category_round_trip():
    c = corpus.group_category("Z5_cayley")
    data = canonical(c, "category")
    assert FCat.from_json(json.loads(dumps(data))) == c
    data["morphisms"][1]["degree"] = [1, 0]
    with pytest.raises(ParseError):
        from_canonical(data, "category")


def test_kind_inference():
    assert infer_kind("a -> b") == "digraph"
    assert infer_kind("a -- b  # x -> y") == "graph"
    assert infer_kind("a < b") == "poset"
    assert infer_kind("0 1\n1 0") == "metric"
    assert infer_kind('{"kind": "group"}') == "group"
    with pytest.raises(ParseError):
        infer_kind('{"vertices": []}')


@pytest.mark.parametrize("name", sorted(COMMANDS))
def test_golden_outputs(name):
    code, out = run_captured(COMMANDS[name])
    assert code == 0
    assert out == (GOLDEN / f"{name}.out").read_text()


def test_file_input(tmp_path, capsys):
    path = tmp_path / "square.txt"
    path.write_text("0 -- 1 -- 2 -- 3 -- 0\n")
    assert main(["mag", str(path), "--cutoff", "2"]) == 0
    assert capsys.readouterr().out == "4 - 8q + 12q^2\n"


def test_exit_codes(capsys):
    assert main(["mag", "0 1/0 / 1 0"]) == 1
    assert "line 1, field 2" in capsys.readouterr().err
    assert main(["mag", "--corpus", "degenerate2"]) == 1
    assert main(["mag", "--corpus", "Z5_cayley", "--one-object", "--strategy", "constant_term_lu"]) == 0
    assert main(["hochschild-check", "--corpus", "K3", "--l", "2", "--guardrail-cells", "10"]) == 2
    assert "guardrail" in capsys.readouterr().err
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 1
    with pytest.raises(SystemExit) as err:
        main(["homology", "--corpus", "K2"])
    assert err.value.code == 1


def test_homology_options(capsys):
    code, out = run_captured(["homology", "--corpus", "K3", "--l", "2", "--n", "2", "--basepoint", "0",
                              "--endpoint", "0", "--format", "json"])
    assert code == 0 and json.loads(out)["rows"] == [{"n": 2, "betti": 2, "torsion": []}]
    assert main(["homology", "--corpus", "K3", "--l", "1", "--endpoint", "0"]) == 1
    assert main(["homology", "--corpus", "K3", "--l", "1", "--basepoint", "nowhere"]) == 1


def test_fibration_commands(tmp_path):
    base, fiber = tmp_path / "base.txt", tmp_path / "fiber.txt"
    base.write_text("0 -- 1 -- 2 -- 0\n")
    fiber.write_text("a -- b\n")
    twists = tmp_path / "twists.txt"
    twists.write_text("2 0 : 1 0\n")
    code, out = run_captured(["fib", "product-check", "--base", str(base), "--fiber", str(fiber),
                              "--twists", str(twists), "--cutoff", "4", "--format", "json"])
    assert code == 0 and json.loads(out)["equal"] is True
    code, out = run_captured(["fib", "build", "--base", str(base), "--fiber", str(fiber),
                              "--twists", str(twists), "--format", "json"])
    built = json.loads(out)
    assert code == 0 and len(built["total"]["labels"]) == 6
    action = tmp_path / "action.json"
    action.write_text(json.dumps(built["action"]))
    code, out = run_captured(["fib", "product-check", "--action", str(action), "--cutoff", "3", "--format", "json"])
    assert code == 0 and json.loads(out)["equal"] is True


def test_fibration_check_command(tmp_path):
    hexagon, triangle = tmp_path / "hex.txt", tmp_path / "tri.txt"
    hexagon.write_text("0 -- 1 -- 2 -- 3 -- 4 -- 5 -- 0\n")
    triangle.write_text("0 -- 1 -- 2 -- 0\n")
    mapping = tmp_path / "map.txt"
    mapping.write_text("".join(f"{i} {i % 3}\n" for i in range(6)))
    code, out = run_captured(["fib", "check", "--total", str(hexagon), "--base", str(triangle),
                              "--map", str(mapping), "--format", "json"])
    assert code == 0 and json.loads(out)["fibration"] is False
    mapping.write_text("0 0\n")
    assert main(["fib", "check", "--total", str(hexagon), "--base", str(triangle), "--map", str(mapping)]) == 1


def test_in_process_determinism():
    assert determinism_probe()


def test_output_is_identical_across_processes():
    argv = [sys.executable, "-m", "fsetmag", "weighting", "--corpus", "K3xK2", "--format", "json"]
    outputs = set()
    for seed in ("0", "1", "12345"):
        env = dict(os.environ, PYTHONHASHSEED=seed)
        outputs.add(subprocess.run(argv, capture_output=True, env=env, check=True).stdout)
    assert len(outputs) == 1
