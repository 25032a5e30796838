import json

import pytest

from ultraballs.cli import main
from ultraballs.generate import generate_random
from ultraballs.spaceio import dump_space, space_to_json


@pytest.fixture
def files(tmp_path, four, eq4):
    def write(name, obj):
        path = tmp_path / name
        path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(path)

    return {
        "four": write("four.json", space_to_json(four)),
        "four3": write("four3.json", space_to_json(four.scaled(3).relabel(list("wxyz")))),
        "eq4": write("eq4.json", space_to_json(eq4)),
        "bad": write("bad.json", {"points": list("abc"), "dist": [["0", "1", "3"], ["1", "0", "1"], ["3", "1", "0"]]}),
        "junk": write("junk.json", {"points": ["a", "b"], "dist": [["0", "x"], ["x", "0"]]}),
        "csv": write("four.csv", dump_space(four, "csv")),
        "write": write,
    }


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate(capsys, files):
    code, out, _ = run(capsys, "validate", files["four"])
    assert code == 0 and "valid" in out
    code, out, _ = run(capsys, "validate", files["bad"])
    assert code == 2 and "strong-triangle (a, b, c)" in out
    code, out, _ = run(capsys, "validate", files["bad"], "--json")
    assert code == 2
    doc = json.loads(out)
    assert doc["violations"] == [
        {"kind": "strong-triangle", "points": ["a", "b", "c"], "values": ["1", "1", "3"]}
    ]
    code, _, err = run(capsys, "validate", files["junk"])
    assert code == 3 and "unparsable-entry" in err
    code, _, err = run(capsys, "validate", "/nonexistent/x.json")
    assert code == 3


def test_tree_formats(capsys, files):
    code, out, _ = run(capsys, "tree", files["four"], "--format", "newick")
    assert code == 0 and out == "(d,(c,(a,b)1)2)3;\n"
    code, out, _ = run(capsys, "tree", files["csv"], "--format", "json")
    assert code == 0 and len(json.loads(out)["nodes"]) == 7
    code, out, _ = run(capsys, "tree", files["four"], "--format", "dot")
    assert out.startswith("digraph")
    code, _, _ = run(capsys, "tree", files["bad"])
    assert code == 2


def test_ballean(capsys, files):
    code, out, _ = run(capsys, "ballean", files["four"], "--json")
    doc = json.loads(out)
    assert code == 0 and len(doc["balls"]) == 7 and len(doc["covers"]) == 6
    assert doc["balls"][-1] == {"id": 6, "members": ["a", "b", "c", "d"], "radius": "3"}
    code, out, _ = run(capsys, "ballean", files["four"])
    assert "7 balls" in out and "6 cover arcs" in out


def test_iso_modes(capsys, files):
    code, out, _ = run(capsys, "iso", files["four"], files["four"], "--mode", "ball")
    assert code == 0
    assert json.loads(out)["witness"] == {x: x for x in "abcd"}
    code, out, _ = run(capsys, "iso", files["four"], files["four3"], "--mode", "ball", "--oracle")
    doc = json.loads(out)
    assert code == 0 and doc["oracle"] == "agree"
    assert doc["witness"] == {"a": "w", "b": "x", "c": "y", "d": "z"}
    code, out, _ = run(capsys, "iso", files["four"], files["four3"], "--mode", "isometry", "--oracle")
    assert code == 1 and "not isomorphic" in out
    code, out, _ = run(capsys, "iso", files["four"], files["eq4"], "--mode", "poset", "--oracle")
    assert code == 1 and "oracle: agree" in out
    code, out, _ = run(capsys, "iso", files["four"], files["four3"], "--mode", "poset")
    assert code == 0 and len(json.loads(out)["witness"]) == 7


def test_iso_isometry_positive(capsys, files, four):
    renamed = files["write"]("ren.json", space_to_json(four.permute([2, 3, 0, 1])))
    code, out, _ = run(capsys, "iso", files["four"], renamed, "--mode", "isometry", "--oracle")
    assert code == 0
    assert json.loads(out)["witness"] == {x: x for x in "abcd"}


def test_check_map(capsys, files):
    good = files["write"]("good.json", {"a": "x", "b": "w", "c": "y", "d": "z"})
    bad = files["write"]("bad_map.json", {"a": "w", "b": "y", "c": "x", "d": "z"})
    partial = files["write"]("partial.json", {"a": "w"})
    code, out, _ = run(capsys, "check-map", files["four"], files["four3"], good)
    assert code == 0 and "ball-preserving" in out
    code, out, _ = run(capsys, "check-map", files["four"], files["four3"], bad, "--explain")
    assert code == 1 and "image of ball {a, b} is not a ball" in out
    code, _, err = run(capsys, "check-map", files["four"], files["four3"], partial)
    assert code == 3 and "domain" in err


def test_gen(capsys, tmp_path):
    code, out, _ = run(capsys, "gen", "--seed", "4", "--n", "6")
    assert code == 0
    assert json.loads(out) == space_to_json(generate_random(4, 6))
    out_path = tmp_path / "g.csv"
    code, _, _ = run(capsys, "gen", "--seed", "4", "--n", "6", "--format", "csv", "-o", str(out_path))
    assert code == 0
    assert run(capsys, "validate", str(out_path))[0] == 0


def test_selfcheck_json_is_stable(capsys):
    code, first, _ = run(capsys, "selfcheck", "--seed", "7", "--count", "25", "--max-n", "6", "--json")
    assert code == 0
    _, second, _ = run(capsys, "selfcheck", "--seed", "7", "--count", "25", "--max-n", "6", "--json")
    assert first == second
    names = [c["name"] for c in json.loads(first)["checks"]]
    assert names == [
        "round-trip-distances",
        "ball-count-identity",
        "tree-structure",
        "hasse-tree-agreement",
        "ball-transitivity",
        "cover-criterion",
        "ballmap-oracle-agreement",
        "poset-ballmap-consistency",
    ]


def test_usage_errors_exit_nonzero(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["iso", "a.json"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["tree", "x.json", "--bogus"])
    assert exc.value.code == 2


def test_selfcheck_documented_invocation(capsys):
    code, out, _ = run(capsys, "selfcheck", "--seed", "7", "--count", "100", "--max-n", "6")
    assert code == 0
    assert out.count("PASS") == 8 and "FAIL" not in out
