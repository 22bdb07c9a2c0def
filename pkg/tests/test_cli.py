import json
import subprocess
import sys

import pytest

from opdbim import doc as docmod
from opdbim.cli import main
from opdbim.operads import com_operad, assoc_operad

BASE_DOC = {
    "version": "1",
    "windows": {"arity_bound": 3, "length_bound": 2},
    "sorts": {"X": ["*"]},
    "symseqs": {
        "F": {
            "dom": ["*"],
            "cod": ["*"],
            "cells": [
                {"word": ["*"], "out": "*", "labels": ["a"], "action": {}},
                {"word": ["*", "*"], "out": "*", "labels": ["b"], "action": {"0": [["b", "b"]]}},
            ],
        },
        "I": {
            "dom": ["*"],
            "cod": ["*"],
            "cells": [{"word": ["*"], "out": "*", "labels": ["i"], "action": {}}],
        },
    },
    "operads": {
        "C": {"builtin": "com", "arity_bound": 3},
        "A": {"builtin": "assoc", "arity_bound": 3},
        "U1": {"builtin": "unit", "sorts": ["x"], "arity_bound": 2},
        "U2": {"builtin": "unit", "sorts": ["y"], "arity_bound": 2},
    },
    "families": {"T": {"*": ["t0", "t1"]}},
}


def write_doc(tmp_path, data, name="doc.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, out


def test_check_ok(tmp_path, capsys):
    path = write_doc(tmp_path, BASE_DOC)
    code, out = run_cli(["check", path], capsys)
    assert code == 0
    assert "operad C: ok" in out and "symseq F: ok" in out


def test_check_reports_law_failure(tmp_path, capsys):
    bad = json.loads(json.dumps(BASE_DOC))
    # a two-label binary cell whose action is fine but whose explicit operad
    # multiplication breaks associativity
    com = com_operad(2)
    ser = docmod.serialize_operad(com)
    twisted = json.loads(json.dumps(ser))
    # swap every ternary multiplication output to break associativity: com has
    # singleton cells, so instead corrupt eta to break the unit law
    twisted["eta"] = [["*", 0]]
    assoc = assoc_operad(2)
    ser2 = docmod.serialize_operad(assoc)
    bad_ops = json.loads(docmod.dumps(ser2))
    for entry in bad_ops["mu"]:
        if len(entry["word"]) == 2 and len(entry["rep"]["mid"]) == 2:
            entry["to"] = {"t": [entry["to"]["t"][1], entry["to"]["t"][0]]}
    bad["operads"] = {"Broken": bad_ops}
    path = write_doc(tmp_path, bad)
    code, out = run_cli(["check", path], capsys)
    assert code == 1
    assert "operad Broken: FAIL" in out


def test_check_empty_document(tmp_path, capsys):
    path = write_doc(tmp_path, {"version": "1"})
    code, out = run_cli(["check", path], capsys)
    assert code == 0
    assert out == ""


def test_bad_version_is_input_error(tmp_path, capsys):
    path = write_doc(tmp_path, {"version": "999"})
    code, _out = run_cli(["check", path], capsys)
    assert code == 2


def test_series_identity_row(tmp_path, capsys):
    path = write_doc(tmp_path, BASE_DOC)
    code, out = run_cli(["series", path, "I", "2"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[2] == "1\t1\t1\t1"


def test_count_algebras(tmp_path, capsys):
    path = write_doc(tmp_path, BASE_DOC)
    code, out = run_cli(["count", path, "algebras", "A", "2"], capsys)
    assert code == 0 and out.strip() == "algebras\t8"


def test_count_budget_exceeded(tmp_path, capsys):
    path = write_doc(tmp_path, BASE_DOC)
    code, _out = run_cli(["count", path, "algebras", "A", "40", "--budget", "5"], capsys)
    assert code == 3


def test_name_resolution_error(tmp_path, capsys):
    path = write_doc(tmp_path, BASE_DOC)
    code, _out = run_cli(["compose", path, "F", "NOPE"], capsys)
    assert code == 2


def test_compose_eval_product_exponential(tmp_path, capsys):
    path = write_doc(tmp_path, BASE_DOC)
    code, out = run_cli(["compose", path, "F", "F", "--arity-bound", "4"], capsys)
    assert code == 0
    parsed = json.loads(out)
    assert [len(parsed["symseqs"]["FoF"]["cells"][i]["labels"]) for i in range(4)] == [1, 2, 3, 3]

    code, out = run_cli(["eval", path, "F", "T"], capsys)
    assert code == 0
    assert json.loads(out)["carrier"][0]["size"] == 5

    code, out = run_cli(["count", path, "bimodules", "U1", "U2",
                         "--cells", '[{"word": ["x", "x"], "out": "y", "size": 2}]'], capsys)
    assert code == 0 and out.strip() == "bimodules\t2"

    code, out = run_cli(["product", path, "C", "C"], capsys)
    assert code == 0
    assert "Cx" + "C" in json.loads(out)["operads"]

    code, out = run_cli(["exponential", path, "U1", "U2", "--length-bound", "2",
                         "--arity-bound", "2"], capsys)
    assert code == 0
    exp = json.loads(out)["operads"]["U2^U1"]
    assert len(exp["carrier"]["cells"]) == 3


def test_round_trip_operad():
    com = com_operad(2)
    ser = docmod.serialize_operad(com)
    back = docmod.parse_explicit_operad(json.loads(docmod.dumps(ser)))
    assert back.carrier.cells.keys() == com.carrier.cells.keys()
    for key in com.carrier.cells:
        assert back.carrier.cells[key].labels == com.carrier.cells[key].labels
    for key, reps in com.comp2.reps.items():
        for idx in range(len(reps)):
            assert back.mu.at(*key, idx) == com.mu.at(*key, idx)
    assert docmod.dumps(docmod.serialize_operad(back)) == docmod.dumps(ser)


def test_round_trip_symseq():
    from opdbim.samples import rand_symseq
    import random

    f = rand_symseq(random.Random(5), sorts=("a", "b"), max_arity=3, max_labels=3, n_cells=3)
    ser = docmod.serialize_symseq(f)
    back = docmod.parse_symseq(json.loads(docmod.dumps(ser)))
    assert back.cells.keys() == f.cells.keys()
    for key, cell in f.cells.items():
        assert set(back.cells[key].labels) == set(cell.labels)
        assert back.cells[key].gen_maps == cell.gen_maps


def permuted_copy(data):
    """Reverse the insertion order of every object in the JSON tree."""
    if isinstance(data, dict):
        return {k: permuted_copy(data[k]) for k in reversed(list(data))}
    if isinstance(data, list):
        return [permuted_copy(v) for v in data]
    return data


@pytest.mark.parametrize(
    "argv",
    [
        ["series", "{doc}", "F", "3"],
        ["compose", "{doc}", "F", "F", "--arity-bound", "3"],
        ["eval", "{doc}", "F", "T"],
        ["count", "{doc}", "algebras", "C", "2"],
        ["product", "{doc}", "C", "C"],
        ["exponential", "{doc}", "U1", "U2", "--length-bound", "2", "--arity-bound", "2"],
    ],
)
def test_cli_determinism(tmp_path, capsys, argv):
    path1 = write_doc(tmp_path, BASE_DOC, "a.json")
    path2 = write_doc(tmp_path, permuted_copy(BASE_DOC), "b.json")
    runs = []
    for path in (path1, path1, path2):
        code, out = run_cli([a.format(doc=path) for a in argv], capsys)
        assert code == 0
        runs.append(out.encode("utf-8"))
    assert runs[0] == runs[1] == runs[2]


def test_count_module_maps(tmp_path, capsys):
    data = json.loads(json.dumps(BASE_DOC))
    data["symseqs"]["G"] = {
        "dom": ["x"],
        "cod": ["y"],
        "cells": [
            {"word": ["x", "x"], "out": "y", "labels": ["g0", "g1"], "action": {}}
        ],
    }
    data["bimodules"] = {
        "M": {"left": "U2", "right": "U1", "carrier": "G",
              "lambda": "induced", "rho": "induced"}
    }
    path = write_doc(tmp_path, data)
    code, out = run_cli(["check", path], capsys)
    assert code == 0 and "bimodule M: ok" in out
    code, out = run_cli(["count", path, "module-maps", "M", "M"], capsys)
    assert code == 0 and out.strip() == "module-maps\t4"
