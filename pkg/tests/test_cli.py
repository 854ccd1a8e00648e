import json
import os
import subprocess
import sys

import pytest

from toricderived import cli
from toricderived import ext_engine as E
from toricderived.simplicial import load_complex, validate

INPUTS = os.path.join(os.path.dirname(__file__), os.pardir, "inputs")


def inp(name):
    return os.path.join(INPUTS, name)


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_ext_affine(capsys):
    code, out, _ = run(["ext", "--I", "1", "--p", "0", "--J", "1", "--q", "1"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["formula"] == data["oracle"] == {"1": 1}


def test_ext_on_a_complex(capsys):
    code, out, _ = run(["ext", "--complex", inp("blowup.json"), "--I", "1", "--p", "0,0,0",
                        "--J", "1,3", "--q", "0,0,0"], capsys)
    assert code == 0 and json.loads(out)["oracle"] == {"0": 1}
    # not normalized: only the oracle applies
    code, out, _ = run(["ext", "--complex", inp("blowup.json"), "--p", "1,1,0", "--q", "0,0,0"], capsys)
    data = json.loads(out)
    assert code == 0 and data["formula"] is None and data["oracle"] == {"0": 1}


def test_cech(capsys):
    code, out, _ = run(["cech", "--complex", inp("triangle.json"), "--p", "1,1,1"], capsys)
    assert code == 0 and json.loads(out)["cohomology"] == {"2": 1}


def test_crosscheck_small(capsys):
    code, out, _ = run(["crosscheck", "--n", "2", "--window", "-2..2", "--jobs", "1"], capsys)
    data = json.loads(out)
    assert code == 0 and data["diff"] == [] and data["cases"] == (4 * 25) ** 2


def test_crosscheck_pool_matches_serial():
    a = cli.crosscheck(2, cli.W.parse_window("-1..1", 2), jobs=1)
    b = cli.crosscheck(2, cli.W.parse_window("-1..1", 2), jobs=2)
    assert a == b


def test_crosscheck_on_a_complex(capsys):
    code, out, _ = run(["crosscheck", "--n", "3", "--complex", inp("p2minus.json"),
                        "--window", "-1..1", "--jobs", "1"], capsys)
    assert code == 0 and json.loads(out)["pass"]


def test_collection(capsys):
    code, out, _ = run(["collection", "--complex", inp("p2minus.json"), "--window", "-1..1", "--oracle"], capsys)
    assert code == 0 and json.loads(out)["pass"]


def test_job_file(capsys):
    code, out, _ = run(["collection", "--job", inp("job_collection.json"), "--window", "-1..1"], capsys)
    data = json.loads(out)
    assert code == 0 and data["pass"]
    sigma = load_complex(inp("triangle.json"))
    assert data["objects"] == len(E.collection_objects(sigma, cli.W.parse_window("-1..1", 3)))


def test_stellar(capsys):
    code, out, _ = run(["stellar", "--complex", inp("full2.json"), "--sigma", "1,2",
                        "--window", "-1..1", "--generation"], capsys)
    data = json.loads(out)
    assert code == 0 and data["generation"] and data["image_characterization"]
    code, out, _ = run(["stellar", "--complex", inp("triangle.json"), "--script", inp("move_triangle.json"),
                        "--window", "-1..1"], capsys)
    assert code == 0 and validate(json.loads(out)["final"]).complex == load_complex(inp("triangle.json"))


def test_noncomm(capsys):
    code, out, _ = run(["noncomm", "--theta", inp("theta_const2.json")], capsys)
    data = json.loads(out)
    assert code == 0 and data["composition_table_matches_commutative"]


def test_noncomm_failure_exits_one(tmp_path, capsys):
    bad = {"n": 3, "window": "0..1", "field": "Q",
           "values": [{"i": i, "j": j, "p": [a, b, c], "value": 2 if (i, j, a, b, c) == (1, 2, 0, 0, 0) else 1}
                      for i in (1, 2) for j in (2, 3) if i < j
                      for a in (0, 1) for b in (0, 1) for c in (0, 1)]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    code, out, err = run(["noncomm", "--theta", str(path)], capsys)
    assert code == 1
    assert json.loads(out)["counterexample"] == [1, 2, 3, [0, 0, 0]]
    assert "first counterexample" in err


def test_export_quiver(capsys):
    code, out, _ = run(["export-quiver", "--complex", inp("full2.json"), "--window", "-1..1",
                        "--format", "dot"], capsys)
    assert code == 0 and out == E.export_quiver(load_complex(inp("full2.json")), "-1..1", "dot")
    code, out2, _ = run(["export-quiver", "--complex", inp("full2.json"), "--window", "-1..1",
                         "--format", "dot"], capsys)
    assert out == out2


@pytest.mark.parametrize("argv", [
    ["ext", "--I", "1", "--p", "0,0", "--J", "1", "--q", "1"],
    ["collection", "--complex", "/nonexistent.json"],
    ["collection", "--complex", inp("full2.json"), "--window", "2..1"],
    ["export-quiver", "--complex", inp("full2.json"), "--format", "csv"],
    ["noncomm"],
    ["frobnicate"],
])
def test_input_errors_exit_two(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2


def test_malformed_complex_file(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text('{"n": 2, "maximal_faces": [[1, 5]]}')
    code, _, err = run(["collection", "--complex", str(path)], capsys)
    assert code == 2 and "maximal_faces[0]" in err


def test_output_file_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert cli.main(["collection", "--complex", inp("blowup.json"), "--window", "-1..1", "-o", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "toricderived", "ext", "--I", "1,2", "--p", "0,0",
                           "--q", "1,1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["oracle"] == {"2": 1}
