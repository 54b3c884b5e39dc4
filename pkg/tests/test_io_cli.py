import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from fdrep import io
from fdrep.ar import knit
from fdrep.cli import main, run
from fdrep.decompose import isomorphic
from fdrep.modules import simple_module
from fdrep.sequences import is_perfect
from fdrep.zoo import by_name, kronecker_chain1

DATA = Path(io.__file__).parent / "data"


@pytest.mark.parametrize("name", ["A2", "A3rad2", "Kronecker", "F3[x]/(x^3)", "Nak2"])
def test_algebra_roundtrip(name):
    A = by_name(name)
    doc = json.loads(io.dumps(io.algebra_to_json(A)))
    B = io.algebra_from_json(doc)
    assert B.dim == A.dim and B.p == A.p
    assert np.array_equal(B.const % B.p, A.const % A.p)


@pytest.mark.parametrize("form", ["action", "rep"])
def test_module_roundtrip(form):
    A = by_name("Kronecker")
    for x in knit(A, 4).vertices:
        doc = json.loads(io.dumps(io.module_to_json(x, form=form)))
        y = io.module_from_json(doc, A)
        assert isomorphic(x, y)


def test_sequence_roundtrip():
    s = kronecker_chain1()
    doc = json.loads(io.dumps(io.sequence_to_json(s)))
    t = io.sequence_from_json(doc)
    assert t.dims() == s.dims() and is_perfect(t)
    assert np.array_equal(t.f.matrix, s.f.matrix)


def test_bundled_files_load():
    s = io.sequence_from_json(io.load_json(DATA / "kronecker-eta0.json"), base=str(DATA))
    assert s.dims() == ((2, 3), (3, 3), (1, 0))
    for f in ("id.json", "morita-row.json", "morita-column.json", "tensor-k-a2.json"):
        io.bimodule_from_json(io.load_json(DATA / f), base=str(DATA))


def test_format_errors():
    with pytest.raises(io.FormatError):
        io.algebra_from_json({"nonsense": 1})
    with pytest.raises(io.FormatError):
        io.module_from_json({"action": [[[1]]]}, by_name("A2"))


def _json(argv):
    code, text = run(argv)
    return code, json.loads(text) if text.strip().startswith("{") else text


def test_cli_algebra_and_hom():
    code, d = _json(["algebra", "info", "--algebra", "zoo:Kronecker"])
    assert code == 0 and d["dim"] == 4 and d["dominant_dimension_ge_1"] is False
    code, d = _json(["hom", "--algebra", "zoo:Kronecker", "--source", "projective:2", "--target", "projective:1"])
    assert code == 0 and d["dim"] == 2 and d["stable_dim"] == 0
    assert d["meta"]["command"] == "hom"


def test_cli_ar_and_nodes():
    code, d = _json(["ar", "nodes", "--algebra", str(DATA / "a3rss.json")])
    assert code == 0 and d["nodes"] == ["S_2"]
    code, d = _json(["ar", "knit", "--algebra", "zoo:A3", "--bound", "10"])
    assert code == 0 and d["complete"] and len(d["vertices"]) == 6


def test_cli_eta_chain():
    code, d = _json(["eta", "run", "--seq", str(DATA / "kronecker-eta0.json"), "--bound", "2"])
    assert code == 0  # BoundExceeded is a completed result, not a violation
    assert d["status"] == "BoundExceeded"
    assert d["summary"][2]["X"] == [[[4, 5], 3]]


def test_cli_exit_codes(tmp_path):
    code, _ = run(["gproj", "--algebra", "zoo:A2", "--module", "simple:1"])
    assert code == 1
    code, _ = run(["gproj", "--algebra", "zoo:F2[x]/(x^2)", "--module", "simple:1"])
    assert code == 0
    code, _ = run(["perfect", "check", "--seq", str(tmp_path / "missing.json")])
    assert code == 2
    code, _ = run(["no-such-command"])
    assert code == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _ = run(["perfect", "check", "--seq", str(bad)])
    assert code == 2


def test_cli_morita():
    code, d = _json(["morita", "check", "--m", str(DATA / "id.json"), "--n", str(DATA / "id.json")])
    assert code == 0 and d["ok"]
    code, d = _json(["morita", "check", "--m", str(DATA / "tensor-k-a2.json")])
    assert code == 1 and not d["ok"]


def test_cli_table_output():
    code, text = run(["algebra", "info", "--algebra", "zoo:A2", "--table"])
    assert code == 0 and "dim: 3" in text


def test_cli_seed_reproducible():
    a = run(["ar", "seq", "--algebra", "zoo:A3", "--module", "simple:2", "--seed", "5", "--matrices"])
    b = run(["ar", "seq", "--algebra", "zoo:A3", "--module", "simple:2", "--seed", "5", "--matrices"])
    assert a == b and a[0] == 0


def test_replay(tmp_path, capsys):
    log = tmp_path / "session.jsonl"
    assert main(["algebra", "info", "--algebra", "zoo:A2", "--log", str(log)]) == 0
    assert main(["ar", "nodes", "--algebra", "zoo:A3rad2", "--log", str(log)]) == 0
    capsys.readouterr()
    code, text = run(["replay", str(log)])
    assert code == 0 and json.loads(text)["steps"] == 2
    lines = log.read_text().splitlines()
    e = json.loads(lines[1])
    e["sha256"] = "0" * 64
    lines[1] = json.dumps(e)
    log.write_text("\n".join(lines) + "\n")
    code, text = run(["replay", str(log)])
    assert code == 1 and json.loads(text)["first_divergence"] == 1


def test_console_script_out_file(tmp_path):
    out = tmp_path / "o.json"
    r = subprocess.run(
        [sys.executable, "-m", "fdrep.cli", "algebra", "info", "--algebra", "zoo:A2", "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 0
    assert json.loads(out.read_text())["dim"] == 3
