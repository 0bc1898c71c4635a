from __future__ import annotations

import json

import numpy as np
import pytest

from permclass.cli import main, parse_permutation
from permclass.core import Permutation
from permclass.textfmt import parse_circuit
from permclass.unitary import load_matrix_csv


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def synth(tmp_path, capsys):
    def make(kind, controls=None):
        path = tmp_path / f"{kind}{controls or ''}.qc"
        argv = ["synth", "--kind", kind, "--out", str(path)]
        if controls:
            argv += ["--controls", str(controls)]
        assert main(argv) == 0
        capsys.readouterr()
        return path
    return make


def test_permutation_specs(tmp_path):
    assert parse_permutation("mct:2") == Permutation.mct(3)
    assert parse_permutation("identity:2") == Permutation.identity(2)
    assert parse_permutation("[1, 0]") == Permutation((1, 0))
    f = tmp_path / "p.json"
    f.write_text("[0, 2, 1, 3]")
    assert parse_permutation(str(f)).mapping == (0, 2, 1, 3)


def test_classify_margolus_and_toffoli(capsys, synth):
    code, out, _ = run(capsys, "classify", str(synth("margolus")), "--perm", "mct:2")
    assert code == 0 and json.loads(out)["minimal"] == ["R-D-NW"]
    code, out, _ = run(capsys, "classify", str(synth("toffoli6")), "--perm", "mct:2")
    report = json.loads(out)
    assert report["minimal"] == ["S-D-NW"] and report["atol"] == 1e-9


def test_classify_expect_exit_codes(capsys, synth):
    dwe = str(synth("dwe", 3))
    assert run(capsys, "classify", dwe, "--perm", "mct:3", "--expect", "S-C-NW")[0] == 1
    assert run(capsys, "classify", dwe, "--perm", "mct:3", "--expect", "D-WE")[0] == 0


def test_classify_dimension_mismatch(capsys, synth):
    code, _, err = run(capsys, "classify", str(synth("toffoli6")), "--perm", "mct:3")
    assert code == 2 and "error" in err


def test_classify_dump_and_plot(capsys, synth, tmp_path):
    csv, png = tmp_path / "u.csv", tmp_path / "lattice.png"
    code, out, _ = run(capsys, "classify", str(synth("rccx")), "--perm", "mct:2",
                       "--dump-unitary", str(csv), "--plot", str(png))
    assert code == 0 and png.stat().st_size > 0
    assert len(csv.read_text().splitlines()) == 8
    assert json.loads(out)["figure"] == str(png)


def test_transform_pipeline(capsys, synth, tmp_path):
    out_qc, rep, png = tmp_path / "g.qc", tmp_path / "r.json", tmp_path / "t.png"
    code, _, _ = run(capsys, "transform", "--passes", "t4,t3,t1", "--in", str(synth("barenco", 5)),
                     "--out", str(out_qc), "--report", str(rep), "--perm", "mct:5",
                     "--assume", "S-C-NW", "--expect", "C-WE", "--plot", str(png))
    assert code == 0
    report = json.loads(rep.read_text())
    assert report["guaranteed_class"] == "C-WE" and report["guarantee_holds"]
    assert [s["pass"] for s in report["stages"]] == [
        "T4_clean_control_simplify", "T3_wasting_elision", "T1_boundary_relative"]
    assert len(parse_circuit(out_qc.read_text())) == 4
    assert all(p.endswith(".png") for p in report["figures"]) and len(report["figures"]) == 2


def test_transform_precondition_failure(capsys, synth):
    code, _, err = run(capsys, "transform", "--passes", "t3,t5", "--in", str(synth("barenco", 3)),
                       "--perm", "mct:3")
    assert code == 2 and "stage 1" in err


def test_synth_validation(capsys):
    assert run(capsys, "synth", "--kind", "barenco")[0] == 2
    assert run(capsys, "synth", "--kind", "rc3x", "--controls", "2")[0] == 2
    assert run(capsys, "synth", "--kind", "barenco", "--controls", "2")[0] == 2
    code, out, _ = run(capsys, "synth", "--kind", "vchain-dirty", "--controls", "4")
    assert code == 0 and out.startswith("qubits main=5 aux=1")


def test_stats(capsys, synth):
    code, out, _ = run(capsys, "stats", str(synth("vchain-clean", 5)))
    d = json.loads(out)
    assert code == 0 and d["expanded"]["h_count"] == 14 and d["as_written"]["gate_count"] == 5


def test_factor(capsys, tmp_path):
    cx = tmp_path / "cx.qc"
    cx.write_text("qubits main=2 aux=0\ncx 0 1\n")
    code, out, _ = run(capsys, "factor", str(cx), "--split", "1")
    d = json.loads(out)
    assert code == 0 and d["separable"] is False and d["sigma_ratio"] > 0.5
    ht = tmp_path / "ht.qc"
    ht.write_text("qubits main=2 aux=0\nh 0\nt 1\n")
    d = json.loads(run(capsys, "factor", str(ht), "--split", "1")[1])
    assert d["separable"] and d["residual"] < 1e-10
    ident = tmp_path / "id.qc"
    ident.write_text("qubits main=3 aux=0\n")
    d = json.loads(run(capsys, "factor", str(ident), "--split", "2")[1])
    assert d["separable"]
    assert np.allclose(load_matrix_csv(d["V"]), np.eye(4)) and np.allclose(load_matrix_csv(d["W"]), np.eye(2))


def test_bad_input_file(capsys, tmp_path):
    bad = tmp_path / "bad.qc"
    bad.write_text("qubits main=2 aux=0\nccx 0 1\n")
    code, _, err = run(capsys, "stats", str(bad))
    assert code == 2 and "line 2" in err
    assert run(capsys, "classify")[0] == 2
