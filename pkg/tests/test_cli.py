import json
import subprocess
import sys

import numpy as np
import pytest

from honest_noise import cli, reproduce, zoo
from honest_noise.channels import kraus_to_chi
from honest_noise.honesty import certify_channel
from honest_noise.twirl import pauli_twirl


def write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def files(tmp_path):
    rot = zoo.reference_channels()["3,0"]
    return {
        "rot": write(tmp_path / "rot.json", {"preset": "rotation-axis", "params": {"theta": 0.02, "k": 0}}),
        "dep": write(tmp_path / "dep.json", {"preset": "depolarizing", "params": {"p": 0.01}}),
        "ident": write(tmp_path / "id.json", {"kraus": [cli.encode_matrix(np.eye(2))]}),
        "twirl": write(tmp_path / "tw.json", cli.channel_document(pauli_twirl(rot))),
        "deph": write(tmp_path / "deph.json", {"preset": "dephasing-z", "params": {"p": float(np.sin(0.01))}}),
        "2q": write(tmp_path / "xx.json", {"preset": "collective-xx", "params": {"theta": 0.02}}),
        "dir": tmp_path,
    }


# -- channel documents ----------------------------------------------------------------

def test_round_trip_document():
    ch = zoo.reference_channels()["1"]
    back = cli.parse_channel_document(json.loads(json.dumps(cli.channel_document(ch, "L1"))))
    assert np.allclose(kraus_to_chi(back).chi, kraus_to_chi(ch).chi, atol=1e-15)
    assert back.label == "L1"
    assert cli.channel_digest(back) == cli.channel_digest(ch)


@pytest.mark.parametrize("doc, msg", [
    ([], "object"),
    ({}, "exactly one"),
    ({"kraus": [], "preset": "depolarizing"}, "exactly one"),
    ({"kraus": []}, "non-empty"),
    ({"kraus": [[[1, 0], [0, 0]]]}, "square matrix"),
    ({"kraus": [[[[1, 0], [0, 0]], [[0, 0], [0.5, 0]]]]}, "trace preserving"),
    ({"kraus": [cli.encode_matrix(np.eye(2))], "n_qubits": 2}, "n_qubits"),
    ({"kraus": [cli.encode_matrix(np.eye(3))]}, "power of two|qubit"),
    ({"preset": "nope"}, "nope"),
    ({"preset": "depolarizing", "params": {"p": 2}}, "outside"),
    ({"preset": "depolarizing", "params": 3}, "params"),
])
def test_document_errors(doc, msg):
    with pytest.raises(cli.ParseError, match=msg):
        cli.parse_channel_document(doc)


def test_malformed_json_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "preset": "depolarizing",\n  "params": {"p": 0.01,}\n}\n')
    assert cli.main(["twirl", str(bad)]) == cli.EXIT_PARSE
    err = capsys.readouterr().err
    assert "line 3" in err and "column" in err


def test_missing_file(tmp_path):
    assert cli.main(["twirl", str(tmp_path / "missing.json")]) == cli.EXIT_PARSE


def test_usage_error_is_parse_failure(capsys):
    assert cli.main(["diamond"]) == cli.EXIT_PARSE
    assert cli.main(["no-such-command"]) == cli.EXIT_PARSE


def test_custom_mixing_set(tmp_path):
    path = write(tmp_path / "set.json", {"unitaries": [
        {"label": "I", "matrix": cli.encode_matrix(np.eye(2))},
        {"label": "Z", "matrix": cli.encode_matrix(np.diag([1, -1]))}]})
    ops, labels = cli.load_mixing_set(path)
    assert labels == ["I", "Z"] and np.allclose(ops[1], np.diag([1, -1]))
    with pytest.raises(cli.ParseError):
        cli.load_mixing_set(str(tmp_path / "nothing.json"))
    with pytest.raises(cli.ParseError):
        cli.load_mixing_set(write(tmp_path / "bad.json", {"ops": []}))


# -- commands -------------------------------------------------------------------------

def test_diamond_command(files, capsys):
    assert cli.main(["diamond", files["rot"], files["rot"]]) == cli.EXIT_OK
    assert capsys.readouterr().out.strip() == "0.000000"
    assert cli.main(["diamond", files["rot"], files["ident"]]) == cli.EXIT_OK
    out = capsys.readouterr()
    assert out.out.strip() == "0.020000"
    assert "duality_gap" in out.err and "lower_bound" in out.err
    assert cli.main(["diamond", files["rot"], files["2q"]]) == cli.EXIT_PARSE


def test_diamond_against_twirl(files, capsys):
    assert cli.main(["diamond", files["rot"], files["twirl"]]) == cli.EXIT_OK
    # the true value is 2 sin(0.01); see the Table IV note in the README
    assert float(capsys.readouterr().out) == pytest.approx(2 * np.sin(0.01), abs=1e-6)


def test_honesty_check_exit_codes(files, tmp_path):
    out = tmp_path / "h.json"
    assert cli.main(["honesty-check", files["twirl"], files["rot"], "--samples", "2000", "--out", str(out)]) \
        == cli.EXIT_DISHONEST
    rep = json.loads(out.read_text())
    assert rep["honest"] is False and rep["certificate"]["verdict"] == "fail"
    assert rep["empirical"]["max_violation"] > 1e-6 and "witness" in rep["empirical"]
    assert cli.main(["honesty-check", files["deph"], files["rot"], "--samples", "2000", "--out", str(out)]) \
        == cli.EXIT_OK
    assert cli.main(["honesty-check", files["rot"], files["rot"], "--samples", "500", "--out", str(out)]) \
        == cli.EXIT_OK
    assert json.loads(out.read_text())["empirical"]["max_violation"] == pytest.approx(0, abs=1e-12)


def test_twirl_command(files, tmp_path):
    out = tmp_path / "t.json"
    assert cli.main(["twirl", files["rot"], "--out", str(out)]) == cli.EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["chi_diag"][3] == pytest.approx(np.sin(0.01) ** 2)
    assert cli.parse_channel_document(doc).dim == 2


def test_approximate_report_round_trip(files, tmp_path):
    out = tmp_path / "r.json"
    args = ["approximate", files["rot"], "--restarts", "4", "--seed", "3", "--out", str(out)]
    assert cli.main(args) == cli.EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["certificate"]["verdict"] == "pass"
    assert rep["options"]["seed"] == 3 and rep["options"]["restarts"] == 4
    assert rep["diamond_dist"] == pytest.approx(0.0281, abs=1e-4)
    assert rep["tool_version"] and rep["input"]["digest"]
    back = cli.parse_channel_document(rep["approximation"])
    assert certify_channel(back, zoo.reference_channels()["3,0"]).verdict == rep["certificate"]["verdict"]
    # re-running with the recorded options reproduces the numbers
    out2 = tmp_path / "r2.json"
    assert cli.main(args[:-1] + [str(out2)]) == cli.EXIT_OK
    rep2 = json.loads(out2.read_text())
    assert np.allclose(rep2["chi_diag"], rep["chi_diag"], atol=1e-8)
    assert rep2["diamond_dist"] == pytest.approx(rep["diamond_dist"], abs=1e-8)
    drop = ("timestamp",)
    assert {k: v for k, v in rep.items() if k not in drop} == {k: v for k, v in rep2.items() if k not in drop}


def test_approximate_depolarizing_is_exact(files, tmp_path):
    out = tmp_path / "r.json"
    assert cli.main(["approximate", files["dep"], "--restarts", "2", "--out", str(out)]) == cli.EXIT_OK
    assert json.loads(out.read_text())["diamond_dist"] <= 1e-6


def test_approximate_infeasible(files, tmp_path):
    path = write(tmp_path / "set.json", {"unitaries": [
        {"label": "I", "matrix": cli.encode_matrix(np.eye(2))},
        {"label": "X", "matrix": cli.encode_matrix(np.array([[0, 1], [1, 0]]))}]})
    assert cli.main(["approximate", files["rot"], "--set", path, "--restarts", "2",
                     "--out", str(tmp_path / "o.json")]) == cli.EXIT_INFEASIBLE


def test_solver_failure_exit(files, monkeypatch):
    def boom(*a, **k):
        raise cli.SolverFailure("forced")
    monkeypatch.setattr(cli, "diamond_distance_full", boom)
    assert cli.main(["diamond", files["rot"], files["ident"]]) == cli.EXIT_SOLVER


def test_reproduce_table_2(tmp_path, capsys):
    out = tmp_path / "t2.csv"
    assert cli.main(["reproduce-tables", "--table", "2", "--out", str(out)]) == cli.EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# table,row,quantity")
    assert len(lines) == 4 and all(",pass," in line for line in lines[1:])
    assert '"3,j"' in out.read_text()
    assert "0.9999" in capsys.readouterr().out


def test_reproduce_tables_mismatch_exit(tmp_path):
    # a zero tolerance cannot be met by four-decimal reference values
    assert cli.main(["reproduce-tables", "--table", "2", "--tol", "0"]) == cli.EXIT_MISMATCH


def test_fig1_data_files_are_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["fig1-data", "--j", "0", "--out", str(a)]) == cli.EXIT_OK
    reproduce.fig1_channels.cache_clear()
    assert cli.main(["fig1-data", "--j", "0", "--out", str(b)]) == cli.EXIT_OK
    for name in ("fig1_j0_xz_plane.csv", "fig1_j0_distinguishability.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    xz = (a / "fig1_j0_xz_plane.csv").read_text().splitlines()
    assert xz[0] == "# phi,x_in,z_in,x_P,y_P,z_P,x_D,y_D,z_D,x_t,y_t,z_t"
    assert len(xz) == 361
    data = np.loadtxt(a / "fig1_j0_distinguishability.csv", delimiter=",")
    assert data.shape == (181, 4)
    assert np.allclose(data[0, 1:], 0, atol=1e-7)
    mid = data[90]
    assert mid[0] == pytest.approx(np.pi / 2) and mid[2] == pytest.approx(2 * np.sqrt(0.1), abs=1e-10)


def test_console_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "honest_noise.cli", "diamond", files["rot"], files["rot"]],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "0.000000"
    proc = subprocess.run([sys.executable, "-m", "honest_noise.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0
