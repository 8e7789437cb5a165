import json

import numpy as np
import pytest

from stronghinf import io
from stronghinf.cli import main
from stronghinf.fixtures import neutral1
from stronghinf.transfer import SweepTable


def test_system_roundtrip(tmp_path):
    sys = neutral1()
    path = tmp_path / "sys.json"
    io.save_system(sys, path)
    back = io.load_system(path)
    np.testing.assert_array_equal(back.E, sys.E)
    for a, b in zip(back.A, sys.A):
        np.testing.assert_array_equal(a, b)
    assert back.delays.taus == sys.delays.taus


def test_system_from_dict_validation():
    doc = io.system_to_dict(neutral1())
    bad = dict(doc, A=doc["A"][:2])  # one matrix short
    with pytest.raises(ValueError):
        io.system_from_dict(bad)
    bad = dict(doc, n=5)
    with pytest.raises(ValueError):
        io.system_from_dict(bad)


def test_interconnection_loading(fixtures_dir):
    path = fixtures_dir / "benchmark_h05.json"
    assert io.is_interconnection_file(path)
    assert not io.is_interconnection_file(fixtures_dir / "neutral1.json")
    doc = io.load_interconnection(path)
    assert doc.controller.order == 0
    assert doc.controller.n_params == 2
    assert doc.p is not None and doc.p.shape == (2,)
    assert doc.plant.Ad[0][0] == 0.5  # the state delay


def test_write_document_is_canonical(tmp_path):
    doc = {"b": 1.0, "a": [1, 2]}
    t1 = io.write_document(doc, tmp_path / "d.json")
    t2 = io.write_document({"a": [1, 2], "b": 1.0})
    assert t1 == t2  # key order never leaks into the output
    assert (tmp_path / "d.json").read_text() == t1


def test_sweep_csv_format(tmp_path):
    table = SweepTable(omegas=np.array([0.0, 1.0]),
                       sigmas=np.array([[1.0], [0.5]]))
    path = tmp_path / "sweep.csv"
    io.write_sweep_csv(table, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "omega,sigma1"
    assert len(lines) == 3
    assert float(lines[2].split(",")[1]) == 0.5


def test_cli_norm_neutral1(fixtures_dir, capsys, tmp_path):
    out = tmp_path / "norm.json"
    rc = main(["norm", str(fixtures_dir / "neutral1.json"), "-o", str(out)])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["value"] == pytest.approx(2.3854643744228285, abs=1e-8)
    assert doc["branch"] == "frequency-active"
    assert doc["ta_value"] == pytest.approx(16.0 / 7.0, abs=1e-8)
    assert json.loads(out.read_text()) == doc


def test_cli_norm_reruns_are_bit_identical(fixtures_dir, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["norm", str(fixtures_dir / "neutral1.json"), "-o", str(a)]) == 0
    assert main(["norm", str(fixtures_dir / "neutral1.json"), "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_interconnection_with_p_override(fixtures_dir, capsys):
    # values starting with a dash need the = form, argparse reads them as
    # flags otherwise
    rc = main(["norm", str(fixtures_dir / "benchmark_h05.json"),
               "--p=-3.5878,1.5017"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["value"] == pytest.approx(0.4100884472, abs=1e-8)


def test_cli_exit_code_unstable(fixtures_dir, capsys):
    rc = main(["norm", str(fixtures_dir / "benchmark_h10.json")])
    assert rc == 3
    err = capsys.readouterr().err
    assert "strongly stable" in err
    rc = main(["norm", str(fixtures_dir / "benchmark_h10.json"),
               "--allow-unstable"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["value"] == pytest.approx(0.3952847132, abs=1e-8)


def test_cli_exit_code_causality(tmp_path, capsys):
    doc = {
        "E": [[1.0, 0.0], [0.0, 0.0]],
        "delays": [],
        "A": [[[0.0, 1.0], [0.0, 0.0]]],
        "B": [[1.0], [1.0]],
        "C": [[1.0, 0.0]],
    }
    path = tmp_path / "noncausal.json"
    path.write_text(json.dumps(doc))
    assert main(["norm", str(path)]) == 2
    assert main(["check", str(path)]) == 2
    capsys.readouterr()


def test_cli_exit_code_bad_input(tmp_path, capsys):
    assert main(["norm", str(tmp_path / "missing.json")]) == 1
    capsys.readouterr()


def test_cli_check_report(fixtures_dir, capsys):
    rc = main(["check", str(fixtures_dir / "neutral1.json")])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["causal"] is True
    assert doc["strongly_stable"] is True
    assert doc["delta_radius"] == pytest.approx(9.0 / 16.0, abs=1e-10)


def test_cli_ta_norm(fixtures_dir, capsys):
    rc = main(["ta-norm", str(fixtures_dir / "neutral1.json")])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["value"] == pytest.approx(16.0 / 7.0, abs=1e-8)
    assert doc["converged"] is True


def test_cli_sweep_writes_csv_and_figure(fixtures_dir, tmp_path, capsys):
    csv = tmp_path / "sweep.csv"
    png = tmp_path / "sweep.png"
    rc = main(["sweep", str(fixtures_dir / "neutral1.json"),
               "--points", "50", "-k", "1",
               "-o", str(csv), "--figure", str(png)])
    assert rc == 0
    lines = csv.read_text().splitlines()
    assert lines[0] == "omega,sigma1"
    assert len(lines) == 52  # header + omega=0 + 50 grid points
    assert png.stat().st_size > 1000
    capsys.readouterr()


def test_cli_grad_check(fixtures_dir, capsys):
    rc = main(["grad-check", str(fixtures_dir / "benchmark_h05.json")])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["max_rel_error"] < 1e-5
    assert doc["branch"] == "frequency"


def test_cli_synth_single_start(fixtures_dir, tmp_path, capsys):
    out = tmp_path / "synth.json"
    png = tmp_path / "trace.png"
    rc = main(["synth", str(fixtures_dir / "benchmark_h05.json"),
               "--starts", "0", "--start=-3,1", "--max-iter", "25",
               "-o", str(out), "--figure", str(png)])
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["best_value"] <= 0.42
    assert len(doc["starts"]) == 1
    assert doc["starts"][0]["phase"] == "gradient-sampling"
    assert png.stat().st_size > 1000
    text = capsys.readouterr().out
    assert "best" in text


def test_cli_synth_no_stabilizing_start(fixtures_dir, capsys):
    rc = main(["synth", str(fixtures_dir / "benchmark_h05.json"),
               "--starts", "0", "--start", "0,0"])
    assert rc == 3
    capsys.readouterr()
