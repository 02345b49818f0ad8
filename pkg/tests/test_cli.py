import json

import numpy as np
import pytest

from melnikov_lab import cli
from melnikov_lab.perturbation import PerturbationSpec


@pytest.fixture
def spec_file(tmp_path):
    path = tmp_path / "spec.json"
    spec = PerturbationSpec.random(3, np.random.default_rng(11))
    path.write_text(spec.to_json())
    return path


def run(capsys, *argv):
    code = cli.run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_csv(capsys, spec_file):
    code, out, err = run(capsys, "melnikov", "eval", "--spec", spec_file, "--grid", "0.05:0.95:0.05")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "r,M1,N1" and len(lines) == 20
    assert lines[1].startswith("0.05,")
    manifest = json.loads(err.strip().splitlines()[-1])
    assert manifest["command"] == "melnikov eval" and len(manifest["input_digest"]) == 64


def test_eval_methods_agree(capsys, spec_file):
    _, closed_out, _ = run(capsys, "melnikov", "eval", "--spec", spec_file, "--json")
    _, quad_out, _ = run(capsys, "melnikov", "eval", "--spec", spec_file, "--json", "--method", "quad")
    a, b = json.loads(closed_out), json.loads(quad_out)
    assert np.allclose(a["M1"], b["M1"], atol=1e-9) and np.allclose(a["N1"], b["N1"], atol=1e-9)


def test_output_is_deterministic(capsys, spec_file):
    outs = [run(capsys, "melnikov", "zeros", "--spec", spec_file, "--json")[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_quadcheck(capsys, spec_file):
    code, out, _ = run(capsys, "quadcheck", "--spec", spec_file, "--tol", "1e-9")
    assert code == 0 and "max discrepancy" in out


def test_quadcheck_random(capsys, monkeypatch):
    monkeypatch.setenv("MELNIKOV_LAB_THREADS", "2")
    code, out, _ = run(capsys, "quadcheck", "--random", 3, "--seed", 5, "--json")
    assert code == 0 and json.loads(out)["pass"]


def test_quadcheck_impossible_tolerance(capsys, spec_file):
    code, _, _ = run(capsys, "quadcheck", "--spec", spec_file, "--tol", "1e-30")
    assert code == 2


def test_realize_then_verify(capsys, tmp_path):
    out_path = tmp_path / "out.json"
    code, _, _ = run(capsys, "realize", "--i", 4, "--j", 0, "--m", 1, "--out", out_path)
    assert code == 0 and (tmp_path / "out.json.manifest.json").exists()
    code, out, _ = run(capsys, "verify", "--spec", out_path)
    assert code == 0 and out.strip() == "[[4,0]] certified"


def test_design_writes_spec(capsys, tmp_path):
    out_path = tmp_path / "d.json"
    code, out, _ = run(capsys, "design", "--m", 1, "--f", "0.2,0.4", "--g", "0.3,0.6", "--out", out_path,
                       "--json")
    assert code == 0
    assert json.loads(out)["params"]["alpha"] == 1.0
    code, out, _ = run(capsys, "verify", "--spec", out_path, "--json")
    doc = json.loads(out)
    assert doc["M1"]["zeros"][:2] == pytest.approx([0.2, 0.4], abs=1e-10)


def test_verify_uncertified(capsys, tmp_path):
    # r M1 = r (r - 1/2)^2: a double zero cannot be certified.
    path = tmp_path / "double.json"
    from melnikov_lab.perturbation import MelnikovParams, params_to_perturbation
    spec = params_to_perturbation(MelnikovParams(a=0.25, b=-1, c=1, kappa=0, rho=0, d=0), 3)
    path.write_text(spec.to_json())
    code, out, _ = run(capsys, "verify", "--spec", path)
    assert code == 2 and "uncertified" in out


def test_sturm(capsys):
    code, out, _ = run(capsys, "sturm", "--poly", "1/48,-31/48,5/12,1", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["count"] == 2


def test_ect_check(capsys):
    code, out, _ = run(capsys, "ect-check", "--m", 1, "--draws", 5, "--wronskian-points", 5, "--json")
    doc = json.loads(out)
    assert code == 0 and doc["max_certified"] <= doc["ceiling"] == 4


def test_simulate(capsys, tmp_path):
    from melnikov_lab.perturbation import MelnikovParams, params_to_perturbation
    path = tmp_path / "single.json"
    path.write_text(params_to_perturbation(MelnikovParams(a=1, b=-0.5, c=-1), 0).to_json())
    traj = tmp_path / "traj.csv"
    code, out, _ = run(capsys, "simulate", "--spec", path, "--seeds", 16, "--trajectory", traj,
                       "--t-max", 3)
    rows = out.strip().splitlines()
    assert code == 0 and rows[0] == "section_point,radius_in_w,predicted_r0,deviation,stable"
    assert len(rows) == 2 and traj.read_text().startswith("t,re_z,im_z")


def test_audit(capsys):
    code, out, _ = run(capsys, "audit-remarks")
    assert code == 0 and "-8 x tabulated" in out


@pytest.mark.parametrize("argv", [["bogus"], ["melnikov"], ["verify"], ["sturm", "--poly", "1", "--nope"],
                                  ["melnikov", "eval", "--spec", "x.json", "--grid", "0.1:0.2"]])
def test_usage_errors(capsys, argv):
    assert cli.run(argv) == 64


def test_domain_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"m": 1}')
    assert run(capsys, "verify", "--spec", bad)[0] == 1
    assert run(capsys, "verify", "--spec", tmp_path / "missing.json")[0] == 1
    assert run(capsys, "realize", "--i", 9, "--j", 0, "--m", 1)[0] == 1


def test_grid_parser():
    assert cli.parse_grid("0.05:0.95:0.05").size == 19
    with pytest.raises(cli.UsageError):
        cli.parse_grid("0.5:0.1:0.1")
