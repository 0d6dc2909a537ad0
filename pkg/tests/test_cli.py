"""Command-line interface: subcommand outputs and failure exit codes."""

import json
import subprocess

import numpy as np
import pytest

from crnflow import cli
from conftest import make_config


def write_network(tmp_path, text, name="net.crn"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def run(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_failing(capsys, argv, expected_code, expected_error):
    code, out, err = run(capsys, argv)
    assert code == expected_code
    assert out == ""
    assert err.count("\n") == 1
    payload = json.loads(err)
    assert set(payload) == {"error", "message"}
    assert payload["error"] == expected_error
    return payload


class TestAnalyze:
    def test_report_contents(self, tmp_path, capsys):
        net = write_network(tmp_path, "S1 <-> S2 @ 1.0, 2.0\n")
        code, out, err = run(capsys, ["analyze", net])
        assert code == 0 and err == ""
        report = json.loads(out)
        assert report["species"] == ["S1", "S2"]
        assert report["m"] == 1 and report["Q"] == [1.0, 1.0]
        assert (report["c"], report["ell"], report["s"]) == (2, 1, 1)
        assert report["deficiency"] == 0
        assert report["weakly_reversible"] is True
        u = report["u_star"]
        assert u[0] / u[1] == pytest.approx(2.0, abs=1e-8)
        assert report["u_infinity"] == u
        assert report["residual"] < 1e-9
        assert report["boundary_faces"] == []

    def test_out_file(self, tmp_path, capsys):
        net = write_network(tmp_path, "S1 <-> S2 @ 1.0, 2.0\n")
        target = tmp_path / "report.json"
        code, out, _ = run(capsys, ["analyze", net, "--out", str(target)])
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["m"] == 1

    def test_boundary_face_reported(self, tmp_path, capsys):
        net = write_network(tmp_path, "A + B <-> 2 B @ 1, 1\n")
        code, out, _ = run(capsys, ["analyze", net])
        assert code == 0
        faces = json.loads(out)["boundary_faces"]
        feasible = [f for f in faces if f["mass_feasible"]]
        assert len(feasible) == 1
        assert feasible[0]["zero_species"] == ["B"]


class TestEquilibrium:
    def test_prescribed_mass(self, tmp_path, capsys):
        net = write_network(tmp_path, "S1 <-> S2 @ 1.0, 2.0\n")
        code, out, _ = run(capsys, ["equilibrium", net, "--mass", "3.0"])
        assert code == 0
        report = json.loads(out)
        np.testing.assert_allclose(report["u_infinity"], [2.0, 1.0], atol=1e-8)
        np.testing.assert_allclose(report["mass"], [3.0], atol=1e-10)

    def test_default_mass_is_the_found_equilibrium(self, tmp_path, capsys):
        net = write_network(tmp_path, "S1 <-> S2 @ 1.0, 2.0\n")
        code, out, _ = run(capsys, ["equilibrium", net])
        report = json.loads(out)
        assert code == 0
        assert report["mass"] == [pytest.approx(sum(report["u_infinity"]))]

    def test_wrong_mass_count(self, tmp_path, capsys):
        net = write_network(tmp_path, "S1 <-> S2 @ 1.0, 2.0\n")
        run_failing(
            capsys, ["equilibrium", net, "--mass", "1,2"], 1, "ConfigError"
        )


class TestSimulate:
    def test_outputs_and_determinism(self, tmp_path, capsys):
        cfg = make_config(tmp_path, "S1 <-> S2 @ 1.0, 2.0\n", t_end=0.01)
        cfg_path = str(tmp_path / "run.cfg")
        outputs = []
        for sub in ("first", "second"):
            out_dir = tmp_path / sub
            code, out, err = run(capsys, ["simulate", cfg_path, "--out", str(out_dir)])
            assert code == 0 and err == ""
            assert out.splitlines() == [
                str(out_dir / "trajectory.csv"),
                str(out_dir / "summary.json"),
            ]
            outputs.append((out_dir / "trajectory.csv").read_bytes())
            summary = json.loads((out_dir / "summary.json").read_text())
            assert summary["entropy_audit"] == 0.0
        assert outputs[0] == outputs[1]

    def test_seed_override_changes_nothing_observable(self, tmp_path, capsys):
        cfg = make_config(tmp_path, "S1 <-> S2 @ 1.0, 2.0\n", t_end=0.01)
        cfg_path = str(tmp_path / "run.cfg")
        code, _, _ = run(capsys, ["simulate", cfg_path, "--out", str(tmp_path / "a"), "--seed", "5"])
        assert code == 0
        a = (tmp_path / "a" / "trajectory.csv").read_text()
        assert a.startswith("t,E,")


class TestCheck:
    def test_gate_report(self, tmp_path, capsys):
        make_config(tmp_path, "S1 <-> S2 @ 1.0, 2.0\n", t_end=0.01)
        code, out, _ = run(capsys, ["check", str(tmp_path / "run.cfg")])
        assert code == 0
        report = json.loads(out)
        assert report["condition"] == "detailed_balance"
        assert report["detailed_balanced"] is True
        assert report["complex_balanced"] is True
        assert report["deficiency"] == 0
        assert report["weak_cross_alpha"] == pytest.approx(0.2)
        np.testing.assert_allclose(report["mass"], [2.0])
        assert report["boundary_faces"] == []


class TestFailureCodes:
    def test_parse_error(self, tmp_path, capsys):
        net = write_network(tmp_path, "S1 -> @ 1\n")
        payload = run_failing(capsys, ["analyze", net], 1, "NetworkParseError")
        assert "line 1" in payload["message"]

    def test_missing_file(self, tmp_path, capsys):
        run_failing(
            capsys, ["analyze", str(tmp_path / "absent.crn")], 1, "FileNotFoundError"
        )

    def test_no_complex_balance(self, tmp_path, capsys):
        net = write_network(tmp_path, "A -> B @ 1\n")
        run_failing(capsys, ["analyze", net], 2, "NoComplexBalance")

    def test_unreachable_mass(self, tmp_path, capsys):
        net = write_network(tmp_path, "S1 <-> S2 @ 1.0, 2.0\n")
        run_failing(
            capsys, ["equilibrium", net, "--mass", "-1.0"], 2, "MassNotReachable"
        )

    def test_unstructured_diffusion(self, tmp_path, capsys):
        make_config(tmp_path, "S1 <-> S2 @ 1.0, 2.0\n", t_end=0.01, a="0.1 4 0 0.1")
        run_failing(
            capsys, ["check", str(tmp_path / "run.cfg")], 3, "NeitherConditionHolds"
        )

    def test_solver_failure(self, tmp_path, capsys):
        make_config(
            tmp_path,
            "S1 <-> S2 @ 1.0, 2.0\n",
            t_end=0.01,
            solver=("newton_tol = 1e-14", "newton_max_iter = 1"),
        )
        run_failing(
            capsys,
            ["simulate", str(tmp_path / "run.cfg"), "--out", str(tmp_path / "out")],
            4,
            "StepFailed",
        )
        assert not (tmp_path / "out" / "trajectory.csv").exists()


class TestEntryPoint:
    def test_installed_script(self, tmp_path):
        net = write_network(tmp_path, "S1 <-> S2 @ 1.0, 2.0\n")
        proc = subprocess.run(
            ["crnflow", "analyze", net], capture_output=True, text=True
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["m"] == 1
