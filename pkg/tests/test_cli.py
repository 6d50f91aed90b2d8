import json
import subprocess
import sys

import numpy as np
import pytest

from simulbell.cli import parse_direction, render_json, run, UsageError
from simulbell.tensor_core import load_state


def run_json(capsys, *argv):
    code = run(list(argv) + ["--format", "json"])
    out = capsys.readouterr()
    assert code == 0, out.err
    return json.loads(out.out), out.out


class TestExamples:
    def test_singlet_dim(self, capsys):
        doc, _ = run_json(capsys, "singlet-dim", "--n", "4", "--spin", "1/2")
        assert doc["results"]["dimension"] == 2 and doc["results"]["agree"]

    def test_singlet_dim_table(self, capsys):
        assert run(["singlet-dim", "--n", "4", "--spin", "1/2"]) == 0
        rows = dict(line.split(None, 1) for line in capsys.readouterr().out.splitlines()[1:])
        assert rows["dimension"].strip() == "2"

    def test_uniqueness(self, capsys):
        doc, _ = run_json(capsys, "uniqueness", "--state", "psi_2_4_s1", "--dir", "0,0,1")
        row = doc["results"]["directions"][0]
        assert row["unique"] is False
        assert abs(row["score"] - 2.0) < 1e-10

    def test_term_count(self, capsys):
        doc, _ = run_json(capsys, "term-count", "--state", "ghz_mermin_4", "--dir", "0,0,1")
        assert doc["results"]["counts"][0]["terms"] == 2

    def test_chsh(self, capsys):
        doc, _ = run_json(capsys, "chsh")
        res = doc["results"]
        assert abs(res["abs_S"] - 2 * np.sqrt(2)) < 1e-9
        assert res["classical_bound"] == 2 and res["classical_max_bruteforce"] == 2
        assert abs(res["tsirelson_bound"] - 2 * np.sqrt(2)) < 1e-15
        assert set(res["E"]) == {"ab", "ab_prime", "a_prime_b", "a_prime_b_prime"}

    def test_scheme(self, capsys):
        doc, _ = run_json(capsys, "scheme", "--state", "psi_2_4_s1")
        res = doc["results"]
        assert res["counterfactual_valid"] is False
        assert [t["particles"] for t in res["terms"]] == [[1, 3], [1, 4], [2, 3], [2, 4]]
        assert all(abs(t["correlation"]) < 1e-10 for t in res["terms"])

    def test_search(self, capsys):
        doc, _ = run_json(capsys, "search", "--n", "2", "--unrestricted", "--generic", "3", "--restarts", "3", "--seed", "4")
        assert len(doc["results"]["restart_scores"]) == 3
        assert len(doc["inputs"]["directions"]) == 3


class TestDocument:
    def test_fields(self, capsys):
        doc, _ = run_json(capsys, "term-count", "--state", "bell_2_2", "--dir", "x")
        assert doc["schema"] == "1"
        assert set(doc) == {"schema", "command", "inputs", "results", "tolerances", "versions"}
        assert {"simulbell", "numpy", "python", "kernel_backend"} <= set(doc["versions"])

    @pytest.mark.parametrize("argv", [
        ["singlet-dim", "--n", "4", "--spin", "1"],
        ["uniqueness", "--state", "psi_3_3", "--dir", "z", "--dir", "0.6,0,0.8"],
        ["chsh", "--a", "0,1,0"],
        ["search", "--n", "4", "--generic", "2", "--restarts", "2", "--trace"],
    ])
    def test_round_trip(self, capsys, argv):
        doc, text = run_json(capsys, *argv)
        assert render_json(json.loads(text)) == text

    def test_seeded_output_byte_identical(self, capsys):
        argv = ["search", "--n", "4", "--unrestricted", "--generic", "2", "--restarts", "2", "--seed", "11"]
        _, first = run_json(capsys, *argv)
        _, second = run_json(capsys, *argv)
        assert first == second

    def test_output_file(self, tmp_path, capsys):
        out = tmp_path / "r.json"
        assert run(["singlet-dim", "--n", "3", "--spin", "1", "--format", "json", "--output", str(out)]) == 0
        assert capsys.readouterr().out == ""
        assert json.loads(out.read_text())["results"]["dimension"] == 1

    def test_env_default_format(self, monkeypatch, capsys):
        monkeypatch.setenv("SIMULBELL_FORMAT", "json")
        assert run(["singlet-dim", "--n", "2", "--spin", "1/2"]) == 0
        assert json.loads(capsys.readouterr().out)["results"]["dimension"] == 1


class TestStateFiles:
    def test_save_and_reload(self, tmp_path, capsys):
        path = tmp_path / "psi.json"
        assert run(["state", "--state", "psi_3_4_s1", "--save", str(path)]) == 0
        capsys.readouterr()
        psi = load_state(path)
        assert psi.num_particles == 4 and psi.local_dim == 3
        doc, _ = run_json(capsys, "uniqueness", "--state-file", str(path), "--dir", "z")
        assert doc["results"]["directions"][0]["unique"] is False

    def test_state_report(self, capsys):
        doc, _ = run_json(capsys, "state", "--state", "psi_3_3")
        res = doc["results"]
        assert res["prenormalization_norm"] == pytest.approx(1, abs=1e-12)
        assert len(res["terms"]) == 6 and res["singlet_residual"] < 1e-10


class TestErrors:
    @pytest.mark.parametrize("argv", [
        ["bogus"],
        ["uniqueness", "--state", "nope", "--dir", "z"],
        ["uniqueness", "--state", "bell_2_2", "--dir", "1,1,1"],
        ["uniqueness", "--state", "bell_2_2", "--dir", "1,0"],
        ["uniqueness", "--state", "bell_2_2", "--dir", "a,b,c"],
        ["singlet-dim", "--n", "4", "--spin", "1/3"],
        ["singlet-dim", "--n", "8", "--spin", "1"],
        ["chsh", "--state", "psi_2_4_s1"],
        ["search", "--n", "4"],
        ["uniqueness", "--state-file", "/nonexistent/file.json", "--dir", "z"],
    ])
    def test_usage_errors_exit_2(self, argv, capsys):
        assert run(argv) == 2
        assert capsys.readouterr().err

    def test_near_unit_direction_accepted(self):
        d = parse_direction("0,0,1.0000005")
        assert d.z == 1.0

    def test_far_from_unit_rejected(self):
        with pytest.raises(UsageError):
            parse_direction("0,0,1.001")

    def test_internal_error_exit_1(self, monkeypatch, capsys):
        import simulbell.cli as cli

        def boom(*a, **k):
            raise np.linalg.LinAlgError("SVD did not converge")

        monkeypatch.setattr(cli, "singlet_basis", boom)
        assert run(["singlet-dim", "--n", "2", "--spin", "1/2"]) == 1
        assert "internal error" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "simulbell", "term-count", "--state", "ghz_mermin_4", "--dir", "0,0,1", "--format", "json"],
        capture_output=True, text=True, check=True,
    )
    assert json.loads(proc.stdout)["results"]["counts"][0]["terms"] == 2
