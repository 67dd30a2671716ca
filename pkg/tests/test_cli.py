import json
import subprocess
import sys

import pytest

from lpminkowski import cli
from lpminkowski.errors import DomainError
from lpminkowski.formats import read_csv


@pytest.fixture(autouse=True)
def one_thread(monkeypatch):
    monkeypatch.setenv(cli.THREADS_ENV, "1")


def run(tmp_path, *args):
    return cli.main([*args, "--out", str(tmp_path)])


def test_solve_writes_report_and_solution(tmp_path):
    assert run(tmp_path, "solve", "--p", "-0.5", "--f", "1+0.2cos2t", "--n", "64", "--svg") == 0
    report = json.loads((tmp_path / "solve_report.json").read_text())
    assert report["status"] == "converged" and report["meta"]["grid_n"] == 64
    meta, cols, rows = read_csv(tmp_path / "solution.csv")
    assert cols == ["theta", "u", "du", "d2u", "residual"] and len(rows) == 64
    assert meta["p"] == -0.5 and meta["version"] == cli.__version__
    assert (tmp_path / "solution.svg").read_text().startswith("<svg")


def test_solve_failure_writes_partial_report(tmp_path):
    code = run(tmp_path, "solve", "--p", "-2", "--f", "2+cos2t", "--n", "32", "--steps", "8")
    assert code == cli.EXIT_FAILURE
    report = json.loads((tmp_path / "solve_report.json").read_text())
    assert report["error"] == "PathFailure" and 0.5 < report["t_reached"] < 1


def test_solve_newton_at_p_one(tmp_path):
    assert run(tmp_path, "solve", "--p", "1", "--f", "const:1", "--n", "32",
               "--init", "1+0.3cos t") == 0


def test_count(tmp_path):
    assert run(tmp_path, "count", "--p", "-8", "--grid", "200") == 0
    data = json.loads((tmp_path / "count.json").read_text())
    assert data["count"] == 2 and data["roots"][0]["kappa"] == 3


def test_energy_profile_and_domain_error(tmp_path):
    assert run(tmp_path, "energy-profile", "--p", "1", "--points", "5", "--svg") == 0
    _, cols, rows = read_csv(tmp_path / "energy_profile.csv")
    assert cols[2] == "H" and len(rows) == 5
    assert run(tmp_path, "energy-profile", "--p", "2") == cli.EXIT_USAGE


def test_kernel_scan(tmp_path):
    assert run(tmp_path, "kernel-scan", "--p", "1.5", "--samples", "20") == 0
    assert json.loads((tmp_path / "kernel_scan.json").read_text())["sign_constant"] is True


def test_obstruct_exit_codes(tmp_path):
    assert run(tmp_path, "obstruct", "--p", "-3", "--probes", "5", "--n", "128") == 0
    assert json.loads((tmp_path / "obstruct.json").read_text())["certified"] is True
    assert run(tmp_path, "obstruct", "--p", "-1") == cli.EXIT_USAGE
    # f = 1 gives a sign-changing kernel: a numerical, not an invariant, failure
    assert run(tmp_path, "obstruct", "--p", "-3", "--f", "const:1") == cli.EXIT_FAILURE


def test_construct_sweep(tmp_path):
    assert run(tmp_path, "construct", "--p", "1", "--eps-sweep", "10..12", "--svg") == 0
    _, cols, rows = read_csv(tmp_path / "construct.csv")
    assert cols[0] == "eps" and [r[0] for r in rows] == [0.1, 1 / 11, 1 / 12]
    assert run(tmp_path, "construct", "--p", "1", "--eps-sweep", "12..10") == cli.EXIT_USAGE


def test_verify_with_custom_fixtures(tmp_path):
    fx = tmp_path / "fx.json"
    fx.write_text(json.dumps({"checks": [
        {"name": "bad", "kind": "conjugate_max", "p": 1.0, "m": 0.5, "expected": 2.0, "tol": 1e-9}]}))
    assert run(tmp_path, "verify", "--fixtures", str(fx)) == cli.EXIT_INVARIANT
    assert json.loads((tmp_path / "verify.json").read_text())["results"][0]["passed"] is False


def test_usage_errors(tmp_path):
    assert cli.main([]) == cli.EXIT_USAGE
    assert run(tmp_path, "solve", "--p", "0.5", "--n", "15") == cli.EXIT_USAGE
    assert run(tmp_path, "solve", "--p", "0.5", "--f", "2+tan t") == cli.EXIT_USAGE


def test_thread_count_validation(monkeypatch):
    monkeypatch.setenv(cli.THREADS_ENV, "0")
    with pytest.raises(DomainError):
        cli.thread_count()
    monkeypatch.setenv(cli.THREADS_ENV, "3")
    assert cli.thread_count() == 3


def test_console_script_version():
    out = subprocess.run([sys.executable, "-m", "lpminkowski.cli", "--version"],
                         capture_output=True, text=True, check=True)
    assert cli.__version__ in out.stdout
