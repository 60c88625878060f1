import json

import pytest
from click.testing import CliRunner

from sdhall.cli import main


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(main, list(args), catch_exceptions=False)

    return invoke


def test_cartan(run, tmp_path):
    res = run("cartan", "--quiver", "jordan")
    assert res.exit_code == 0
    assert "matrix: [[0]]" in res.output and "imaginary: {1}" in res.output
    assert "[[2,-1],[-1,2]]" in run("cartan", "--quiver", "a2").output.replace(" ", "")
    path = tmp_path / "q.json"
    path.write_text('{"vertices": ["1", "2"], "arrows": [["1", "2"], ["1", "2"]]}')
    assert "[[2,-2],[-2,2]]" in run("cartan", "--quiver", str(path)).output.replace(" ", "")


def test_malformed_quiver_file(run, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"vertices": [1, 2,')
    res = run("cartan", "--quiver", str(path))
    assert res.exit_code == 2
    assert "error:" in res.output


def test_straighten_examples(run):
    out = run("straighten", "e(1,1)*f(1,1)", "--quiver", "a2").output.strip()
    assert out == "f(1,1)*e(1,1) + 1/(1-t^2)*K(1) - 1/(1-t^2)*Kinv(1)"
    assert run("straighten", "K(1)*Kinv(1)", "--quiver", "a2").output.strip() == "1"
    assert run("straighten", "e(1,1)*f(2,1)", "--quiver", "a2").output.strip() == "f(2,1)*e(1,1)"
    out = run("straighten", "[e(1,1),f(1,1)]", "--quiver", "a2", "--classical-limit").output.strip()
    assert out.splitlines()[-1] == "limit: h(1)"


def test_straighten_errors(run):
    res = run("straighten", "e(1,1", "--quiver", "a2")
    assert res.exit_code == 2 and "error:" in res.output
    res = run("straighten", "e(1,2)", "--quiver", "a2")
    assert res.exit_code == 2


def test_euler(run):
    res = run("euler", "1,0", "0,1", "--quiver", "a2")
    assert res.exit_code == 0
    assert "-1" in res.output


def test_hall_and_limit_examples(run):
    out = run("hall", "C(S1)*Cs(S1)", "--q", "4", "--quiver", "jordan").output
    assert "[C(S1)+Cs(S1)] + 1/3*b([-1])" in out
    out = run("limit", "[C(S1),Cs(S1)]", "--quiver", "point", "--samples", "4,9,25").output
    assert out.strip().splitlines()[-1].endswith("-h(1)")


def test_verify_exit_codes(run, tmp_path):
    res = run("verify", "eikfil", "--quiver", "jordan", "--k", "1", "--l", "1", "--q", "4,9")
    assert res.exit_code == 0
    out = tmp_path / "serre.json"
    res = run("verify", "serre", "--quiver", "a2", "--q", "4", "--serre-sign", "unsigned",
              "--format", "json", "--out", str(out))
    assert res.exit_code == 1
    data = json.loads(out.read_text())
    assert data["summary"]["fail"] > 0
    assert data["config"]["serre_sign"] == "unsigned"
    res = run("verify", "eikfil", "--quiver", "jordan", "--k", "3", "--l", "1", "--q", "4", "--max-dim", "2")
    assert res.exit_code == 1 and "skipped" in res.output


def test_invalid_config(run):
    assert run("hall", "C(S1)", "--q", "6").exit_code == 2
    assert run("hall", "C(S1)", "--q", "4", "--threads", "0").exit_code == 2
    assert run("verify", "nonsense").exit_code == 2


def test_deterministic_output(run):
    args = ("verify", "quantum-relations", "--quiver", "jordan", "--q", "4", "--lmax", "2",
            "--threads", "3", "--format", "json")
    first = run(*args).output
    assert first == run(*args).output
    serial = json.loads(run(*args[:-4], "--threads", "1", "--format", "json").output)
    assert serial["cases"] == json.loads(first)["cases"]
