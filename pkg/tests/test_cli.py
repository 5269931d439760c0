import numpy as np
import pytest

from ompck.cli import main
from ompck.harness import gaussian_matrix, sparse_signal
from ompck.textio import write_matrix, write_vector


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def instance(tmp_path):
    Phi = gaussian_matrix(20, 40, 1)
    x = sparse_signal(40, 3, "gaussian", 2)
    write_matrix(tmp_path / "A.txt", Phi)
    write_vector(tmp_path / "x.txt", x.dense())
    return tmp_path / "A.txt", tmp_path / "x.txt", x


@pytest.mark.parametrize("delta,value", [("1/3", 15.3688), ("0", 2.77258872224), ("0.2", None)])
def test_bound(capsys, delta, value):
    code, out, _ = run(capsys, "bound", "--delta", delta)
    assert code == 0
    if value is not None:
        assert float(out) == pytest.approx(value, abs=1e-4)


def test_bound_with_comparison(capsys):
    code, out, _ = run(capsys, "bound", "--delta", "1/3", "--zhang")
    a, b = map(float, out.split())
    assert code == 0 and a < b and b == pytest.approx(29.511, abs=1e-3)


def test_curve(capsys, tmp_path):
    code, out, _ = run(capsys, "curve", "--delta-max", "0.5", "--step", "0.01")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "delta,c_proposed,c_zhang" and len(lines) == 52
    for line in lines[1:]:
        _, p, z = map(float, line.split(","))
        assert p < z
    dest = tmp_path / "curve.csv"
    code, out, _ = run(capsys, "curve", "--delta-max", "0.5", "--step", "0.01", "--out", str(dest))
    assert out == "" and dest.read_text() == "\n".join(lines) + "\n"


def test_recover(capsys, instance):
    A, xp, x = instance
    code, out, _ = run(capsys, "recover", "--matrix", str(A), "--signal", str(xp), "--c", "2.8")
    assert code == 0
    rows = [line.split(",") for line in out.splitlines()[1:] if not line.startswith("#")]
    assert set(x.support) <= {int(r[1]) for r in rows}
    assert out.splitlines()[-1].startswith("# termination=")
    assert run(capsys, "recover", "--matrix", str(A), "--signal", str(xp))[1] == out


def test_ric(capsys, instance):
    A, _, _ = instance
    code, out, _ = run(capsys, "ric", "--matrix", str(A), "--kmax", "2")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "k,delta,kind" and len(lines) >= 3
    assert all(line.endswith(",exact") for line in lines[-2:])


def test_ric_budget_exceeded(capsys, tmp_path):
    write_matrix(tmp_path / "big.txt", gaussian_matrix(30, 60, 0))
    code, _, err = run(capsys, "ric", "--matrix", str(tmp_path / "big.txt"), "--kmax", "12")
    assert code == 2 and "computational error" in err


@pytest.mark.parametrize("argv", [
    [],
    ["bound"],
    ["bound", "--delta", "1.2"],
    ["bound", "--delta", "abc"],
    ["curve", "--delta-max", "0.5", "--step", "-1"],
    ["verify", "--n", "10", "--m", "8", "--K", "9"],
    ["phase", "--config", "/nonexistent/grid.json"],
    ["recover", "--matrix", "/nonexistent/A.txt", "--signal", "/nonexistent/x.txt"],
])
def test_usage_errors_exit_1(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1 and err


def test_malformed_matrix_exit_1(capsys, tmp_path):
    (tmp_path / "A.txt").write_text("2 2\n1 2\n")
    code, _, err = run(capsys, "ric", "--matrix", str(tmp_path / "A.txt"), "--kmax", "1")
    assert code == 1 and "A.txt:3:" in err


def test_phase(capsys, tmp_path):
    cfg = tmp_path / "grid.json"
    cfg.write_text('{"n": 40, "m_list": [12], "K_list": [2], "c_list": [1.0, 2.8], "trials": 5, "seed": 1}')
    dest = tmp_path / "phase.csv"
    code, out, _ = run(capsys, "phase", "--config", str(cfg), "--out", str(dest))
    assert code == 0 and out == ""
    first = dest.read_text()
    assert first.splitlines()[0] == "m,K,c,trials,successes,rate,mean_inclusion_iter"
    run(capsys, "phase", "--config", str(cfg), "--out", str(dest))
    assert dest.read_text() == first
    assert sorted(p.name for p in tmp_path.iterdir()) == ["grid.json", "phase.csv"]


def test_verify_clean_instances(capsys, tmp_path):
    dest = tmp_path / "report.csv"
    code, out, _ = run(capsys, "verify", "--n", "12", "--m", "200", "--K", "2", "--trials", "2",
                       "--seed", "5", "--out", str(dest))
    assert code == 0 and out == ""
    text = dest.read_text()
    assert text.startswith("check,k,l,tau,l_prime,verdict,margin\n# trial=0\n")
    assert "# trial=1" in text and ",fail," not in text


def test_verify_exit_3_on_violation(capsys, monkeypatch):
    import ompck.cli as cli
    monkeypatch.setattr(cli, "any_violation", lambda rows: True)
    code, _, _ = run(capsys, "verify", "--n", "8", "--m", "8", "--K", "1", "--trials", "1")
    assert code == 3
