import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ompck.harness import (EnsembleSpec, PhaseGrid, gaussian_matrix, make_instance, parse_signal_kind, phase_csv,
                           phase_transition, run_trial, sparse_signal)


def test_gaussian_matrix_deterministic():
    assert np.array_equal(gaussian_matrix(5, 9, 3), gaussian_matrix(5, 9, 3))
    assert not np.array_equal(gaussian_matrix(5, 9, 3), gaussian_matrix(5, 9, 4))


def test_gaussian_matrix_moments():
    m = 100
    A = gaussian_matrix(m, 200, 0)
    assert abs(A.mean()) < 0.01
    assert abs(A.var() / (1 / m) - 1) < 0.1


@pytest.mark.parametrize("m", [50, 80, 200])
def test_column_norms_near_one(m):
    norms = np.linalg.norm(gaussian_matrix(m, 300, m), axis=0)
    assert np.all((norms > 0.5) & (norms < 1.5))


def test_normalized_columns():
    A = gaussian_matrix(7, 20, 1, normalize=True)
    assert np.allclose(np.linalg.norm(A, axis=0), 1)


def test_signal_kinds():
    assert sparse_signal(10, 0, "gaussian", 1).K == 0
    r = sparse_signal(40, 6, "rademacher", 2)
    assert r.K == 6 and set(np.abs(r.values)) == {1.0}
    p = sparse_signal(40, 5, "power-decay(0.5)", 3)
    assert sorted(np.abs(p.values), reverse=True) == [1, 0.5, 0.25, 0.125, 0.0625]
    assert parse_signal_kind("power-decay:0.25") == ("power-decay", 0.25)
    for bad in ("uniform", "power-decay(2)"):
        with pytest.raises(ValueError):
            parse_signal_kind(bad)
    with pytest.raises(ValueError):
        sparse_signal(3, 4, "gaussian", 0)


@settings(max_examples=50)
@given(st.integers(0, 2**31), st.integers(1, 60), st.data())
def test_sparse_signal_support(seed, n, data):
    K = data.draw(st.integers(0, n))
    x = sparse_signal(n, K, "gaussian", seed)
    assert x.K == K and len(set(x.support)) == K
    assert all(0 <= i < n for i in x.support)
    assert np.all(np.abs(x.values) >= 1e-6)


def test_spec_validation():
    with pytest.raises(ValueError):
        EnsembleSpec(n=10, m=12, K=2)
    with pytest.raises(ValueError):
        EnsembleSpec(n=10, m=5, K=6)
    with pytest.raises(ValueError):
        EnsembleSpec(n=10, m=5, K=2, signal_kind="cauchy")


def test_run_trial_examples():
    assert run_trial(EnsembleSpec(20, 10, 0), 2.8).exact_recovery
    res = run_trial(EnsembleSpec(256, 64, 4, seed=1), 2.8)
    assert res.budget == 12
    assert res.exact_recovery and res.inclusion_iteration <= 12
    assert run_trial(EnsembleSpec(30, 5, 5), 2.8).budget == 5


def test_orthonormal_instance_recovers_in_K_steps():
    spec = EnsembleSpec(8, 8, 3)
    Q, _ = np.linalg.qr(np.random.default_rng(0).standard_normal((8, 8)))
    _, x = make_instance(spec)
    res = run_trial(spec, 1.0, instance=(Q, x))
    assert res.exact_recovery and res.inclusion_iteration == 3


def test_single_trial_grid_reproduces_run_trial():
    grid = PhaseGrid(n=60, m_list=[20], K_list=[3], c_list=[1.0, 2.8], trials=1, seed=9)
    cells = phase_transition(grid, workers=1)
    spec = EnsembleSpec(60, 20, 3, seed=9)
    for cell in cells:
        assert cell.successes == int(run_trial(spec, cell.c).exact_recovery)


def test_paired_cells_monotone_in_c():
    grid = PhaseGrid(n=64, m_list=[16, 24], K_list=[3, 6], c_list=[1.0, 2.8, 4.0], trials=30, seed=4)
    cells = phase_transition(grid, workers=1)
    by_mk = {}
    for cell in cells:
        by_mk.setdefault((cell.m, cell.K), []).append(cell.successes)
    for counts in by_mk.values():
        assert counts == sorted(counts)


def test_grid_config_round_trip(tmp_path):
    grid = PhaseGrid(n=40, m_list=[10, 20], K_list=[2], c_list=[1.0, 2.8], trials=5, seed=3)
    p = tmp_path / "grid.json"
    p.write_text(json.dumps(grid.to_dict()))
    assert PhaseGrid.load(p) == grid
    with pytest.raises(ValueError):
        PhaseGrid.from_dict({**grid.to_dict(), "color": "red"})
    with pytest.raises(ValueError):
        PhaseGrid.from_dict({"n": 40})
    with pytest.raises(ValueError):
        PhaseGrid(n=40, m_list=[10], K_list=[2], c_list=[0.5], trials=5)


def test_phase_csv_reproducible_and_thread_independent():
    grid = PhaseGrid(n=50, m_list=[15, 25], K_list=[2, 4], c_list=[1.0, 2.8], trials=10, seed=2)
    a = phase_csv(phase_transition(grid, workers=1))
    b = phase_csv(phase_transition(grid, workers=3))
    assert a == b
    lines = a.splitlines()
    assert lines[0] == "m,K,c,trials,successes,rate,mean_inclusion_iter"
    assert len(lines) == 9
