"""Seeded instance generation and Monte Carlo recovery sweeps.

Instance seeds are derived with ``numpy.random.SeedSequence`` from the
entropy tuple ``(seed, m, K, trial_index)``. The iteration factor ``c`` is
deliberately left out, so every ``c`` in a grid sees the same instances.
"""
import json
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .omp import OmpConfig, SparseSignal, check_exact_recovery, iteration_budget, omp_run, support_inclusion
from .parallel import worker_count
from .textio import fmt12

SIGNAL_KINDS = ("gaussian", "rademacher", "power-decay")
_DECAY = re.compile(r"power-decay(?:[(:]([0-9.eE+-]+)\)?)?$")
MIN_GAUSSIAN_MAGNITUDE = 1e-6


def gaussian_matrix(m, n, seed, normalize=False):
    """i.i.d. N(0, 1/m) entries; optionally rescale every column to unit norm."""
    if m < 1 or n < 1:
        raise ValueError("matrix dimensions must be positive")
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, n)) / math.sqrt(m)
    if normalize:
        A /= np.linalg.norm(A, axis=0)
    return A


def parse_signal_kind(kind, rate=None):
    """Split ``"power-decay(0.5)"`` style names into ``(kind, rate)``."""
    match = _DECAY.match(kind)
    if match:
        rate = float(match.group(1)) if match.group(1) else (0.5 if rate is None else rate)
        if not 0 < rate <= 1:
            raise ValueError(f"power-decay rate must lie in (0, 1], got {rate}")
        return "power-decay", rate
    if kind not in SIGNAL_KINDS:
        raise ValueError(f"unknown signal kind {kind!r}")
    return kind, None


def sparse_signal(n, K, kind, seed, rate=None):
    """Uniformly placed K-sparse signal with values drawn per ``kind``.

    gaussian: standard normal, redrawn while below 1e-6 in magnitude.
    rademacher: random signs. power-decay: magnitudes ``rate**j`` for
    ``j = 0..K-1`` with random signs, placed in random order.
    """
    if not 0 <= K <= n:
        raise ValueError(f"need 0 <= K <= n, got K={K}, n={n}")
    kind, rate = parse_signal_kind(kind, rate)
    rng = np.random.default_rng(seed)
    support = rng.choice(n, size=K, replace=False)
    if kind == "gaussian":
        vals = rng.standard_normal(K)
        small = np.abs(vals) < MIN_GAUSSIAN_MAGNITUDE
        while small.any():
            vals[small] = rng.standard_normal(small.sum())
            small = np.abs(vals) < MIN_GAUSSIAN_MAGNITUDE
    else:
        signs = rng.choice([-1.0, 1.0], size=K)
        vals = signs if kind == "rademacher" else signs * rate ** np.arange(K)
    return SparseSignal.from_pairs(n, zip(support, vals))


def instance_seeds(seed, m, K, trial):
    matrix_seed, signal_seed = np.random.SeedSequence([seed, m, K, trial]).spawn(2)
    return matrix_seed, signal_seed


@dataclass(frozen=True)
class EnsembleSpec:
    n: int
    m: int
    K: int
    seed: int = 0
    trials: int = 1
    signal_kind: str = "gaussian"
    matrix_normalize: bool = False

    def __post_init__(self):
        if not 0 <= self.K <= self.m <= self.n:
            raise ValueError(f"need K <= m <= n, got K={self.K}, m={self.m}, n={self.n}")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        parse_signal_kind(self.signal_kind)


def make_instance(spec, trial=0):
    """Matrix and planted signal for one trial of ``spec``."""
    ms, ss = instance_seeds(spec.seed, spec.m, spec.K, trial)
    Phi = gaussian_matrix(spec.m, spec.n, ms, spec.matrix_normalize)
    x = sparse_signal(spec.n, spec.K, spec.signal_kind, ss)
    return Phi, x


@dataclass(frozen=True)
class TrialResult:
    exact_recovery: bool
    inclusion_iteration: int  # None when T was never covered
    budget: int


def run_trial(spec, c, trial=0, instance=None):
    """Recover one seeded instance with ``min(ceil(cK), m)`` iterations.

    Success needs both the 1e-8 relative reconstruction check and ``T``
    covered by the final support.
    """
    Phi, x = make_instance(spec, trial) if instance is None else instance
    budget = min(iteration_budget(c, spec.K), spec.m)
    trace = omp_run(Phi, Phi @ x.dense(), OmpConfig(budget))
    inclusion = support_inclusion(trace, x)
    ok = inclusion is not None and check_exact_recovery(trace, x, 1e-8)
    return TrialResult(ok, inclusion, budget)


@dataclass(frozen=True)
class PhaseGrid:
    n: int
    m_list: list
    K_list: list
    c_list: list
    trials: int
    seed: int = 0
    signal_kind: str = "gaussian"
    matrix_normalize: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be positive")
        for m in self.m_list:
            for K in self.K_list:
                if not 0 <= K <= m <= self.n:
                    raise ValueError(f"cell (m={m}, K={K}) violates K <= m <= n={self.n}")
        if any(c < 1 for c in self.c_list):
            raise ValueError("every c must be at least 1")
        parse_signal_kind(self.signal_kind)

    @classmethod
    def from_dict(cls, d):
        keys = {"n", "m_list", "K_list", "c_list", "trials", "seed", "signal_kind", "matrix_normalize"}
        unknown = set(d) - keys
        if unknown:
            raise ValueError(f"unknown grid keys: {sorted(unknown)}")
        missing = {"n", "m_list", "K_list", "c_list", "trials"} - set(d)
        if missing:
            raise ValueError(f"missing grid keys: {sorted(missing)}")
        return cls(**d)

    @classmethod
    def load(cls, path):
        with open(path) as f:
            return cls.from_dict(json.load(f))

    def to_dict(self):
        return {k: getattr(self, k) for k in
                ("n", "m_list", "K_list", "c_list", "trials", "seed", "signal_kind", "matrix_normalize")}


@dataclass(frozen=True)
class CellResult:
    m: int
    K: int
    c: float
    trials: int
    successes: int
    inclusion_iters: tuple = field(default=(), repr=False)

    @property
    def rate(self):
        return self.successes / self.trials

    @property
    def mean_inclusion_iter(self):
        if not self.inclusion_iters:
            return None
        return sum(self.inclusion_iters) / len(self.inclusion_iters)

    def csv(self):
        mean = self.mean_inclusion_iter
        return f"{self.m},{self.K},{self.c:g},{self.trials},{self.successes},{fmt12(self.rate)}," + (
            "" if mean is None else fmt12(mean))


PHASE_HEADER = "m,K,c,trials,successes,rate,mean_inclusion_iter"


def _run_mk(grid, m, K):
    spec = EnsembleSpec(grid.n, m, K, grid.seed, grid.trials, grid.signal_kind, grid.matrix_normalize)
    outcomes = {c: [] for c in grid.c_list}
    for t in range(grid.trials):
        inst = make_instance(spec, t)
        for c in grid.c_list:
            outcomes[c].append(run_trial(spec, c, t, inst))
    cells = []
    for c in grid.c_list:
        res = outcomes[c]
        wins = [r for r in res if r.exact_recovery]
        cells.append(CellResult(m, K, c, grid.trials, len(wins), tuple(r.inclusion_iteration for r in wins)))
    return cells


def phase_transition(grid, workers=None):
    """Success rates for every ``(m, K, c)`` cell, ordered by ``(m, K, c)``."""
    pairs = [(m, K) for m in grid.m_list for K in grid.K_list]
    workers = worker_count() if workers is None else workers
    if workers <= 1:
        groups = [_run_mk(grid, m, K) for m, K in pairs]
    else:
        with ThreadPoolExecutor(workers) as pool:
            groups = list(pool.map(lambda p: _run_mk(grid, *p), pairs))
    return [cell for group in groups for cell in sorted(group, key=lambda r: r.c)]


def phase_csv(cells):
    return PHASE_HEADER + "\n" + "".join(cell.csv() + "\n" for cell in cells)
