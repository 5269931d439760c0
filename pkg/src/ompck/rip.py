"""Restricted isometry constants and the iteration-bound formulas for OMP.

All logarithms are natural.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .linalg import as_matrix
from .parallel import worker_count
from .textio import fmt12

EXACT = "exact"
UPPER = "upper-bound"

ENUMERATION_BUDGET = 2_000_000
C_MIN = 4 * math.log(2)
_CHUNK = 40_000


class EnumerationBudgetError(RuntimeError):
    """Exact RIC would need more subsets than the configured budget."""


class MissingOrderError(ValueError):
    """A RIC order required by a formula is absent from the profile."""


def _chunks(n, k, size):
    it = combinations(range(n), k)
    while True:
        block = np.fromiter((i for c in _take(it, size) for i in c), dtype=np.intp)
        if block.size == 0:
            return
        yield block.reshape(-1, k)


def _take(it, size):
    for _, item in zip(range(size), it):
        yield item


def _chunk_deviation(G, idx):
    sub = G[idx[:, :, None], idx[:, None, :]]
    ev = np.linalg.eigvalsh(sub)
    return max(ev[:, -1].max() - 1.0, 1.0 - ev[:, 0].min())


def exact_ric(Phi, k, budget=ENUMERATION_BUDGET, workers=None):
    """Order-``k`` restricted isometry constant by enumerating every support.

    ``delta_k = max_S max(lambda_max(G_S) - 1, 1 - lambda_min(G_S))`` over all
    ``|S| = k``, where ``G_S`` is the Gram matrix of the selected columns.
    """
    Phi = as_matrix(Phi)
    m, n = Phi.shape
    if not 1 <= k <= min(m, n):
        raise ValueError(f"order {k} outside 1..{min(m, n)}")
    count = math.comb(n, k)
    if count > budget:
        raise EnumerationBudgetError(
            f"C({n},{k}) = {count} supports exceeds the enumeration budget {budget}; "
            "use an upper-bound profile instead")
    G = Phi.T @ Phi
    if k == 1:
        d = np.diag(G)
        return float(max(d.max() - 1.0, 1.0 - d.min()))
    workers = worker_count() if workers is None else workers
    blocks = _chunks(n, k, _CHUNK)
    if workers <= 1 or count <= _CHUNK:
        devs = [_chunk_deviation(G, b) for b in blocks]
    else:
        with ThreadPoolExecutor(workers) as pool:
            devs = list(pool.map(lambda b: _chunk_deviation(G, b), blocks))
    return float(max(devs))


@dataclass
class RicProfile:
    """Map from order ``k`` to ``delta_k`` with an exact/upper-bound flag.

    Order 0 is always available with value 0.
    """

    m: int = None
    n: int = None
    values: dict = field(default_factory=dict)
    kinds: dict = field(default_factory=dict)

    def __post_init__(self):
        for k, v in self.values.items():
            if k < 1 or not math.isfinite(v) or v < 0:
                raise ValueError(f"invalid RIC entry delta_{k} = {v}")
            self.kinds.setdefault(k, EXACT)
        orders = sorted(self.values)
        for a, b in zip(orders, orders[1:]):
            if self.values[a] > self.values[b] + 1e-12:
                raise ValueError(f"RIC not nondecreasing: delta_{a} > delta_{b}")

    @classmethod
    def constant(cls, delta, k_max, kind=UPPER):
        """Matrix-free profile with ``delta_k = delta`` for every ``k <= k_max``."""
        return cls(values={k: float(delta) for k in range(1, k_max + 1)},
                   kinds={k: kind for k in range(1, k_max + 1)})

    @property
    def k_max(self):
        return max(self.values, default=0)

    def has(self, k):
        return k == 0 or k in self.values

    def delta(self, k):
        if k == 0:
            return 0.0
        try:
            return self.values[k]
        except KeyError:
            raise MissingOrderError(f"profile has no entry for order {k}") from None

    def inflated(self, amount):
        """Upper-bound profile with every entry raised by ``amount``."""
        return RicProfile(self.m, self.n, {k: v + amount for k, v in self.values.items()},
                          {k: UPPER for k in self.values})

    def to_csv(self):
        lines = ["k,delta,kind"]
        lines += [f"{k},{fmt12(self.values[k])},{self.kinds[k]}" for k in sorted(self.values)]
        return "\n".join(lines) + "\n"


def ric_profile(Phi, k_max, budget=ENUMERATION_BUDGET, workers=None):
    Phi = as_matrix(Phi)
    m, n = Phi.shape
    vals = [exact_ric(Phi, k, budget, workers) for k in range(1, k_max + 1)]
    # Exact values are already nondecreasing; the running max only absorbs rounding.
    vals = np.maximum.accumulate(vals) if vals else vals
    return RicProfile(m, n, {k: float(v) for k, v in zip(range(1, k_max + 1), vals)})


def _check_delta(delta):
    if not 0 <= delta < 1:
        raise ValueError(f"delta must lie in [0, 1), got {delta}")


def proposed_bound_c(delta):
    """Smallest ``c`` for which ``ceil(cK)`` OMP iterations recover every K-sparse signal.

    ``-4 (1+d)/(1-d) * log(1/2 - sqrt(d / (2 + 2d)))`` with ``d`` the RIC of
    order ``floor((c+1)K)``.
    """
    _check_delta(delta)
    arg = 0.5 - math.sqrt(delta / (2 + 2 * delta))
    return -4 * (1 + delta) / (1 - delta) * math.log(arg)


def zhang_bound_c(delta):
    """Earlier comparison curve ``4 (1+d)/(1-d) * log(20 (1+d)/(1-d))``."""
    _check_delta(delta)
    ratio = (1 + delta) / (1 - delta)
    return 4 * ratio * math.log(20 * ratio)


def theorem1_rhs(delta_1, delta_N, delta_s):
    """Right-hand side of the per-iteration condition; ``inf`` when unsatisfiable."""
    if delta_s >= 1:
        return math.inf
    arg = 0.5 - 0.5 * math.sqrt((delta_N + delta_s) / (1 + delta_N))
    if arg <= 0:
        return math.inf
    return -4 * (1 + delta_1) / (1 - delta_s) * math.log(arg)


def theorem1_condition(ric, N_k, s, c):
    """Does ``c`` guarantee that the remaining ``N_k`` true indices are found
    within ``ceil(c N_k)`` more iterations?

    ``s`` is ``|T u T^{k + floor(c N_k)}|``. Larger (upper-bound) RIC entries
    only raise the right-hand side, so a ``True`` from an upper-bound profile
    stays valid.
    """
    rhs = theorem1_rhs(ric.delta(1), ric.delta(N_k), ric.delta(s))
    return bool(c >= rhs)


def min_self_consistent_c(ric, K, c_step=0.01, c_max=64.0):
    """Smallest grid value ``c >= 4 log 2`` meeting the bound at its own
    coupled order ``floor((c+1)K)``; ``None`` if no grid value up to ``c_max`` does.
    """
    if c_step <= 0:
        raise ValueError("c_step must be positive")
    need = math.floor((c_max + 1) * K)
    if ric.k_max < need:
        raise MissingOrderError(f"profile covers orders up to {ric.k_max}, scan needs {need}")
    j = 0
    while True:
        c = C_MIN + j * c_step
        if c > c_max:
            return None
        d = ric.delta(math.floor((c + 1) * K))
        if d < 1 and c >= proposed_bound_c(d) - 1e-12:
            return c
        j += 1


def emit_bound_curve(delta_grid):
    return [(d, proposed_bound_c(d), zhang_bound_c(d)) for d in delta_grid]


def curve_csv(rows):
    lines = ["delta,c_proposed,c_zhang"]
    lines += [",".join(fmt12(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"
