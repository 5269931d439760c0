"""Orthogonal matching pursuit with an arbitrary iteration budget."""
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .linalg import IncrementalSolver, SingularSupportError, as_matrix, as_support, as_vector
from .textio import fmt17

BUDGET = "budget"
CONVERGED = "residual-below-tolerance"
BREAKDOWN = "breakdown"

RELATIVE_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class SparseSignal:
    n: int
    support: tuple
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "support", as_support(self.support, self.n))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.support) != len(self.values):
            raise ValueError("support and values differ in length")
        if any(v == 0 or not math.isfinite(v) for v in self.values):
            raise ValueError("signal values must be finite and nonzero")

    @classmethod
    def from_dense(cls, x):
        x = as_vector(x)
        idx = np.flatnonzero(x)
        return cls(x.shape[0], tuple(idx), tuple(x[idx]))

    @classmethod
    def from_pairs(cls, n, pairs):
        pairs = sorted((int(i), float(v)) for i, v in pairs)
        return cls(n, tuple(i for i, _ in pairs), tuple(v for _, v in pairs))

    @property
    def K(self):
        return len(self.support)

    def dense(self):
        x = np.zeros(self.n)
        x[list(self.support)] = self.values
        return x

    def norm(self):
        return math.sqrt(sum(v * v for v in self.values))


@dataclass(frozen=True)
class OmpConfig:
    """Run settings.

    ``residual_tolerance=None`` means ``1e-9 * ||y||``.
    """

    max_iterations: int
    residual_tolerance: float = None
    exclude_selected: bool = True

    def __post_init__(self):
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be nonnegative")
        if self.residual_tolerance is not None and self.residual_tolerance < 0:
            raise ValueError("residual_tolerance must be nonnegative")


@dataclass(frozen=True)
class IterationRecord:
    k: int
    selected: int  # None for the initial record
    support: tuple
    estimate: np.ndarray = field(repr=False)
    residual_norm: float


@dataclass(frozen=True)
class OmpTrace:
    records: tuple
    termination: str

    @property
    def iterations(self):
        return len(self.records) - 1

    @property
    def selected(self):
        return [r.selected for r in self.records[1:]]

    @property
    def final(self):
        return self.records[-1]

    def support(self, k):
        return self.records[k].support

    def residual_norms(self):
        return np.array([r.residual_norm for r in self.records])

    def truncated(self, k):
        """The trace a run with budget ``k`` would have produced."""
        if not 0 <= k <= self.iterations:
            raise ValueError(f"cannot truncate a {self.iterations}-iteration trace at {k}")
        if k == self.iterations:
            return self
        return OmpTrace(self.records[: k + 1], BUDGET)

    def to_csv(self):
        lines = ["k,selected,residual_norm"]
        lines += [f"{r.k},{r.selected},{fmt17(r.residual_norm)}" for r in self.records[1:]]
        lines.append(f"# termination={self.termination}")
        return "\n".join(lines) + "\n"


def iteration_budget(c, K):
    """``ceil(c K)`` computed on the exact rational value of ``c``.

    Floats are read through their shortest decimal repr, so ``2.8`` means 14/5
    and ``ceil(2.8 * 5)`` is 14, not 15.
    """
    if isinstance(c, float):
        c = Fraction(repr(c))
    return math.ceil(Fraction(c) * K)


def omp_run(Phi, y, cfg):
    """Run OMP for at most ``cfg.max_iterations`` iterations and record every step.

    Selection picks the largest ``|<r, phi_i>|`` with ties going to the
    smallest index. A rank-deficient support ends the trace with reason
    ``"breakdown"`` instead of raising.
    """
    Phi, y = as_matrix(Phi), as_vector(y)
    m, n = Phi.shape
    if y.shape[0] != m:
        raise ValueError(f"measurement length {y.shape[0]} does not match {m} rows")
    if cfg.max_iterations > m:
        raise ValueError(f"max_iterations {cfg.max_iterations} exceeds row count {m}")
    tol = cfg.residual_tolerance
    if tol is None:
        tol = RELATIVE_RESIDUAL_TOL * np.linalg.norm(y)

    solver = IncrementalSolver(Phi, y)
    r = y.copy()
    records = [IterationRecord(0, None, (), np.zeros(n), float(np.linalg.norm(r)))]
    chosen = np.zeros(n, dtype=bool)
    reason = BUDGET
    if records[0].residual_norm <= tol:
        return OmpTrace(tuple(records), CONVERGED)

    for k in range(1, cfg.max_iterations + 1):
        score = np.abs(Phi.T @ r)
        if cfg.exclude_selected:
            if chosen.all():
                reason = BREAKDOWN
                break
            score[chosen] = -1.0
        t = int(np.argmax(score))
        try:
            solver.extend(t)
        except (SingularSupportError, ValueError):
            reason = BREAKDOWN
            break
        chosen[t] = True
        coef = solver.coefficients()
        xhat = np.zeros(n)
        xhat[solver.order] = coef
        r = y - Phi[:, solver.order] @ coef
        rnorm = float(np.linalg.norm(r))
        records.append(IterationRecord(k, t, solver.support, xhat, rnorm))
        if rnorm <= tol:
            reason = CONVERGED
            break
    return OmpTrace(tuple(records), reason)


def support_inclusion(trace, truth):
    """Smallest iteration ``k`` with ``T`` contained in ``T^k``; ``None`` if never."""
    T = set(truth.support)
    if trace.records[0].estimate.shape[0] != truth.n:
        raise ValueError("trace and signal have different ambient dimensions")
    for rec in trace.records:
        if T.issubset(rec.support):
            return rec.k
    return None


def check_exact_recovery(trace, truth, tol=1e-8):
    err = np.linalg.norm(trace.final.estimate - truth.dense())
    return bool(err <= tol * max(1.0, truth.norm()))
