"""Check recorded OMP traces against the inequalities behind the iteration bound.

Everything here evaluates inequalities that are theorems. With exact RIC
profiles a failed check (beyond the 1e-9 slack) means a defect in the solver
or in the instrumentation, not a counterexample.
"""
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .omp import CONVERGED
from .rip import MissingOrderError, theorem1_condition, theorem1_rhs

SLACK = 1e-9

HELD = "guaranteed-and-held"
VIOLATED = "guaranteed-and-violated"
NOT_GUARANTEED = "not-guaranteed"


def _frac(c):
    return Fraction(repr(c)) if isinstance(c, float) else Fraction(c)


def _lower_isometry(delta):
    # ||Phi u||^2 >= max(0, 1 - delta) ||u||^2 is the usable form of the lower
    # RIP bound; for delta >= 1 it degrades to the trivial bound 0.
    return max(0.0, 1.0 - delta)


def gamma_partition(N_k):
    """Nested head sets of the ranks ``1..N_k``.

    Set ``tau`` holds ranks ``1 .. 2**tau - 1`` for ``1 <= tau <= floor(log2 N_k)``;
    the first set is empty and the last one is all ``N_k`` ranks.
    """
    if N_k < 0:
        raise ValueError("N_k must be nonnegative")
    if N_k == 0:
        return [()]
    top = N_k.bit_length() - 1  # floor(log2 N_k)
    sets = [()]
    sets += [tuple(range(1, 2**tau)) for tau in range(1, top + 1)]
    sets.append(tuple(range(1, N_k + 1)))
    return sets


def compute_L(tail_energies, sigma):
    """Minimal level ``L`` at which the tail energy stops shrinking slowly.

    ``tail_energies[tau]`` is the squared norm of the signal outside the
    ``tau``-th head set. Returns the smallest ``L`` with
    ``e[tau] < sigma * e[tau+1]`` for ``tau < L-1`` and
    ``e[L-1] >= sigma * e[L]``.
    """
    e = [float(v) for v in tail_energies]
    if sigma <= 1:
        raise ValueError("sigma must exceed 1")
    if len(e) < 2:
        raise ValueError("need at least two tail energies")
    if any(b > a for a, b in zip(e, e[1:])) or e[-1] < 0:
        raise ValueError(f"tail energies must be nonnegative and nonincreasing: {e}")
    for tau in range(len(e) - 1):
        if e[tau] >= sigma * e[tau + 1]:
            return tau + 1
    # The final tail is empty, so the loop always returns for a valid partition.
    raise ValueError("last tail energy must be zero")


@dataclass(frozen=True)
class Schedule:
    stages: tuple  # k_0 .. k_L
    k_prime: int  # ceil(c 2^(L-1)) - 1
    within_bound: bool  # k_L <= k + k_prime


def stage_schedule(k, sizes, c, L):
    """Stage ends ``k_i = k + sum_{tau<=i} ceil(c/4 * |head set tau|)``.

    ``sizes`` lists the head-set sizes starting at ``tau = 0``.
    """
    if c <= 0:
        raise ValueError("c must be positive")
    if len(sizes) <= 1 or L < 1:
        return Schedule((k,), 0, True)
    if L >= len(sizes):
        raise ValueError(f"L = {L} exceeds the partition depth {len(sizes) - 1}")
    q = _frac(c) / 4
    stages = [k]
    for tau in range(1, L + 1):
        stages.append(stages[-1] + math.ceil(q * sizes[tau]))
    k_prime = math.ceil(_frac(c) * 2 ** (L - 1)) - 1
    return Schedule(tuple(stages), k_prime, stages[-1] <= k + k_prime)


class TheoryContext:
    """A solved instance (matrix, planted signal, trace) plus a RIC profile."""

    def __init__(self, Phi, truth, trace, ric, slack=SLACK):
        self.Phi = np.asarray(Phi, dtype=np.float64)
        self.truth = truth
        self.trace = trace
        self.ric = ric
        self.slack = slack
        self._x = truth.dense()
        self._T = frozenset(truth.support)

    @property
    def last(self):
        return self.trace.iterations

    def support_at(self, j):
        """``T^j``; past a converged trace's end the final support stands in."""
        if j <= self.last:
            return self.trace.support(j)
        if self.trace.termination == CONVERGED:
            return self.trace.support(self.last)
        raise ValueError(f"trace ends at iteration {self.last}, iteration {j} requested")

    def residual_sq(self, j):
        return self.trace.records[j].residual_norm ** 2

    def gamma(self, k):
        """Remaining true indices ``T \\ T^k``, largest magnitude first."""
        rest = self._T.difference(self.support_at(k))
        return sorted(rest, key=lambda i: (-abs(self._x[i]), i))

    def N(self, k):
        return len(self._T.difference(self.support_at(k)))

    def head_sets(self, k):
        g = self.gamma(k)
        return [tuple(g[r - 1] for r in ranks) for ranks in gamma_partition(len(g))]

    def tail(self, k, tau):
        g = self.gamma(k)
        head = set(self.head_sets(k)[tau])
        return [i for i in g if i not in head]

    def tail_energies(self, k):
        return [float(np.sum(self._x[self.tail(k, tau)] ** 2))
                for tau in range(len(self.head_sets(k)))]

    def tail_image_energy(self, k, tau):
        idx = self.tail(k, tau)
        if not idx:
            return 0.0
        v = self.Phi[:, idx] @ self._x[idx]
        return float(v @ v)


# Each check returns (small, big); the inequality claims small <= big.

def proposition1_sides(ctx, k):
    g = ctx.gamma(k)
    energy = float(np.sum(ctx._x[g] ** 2))
    return ctx.residual_sq(k), (1 + ctx.ric.delta(len(g))) * energy


def proposition2_sides(ctx, k, l, tau):
    if not k <= l < ctx.last:
        raise ValueError(f"need k <= l < {ctx.last}, got k={k}, l={l}")
    heads = ctx.head_sets(k)
    if not 1 <= tau < len(heads):
        raise ValueError(f"tau = {tau} outside 1..{len(heads) - 1}")
    head = heads[tau]
    order = len(set(head).union(ctx.support_at(l)))
    coef = _lower_isometry(ctx.ric.delta(order)) / ((1 + ctx.ric.delta(1)) * len(head))
    E = ctx.tail_image_energy(k, tau)
    drop = ctx.residual_sq(l) - ctx.residual_sq(l + 1)
    return coef * (ctx.residual_sq(l) - E), drop


def contraction_constant(ctx, k, l, l_prime, tau):
    if l_prime == l:
        return 1.0
    head = ctx.head_sets(k)[tau]
    order = len(set(head).union(ctx.support_at(l_prime - 1)))
    rate = _lower_isometry(ctx.ric.delta(order)) / (1 + ctx.ric.delta(1))
    return math.exp(-rate * (l_prime - l) / len(head))


def proposition3_sides(ctx, k, l, l_prime, tau):
    if not k <= l <= l_prime <= ctx.last:
        raise ValueError(f"need k <= l <= l' <= {ctx.last}, got {k}, {l}, {l_prime}")
    if not 1 <= tau < len(ctx.head_sets(k)):
        raise ValueError(f"tau = {tau} out of range")
    E = ctx.tail_image_energy(k, tau)
    C = contraction_constant(ctx, k, l, l_prime, tau)
    return ctx.residual_sq(l_prime) - E, C * (ctx.residual_sq(l) - E)


def check_proposition1(ctx, k):
    """Residual power is at most ``(1 + delta_{N^k})`` times the missed signal energy."""
    small, big = proposition1_sides(ctx, k)
    return small <= big + ctx.slack


def check_proposition2(ctx, k, l, tau):
    """Per-iteration residual drop is at least the stated fraction of the excess
    over the tail image energy."""
    small, big = proposition2_sides(ctx, k, l, tau)
    return small <= big + ctx.slack


def check_proposition3(ctx, k, l, l_prime, tau):
    small, big = proposition3_sides(ctx, k, l, l_prime, tau)
    return small <= big + ctx.slack


def _theorem1_setup(ctx, k, c):
    N = ctx.N(k)
    cN = _frac(c) * N
    s = len(ctx._T.union(ctx.support_at(k + math.floor(cN))))
    return N, s, k + math.ceil(cN)


def check_theorem1(ctx, k, c):
    """Evaluate the per-iteration condition with the realized ``s`` and, when it
    holds, confirm ``T`` is inside ``T^{k + ceil(c N^k)}``."""
    N, s, target = _theorem1_setup(ctx, k, c)
    if N == 0:
        return HELD
    if not theorem1_condition(ctx.ric, N, s, c):
        return NOT_GUARANTEED
    return HELD if ctx._T.issubset(ctx.support_at(target)) else VIOLATED


def theorem1_margin(ctx, k, c):
    N, s, _ = _theorem1_setup(ctx, k, c)
    ric = ctx.ric
    return c - theorem1_rhs(ric.delta(1), ric.delta(N), ric.delta(s))


def eta(c, delta_1, delta_s):
    return math.exp(-c * (1 - delta_s) / (4 * (1 + delta_1)))


def bounds_Bu_Bl(ctx, k, L, k_prime, c):
    """Upper bound on the missed energy after ``k + k'`` iterations and lower
    bound on the tail energy, both proportional to ``||r^{k+k'}||^2``.

    ``sigma`` is tied to the contraction rate by ``sigma * eta = 1/2``.
    """
    j = k + k_prime
    support = ctx.support_at(j)
    r2 = ctx.residual_sq(min(j, ctx.last))
    d1 = ctx.ric.delta(1)
    d_gamma = ctx.ric.delta(ctx.N(k))
    d_s = ctx.ric.delta(len(ctx._T.union(support)))
    if r2 == 0:
        return 0.0, 0.0
    Bu = r2 / (1 - d_s) if d_s < 1 else math.inf
    e = eta(c, d1, d_s)
    sigma = 1 / (2 * e)
    Bl = sigma * (1 - sigma * e) / ((1 + d_gamma) * (1 - e)) * r2 if e < 1 else -math.inf
    return Bu, Bl


@dataclass(frozen=True)
class InductionStep:
    L: int
    sigma: float
    schedule: Schedule
    Bu: float
    Bl: float
    remaining_after: int  # N^{k+k'}
    claimed_max: int  # N^k - 2^(L-1)


def induction_step(ctx, k, c):
    """Instantiate the induction step at iteration ``k`` for a given ``c``.

    ``sigma`` comes from ``sigma * eta = 1/2`` with ``eta`` evaluated at the
    order ``|T u T^{k + floor(c N^k)}|`` (an upper bound on the one at
    ``k + k'``), which breaks the circular dependence between ``sigma``, ``L``
    and ``k'``. Returns ``None`` when ``N^k = 0`` or ``sigma`` would not exceed 1.
    """
    N, s, _ = _theorem1_setup(ctx, k, c)
    if N == 0:
        return None
    e = eta(c, ctx.ric.delta(1), ctx.ric.delta(s))
    if not e < 0.5:
        return None
    sigma = 1 / (2 * e)
    L = compute_L(ctx.tail_energies(k), sigma)
    sizes = [len(h) for h in ctx.head_sets(k)]
    sched = stage_schedule(k, sizes, c, L)
    Bu, Bl = bounds_Bu_Bl(ctx, k, L, sched.k_prime, c)
    return InductionStep(L, sigma, sched, Bu, Bl, ctx.N(k + sched.k_prime), N - 2 ** (L - 1))


@dataclass(frozen=True)
class ReportRow:
    check: str
    k: int
    l: object = ""
    tau: object = ""
    l_prime: object = ""
    verdict: str = ""
    margin: float = 0.0

    def csv(self):
        return f"{self.check},{self.k},{self.l},{self.tau},{self.l_prime},{self.verdict},{self.margin:.6e}"


REPORT_HEADER = "check,k,l,tau,l_prime,verdict,margin"


def _row(check, k, small, big, slack, **kw):
    return ReportRow(check, k, verdict="pass" if small <= big + slack else "fail", margin=big - small, **kw)


def admissible_prop2(ctx):
    for k in range(ctx.last + 1):
        if ctx.N(k) == 0:
            continue
        heads = ctx.head_sets(k)
        for l in range(k, ctx.last):
            for tau in range(1, len(heads)):
                order = len(set(heads[tau]).union(ctx.support_at(l)))
                if ctx.ric.has(order):
                    yield k, l, tau


def random_prop3_triples(ctx, count, rng):
    """Draw ``count`` admissible ``(k, l, l', tau)`` tuples (fewer if none exist)."""
    pool = []
    for k in range(ctx.last + 1):
        if ctx.N(k) == 0:
            continue
        heads = ctx.head_sets(k)
        for tau in range(1, len(heads)):
            for l in range(k, ctx.last + 1):
                for lp in range(l, ctx.last + 1):
                    if lp == l or ctx.ric.has(len(set(heads[tau]).union(ctx.support_at(lp - 1)))):
                        pool.append((k, l, lp, tau))
    if not pool:
        return []
    picks = rng.choice(len(pool), size=count, replace=len(pool) < count)
    return [pool[i] for i in sorted(picks)]


def verify_trace(ctx, c_values=(2.8, 4, 8, 16), prop3_count=20, rng=None):
    """Run every applicable check on one context and return report rows."""
    rng = np.random.default_rng(0) if rng is None else rng
    rows = []
    for k in range(ctx.last + 1):
        if ctx.ric.has(ctx.N(k)):
            rows.append(_row("proposition1", k, *proposition1_sides(ctx, k), ctx.slack))
    for k, l, tau in admissible_prop2(ctx):
        rows.append(_row("proposition2", k, *proposition2_sides(ctx, k, l, tau), ctx.slack, l=l, tau=tau))
    for k, l, lp, tau in random_prop3_triples(ctx, prop3_count, rng):
        rows.append(_row("proposition3", k, *proposition3_sides(ctx, k, l, lp, tau), ctx.slack,
                         l=l, tau=tau, l_prime=lp))
    for c in c_values:
        for k in range(ctx.last + 1):
            try:
                verdict = check_theorem1(ctx, k, c)
                margin = theorem1_margin(ctx, k, c) if ctx.N(k) else 0.0
            except (MissingOrderError, ValueError):
                continue
            rows.append(ReportRow(f"theorem1[c={c:g}]", k, verdict=verdict,
                                  margin=margin if math.isfinite(margin) else -math.inf))
    return rows
