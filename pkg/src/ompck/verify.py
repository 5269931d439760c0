"""Randomized sweep running the theory checks on seeded Gaussian instances."""
from dataclasses import dataclass

import numpy as np

from .harness import gaussian_matrix, instance_seeds, sparse_signal
from .omp import OmpConfig, omp_run
from .rip import ric_profile
from .theory import REPORT_HEADER, VIOLATED, TheoryContext, verify_trace

C_VALUES = (2.8, 4, 8, 16)


@dataclass
class VerificationInstance:
    trial: int
    ctx: TheoryContext


def build_instances(n, m, K, trials, seed, ric_order=None, normalize=False):
    """Seeded instances solved with budget ``min(m, n)`` plus exact RIC up to ``ric_order``
    (default ``2K``, capped at ``min(m, n)``)."""
    ric_order = min(2 * K if ric_order is None else ric_order, m, n)
    if not 1 <= K <= min(m, n):
        raise ValueError(f"need 1 <= K <= min(m, n), got K={K}, m={m}, n={n}")
    out = []
    for t in range(trials):
        ms, ss = instance_seeds(seed, m, K, t)
        Phi = gaussian_matrix(m, n, ms, normalize)
        x = sparse_signal(n, K, "gaussian", ss)
        trace = omp_run(Phi, Phi @ x.dense(), OmpConfig(min(m, n)))
        ric = ric_profile(Phi, ric_order)
        out.append(VerificationInstance(t, TheoryContext(Phi, x, trace, ric)))
    return out


def run_verification(instances, c_values=C_VALUES, prop3_count=20, seed=0):
    rows = []
    for inst in instances:
        rng = np.random.default_rng([seed, inst.trial])
        rows.extend((inst.trial, row) for row in verify_trace(inst.ctx, c_values, prop3_count, rng))
    return rows


def report_csv(rows):
    """Report CSV; a ``# trial=<i>`` comment line opens each instance's block."""
    lines = [REPORT_HEADER]
    current = None
    for t, row in rows:
        if t != current:
            lines.append(f"# trial={t}")
            current = t
        lines.append(row.csv())
    return "\n".join(lines) + "\n"


def any_violation(rows):
    return any(row.verdict in ("fail", VIOLATED) for _, row in rows)
