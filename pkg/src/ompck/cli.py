"""``ompck`` command line.

Exit codes: 0 success, 1 usage error, 2 computational error, 3 when
``verify`` finds a violated inequality.
"""
import argparse
import math
import sys
from fractions import Fraction

from .harness import PhaseGrid, phase_csv, phase_transition
from .linalg import SingularSupportError
from .omp import OmpConfig, SparseSignal, iteration_budget, omp_run
from .rip import EnumerationBudgetError, curve_csv, emit_bound_curve, proposed_bound_c, ric_profile, zhang_bound_c
from .textio import FormatError, fmt12, read_matrix, read_vector
from .verify import any_violation, build_instances, report_csv, run_verification


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _number(text):
    """Float or fraction such as ``1/3``."""
    try:
        value = float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return value


def _delta(text):
    d = _number(text)
    if not 0 <= d < 1:
        raise argparse.ArgumentTypeError(f"delta must lie in [0, 1), got {text}")
    return d


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text}")
    return v


def _positive(text):
    v = _number(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text}")
    return v


def build_parser():
    p = _Parser(prog="ompck", description="OMP with an over-iterated budget and its RIP-based bounds.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("recover", help="run OMP on a matrix file and a signal file")
    r.add_argument("--matrix", required=True)
    r.add_argument("--signal", required=True, help="dense signal vector file; y = Phi x")
    r.add_argument("--c", type=_positive, default=2.8, help="iteration factor (budget ceil(cK))")

    q = sub.add_parser("ric", help="exact RIC profile by enumeration")
    q.add_argument("--matrix", required=True)
    q.add_argument("--kmax", type=_positive_int, required=True)

    b = sub.add_parser("bound", help="minimal c for a given delta")
    b.add_argument("--delta", type=_delta, required=True)
    b.add_argument("--zhang", action="store_true", help="also print the comparison curve value")

    cv = sub.add_parser("curve", help="both bound curves on a delta grid")
    cv.add_argument("--delta-max", type=_delta, required=True)
    cv.add_argument("--step", type=_positive, required=True)
    cv.add_argument("--out")

    ph = sub.add_parser("phase", help="phase-transition grid from a JSON config")
    ph.add_argument("--config", required=True)
    ph.add_argument("--out")

    v = sub.add_parser("verify", help="check the proof inequalities on random instances")
    v.add_argument("--n", type=_positive_int, required=True)
    v.add_argument("--m", type=_positive_int, required=True)
    v.add_argument("--K", type=_positive_int, required=True)
    v.add_argument("--trials", type=_positive_int, default=10)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--ric-order", type=_positive_int, help="exact RIC up to this order (default 2K)")
    v.add_argument("--out")
    return p


def _emit(text, out):
    if out:
        with open(out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _grid(delta_max, step):
    count = math.floor(delta_max / step + 1e-9)
    return [i * step for i in range(count + 1)]


def _recover(a):
    Phi = read_matrix(a.matrix)
    x = read_vector(a.signal)
    if x.shape[0] != Phi.shape[1]:
        raise UsageError(f"--signal: length {x.shape[0]} does not match {Phi.shape[1]} matrix columns")
    truth = SparseSignal.from_dense(x)
    budget = min(iteration_budget(a.c, truth.K), Phi.shape[0])
    trace = omp_run(Phi, Phi @ x, OmpConfig(budget))
    sys.stdout.write(trace.to_csv())
    return 0


def _ric(a):
    Phi = read_matrix(a.matrix)
    if a.kmax > min(Phi.shape):
        raise UsageError(f"--kmax: {a.kmax} exceeds min(m, n) = {min(Phi.shape)}")
    sys.stdout.write(ric_profile(Phi, a.kmax).to_csv())
    return 0


def _bound(a):
    print(fmt12(proposed_bound_c(a.delta)))
    if a.zhang:
        print(fmt12(zhang_bound_c(a.delta)))
    return 0


def _curve(a):
    _emit(curve_csv(emit_bound_curve(_grid(a.delta_max, a.step))), a.out)
    return 0


def _phase(a):
    try:
        grid = PhaseGrid.load(a.config)
    except OSError as e:
        raise UsageError(f"--config: {e.strerror}: {a.config}") from None
    except (ValueError, TypeError) as e:
        raise UsageError(f"--config: {e}") from None
    _emit(phase_csv(phase_transition(grid)), a.out)
    return 0


def _verify(a):
    if a.K > min(a.m, a.n):
        raise UsageError(f"--K: need K <= min(m, n), got K={a.K}, m={a.m}, n={a.n}")
    instances = build_instances(a.n, a.m, a.K, a.trials, a.seed, a.ric_order)
    rows = run_verification(instances, seed=a.seed)
    _emit(report_csv(rows), a.out)
    return 3 if any_violation(rows) else 0


COMMANDS = {"recover": _recover, "ric": _ric, "bound": _bound, "curve": _curve, "phase": _phase, "verify": _verify}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"ompck: usage error: {e}", file=sys.stderr)
        return 1
    except FormatError as e:
        print(f"ompck: malformed input: {e}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"ompck: usage error: no such file: {e.filename}", file=sys.stderr)
        return 1
    except (EnumerationBudgetError, SingularSupportError, ValueError, ArithmeticError) as e:
        print(f"ompck: computational error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
