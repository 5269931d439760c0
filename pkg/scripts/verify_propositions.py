"""Run the residual inequalities and the per-iteration guarantee on seeded
instances and summarise verdicts per check.

    python3 scripts/verify_propositions.py --n 30 --m 20 --K 3 --trials 20
"""
import argparse
from collections import Counter

from ompck.verify import any_violation, build_instances, report_csv, run_verification


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=30)
    p.add_argument("--m", type=int, default=20)
    p.add_argument("--K", type=int, default=3)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ric-order", type=int, default=None)
    p.add_argument("--normalize", action="store_true", help="unit-norm columns")
    p.add_argument("--out", default="report.csv")
    a = p.parse_args()
    instances = build_instances(a.n, a.m, a.K, a.trials, a.seed, a.ric_order, a.normalize)
    rows = run_verification(instances, seed=a.seed)
    with open(a.out, "w") as f:
        f.write(report_csv(rows))
    tally = Counter((row.check, row.verdict) for _, row in rows)
    for (check, verdict), count in sorted(tally.items()):
        print(f"{check:<20} {verdict:<24} {count}")
    print("violations found" if any_violation(rows) else "no violations", f"-> {a.out}")


if __name__ == "__main__":
    main()
