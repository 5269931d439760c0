"""Tabulate the minimal iteration factor against delta for both bounds.

    python3 scripts/fig1_curve.py --delta-max 0.9 --step 0.01 --out curve.csv
"""
import argparse

from ompck.rip import C_MIN, curve_csv, emit_bound_curve


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--delta-max", type=float, default=0.9)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--out", default="curve.csv")
    a = p.parse_args()
    n = int(a.delta_max / a.step + 1e-9)
    rows = emit_bound_curve([i * a.step for i in range(n + 1)])
    with open(a.out, "w") as f:
        f.write(curve_csv(rows))
    print(f"wrote {len(rows)} rows to {a.out}; c at delta=0 is {rows[0][1]:.6f} (4 ln 2 = {C_MIN:.6f})")
    for d, cp, cz in rows[:: max(1, len(rows) // 9)]:
        print(f"  delta={d:.2f}  proposed={cp:9.4f}  comparison={cz:9.4f}  ratio={cz / cp:6.2f}")


if __name__ == "__main__":
    main()
