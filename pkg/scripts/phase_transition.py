"""Monte Carlo recovery rates over an (m, K, c) grid with paired instances.

    python3 scripts/phase_transition.py scripts/configs/phase_small.json --out phase.csv
"""
import argparse
import time

from ompck.harness import PhaseGrid, phase_csv, phase_transition


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("config")
    p.add_argument("--out", default="phase.csv")
    p.add_argument("--workers", type=int, default=None)
    a = p.parse_args()
    grid = PhaseGrid.load(a.config)
    t0 = time.perf_counter()
    cells = phase_transition(grid, a.workers)
    with open(a.out, "w") as f:
        f.write(phase_csv(cells))
    print(f"{len(cells)} cells x {grid.trials} trials in {time.perf_counter() - t0:.1f}s -> {a.out}")
    rates = {(c.m, c.K, c.c): c.rate for c in cells}
    header = "m\\K " + "".join(f"{K:>14d}" for K in grid.K_list)
    print(f"success rate, c = {' / '.join(f'{c:g}' for c in grid.c_list)}")
    print(header)
    for m in grid.m_list:
        cols = ["/".join(f"{rates[m, K, c]:.2f}" for c in grid.c_list) for K in grid.K_list]
        print(f"{m:<4d}" + "".join(f"{s:>14}" for s in cols))


if __name__ == "__main__":
    main()
