"""Print the CHSH maximum, entanglement of formation and a grid-scan check per zero class."""

import argparse

from bellscope.optima import max_chsh_class, scan_verify
from bellscope.qstrategy import entanglement_of_formation


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", type=int, default=100, help="scan points per axis")
    args = ap.parse_args()
    print(f"{'class':>5} {'S_max':>10} {'EoF':>7} {'scan':>10} {'gap':>9}")
    for label in ("3a", "3b", "2a", "2b", "2c", "1"):
        opt = max_chsh_class(label)
        budget = args.grid ** 3 if label == "1" else None
        r = scan_verify(label, args.grid, budget=budget)
        eof = entanglement_of_formation(opt.strategy.state)
        print(f"{label:>5} {opt.value:10.6f} {eof:7.4f} {r.scan_max:10.6f} {r.gap:9.2e}")


if __name__ == "__main__":
    main()
