#!/usr/bin/env python3
"""Print D(B_peak) against B_peak and against L, next to the canonical strategy and beam sweeping.

    python scripts/distortion_tables.py --m 16 --max-l 6
"""

import argparse

from bbp import evaluate_policy_exact, min_distortion, optimal_policy, sweep_policy, validate_config


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--m", type=int, default=16)
    ap.add_argument("--max-l", type=int, default=6)
    args = ap.parse_args()
    m = args.m
    b_values = sorted({min(2**i, m) for i in range(m.bit_length())})

    print(f"M={m}: minimum distortion, rows L, columns B_peak")
    print("L\\B " + "".join(f"{b:>8}" for b in b_values))
    for l in range(1, args.max_l + 1):  # noqa: E741
        cells = [min_distortion(validate_config(m, l, b)).d_min for b in b_values]
        print(f"{l:>3} " + "".join(f"{float(d):>8.4f}" for d in cells))

    print()
    print("L  B_peak  formula  strategy  sweep")
    for l in range(1, args.max_l + 1):  # noqa: E741
        for b in b_values:
            c = validate_config(m, l, b)
            rep = min_distortion(c)
            sw = evaluate_policy_exact(c, sweep_policy(c))
            st = evaluate_policy_exact(c, optimal_policy(c))
            print(f"{l:<2} {b:<7} {str(rep.d_min):<8} {str(st):<9} {sw}")


if __name__ == "__main__":
    main()
