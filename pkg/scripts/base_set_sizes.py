"""Base-set size against eps for one- and two-level schedules.

Reports |Delta_1| next to the reference trend (delta_1/eps) * log2(1/eps)**d.
Nothing is asserted; the point is the shape of the curve.
"""

import math
import time

from knapsack_fptas.towers import TowerParams, construct_base_set


def main():
    print(f"{'eps':>10} {'d':>2} {'delta_1/eps':>11} {'|Delta_1|':>9} {'trend':>9} {'secs':>6}")
    for k in range(5, 11):
        eps = 2.0**-k
        for deltas in [(eps,), (4 * eps,), (eps, 1 / 8)]:
            t0 = time.perf_counter()
            size = len(construct_base_set(eps, TowerParams(deltas, eps)))
            trend = deltas[0] / eps * math.log2(1 / eps) ** len(deltas)
            print(f"{eps:>10.3g} {len(deltas):>2} {deltas[0] / eps:>11g} {size:>9} {trend:>9.0f}"
                  f" {time.perf_counter() - t0:>6.2f}")


if __name__ == "__main__":
    main()
