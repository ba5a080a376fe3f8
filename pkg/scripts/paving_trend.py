"""Best 2-paving levels of Paley conference reflections and their half-diagonal
projections, exhaustive where affordable and by local search everywhere.
"""

import argparse
import math
import time

from paving_lab.experiments import resolve_matrix
from paving_lab.paving import count_partitions, exhaustive_pave, local_search_pave


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--orders", type=int, nargs="+", default=[6, 14, 18, 30])
    ap.add_argument("--restarts", type=int, default=64)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--exhaustive-max-n", type=int, default=18)
    args = ap.parse_args()
    print("n,kind,certificate,exhaustive,local,seconds")
    for n in args.orders:
        cert = math.sqrt((math.ceil(n / 2) - 1) / (n - 1))
        for kind, bound in (("reflection", cert), ("projection", (1 + cert) / 2)):
            t = resolve_matrix(f"paley-{kind}:{n - 1}")
            start = time.perf_counter()
            exh = ""
            if n <= args.exhaustive_max_n:
                exh = exhaustive_pave(t, 2, max_n=n, max_partitions=count_partitions(n, 2)).epsilon
            loc = local_search_pave(t, 2, seed=args.seed, restarts=args.restarts).epsilon
            print(f"{n},{kind},{bound:.9f},{exh if exh == '' else f'{exh:.9f}'},{loc:.9f},"
                  f"{time.perf_counter() - start:.2f}")


if __name__ == "__main__":
    main()
