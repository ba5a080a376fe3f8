"""Integer certificates for the Singer family, plus a sampled symmetry scan of
one constructed equiangular Gram.
"""

import argparse

from paving_lab.experiments import harmonic_index_set
from paving_lab.frames import gram_projection, harmonic_frame
from paving_lab.symmetry import conj_a_certificate, interval_symmetries, min_symmetry_norm, psp_norm, singer_parameters


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qs", type=int, nargs="+", default=[2, 3, 4, 5, 7, 8, 9])
    ap.add_argument("--scan-q", type=int, default=5)
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    print("q,n,k,lhs,rhs,counterexample")
    for q in args.qs:
        n, k = singer_parameters(q)
        c = conj_a_certificate(n, k)
        print(f"{q},{n},{k},{c.lhs},{c.rhs},{c.is_counterexample}")
    n, k = singer_parameters(args.scan_q)
    g = gram_projection(harmonic_frame(n, harmonic_index_set(n, k)))
    scan = min_symmetry_norm(g, strategy="random", samples=args.samples, seed=args.seed, threads=args.threads)
    iv = min(psp_norm(g, tuple(int(x) for x in s)) for s in interval_symmetries(n))
    print(f"\n({n},{k}) threshold 2k/n = {2 * k / n:.6f}")
    print(f"min over {args.samples} random symmetries: {scan.value:.6f}")
    print(f"min over interval symmetries: {iv:.6f}")


if __name__ == "__main__":
    main()
