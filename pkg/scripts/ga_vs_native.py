"""GA best mask against native spin reversal, reversal counts and Chimera layouts.

    python scripts/ga_vs_native.py --out results/versus --generations 100
"""

import argparse
from dataclasses import replace

from spinreversal import experiments as ex
from spinreversal.sampler import NoiseModel


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/ga_vs_native")
    ap.add_argument("--problem", default="both")
    ap.add_argument("--vertices", type=int, default=12)
    ap.add_argument("--realizations", type=int, default=6)
    ap.add_argument("--generations", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--chip-seed", type=int, default=0)
    args = ap.parse_args()
    spec = ex.ExperimentSpec(problem=args.problem, vertices=args.vertices, realizations=args.realizations,
                             seed=args.seed, noise=NoiseModel(chip_seed=args.chip_seed))
    spec = replace(spec, ga=replace(spec.ga, generations=args.generations))
    for path in ex.run_versus(spec, args.out):
        print(path)


if __name__ == "__main__":
    main()
