"""GA dependence on N, p_spin, p_mat and p_mut on one fixed embedded instance.

Qubit level runs 100 generations, chain level 50.

    python scripts/ga_study.py --out results/study --level chain
"""

import argparse
from dataclasses import replace

from spinreversal import experiments as ex


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/ga_study")
    ap.add_argument("--level", default="qubit", choices=["qubit", "chain"])
    ap.add_argument("--parameter", action="append", choices=list(ex.GA_PARAMETERS))
    ap.add_argument("--vertices", type=int, default=12)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--generations", type=int)
    args = ap.parse_args()
    spec = ex.ExperimentSpec(level=args.level, vertices=args.vertices, seed=args.seed)
    generations = args.generations or (50 if args.level == "chain" else 100)
    spec = replace(spec, ga=replace(spec.ga, generations=generations))
    for path in ex.run_study(spec, args.out, args.parameter):
        print(path)


if __name__ == "__main__":
    main()
