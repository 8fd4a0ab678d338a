"""Score difference to the standard anneal over the reversal-probability grid.

    python scripts/sweep_ps.py --out results/sweep --level qubit --workers 4
"""

import argparse

from spinreversal import experiments as ex
from spinreversal.sampler import NoiseModel


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/sweep_ps")
    ap.add_argument("--problem", default="both")
    ap.add_argument("--level", default="qubit", choices=["qubit", "chain"])
    ap.add_argument("--vertices", type=int, default=12)
    ap.add_argument("--repetitions", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--chip-seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--paper-scale", action="store_true")
    args = ap.parse_args()
    spec = ex.ExperimentSpec(problem=args.problem, level=args.level, vertices=args.vertices,
                             repetitions=args.repetitions, seed=args.seed, noise=NoiseModel(chip_seed=args.chip_seed))
    if args.paper_scale:
        spec = ex.paper_scale(spec)
    for path in ex.run_sweep(spec, args.out, args.workers):
        print(path)


if __name__ == "__main__":
    main()
