"""Win count of the GA (generation 10, fresh re-score) against native spin reversal per sweep count.

Used to pick the short desk schedule for GA experiments.  Run on calibration
graph seeds only; the acceptance suite uses a different graph.

    python scripts/calibrate_desk_annealer.py --graph-seed 1 --sweeps 5 10 20
"""

import argparse
import time
from dataclasses import replace

import numpy as np

from spinreversal.chimera import embed_complete, embed_model, smallest_chimera_for
from spinreversal.genetic import GAConfig, SamplerEvaluator, run_ga
from spinreversal.graphs import erdos_renyi, max_clique_qubo
from spinreversal.ising import qubo_to_ising
from spinreversal.sampler import NoiseModel, SamplerConfig, score, solve_native
from spinreversal.seeding import derive_seed


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--graph-seed", type=int, default=1)
    ap.add_argument("--sweeps", type=int, nargs="+", default=[10])
    ap.add_argument("--reads", type=int, default=200)
    ap.add_argument("--beta-max", type=float, default=10.0)
    ap.add_argument("--chips", type=int, default=10)
    args = ap.parse_args()
    g = erdos_renyi(12, 0.5, args.graph_seed)
    topo = smallest_chimera_for(12)
    phys = embed_model(qubo_to_ising(max_clique_qubo(g).qubo), embed_complete(12, topo), topo=topo)
    for sweeps in args.sweeps:
        sampler = SamplerConfig(args.reads, sweeps, beta_max=args.beta_max)
        diffs, t0 = [], time.perf_counter()
        for chip in range(args.chips):
            noise = NoiseModel(chip_seed=chip)
            ev = SamplerEvaluator.for_physical(phys, noise, sampler)
            rec = run_ga(ev, GAConfig(generations=11, num_anneals=args.reads, seed=chip)).history.records[10]
            mask = np.array([c == "1" for c in rec.best_mask])
            ga = score(ev(mask, "qubit", args.reads, derive_seed(args.graph_seed, chip, 0)))
            native = score(solve_native(phys.model, args.reads, 10, noise,
                                        replace(sampler, seed=derive_seed(args.graph_seed, chip, 1)), phys.qubits))
            diffs.append(ga - native)
        diffs = np.array(diffs)
        print(f"sweeps {sweeps}: wins {(diffs <= 0).sum()}/{args.chips} mean diff {diffs.mean():+.3f} "
              f"({time.perf_counter() - t0:.0f}s)")


if __name__ == "__main__":
    main()
