"""Command-line entry point: ``spinreversal <command> [options]``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import experiments as ex
from . import plots
from .chimera import Embedding, PhysicalIsing, chimera, embed_complete, embed_model, random_mask, smallest_chimera_for
from .errors import InvalidArgument
from .genetic import CHAIN, QUBIT, STANDARD_PARAMETERS, GAAborted, GAConfig, SamplerEvaluator, run_ga
from .graphs import PROBLEM_KINDS, Graph, erdos_renyi, reduce
from .ising import IsingModel, SpinReversalMask, dumps_model, model_from_dict, qubo_to_ising
from .sampler import LOGICAL, PHYSICAL, NoiseModel, SamplerConfig, score, solve_native, solve_with_mask

log = logging.getLogger("spinreversal")


def _load_model_doc(path) -> tuple[IsingModel, dict]:
    doc = json.loads(Path(path).read_text())
    model = model_from_dict(doc)
    if not isinstance(model, IsingModel):
        model = qubo_to_ising(model)
    return model, doc.get("metadata", {})


def _physical_from(path) -> tuple[IsingModel, PhysicalIsing | None]:
    """A model file plus, when it was written by ``embed``, its embedding."""
    model, meta = _load_model_doc(path)
    if "chains" not in meta:
        return model, None
    emb = Embedding.from_json(json.dumps(meta["chains"]))
    topo = chimera(meta["topology"]["M"], meta["topology"]["N"], meta["topology"]["t"])
    logical = model_from_dict(meta["logical"])
    return model, PhysicalIsing(model, logical, emb, topo, meta["chain_strength"])


def _noise(args) -> NoiseModel:
    noise = NoiseModel.from_file(args.noise_profile) if args.noise_profile else NoiseModel()
    if args.chip_seed is not None:
        noise = replace(noise, chip_seed=args.chip_seed)
    return noise


def _sampler(args, default_sweeps: int) -> SamplerConfig:
    return SamplerConfig(
        num_reads=args.reads,
        num_sweeps=args.sweeps if args.sweeps is not None else default_sweeps,
        seed=args.seed,
        parallel=args.parallel,
    )


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_generate(args):
    g = erdos_renyi(args.vertices, args.p_G, args.seed)
    path = _out(args) / args.name
    g.save(path)
    print(path)


def cmd_reduce(args):
    g = Graph.load(args.graph)
    red = reduce(g, args.problem)
    meta = {"problem": args.problem, "A": red.A, "B": red.B, "graph": str(args.graph)}
    out = _out(args)
    (out / "qubo.json").write_text(dumps_model(red.qubo, meta))
    (out / "ising.json").write_text(dumps_model(qubo_to_ising(red.qubo), meta))
    print(out / "ising.json")


def cmd_embed(args):
    logical, _ = _load_model_doc(args.model)
    topo = chimera(args.chimera, args.chimera, args.t) if args.chimera else smallest_chimera_for(logical.n, args.t)
    emb = embed_complete(logical.n, topo)
    phys = embed_model(logical, emb, args.chain_strength, topo)
    meta = {
        "topology": topo.to_dict(),
        "chains": json.loads(emb.to_json()),
        "chain_strength": phys.chain_strength,
        "logical": logical.to_dict(),
    }
    path = _out(args) / "physical.json"
    path.write_text(dumps_model(phys.model, meta))
    print(path)


def cmd_sample(args):
    model, phys = _physical_from(args.model)
    noise = _noise(args)
    cfg = _sampler(args, SamplerConfig.num_sweeps)
    qubits, space = (phys.qubits, PHYSICAL) if phys else (None, LOGICAL)
    if args.native:
        ss = solve_native(model, args.reads, args.native, noise, cfg, qubits, space)
    else:
        if args.mask:
            mask = SpinReversalMask.from_string(args.mask).array
        elif args.p_s is not None:
            mask = random_mask(model.n, args.p_s, args.seed).array
        else:
            mask = np.zeros(model.n, bool)
        ss = solve_with_mask(model, mask, noise, cfg, qubits, space)
    path = _out(args) / "samples.csv"
    path.write_text(ss.to_csv())
    print(f"min_energy {ss.min_energy!r} score {score(ss)!r}")


def cmd_ga(args):
    model, phys = _physical_from(args.model)
    noise = _noise(args)
    sampler = _sampler(args, ex.DESK_SWEEPS)
    if phys is not None:
        evaluator = SamplerEvaluator.for_physical(phys, noise, sampler)
    else:
        evaluator = SamplerEvaluator(model, noise, sampler)
    params = dict(STANDARD_PARAMETERS)
    for name in ("population", "p_spin", "p_mat", "p_mut"):
        if getattr(args, name) is not None:
            params[name] = getattr(args, name)
    cfg = GAConfig(generations=args.generations, num_anneals=args.reads, level=args.level, seed=args.seed, **params)
    out = _out(args)
    seeds = {"seed": args.seed, "chip_seed": noise.chip_seed}
    try:
        result = run_ga(evaluator, cfg, checkpoint=out / "checkpoint.json" if args.checkpoint else None, resume=args.resume,
                        on_generation=lambda r: log.info("generation %d best %.6g", r.generation, r.best_fitness))
    except GAAborted as exc:
        (out / "ga_history.csv").write_text(exc.history.to_csv(seeds))
        raise
    (out / "ga_history.csv").write_text(result.history.to_csv(seeds))
    (out / "best_mask.txt").write_text(result.best_mask.to_string() + "\n")
    print(f"best_fitness {result.best_fitness!r} best_score {result.best_score!r} popcount {result.best_mask.popcount}")


def _spec(args) -> ex.ExperimentSpec:
    if args.spec:
        spec = ex.ExperimentSpec.from_json(Path(args.spec).read_text())
    else:
        spec = ex.ExperimentSpec(seed=args.seed, noise=_noise(args))
        kw = {}
        for name in ("problem", "vertices", "repetitions", "level", "realizations"):
            if getattr(args, name, None) is not None:
                kw[name] = getattr(args, name)
        if getattr(args, "p_G", None):
            kw["p_G"] = tuple(args.p_G)
        spec = replace(spec, **kw)
        if args.paper_scale:
            spec = ex.paper_scale(spec)
        if getattr(args, "generations", None) is not None:
            spec = replace(spec, ga=replace(spec.ga, generations=args.generations))
        elif spec.level == CHAIN and args.command == "ga-study":
            spec = replace(spec, ga=replace(spec.ga, generations=50))
        if args.sweeps is not None:
            spec = replace(spec, sampler=replace(spec.sampler, num_sweeps=args.sweeps))
    return spec


def cmd_sweep_ps(args):
    for p in ex.run_sweep(_spec(args), _out(args), args.workers):
        print(p)


def cmd_ga_study(args):
    for p in ex.run_study(_spec(args), _out(args), args.parameter or None):
        print(p)


def cmd_ga_vs_native(args):
    for p in ex.run_versus(_spec(args), _out(args)):
        print(p)


def cmd_render_layout(args):
    _, phys = _physical_from(args.model)
    if phys is None:
        raise InvalidArgument("render-layout needs a model written by 'embed'")
    text = Path(args.mask).read_text().strip() if Path(args.mask).is_file() else args.mask
    mask = SpinReversalMask.from_string(text)
    path = _out(args) / args.name
    plots.render_layout(phys.topology, phys.embedding, mask, path)
    print(path)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="root seed")
    common.add_argument("--noise-profile", help="JSON file with NoiseModel fields")
    common.add_argument("--chip-seed", type=int, help="override the chip seed of the noise profile")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--paper-scale", action="store_true", help="use the hardware-scale experiment sizes")
    common.add_argument("-v", "--verbose", action="store_true")

    sampling = argparse.ArgumentParser(add_help=False)
    sampling.add_argument("--reads", type=int, default=200)
    sampling.add_argument("--sweeps", type=int)
    sampling.add_argument("--parallel", action="store_true")

    experiment = argparse.ArgumentParser(add_help=False)
    experiment.add_argument("--spec", help="replay an experiment from its spec.json")
    experiment.add_argument("--problem", choices=list(PROBLEM_KINDS) + ["both"])
    experiment.add_argument("--vertices", type=int)
    experiment.add_argument("--level", choices=[QUBIT, CHAIN])
    experiment.add_argument("--sweeps", type=int)

    parser = argparse.ArgumentParser(prog="spinreversal", description="Spin-reversal transforms on an emulated annealer.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="Erdos-Renyi graph")
    p.add_argument("--vertices", type=int, default=12)
    p.add_argument("--p-G", dest="p_G", type=float, default=0.5)
    p.add_argument("--name", default="graph.txt")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("reduce", parents=[common], help="graph -> QUBO and Ising JSON")
    p.add_argument("graph")
    p.add_argument("--problem", choices=PROBLEM_KINDS, default=PROBLEM_KINDS[0])
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("embed", parents=[common], help="clique-embed a model on Chimera")
    p.add_argument("model")
    p.add_argument("--chimera", type=int, help="grid size M (default: smallest that fits)")
    p.add_argument("--t", type=int, default=4)
    p.add_argument("--chain-strength", type=float)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("sample", parents=[common, sampling], help="sample a model")
    p.add_argument("model")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--mask", help="bitstring, 1 = reversed")
    group.add_argument("--p-s", dest="p_s", type=float, help="random mask with this reversal probability")
    group.add_argument("--native", type=int, metavar="N_S", help="native spin reversal with N_S transforms")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("ga", parents=[common, sampling], help="genetic search for a mask")
    p.add_argument("model")
    p.add_argument("--generations", type=int, default=100)
    p.add_argument("--population", type=int)
    p.add_argument("--p-spin", dest="p_spin", type=float)
    p.add_argument("--p-mat", dest="p_mat", type=float)
    p.add_argument("--p-mut", dest="p_mut", type=float)
    p.add_argument("--level", choices=[QUBIT, CHAIN], default=QUBIT)
    p.add_argument("--checkpoint", action="store_true", help="write checkpoint.json after every generation")
    p.add_argument("--resume", help="continue from a checkpoint file")
    p.set_defaults(func=cmd_ga)

    p = sub.add_parser("sweep-ps", parents=[common, experiment], help="score difference over the p_s grid")
    p.add_argument("--p-G", dest="p_G", type=float, nargs="+")
    p.add_argument("--repetitions", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep_ps)

    p = sub.add_parser("ga-study", parents=[common, experiment], help="GA parameter dependence")
    p.add_argument("--parameter", action="append", choices=list(ex.GA_PARAMETERS))
    p.add_argument("--generations", type=int)
    p.set_defaults(func=cmd_ga_study)

    p = sub.add_parser("ga-vs-native", parents=[common, experiment], help="GA against native spin reversal")
    p.add_argument("--realizations", type=int)
    p.add_argument("--generations", type=int)
    p.set_defaults(func=cmd_ga_vs_native)

    p = sub.add_parser("render-layout", parents=[common], help="draw a mask on the Chimera layout")
    p.add_argument("model", help="model written by 'embed'")
    p.add_argument("mask", help="bitstring or file holding one")
    p.add_argument("--name", default="layout.svg")
    p.set_defaults(func=cmd_render_layout)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except (InvalidArgument, ValueError, OSError, KeyError, GAAborted) as exc:
        print(f"spinreversal {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
