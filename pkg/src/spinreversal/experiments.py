"""Experiment harness: reversal-probability sweeps, GA parameter studies, GA vs native.

Every experiment is a pure function of its :class:`ExperimentSpec`.  Outputs are
CSV (one row per measurement, each carrying the seeds it was produced from)
plus SVG charts, and the ExperimentSpec is written next to them as ``spec.json``
so a run can be replayed byte-for-byte.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import plots
from .chimera import PhysicalIsing, chimera, embed_complete, embed_model, expand_chain_mask, random_mask, smallest_chimera_for
from .errors import InvalidArgument
from .genetic import BASE_PARAMETERS, CHAIN, QUBIT, STANDARD_PARAMETERS, GAConfig, GAHistory, SamplerEvaluator, run_ga
from .graphs import MAX_CLIQUE, MIN_VERTEX_COVER, PROBLEM_KINDS, erdos_renyi, reduce
from .ising import qubo_to_ising
from .sampler import PHYSICAL, NoiseModel, SamplerConfig, score, solve_native, solve_with_mask
from .seeding import EXPERIMENT, derive_seed

log = logging.getLogger(__name__)

P_G_GRID = (0.1, 0.3, 0.5, 0.7, 0.9)
P_S_GRID = (0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99)
GA_PARAMETERS = {"N": "population", "p_spin": "p_spin", "p_mat": "p_mat", "p_mut": "p_mut"}
STUDY_VALUES = {
    QUBIT: {"N": (20, 50, 80), "p_spin": (0.001, 0.01, 0.1), "p_mat": (0.1, 0.3, 0.5), "p_mut": (0.001, 0.01, 0.1)},
    CHAIN: {"N": (20, 50, 80), "p_spin": (0.1, 0.3, 0.5), "p_mat": (0.1, 0.3, 0.5), "p_mut": (0.001, 0.01, 0.1)},
}

# Short anneals: the emulator is far stronger than the hardware at desk problem
# sizes, and with long schedules every read reaches the ground state.
DESK_SWEEPS = 10

_SWEEP = 0
_STUDY = 1
_VERSUS = 2


def _problems(problem: str) -> tuple[str, ...]:
    if problem == "both":
        return PROBLEM_KINDS
    if problem in ("mvc", MIN_VERTEX_COVER):
        return (MIN_VERTEX_COVER,)
    if problem in ("clique", MAX_CLIQUE):
        return (MAX_CLIQUE,)
    raise InvalidArgument(f"unknown problem {problem!r}")


@dataclass(frozen=True)
class ExperimentSpec:
    problem: str = MAX_CLIQUE
    vertices: int = 12
    p_G: tuple[float, ...] = P_G_GRID
    p_s: tuple[float, ...] = P_S_GRID
    repetitions: int = 10
    level: str = QUBIT
    num_anneals: int = 200
    num_transforms: int = 10
    native_reads: int = 200
    realizations: int = 6
    seed: int = 0
    t: int = 4
    chimera_size: int | None = None
    noise: NoiseModel = field(default_factory=NoiseModel)
    sampler: SamplerConfig = field(default_factory=lambda: SamplerConfig(num_reads=200, num_sweeps=DESK_SWEEPS))
    ga: GAConfig = field(default_factory=lambda: GAConfig(generations=100, num_anneals=200, **STANDARD_PARAMETERS))

    def __post_init__(self):
        _problems(self.problem)
        if self.level not in (QUBIT, CHAIN):
            raise InvalidArgument(f"level must be {QUBIT!r} or {CHAIN!r}")
        if self.repetitions < 1:
            raise InvalidArgument("repetitions must be >= 1")
        if self.num_transforms > self.native_reads:
            raise InvalidArgument("num_transforms exceeds native_reads")
        object.__setattr__(self, "p_G", tuple(self.p_G))
        object.__setattr__(self, "p_s", tuple(self.p_s))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        data = dict(data)
        nested = {"noise": NoiseModel, "sampler": SamplerConfig, "ga": GAConfig}
        for key, typ in nested.items():
            if key in data and isinstance(data[key], dict):
                data[key] = typ(**data[key])
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidArgument(f"unknown experiment fields: {sorted(unknown)}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentSpec":
        return cls.from_dict(json.loads(text))


def paper_scale(spec: ExperimentSpec) -> ExperimentSpec:
    """Sizes used on the 2000Q: |V| = 64 on a 16x16 Chimera, 50 repetitions, 1000 anneals."""
    return replace(
        spec,
        vertices=64,
        repetitions=50,
        num_anneals=1000,
        native_reads=10000,
        num_transforms=100,
        chimera_size=16,
        sampler=replace(spec.sampler, num_reads=1000),
        ga=replace(spec.ga, num_anneals=1000),
    )


def build_instance(kind: str, vertices: int, p_G: float, graph_seed: int, spec: ExperimentSpec) -> PhysicalIsing:
    """Graph -> QUBO -> Ising -> complete-graph chain embedding on Chimera."""
    g = erdos_renyi(vertices, p_G, graph_seed)
    ising = qubo_to_ising(reduce(g, kind).qubo)
    topo = chimera(spec.chimera_size, spec.chimera_size, spec.t) if spec.chimera_size else smallest_chimera_for(vertices, spec.t)
    return embed_model(ising, embed_complete(vertices, topo), topo=topo)


def _physical_mask(phys: PhysicalIsing, p_s: float, level: str, seed: int) -> np.ndarray:
    if level == CHAIN:
        return expand_chain_mask(random_mask(len(phys.embedding), p_s, seed), phys.embedding).array
    return random_mask(phys.model.n, p_s, seed).array


def _sweep_job(args):
    spec, kind, ig, js, rep = args
    p_G, p_s = spec.p_G[ig], spec.p_s[js]
    graph_seed = derive_seed(spec.seed, EXPERIMENT, _SWEEP, ig, js, rep, 0)
    mask_seed = derive_seed(spec.seed, EXPERIMENT, _SWEEP, ig, js, rep, 1)
    sampler_seed = derive_seed(spec.seed, EXPERIMENT, _SWEEP, ig, js, rep, 2)
    phys = build_instance(kind, spec.vertices, p_G, graph_seed, spec)
    cfg = replace(spec.sampler, num_reads=spec.num_anneals, seed=sampler_seed)
    n = phys.model.n
    standard = score(solve_with_mask(phys.model, np.zeros(n, bool), spec.noise, cfg, phys.qubits, PHYSICAL))
    masked = score(solve_with_mask(phys.model, _physical_mask(phys, p_s, spec.level, mask_seed), spec.noise, cfg, phys.qubits, PHYSICAL))
    native = score(solve_native(phys.model, spec.native_reads, spec.num_transforms, spec.noise, replace(cfg, num_reads=spec.native_reads), phys.qubits, PHYSICAL))
    return {
        "problem": kind, "p_G": p_G, "p_s": p_s, "repetition": rep, "level": spec.level,
        "standard": standard, "masked": masked, "native": native,
        "seed": spec.seed, "chip_seed": spec.noise.chip_seed,
        "graph_seed": graph_seed, "mask_seed": mask_seed, "sampler_seed": sampler_seed,
    }


def _map(fn, jobs, workers: int, on_result=None):
    """Ordered map; ``on_result`` sees each result as soon as it and its predecessors are done."""
    out = []
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            for r in pool.map(fn, jobs):
                out.append(r)
                if on_result is not None:
                    on_result(r)
        return out
    for j in jobs:
        out.append(fn(j))
        if on_result is not None:
            on_result(out[-1])
    return out


def _std(x) -> float:
    x = np.asarray(x, float)
    return float(x.std(ddof=1)) if x.size > 1 else 0.0


def _to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()


def sweep_ps(spec: ExperimentSpec, workers: int = 1, on_row=None):
    """Score difference to the standard anneal for each (p_G, p_s); a new instance every repetition.

    Returns ``(summary_rows, raw_rows)``.  Differences are ``method - standard``,
    so negative means the method found lower energies.
    """
    jobs = [
        (spec, kind, ig, js, rep)
        for kind in _problems(spec.problem)
        for ig in range(len(spec.p_G))
        for js in range(len(spec.p_s))
        for rep in range(spec.repetitions)
    ]
    raw = _map(_sweep_job, jobs, workers, on_row)
    summary = []
    for kind in _problems(spec.problem):
        for p_G in spec.p_G:
            for p_s in spec.p_s:
                cell = [r for r in raw if r["problem"] == kind and r["p_G"] == p_G and r["p_s"] == p_s]
                d = [r["masked"] - r["standard"] for r in cell]
                dn = [r["native"] - r["standard"] for r in cell]
                summary.append({
                    "problem": kind, "p_G": p_G, "p_s": p_s, "level": spec.level,
                    "mean_diff": float(np.mean(d)), "std_diff": _std(d),
                    "native_mean_diff": float(np.mean(dn)), "native_std_diff": _std(dn),
                    "repetitions": len(cell), "seed": spec.seed, "chip_seed": spec.noise.chip_seed,
                })
    return summary, raw


def _fixed_instance(spec: ExperimentSpec, kind: str, tag: int) -> tuple[PhysicalIsing, int]:
    graph_seed = derive_seed(spec.seed, EXPERIMENT, tag, PROBLEM_KINDS.index(kind))
    p_G = 0.5 if 0.5 in spec.p_G else spec.p_G[len(spec.p_G) // 2]
    return build_instance(kind, spec.vertices, p_G, graph_seed, spec), graph_seed


def ga_param_study(spec: ExperimentSpec, parameter: str, values=None):
    """One GA run per value of ``parameter`` with the others at the base set, on one fixed instance.

    Chain-level studies start from ``p_spin = 0.5``.  All runs share the GA seed,
    so runs that differ only in ``p_mat`` or ``p_mut`` start from the same population.
    """
    if parameter not in GA_PARAMETERS:
        raise InvalidArgument(f"unknown GA parameter {parameter!r}; expected one of {sorted(GA_PARAMETERS)}")
    values = STUDY_VALUES[spec.level][parameter] if values is None else tuple(values)
    kind = _problems(spec.problem)[0]
    phys, graph_seed = _fixed_instance(spec, kind, _STUDY)
    evaluator = SamplerEvaluator.for_physical(phys, spec.noise, spec.sampler)
    base = dict(BASE_PARAMETERS)
    if spec.level == CHAIN:
        base["p_spin"] = 0.5
    rows = []
    for value in values:
        params = dict(base, **{GA_PARAMETERS[parameter]: value})
        cfg = replace(spec.ga, level=spec.level, seed=spec.seed, **params)
        hist = run_ga(evaluator, cfg).history
        for r in hist.records:
            rows.append({
                "parameter": parameter, "value": value, "generation": r.generation,
                "best_e": r.best_fitness, "best_so_far_e": r.best_so_far_fitness, "best_score": r.best_score,
                "best_popcount": r.best_popcount, "problem": kind, "level": spec.level,
                "seed": spec.seed, "ga_seed": cfg.seed, "chip_seed": spec.noise.chip_seed, "graph_seed": graph_seed,
            })
    return rows


@dataclass
class VersusTrace:
    problem: str
    realization: int
    native_score: float
    ga_scores: list[float]
    history: GAHistory
    ga_seed: int
    graph_seed: int


def ga_versus_native_run(phys: PhysicalIsing, noise: NoiseModel, sampler: SamplerConfig, ga: GAConfig,
                         native_reads: int, num_transforms: int, native_seed: int, eval_seed: int):
    """Native baseline and, per generation, a fresh-seed 1%-score of that generation's best mask.

    Re-scoring with new anneals keeps the comparison free of the selection bias in
    the GA's own fitness evaluations.
    """
    evaluator = SamplerEvaluator.for_physical(phys, noise, sampler)
    native = score(solve_native(phys.model, native_reads, num_transforms, noise,
                                replace(sampler, num_reads=native_reads, seed=native_seed), phys.qubits, PHYSICAL))
    hist = run_ga(evaluator, ga).history
    ga_scores = []
    for r in hist.records:
        mask = np.array([c == "1" for c in r.best_mask], dtype=bool)
        ss = evaluator(mask, ga.level, ga.num_anneals, derive_seed(eval_seed, r.generation))
        ga_scores.append(score(ss, ga.score_fraction))
    return native, ga_scores, hist


def ga_vs_native(spec: ExperimentSpec) -> list[VersusTrace]:
    traces = []
    for kind in _problems(spec.problem):
        phys, graph_seed = _fixed_instance(spec, kind, _VERSUS)
        for k in range(spec.realizations):
            ga_seed = derive_seed(spec.seed, EXPERIMENT, _VERSUS, PROBLEM_KINDS.index(kind), k, 0)
            native_seed = derive_seed(spec.seed, EXPERIMENT, _VERSUS, PROBLEM_KINDS.index(kind), k, 1)
            eval_seed = derive_seed(spec.seed, EXPERIMENT, _VERSUS, PROBLEM_KINDS.index(kind), k, 2)
            cfg = replace(spec.ga, level=spec.level, seed=ga_seed)
            native, ga_scores, hist = ga_versus_native_run(
                phys, spec.noise, spec.sampler, cfg, spec.native_reads, spec.num_transforms, native_seed, eval_seed)
            traces.append(VersusTrace(kind, k, native, ga_scores, hist, ga_seed, graph_seed))
    return traces


def reversal_count_trace(history: GAHistory) -> list[int]:
    if not history.records:
        raise InvalidArgument("empty history")
    return history.popcounts()


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text)
    return path


def run_sweep(spec: ExperimentSpec, out: Path, workers: int = 1) -> list[Path]:
    out = Path(out)
    _write(out, "spec.json", spec.to_json())
    partial = out / "sweep_ps_raw.partial.csv"
    partial.unlink(missing_ok=True)

    def flush(row):
        new = not partial.exists()
        with partial.open("a") as fh:
            fh.write(_to_csv([row]) if new else _to_csv([row]).split("\n", 1)[1])

    summary, raw = sweep_ps(spec, workers, flush)
    partial.unlink(missing_ok=True)
    paths = [out / "spec.json",
             _write(out, "sweep_ps.csv", _to_csv(summary)),
             _write(out, "sweep_ps_raw.csv", _to_csv(raw))]
    for kind in _problems(spec.problem):
        series = {}
        for p_G in spec.p_G:
            rows = [r for r in summary if r["problem"] == kind and r["p_G"] == p_G]
            series[f"p_G={p_G}"] = ([r["p_s"] for r in rows], [r["mean_diff"] for r in rows], [r["std_diff"] for r in rows])
        rows = [r for r in summary if r["problem"] == kind]
        native = {}
        for r in rows:
            native.setdefault(r["p_s"], []).append(r["native_mean_diff"])
        series["native"] = (list(native), [float(np.mean(v)) for v in native.values()])
        path = out / f"sweep_ps_{kind}.svg"
        plots.line_chart(series, path, f"{kind}, {spec.level} level", "p_s", "score difference to standard anneal")
        paths.append(path)
    return paths


def run_study(spec: ExperimentSpec, out: Path, parameters=None) -> list[Path]:
    out = Path(out)
    parameters = parameters or list(GA_PARAMETERS)
    rows = []
    paths = [_write(out, "spec.json", spec.to_json())]
    for p in parameters:
        prow = ga_param_study(spec, p)
        rows += prow
        series = {}
        for r in prow:
            series.setdefault(f"{p}={r['value']}", ([], []))
            series[f"{p}={r['value']}"][0].append(r["generation"])
            series[f"{p}={r['value']}"][1].append(r["best_e"])
        path = out / f"ga_study_{p}.svg"
        plots.line_chart(series, path, f"GA dependence on {p} ({spec.level} level)", "generation", "best energy")
        paths.append(path)
    paths.append(_write(out, "ga_study.csv", _to_csv(rows)))
    return paths


def run_versus(spec: ExperimentSpec, out: Path) -> list[Path]:
    out = Path(out)
    traces = ga_vs_native(spec)
    rows = []
    for tr in traces:
        for r, ga_score in zip(tr.history.records, tr.ga_scores):
            rows.append({
                "problem": tr.problem, "realization": tr.realization, "generation": r.generation,
                "ga_score": ga_score, "ga_selected_score": r.best_score, "native_score": tr.native_score,
                "difference": ga_score - tr.native_score, "best_popcount": r.best_popcount,
                "seed": spec.seed, "ga_seed": tr.ga_seed, "chip_seed": spec.noise.chip_seed, "graph_seed": tr.graph_seed,
            })
    paths = [_write(out, "spec.json", spec.to_json()), _write(out, "ga_vs_native.csv", _to_csv(rows))]
    diff, counts = {}, {}
    for tr in traces:
        label = f"{tr.problem} #{tr.realization}"
        gens = [r.generation for r in tr.history.records]
        diff[label] = (gens, [g - tr.native_score for g in tr.ga_scores])
        counts[label] = (gens, reversal_count_trace(tr.history))
    plots.line_chart(diff, out / "ga_vs_native.svg", "GA best mask minus native spin reversal", "generation", "1%-score difference")
    plots.line_chart(counts, out / "reversal_counts.svg", "Spin reversals in the best mask", "generation", "reversed qubits")
    paths += [out / "ga_vs_native.svg", out / "reversal_counts.svg"]
    if spec.level == QUBIT and traces:
        tr = traces[0]
        phys, _ = _fixed_instance(spec, tr.problem, _VERSUS)
        for tag, rec in (("first", tr.history.records[0]), ("last", tr.history.records[-1])):
            mask = np.array([c == "1" for c in rec.best_mask], dtype=bool)
            path = out / f"layout_{tag}.svg"
            plots.render_layout(phys.topology, phys.embedding, mask, path)
            paths.append(path)
    return paths
