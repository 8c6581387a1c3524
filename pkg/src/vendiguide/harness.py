"""Experiment harness: configured runs, sweeps, selection, and reports.

A run generates per-cell samples for one method over several seeds,
evaluates them region by region against the scenario's reference set, and
aggregates. Everything downstream (sweeps, held-out-region selection,
emitted tables) is a pure function of the config and seeds.
"""

from __future__ import annotations

import dataclasses
import hashlib
import itertools
import json
import pathlib
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .diffusion import Condition, NoiseSchedule, make_schedule
from .errors import ContractViolation
from .guidance import (
    ExemplarSet,
    GuidanceConfig,
    GuidanceLog,
    MemoryBank,
    generate_feedback_sequence,
    generate_sequence,
)
from .kernels import KernelSpec, median_bandwidth
from .metrics import EvalSet, MetricsReport, RegionMetrics, region_report
from .scenarios import (
    ScenarioBundle,
    ScenarioSpec,
    build_scenario,
    default_collapse_scenario,
    imbalanced_scenario,
    pick_exemplars,
)
from .vendi import vendi_score

METHODS = (
    "baseline",
    "vendi",
    "context_only",
    "vendi_context",
    "feedback_loss",
    "feedback_entropy",
)

VENDI_METHODS = ("baseline", "vendi", "context_only", "vendi_context")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run needs; defaults give the standard guided setup."""

    scenario: ScenarioSpec = field(default_factory=ScenarioSpec)
    method: str = "vendi_context"
    seeds: tuple = (0,)
    generations_per_cell: int = 200
    eval_k: int = 3
    schedule_steps: int = 50
    beta_min: float = 1e-4
    beta_max: float = 0.35
    eta: float = 0.0
    kernel_kind: str = "rbf"
    kernel_bandwidth: float | None = None  # None: median heuristic on the pool
    epsilon_norm: float = 1e-12
    memory_weight: float = 1.0
    context_weight: float = 2.0
    class_weight: float | None = None
    guide_every: int = 5
    guide_phase: int = 0
    grad_clip: float = 10.0
    exemplars_per_object: int = 2
    exemplar_stratify: str = "random"
    feedback_weight: float = 4.0
    shared_bank: bool = False
    region_average: str = "uniform"
    keep_samples: bool = True

    def __post_init__(self):
        if self.method not in METHODS:
            raise ContractViolation(f"unknown method {self.method!r}")
        if not self.seeds:
            raise ContractViolation("need at least one seed")
        if self.generations_per_cell < 1:
            raise ContractViolation("generations_per_cell must be >= 1")
        if self.method == "baseline" and (
            self.memory_weight != 0 or self.context_weight != 0
        ):
            raise ContractViolation("baseline requires both guidance weights at 0")
        if self.method == "vendi" and self.context_weight != 0:
            raise ContractViolation("method 'vendi' requires context_weight = 0")
        if self.method == "context_only" and (
            self.memory_weight != 0 or self.context_weight <= 0
        ):
            raise ContractViolation(
                "context_only requires memory_weight = 0 and context_weight > 0"
            )
        if self.method in ("context_only", "vendi_context") and (
            self.context_weight > 0 and self.exemplars_per_object < 1
        ):
            raise ContractViolation("context guidance requires exemplars_per_object >= 1")
        if self.method.startswith("feedback") and self.feedback_weight <= 0:
            raise ContractViolation("feedback methods require feedback_weight > 0")
        if self.method.startswith("feedback") and len(self.scenario.regions) < 2:
            raise ContractViolation("feedback methods need a multi-region scenario")

    def guidance_config(self, num_samples: int) -> GuidanceConfig:
        return GuidanceConfig(
            memory_weight=self.memory_weight,
            context_weight=self.context_weight,
            class_weight=self.class_weight,
            guide_every=self.guide_every,
            guide_phase=self.guide_phase,
            num_samples=num_samples,
            grad_clip=self.grad_clip,
        )

    def schedule(self) -> NoiseSchedule:
        return make_schedule(self.schedule_steps, self.beta_min, self.beta_max, self.eta)


def config_flat(config: ExperimentConfig) -> dict:
    """Canonical flat key=value view used for hashing and persistence."""
    out = {}
    for f in dataclasses.fields(config):
        value = getattr(config, f.name)
        if f.name == "scenario":
            for sf in dataclasses.fields(value):
                sval = getattr(value, sf.name)
                if sf.name == "collapse":
                    sval = ";".join(
                        f"{o}@{r}:{frac!r}" for (o, r), frac in sorted(sval.items())
                    )
                elif sf.name == "imbalance":
                    sval = ";".join(f"{r}:{m!r}" for r, m in sorted(sval.items()))
                elif isinstance(sval, tuple):
                    sval = ",".join(str(v) for v in sval)
                out[f"scenario.{sf.name}"] = str(sval)
        elif isinstance(value, tuple):
            out[f.name] = ",".join(str(v) for v in value)
        else:
            out[f.name] = str(value)
    return dict(sorted(out.items()))


def config_text(config: ExperimentConfig) -> str:
    return "\n".join(f"{k} = {v}" for k, v in config_flat(config).items()) + "\n"


def _parse_value(text: str, kind):
    text = text.strip()
    if kind == "maybe_float":
        return None if text == "None" else float(text)
    if kind is bool:
        if text not in ("True", "False"):
            raise ContractViolation(f"expected True or False, got {text!r}")
        return text == "True"
    return kind(text)


_SCENARIO_TYPES = {
    "regions": "str_tuple",
    "objects": "str_tuple",
    "modes_per_cell": int,
    "dim": int,
    "separation": float,
    "collapse": "collapse",
    "imbalance": "imbalance",
    "seed": int,
    "mode_scale": float,
    "jitter": float,
    "reference_per_region": int,
    "exemplar_pool_per_cell": int,
}

_CONFIG_TYPES = {
    "method": str,
    "seeds": "int_tuple",
    "generations_per_cell": int,
    "eval_k": int,
    "schedule_steps": int,
    "beta_min": float,
    "beta_max": float,
    "eta": float,
    "kernel_kind": str,
    "kernel_bandwidth": "maybe_float",
    "epsilon_norm": float,
    "memory_weight": float,
    "context_weight": float,
    "class_weight": "maybe_float",
    "guide_every": int,
    "guide_phase": int,
    "grad_clip": float,
    "exemplars_per_object": int,
    "exemplar_stratify": str,
    "feedback_weight": float,
    "shared_bank": bool,
    "region_average": str,
    "keep_samples": bool,
}


def _convert(key: str, text: str, kind):
    text = text.strip()
    if kind == "str_tuple":
        return tuple(v.strip() for v in text.split(",") if v.strip())
    if kind == "int_tuple":
        return tuple(int(v) for v in text.split(",") if v.strip())
    if kind == "collapse":
        out = {}
        for part in filter(None, (p.strip() for p in text.split(";"))):
            head, _, frac = part.rpartition(":")
            obj, sep, region = head.partition("@")
            if not sep or not frac:
                raise ContractViolation(
                    f"collapse entries look like obj@region:frac, got {part!r}"
                )
            out[(obj.strip(), region.strip())] = float(frac)
        return out
    if kind == "imbalance":
        out = {}
        for part in filter(None, (p.strip() for p in text.split(";"))):
            region, sep, mult = part.rpartition(":")
            if not sep or not region:
                raise ContractViolation(
                    f"imbalance entries look like region:mult, got {part!r}"
                )
            out[region.strip()] = float(mult)
        return out
    try:
        return _parse_value(text, kind)
    except ValueError as exc:
        raise ContractViolation(f"bad value for {key}: {exc}") from exc


# CLI-level presets usable as `scenario.preset = <name>` in config files.
SCENARIO_PRESETS = ("none", "collapse", "imbalanced")


def config_from_flat(flat: dict) -> ExperimentConfig:
    """Inverse of config_flat, plus the scenario.preset convenience key."""
    flat = dict(flat)
    preset = flat.pop("scenario.preset", "none")
    if preset not in SCENARIO_PRESETS:
        raise ContractViolation(
            f"unknown scenario.preset {preset!r}; choose from {SCENARIO_PRESETS}"
        )
    scen_seed = int(flat.get("scenario.seed", "0"))
    if preset == "collapse":
        base_scen = default_collapse_scenario(scen_seed)
    elif preset == "imbalanced":
        base_scen = imbalanced_scenario(scen_seed)
    else:
        base_scen = ScenarioSpec(seed=scen_seed)

    scen_kwargs = {}
    cfg_kwargs = {}
    for key, text in flat.items():
        if key.startswith("scenario."):
            name = key[len("scenario.") :]
            if name not in _SCENARIO_TYPES:
                raise ContractViolation(f"unknown config key {key!r}")
            scen_kwargs[name] = _convert(key, text, _SCENARIO_TYPES[name])
        else:
            if key not in _CONFIG_TYPES:
                raise ContractViolation(f"unknown config key {key!r}")
            cfg_kwargs[key] = _convert(key, text, _CONFIG_TYPES[key])
    scenario = replace(base_scen, **scen_kwargs)
    return ExperimentConfig(scenario=scenario, **cfg_kwargs)


def parse_config_file(path) -> tuple:
    """Read `key = value` lines; returns (flat config dict, sweep grid dict).

    Blank lines and #-comments are skipped. Keys under sweep.* give
    comma-separated value lists for sweep() and are returned separately.
    """
    flat = {}
    grid = {}
    for lineno, raw in enumerate(pathlib.Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ContractViolation(f"line {lineno}: expected key = value, got {raw!r}")
        key = key.strip()
        value = value.strip()
        if key.startswith("sweep."):
            field_name = key[len("sweep.") :]
            if field_name not in SWEEPABLE:
                raise ContractViolation(f"line {lineno}: {field_name!r} not sweepable")
            kind = _CONFIG_TYPES[field_name]
            grid[field_name] = [
                _convert(field_name, v, kind) for v in value.split(",") if v.strip()
            ]
        else:
            flat[key] = value
    return flat, grid


def config_hash(config: ExperimentConfig) -> str:
    return hashlib.sha256(config_text(config).encode()).hexdigest()[:16]


@dataclass
class RunRecord:
    """Outputs of one run: per-seed reports, aggregate, diagnostics."""

    config: ExperimentConfig
    config_hash: str
    per_seed: dict = field(default_factory=dict)  # seed -> MetricsReport
    per_seed_vendi: dict = field(default_factory=dict)  # seed -> mean output score
    aggregate: MetricsReport | None = None
    mean_output_vendi: float = 0.0
    diagnostics: dict = field(default_factory=dict)
    seconds_per_sample: float = 0.0
    samples: dict = field(default_factory=dict)  # (seed, object, region) -> array
    reference: dict = field(default_factory=dict)  # plotting context
    error: str | None = None


def _cell_seed(seed: int, cell_index: int, purpose: int) -> int:
    """Deterministic per-(seed, cell) stream roots, independent of config."""
    state = np.random.SeedSequence((seed, cell_index, purpose)).generate_state(1)
    return int(state[0])


def resolve_kernel(config: ExperimentConfig, bundle: ScenarioBundle) -> KernelSpec:
    bandwidth = config.kernel_bandwidth
    if bandwidth is None:
        bandwidth = median_bandwidth(bundle.exemplar_pool.x)
    return KernelSpec(
        kind=config.kernel_kind,
        bandwidth=bandwidth,
        epsilon_norm=config.epsilon_norm,
    )


def _aggregate_reports(reports: list, regions: list) -> MetricsReport:
    """Field-wise mean over seeds; worst region recomputed from the means."""
    fields = ("precision", "recall", "f1", "consistency")
    per_region = {}
    for region in regions:
        vals = {
            f: float(np.mean([getattr(r.per_region[region], f) for r in reports]))
            for f in fields
        }
        per_region[region] = RegionMetrics(**vals)
    avg = RegionMetrics(
        **{
            f: float(np.mean([getattr(r.average, f) for r in reports]))
            for f in fields
        }
    )
    worst = min(regions, key=lambda r: per_region[r].f1)
    return MetricsReport(
        per_region=per_region,
        average=avg,
        worst_region=worst,
        worst=per_region[worst],
    )


def run_experiment(
    config: ExperimentConfig, bundle: ScenarioBundle | None = None
) -> RunRecord:
    """Execute one configured run over all its seeds and cells.

    Cell failures are recorded in diagnostics["errors"] with the failing
    cell identified; completed cells still contribute to that seed's
    report when every region retains at least one completed cell.
    """
    if bundle is None:
        bundle = build_scenario(config.scenario)
    sched = config.schedule()
    kspec = resolve_kernel(config, bundle)
    spec = config.scenario
    cells = [(obj, region) for region in spec.regions for obj in spec.objects]

    record = RunRecord(config=config, config_hash=config_hash(config))
    record.diagnostics = {
        "guided_steps": 0,
        "degenerate_fallbacks": 0,
        "clipped_steps": 0,
        "errors": [],
        "kernel_bandwidth": kspec.bandwidth,
    }
    if config.keep_samples:
        record.reference = {
            "x": bundle.reference_set.x,
            "objects": bundle.reference_set.objects,
            "regions": bundle.reference_set.regions,
            "mode_means": bundle.reference_world.means,
            "mode_objects": bundle.reference_world.object_labels,
            "mode_regions": bundle.reference_world.region_labels,
        }

    total_time = 0.0
    total_samples = 0
    for seed in config.seeds:
        gen_x = []
        gen_conditions = []
        vendi_cells = []
        shared = MemoryBank() if config.shared_bank else None
        for cell_index, (obj, region) in enumerate(cells):
            cond = Condition(object_label=obj, region_label=region)
            gen_seed = _cell_seed(seed, cell_index, 0)
            ex_seed = _cell_seed(seed, cell_index, 1)
            log = GuidanceLog()
            started = time.perf_counter()
            try:
                if config.method in VENDI_METHODS:
                    gcfg = config.guidance_config(config.generations_per_cell)
                    bank = shared if shared is not None else MemoryBank()
                    if gcfg.context_weight > 0:
                        exemplars = pick_exemplars(
                            bundle.exemplar_pool,
                            cond,
                            config.exemplars_per_object,
                            config.exemplar_stratify,
                            ex_seed,
                        )
                    else:
                        exemplars = ExemplarSet(samples=())
                    samples = generate_sequence(
                        cond,
                        bank,
                        exemplars,
                        gcfg,
                        bundle.sampler_world,
                        sched,
                        kspec,
                        gen_seed,
                        log=log,
                    )
                else:
                    mode = "loss" if config.method == "feedback_loss" else "entropy"
                    # The steering posterior reads off the reference world: the
                    # feedback baselines model an external region classifier,
                    # which knows modes the sampler dropped.
                    samples = generate_feedback_sequence(
                        cond,
                        mode,
                        config.feedback_weight,
                        config.generations_per_cell,
                        bundle.sampler_world,
                        sched,
                        gen_seed,
                        classifier_world=bundle.reference_world,
                    )
            except Exception as exc:  # record and continue with other cells
                record.diagnostics["errors"].append(
                    {"seed": seed, "cell": f"{obj}@{region}", "error": str(exc)}
                )
                continue
            total_time += time.perf_counter() - started
            total_samples += len(samples)
            record.diagnostics["guided_steps"] += log.guided_steps
            record.diagnostics["degenerate_fallbacks"] += log.degenerate_fallbacks
            record.diagnostics["clipped_steps"] += log.clipped_steps
            sample_mat = np.stack(samples)
            gen_x.append(sample_mat)
            gen_conditions.extend([cond] * len(samples))
            vendi_cells.append(vendi_score(samples, kspec).score)
            if config.keep_samples:
                record.samples[(seed, obj, region)] = sample_mat
        if not gen_x:
            continue
        eval_set = EvalSet(
            real_x=bundle.reference_set.x,
            real_objects=bundle.reference_set.objects,
            real_regions=bundle.reference_set.regions,
            gen_x=np.concatenate(gen_x),
            gen_conditions=tuple(gen_conditions),
        )
        try:
            report = region_report(
                eval_set,
                bundle.reference_world,
                k=config.eval_k,
                average=config.region_average,
            )
        except ContractViolation as exc:
            record.diagnostics["errors"].append(
                {"seed": seed, "cell": "<evaluation>", "error": str(exc)}
            )
            continue
        record.per_seed[seed] = report
        record.per_seed_vendi[seed] = float(np.mean(vendi_cells))

    if record.per_seed:
        record.aggregate = _aggregate_reports(
            list(record.per_seed.values()), sorted(spec.regions)
        )
        record.mean_output_vendi = float(np.mean(list(record.per_seed_vendi.values())))
    else:
        record.error = "no seed completed"
    if total_samples:
        record.seconds_per_sample = total_time / total_samples
    return record


# Dotted config paths a sweep may vary without rebuilding the scenario.
SWEEPABLE = (
    "memory_weight",
    "context_weight",
    "class_weight",
    "guide_every",
    "guide_phase",
    "grad_clip",
    "exemplars_per_object",
    "exemplar_stratify",
    "feedback_weight",
    "generations_per_cell",
    "eval_k",
    "method",
    "eta",
    "kernel_bandwidth",
)


def sweep(base: ExperimentConfig, grid: dict) -> list:
    """One run per grid point, deterministic order, shared scenario build.

    grid maps sweepable field names to value lists; points are the
    cartesian product in sorted-key order. A failing point yields a record
    with error set instead of aborting the sweep.
    """
    for key in grid:
        if key not in SWEEPABLE:
            raise ContractViolation(f"field {key!r} is not sweepable")
    bundle = build_scenario(base.scenario)
    keys = sorted(grid)
    records = []
    for values in itertools.product(*(grid[k] for k in keys)):
        assignment = dict(zip(keys, values))
        try:
            cfg = replace(base, **assignment)
            records.append(run_experiment(cfg, bundle))
        except Exception as exc:
            failed = RunRecord(config=base, config_hash="<invalid>")
            failed.error = f"{assignment}: {exc}"
            records.append(failed)
    return records


def one_region_out_select(records: list) -> dict:
    """For each region, the record maximizing mean F1 over the other regions.

    Ties break toward the lexicographically smallest canonical config text.
    All records must be error-free and share one region set.
    """
    if not records:
        raise ContractViolation("no records to select from")
    usable = []
    for rec in records:
        if rec.error is not None or rec.aggregate is None:
            raise ContractViolation(f"record {rec.config_hash} has no results")
        usable.append(rec)
    regions = sorted(usable[0].aggregate.per_region)
    for rec in usable:
        missing = set(regions) ^ set(rec.aggregate.per_region)
        if missing:
            raise ContractViolation(
                f"record {rec.config_hash} region set differs: {sorted(missing)}"
            )
    ordered = sorted(usable, key=lambda r: config_text(r.config))
    selection = {}
    for held_out in regions:
        rest = [r for r in regions if r != held_out]
        selection[held_out] = max(
            ordered,
            key=lambda rec: float(
                np.mean([rec.aggregate.per_region[r].f1 for r in rest])
            ),
        )
    return selection


RESULTS_HEADER = "method,region,seed,precision,recall,f1,consistency,config_hash"


def emit_reports(records: list, out_dir) -> list:
    """Write results.csv, aggregate.txt, and plot-data files; returns paths.

    Floats are written with repr, so parsing a table back recovers the
    in-memory values bit-exactly.
    """
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []

    rows = []
    for rec in records:
        if rec.error is not None:
            continue
        for seed in sorted(rec.per_seed):
            report = rec.per_seed[seed]
            for region in sorted(report.per_region):
                m = report.per_region[region]
                rows.append(
                    f"{rec.config.method},{region},{seed},{m.precision!r},"
                    f"{m.recall!r},{m.f1!r},{m.consistency!r},{rec.config_hash}"
                )
    results_path = out / "results.csv"
    results_path.write_text(RESULTS_HEADER + "\n" + "".join(r + "\n" for r in rows))
    paths.append(results_path)

    blocks = []
    for rec in records:
        if rec.error is not None:
            blocks.append(f"run {rec.config_hash} FAILED: {rec.error}\n")
            continue
        agg = rec.aggregate
        lines = [
            f"run {rec.config_hash} method={rec.config.method} "
            f"seeds={','.join(str(s) for s in sorted(rec.per_seed))}",
            f"  mean_output_vendi={rec.mean_output_vendi!r}",
            f"  seconds_per_sample={rec.seconds_per_sample:.6f}",
            "  region precision recall f1 consistency",
        ]
        for region in sorted(agg.per_region):
            m = agg.per_region[region]
            lines.append(
                f"  {region} {m.precision!r} {m.recall!r} {m.f1!r} {m.consistency!r}"
            )
        a = agg.average
        lines.append(
            f"  Avg {a.precision!r} {a.recall!r} {a.f1!r} {a.consistency!r}"
        )
        w = agg.worst
        lines.append(
            f"  Worst-Reg[{agg.worst_region}] {w.precision!r} {w.recall!r} "
            f"{w.f1!r} {w.consistency!r}"
        )
        blocks.append("\n".join(lines) + "\n")
    aggregate_path = out / "aggregate.txt"
    aggregate_path.write_text("\n".join(blocks))
    paths.append(aggregate_path)

    curve_lines = ["# columns: method memory_weight context_weight mean_output_vendi avg_f1"]
    for rec in records:
        if rec.error is not None:
            continue
        curve_lines.append(
            f"{rec.config.method} {rec.config.memory_weight!r} "
            f"{rec.config.context_weight!r} {rec.mean_output_vendi!r} "
            f"{rec.aggregate.average.f1!r}"
        )
    curve_path = out / "vendi_curve.txt"
    curve_path.write_text("".join(line + "\n" for line in curve_lines))
    paths.append(curve_path)

    for rec in records:
        if rec.error is not None or not rec.samples:
            continue
        lines = ["# columns: kind x* object region"]
        ref = rec.reference
        if ref:
            for i in range(ref["mode_means"].shape[0]):
                coords = " ".join(repr(float(v)) for v in ref["mode_means"][i])
                lines.append(
                    f"mode {coords} {ref['mode_objects'][i]} {ref['mode_regions'][i]}"
                )
            for i in range(ref["x"].shape[0]):
                coords = " ".join(repr(float(v)) for v in ref["x"][i])
                lines.append(f"real {coords} {ref['objects'][i]} {ref['regions'][i]}")
        for (seed, obj, region) in sorted(rec.samples):
            mat = rec.samples[(seed, obj, region)]
            for row in mat:
                coords = " ".join(repr(float(v)) for v in row)
                lines.append(f"gen {coords} {obj} {region}")
        scatter_path = out / f"scatter_{rec.config.method}_{rec.config_hash}.txt"
        scatter_path.write_text("".join(line + "\n" for line in lines))
        paths.append(scatter_path)

    return paths


def parse_results_table(path) -> list:
    """Rows of results.csv as dicts with floats restored exactly."""
    lines = pathlib.Path(path).read_text().splitlines()
    if not lines or lines[0] != RESULTS_HEADER:
        raise ContractViolation("results table header mismatch")
    names = RESULTS_HEADER.split(",")
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != len(names):
            raise ContractViolation(f"malformed results row: {line!r}")
        row = dict(zip(names, parts))
        row["seed"] = int(row["seed"])
        for key in ("precision", "recall", "f1", "consistency"):
            row[key] = float(row[key])
        rows.append(row)
    return rows


def _report_to_dict(report: MetricsReport) -> dict:
    return {
        "per_region": {
            r: dataclasses.asdict(m) for r, m in sorted(report.per_region.items())
        },
        "average": dataclasses.asdict(report.average),
        "worst_region": report.worst_region,
        "worst": dataclasses.asdict(report.worst),
    }


def _report_from_dict(data: dict) -> MetricsReport:
    return MetricsReport(
        per_region={r: RegionMetrics(**m) for r, m in data["per_region"].items()},
        average=RegionMetrics(**data["average"]),
        worst_region=data["worst_region"],
        worst=RegionMetrics(**data["worst"]),
    )


def save_records(records: list, path) -> None:
    """JSON dump of run results (sample arrays are not persisted)."""
    payload = []
    for rec in records:
        payload.append(
            {
                "config": config_flat(rec.config),
                "config_hash": rec.config_hash,
                "per_seed": {
                    str(s): _report_to_dict(r) for s, r in sorted(rec.per_seed.items())
                },
                "per_seed_vendi": {
                    str(s): v for s, v in sorted(rec.per_seed_vendi.items())
                },
                "aggregate": (
                    None if rec.aggregate is None else _report_to_dict(rec.aggregate)
                ),
                "mean_output_vendi": rec.mean_output_vendi,
                "diagnostics": rec.diagnostics,
                "seconds_per_sample": rec.seconds_per_sample,
                "error": rec.error,
            }
        )
    pathlib.Path(path).write_text(json.dumps(payload, indent=1, sort_keys=True))


def load_records(path) -> list:
    """Records saved by save_records, with configs fully reconstructed."""
    payload = json.loads(pathlib.Path(path).read_text())
    records = []
    for item in payload:
        rec = RunRecord(
            config=config_from_flat(item["config"]),
            config_hash=item["config_hash"],
        )
        rec.per_seed = {
            int(s): _report_from_dict(r) for s, r in item["per_seed"].items()
        }
        rec.per_seed_vendi = {int(s): v for s, v in item["per_seed_vendi"].items()}
        if item["aggregate"] is not None:
            rec.aggregate = _report_from_dict(item["aggregate"])
        rec.mean_output_vendi = item["mean_output_vendi"]
        rec.diagnostics = item["diagnostics"]
        rec.seconds_per_sample = item["seconds_per_sample"]
        rec.error = item["error"]
        records.append(rec)
    return records
