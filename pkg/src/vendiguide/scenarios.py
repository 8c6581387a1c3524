"""Synthetic mixture worlds with controllable coverage bias.

A scenario lays one Gaussian mode per (object, region, mode-slot) triple on
a jittered lattice, then derives a biased sampler world by dropping modes
per cell (coverage collapse) and skewing reference counts per region
(data imbalance). Everything is reproducible from the spec seed alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .diffusion import Component, Condition, MixtureWorld
from .errors import ContractViolation
from .guidance import ExemplarSet


@dataclass(frozen=True)
class ScenarioSpec:
    """Declarative description of a scenario.

    collapse maps (object, region) cells to the fraction of modes the
    sampler world retains (1.0 elsewhere); imbalance multiplies a region's
    reference-sample count. separation is the lattice spacing in units of
    the per-mode standard deviation mode_scale.
    """

    regions: tuple = ("r0", "r1", "r2")
    objects: tuple = ("o0", "o1", "o2", "o3")
    modes_per_cell: int = 4
    dim: int = 2
    separation: float = 6.0
    collapse: dict = field(default_factory=dict)
    imbalance: dict = field(default_factory=dict)
    seed: int = 0
    mode_scale: float = 1.0
    jitter: float = 0.15
    reference_per_region: int = 150
    exemplar_pool_per_cell: int = 20

    def __post_init__(self):
        if not self.regions or not self.objects:
            raise ContractViolation("need at least one region and one object")
        if len(set(self.regions)) != len(self.regions):
            raise ContractViolation("duplicate region ids")
        if len(set(self.objects)) != len(self.objects):
            raise ContractViolation("duplicate object ids")
        if self.modes_per_cell < 1:
            raise ContractViolation("modes_per_cell must be >= 1")
        if self.dim < 1:
            raise ContractViolation("dim must be >= 1")
        if not self.separation > 0:
            raise ContractViolation("separation must be positive")
        if not self.mode_scale > 0:
            raise ContractViolation("mode_scale must be positive")
        if not 0.0 <= self.jitter < 0.5:
            raise ContractViolation("jitter must lie in [0, 0.5)")
        for key, frac in self.collapse.items():
            if not (isinstance(key, tuple) and len(key) == 2):
                raise ContractViolation("collapse keys must be (object, region) pairs")
            if key[0] not in self.objects or key[1] not in self.regions:
                raise ContractViolation(f"collapse key {key} not in scenario")
            if not 0.0 < frac <= 1.0:
                raise ContractViolation("collapse fractions must lie in (0, 1]")
        for region, mult in self.imbalance.items():
            if region not in self.regions:
                raise ContractViolation(f"imbalance region {region!r} not in scenario")
            if not mult > 0:
                raise ContractViolation("imbalance multipliers must be positive")
        if self.reference_per_region < 1 or self.exemplar_pool_per_cell < 1:
            raise ContractViolation("sample counts must be >= 1")


@dataclass(frozen=True)
class LabeledSamples:
    """Rows of points with aligned object and region labels."""

    x: np.ndarray
    objects: tuple
    regions: tuple

    def __post_init__(self):
        if len(self.objects) != self.x.shape[0] or len(self.regions) != self.x.shape[0]:
            raise ContractViolation("labels must align with sample rows")

    def __len__(self) -> int:
        return self.x.shape[0]


@dataclass(frozen=True)
class ScenarioBundle:
    spec: ScenarioSpec
    reference_world: MixtureWorld
    sampler_world: MixtureWorld
    reference_set: LabeledSamples
    exemplar_pool: LabeledSamples


def _lattice(total: int, dim: int, separation: float) -> np.ndarray:
    """First `total` lattice points of an origin-centered grid."""
    side = max(1, math.ceil(total ** (1.0 / dim)))
    while side**dim < total:
        side += 1
    axes = np.indices((side,) * dim).reshape(dim, -1).T[:total]
    return (axes - (side - 1) / 2.0) * separation


def _draw_from(world: MixtureWorld, idx: np.ndarray, count: int, rng) -> tuple:
    """count draws from the renormalized component subset idx."""
    w = world.weights[idx] / world.weights[idx].sum()
    picks = rng.choice(idx, size=count, p=w)
    noise = rng.standard_normal((count, world.dim))
    x = world.means[picks] + np.sqrt(world.cov_diags[picks]) * noise
    objects = tuple(world.object_labels[i] for i in picks)
    regions = tuple(world.region_labels[i] for i in picks)
    return x, objects, regions


def build_scenario(spec: ScenarioSpec) -> ScenarioBundle:
    """Materialize worlds and sample sets from a spec, deterministically.

    Child streams are split per stage, so e.g. changing only the collapse
    map leaves the mode layout untouched.
    """
    root = np.random.SeedSequence(spec.seed)
    layout_rng, drop_rng, ref_rng, pool_rng = (
        np.random.default_rng(s) for s in root.spawn(4)
    )

    cells = [(obj, region) for region in spec.regions for obj in spec.objects]
    total = len(cells) * spec.modes_per_cell
    centers = _lattice(total, spec.dim, spec.separation)
    jitter_width = spec.jitter * spec.separation
    if jitter_width > 0:
        centers = centers + layout_rng.uniform(
            -jitter_width, jitter_width, size=centers.shape
        )
    # Shuffle node assignment so regions interleave spatially.
    order = layout_rng.permutation(total)

    components = []
    cell_component_idx: dict = {cell: [] for cell in cells}
    for i in range(total):
        obj, region = cells[i // spec.modes_per_cell]
        components.append(
            Component(
                mean=centers[order[i]],
                cov_diag=np.full(spec.dim, spec.mode_scale**2),
                weight=1.0 / total,
                object_label=obj,
                region_label=region,
            )
        )
        cell_component_idx[(obj, region)].append(i)
    reference_world = MixtureWorld(components)

    kept: list[int] = []
    for cell in cells:
        idx = cell_component_idx[cell]
        frac = spec.collapse.get(cell, 1.0)
        n_keep = max(1, math.ceil(frac * len(idx)))
        if n_keep >= len(idx):
            kept.extend(idx)
        else:
            chosen = drop_rng.choice(len(idx), size=n_keep, replace=False)
            kept.extend(idx[i] for i in sorted(chosen))
    kept = sorted(kept)
    sampler_world = MixtureWorld([components[i] for i in kept])

    ref_parts = []
    for region in spec.regions:
        mult = spec.imbalance.get(region, 1.0)
        count = max(1, round(spec.reference_per_region * mult))
        idx = reference_world.component_indices(region_label=region)
        ref_parts.append(_draw_from(reference_world, idx, count, ref_rng))
    reference_set = LabeledSamples(
        x=np.concatenate([p[0] for p in ref_parts]),
        objects=tuple(o for p in ref_parts for o in p[1]),
        regions=tuple(r for p in ref_parts for r in p[2]),
    )

    pool_parts = []
    for obj, region in cells:
        idx = reference_world.component_indices(object_label=obj, region_label=region)
        pool_parts.append(
            _draw_from(reference_world, idx, spec.exemplar_pool_per_cell, pool_rng)
        )
    exemplar_pool = LabeledSamples(
        x=np.concatenate([p[0] for p in pool_parts]),
        objects=tuple(o for p in pool_parts for o in p[1]),
        regions=tuple(r for p in pool_parts for r in p[2]),
    )

    return ScenarioBundle(
        spec=spec,
        reference_world=reference_world,
        sampler_world=sampler_world,
        reference_set=reference_set,
        exemplar_pool=exemplar_pool,
    )


def pick_exemplars(
    pool: LabeledSamples,
    cond: Condition,
    count: int,
    stratify: str = "random",
    seed: int = 0,
) -> ExemplarSet:
    """Choose exemplars for a condition from the pool without replacement.

    "random" draws among the condition's object across all regions;
    "per_region" restricts to the exact (object, region) cell. Asking for
    the full eligible set returns it in seeded order.
    """
    if stratify not in ("random", "per_region"):
        raise ContractViolation(f"unknown stratify mode {stratify!r}")
    if count < 1:
        raise ContractViolation("count must be >= 1")
    objects = np.array(pool.objects)
    regions = np.array(pool.regions)
    mask = objects == cond.object_label
    if stratify == "per_region":
        mask &= regions == cond.region_label
    eligible = np.flatnonzero(mask)
    if eligible.size < count:
        raise ContractViolation(
            f"need {count} exemplars for {cond}, pool has {eligible.size}"
        )
    rng = np.random.default_rng(seed)
    chosen = eligible[rng.choice(eligible.size, size=count, replace=False)]
    return ExemplarSet.from_arrays([pool.x[i] for i in chosen])


def default_collapse_scenario(seed: int = 0) -> ScenarioSpec:
    """Three regions by four objects; every cell of region r0 keeps only a
    quarter of its modes, making r0 the designed worst region."""
    spec = ScenarioSpec(seed=seed)
    return ScenarioSpec(
        seed=seed,
        collapse={(obj, "r0"): 0.25 for obj in spec.objects},
    )


def imbalanced_scenario(seed: int = 0) -> ScenarioSpec:
    """Collapse plus skewed reference counts across regions."""
    spec = ScenarioSpec(seed=seed)
    return ScenarioSpec(
        seed=seed,
        collapse={(obj, "r0"): 0.25 for obj in spec.objects},
        imbalance={"r0": 0.5, "r2": 1.75},
    )


def _format_floats(values) -> str:
    return ",".join(repr(float(v)) for v in np.asarray(values).ravel())


def _world_lines(world: MixtureWorld, name: str) -> list:
    lines = []
    for i, comp in enumerate(world.components):
        lines.append(
            f"component world={name} index={i} object={comp.object_label} "
            f"region={comp.region_label} weight={comp.weight!r} "
            f"mean={_format_floats(comp.mean)} cov={_format_floats(comp.cov_diag)}"
        )
    return lines


def _samples_lines(samples: LabeledSamples, name: str) -> list:
    return [
        f"sample set={name} index={i} object={samples.objects[i]} "
        f"region={samples.regions[i]} x={_format_floats(samples.x[i])}"
        for i in range(len(samples))
    ]


def serialize_bundle(bundle: ScenarioBundle) -> str:
    """Line-oriented text form: one labeled record per component or sample."""
    spec = bundle.spec
    lines = ["# scenario bundle v1"]
    lines.append(
        "spec "
        f"regions={','.join(spec.regions)} objects={','.join(spec.objects)} "
        f"modes_per_cell={spec.modes_per_cell} dim={spec.dim} "
        f"separation={spec.separation!r} seed={spec.seed} "
        f"mode_scale={spec.mode_scale!r} jitter={spec.jitter!r} "
        f"reference_per_region={spec.reference_per_region} "
        f"exemplar_pool_per_cell={spec.exemplar_pool_per_cell}"
    )
    for (obj, region), frac in sorted(spec.collapse.items()):
        lines.append(f"collapse object={obj} region={region} fraction={frac!r}")
    for region, mult in sorted(spec.imbalance.items()):
        lines.append(f"imbalance region={region} multiplier={mult!r}")
    lines.extend(_world_lines(bundle.reference_world, "reference"))
    lines.extend(_world_lines(bundle.sampler_world, "sampler"))
    lines.extend(_samples_lines(bundle.reference_set, "reference"))
    lines.extend(_samples_lines(bundle.exemplar_pool, "pool"))
    return "\n".join(lines) + "\n"


def _parse_fields(rest: str) -> dict:
    return dict(part.split("=", 1) for part in rest.split())


def parse_bundle(text: str) -> ScenarioBundle:
    """Inverse of serialize_bundle; reconstructs worlds and sample sets."""
    spec_fields = None
    collapse = {}
    imbalance = {}
    comps = {"reference": [], "sampler": []}
    samples = {"reference": [], "pool": []}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        kind, _, rest = line.partition(" ")
        try:
            fields = _parse_fields(rest)
        except ValueError as exc:
            raise ContractViolation(f"malformed bundle record: {line!r}") from exc
        if kind == "spec":
            spec_fields = fields
        elif kind == "collapse":
            collapse[(fields["object"], fields["region"])] = float(fields["fraction"])
        elif kind == "imbalance":
            imbalance[fields["region"]] = float(fields["multiplier"])
        elif kind == "component":
            comps[fields["world"]].append(
                Component(
                    mean=np.array([float(v) for v in fields["mean"].split(",")]),
                    cov_diag=np.array([float(v) for v in fields["cov"].split(",")]),
                    weight=float(fields["weight"]),
                    object_label=fields["object"],
                    region_label=fields["region"],
                )
            )
        elif kind == "sample":
            samples[fields["set"]].append(
                (
                    np.array([float(v) for v in fields["x"].split(",")]),
                    fields["object"],
                    fields["region"],
                )
            )
        else:
            raise ContractViolation(f"unknown record kind {kind!r}")
    if spec_fields is None:
        raise ContractViolation("bundle text has no spec record")
    try:
        spec = _spec_from_fields(spec_fields, collapse, imbalance)
    except (KeyError, ValueError) as exc:
        raise ContractViolation(f"incomplete bundle spec record: {exc}") from exc

    def labeled(rows) -> LabeledSamples:
        return LabeledSamples(
            x=np.stack([r[0] for r in rows]),
            objects=tuple(r[1] for r in rows),
            regions=tuple(r[2] for r in rows),
        )

    return ScenarioBundle(
        spec=spec,
        reference_world=MixtureWorld(comps["reference"]),
        sampler_world=MixtureWorld(comps["sampler"]),
        reference_set=labeled(samples["reference"]),
        exemplar_pool=labeled(samples["pool"]),
    )


def _spec_from_fields(spec_fields: dict, collapse: dict, imbalance: dict) -> ScenarioSpec:
    return ScenarioSpec(
        regions=tuple(spec_fields["regions"].split(",")),
        objects=tuple(spec_fields["objects"].split(",")),
        modes_per_cell=int(spec_fields["modes_per_cell"]),
        dim=int(spec_fields["dim"]),
        separation=float(spec_fields["separation"]),
        collapse=collapse,
        imbalance=imbalance,
        seed=int(spec_fields["seed"]),
        mode_scale=float(spec_fields["mode_scale"]),
        jitter=float(spec_fields["jitter"]),
        reference_per_region=int(spec_fields["reference_per_region"]),
        exemplar_pool_per_cell=int(spec_fields["exemplar_pool_per_cell"]),
    )
