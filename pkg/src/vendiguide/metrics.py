"""Manifold precision/recall, label consistency, and region-wise reports.

Precision and recall follow the k-nearest-neighbor manifold construction:
a point lies on a set's manifold if it falls within the k-th neighbor
radius of at least one support point (boundary inclusive, so a set covers
itself exactly).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import logsumexp

from .diffusion import MixtureWorld, _component_log_joints
from .errors import ContractViolation


def knn_radii(points, k: int) -> np.ndarray:
    """Distance from each point to its k-th nearest neighbor, self excluded.

    Duplicated points legitimately produce zero radii.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ContractViolation("points must be a 2-d array")
    n = pts.shape[0]
    if not 1 <= k < n:
        raise ContractViolation(f"need 1 <= k < n, got k={k}, n={n}")
    dists = cdist(pts, pts)
    # Row i contains the self distance 0, so the k-th smallest entry of the
    # full row equals the k-th neighbor distance with self removed.
    return np.partition(dists, k, axis=1)[:, k]


def manifold_membership(query, support, k: int, radii=None) -> np.ndarray:
    """Boolean mask: query points within the k-NN radius of >= 1 support point."""
    query = np.asarray(query, dtype=float)
    support = np.asarray(support, dtype=float)
    if query.ndim != 2 or support.ndim != 2:
        raise ContractViolation("query and support must be 2-d arrays")
    if query.shape[1] != support.shape[1]:
        raise ContractViolation("query/support dimension mismatch")
    if radii is None:
        radii = knn_radii(support, k)
    dists = cdist(query, support)
    return (dists <= radii[None, :]).any(axis=1)


def improved_precision(generated, real, k: int = 3) -> float:
    """Fraction of generated points on the real manifold."""
    generated = np.asarray(generated, dtype=float)
    if generated.size == 0:
        raise ContractViolation("generated set is empty")
    return float(manifold_membership(generated, real, k).mean())


def improved_recall(generated, real, k: int = 3) -> float:
    """Fraction of real points on the generated manifold."""
    return improved_precision(real, generated, k)


def f1_score(precision: float, recall: float) -> float:
    """Harmonic mean; 0 when both inputs are 0."""
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def object_posteriors(x, world: MixtureWorld) -> dict:
    """p(object | x) per object label under the clean-data (t = 0) mixture,
    with floored covariances. x may be (d,) or (n, d)."""
    log_joint, _, _ = _component_log_joints(x, world, 1.0)
    log_z = logsumexp(log_joint, axis=-1)
    out = {}
    for obj in world.objects:
        idx = world.component_indices(object_label=obj)
        out[obj] = np.exp(logsumexp(log_joint[..., idx], axis=-1) - log_z)
    return out


def consistency_score(generated, objects, world: MixtureWorld, classes=None) -> float:
    """Mean over object classes of the 10th percentile of p(object | x_0).

    The percentile uses lower interpolation, so each class score is an
    attained posterior value. classes defaults to the labels present in
    objects; an explicitly requested class with no samples is skipped with
    a warning.
    """
    generated = np.asarray(generated, dtype=float)
    objects = list(objects)
    if generated.shape[0] != len(objects):
        raise ContractViolation("one object label per generated sample required")
    if generated.shape[0] == 0:
        raise ContractViolation("generated set is empty")
    if classes is None:
        classes = sorted(set(objects))
    posteriors = object_posteriors(generated, world)
    labels = np.array(objects)
    scores = []
    for cls in classes:
        if cls not in world.objects:
            raise ContractViolation(f"object class {cls!r} not in world")
        mask = labels == cls
        if not mask.any():
            warnings.warn(f"object class {cls!r} has no generated samples; skipped")
            continue
        vals = posteriors[cls][mask]
        scores.append(float(np.percentile(vals, 10, method="lower")))
    if not scores:
        raise ContractViolation("no object class had generated samples")
    return float(np.mean(scores))


@dataclass(frozen=True)
class RegionMetrics:
    precision: float
    recall: float
    f1: float
    consistency: float


@dataclass(frozen=True)
class MetricsReport:
    """Per-region metrics plus their average and the weakest region by F1."""

    per_region: dict
    average: RegionMetrics
    worst_region: str
    worst: RegionMetrics


@dataclass(frozen=True)
class EvalSet:
    """Real samples with labels, and generated samples with their prompts."""

    real_x: np.ndarray
    real_objects: tuple
    real_regions: tuple
    gen_x: np.ndarray
    gen_conditions: tuple

    def __post_init__(self):
        if len(self.real_objects) != self.real_x.shape[0] or len(
            self.real_regions
        ) != self.real_x.shape[0]:
            raise ContractViolation("real labels must align with real samples")
        if len(self.gen_conditions) != self.gen_x.shape[0]:
            raise ContractViolation("one condition per generated sample required")


def region_report(
    eval_set: EvalSet,
    world: MixtureWorld,
    k: int = 3,
    average: str = "uniform",
) -> MetricsReport:
    """Slice the evaluation by region and aggregate.

    Every region present on either side must have both real and generated
    samples. The average is unweighted over regions by default; "weighted"
    weights by real sample counts. Worst region is the minimum F1, ties
    broken by region id order.
    """
    if average not in ("uniform", "weighted"):
        raise ContractViolation(f"unknown average mode {average!r}")
    real_regions = np.array(eval_set.real_regions)
    gen_regions = np.array([c.region_label for c in eval_set.gen_conditions])
    regions = sorted(
        {str(r) for r in eval_set.real_regions}
        | {str(c.region_label) for c in eval_set.gen_conditions}
    )

    per_region = {}
    weights = []
    for region in regions:
        real_mask = real_regions == region
        gen_mask = gen_regions == region
        if not real_mask.any():
            raise ContractViolation(f"region {region!r} has no real samples")
        if not gen_mask.any():
            raise ContractViolation(f"region {region!r} has no generated samples")
        real_slice = eval_set.real_x[real_mask]
        gen_slice = eval_set.gen_x[gen_mask]
        precision = improved_precision(gen_slice, real_slice, k)
        recall = improved_recall(gen_slice, real_slice, k)
        gen_objects = [
            c.object_label
            for c, m in zip(eval_set.gen_conditions, gen_mask)
            if m
        ]
        consistency = consistency_score(gen_slice, gen_objects, world)
        per_region[region] = RegionMetrics(
            precision=precision,
            recall=recall,
            f1=f1_score(precision, recall),
            consistency=consistency,
        )
        weights.append(float(real_mask.sum()))

    w = np.array(weights)
    if average == "uniform":
        w = np.ones_like(w)
    w = w / w.sum()
    fields = ("precision", "recall", "f1", "consistency")
    avg = RegionMetrics(
        **{
            f: float(np.sum(w * np.array([getattr(per_region[r], f) for r in regions])))
            for f in fields
        }
    )
    # min is stable and regions is sorted, so ties fall to the lowest id.
    worst = min(regions, key=lambda r: per_region[r].f1)
    return MetricsReport(
        per_region=per_region,
        average=avg,
        worst_region=worst,
        worst=per_region[worst],
    )
