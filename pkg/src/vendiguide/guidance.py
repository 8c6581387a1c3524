"""Diversity-guided generation with a memory bank and real-context exemplars.

Every guide_every-th reverse step, the clean-data estimate x0_hat is nudged
along the diversity gradient taken against previously generated samples
(pushing apart) and against a small exemplar set (pulling toward real
context). The gradient is chained through x0_hat treating the noise
prediction as constant, converted to epsilon space, and norm-clipped.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .diffusion import (
    Condition,
    MixtureWorld,
    NoiseSchedule,
    SampleState,
    _component_log_joints,
    _subset_score,
    analytic_epsilon,
    classifier_guidance_epsilon,
    ddim_denoise_approx,
    ddim_step,
    derive_seeds,
)
from .errors import ContractViolation
from .kernels import KernelSpec
from .vendi import KernelCache, vendi_gradient


class MemoryBank:
    """Append-only store of generated samples, ordered by creation.

    version equals the number of samples ever appended (plus any the bank
    was constructed with) and increments exactly once per append.
    """

    def __init__(self, samples=()):
        self._samples = [np.asarray(s, dtype=float) for s in samples]
        for s in self._samples:
            self._validate(s)
        self.version = len(self._samples)

    def _validate(self, x: np.ndarray) -> None:
        if x.ndim != 1:
            raise ContractViolation("bank samples must be 1-d vectors")
        if not np.all(np.isfinite(x)):
            raise ContractViolation("bank samples must be finite")
        if self._samples and x.shape != self._samples[0].shape:
            raise ContractViolation("bank samples must share one dimension")

    def append(self, x: np.ndarray) -> None:
        x = np.asarray(x, dtype=float)
        self._validate(x)
        self._samples.append(x)
        self.version += 1

    @property
    def samples(self) -> tuple:
        return tuple(self._samples)

    def __len__(self) -> int:
        return len(self._samples)


@dataclass(frozen=True)
class ExemplarSet:
    """Fixed real-context samples, optionally indexed per condition."""

    samples: tuple
    per_condition: dict | None = None

    @classmethod
    def from_arrays(cls, arrays, per_condition=None) -> "ExemplarSet":
        return cls(
            samples=tuple(np.asarray(a, dtype=float) for a in arrays),
            per_condition=per_condition,
        )

    def for_condition(self, cond: Condition):
        if self.per_condition is None:
            return self.samples
        idx = self.per_condition.get(cond)
        if idx is None:
            raise ContractViolation(f"no exemplars indexed for condition {cond}")
        return tuple(self.samples[i] for i in idx)


@dataclass(frozen=True)
class GuidanceConfig:
    """Weights and cadence for guided generation.

    memory_weight pushes away from the bank, context_weight pulls toward
    exemplars, class_weight (None disables) steers with the exact label
    posterior. Guidance fires at steps with t % guide_every == guide_phase.
    bootstrap_sample, when set, seeds an empty bank before generation.
    """

    memory_weight: float = 1.0
    context_weight: float = 2.0
    class_weight: float | None = None
    guide_every: int = 5
    guide_phase: int = 0
    num_samples: int = 1
    grad_clip: float = 10.0
    bootstrap_sample: np.ndarray | None = None

    def __post_init__(self):
        if self.memory_weight < 0 or self.context_weight < 0:
            raise ContractViolation("guidance weights must be >= 0")
        if self.class_weight is not None and self.class_weight < 0:
            raise ContractViolation("class_weight must be >= 0 or None")
        if self.guide_every < 1:
            raise ContractViolation("guide_every must be >= 1")
        if not 0 <= self.guide_phase < self.guide_every:
            raise ContractViolation("guide_phase must lie in [0, guide_every)")
        if self.num_samples < 1:
            raise ContractViolation("num_samples must be >= 1")
        if not self.grad_clip > 0:
            raise ContractViolation("grad_clip must be positive")


@dataclass
class GuidanceLog:
    """Counters and events recorded during guided generation."""

    guided_steps: int = 0
    degenerate_fallbacks: int = 0
    clipped_steps: int = 0
    per_sample_guided: list = field(default_factory=list)
    fallback_events: list = field(default_factory=list)

    def record_fallback(self, sample_index: int, t: int, reason: str) -> None:
        self.degenerate_fallbacks += 1
        self.fallback_events.append((sample_index, t, reason))


def _base_epsilon(x, t, cond, cfg: GuidanceConfig, world, sched):
    if cfg.class_weight is None:
        return analytic_epsilon(x, t, cond, world, sched)
    return classifier_guidance_epsilon(x, t, cond, cfg.class_weight, world, sched)


def guided_epsilon(
    state: SampleState,
    cond: Condition,
    bank: MemoryBank,
    exemplars: ExemplarSet,
    cfg: GuidanceConfig,
    world: MixtureWorld,
    sched: NoiseSchedule,
    kspec: KernelSpec,
    bank_cache: KernelCache | None = None,
    exemplar_cache: KernelCache | None = None,
    log: GuidanceLog | None = None,
    sample_index: int = -1,
) -> np.ndarray:
    """Noise prediction with the diversity terms added in epsilon space.

    With both weights inactive (or an empty bank and zero context weight)
    this returns the base prediction bitwise unchanged. Degenerate diversity
    gradients never abort a run: the step falls back to the base prediction
    and the event is logged.
    """
    t = state.t
    eps_cond = _base_epsilon(state.x, t, cond, cfg, world, sched)
    bank_samples = bank.samples
    use_memory = cfg.memory_weight > 0 and len(bank_samples) > 0
    use_context = cfg.context_weight > 0
    if not use_memory and not use_context:
        return eps_cond

    x0 = ddim_denoise_approx(state.x, t, eps_cond, sched)
    addition = np.zeros(world.dim)
    if use_memory:
        res = vendi_gradient(
            x0,
            bank_samples,
            kspec,
            others_matrix=bank_cache.matrix if bank_cache is not None else None,
        )
        if res.degenerate:
            if log is not None:
                log.record_fallback(sample_index, t, "memory gradient degenerate")
            return eps_cond
        addition = addition + cfg.memory_weight * res.grad
    if use_context:
        ex_samples = exemplars.for_condition(cond)
        if len(ex_samples) == 0:
            raise ContractViolation("context_weight > 0 requires a non-empty exemplar set")
        res = vendi_gradient(
            x0,
            ex_samples,
            kspec,
            others_matrix=exemplar_cache.matrix if exemplar_cache is not None else None,
        )
        if res.degenerate:
            if log is not None:
                log.record_fallback(sample_index, t, "context gradient degenerate")
            return eps_cond
        addition = addition - cfg.context_weight * res.grad

    if not np.all(np.isfinite(addition)):
        if log is not None:
            log.record_fallback(sample_index, t, "non-finite guidance term")
        return eps_cond

    ab = float(sched.alpha_bar[t])
    # Chain through x0_hat (d x0/d x_t = 1/sqrt(ab), eps held fixed), then
    # score -> epsilon conversion contributes -sqrt(1 - ab).
    delta = -(np.sqrt(1.0 - ab) / np.sqrt(ab)) * addition
    norm = float(np.linalg.norm(delta))
    if norm > cfg.grad_clip:
        delta = delta * (cfg.grad_clip / norm)
        if log is not None:
            log.clipped_steps += 1
    return eps_cond + delta


def generate_one(
    cond: Condition,
    bank: MemoryBank,
    exemplars: ExemplarSet,
    cfg: GuidanceConfig,
    world: MixtureWorld,
    sched: NoiseSchedule,
    kspec: KernelSpec,
    sample_seed: int,
    bank_cache: KernelCache | None = None,
    exemplar_cache: KernelCache | None = None,
    log: GuidanceLog | None = None,
    sample_index: int = -1,
) -> np.ndarray:
    """One trajectory under the given bank snapshot; the bank is not mutated.

    A trajectory depends on the bank only through this snapshot, so any
    sample can be replayed bitwise from its seed and the bank prefix that
    existed when it was generated.
    """
    rng = np.random.default_rng(sample_seed)
    state = SampleState(x=rng.standard_normal(world.dim), t=sched.num_steps, rng=rng)
    guided_here = 0
    for t in range(sched.num_steps, 0, -1):
        if t % cfg.guide_every == cfg.guide_phase:
            guided_here += 1
            eps = guided_epsilon(
                state,
                cond,
                bank,
                exemplars,
                cfg,
                world,
                sched,
                kspec,
                bank_cache=bank_cache,
                exemplar_cache=exemplar_cache,
                log=log,
                sample_index=sample_index,
            )
        else:
            eps = _base_epsilon(state.x, t, cond, cfg, world, sched)
        state = ddim_step(state, eps, sched)
    if log is not None:
        log.guided_steps += guided_here
        log.per_sample_guided.append(guided_here)
    return state.x


def generate_sequence(
    cond: Condition,
    bank: MemoryBank,
    exemplars: ExemplarSet,
    cfg: GuidanceConfig,
    world: MixtureWorld,
    sched: NoiseSchedule,
    kspec: KernelSpec,
    seed: int,
    log: GuidanceLog | None = None,
) -> list:
    """Generate cfg.num_samples sequentially, appending each to the bank.

    Per-sample seeds come from derive_seeds(seed, num_samples), so with
    zero guidance weights the output matches sample_unguided run on those
    seeds bitwise. The bank kernel matrix is cached and extended per append;
    only the probe row is recomputed inside each guidance step.
    """
    seeds = derive_seeds(seed, cfg.num_samples)
    if cfg.bootstrap_sample is not None and len(bank) == 0:
        bank.append(cfg.bootstrap_sample)
    bank_cache = KernelCache(kspec, bank.samples)
    ex_samples = exemplars.for_condition(cond) if cfg.context_weight > 0 else ()
    exemplar_cache = KernelCache(kspec, ex_samples) if ex_samples else None
    out = []
    for n, sample_seed in enumerate(seeds):
        x0 = generate_one(
            cond,
            bank,
            exemplars,
            cfg,
            world,
            sched,
            kspec,
            sample_seed,
            bank_cache=bank_cache if len(bank_cache) else None,
            exemplar_cache=exemplar_cache,
            log=log,
            sample_index=n,
        )
        bank.append(x0)
        bank_cache.extend(x0)
        out.append(x0)
    return out


FEEDBACK_MODES = ("loss", "entropy")


def feedback_guidance_epsilon(
    state: SampleState,
    cond: Condition,
    mode: str,
    weight: float,
    world: MixtureWorld,
    sched: NoiseSchedule,
    classifier_world: MixtureWorld | None = None,
) -> np.ndarray:
    """Classifier-feedback steering on the noised sample itself.

    loss mode ascends the negative log posterior of the condition's region;
    entropy mode ascends the entropy of the full region posterior. Both act
    in score space and are converted to epsilon space. The posterior comes
    from classifier_world when given, so the steering signal can model a
    region classifier fit on the real data rather than on the sampling
    world's own (possibly collapsed) mixture. Requires a classifier world
    with at least two regions.
    """
    if mode not in FEEDBACK_MODES:
        raise ContractViolation(f"unknown feedback mode {mode!r}")
    if weight < 0:
        raise ContractViolation("feedback weight must be >= 0")
    cls_world = world if classifier_world is None else classifier_world
    if cls_world.dim != world.dim:
        raise ContractViolation("classifier world dimension mismatch")
    regions = cls_world.regions
    if len(regions) < 2:
        raise ContractViolation("feedback guidance needs a multi-region world")
    if cond.region_label is None or cond.region_label not in regions:
        raise ContractViolation(f"condition region {cond.region_label!r} not in world")

    t = state.t
    base = analytic_epsilon(state.x, t, cond, world, sched)
    if weight == 0.0:
        return base
    ab = float(sched.alpha_bar[t])
    log_joint, diff, var = _component_log_joints(state.x, cls_world, ab)
    all_idx = np.arange(len(cls_world.components))
    score_all = _subset_score(log_joint, diff, var, all_idx)
    log_z = logsumexp(log_joint)

    if mode == "loss":
        idx = cls_world.component_indices(region_label=cond.region_label)
        grad_log_post = _subset_score(log_joint, diff, var, idx) - score_all
        # Ascend -log p(region | x_t): subtract the posterior gradient in
        # score space, i.e. add it back in epsilon space.
        return base + weight * np.sqrt(1.0 - ab) * grad_log_post

    grad_entropy = np.zeros(cls_world.dim)
    for region in regions:
        idx = cls_world.component_indices(region_label=region)
        log_p = float(logsumexp(log_joint[idx]) - log_z)
        p = np.exp(log_p)
        grad_log_post = _subset_score(log_joint, diff, var, idx) - score_all
        grad_entropy -= (1.0 + log_p) * p * grad_log_post
    return base - weight * np.sqrt(1.0 - ab) * grad_entropy


def generate_feedback_sequence(
    cond: Condition,
    mode: str,
    weight: float,
    num_samples: int,
    world: MixtureWorld,
    sched: NoiseSchedule,
    seed: int,
    classifier_world: MixtureWorld | None = None,
) -> list:
    """Independent feedback-guided trajectories (guidance at every step)."""
    if num_samples < 1:
        raise ContractViolation("num_samples must be >= 1")
    out = []
    for sample_seed in derive_seeds(seed, num_samples):
        rng = np.random.default_rng(sample_seed)
        state = SampleState(
            x=rng.standard_normal(world.dim), t=sched.num_steps, rng=rng
        )
        for t in range(sched.num_steps, 0, -1):
            eps = feedback_guidance_epsilon(
                state, cond, mode, weight, world, sched, classifier_world
            )
            state = ddim_step(state, eps, sched)
        out.append(state.x)
    return out
