"""DDIM noise schedules and analytic sampling over Gaussian-mixture worlds.

The forward process scales data by sqrt(alpha_bar_t) and adds unit-variance
noise scaled by sqrt(1 - alpha_bar_t). Because the data distribution is a
known diagonal-covariance Gaussian mixture, the noise predictor, the label
posterior, and their gradients are computed exactly rather than learned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import ContractViolation

# Floor applied to noised per-dimension variances. It can only bind at
# alpha_bar = 1 (the t = 0 posterior), so exact zero-covariance worlds
# still denoise exactly for t >= 1.
VARIANCE_FLOOR = 1e-8

LOG_TWO_PI = float(np.log(2.0 * np.pi))


def derive_seeds(seed: int, count: int) -> list[int]:
    """Per-sample integer seeds, a deterministic function of (seed, count order)."""
    state = np.random.SeedSequence(seed).generate_state(count, dtype=np.uint64)
    return [int(s) for s in state]


@dataclass(frozen=True)
class NoiseSchedule:
    """Cumulative signal levels and per-step noise scales.

    alpha_bar has length num_steps + 1 with alpha_bar[0] = 1 and is strictly
    decreasing. sigma has the same length; sigma[0] is a structural 0 and
    sigma[t] is the noise injected when stepping from t to t - 1.
    """

    num_steps: int
    alpha_bar: np.ndarray
    sigma: np.ndarray
    eta: float

    def __post_init__(self):
        ab, sg = self.alpha_bar, self.sigma
        if ab.shape != (self.num_steps + 1,) or sg.shape != ab.shape:
            raise ContractViolation("schedule arrays must have length num_steps + 1")
        if ab[0] != 1.0:
            raise ContractViolation("alpha_bar[0] must be 1")
        if not np.all(ab > 0):
            raise ContractViolation("alpha_bar must stay positive")
        if not np.all(np.diff(ab) < 0):
            raise ContractViolation("alpha_bar must be strictly decreasing")
        if np.any(sg < 0):
            raise ContractViolation("sigma must be non-negative")
        if np.any(sg[1:] ** 2 > 1.0 - ab[:-1] + 1e-12):
            raise ContractViolation("sigma_t^2 exceeds 1 - alpha_bar_{t-1}")


def make_schedule(
    num_steps: int = 50,
    beta_min: float = 1e-4,
    beta_max: float = 0.35,
    eta: float = 0.0,
) -> NoiseSchedule:
    """Linear-beta schedule with the standard eta-scaled per-step noise."""
    if num_steps < 1:
        raise ContractViolation("num_steps must be >= 1")
    if not (0.0 < beta_min <= beta_max < 1.0):
        raise ContractViolation("need 0 < beta_min <= beta_max < 1")
    if not (0.0 <= eta <= 1.0):
        raise ContractViolation("eta must lie in [0, 1]")
    betas = np.linspace(beta_min, beta_max, num_steps)
    alpha_bar = np.concatenate([[1.0], np.cumprod(1.0 - betas)])
    prev, curr = alpha_bar[:-1], alpha_bar[1:]
    sigma = np.zeros(num_steps + 1)
    sigma[1:] = eta * np.sqrt((1.0 - prev) / (1.0 - curr)) * np.sqrt(1.0 - curr / prev)
    return NoiseSchedule(num_steps=num_steps, alpha_bar=alpha_bar, sigma=sigma, eta=eta)


@dataclass(frozen=True)
class Condition:
    """Generation prompt; either label may be None for marginal queries."""

    object_label: str | None = None
    region_label: str | None = None


@dataclass(frozen=True)
class Component:
    mean: np.ndarray
    cov_diag: np.ndarray
    weight: float
    object_label: str
    region_label: str


class MixtureWorld:
    """Diagonal-covariance Gaussian mixture with labeled components.

    Weights are normalized at construction. Covariances may be exactly zero;
    the variance floor is applied to the noised variance, where it can only
    bind at alpha_bar = 1.
    """

    def __init__(self, components):
        components = tuple(components)
        if not components:
            raise ContractViolation("world needs at least one component")
        means = np.stack([np.asarray(c.mean, dtype=float) for c in components])
        covs = np.stack([np.asarray(c.cov_diag, dtype=float) for c in components])
        weights = np.array([float(c.weight) for c in components])
        if means.ndim != 2 or covs.shape != means.shape:
            raise ContractViolation("component means/covariances must share one shape")
        if np.any(covs < 0):
            raise ContractViolation("covariance diagonals must be non-negative")
        if np.any(weights <= 0):
            raise ContractViolation("component weights must be positive")
        self.components = components
        self.dim = means.shape[1]
        self.means = means
        self.cov_diags = covs
        self.weights = weights / weights.sum()
        self.log_weights = np.log(self.weights)
        self.object_labels = tuple(c.object_label for c in components)
        self.region_labels = tuple(c.region_label for c in components)
        self.objects = tuple(sorted(set(self.object_labels)))
        self.regions = tuple(sorted(set(self.region_labels)))
        self._noised_cache: dict[float, tuple] = {}

    def component_indices(
        self, object_label: str | None = None, region_label: str | None = None
    ) -> np.ndarray:
        mask = np.ones(len(self.components), dtype=bool)
        if object_label is not None:
            mask &= np.array([o == object_label for o in self.object_labels])
        if region_label is not None:
            mask &= np.array([r == region_label for r in self.region_labels])
        return np.flatnonzero(mask)

    def select(self, cond: Condition | None) -> np.ndarray:
        """Indices matching a condition; all components for None."""
        if cond is None:
            return np.arange(len(self.components))
        idx = self.component_indices(cond.object_label, cond.region_label)
        if idx.size == 0:
            raise ContractViolation(f"no components match condition {cond}")
        return idx

    def noised_stats(self, alpha_bar_t: float):
        """(scaled means, floored noised variances, per-component log normalizers)."""
        key = float(alpha_bar_t)
        hit = self._noised_cache.get(key)
        if hit is None:
            scaled = np.sqrt(key) * self.means
            var = np.maximum(key * self.cov_diags + (1.0 - key), VARIANCE_FLOOR)
            log_norm = -0.5 * np.sum(np.log(var) + LOG_TWO_PI, axis=1)
            hit = (scaled, var, log_norm)
            self._noised_cache[key] = hit
        return hit


def _component_log_joints(x, world: MixtureWorld, alpha_bar_t: float):
    """log w_i + log N(x; sqrt(ab) mu_i, ab Sigma_i + (1 - ab) I) over components.

    x may be (d,) or (batch, d); the component axis is appended last.
    Also returns the residuals and variances reused by score computations.
    """
    scaled, var, log_norm = world.noised_stats(alpha_bar_t)
    x = np.asarray(x, dtype=float)
    diff = x[..., None, :] - scaled  # (..., m, d)
    quad = np.sum(diff**2 / var, axis=-1)
    log_joint = world.log_weights + log_norm - 0.5 * quad
    return log_joint, diff, var


def _subset_score(log_joint, diff, var, idx):
    """Gradient of log sum_{i in idx} w_i N_i(x) w.r.t. x, stably via softmax."""
    sub = log_joint[..., idx]
    resp = np.exp(sub - logsumexp(sub, axis=-1, keepdims=True))
    return np.einsum("...m,...md->...d", resp, -diff[..., idx, :] / var[idx])


def _check_t(t: int, sched: NoiseSchedule) -> None:
    if not 1 <= t <= sched.num_steps:
        raise ContractViolation(f"t={t} outside [1, {sched.num_steps}]")


def analytic_epsilon(
    x: np.ndarray,
    t: int,
    cond: Condition | None,
    world: MixtureWorld,
    sched: NoiseSchedule,
) -> np.ndarray:
    """Exact noise prediction -sqrt(1 - alpha_bar_t) * grad log p_t(x).

    cond restricts (and renormalizes) the mixture; None is unconditional.
    x may be a single vector or a batch of rows.
    """
    _check_t(t, sched)
    idx = world.select(cond)
    ab = float(sched.alpha_bar[t])
    log_joint, diff, var = _component_log_joints(x, world, ab)
    score = _subset_score(log_joint, diff, var, idx)
    return -np.sqrt(1.0 - ab) * score


def classifier_log_prob(
    x: np.ndarray,
    t: int,
    query: Condition,
    world: MixtureWorld,
    sched: NoiseSchedule,
):
    """Exact log posterior of a label query given the noised sample x at t."""
    _check_t(t, sched)
    idx = world.select(query)
    ab = float(sched.alpha_bar[t])
    log_joint, _, _ = _component_log_joints(x, world, ab)
    out = logsumexp(log_joint[..., idx], axis=-1) - logsumexp(log_joint, axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def classifier_guidance_epsilon(
    x: np.ndarray,
    t: int,
    cond: Condition,
    gamma: float,
    world: MixtureWorld,
    sched: NoiseSchedule,
) -> np.ndarray:
    """Unconditional epsilon steered by the exact label-posterior gradient.

    gamma = 0 returns the unconditional prediction unchanged; gamma = 1
    recovers the fully conditional prediction for this analytic classifier.
    """
    _check_t(t, sched)
    if gamma < 0:
        raise ContractViolation("gamma must be >= 0")
    idx = world.select(cond)
    ab = float(sched.alpha_bar[t])
    log_joint, diff, var = _component_log_joints(x, world, ab)
    score_all = _subset_score(log_joint, diff, var, np.arange(len(world.components)))
    eps_uncond = -np.sqrt(1.0 - ab) * score_all
    if gamma == 0.0:
        return eps_uncond
    grad_log_post = _subset_score(log_joint, diff, var, idx) - score_all
    return eps_uncond - gamma * np.sqrt(1.0 - ab) * grad_log_post


def ddim_denoise_approx(
    x: np.ndarray, t: int, eps: np.ndarray, sched: NoiseSchedule
) -> np.ndarray:
    """One-shot clean-data estimate (x - sqrt(1 - ab_t) eps) / sqrt(ab_t)."""
    _check_t(t, sched)
    ab = float(sched.alpha_bar[t])
    return (np.asarray(x, dtype=float) - np.sqrt(1.0 - ab) * np.asarray(eps)) / np.sqrt(
        ab
    )


@dataclass
class SampleState:
    """One trajectory's position, timestep, and private random stream."""

    x: np.ndarray
    t: int
    rng: np.random.Generator


def ddim_step(state: SampleState, eps: np.ndarray, sched: NoiseSchedule) -> SampleState:
    """Advance one reverse step t -> t-1 with the given noise prediction.

    Fresh noise is drawn from the state's stream only when sigma_t > 0,
    so eta = 0 trajectories consume randomness solely at initialization.
    """
    t = state.t
    _check_t(t, sched)
    ab_prev = float(sched.alpha_bar[t - 1])
    sig = float(sched.sigma[t])
    x0 = ddim_denoise_approx(state.x, t, eps, sched)
    radicand = 1.0 - ab_prev - sig**2
    if radicand < -1e-12:
        raise ContractViolation(
            f"schedule invariant violated at t={t}: 1 - alpha_bar - sigma^2 = {radicand:.3e}"
        )
    x_prev = np.sqrt(ab_prev) * x0 + np.sqrt(max(radicand, 0.0)) * np.asarray(eps)
    if sig > 0.0:
        x_prev = x_prev + sig * state.rng.standard_normal(x_prev.shape)
    return SampleState(x=x_prev, t=t - 1, rng=state.rng)


def sample_unguided(
    cond: Condition | None,
    world: MixtureWorld,
    sched: NoiseSchedule,
    seed: int,
) -> np.ndarray:
    """One conditional draw: x_T ~ N(0, I) from the seeded stream, then
    plain conditional denoising down to t = 0."""
    rng = np.random.default_rng(seed)
    state = SampleState(x=rng.standard_normal(world.dim), t=sched.num_steps, rng=rng)
    for t in range(sched.num_steps, 0, -1):
        eps = analytic_epsilon(state.x, t, cond, world, sched)
        state = ddim_step(state, eps, sched)
    return state.x


def sample_unguided_batch(
    cond: Condition | None,
    world: MixtureWorld,
    sched: NoiseSchedule,
    seed: int,
    count: int,
) -> np.ndarray:
    """Vectorized unguided draws sharing one stream; used by Monte-Carlo checks.

    Same update rule as sample_unguided but with a batch noise layout, so
    individual rows are not bitwise comparable to per-seed scalar runs.
    """
    if count < 1:
        raise ContractViolation("count must be >= 1")
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((count, world.dim))
    for t in range(sched.num_steps, 0, -1):
        eps = analytic_epsilon(x, t, cond, world, sched)
        ab_prev = float(sched.alpha_bar[t - 1])
        sig = float(sched.sigma[t])
        x0 = ddim_denoise_approx(x, t, eps, sched)
        x = np.sqrt(ab_prev) * x0 + np.sqrt(max(1.0 - ab_prev - sig**2, 0.0)) * eps
        if sig > 0.0:
            x = x + sig * rng.standard_normal(x.shape)
    return x
