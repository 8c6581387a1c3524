"""Shared fixtures and independent oracles used across the test suite.

The oracles here deliberately avoid the library's own code paths: finite
differences for gradients, explicit O(n^2) loops for neighbor metrics,
scipy.stats densities for mixture scores.
"""

import numpy as np
import pytest
from scipy.stats import multivariate_normal

from vendiguide import (
    Component,
    Condition,
    KernelSpec,
    MixtureWorld,
    make_schedule,
)


def fd_gradient(f, x, h=1e-5):
    """Central finite differences of a scalar function, coordinate by coordinate."""
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for i in range(x.size):
        up = x.copy()
        dn = x.copy()
        up[i] += h
        dn[i] -= h
        grad[i] = (f(up) - f(dn)) / (2.0 * h)
    return grad


def brute_knn_radii(points, k):
    """k-th neighbor distance per point via full sort, self excluded."""
    points = np.asarray(points, dtype=float)
    radii = []
    for i in range(points.shape[0]):
        dists = sorted(
            float(np.linalg.norm(points[i] - points[j]))
            for j in range(points.shape[0])
            if j != i
        )
        radii.append(dists[k - 1])
    return np.array(radii)


def brute_precision(gen, real, k):
    """Membership fraction with explicit loops; oracle for improved_precision."""
    gen = np.asarray(gen, dtype=float)
    real = np.asarray(real, dtype=float)
    radii = brute_knn_radii(real, k)
    hits = 0
    for g in gen:
        if any(
            float(np.linalg.norm(g - real[j])) <= radii[j]
            for j in range(real.shape[0])
        ):
            hits += 1
    return hits / gen.shape[0]


def mixture_log_pdf(x, means, covs, weights, alpha_bar):
    """Noised-mixture log density via scipy.stats, independent of the library."""
    total = 0.0
    for mu, cov, w in zip(means, covs, weights):
        noised_mu = np.sqrt(alpha_bar) * np.asarray(mu, dtype=float)
        noised_cov = np.diag(alpha_bar * np.asarray(cov, dtype=float) + (1 - alpha_bar))
        total += w * multivariate_normal.pdf(x, mean=noised_mu, cov=noised_cov)
    return float(np.log(total))


@pytest.fixture
def rbf_spec():
    return KernelSpec(kind="rbf", bandwidth=1.0)


@pytest.fixture
def cosine_spec():
    return KernelSpec(kind="cosine")


@pytest.fixture
def two_mode_world():
    """Equal-weight 1-d pair at -3 and +3, unit variance, two regions."""
    return MixtureWorld(
        [
            Component(np.array([-3.0]), np.array([1.0]), 0.5, "oA", "r0"),
            Component(np.array([3.0]), np.array([1.0]), 0.5, "oA", "r1"),
        ]
    )


@pytest.fixture
def quad_world():
    """Four well-separated 2-d components with distinct weights and labels."""
    return MixtureWorld(
        [
            Component(np.array([0.0, 0.0]), np.array([0.5, 0.5]), 0.1, "oA", "r0"),
            Component(np.array([8.0, 0.0]), np.array([0.5, 0.5]), 0.2, "oA", "r1"),
            Component(np.array([0.0, 8.0]), np.array([0.5, 0.5]), 0.3, "oB", "r0"),
            Component(np.array([8.0, 8.0]), np.array([0.5, 0.5]), 0.4, "oB", "r1"),
        ]
    )


@pytest.fixture
def short_schedule():
    return make_schedule(num_steps=10, beta_min=1e-3, beta_max=0.3, eta=0.0)


@pytest.fixture
def default_schedule():
    return make_schedule()


@pytest.fixture
def cond_a0():
    return Condition(object_label="oA", region_label="r0")
