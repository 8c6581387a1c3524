"""Vendi score values against hand eigendecompositions and its gradient
against finite differences."""

import numpy as np
import pytest

from vendiguide import (
    ContractViolation,
    KernelCache,
    KernelSpec,
    NumericalError,
    build_kernel_matrix,
    vendi_from_kernel,
    vendi_gradient,
    vendi_score,
)

from conftest import fd_gradient

# Hand 2x2 eigendecomposition: K = [[1, s], [s, 1]] has eigenvalues of K/2
# equal to (1 +- s)/2; entropy and score follow in closed form.
TWO_SAMPLE_ENTROPY = 0.5623351446188083
TWO_SAMPLE_SCORE = 1.7547653506033232

# Closed-form worked case x=(1,0), bank={(0,0)}, rbf bandwidth 1:
# grad[0] = score * (-1/2) log(lam+/lam-) * (-k) with k = exp(-1/2).
WORKED_GRAD_X = 0.7004960121245772
WORKED_SCORE = 1.641880543905009


def test_two_sample_half_similarity_frozen():
    res = vendi_from_kernel(np.array([[1.0, 0.5], [0.5, 1.0]]))
    assert res.eigenvalues == pytest.approx([0.75, 0.25], abs=1e-12)
    assert res.entropy == pytest.approx(TWO_SAMPLE_ENTROPY, abs=1e-12)
    assert res.score == pytest.approx(TWO_SAMPLE_SCORE, abs=1e-12)


def test_identical_samples_score_one(rbf_spec):
    res = vendi_score([np.array([1.0, 2.0])] * 5, rbf_spec)
    assert abs(res.score - 1.0) < 1e-8


def test_orthogonal_samples_score_n(cosine_spec):
    res = vendi_score(np.eye(6), cosine_spec)
    assert abs(res.score - 6.0) < 1e-8


def test_eigenvalue_invariants(rbf_spec):
    rng = np.random.default_rng(0)
    res = vendi_score(rng.standard_normal((8, 3)), rbf_spec)
    lam = res.eigenvalues
    assert np.all(np.diff(lam) <= 0)
    assert np.all(lam >= -1e-8) and np.all(lam <= 1 + 1e-8)
    assert abs(lam.sum() - 1.0) < 1e-8
    assert 1.0 <= res.score <= 8 + 1e-6
    assert res.score == pytest.approx(np.exp(res.entropy), rel=1e-15)


def test_permutation_invariance(rbf_spec):
    rng = np.random.default_rng(1)
    pts = rng.standard_normal((7, 2))
    base = vendi_score(pts, rbf_spec).score
    for seed in range(3):
        perm = np.random.default_rng(seed).permutation(7)
        assert abs(vendi_score(pts[perm], rbf_spec).score - base) < 1e-10


def test_duplication_invariance(rbf_spec):
    rng = np.random.default_rng(2)
    pts = rng.standard_normal((5, 2))
    doubled = np.concatenate([pts, pts])
    assert abs(
        vendi_score(doubled, rbf_spec).score - vendi_score(pts, rbf_spec).score
    ) < 1e-8


def test_numerical_error_wraps_eigh_failure():
    bad = np.full((3, 3), np.nan)
    with pytest.raises(NumericalError):
        vendi_from_kernel(bad)


def test_gradient_empty_others(rbf_spec):
    res = vendi_gradient(np.array([1.0, 2.0]), [], rbf_spec)
    assert np.array_equal(res.grad, np.zeros(2))
    assert not res.degenerate


def test_gradient_worked_example_frozen(rbf_spec):
    res = vendi_gradient(np.array([1.0, 0.0]), [np.array([0.0, 0.0])], rbf_spec)
    assert not res.degenerate
    assert res.grad[0] == pytest.approx(WORKED_GRAD_X, abs=1e-12)
    assert res.grad[1] == pytest.approx(0.0, abs=1e-15)
    # Points away from the bank sample: diversity rises with distance.
    assert res.grad[0] > 0


def test_gradient_far_point_saturates(rbf_spec):
    res = vendi_gradient(np.array([10.0, 0.0]), [np.array([0.0, 0.0])], rbf_spec)
    assert np.linalg.norm(res.grad) < 1e-6
    assert not res.degenerate


def test_gradient_coincident_probe_degenerate(rbf_spec):
    res = vendi_gradient(np.array([1.0, 1.0]), [np.array([1.0, 1.0])], rbf_spec)
    assert res.degenerate
    assert np.all(np.isfinite(res.grad))


def test_gradient_duplicated_bank_degenerate(rbf_spec):
    bank = [np.array([0.0, 0.0]), np.array([0.0, 0.0])]
    res = vendi_gradient(np.array([1.0, 0.0]), bank, rbf_spec)
    assert res.degenerate


def test_gradient_dimension_mismatch(rbf_spec):
    with pytest.raises(ContractViolation):
        vendi_gradient(np.zeros(2), [np.zeros(3)], rbf_spec)


@pytest.mark.parametrize("kind", ["rbf", "cosine"])
def test_gradient_matches_finite_differences(kind):
    rng = np.random.default_rng(42)
    checked = 0
    for _ in range(40):
        n = int(rng.integers(2, 8))
        d = int(rng.integers(2, 6))
        scale = float(rng.uniform(0.5, 3.0))
        pts = rng.standard_normal((n, d)) * scale
        x, others = pts[0], pts[1:]
        spec = KernelSpec(kind=kind, bandwidth=float(rng.uniform(0.5, 2.0)))
        res = vendi_gradient(x, others, spec)
        if res.degenerate:
            continue

        def score_at(p):
            return vendi_score(np.vstack([p[None, :], others]), spec).score

        numeric = fd_gradient(score_at, x)
        err = np.linalg.norm(res.grad - numeric)
        assert err <= 1e-4 * max(np.linalg.norm(res.grad), np.linalg.norm(numeric)) + 1e-8
        checked += 1
    assert checked >= 15


def test_gradient_directional_ascent(rbf_spec):
    # Moving along the gradient direction from a tight bank must not lower
    # the score to first order.
    rng = np.random.default_rng(8)
    for _ in range(5):
        bank = rng.standard_normal((4, 2)) * 0.3
        x = rng.standard_normal(2) * 0.3 + 1.0
        res = vendi_gradient(x, bank, rbf_spec)
        if res.degenerate or np.linalg.norm(res.grad) < 1e-12:
            continue
        direction = res.grad / np.linalg.norm(res.grad)
        before = vendi_score(np.vstack([x[None, :], bank]), rbf_spec).score
        after = vendi_score(np.vstack([(x + 1e-6 * direction)[None, :], bank]), rbf_spec).score
        assert after >= before - 1e-12


def test_gradient_accepts_cached_matrix(rbf_spec):
    rng = np.random.default_rng(3)
    others = rng.standard_normal((5, 2))
    x = rng.standard_normal(2)
    cache = KernelCache(rbf_spec, others)
    direct = vendi_gradient(x, others, rbf_spec)
    cached = vendi_gradient(x, others, rbf_spec, others_matrix=cache.matrix)
    assert np.array_equal(direct.grad, cached.grad)
    assert direct.degenerate == cached.degenerate
    with pytest.raises(ContractViolation):
        vendi_gradient(x, others, rbf_spec, others_matrix=np.ones((2, 2)))


@pytest.mark.parametrize("kind", ["rbf", "cosine"])
def test_cache_extension_bitwise_equals_rebuild(kind):
    spec = KernelSpec(kind=kind, bandwidth=0.9)
    rng = np.random.default_rng(17)
    pts = rng.standard_normal((9, 3))
    cache = KernelCache(spec)
    for i in range(9):
        cache.extend(pts[i])
        rebuilt = build_kernel_matrix(pts[: i + 1], spec)
        assert np.array_equal(cache.matrix, rebuilt)
    assert len(cache) == 9
