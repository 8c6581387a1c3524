"""Randomized invariants via hypothesis.

Everything here is a structural guarantee: these hold for every valid
input, not just the worked cases in the sibling modules.
"""

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import array_shapes, arrays

from vendiguide import (
    KernelSpec,
    build_kernel_matrix,
    derive_seeds,
    f1_score,
    improved_precision,
    improved_recall,
    make_schedule,
    vendi_from_kernel,
    vendi_score,
)

settings.register_profile("suite", deadline=None, max_examples=50)
settings.load_profile("suite")

finite = st.floats(-5.0, 5.0, allow_nan=False, allow_infinity=False, width=32)


def sample_sets(min_n=2, max_n=7, max_d=4):
    return arrays(
        np.float64,
        array_shapes(min_dims=2, max_dims=2, min_side=min_n, max_side=max_n).filter(
            lambda s: s[1] <= max_d
        ),
        elements=finite,
    )


def specs():
    return st.one_of(
        st.floats(0.3, 4.0).map(lambda b: KernelSpec(kind="rbf", bandwidth=b)),
        st.just(KernelSpec(kind="cosine")),
    )


@given(sample_sets(), specs())
def test_kernel_matrix_shape_and_symmetry(xs, spec):
    gram = build_kernel_matrix(xs, spec)
    n = xs.shape[0]
    assert gram.shape == (n, n)
    assert np.allclose(gram, gram.T, atol=1e-12)
    assert np.allclose(np.diag(gram), 1.0, atol=1e-12)


@given(sample_sets(), specs())
def test_kernel_matrix_is_psd(xs, spec):
    gram = build_kernel_matrix(xs, spec)
    eigenvalues = np.linalg.eigvalsh(gram)
    assert eigenvalues.min() >= -1e-8


@given(sample_sets(), specs())
def test_vendi_in_range(xs, spec):
    score = vendi_score(xs, spec).score
    n = xs.shape[0]
    assert 1.0 - 1e-9 <= score <= n + 1e-9


@given(sample_sets(), specs(), st.randoms(use_true_random=False))
def test_vendi_permutation_invariant(xs, spec, rng):
    order = list(range(xs.shape[0]))
    rng.shuffle(order)
    assert vendi_score(xs, spec).score == pytest.approx(
        vendi_score(xs[order], spec).score, abs=1e-10
    )


@given(sample_sets(), specs())
def test_vendi_unchanged_by_full_duplication(xs, spec):
    # zero vectors have no direction; cosine similarity is arbitrary there
    assume(np.all(np.linalg.norm(xs, axis=1) > 1e-3))
    once = vendi_score(xs, spec).score
    twice = vendi_score(np.concatenate([xs, xs]), spec).score
    assert abs(once - twice) <= 1e-8 * max(1.0, once)


@given(st.integers(2, 6))
def test_vendi_identity_kernel_counts_points(n):
    assert abs(vendi_from_kernel(np.eye(n)).score - n) <= 1e-10


@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_f1_bounds(p, r):
    f1 = f1_score(p, r)
    low, high = min(p, r), max(p, r)
    assert low - 1e-12 <= f1 <= high + 1e-12
    assert f1 <= 2.0 * low + 1e-12


@given(
    sample_sets(min_n=4, max_n=8),
    sample_sets(min_n=4, max_n=8),
    st.sampled_from([0.5, 2.0, 4.0]),
)
def test_precision_recall_scale_covariant(gen, real, scale):
    d = min(gen.shape[1], real.shape[1])
    gen, real = gen[:, :d], real[:, :d]
    k = 2
    assert improved_precision(gen * scale, real * scale, k) == improved_precision(
        gen, real, k
    )
    assert improved_recall(gen * scale, real * scale, k) == improved_recall(
        gen, real, k
    )


@given(st.integers(0, 2**31 - 1), st.integers(1, 12), st.integers(1, 12))
def test_derive_seeds_deterministic_prefix(seed, n_small, n_big):
    lo, hi = sorted((n_small, n_big))
    short = derive_seeds(seed, lo)
    long = derive_seeds(seed, hi)
    assert len(short) == lo
    assert list(long[:lo]) == list(short)


@given(
    st.integers(1, 60),
    st.floats(1e-5, 5e-3),
    st.floats(0.05, 0.6),
    st.floats(0.0, 1.0),
)
def test_schedule_invariants(num_steps, beta_min, beta_max, eta):
    sched = make_schedule(num_steps, beta_min, beta_max, eta=eta)
    ab, sigma = sched.alpha_bar, sched.sigma
    assert len(ab) == num_steps + 1 and len(sigma) == num_steps + 1
    assert ab[0] == 1.0
    assert np.all(np.diff(ab) < 0.0)
    assert ab[-1] > 0.0
    assert sigma[0] == 0.0 and sigma[1] == 0.0
    assert np.all(sigma >= 0.0)
    # noise never exceeds what the jump-back radicand can absorb
    assert np.all(sigma[1:] ** 2 <= (1.0 - ab[:-1]) + 1e-12)
    if eta == 0.0:
        assert np.all(sigma == 0.0)
