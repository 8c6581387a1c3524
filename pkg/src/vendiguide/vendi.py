"""Vendi score (effective sample diversity) and its analytic input gradient.

The score of n samples is exp(H) where H is the Shannon entropy of the
eigenvalues of K/n and K is the unit-diagonal kernel matrix. It ranges
from 1 (all identical) to n (mutually orthogonal under the kernel).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, NumericalError
from .kernels import (
    KernelSpec,
    build_kernel_matrix,
    kernel_row,
    kernel_row_gradients,
)

# Eigenvalues at or below this floor are dropped from entropy/gradient terms.
EIGENVALUE_FLOOR = 1e-10
# A probe point closer than this to a bank sample marks the gradient degenerate.
COINCIDENCE_TOL = 1e-6


@dataclass(frozen=True)
class VendiResult:
    """score = exp(entropy); eigenvalues are sorted descending."""

    score: float
    eigenvalues: np.ndarray
    entropy: float


@dataclass(frozen=True)
class VendiGradient:
    """Gradient of the score w.r.t. one sample; degenerate flags an unstable
    configuration (collapsed spectrum, coincident points, or a norm guard)."""

    grad: np.ndarray
    degenerate: bool


def _entropy(eigenvalues: np.ndarray) -> float:
    lam = np.clip(eigenvalues, 0.0, 1.0)
    lam = lam[lam > 0.0]
    return max(float(-(lam * np.log(lam)).sum()), 0.0)


def vendi_from_kernel(kernel_matrix: np.ndarray) -> VendiResult:
    """Score from a precomputed unit-diagonal kernel matrix."""
    kernel_matrix = np.asarray(kernel_matrix, dtype=float)
    n = kernel_matrix.shape[0]
    try:
        lam = np.linalg.eigvalsh(kernel_matrix / n)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"eigendecomposition failed for {n}x{n} kernel matrix "
            f"(fro={np.linalg.norm(kernel_matrix):.3e}, "
            f"max|K|={np.abs(kernel_matrix).max():.3e}): {exc}"
        ) from exc
    lam = lam[::-1]
    entropy = _entropy(lam)
    return VendiResult(score=float(np.exp(entropy)), eigenvalues=lam, entropy=entropy)


def vendi_score(samples, spec: KernelSpec) -> VendiResult:
    """Diversity of a sample list under the given kernel."""
    return vendi_from_kernel(build_kernel_matrix(samples, spec))


class KernelCache:
    """Kernel matrix over a growing sample list, extended one row at a time.

    extend() reuses kernel_row, the same routine build_kernel_matrix uses,
    so the cached matrix stays bitwise identical to a full rebuild.
    """

    def __init__(self, spec: KernelSpec, samples=()):
        self.spec = spec
        samples = [np.asarray(s, dtype=float) for s in samples]
        if samples:
            self.points = np.stack(samples)
            self.matrix = build_kernel_matrix(self.points, spec)
        else:
            self.points = None
            self.matrix = np.zeros((0, 0))

    def __len__(self) -> int:
        return self.matrix.shape[0]

    def extend(self, x: np.ndarray) -> None:
        x = np.asarray(x, dtype=float)
        if self.points is None:
            self.points = x[None, :]
            self.matrix = np.ones((1, 1))
            return
        row = kernel_row(x, self.points, self.spec)
        n = len(self)
        grown = np.empty((n + 1, n + 1))
        grown[:n, :n] = self.matrix
        grown[:n, n] = row
        grown[n, :n] = row
        grown[n, n] = 1.0
        self.matrix = grown
        self.points = np.vstack([self.points, x[None, :]])


def vendi_gradient(
    x: np.ndarray,
    others,
    spec: KernelSpec,
    others_matrix: np.ndarray | None = None,
) -> VendiGradient:
    """Analytic d score / d x where the score is taken over [x] + others.

    Uses the eigendecomposition of K/n: with eigenpairs (lam_m, v_m),
    dH/dK_ij = -(1/n) sum_m (log lam_m + 1) v_im v_jm, terms at the
    eigenvalue floor dropped, and d score/dK = score * dH/dK. Only x's
    off-diagonal row enters the chain rule (k(x, x) is constant), with a
    factor 2 from symmetry. others is treated as fixed.

    others_matrix, when given, must be the kernel matrix over others
    (see KernelCache); it is trusted and only shape-checked.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ContractViolation(f"x must be a 1-d vector, got shape {x.shape}")
    if len(others) == 0:
        # Score is identically 1; constant in x.
        return VendiGradient(grad=np.zeros_like(x), degenerate=False)
    others_mat = np.asarray(others, dtype=float)
    if others_mat.ndim == 1:
        others_mat = others_mat[None, :]
    if others_mat.shape[1] != x.shape[0]:
        raise ContractViolation(
            f"dimension mismatch: x has {x.shape[0]}, others have {others_mat.shape[1]}"
        )
    m = others_mat.shape[0]
    if others_matrix is None:
        others_matrix = build_kernel_matrix(others_mat, spec)
    elif others_matrix.shape != (m, m):
        raise ContractViolation(
            f"others_matrix shape {others_matrix.shape} does not match {m} samples"
        )

    n = m + 1
    kernel = np.empty((n, n))
    kernel[0, 0] = 1.0
    row = kernel_row(x, others_mat, spec)
    kernel[0, 1:] = row
    kernel[1:, 0] = row
    kernel[1:, 1:] = others_matrix

    try:
        lam, vecs = np.linalg.eigh(kernel / n)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"eigendecomposition failed for {n}x{n} kernel matrix: {exc}"
        ) from exc

    lam_clipped = np.clip(lam, 0.0, 1.0)
    entropy = _entropy(lam_clipped)
    score = float(np.exp(entropy))

    min_dist = float(np.sqrt(np.min(np.sum((others_mat - x) ** 2, axis=1))))
    degenerate = bool(np.any(lam <= EIGENVALUE_FLOOR)) or min_dist < COINCIDENCE_TOL
    if spec.kind == "cosine":
        eps = spec.epsilon_norm
        fm = spec.feature_map
        fx = fm.apply(x) if fm is not None else x
        fo = fm.apply(others_mat) if fm is not None else others_mat
        if np.linalg.norm(fx) < eps or np.any(np.linalg.norm(fo, axis=1) < eps):
            degenerate = True

    keep = lam_clipped > EIGENVALUE_FLOOR
    weights = np.log(lam_clipped[keep]) + 1.0
    # d score/dK_0j over all columns j, via score * dH/dK.
    d_score_row = -(score / n) * ((vecs[0, keep] * weights) @ vecs[:, keep].T)
    grads = kernel_row_gradients(x, others_mat, spec)
    grad = 2.0 * (d_score_row[1:] @ grads)
    return VendiGradient(grad=grad, degenerate=degenerate)
