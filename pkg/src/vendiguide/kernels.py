"""Similarity kernels, kernel matrices, and their input-space derivatives.

All kernels are normalized so that k(a, a) = 1, which keeps every kernel
matrix built here unit-diagonal and positive semi-definite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from .errors import ContractViolation

KERNEL_KINDS = ("cosine", "rbf")


@dataclass(frozen=True)
class LinearFeatureMap:
    """Fixed linear lift applied to raw coordinates before kernel evaluation.

    matrix has shape (out_dim, in_dim). Gradients computed in lifted space
    are pulled back through the transpose.
    """

    matrix: np.ndarray

    @classmethod
    def identity(cls, dim: int) -> "LinearFeatureMap":
        return cls(np.eye(dim))

    @classmethod
    def random_lift(cls, in_dim: int, out_dim: int, seed: int) -> "LinearFeatureMap":
        rng = np.random.default_rng(seed)
        # Scale keeps lifted norms comparable to input norms.
        return cls(rng.standard_normal((out_dim, in_dim)) / np.sqrt(out_dim))

    @property
    def in_dim(self) -> int:
        return self.matrix.shape[1]

    def apply(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float) @ self.matrix.T

    def pull_back(self, grad: np.ndarray) -> np.ndarray:
        return grad @ self.matrix


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus its parameters.

    bandwidth is the rbf length scale; epsilon_norm guards cosine against
    zero-norm inputs. feature_map, when set, lifts inputs before the kernel
    is evaluated (gradients are returned in input space).
    """

    kind: str = "rbf"
    bandwidth: float = 1.0
    epsilon_norm: float = 1e-12
    feature_map: LinearFeatureMap | None = None

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ContractViolation(f"unknown kernel kind {self.kind!r}")
        if not self.bandwidth > 0:
            raise ContractViolation("bandwidth must be positive")
        if not self.epsilon_norm > 0:
            raise ContractViolation("epsilon_norm must be positive")


def _lift(x: np.ndarray, spec: KernelSpec) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if spec.feature_map is not None:
        return spec.feature_map.apply(x)
    return x


def _check_vector(x: np.ndarray, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ContractViolation(f"{name} must be a 1-d vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ContractViolation(f"{name} has non-finite entries")
    return x


def kernel_value(a: np.ndarray, b: np.ndarray, spec: KernelSpec) -> float:
    """Similarity k(a, b) in [-1, 1]; k(a, a) = 1 away from the norm guard."""
    a = _check_vector(a, "a")
    b = _check_vector(b, "b")
    if a.shape != b.shape:
        raise ContractViolation(f"dimension mismatch: {a.shape} vs {b.shape}")
    fa, fb = _lift(a, spec), _lift(b, spec)
    if spec.kind == "cosine":
        na = max(float(np.linalg.norm(fa)), spec.epsilon_norm)
        nb = max(float(np.linalg.norm(fb)), spec.epsilon_norm)
        return float(np.clip(np.dot(fa, fb) / (na * nb), -1.0, 1.0))
    d2 = float(np.dot(fa - fb, fa - fb))
    return float(np.exp(-d2 / (2.0 * spec.bandwidth**2)))


def kernel_gradient(a: np.ndarray, b: np.ndarray, spec: KernelSpec) -> np.ndarray:
    """d k(a, b) / d a, in input space.

    Cosine uses the guarded norms, so the zero-norm case returns a finite
    vector rather than raising; use is_degenerate_pair to detect it.
    """
    a = _check_vector(a, "a")
    b = _check_vector(b, "b")
    if a.shape != b.shape:
        raise ContractViolation(f"dimension mismatch: {a.shape} vs {b.shape}")
    fa, fb = _lift(a, spec), _lift(b, spec)
    if spec.kind == "cosine":
        na = max(float(np.linalg.norm(fa)), spec.epsilon_norm)
        nb = max(float(np.linalg.norm(fb)), spec.epsilon_norm)
        dot = float(np.dot(fa, fb))
        grad = fb / (na * nb) - (dot / (na**3 * nb)) * fa
    else:
        diff = fa - fb
        k = np.exp(-float(np.dot(diff, diff)) / (2.0 * spec.bandwidth**2))
        grad = -k * diff / spec.bandwidth**2
    if spec.feature_map is not None:
        grad = spec.feature_map.pull_back(grad)
    return grad


def is_degenerate_pair(a: np.ndarray, b: np.ndarray, spec: KernelSpec) -> bool:
    """True when the cosine norm guard is active for either argument."""
    if spec.kind != "cosine":
        return False
    fa, fb = _lift(a, spec), _lift(b, spec)
    return bool(
        np.linalg.norm(fa) < spec.epsilon_norm or np.linalg.norm(fb) < spec.epsilon_norm
    )


def kernel_row(x: np.ndarray, samples: np.ndarray, spec: KernelSpec) -> np.ndarray:
    """Vector of k(x, s_i) over the rows of samples.

    This is the single code path used to fill kernel matrices, so a matrix
    extended row by row is bitwise identical to one built in full.
    """
    x = np.asarray(x, dtype=float)
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        return np.zeros(0)
    if samples.shape[1] != x.shape[0]:
        raise ContractViolation(
            f"dimension mismatch: {samples.shape[1]} vs {x.shape[0]}"
        )
    fx = _lift(x, spec)
    fs = _lift(samples, spec)
    if spec.kind == "cosine":
        nx = max(float(np.linalg.norm(fx)), spec.epsilon_norm)
        ns = np.maximum(np.linalg.norm(fs, axis=1), spec.epsilon_norm)
        return np.clip((fs @ fx) / (ns * nx), -1.0, 1.0)
    diff = fs - fx
    d2 = np.einsum("ij,ij->i", diff, diff)
    return np.exp(-d2 / (2.0 * spec.bandwidth**2))


def kernel_row_gradients(
    x: np.ndarray, samples: np.ndarray, spec: KernelSpec
) -> np.ndarray:
    """Stacked d k(x, s_i) / d x, shape (n, in_dim); vectorized kernel_gradient."""
    x = np.asarray(x, dtype=float)
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        return np.zeros((0, x.shape[0]))
    fx = _lift(x, spec)
    fs = _lift(samples, spec)
    if spec.kind == "cosine":
        nx = max(float(np.linalg.norm(fx)), spec.epsilon_norm)
        ns = np.maximum(np.linalg.norm(fs, axis=1), spec.epsilon_norm)
        dots = fs @ fx
        grads = fs / (ns * nx)[:, None] - np.outer(dots / (nx**3 * ns), fx)
    else:
        diff = fx[None, :] - fs
        d2 = np.einsum("ij,ij->i", diff, diff)
        k = np.exp(-d2 / (2.0 * spec.bandwidth**2))
        grads = -k[:, None] * diff / spec.bandwidth**2
    if spec.feature_map is not None:
        grads = grads @ spec.feature_map.matrix
    return grads


def build_kernel_matrix(samples, spec: KernelSpec) -> np.ndarray:
    """Unit-diagonal similarity matrix over a sample list.

    The upper triangle is computed once via kernel_row and mirrored, so the
    result is exactly symmetric with an exact unit diagonal.
    """
    mat = np.asarray(samples, dtype=float)
    if mat.ndim == 1:
        mat = mat[None, :]
    n = mat.shape[0]
    if n < 1:
        raise ContractViolation("need at least one sample")
    if not np.all(np.isfinite(mat)):
        raise ContractViolation("samples contain non-finite entries")
    out = np.empty((n, n))
    for i in range(n - 1):
        out[i, i + 1 :] = kernel_row(mat[i], mat[i + 1 :], spec)
    lower = np.tril_indices(n, -1)
    out[lower] = out.T[lower]
    np.fill_diagonal(out, 1.0)
    return out


def median_bandwidth(points, feature_map: LinearFeatureMap | None = None) -> float:
    """Median pairwise distance over a point set (the usual rbf heuristic)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ContractViolation("need at least two points for the median heuristic")
    if feature_map is not None:
        pts = feature_map.apply(pts)
    dists = pdist(pts)
    positive = dists[dists > 0]
    if positive.size == 0:
        raise ContractViolation("all points coincide; median distance is zero")
    return float(np.median(positive))
