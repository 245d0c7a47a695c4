"""Periodic tensor-product Hilbert spaces on the d-torus.

The space is defined by a square-summable sequence of frequency weights
w_0, w_1, ... : the orthonormal basis in dimension one is

    psi_0 = w_0,   psi_k = w_k cos(2 pi k x),   psi_{-k} = w_k sin(2 pi k x)

and in dimension d the tensor products psi_idx(x) = prod_j psi_{idx_j}(x_j).
Functions are stored as finite coefficient maps over multi-indices; the
Hilbert norm is then the Euclidean norm of the coefficients.

All types are immutable and all operations are pure; randomized helpers take
an explicit caller-owned generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .special import zeta, zeta_tail_bracket
from .util import (
    NORMALIZATION_TOL,
    BudgetError,
    MultiIndex,
    multi_index_key,
)

__all__ = [
    "FrequencyWeights",
    "SparseFunction",
    "normalize_korobov",
    "weight_at",
    "eval_basis_1d",
    "eval_function",
    "hilbert_norm",
    "random_unit_function",
    "embed_next_dimension",
    "basis_values_1d",
    "basis_matrix",
    "evaluate_at_points",
]


@dataclass(frozen=True)
class FrequencyWeights:
    """Weight sequence defining the space.

    kind "korobov": w_0 = sqrt(beta0), w_k = sqrt(beta1) k^{-r} with r > 1/2.
    kind "explicit": a finite list of nonnegative values, zero beyond.
    """

    kind: str
    r: float | None = None
    beta0: float | None = None
    beta1: float | None = None
    values: tuple[float, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.kind == "korobov":
            if self.r is None or self.beta0 is None or self.beta1 is None:
                raise ValueError("korobov weights need r, beta0 and beta1")
            if not self.r > 0.5:
                raise ValueError(
                    f"korobov smoothness must exceed 1/2 for a reproducing "
                    f"kernel to exist, got r={self.r}"
                )
            if not self.beta0 > 0.0 or not self.beta1 >= 0.0:
                raise ValueError("need beta0 > 0 and beta1 >= 0")
        elif self.kind == "explicit":
            if not self.values:
                raise ValueError("explicit weights need at least one value")
            if self.values[0] <= 0.0 or any(v < 0.0 for v in self.values):
                raise ValueError("weights must be nonnegative with w_0 > 0")
        else:
            raise ValueError(f"unknown weight kind {self.kind!r}")

    @classmethod
    def korobov(cls, r: float, beta0: float, beta1: float) -> "FrequencyWeights":
        return cls(kind="korobov", r=r, beta0=beta0, beta1=beta1)

    @classmethod
    def explicit(cls, values) -> "FrequencyWeights":
        return cls(kind="explicit", values=tuple(float(v) for v in values))

    def sum_sq(self) -> float:
        """sum_k w_k^2, with certified tail for the korobov kind."""
        if self.kind == "korobov":
            return self.beta0 + self.beta1 * zeta(2.0 * self.r)
        return float(sum(v * v for v in self.values))

    @property
    def normalized(self) -> bool:
        return abs(self.sum_sq() - 1.0) <= NORMALIZATION_TOL

    def tail_sq_bracket(self, cutoff: int) -> tuple[float, float]:
        """Bracket for sum_{k > cutoff} w_k^2 (exact for explicit weights)."""
        if self.kind == "korobov":
            lo, hi = zeta_tail_bracket(2.0 * self.r, cutoff)
            return self.beta1 * lo, self.beta1 * hi
        t = float(sum(v * v for v in self.values[cutoff + 1 :]))
        return t, t


def weight_at(weights: FrequencyWeights, k: int) -> float:
    """w_k for a nonnegative frequency k."""
    if k < 0:
        raise ValueError("frequency must be nonnegative; signed indices only label basis functions")
    if weights.kind == "korobov":
        if k == 0:
            return math.sqrt(weights.beta0)
        return math.sqrt(weights.beta1) * float(k) ** (-weights.r)
    if k < len(weights.values):
        return weights.values[k]
    return 0.0


def normalize_korobov(r: float, beta0: float) -> FrequencyWeights:
    """Korobov weights with beta1 chosen so that sum_k w_k^2 = 1.

    Solves beta0 + beta1 zeta(2r) = 1, which pins the initial error of the
    approximation problem at 1 for every dimension.
    """
    if not r > 0.5:
        raise ValueError(f"need r > 1/2, got r={r}")
    if not 0.0 < beta0 < 1.0:
        raise ValueError(f"need 0 < beta0 < 1 so that beta1 > 0, got beta0={beta0}")
    beta1 = (1.0 - beta0) / zeta(2.0 * r)
    return FrequencyWeights.korobov(r, beta0, beta1)


def _weights_for_abs(weights: FrequencyWeights, k_abs: np.ndarray) -> np.ndarray:
    if weights.kind == "korobov":
        out = np.full(k_abs.shape, math.sqrt(weights.beta0))
        pos = k_abs > 0
        out[pos] = math.sqrt(weights.beta1) * k_abs[pos].astype(float) ** (-weights.r)
        return out
    vals = np.asarray(weights.values, dtype=float)
    out = np.zeros(k_abs.shape)
    inside = k_abs < len(vals)
    out[inside] = vals[k_abs[inside]]
    return out


def basis_values_1d(weights: FrequencyWeights, ks: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Matrix psi_k(x) of shape (len(ks), len(xs)) for signed frequencies ks."""
    ks = np.asarray(ks, dtype=int)
    xs = np.asarray(xs, dtype=float)
    k_abs = np.abs(ks)
    lam = _weights_for_abs(weights, k_abs)
    ang = 2.0 * math.pi * k_abs[:, None] * xs[None, :]
    trig = np.where((ks < 0)[:, None], np.sin(ang), np.cos(ang))
    return lam[:, None] * trig


def eval_basis_1d(weights: FrequencyWeights, k: int, x: float) -> float:
    """psi_k(x): the constant w_0 for k = 0, cosine for k > 0, sine for k < 0."""
    return float(basis_values_1d(weights, np.array([k]), np.array([x % 1.0]))[0, 0])


def basis_matrix(
    weights: FrequencyWeights, indices: np.ndarray, points: np.ndarray
) -> np.ndarray:
    """psi_idx(x) for all multi-indices (m, d) at all points (N, d) -> (m, N)."""
    indices = np.asarray(indices, dtype=int)
    points = np.asarray(points, dtype=float)
    if indices.ndim != 2 or points.ndim != 2 or indices.shape[1] != points.shape[1]:
        raise ValueError("indices (m, d) and points (N, d) must share d")
    out = basis_values_1d(weights, indices[:, 0], points[:, 0])
    for j in range(1, indices.shape[1]):
        out *= basis_values_1d(weights, indices[:, j], points[:, j])
    return out


@dataclass(frozen=True)
class SparseFunction:
    """Function on the d-torus as a finite map multi-index -> coefficient."""

    d: int
    coefs: dict[MultiIndex, float]
    weights: FrequencyWeights

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        for idx, c in self.coefs.items():
            if len(idx) != self.d:
                raise ValueError(f"index {idx} does not match dimension {self.d}")
            if not math.isfinite(c):
                raise ValueError(f"coefficient at {idx} is not finite")

    def index_array(self) -> np.ndarray:
        if not self.coefs:
            return np.zeros((0, self.d), dtype=int)
        order = sorted(self.coefs, key=multi_index_key)
        return np.array(order, dtype=int).reshape(len(order), self.d)

    def coef_vector(self, indices: np.ndarray) -> np.ndarray:
        return np.array([self.coefs.get(tuple(row), 0.0) for row in indices], dtype=float)


def hilbert_norm(f: SparseFunction) -> float:
    """Euclidean norm of the coefficient map (the basis is orthonormal)."""
    if not f.coefs:
        return 0.0
    return float(np.linalg.norm(np.fromiter(f.coefs.values(), dtype=float)))


def evaluate_at_points(f: SparseFunction, points: np.ndarray) -> np.ndarray:
    """f at an (N, d) array of points, vectorized through the basis matrix."""
    points = np.atleast_2d(np.asarray(points, dtype=float)) % 1.0
    if points.shape[1] != f.d:
        raise ValueError(f"points have dimension {points.shape[1]}, function has {f.d}")
    if not f.coefs:
        return np.zeros(points.shape[0])
    idx = f.index_array()
    return f.coef_vector(idx) @ basis_matrix(f.weights, idx, points)


def eval_function(f: SparseFunction, x) -> float:
    """f(x) = sum of coef * prod_j psi_{k_j}(x_j) over the stored indices."""
    x = np.asarray(x, dtype=float).reshape(1, -1)
    return float(evaluate_at_points(f, x)[0])


def random_unit_function(
    d: int,
    support,
    rng: np.random.Generator,
    weights: FrequencyWeights | None = None,
) -> SparseFunction:
    """I.i.d. standard Gaussian coefficients on `support`, rescaled to norm 1.

    The support is sorted canonically before drawing, so the output depends
    only on the support set and the generator state.
    """
    support = sorted({tuple(int(k) for k in idx) for idx in support}, key=multi_index_key)
    if not support:
        raise ValueError("support must be nonempty")
    if any(len(idx) != d for idx in support):
        raise ValueError("support indices must match dimension d")
    coefs = rng.standard_normal(len(support))
    coefs /= np.linalg.norm(coefs)
    w = weights if weights is not None else normalize_korobov(1.25, 0.4)
    return SparseFunction(d=d, coefs=dict(zip(support, coefs.tolist())), weights=w)


def embed_next_dimension(
    f: SparseFunction,
    mass_tol: float = 1e-10,
    max_coefs: int = 10_000_000,
) -> SparseFunction:
    """Embed f into dimension d+1 without changing its norms.

    The extra coordinate receives the coefficient profile of the kernel
    section at 0, i.e. index (k_1, ..., k_d, k) gets coef * w_k for k >= 0.
    The new coordinate's tail is truncated once the dropped squared-norm mass
    is certified <= mass_tol, so the Hilbert norm is preserved up to
    mass_tol / 2.  The embedded function peaks at x_{d+1} = 0, where it
    reproduces f up to the same truncation mass.
    """
    w = f.weights
    if not w.normalized:
        raise ValueError("embedding requires normalized weights (sum of squares 1)")
    if w.kind == "explicit":
        cutoff = len(w.values) - 1
    else:
        cutoff = 1
        while w.tail_sq_bracket(cutoff)[1] > mass_tol:
            cutoff *= 2
            if cutoff * len(f.coefs) > max_coefs:
                raise BudgetError(
                    f"embedding needs more than {max_coefs} coefficients to "
                    f"certify dropped mass <= {mass_tol}; raise mass_tol"
                )
        lo = cutoff // 2
        while cutoff - lo > 1:  # smallest certified cutoff, bisected
            mid = (lo + cutoff) // 2
            if w.tail_sq_bracket(mid)[1] > mass_tol:
                lo = mid
            else:
                cutoff = mid
    if (cutoff + 1) * len(f.coefs) > max_coefs:
        raise BudgetError(
            f"embedding would materialize {(cutoff + 1) * len(f.coefs)} "
            f"coefficients (> {max_coefs}); raise mass_tol"
        )
    new_coefs: dict[MultiIndex, float] = {}
    for idx, c in f.coefs.items():
        for k in range(cutoff + 1):
            new_coefs[idx + (k,)] = c * weight_at(w, k)
    return SparseFunction(d=f.d + 1, coefs=new_coefs, weights=w)
