"""Randomized approximation by averaged Gaussian trials.

The method draws an n x m standard Gaussian array X over the m retained
basis indices, observes y = X c (each row is one random functional of the
input's coefficients c), and returns the function with coefficients
X^T y / n.  In expectation X^T X / n is the identity, so the output is an
unbiased reconstruction whose error decays like n^{-1/2} in the expected
sup norm.  The Gaussian array depends only on the generator state and the
truncation ordering, never on the input, which keeps the method linear for
a fixed draw.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .field import TruncationSet
from .space import SparseFunction, basis_matrix, weight_at
from .util import mean_and_se, replication_rngs, uniform_grid

__all__ = [
    "MCConfig",
    "ErrorReport",
    "mc_approximate",
    "mc_error_bound",
    "mc_complexity_bound",
    "empirical_error",
]


@dataclass(frozen=True)
class MCConfig:
    """Trial count n, the truncation the trials act on, and a master seed."""

    n: int
    trunc: TruncationSet
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("need at least one trial")


@dataclass(frozen=True)
class ErrorReport:
    """Replication summary of the measured sup-norm error."""

    mean_error: float
    std_error: float
    replications: int
    per_replication_errors: tuple[float, ...]
    grid_points_per_dim: int


def mc_approximate(
    f: SparseFunction, cfg: MCConfig, rng: np.random.Generator
) -> SparseFunction:
    """One randomized trial-average approximation of f.

    Supported on exactly the truncation set; coefficients are
    (1/n) X^T (X c) with c the input's coefficients restricted to the
    truncation (in its canonical ordering).
    """
    if f.d != cfg.trunc.d:
        raise ValueError(f"dimension mismatch: input {f.d}, truncation {cfg.trunc.d}")
    m = len(cfg.trunc.indices)
    c = np.array([f.coefs.get(idx, 0.0) for idx in cfg.trunc.indices])
    x = rng.standard_normal((cfg.n, m))
    out = x.T @ (x @ c) / cfg.n
    return SparseFunction(
        d=f.d, coefs=dict(zip(cfg.trunc.indices, out.tolist())), weights=f.weights
    )


def mc_error_bound(sup_est: float, n: int) -> float:
    """Expected sup-norm error bound 2 E||Psi||_inf / sqrt(n)."""
    if sup_est < 0.0:
        raise ValueError("sup-norm expectation cannot be negative")
    if n < 1:
        raise ValueError("need n >= 1")
    return 2.0 * sup_est / math.sqrt(n)


def mc_complexity_bound(sup_est: float, eps: float) -> int:
    """Trials guaranteeing expected error <= eps: ceil(4 (E||Psi||_inf / eps)^2)."""
    if sup_est < 0.0:
        raise ValueError("sup-norm expectation cannot be negative")
    if not eps > 0.0:
        raise ValueError("eps must be positive")
    return int(math.ceil(4.0 * (sup_est / eps) ** 2))


def _truncation_remainder_sup(f: SparseFunction, trunc: TruncationSet) -> float:
    # Certified sup-norm bound for the part of f outside the truncation:
    # sum |c_idx| * prod_j w_{|k_j|} since |cos|, |sin| <= 1.
    keep = set(trunc.indices)
    total = 0.0
    for idx, c in f.coefs.items():
        if idx in keep:
            continue
        amp = 1.0
        for k in idx:
            amp *= weight_at(f.weights, abs(k))
        total += abs(c) * amp
    return total


def empirical_error(
    f: SparseFunction,
    cfg: MCConfig,
    grid_points_per_dim: int,
    replications: int,
    rng: np.random.Generator | None = None,
    point_budget: int = 1 << 21,
) -> ErrorReport:
    """Expected sup-norm error of the method on input f, measured on a grid.

    Each replication reruns the approximation under its own index-derived
    child generator and records the grid maximum of |f - output| plus the
    certified sup-norm remainder of f outside the truncation set.  When no
    generator is passed, one is seeded from cfg.seed.
    """
    if replications < 2:
        raise ValueError("need at least 2 replications")
    if rng is None:
        if cfg.seed is None:
            raise ValueError("pass a generator or set cfg.seed")
        rng = np.random.default_rng(cfg.seed)
    grid = uniform_grid(f.d, grid_points_per_dim, budget=point_budget)
    union: list = list(cfg.trunc.indices)
    seen = set(cfg.trunc.indices)
    union.extend(idx for idx in f.coefs if idx not in seen)
    idx_arr = np.array(union, dtype=int).reshape(len(union), f.d)
    c_full = np.array([f.coefs.get(idx, 0.0) for idx in union])
    m = len(cfg.trunc.indices)
    c_trunc = c_full[:m]
    remainder = _truncation_remainder_sup(f, cfg.trunc)
    deltas = np.tile(c_full, (replications, 1))
    for i, child in enumerate(replication_rngs(rng, replications)):
        x = child.standard_normal((cfg.n, m))
        deltas[i, :m] -= x.T @ (x @ c_trunc) / cfg.n
    # chunk the grid so the basis matrix stays small
    chunk = max(1, 4_000_000 // max(len(union), 1))
    maxima = np.zeros(replications)
    for start in range(0, grid.shape[0], chunk):
        psi = basis_matrix(f.weights, idx_arr, grid[start : start + chunk])
        np.maximum(maxima, np.max(np.abs(deltas @ psi), axis=1), out=maxima)
    errors = maxima + remainder
    mean, se = mean_and_se(errors)
    return ErrorReport(
        mean_error=mean,
        std_error=se,
        replications=replications,
        per_replication_errors=tuple(errors.tolist()),
        grid_points_per_dim=grid_points_per_dim,
    )
