"""Gaussian fields with the reproducing kernel as covariance.

A truncated realization is Psi(x) = sum_{idx in T} X_idx psi_idx(x) with
i.i.d. standard Gaussian draws X_idx over a finite truncation set T.  The
module estimates E sup |Psi| empirically over replications and, separately,
bounds it analytically through the entropy integral fed by a DecayProfile.

Replications use index-derived child generators, so estimates are
reproducible from one master seed and independent of execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .kernels import DecayProfile
from .projection import enumerate_best_indices
from .space import FrequencyWeights, basis_matrix, weight_at
from .util import (
    BudgetError,
    MultiIndex,
    mean_and_se,
    replication_rngs,
    uniform_grid,
)

__all__ = [
    "TruncationSet",
    "FieldSample",
    "SupNormEstimate",
    "DUDLEY_CONSTANT",
    "default_truncation",
    "sample_field",
    "evaluate_sample",
    "estimate_sup_norm",
    "dudley_bound",
    "smoothness_loss_statistic",
    "suggested_grid_resolution",
]

# Entropy-integral constant with the explicit numerical value 4 sqrt(2);
# overridable per call for sensitivity studies.
DUDLEY_CONSTANT = 4.0 * math.sqrt(2.0)


@dataclass(frozen=True)
class TruncationSet:
    """Finite set of retained basis indices, in canonical enumeration order.

    dropped_mass bounds the squared singular mass outside the set, i.e. the
    idealization gap of any method that only sees these indices.
    """

    d: int
    indices: tuple[MultiIndex, ...]
    dropped_mass: float

    def __post_init__(self) -> None:
        if not self.indices:
            raise ValueError("truncation set must be nonempty")
        if self.dropped_mass < 0.0:
            raise ValueError("dropped mass cannot be negative")

    def index_array(self) -> np.ndarray:
        return np.array(self.indices, dtype=int).reshape(len(self.indices), self.d)


@dataclass(frozen=True)
class FieldSample:
    """One truncated realization: a Gaussian draw per retained index."""

    draws: dict[MultiIndex, float]
    trunc: TruncationSet
    weights: FrequencyWeights


def default_truncation(
    weights: FrequencyWeights,
    d: int,
    mass_tol: float,
    max_indices: int | None = None,
) -> TruncationSet:
    """Smallest best-first index set whose dropped mass is <= mass_tol.

    Enumerates multi-indices by nonincreasing tensor singular value and
    stops once total - captured <= mass_tol, so the set is deterministic
    and the reported dropped_mass is a certified bound.
    """
    if not mass_tol > 0.0:
        raise ValueError("mass_tol must be positive")
    total = weights.sum_sq() ** d
    if mass_tol >= min(total, 1.0):
        raise ValueError(
            f"mass_tol {mass_tol} would allow an empty truncation "
            f"(total mass {total}); choose mass_tol < 1"
        )
    indices: list[MultiIndex] = []
    captured = 0.0
    for sig_sq, idx in enumerate_best_indices(weights, d):
        indices.append(idx)
        captured += sig_sq
        if total - captured <= mass_tol:
            break
        if max_indices is not None and len(indices) >= max_indices:
            raise BudgetError(
                f"truncation needs more than {max_indices} indices to reach "
                f"dropped mass {mass_tol}"
            )
    return TruncationSet(d=d, indices=tuple(indices), dropped_mass=max(total - captured, 0.0))


def sample_field(
    weights: FrequencyWeights, trunc: TruncationSet, rng: np.random.Generator
) -> FieldSample:
    """Fresh i.i.d. standard Gaussian draw per retained index."""
    draws = rng.standard_normal(len(trunc.indices))
    return FieldSample(
        draws=dict(zip(trunc.indices, draws.tolist())), trunc=trunc, weights=weights
    )


def evaluate_sample(sample: FieldSample, points: np.ndarray) -> np.ndarray:
    """Realized field values sum_idx X_idx psi_idx(x) at an (N, d) array."""
    points = np.atleast_2d(np.asarray(points, dtype=float)) % 1.0
    idx = sample.trunc.index_array()
    coefs = np.array([sample.draws[i] for i in sample.trunc.indices])
    return coefs @ basis_matrix(sample.weights, idx, points)


@dataclass(frozen=True)
class SupNormEstimate:
    """Grid-based empirical estimate of E sup |Psi|.

    The grid max under-estimates each realized supremum, so the mean is a
    lower-biased estimate; grid_points_per_dim records the resolution the
    bias depends on.
    """

    mean: float
    std_error: float
    replications: int
    grid_points_per_dim: int


def estimate_sup_norm(
    weights: FrequencyWeights,
    trunc: TruncationSet,
    grid_points_per_dim: int,
    replications: int,
    rng: np.random.Generator,
    point_budget: int = 1 << 21,
    points: np.ndarray | None = None,
) -> SupNormEstimate:
    """Mean over replications of the grid maximum of |Psi|.

    Pass `points` (an (N, d) array, e.g. a sparse random point set) to
    override the product grid when grid_points_per_dim**d would blow the
    point budget.
    """
    if replications < 2:
        raise ValueError("need at least 2 replications")
    if points is None:
        if grid_points_per_dim < 16:
            raise ValueError("need at least 16 grid points per dimension")
        points = uniform_grid(trunc.d, grid_points_per_dim, budget=point_budget)
    idx = trunc.index_array()
    draws = np.empty((replications, len(trunc.indices)))
    for i, child in enumerate(replication_rngs(rng, replications)):
        draws[i] = child.standard_normal(len(trunc.indices))
    # chunk the grid so the basis matrix stays small
    chunk = max(1, 4_000_000 // max(len(trunc.indices), 1))
    sups = np.zeros(replications)
    for start in range(0, points.shape[0], chunk):
        psi = basis_matrix(weights, idx, points[start : start + chunk])
        np.maximum(sups, np.max(np.abs(draws @ psi), axis=1), out=sups)
    mean, se = mean_and_se(sups)
    return SupNormEstimate(
        mean=mean,
        std_error=se,
        replications=replications,
        grid_points_per_dim=grid_points_per_dim if points is None else 0,
    )


def suggested_grid_resolution(
    profile: DecayProfile, d: int, target_cell_diameter: float = 0.05
) -> int:
    """Per-dim resolution making each grid cell's canonical diameter small.

    Within the profile's validity radius the canonical metric is bounded by
    sqrt(2 alpha d h^p) for coordinatewise offsets h, so resolving h keeps
    the sup over the cell close to the grid value.
    """
    h = (target_cell_diameter**2 / (2.0 * profile.alpha * d)) ** (1.0 / profile.p)
    return max(16, int(math.ceil(1.0 / h)))


def _entropy_exponent(r: float, d: int, p: float, alpha: float) -> float:
    # log(1 / vol(R B_p^d)) with R = (r^2 / (2 alpha))^{1/p}, clipped at 0
    radius = (r * r / (2.0 * alpha)) ** (1.0 / p)
    val = math.lgamma(d / p + 1.0) - d * (
        math.log(2.0 * radius) + math.lgamma(1.0 / p + 1.0)
    )
    return max(val, 0.0)


def dudley_bound(
    profile: DecayProfile,
    d: int,
    c_dudley: float = DUDLEY_CONSTANT,
    quad_rel_tol: float = 1e-6,
) -> float:
    """Analytic upper bound on E sup |Psi| from the entropy integral.

    The chain is sqrt(2/pi) (centered absolute first moment at one point)
    plus 4 c_dudley times the integral over radii of the square root of the
    log covering exponent, where balls in the canonical metric contain
    l_p balls through the decay profile.  Three regimes: the volume formula
    up to radius sqrt(2 alpha r0^p), the constant exponent of the r0-ball up
    to radius 2, and nothing beyond (the torus has canonical diameter 2).
    Integration is adaptive quadrature to relative tolerance quad_rel_tol.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    r1 = math.sqrt(2.0 * profile.alpha * profile.r0**profile.p)
    rc = min(r1, 2.0)
    integral, _ = quad(
        lambda r: math.sqrt(_entropy_exponent(r, d, profile.p, profile.alpha)),
        0.0,
        rc,
        limit=200,
        epsrel=quad_rel_tol,
        epsabs=0.0,
    )
    if r1 < 2.0:
        const = math.lgamma(d / profile.p + 1.0) - d * (
            math.log(2.0 * profile.r0) + math.lgamma(1.0 / profile.p + 1.0)
        )
        integral += (2.0 - r1) * math.sqrt(max(const, 0.0))
    return math.sqrt(2.0 / math.pi) + 4.0 * c_dudley * integral


def smoothness_loss_statistic(
    weights: FrequencyWeights,
    s: float,
    cutoffs,
    rng: np.random.Generator | None = None,
    replications: int = 200,
) -> list[tuple[int, float]]:
    """Second moments of the partial smoothness-s coefficient norm of Psi.

    For each frequency cutoff K the statistic is E sum_{|k| <= K} of the
    squared coefficient of Psi in the basis of the smoothness-s space, which
    reduces to 1 + 2 sum_{k=1}^{K} k^{-2(r-s)} (comparison weights reuse the
    same beta constants; constants do not affect convergence).  Bounded in K
    iff r - s > 1/2, which is the smoothness the randomized method forfeits.
    With an rng the expectation is replaced by an empirical mean over
    Gaussian draws.
    """
    if weights.kind != "korobov":
        raise ValueError("smoothness comparison defined for korobov weights")
    if not s < weights.r:
        raise ValueError(f"need s < r, got s={s}, r={weights.r}")
    exponent = 2.0 * (weights.r - s)
    out: list[tuple[int, float]] = []
    for cutoff in cutoffs:
        cutoff = int(cutoff)
        if cutoff < 0:
            raise ValueError("cutoffs must be nonnegative")
        k = np.arange(1, cutoff + 1, dtype=float)
        ratios_sq = np.concatenate(([1.0], k**-exponent, k**-exponent))
        if rng is None:
            moment = float(ratios_sq.sum())
        else:
            draws = rng.standard_normal((replications, ratios_sq.size))
            moment = float(np.mean(np.sum(draws * draws * ratios_sq, axis=1)))
        out.append((cutoff, moment))
    return out
