"""Reproducing kernels on the torus, canonical metrics, and decay profiles.

The one-dimensional kernel of the space with weights (w_k) is the stationary
cosine series

    K(x, y) = sum_{k>=0} w_k^2 cos(2 pi k (x - y)),

the d-dimensional kernel is the product over coordinates.  A DecayProfile
(p, alpha, r0) certifies the local lower bound K(x, y) >= 1 - alpha *
d_T(x, y)^p for torus distances up to r0; it is the only kernel summary the
entropy bound downstream needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .special import cosine_zeta, zeta
from .space import FrequencyWeights
from .util import NORMALIZATION_TOL

__all__ = [
    "KernelSpec",
    "DecayProfile",
    "torus_metric",
    "torus_metric_p",
    "kernel_1d",
    "kernel_nd",
    "kernel_at_distance",
    "canonical_metric",
    "initial_error",
    "decay_profile_korobov",
    "fit_decay_constant",
    "certify_decay_profile",
]


@dataclass(frozen=True)
class KernelSpec:
    """Kernel of a weight sequence plus its certified evaluation tolerance."""

    weights: FrequencyWeights
    trunc_tol: float = 1e-10

    def __post_init__(self) -> None:
        if not self.trunc_tol > 0.0:
            raise ValueError("trunc_tol must be positive")


@dataclass(frozen=True)
class DecayProfile:
    """Local polynomial decay K(x, 0) >= 1 - alpha * d_T(x, 0)^p for d_T <= r0."""

    p: float
    alpha: float
    r0: float

    def __post_init__(self) -> None:
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"decay exponent must be in (0, 1], got {self.p}")
        if not self.alpha > 0.0:
            raise ValueError("decay constant must be positive")
        if not 0.0 < self.r0 <= 0.5:
            raise ValueError("validity radius must be in (0, 1/2]")


def torus_metric(x: float, y: float) -> float:
    """Shortest distance along the circle of circumference 1; in [0, 1/2]."""
    diff = abs((x % 1.0) - (y % 1.0))
    return min(diff, 1.0 - diff)


def torus_metric_p(x, y, p: float) -> float:
    """l_p aggregation of coordinatewise torus distances; p = inf gives max."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    if not p > 0.0:
        raise ValueError("p must be positive (0 < p <= inf)")
    diff = np.abs((x % 1.0) - (y % 1.0))
    d = np.minimum(diff, 1.0 - diff)
    if math.isinf(p):
        return float(d.max())
    return float(np.sum(d**p) ** (1.0 / p))


def kernel_at_distance(spec: KernelSpec, u) -> np.ndarray | float:
    """K at torus distance u (the kernel is stationary); vectorized in u.

    Korobov weights: w_0^2 + w_1^2 * C(u, 2r) with the certified cosine
    series; explicit weights: the exact finite sum.
    """
    w = spec.weights
    scalar = np.isscalar(u)
    arr = np.atleast_1d(np.asarray(u, dtype=float)) % 1.0
    if w.kind == "korobov":
        out = w.beta0 + w.beta1 * np.asarray(
            cosine_zeta(arr, 2.0 * w.r, tol=min(spec.trunc_tol, 1e-11))
        )
    else:
        vals = np.asarray(w.values, dtype=float)
        k = np.arange(len(vals), dtype=float)
        out = np.sum(vals[None, :] ** 2 * np.cos(2.0 * math.pi * np.outer(arr, k)), axis=1)
    return float(out[0]) if scalar else out


def kernel_1d(spec: KernelSpec, x: float, y: float) -> float:
    """One-dimensional kernel value, within +-trunc_tol of the full series.

    Computed from the torus distance, so symmetry and translation invariance
    hold exactly.
    """
    return float(kernel_at_distance(spec, torus_metric(x, y)))


def kernel_nd(spec: KernelSpec, x, y) -> float:
    """Product kernel over coordinates, each factor within trunc_tol / d."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    d = len(x)
    factor_spec = KernelSpec(spec.weights, trunc_tol=spec.trunc_tol / d)
    dists = np.array([torus_metric(float(a), float(b)) for a, b in zip(x, y)])
    return float(np.prod(np.asarray(kernel_at_distance(factor_spec, dists))))


def canonical_metric(spec: KernelSpec, x, y) -> float:
    """sqrt(K(x,x) - 2 K(x,y) + K(y,y)), the metric induced by the kernel.

    Tiny negative radicands (down to -10 * trunc_tol) are rounding and clamp
    to 0; anything below that signals an inconsistent kernel and raises.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    rad = kernel_nd(spec, x, x) - 2.0 * kernel_nd(spec, x, y) + kernel_nd(spec, y, y)
    if rad < -10.0 * spec.trunc_tol:
        raise ValueError(f"canonical metric radicand {rad} below -10 * trunc_tol")
    return math.sqrt(max(rad, 0.0))


def initial_error(weights: FrequencyWeights, d: int) -> float:
    """(sum_k w_k^2)^{d/2}: the norm of the embedding into the sup norm.

    Equals 1 in every dimension iff the weights are normalized; otherwise it
    grows or decays exponentially in d.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return weights.sum_sq() ** (d / 2.0)


def fit_decay_constant(
    kernel: KernelSpec | Callable[[np.ndarray], np.ndarray],
    p: float,
    r0: float,
    grid_size: int = 10_000,
) -> float:
    """Numerical decay constant: 1.05 * max over (0, r0] of (1 - K(u)) / u^p.

    The 5% inflation is a grid-safety margin, heuristic rather than interval
    arithmetic.  `kernel` may be a KernelSpec or directly a vectorized map
    from torus distances to kernel values (used to validate the fit against
    synthetic kernels with known constants).
    """
    if not 0.0 < p <= 1.0:
        raise ValueError("p must be in (0, 1]")
    if not 0.0 < r0 <= 0.5:
        raise ValueError("r0 must be in (0, 1/2]")
    if grid_size < 1_000:
        raise ValueError("grid_size must be >= 1000")
    us = r0 * np.arange(1, grid_size + 1, dtype=float) / grid_size
    if isinstance(kernel, KernelSpec):
        vals = np.asarray(kernel_at_distance(kernel, us))
        tol = kernel.trunc_tol
    else:
        vals = np.asarray(kernel(us), dtype=float)
        tol = 1e-10
    if np.any(vals > 1.0 + tol):
        raise ValueError("kernel exceeds 1 on the grid; weights are not normalized")
    ratio = (1.0 - vals) / us**p
    return 1.05 * float(ratio.max())


def certify_decay_profile(
    spec: KernelSpec, profile: DecayProfile, grid_size: int = 10_000
) -> None:
    """Check K(u) >= 1 - alpha u^p on a fine grid of distances (0, r0]."""
    us = profile.r0 * np.arange(1, grid_size + 1, dtype=float) / grid_size
    vals = np.asarray(kernel_at_distance(spec, us))
    floor = 1.0 - profile.alpha * us**profile.p
    bad = vals < floor - 10.0 * spec.trunc_tol
    if np.any(bad):
        u = us[np.argmax(bad)]
        raise ValueError(
            f"decay profile fails certification at distance {u:.6g}: "
            f"kernel {vals[np.argmax(bad)]:.12g} < floor {floor[np.argmax(bad)]:.12g}"
        )


def decay_profile_korobov(
    weights: FrequencyWeights, grid_size: int = 10_000
) -> DecayProfile:
    """Certified decay profile of a normalized Korobov kernel.

    Smoothness r > 1 admits the derivative bound: p = 1, alpha =
    2 pi beta1 zeta(2r - 1), r0 = 1/2.  For 1/2 < r <= 1 the kernel is only
    Hoelder at 0, so p = 2r - 1 with r0 = 1/(sqrt(2) pi) and alpha fitted
    numerically (the sharp constant has no closed form).  Either way the
    returned profile passes the grid certification.
    """
    if weights.kind != "korobov":
        raise ValueError("decay profile formulas apply to korobov weights only")
    if abs(weights.sum_sq() - 1.0) > NORMALIZATION_TOL:
        raise ValueError("profile requires normalized weights")
    spec = KernelSpec(weights)
    if weights.r > 1.0:
        p = 1.0
        alpha = 2.0 * math.pi * weights.beta1 * zeta(2.0 * weights.r - 1.0)
        r0 = 0.5
    else:
        p = 2.0 * weights.r - 1.0
        r0 = 1.0 / (math.sqrt(2.0) * math.pi)
        alpha = fit_decay_constant(spec, p, r0, grid_size=grid_size)
    profile = DecayProfile(p=p, alpha=alpha, r0=r0)
    certify_decay_profile(spec, profile, grid_size=grid_size)
    return profile
