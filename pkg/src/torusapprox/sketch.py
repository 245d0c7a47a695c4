"""Finite-dimensional sequence-space building block of the randomized method.

For the identity embedding of the Euclidean unit ball of R^m into l_q^m, the
rank-n Gaussian sketch N^T N x with N = X / sqrt(n) is unbiased and its
expected l_q error is at most 2 E||X||_q / sqrt(n) for a standard Gaussian
m-vector X.  Deterministic methods, by contrast, cannot beat the
(1 - eps^2) m information lower bound for q = inf, which is the whole
curse-versus-tractability contrast in its smallest setting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import ndtri

from .special import normal_cdf
from .util import mean_and_se

__all__ = [
    "SketchConfig",
    "gaussian_sketch",
    "sketch_error_bound",
    "gauss_norm_expectation",
    "sequence_det_lower_bound",
]


@dataclass(frozen=True)
class SketchConfig:
    """Ambient dimension m, sketch rank n, target norm index q in [1, inf]."""

    m: int
    n: int
    q: float = math.inf
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be >= 1")
        if self.q < 1.0:
            raise ValueError("q must be >= 1")


def gaussian_sketch(
    x: np.ndarray, cfg: SketchConfig, rng: np.random.Generator
) -> np.ndarray:
    """N^T N x with a fresh n x m Gaussian N = X / sqrt(n); E[output] = x."""
    x = np.asarray(x, dtype=float)
    if x.shape != (cfg.m,):
        raise ValueError(f"expected a length-{cfg.m} vector, got shape {x.shape}")
    g = rng.standard_normal((cfg.n, cfg.m))
    return g.T @ (g @ x) / cfg.n


def sketch_error_bound(m: int, n: int, q: float) -> float:
    """Expected l_q error bound 2 E||X||_q / sqrt(n) of the rank-n sketch."""
    value, _ = gauss_norm_expectation(m, q)
    return 2.0 * value / math.sqrt(n)


def gauss_norm_expectation(
    m: int,
    q: float,
    method: str = "quadrature",
    rng: np.random.Generator | None = None,
    samples: int = 100_000,
) -> tuple[float, float]:
    """E||X||_q for an i.i.d. standard Gaussian m-vector; returns (value, se).

    q = inf has the exact tail-integral representation
        E max|X_i| = int_0^inf [1 - (2 Phi(t) - 1)^m] dt,
    integrated to a cutoff T with m (1 - Phi(T)) <= 1e-9, whose certified
    truncation keeps the relative error below 1e-4.  Finite q has no usable
    closed form, so it is Monte Carlo with a reported standard error (se = 0
    on the quadrature path).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if q < 1.0:
        raise ValueError("q must be >= 1")
    if method == "quadrature":
        if not math.isinf(q):
            raise ValueError("quadrature path only covers q = inf; use montecarlo")
        cutoff = float(ndtri(1.0 - 1e-9 / m))
        value, _ = quad(
            lambda t: 1.0 - (2.0 * normal_cdf(t) - 1.0) ** m,
            0.0,
            cutoff,
            limit=200,
            epsrel=1e-10,
        )
        return value, 0.0
    if method == "montecarlo":
        if rng is None:
            raise ValueError("montecarlo needs a generator")
        draws = rng.standard_normal((samples, m))
        norms = (
            np.max(np.abs(draws), axis=1)
            if math.isinf(q)
            else np.sum(np.abs(draws) ** q, axis=1) ** (1.0 / q)
        )
        return mean_and_se(norms)
    raise ValueError(f"unknown method {method!r}")


def sequence_det_lower_bound(m: int, eps: float) -> float:
    """(1 - eps^2) m: information needed by any deterministic method to reach
    accuracy eps for the embedding of l_2^m into l_inf^m."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    return (1.0 - eps * eps) * m
