"""Shared plumbing: index ordering, grids, replication statistics, seeds."""

from __future__ import annotations

import math
import zlib

import numpy as np

MultiIndex = tuple[int, ...]

# Tolerance for the `normalized` flag: ~100x double epsilon accumulated over
# sums of up to 1e6 terms.
NORMALIZATION_TOL = 1e-12


class BudgetError(RuntimeError):
    """A grid or index set would exceed the configured size budget."""


class NonFiniteError(ValueError):
    """A NaN or infinity appeared where a finite number is required."""


def index_key(k: int) -> tuple[int, int]:
    """Total order on signed frequencies: 0 < 1 < -1 < 2 < -2 < ...

    Positive before negative breaks ties between the cos/sin twins of the
    same frequency, keeping every enumeration reproducible.
    """
    return (abs(k), 1 if k < 0 else 0)


def multi_index_key(idx: MultiIndex) -> tuple[tuple[int, int], ...]:
    """Lexicographic key on multi-indices built from `index_key` per axis."""
    return tuple(index_key(k) for k in idx)


def uniform_grid(d: int, points_per_dim: int, budget: int | None = None) -> np.ndarray:
    """Uniform product grid {0, 1/g, ..., (g-1)/g}^d as an (g^d, d) array.

    Row order is C order (last axis fastest), which fixes the byte layout of
    everything derived from the grid.
    """
    if d < 1 or points_per_dim < 1:
        raise ValueError("dimension and resolution must be >= 1")
    total = points_per_dim**d
    if budget is not None and total > budget:
        raise BudgetError(
            f"grid of {points_per_dim}^{d} = {total} points exceeds the budget "
            f"of {budget}; lower the resolution or fall back to a sparse "
            f"random point set"
        )
    axis = np.arange(points_per_dim, dtype=float) / points_per_dim
    if d == 1:
        return axis[:, None]
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def mean_and_se(values: np.ndarray) -> tuple[float, float]:
    """Sample mean and standard error (ddof=1); requires >= 2 values."""
    arr = np.asarray(values, dtype=float)
    if arr.size < 2:
        raise ValueError("need at least 2 replications for a standard error")
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(arr.size))


def derive_rng(seed: int, label: str, index: int = 0) -> np.random.Generator:
    """Deterministic generator from (master seed, label hash, index).

    The mix is SeedSequence([seed, crc32(label), index]), so streams for
    different labels or indices are independent and the result does not
    depend on the order in which streams are consumed.
    """
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF, zlib.crc32(label.encode("utf-8")), int(index)]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def replication_rngs(rng: np.random.Generator, replications: int) -> list[np.random.Generator]:
    """Independent per-replication generators, index-derived from `rng`.

    Replication i always receives child i regardless of execution order, so
    concurrent schedules produce identical per-replication results.
    """
    return rng.spawn(replications)


def ensure_finite(name: str, values) -> None:
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"non-finite value produced by {name}")
