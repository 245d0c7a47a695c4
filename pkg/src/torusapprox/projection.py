"""Optimal deterministic approximation: singular spectrum of the embedding
into L2, best-first index enumeration, projection errors, and the
exponential complexity lower bound.

Against the uniform distribution on the torus the basis stays orthogonal in
L2, with singular values sigma_0 = w_0 and sigma_{+-k} = w_k / sqrt(2).  The
best rank-n linear method is the orthogonal projection onto the n basis
functions with the largest tensor singular values sigma_idx = prod_j
sigma_{k_j}; everything in this module is organized around enumerating those
products in certified nonincreasing order.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .space import FrequencyWeights, SparseFunction, basis_matrix, weight_at
from .util import BudgetError, MultiIndex, index_key, multi_index_key, uniform_grid

__all__ = [
    "SingularSpectrum1D",
    "IndexSelection",
    "enumerate_best_indices",
    "top_n_indices",
    "det_lower_bound",
    "project",
    "det_worst_case_error",
    "curse_bound",
    "korobov_beta",
    "paired_prefix_count",
]


class SingularSpectrum1D:
    """Singular values of the one-dimensional embedding into L2.

    sigma_0 = w_0, sigma_k = sigma_{-k} = w_{|k|} / sqrt(2) for k != 0; the
    squares over all signed frequencies sum to sum_k w_k^2.  `ordered()`
    yields (sigma^2, k) in nonincreasing order with the deterministic
    tie-break 0 < +k < -k.
    """

    def __init__(self, weights: FrequencyWeights):
        self.weights = weights

    def sigma_sq(self, k: int) -> float:
        if k == 0:
            return weight_at(self.weights, 0) ** 2
        return weight_at(self.weights, abs(k)) ** 2 / 2.0

    def sigma(self, k: int) -> float:
        return math.sqrt(self.sigma_sq(k))

    def total_sq(self) -> float:
        return self.weights.sum_sq()

    def tail_sq_bracket(self, cutoff: int) -> tuple[float, float]:
        """Bracket for the mass of all signed frequencies |k| > cutoff."""
        lo, hi = self.weights.tail_sq_bracket(cutoff)
        return lo, hi

    def ordered(self) -> Iterator[tuple[float, int]]:
        """Signed frequencies by nonincreasing sigma^2, ties by index_key.

        For korobov weights w_k decays monotonically, so only the constant
        has to be merged into the stream of +-k pairs.  Explicit weights are
        finite: sort outright (zero-weight frequencies are still emitted so
        enumeration order is total).
        """
        w = self.weights
        if w.kind == "explicit":
            entries = [(self.sigma_sq(0), 0)]
            for k in range(1, len(w.values)):
                entries.append((self.sigma_sq(k), k))
                entries.append((self.sigma_sq(-k), -k))
            entries.sort(key=lambda e: (-e[0], index_key(e[1])))
            yield from entries
            k = len(w.values)  # zero tail keeps the stream total
            while True:
                yield (0.0, k)
                yield (0.0, -k)
                k += 1
        s0 = self.sigma_sq(0)
        emitted_zero = False
        k = 1
        while True:
            sk = self.sigma_sq(k)
            if not emitted_zero and s0 >= sk:
                yield (s0, 0)
                emitted_zero = True
            yield (sk, k)
            yield (sk, -k)
            k += 1


@dataclass(frozen=True)
class IndexSelection:
    """Multi-indices ordered by nonincreasing sigma_idx^2 plus their mass."""

    d: int
    indices: tuple[MultiIndex, ...]
    captured_mass: float


def enumerate_best_indices(
    weights: FrequencyWeights, d: int
) -> Iterator[tuple[float, MultiIndex]]:
    """Yield (sigma_idx^2, idx) over Z^d in nonincreasing order.

    Best-first search on the product lattice: positions in the ordered 1-d
    spectrum form a monotone grid, so a heap seeded at the all-zero rank
    vector and expanded one coordinate at a time visits products largest
    first.  Ties break lexicographically with + before -, making the
    enumeration (and everything derived from it) reproducible.  Products are
    recomputed left to right at each pop so equal products are bit-equal to
    a brute-force evaluation.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    spectrum = SingularSpectrum1D(weights)
    ordered: list[tuple[float, int]] = []
    stream = spectrum.ordered()

    def extend(rank: int) -> None:
        while len(ordered) <= rank:
            ordered.append(next(stream))

    extend(0)

    def product(ranks: tuple[int, ...]) -> float:
        out = 1.0
        for t in ranks:
            out *= ordered[t][0]
        return out

    def to_index(ranks: tuple[int, ...]) -> MultiIndex:
        return tuple(ordered[t][1] for t in ranks)

    start = (0,) * d
    heap = [(-product(start), multi_index_key(to_index(start)), start)]
    seen = {start}
    while heap:
        negw, _, ranks = heapq.heappop(heap)
        yield -negw, to_index(ranks)
        for j in range(d):
            child = ranks[:j] + (ranks[j] + 1,) + ranks[j + 1 :]
            if child in seen:
                continue
            seen.add(child)
            extend(child[j])
            heapq.heappush(
                heap, (-product(child), multi_index_key(to_index(child)), child)
            )


def top_n_indices(weights: FrequencyWeights, d: int, n: int) -> IndexSelection:
    """The n multi-indices with the largest tensor singular values."""
    if n < 0:
        raise ValueError("n must be >= 0")
    indices: list[MultiIndex] = []
    mass = 0.0
    for sig_sq, idx in enumerate_best_indices(weights, d):
        if len(indices) == n:
            break
        indices.append(idx)
        mass += sig_sq
    return IndexSelection(d=d, indices=tuple(indices), captured_mass=mass)


def det_lower_bound(weights: FrequencyWeights, d: int, n: int) -> float:
    """Lower bound sqrt((1 - captured mass of the top n)_+) on the n-th
    minimal worst-case error of deterministic methods.

    Valid because the tail of the singular spectrum bounds the error of any
    rank-n method from below; requires normalized weights so the total mass
    is 1.
    """
    if not weights.normalized:
        raise ValueError("lower bound formula requires normalized weights")
    sel = top_n_indices(weights, d, n)
    return math.sqrt(max(1.0 - sel.captured_mass, 0.0))


def project(f: SparseFunction, sel: IndexSelection) -> SparseFunction:
    """Orthogonal projection: keep exactly the coefficients indexed by sel."""
    if f.d != sel.d:
        raise ValueError(f"dimension mismatch: function {f.d}, selection {sel.d}")
    keep = set(sel.indices)
    coefs = {idx: c for idx, c in f.coefs.items() if idx in keep}
    return SparseFunction(d=f.d, coefs=coefs, weights=f.weights)


def det_worst_case_error(
    weights: FrequencyWeights,
    d: int,
    sel: IndexSelection,
    grid_points_per_dim: int,
    point_budget: int = 1 << 21,
) -> float:
    """Exact sup-norm error of projecting onto sel, evaluated on a grid.

    The worst input aligns with the residual kernel, so the error equals
    max_x sqrt(K_d(x, x) - sum_{idx in sel} psi_idx(x)^2); the grid max is a
    certified lower estimate of the true supremum.  A grid with more than
    twice the largest selected frequency per axis integrates the residual
    exactly, which keeps the value above the spectral lower bound.
    """
    if d != sel.d:
        raise ValueError("selection dimension mismatch")
    grid = uniform_grid(d, grid_points_per_dim, budget=point_budget)
    diag = weights.sum_sq() ** d
    if not sel.indices:
        return math.sqrt(diag)
    idx = np.array(sel.indices, dtype=int).reshape(len(sel.indices), d)
    psi = basis_matrix(weights, idx, grid)
    residual = diag - np.sum(psi * psi, axis=0)
    worst = float(residual.max())
    if worst < -1e-9:
        raise ValueError(f"residual kernel {worst} is negative beyond tolerance")
    return math.sqrt(max(worst, 0.0))


def curse_bound(beta: float, d: int, eps: float) -> float:
    """beta^{-d} (1 - eps)^2: exponential lower bound on the deterministic
    information count at accuracy eps, where beta is the largest squared
    singular value of the one-dimensional embedding."""
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    return beta ** (-float(d)) * (1.0 - eps) ** 2


def korobov_beta(weights: FrequencyWeights) -> float:
    """sup over the squared 1-d singular values: max(beta0, beta1 / 2)."""
    if weights.kind == "korobov":
        return max(weights.beta0, weights.beta1 / 2.0)
    spectrum = SingularSpectrum1D(weights)
    best = spectrum.sigma_sq(0)
    for k in range(1, len(weights.values)):
        best = max(best, spectrum.sigma_sq(k))
    return best


def paired_prefix_count(sel: IndexSelection) -> int:
    """Largest prefix length of sel that is closed under per-axis sign flips.

    Sign-flip orbits {(+-k_1, ..., +-k_d)} contribute a constant to the
    projected energy (cos^2 + sin^2 = 1), so a prefix that completes whole
    orbits has worst-case error exactly the spectral bound at that count.
    """
    counts: dict[tuple[int, ...], int] = {}
    incomplete = 0
    best = 0
    for pos, idx in enumerate(sel.indices, start=1):
        orbit = tuple(abs(k) for k in idx)
        size = 2 ** sum(1 for k in orbit if k != 0)
        prev = counts.get(orbit, 0)
        if prev == 0 and size > 1:
            incomplete += 1
        counts[orbit] = prev + 1
        if counts[orbit] == size and size > 1:
            incomplete -= 1
        if incomplete == 0:
            best = pos
    return best
