"""Truncated Gaussian fields: sampling moments, sup-norm estimates, the
entropy bound, and the smoothness-loss statistic."""

import math

import numpy as np
import pytest
from scipy.special import gamma as gamma_fn
from scipy.special import gammaincc

from torusapprox.field import (
    FieldSample,
    TruncationSet,
    default_truncation,
    dudley_bound,
    estimate_sup_norm,
    evaluate_sample,
    sample_field,
    smoothness_loss_statistic,
    suggested_grid_resolution,
)
from torusapprox.kernels import DecayProfile, KernelSpec, decay_profile_korobov, kernel_nd
from torusapprox.space import FrequencyWeights, normalize_korobov
from torusapprox.util import BudgetError, derive_rng


@pytest.fixture(scope="module")
def korobov():
    return normalize_korobov(1.25, 0.4)


# --- truncation -------------------------------------------------------------

def test_default_truncation_contains_constant(korobov):
    trunc = default_truncation(korobov, 2, 0.9)
    assert (0, 0) in trunc.indices


def test_default_truncation_trims_mass(korobov):
    # growing the set far enough at least halves the dropped mass
    loose = default_truncation(korobov, 1, 1e-2)
    tight = default_truncation(korobov, 1, loose.dropped_mass / 2.0)
    assert tight.dropped_mass <= loose.dropped_mass / 2.0 + 1e-12
    assert len(tight.indices) > len(loose.indices)
    assert loose.dropped_mass <= 1e-2


def test_default_truncation_deterministic(korobov):
    a = default_truncation(korobov, 2, 1e-2)
    b = default_truncation(korobov, 2, 1e-2)
    assert a == b


def test_default_truncation_rejects_degenerate_tolerance(korobov):
    with pytest.raises(ValueError):
        default_truncation(korobov, 1, 1.0)
    with pytest.raises(BudgetError):
        default_truncation(korobov, 1, 1e-8, max_indices=10)


def test_truncation_dropped_mass_vs_tail_bracket(korobov):
    # the set may stop mid sign-pair, so the dropped mass sits between the
    # tail after the highest kept frequency and the tail before it
    trunc = default_truncation(korobov, 1, 1e-3)
    freq = max(abs(k[0]) for k in trunc.indices)
    lo, _ = korobov.tail_sq_bracket(freq)
    _, hi = korobov.tail_sq_bracket(freq - 1)
    assert lo - 1e-12 <= trunc.dropped_mass <= hi + 1e-12


# --- field sampling -----------------------------------------------------------

def test_sample_field_reproducible(korobov):
    trunc = default_truncation(korobov, 1, 1e-2)
    s1 = sample_field(korobov, trunc, np.random.default_rng(5))
    s2 = sample_field(korobov, trunc, np.random.default_rng(5))
    assert s1.draws == s2.draws


def test_field_mean_and_covariance_match_kernel(korobov):
    # empirical first and second moments against the truncated kernel
    trunc = default_truncation(korobov, 1, 1e-3)
    spec = KernelSpec(korobov)
    reps = 10_000
    rng = np.random.default_rng(77)
    points = np.array([[0.0], [0.17], [0.45], [0.8], [0.63]])
    vals = np.empty((reps, len(points)))
    for i in range(reps):
        vals[i] = evaluate_sample(sample_field(korobov, trunc, rng), points)
    mean = vals.mean(axis=0)
    se = vals.std(axis=0, ddof=1) / math.sqrt(reps)
    np.testing.assert_array_less(np.abs(mean), 4.0 * se + 1e-12)
    for a in range(len(points)):
        for b in range(a, len(points)):
            emp = np.mean(vals[:, a] * vals[:, b]) - mean[a] * mean[b]
            k_ab = kernel_nd(spec, points[a], points[b])
            prod_se = np.std(vals[:, a] * vals[:, b], ddof=1) / math.sqrt(reps)
            # truncation removes at most dropped_mass of diagonal covariance
            assert abs(emp - k_ab) <= 4.0 * prod_se + trunc.dropped_mass


# --- sup-norm estimation ----------------------------------------------------------

def test_estimate_sup_norm_constant_field():
    # a field on the constant alone is w_0 |X|: half-normal mean
    w = normalize_korobov(1.25, 0.4)
    trunc = TruncationSet(d=1, indices=((0,),), dropped_mass=0.6)
    est = estimate_sup_norm(w, trunc, 16, 4_000, np.random.default_rng(3))
    expected = math.sqrt(0.4) * math.sqrt(2.0 / math.pi)
    assert est.mean == pytest.approx(expected, abs=4.0 * est.std_error)
    assert expected == pytest.approx(0.50463, abs=1e-5)


def test_estimate_sup_norm_monotone_in_truncation(korobov):
    small = default_truncation(korobov, 1, 0.2)
    large = default_truncation(korobov, 1, 1e-3)
    rng = lambda: np.random.default_rng(2024)
    est_small = estimate_sup_norm(korobov, small, 64, 600, rng())
    est_large = estimate_sup_norm(korobov, large, 64, 600, rng())
    joint_se = math.hypot(est_small.std_error, est_large.std_error)
    assert est_large.mean >= est_small.mean - 2.0 * joint_se


def test_estimate_sup_norm_dimension_scaling(korobov):
    # estimates stay below a multiple of sqrt(d (1 + log d))
    rows = []
    for i, d in enumerate((1, 2, 3)):
        trunc = default_truncation(korobov, d, 5e-2)
        est = estimate_sup_norm(korobov, trunc, 24, 300, derive_rng(99, "scal", i))
        rows.append(est.mean / math.sqrt(d * (1.0 + math.log(d))))
    assert max(rows) <= 3.0 * rows[0]


def test_estimate_sup_norm_budget_and_fallback(korobov):
    trunc = default_truncation(korobov, 3, 0.3)
    with pytest.raises(BudgetError):
        estimate_sup_norm(korobov, trunc, 1024, 10, np.random.default_rng(0), point_budget=10_000)
    pts = np.random.default_rng(1).uniform(size=(500, 3))
    est = estimate_sup_norm(
        korobov, trunc, 1024, 50, np.random.default_rng(2), point_budget=10_000, points=pts
    )
    assert est.grid_points_per_dim == 0 and est.mean > 0.0


def test_estimate_sup_norm_validation(korobov):
    trunc = default_truncation(korobov, 1, 0.5)
    with pytest.raises(ValueError):
        estimate_sup_norm(korobov, trunc, 64, 1, np.random.default_rng(0))
    with pytest.raises(ValueError):
        estimate_sup_norm(korobov, trunc, 8, 10, np.random.default_rng(0))


# --- entropy bound -------------------------------------------------------------------

def dudley_closed_form(profile: DecayProfile, d: int) -> float:
    """Oracle: the radial integral in closed form via the incomplete gamma."""
    p, alpha, r0 = profile.p, profile.alpha, profile.r0
    r1 = math.sqrt(2.0 * alpha * r0**p)
    rc = min(r1, 2.0)
    a_const = (
        math.lgamma(d / p + 1.0)
        - d * (math.log(2.0) + math.lgamma(1.0 / p + 1.0))
        + (d / p) * math.log(2.0 * alpha)
    )
    b_const = 2.0 * d / p
    tc = max(a_const - b_const * math.log(rc), 0.0)
    integral = (
        math.exp(a_const / b_const)
        * math.sqrt(b_const)
        * gammaincc(1.5, tc / b_const)
        * gamma_fn(1.5)
    )
    if r1 < 2.0:
        const = math.lgamma(d / p + 1.0) - d * (
            math.log(2.0 * r0) + math.lgamma(1.0 / p + 1.0)
        )
        integral += (2.0 - r1) * math.sqrt(max(const, 0.0))
    return math.sqrt(2.0 / math.pi) + 4.0 * (4.0 * math.sqrt(2.0)) * integral


@pytest.mark.parametrize("r,beta0", [(0.75, 0.4), (1.25, 0.4), (2.0, 0.4)])
@pytest.mark.parametrize("d", [1, 2, 3, 8])
def test_dudley_bound_matches_closed_form(r, beta0, d):
    profile = decay_profile_korobov(normalize_korobov(r, beta0))
    assert dudley_bound(profile, d) == pytest.approx(
        dudley_closed_form(profile, d), rel=1e-5
    )


def test_dudley_bound_finite_positive_and_floor():
    for p, alpha, r0 in [(1.0, 0.3, 0.5), (0.5, 12.0, 0.2), (1.0, 40.0, 0.5)]:
        profile = DecayProfile(p=p, alpha=alpha, r0=r0)
        for d in (1, 4, 16):
            val = dudley_bound(profile, d)
            assert math.isfinite(val)
            assert val >= math.sqrt(2.0 / math.pi)  # E|Psi_x| floor at any point


def test_dudley_bound_monotone_in_alpha():
    vals = [dudley_bound(DecayProfile(1.0, a, 0.5), 3) for a in (0.25, 1.0, 4.0, 16.0)]
    assert all(x <= y + 1e-12 for x, y in zip(vals, vals[1:]))


def test_dudley_bound_dimension_shape(korobov):
    profile = decay_profile_korobov(korobov)
    scaled = [
        dudley_bound(profile, d) / math.sqrt(d * (1.0 + math.log(d)))
        for d in (1, 2, 4, 8, 16, 32, 64)
    ]
    assert max(scaled) <= 3.0 * min(scaled)


@pytest.mark.parametrize("r", [0.75, 1.25, 2.0])
@pytest.mark.parametrize("d", [1, 2, 3])
def test_dudley_dominates_empirical(r, d):
    w = normalize_korobov(r, 0.4)
    profile = decay_profile_korobov(w)
    trunc = default_truncation(w, d, 5e-2)
    est = estimate_sup_norm(w, trunc, 20, 200, derive_rng(5, "dom", 10 * d))
    assert est.mean - 3.0 * est.std_error <= dudley_bound(profile, d)


def test_suggested_grid_resolution(korobov):
    profile = decay_profile_korobov(korobov)
    g1 = suggested_grid_resolution(profile, 1)
    g3 = suggested_grid_resolution(profile, 3)
    assert g1 >= 16 and g3 >= g1  # higher dimension needs finer cells


# --- smoothness loss -------------------------------------------------------------------

def test_smoothness_loss_convergent_case(korobov):
    # r - s = 0.75: ratio series sums like k^{-1.5}; bounded by its limit
    from torusapprox.special import zeta

    table = smoothness_loss_statistic(korobov, 0.5, [10, 100, 1_000, 10_000])
    values = [v for _, v in table]
    limit = 1.0 + 2.0 * zeta(1.5)
    assert all(a < b for a, b in zip(values, values[1:]))
    assert values[-1] <= limit
    assert values[-1] >= limit - 0.2


def test_smoothness_loss_log_divergence(korobov):
    # r - s = 0.5: harmonic growth, increments match log(K2/K1)
    table = dict(smoothness_loss_statistic(korobov, 0.75, [100, 1_000, 10_000]))
    inc1 = table[1_000] - table[100]
    inc2 = table[10_000] - table[1_000]
    assert inc1 == pytest.approx(2.0 * math.log(10.0), abs=0.05)
    assert inc2 == pytest.approx(2.0 * math.log(10.0), abs=0.05)


def test_smoothness_loss_sqrt_divergence(korobov):
    # r - s = 0.25: partial sums grow like K^{1/2}
    table = dict(smoothness_loss_statistic(korobov, 1.0, [100, 10_000]))
    assert table[10_000] / table[100] == pytest.approx(10.0, rel=0.25)


def test_smoothness_loss_empirical_matches_exact(korobov):
    exact = dict(smoothness_loss_statistic(korobov, 0.5, [100]))[100]
    rng = np.random.default_rng(8)
    emp = dict(
        smoothness_loss_statistic(korobov, 0.5, [100], rng=rng, replications=4_000)
    )[100]
    assert emp == pytest.approx(exact, rel=0.1)


def test_smoothness_loss_rejects_s_not_below_r(korobov):
    with pytest.raises(ValueError):
        smoothness_loss_statistic(korobov, 1.25, [10])
    with pytest.raises(ValueError):
        smoothness_loss_statistic(korobov, 1.5, [10])
