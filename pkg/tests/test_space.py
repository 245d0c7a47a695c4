"""Weight sequences, basis evaluation, sparse functions, embeddings."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusapprox.space import (
    FrequencyWeights,
    SparseFunction,
    basis_values_1d,
    embed_next_dimension,
    eval_basis_1d,
    eval_function,
    hilbert_norm,
    normalize_korobov,
    random_unit_function,
    weight_at,
)
from torusapprox.special import zeta
from torusapprox.util import BudgetError


@pytest.fixture(scope="module")
def korobov():
    return normalize_korobov(1.25, 0.4)


# --- normalization -----------------------------------------------------------

def test_normalize_korobov_figure_parameters(korobov):
    assert korobov.beta1 == pytest.approx(0.4473, abs=1e-4)
    assert korobov.normalized


def test_normalize_korobov_zeta2_case():
    w = normalize_korobov(1.0, 0.5)
    assert w.beta1 == pytest.approx(3.0 / math.pi**2, abs=1e-12)


def test_normalize_korobov_rejects_bad_parameters():
    with pytest.raises(ValueError):
        normalize_korobov(0.5, 0.5)  # zeta(2r) diverges
    with pytest.raises(ValueError):
        normalize_korobov(1.25, 1.0)  # would force beta1 <= 0
    with pytest.raises(ValueError):
        normalize_korobov(1.25, 0.0)


@given(
    st.floats(min_value=0.55, max_value=4.0),
    st.floats(min_value=0.05, max_value=0.95),
    st.integers(min_value=1, max_value=5_000),
)
@settings(max_examples=40, deadline=None)
def test_partial_mass_plus_tail_brackets_one(r, beta0, cutoff):
    w = normalize_korobov(r, beta0)
    partial = sum(weight_at(w, k) ** 2 for k in range(cutoff + 1))
    lo, hi = w.tail_sq_bracket(cutoff)
    assert partial + lo <= 1.0 + 1e-9
    assert partial + hi >= 1.0 - 1e-9


# --- weights ------------------------------------------------------------------

def test_weight_values(korobov):
    assert weight_at(korobov, 0) == pytest.approx(math.sqrt(0.4), abs=1e-12)
    assert weight_at(korobov, 2) == pytest.approx(
        math.sqrt(korobov.beta1) * 2.0**-1.25, abs=1e-12
    )


def test_explicit_weights_tail_zero():
    w = FrequencyWeights.explicit([1.0])
    assert weight_at(w, 5) == 0.0
    assert w.sum_sq() == 1.0 and w.normalized


def test_explicit_weights_validation():
    with pytest.raises(ValueError):
        FrequencyWeights.explicit([])
    with pytest.raises(ValueError):
        FrequencyWeights.explicit([0.0, 1.0])  # w_0 must be positive


# --- basis --------------------------------------------------------------------

def test_basis_constant_cosine_sine(korobov):
    w0 = weight_at(korobov, 0)
    w1 = weight_at(korobov, 1)
    assert eval_basis_1d(korobov, 0, 0.731) == pytest.approx(w0)
    assert eval_basis_1d(korobov, 1, 0.0) == pytest.approx(w1)
    assert eval_basis_1d(korobov, -1, 0.25) == pytest.approx(w1)  # sin(pi/2)


def test_basis_orthonormality_on_grid(korobov):
    # L2 inner products of normalized basis functions vanish off the diagonal
    g = 2048
    xs = np.arange(g) / g
    ks = np.arange(-6, 7)
    vals = basis_values_1d(korobov, ks, xs)
    sigma = np.where(ks == 0, weight_at(korobov, 0), [weight_at(korobov, abs(k)) / math.sqrt(2) for k in ks])
    gram = (vals / sigma[:, None]) @ (vals / sigma[:, None]).T / g
    np.testing.assert_allclose(gram, np.eye(len(ks)), atol=1e-8)


# --- sparse functions ----------------------------------------------------------

def test_eval_constant_function(korobov):
    f = SparseFunction(d=3, coefs={(0, 0, 0): 1.0}, weights=korobov)
    w0 = weight_at(korobov, 0)
    assert eval_function(f, [0.1, 0.7, 0.3]) == pytest.approx(w0**3)


def test_eval_zero_and_single_cos(korobov):
    zero = SparseFunction(d=2, coefs={}, weights=korobov)
    assert eval_function(zero, [0.4, 0.9]) == 0.0
    f = SparseFunction(d=1, coefs={(1,): 1.0}, weights=korobov)
    assert eval_function(f, [0.0]) == pytest.approx(weight_at(korobov, 1))


def test_eval_dimension_mismatch(korobov):
    f = SparseFunction(d=2, coefs={(0, 1): 1.0}, weights=korobov)
    with pytest.raises(ValueError):
        eval_function(f, [0.5])


coef_maps = st.dictionaries(
    st.tuples(st.integers(min_value=-8, max_value=8)),
    st.floats(min_value=-5, max_value=5, allow_nan=False),
    min_size=0,
    max_size=8,
)


@given(coef_maps)
@settings(max_examples=60, deadline=None)
def test_parseval(coefs):
    w = normalize_korobov(1.25, 0.4)
    f = SparseFunction(d=1, coefs=coefs, weights=w)
    assert hilbert_norm(f) == pytest.approx(
        math.sqrt(sum(c * c for c in coefs.values())), rel=1e-12, abs=1e-12
    )


@given(coef_maps, coef_maps, st.floats(-3, 3), st.floats(-3, 3), st.floats(0, 1, exclude_max=True))
@settings(max_examples=40, deadline=None)
def test_eval_linearity(ca, cb, a, b, x):
    w = normalize_korobov(1.25, 0.4)
    fa = SparseFunction(d=1, coefs=ca, weights=w)
    fb = SparseFunction(d=1, coefs=cb, weights=w)
    keys = set(ca) | set(cb)
    combo = SparseFunction(
        d=1,
        coefs={k: a * ca.get(k, 0.0) + b * cb.get(k, 0.0) for k in keys},
        weights=w,
    )
    lhs = eval_function(combo, [x])
    rhs = a * eval_function(fa, [x]) + b * eval_function(fb, [x])
    scale = max(1.0, abs(lhs), abs(rhs))
    assert abs(lhs - rhs) <= 1e-12 * scale


# --- random unit inputs ----------------------------------------------------------

def test_random_unit_function_normalized_and_deterministic(korobov):
    support = [(k,) for k in range(-10, 11)]
    f1 = random_unit_function(1, support, np.random.default_rng(42), weights=korobov)
    f2 = random_unit_function(1, support, np.random.default_rng(42), weights=korobov)
    assert f1.coefs == f2.coefs
    assert hilbert_norm(f1) == pytest.approx(1.0, abs=1e-12)


def test_random_unit_function_singleton_support(korobov):
    f = random_unit_function(1, [(3,)], np.random.default_rng(0), weights=korobov)
    assert abs(f.coefs[(3,)]) == pytest.approx(1.0, abs=1e-12)


def test_random_unit_function_rejects_empty_support(korobov):
    with pytest.raises(ValueError):
        random_unit_function(1, [], np.random.default_rng(0), weights=korobov)


# --- dimension embedding ----------------------------------------------------------

def test_embed_preserves_norm_and_coefficients():
    w = normalize_korobov(1.5, 0.4)
    f = SparseFunction(d=1, coefs={(0,): 0.6, (2,): -0.8}, weights=w)
    g = embed_next_dimension(f)
    assert g.d == 2
    assert hilbert_norm(g) == pytest.approx(hilbert_norm(f), abs=1e-8)
    for k in range(4):
        assert g.coefs[(0, k)] == pytest.approx(0.6 * weight_at(w, k), abs=1e-12)


def test_embed_explicit_weights_exact():
    w = FrequencyWeights.explicit([math.sqrt(0.5), math.sqrt(0.5)])
    f = SparseFunction(d=1, coefs={(1,): 1.0}, weights=w)
    g = embed_next_dimension(f)
    assert hilbert_norm(g) == pytest.approx(1.0, abs=1e-12)
    assert set(g.coefs) == {(1, 0), (1, 1)}


def test_embed_peak_at_zero_matches_truncated_mass():
    # at the new coordinate's origin the embedding reproduces f scaled by
    # the retained squared-weight mass, which the tail bracket certifies
    w = normalize_korobov(1.5, 0.4)
    f = SparseFunction(d=1, coefs={(1,): 1.0, (-2,): 0.5}, weights=w)
    mass_tol = 1e-10
    g = embed_next_dimension(f, mass_tol=mass_tol)
    for x in [0.0, 0.2, 0.61]:
        base = eval_function(f, [x])
        lifted = eval_function(g, [x, 0.0])
        assert lifted == pytest.approx(base, abs=abs(base) * 2e-10 + 1e-10)


def test_embed_requires_normalized_weights():
    w = FrequencyWeights.korobov(1.5, 0.4, 0.1)
    f = SparseFunction(d=1, coefs={(0,): 1.0}, weights=w)
    with pytest.raises(ValueError):
        embed_next_dimension(f)


def test_embed_budget_guard():
    w = normalize_korobov(0.75, 0.4)  # tail decays like k^{-1/2}: cutoff explodes
    f = SparseFunction(d=1, coefs={(0,): 1.0}, weights=w)
    with pytest.raises(BudgetError):
        embed_next_dimension(f, mass_tol=1e-10, max_coefs=100_000)
