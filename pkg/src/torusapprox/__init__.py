"""Randomized and deterministic uniform approximation of functions from
unweighted tensor-product Hilbert spaces on the d-torus.

The deterministic story: the best rank-n linear method projects onto the
largest tensor singular directions, and for normalized unweighted spaces its
information demand grows exponentially in the dimension.  The randomized
story: averaging n Gaussian trials reconstructs the function with expected
sup-norm error 2 E||Psi||_inf / sqrt(n), where Psi is the Gaussian field
whose covariance is the reproducing kernel, and the entropy bound on
E||Psi||_inf makes the information demand grow only like d (1 + log d) per
eps^{-2}.  This package implements both methods, their bounds, and the
experiments contrasting them.
"""

from .field import (
    DUDLEY_CONSTANT,
    FieldSample,
    SupNormEstimate,
    TruncationSet,
    default_truncation,
    dudley_bound,
    estimate_sup_norm,
    evaluate_sample,
    sample_field,
    smoothness_loss_statistic,
    suggested_grid_resolution,
)
from .kernels import (
    DecayProfile,
    KernelSpec,
    canonical_metric,
    decay_profile_korobov,
    fit_decay_constant,
    initial_error,
    kernel_1d,
    kernel_at_distance,
    kernel_nd,
    torus_metric,
    torus_metric_p,
)
from .mc import (
    ErrorReport,
    MCConfig,
    empirical_error,
    mc_approximate,
    mc_complexity_bound,
    mc_error_bound,
)
from .projection import (
    IndexSelection,
    SingularSpectrum1D,
    curse_bound,
    det_lower_bound,
    det_worst_case_error,
    enumerate_best_indices,
    korobov_beta,
    paired_prefix_count,
    project,
    top_n_indices,
)
from .sketch import (
    SketchConfig,
    gauss_norm_expectation,
    gaussian_sketch,
    sequence_det_lower_bound,
    sketch_error_bound,
)
from .space import (
    FrequencyWeights,
    SparseFunction,
    embed_next_dimension,
    eval_basis_1d,
    eval_function,
    hilbert_norm,
    normalize_korobov,
    random_unit_function,
    weight_at,
)
from .special import cosine_zeta, hurwitz_zeta, zeta, zeta_tail_bracket
from .util import BudgetError, MultiIndex, NonFiniteError, derive_rng

__version__ = "0.1.0"
