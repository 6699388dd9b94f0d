"""hardedge: hard-edge orthogonal ensembles, Bessel-kernel gap
probabilities, and central-point zero statistics for elliptic-curve
L-function data."""

__version__ = "0.1.0"

from .ensembles import (
    OrthogonalSample, LevelVector, McmcConfig, EnsembleSpec, AngleSummary,
    haar_sample_so, eigenangles, normalize_eigenangles,
    sample_independent_model, sample_interaction_levels, interaction_chain,
    simulate_first_angle_stats,
)
from .kernels import (
    KernelSpec, DensityValue, jacobi_weight, bessel_j_half, bessel_kernel,
    hard_kernel, explicit_kernel, one_level_density,
    one_level_density_fourier, cd_jacobi_kernel,
)
from .fredholm import (
    DiscretizedOperator, GapResult, discretize_operator, fredholm_det,
    gap_probability, spacing_density, first_level_mean, finite_n_gap,
    finite_n_first_level_mean,
)
from .stats import (
    SampleSummary, TestResult, descriptive, pooled_t, unpooled_t,
    pooled_t_summary, unpooled_t_summary, sign_test, normal_tail, t_tail,
    spacing_differences,
)
from .ecdata import (
    CurveRecord, ZeroDataset, TestFunctionPair, fejer_pair, parse_dataset,
    write_dataset, normalize_zeros, filter_partition, amalgamate,
    duplicate_report, primes_up_to, ap_point_count,
    explicit_formula_prime_side, zero_side_sum,
)
