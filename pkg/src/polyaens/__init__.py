"""Polya ensembles on five matrix symmetry classes.

Numerical machinery for determinantal joint spectral densities built from
one-point weights: spectral density maps, univariate and multivariate
Fourier / Hankel / Mellin transforms, additive / multiplicative / Hankel
convolutions, Polya-frequency-function positivity checks, and Monte Carlo
verification of the Harish-Chandra-Itzykson-Zuber, Berezin-Karpelevich
and Gelfand-Naimark group integrals.
"""

from .spaces import (
    MatrixSpace,
    SpaceKind,
    embed_iota,
    space_constant,
    spectral_map,
    vandermonde,
    vandermonde_neg_inverse,
)
from .weights import (
    AdmissibilityReport,
    Weight,
    admissibility_check,
    apply_derivative_op,
    make_family,
)
from .transforms import (
    QuadratureSpec,
    TransformKind,
    andreief_check,
    inverse_hankel,
    laplace_transform,
    mv_transform_polya,
    mv_transform_polynomial,
    univariate_transform,
)
from .ensembles import (
    Ensemble,
    convolve_mixed,
    convolve_polya,
    joint_density,
    marginal_density,
    normalize,
    normalize_polynomial,
    univariate_convolution,
)
from .pff import (
    PffVerdict,
    beyond_theorem_example,
    bridge_G,
    lift_to_M,
    make_laplace_pff,
    pff_check_grid,
    pff_order_check,
)
from .haarmc import (
    GroupKind,
    McReport,
    empirical_convolution_check,
    group_integral_closed,
    group_integral_mc,
    haar_sample,
    polya_group_identity,
    sample_matrix_ensemble,
)

__version__ = "0.1.0"
