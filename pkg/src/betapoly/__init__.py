"""Expected volumes of high-dimensional beta polytopes.

The convex hull of n i.i.d. points drawn from the beta law on B^d (density
proportional to (1 - |x|^2)^beta, or uniform on the sphere for beta = -1)
has a normalized expected volume that jumps from 0 to 1 around
n = (d / 2x)^(d/2 + beta), where it is close to exp(-x).

Modules
-------
logreal      log-domain arithmetic, Gamma ratios, binomials of huge n
betacdf      marginal distribution function F_{z-1} and its tail envelope
exactvol     exact volume ratio by log-domain quadrature
asympt       threshold curve, limiting predictor, concentration window
intrinsics   intrinsic-volume ratios by dimension reduction
mcgeom       Monte Carlo sampling, hull membership, Wendel and Efron checks
cli          command-line front end (``python -m betapoly``)
"""

from .asympt import predicted_ratio, threshold_log_n, window, x_of
from .betacdf import F, FParams, envelope_F_tail, log_one_minus_F
from .exactvol import (
    BetaModel,
    QuadratureReport,
    closed_form_simplex_ratio,
    constants,
    expected_volume_ratio,
    find_mode,
    log_integrand,
)
from .intrinsics import expected_intrinsic_ratio, log_Vk_ball
from .logreal import LogReal, SampleSize, log_add, log_binomial, log_c, log_gamma, log_kappa
from .mcgeom import (
    Estimate,
    PointCloud,
    contains,
    mc_origin_containment,
    mc_vertex_count,
    mc_volume_ratio,
    sample_beta,
    wendel_probability,
)

__version__ = "0.1.0"
