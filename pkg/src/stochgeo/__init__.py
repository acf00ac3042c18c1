"""Stochastic-geometry laboratory for random polytope volume deficits.

The package estimates the expected uncovered volume of the convex hull of n
uniform points in a convex body, verifies that the scaled deficit converges
to affine surface area over c(d), and carries the exact special-function
scaffolding used along the way: spherical cap volumes with two-sided
bounds, covariograms and convolution-body ray maps, coverage probability
bounds, and the exact ball limit.
"""

from .bodies import (
    Ball,
    Box,
    ConvexBody,
    Ellipsoid,
    HPolytope,
    Simplex,
    SurfacePoint,
    contains_many,
    load_hpolytope,
    make_standard_simplex,
    make_unit_box,
    parse_hpolytope_text,
)
from .convolution import (
    CovariogramProfile,
    covariogram,
    covariogram_profile,
    lemma2_check_disk,
    lemma7_bound,
    lemma18_limit,
    lemma18_ratio_ball,
    lens_rho_from_volume,
    lens_volume,
    projection_measure_ball,
    symmetry_point,
    x_t,
)
from .estimator import DeficitEstimate, convergence_table, estimate_deficit, pairwise_sum, predicted_limit
from .hull import (
    HullSample,
    Membership,
    deficit_volume,
    deficit_volume_mc,
    hull_volume_low_dim,
    in_hull,
    in_hull_batch,
)
from .sampling import StreamKey, sample_uniform, substream
from .specialfn import (
    CapGeometry,
    affine_surface_area,
    c_d,
    cap_volume_bounds,
    cap_volume_exact,
    gamma_fn,
    theorem1_consistency,
    unit_ball_volume,
    wieacker_limit,
)

__all__ = [
    "Ball",
    "Box",
    "CapGeometry",
    "ConvexBody",
    "CovariogramProfile",
    "DeficitEstimate",
    "Ellipsoid",
    "HPolytope",
    "HullSample",
    "Membership",
    "Simplex",
    "StreamKey",
    "SurfacePoint",
    "affine_surface_area",
    "c_d",
    "cap_volume_bounds",
    "cap_volume_exact",
    "contains_many",
    "convergence_table",
    "covariogram",
    "covariogram_profile",
    "deficit_volume",
    "deficit_volume_mc",
    "estimate_deficit",
    "gamma_fn",
    "hull_volume_low_dim",
    "in_hull",
    "in_hull_batch",
    "lemma18_limit",
    "lemma18_ratio_ball",
    "lemma2_check_disk",
    "lemma7_bound",
    "lens_rho_from_volume",
    "lens_volume",
    "load_hpolytope",
    "make_standard_simplex",
    "make_unit_box",
    "pairwise_sum",
    "parse_hpolytope_text",
    "predicted_limit",
    "projection_measure_ball",
    "sample_uniform",
    "substream",
    "symmetry_point",
    "theorem1_consistency",
    "unit_ball_volume",
    "wieacker_limit",
    "x_t",
]
