"""Closed-form constants and special functions for the scaled-deficit limit.

Everything here is deterministic float math: the gamma function, unit-ball
volumes, the normalizing constant of the limit theorem, the exact ball
limit, affine surface area for the supported body kinds, and exact
spherical-cap volumes with their two-sided power bounds.  The module also
exposes the internal consistency check tying the limit constant, the ball
limit, and the affine surface area of the ball together (an algebraic
identity, so the residual measures only floating-point error).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import betainc


@dataclass(frozen=True)
class CapGeometry:
    """Parameters of a spherical cap: dimension, sphere radius, cap height."""

    d: int
    r: float
    height: float

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ValueError(f"cap dimension must be >= 2, got {self.d}")
        if not self.r > 0:
            raise ValueError(f"sphere radius must be positive, got {self.r}")
        if not 0.0 <= self.height <= 2.0 * self.r:
            raise ValueError(
                f"cap height must lie in [0, 2r] = [0, {2 * self.r}], got {self.height}"
            )


def gamma_fn(x: float) -> float:
    """Gamma function for positive real arguments, relative error <= 1e-13."""
    if x <= 0:
        raise ValueError(f"gamma_fn requires x > 0, got {x}")
    return math.gamma(x)


def log_gamma(x: float) -> float:
    if x <= 0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def unit_ball_volume(d: int) -> float:
    """Volume of the d-dimensional Euclidean unit ball, pi^(d/2)/Gamma(d/2+1)."""
    if d < 0:
        raise ValueError(f"dimension must be nonnegative, got {d}")
    if d == 0:
        return 1.0
    return math.exp(0.5 * d * math.log(math.pi) - log_gamma(0.5 * d + 1.0))


def unit_sphere_area(d: int) -> float:
    """Surface area of the unit sphere bounding the d-ball: d * vol(B^d)."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    return d * unit_ball_volume(d)


def _log_unit_ball_volume(d: int) -> float:
    return 0.5 * d * math.log(math.pi) - log_gamma(0.5 * d + 1.0)


def c_d(d: int) -> float:
    """Normalizing constant of the scaled-deficit limit.

    c(d) = 2 * (vol(B^{d-1})/(d+1))^{2/(d+1)}
             * (d+3)(d+1)! / [(d^2+d+2)(d^2+1) * Gamma((d^2+1)/(d+1))]

    The factorial/gamma ratio is evaluated in log space so the formula stays
    accurate far beyond the double-precision overflow point of (d+1)!.
    """
    if d < 2:
        raise ValueError(f"c_d requires d >= 2, got {d}")
    df = float(d)
    log_front = math.log(2.0) + (2.0 / (df + 1.0)) * (
        _log_unit_ball_volume(d - 1) - math.log(df + 1.0)
    )
    log_ratio = (
        math.log(df + 3.0)
        + log_gamma(df + 2.0)
        - math.log(df * df + df + 2.0)
        - math.log(df * df + 1.0)
        - log_gamma((df * df + 1.0) / (df + 1.0))
    )
    return math.exp(log_front + log_ratio)


def wieacker_limit(d: int, r: float) -> float:
    """Limit of n^{2/(d+1)} * (vol(B_r) - expected hull volume) for the r-ball.

    Unit-radius value:

        [(d^2+d+2)(d^2+1) / (2(d+3)(d+1)!)]
          * ((d+1) vol(B^d)/vol(B^{d-1}))^{2/(d+1)}
          * Gamma((d^2+1)/(d+1)) * d * vol(B^d)

    The radius enters as r^d: the uncovered volume of the r-ball equals r^d
    times that of the unit ball for every n (scale the sample points by r),
    so the limit inherits the exact same factor.
    """
    if d < 2:
        raise ValueError(f"wieacker_limit requires d >= 2, got {d}")
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r}")
    df = float(d)
    log_vd = _log_unit_ball_volume(d)
    log_front = (
        math.log(df * df + df + 2.0)
        + math.log(df * df + 1.0)
        - math.log(2.0)
        - math.log(df + 3.0)
        - log_gamma(df + 2.0)
    )
    log_mid = (2.0 / (df + 1.0)) * (
        math.log(df + 1.0) + log_vd - _log_unit_ball_volume(d - 1)
    )
    log_tail = log_gamma((df * df + 1.0) / (df + 1.0)) + math.log(df) + log_vd
    return math.exp(log_front + log_mid + log_tail) * r**d


def ball_affine_surface_area(d: int, r: float) -> float:
    """Affine surface area of the radius-r ball: d*vol(B^d)*r^{d(d-1)/(d+1)}."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r}")
    return unit_sphere_area(d) * r ** (d * (d - 1.0) / (d + 1.0))


def affine_surface_area(body) -> float:
    """Affine surface area of a supported convex body.

    Balls use the closed form above.  An ellipsoid is the image T(B^d) of
    the unit ball, and the boundary integral transforms with
    |det T|^{(d-1)/(d+1)}, which is how the value is computed here (the
    equiaffine scaling rule; no boundary quadrature involved).  Polytopal
    kinds are flat almost everywhere on the boundary, so the curvature
    integrand vanishes and the value is exactly 0.
    """
    from .bodies import Ball, Box, Ellipsoid, HPolytope, Simplex

    if isinstance(body, Ball):
        return ball_affine_surface_area(body.dim, body.radius)
    if isinstance(body, Ellipsoid):
        det_t = 1.0 / math.sqrt(body.shape_det)
        return det_t ** ((body.dim - 1.0) / (body.dim + 1.0)) * ball_affine_surface_area(
            body.dim, 1.0
        )
    if isinstance(body, (Box, Simplex, HPolytope)):
        return 0.0
    raise ValueError(f"unsupported body kind: {type(body).__name__}")


def cap_volume_exact(cap: CapGeometry) -> float:
    """Exact volume of a spherical cap of height `cap.height` on the r-sphere.

    Evaluates vol(B^{d-1}) * integral_{r-h}^{r} (r^2-s^2)^{(d-1)/2} ds through
    the regularized incomplete beta function,

        cap = (1/2) vol(B^d) r^d * I_x((d+1)/2, 1/2),   x = 1 - (1-h/r)^2,

    for h <= r, and by complementing the full ball for h > r.  The beta
    route keeps full relative accuracy down to h/r ~ 1e-15, where direct
    quadrature would underflow its absolute tolerance floor.
    """
    d, r, h = cap.d, cap.r, cap.height
    if h == 0.0:
        return 0.0
    full = unit_ball_volume(d) * r**d
    if h >= 2.0 * r:
        return full
    if h > r:
        return full - cap_volume_exact(CapGeometry(d, r, 2.0 * r - h))
    a = 1.0 - h / r
    x = (h / r) * (1.0 + a)  # 1 - a^2, computed without cancellation
    return 0.5 * full * float(betainc(0.5 * (d + 1.0), 0.5, x))


def cap_volume_bounds(cap: CapGeometry) -> tuple[float, float]:
    """Two-sided power bounds for the cap volume, valid for 0 < height <= r.

    lower = 2 (2 - h/r)^{(d-1)/2} vol(B^{d-1})/(d+1) * h^{(d+1)/2} r^{(d-1)/2}
    upper = 2^{(d+1)/2}           vol(B^{d-1})/(d+1) * h^{(d+1)/2} r^{(d-1)/2}

    Above height r the lower bound degrades, so callers get an error instead
    of a silently wrong sandwich.
    """
    d, r, h = cap.d, cap.r, cap.height
    if not 0.0 < h <= r:
        raise ValueError(f"bounds require 0 < height <= r, got height={h}, r={r}")
    common = (
        unit_ball_volume(d - 1) / (d + 1.0) * h ** (0.5 * (d + 1.0)) * r ** (0.5 * (d - 1.0))
    )
    lower = 2.0 * (2.0 - h / r) ** (0.5 * (d - 1.0)) * common
    upper = 2.0 ** (0.5 * (d + 1.0)) * common
    return lower, upper


def theorem1_consistency(d: int, r: float) -> float:
    """Relative residual of c(d)*W(d,r)/vol(B_r)^{2/(d+1)} against as(B_r).

    The combination is an exact algebraic identity (the limit constant was
    calibrated against the ball limit), so the return value measures only
    accumulated floating-point error.
    """
    if d < 2:
        raise ValueError(f"requires d >= 2, got {d}")
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r}")
    vol = unit_ball_volume(d) * r**d
    lhs = c_d(d) * wieacker_limit(d, r) / vol ** (2.0 / (d + 1.0))
    asa = ball_affine_surface_area(d, r)
    return abs(lhs - asa) / asa
