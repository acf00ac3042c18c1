"""Covariogram, convolution bodies, and the numeric lemma checks.

The covariogram g(x) = vol((-x+K) cap (x-K)) induces the nested convolution
bodies K_t = {x : g(x) >= t}; they are used here only implicitly, through
the ray map t -> x_t obtained by bisecting g along the segment from the
covariogram maximizer to a boundary point.  For balls every ingredient has
a closed form via spherical caps (a lens is two caps glued at the rim),
which powers the sharp transcription checks on the disk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .bodies import Ball, Box, ConvexBody, Ellipsoid, contains_many
from .sampling import StreamKey, sample_uniform
from .specialfn import CapGeometry, cap_volume_exact, unit_ball_volume


@dataclass(frozen=True)
class CovariogramProfile:
    """Covariogram samples along a ray from the maximizer of g."""

    body_id: str
    direction: np.ndarray
    samples: tuple  # of (rho, g, stderr)
    max_value: float


# ---------------------------------------------------------------------------
# lens geometry (two congruent balls)


def lens_volume(d: int, r: float, rho: float) -> float:
    """Volume of the intersection of two radius-r balls with centers 2*rho apart."""
    if rho < 0:
        raise ValueError(f"rho must be nonnegative, got {rho}")
    if rho >= r:
        return 0.0
    return 2.0 * cap_volume_exact(CapGeometry(d, r, r - rho))


def lens_height_from_volume(d: int, r: float, t: float) -> float:
    """Invert the lens volume: cap height h with lens(rho = r - h) = t."""
    full = unit_ball_volume(d) * r**d
    if not 0.0 < t <= full:
        raise ValueError(f"lens volume must lie in (0, vol(B_r)] = (0, {full}], got {t}")
    if t == full:
        return r

    def f(h):
        return 2.0 * cap_volume_exact(CapGeometry(d, r, h)) - t

    return float(brentq(f, 0.0, r, xtol=1e-18, rtol=8.9e-16, maxiter=200))


def lens_rho_from_volume(d: int, r: float, t: float) -> float:
    return r - lens_height_from_volume(d, r, t)


def projection_measure_ball(d: int, r: float, rho: float) -> float:
    """(d-1)-volume of the lens projected along the center line.

    The lens between balls centered at +-rho*u projects onto the (d-1)-ball
    of the rim radius sqrt(r^2 - rho^2).
    """
    if not 0.0 <= rho < r:
        raise ValueError(f"rho must lie in [0, r) = [0, {r}), got {rho}")
    return unit_ball_volume(d - 1) * (r * r - rho * rho) ** (0.5 * (d - 1))


def _projection_from_height(d: int, r: float, h: float) -> float:
    # r^2 - rho^2 = h (2r - h), formed without cancellation for tiny h
    return unit_ball_volume(d - 1) * (h * (2.0 * r - h)) ** (0.5 * (d - 1))


# ---------------------------------------------------------------------------
# covariogram


def covariogram(
    body: ConvexBody,
    x,
    probes: int = 100_000,
    stream: StreamKey | None = None,
    method: str = "auto",
) -> tuple[float, float]:
    """g(x) = vol((-x+K) cap (x-K)) with a standard error.

    Balls are exact (lens volume, stderr 0).  Other kinds Monte Carlo over
    the bounding box of the intersection, testing z in -x+K and z in x-K.
    `method="mc"` forces the Monte Carlo route on any kind, which is how
    the exact lens serves as its oracle.
    """
    if method not in ("auto", "mc"):
        raise ValueError(f"method must be 'auto' or 'mc', got {method!r}")
    x = np.asarray(x, dtype=float)
    if not body.contains(x):
        raise ValueError("x must lie in the body")
    if method == "auto" and isinstance(body, Ball):
        rho = float(np.linalg.norm(x - body.center))
        return lens_volume(body.dim, body.radius, rho), 0.0
    if stream is None:
        stream = StreamKey(seed=314_159_265_358, path=())
    d = body.dim
    lo = np.empty(d)
    hi = np.empty(d)
    for j in range(d):
        e = np.zeros(d)
        e[j] = 1.0
        hi[j] = min(body.support(e) - x[j], x[j] - (-body.support(-e)))
        lo[j] = max(-body.support(-e) - x[j], x[j] - body.support(e))
    if np.any(hi <= lo):
        return 0.0, 0.0
    box_vol = float(np.prod(hi - lo))
    gen = stream.generator()
    hits = 0
    todo = probes
    while todo > 0:
        block = min(todo, 1 << 16)
        z = lo + (hi - lo) * gen.random((block, d))
        inside = contains_many(body, x + z) & contains_many(body, x - z)
        hits += int(inside.sum())
        todo -= block
    frac = hits / probes
    return box_vol * frac, box_vol * math.sqrt(max(frac * (1 - frac), 0.0) / probes)


def _covariogram_on_body_sample(body: ConvexBody, points: np.ndarray, w: np.ndarray) -> np.ndarray:
    """g at many candidate points from one shared uniform sample w of K,
    via g(x) = vol(K) * P(2x - w in K).  Common random numbers across the
    candidates make their comparison far more stable than independent runs."""
    vol = body.volume()
    out = np.empty(points.shape[0])
    for i, x in enumerate(points):
        out[i] = vol * float(np.mean(contains_many(body, 2.0 * x - w)))
    return out


def symmetry_point(
    body: ConvexBody, probes: int = 40_000, stream: StreamKey | None = None
) -> tuple[np.ndarray, float]:
    """Maximizer of the covariogram and its value T = max g.

    Centrally symmetric kinds (ball, ellipsoid, box) return the center with
    T = vol(K) exactly.  Simplices and H-polytopes search a nested grid,
    relying on the unimodality of g^{1/d}; the returned T carries the Monte
    Carlo precision of the final refinement level.
    """
    if isinstance(body, (Ball, Ellipsoid, Box)):
        return body.interior_point(), body.volume()
    if stream is None:
        stream = StreamKey(seed=161_803_398_874, path=())
    w = sample_uniform(body, stream.substream(0), probes)
    lo, hi = body.bounding_box()
    center = body.interior_point().astype(float)
    span = (hi - lo) / 2.0
    best = center
    for level in range(7):
        offsets = np.linspace(-1.0, 1.0, 5)
        if body.dim <= 3:
            grids = np.meshgrid(*[best[j] + span[j] * offsets for j in range(body.dim)])
            cand = np.stack([g.ravel() for g in grids], axis=1)
        else:
            cand = best[None, :] + np.vstack(
                [span * np.eye(body.dim)[j] * o for j in range(body.dim) for o in offsets]
            )
        keep = contains_many(body, cand)
        cand = cand[keep]
        if cand.shape[0] == 0:
            span *= 0.5
            continue
        vals = _covariogram_on_body_sample(body, cand, w)
        best = cand[int(vals.argmax())]
        span *= 0.5
    t_val = _covariogram_on_body_sample(body, best[None, :], w)[0]
    return best, float(t_val)


def x_t(
    body: ConvexBody,
    boundary_point,
    t: float,
    probes: int = 40_000,
    stream: StreamKey | None = None,
) -> np.ndarray:
    """The unique point on the segment [maximizer, boundary point] where the
    covariogram equals t (the boundary trace of the convolution body K_t).

    Exact lens inversion for balls; bisection on the Monte Carlo covariogram
    for other kinds (precision then limited by probe noise).
    """
    x = np.asarray(getattr(boundary_point, "x", boundary_point), dtype=float)
    if isinstance(body, Ball):
        big_t = body.volume()
        if not 0.0 < t < big_t:
            raise ValueError(f"t must lie in (0, T) = (0, {big_t}), got {t}")
        rho = lens_rho_from_volume(body.dim, body.radius, t)
        u = x - body.center
        return body.center + u * (rho / float(np.linalg.norm(u)))
    m, big_t = symmetry_point(body, probes, stream)
    if not 0.0 < t < big_t:
        raise ValueError(f"t must lie in (0, T) = (0, {big_t}), got {t}")
    if stream is None:
        stream = StreamKey(seed=141_421_356_237, path=())
    w = sample_uniform(body, stream.substream(1), probes)
    s_lo, s_hi = 0.0, 1.0  # g decreases from T at s=0 to 0 at s=1
    for _ in range(50):
        mid = 0.5 * (s_lo + s_hi)
        g_mid = _covariogram_on_body_sample(body, (m + mid * (x - m))[None, :], w)[0]
        if g_mid >= t:
            s_lo = mid
        else:
            s_hi = mid
    return m + 0.5 * (s_lo + s_hi) * (x - m)


def covariogram_profile(
    body: ConvexBody,
    direction,
    n_samples: int = 50,
    probes: int = 100_000,
    stream: StreamKey | None = None,
    body_id: str = "",
) -> CovariogramProfile:
    """Sample g along the ray from the covariogram maximizer toward `direction`."""
    u = np.asarray(direction, dtype=float)
    u = u / float(np.linalg.norm(u))
    m, big_t = symmetry_point(body)
    sp = body.ray_boundary(m, u)
    reach = float(np.linalg.norm(sp.x - m))
    rows = []
    for k in range(n_samples + 1):
        rho = reach * k / n_samples
        sub = stream.substream(k) if stream is not None else None
        g, se = covariogram(body, m + rho * u, probes, sub)
        rows.append((rho, g, se))
    return CovariogramProfile(body_id, u, tuple(rows), big_t)


# ---------------------------------------------------------------------------
# lemma checks


def lemma18_limit(d: int, r: float) -> float:
    """Analytic t->0 limit of the lemma18 ratio on the r-ball (kappa = r^{1-d})."""
    kappa = r ** (-(d - 1.0))
    return (
        kappa ** (1.0 / (d + 1.0))
        * (2.0 / (d + 1.0)) ** ((d - 1.0) / (d + 1.0))
        * unit_ball_volume(d - 1) ** (-2.0 / (d + 1.0))
    )


def lemma18_ratio_ball(d: int, r: float, t: float) -> float:
    """t^{(d-1)/(d+1)} over the projected lens measure at x_t on the r-ball."""
    big_t = unit_ball_volume(d) * r**d
    if not 0.0 < t < big_t:
        raise ValueError(f"t must lie in (0, T) = (0, {big_t}), got {t}")
    h = lens_height_from_volume(d, r, t)
    return t ** ((d - 1.0) / (d + 1.0)) / _projection_from_height(d, r, h)


def lemma2_check_disk(r: float, ts) -> list[tuple[float, float, float, float, float]]:
    """Finite-difference check of the surface-integral derivative on the disk.

    For each t: lhs is the central difference of vol(K_t) = pi * rho(t)^2 in
    t (step 1e-4 * t); rhs is -(perimeter of K_t) divided by the projected
    lens measure.  Both sides are analytic in rho, so rhs/lhs is exactly
    constant in t; the value of the constant is reported, not asserted.
    """
    big_t = math.pi * r * r
    rows = []
    for t in ts:
        t = float(t)
        step = 1e-4 * t
        if not (t - step > 0.0 and t + step < big_t):
            raise ValueError(f"t = {t} too close to an endpoint of (0, T) for differencing")

        def disk_area(tt):
            rho = lens_rho_from_volume(2, r, tt)
            return math.pi * rho * rho

        lhs = (disk_area(t + step) - disk_area(t - step)) / (2.0 * step)
        h = lens_height_from_volume(2, r, t)
        rho = r - h
        rhs = -(2.0 * math.pi * rho) / _projection_from_height(2, r, h)
        rows.append((t, rho, lhs, rhs, rhs / lhs))
    return rows


def lemma7_bound(d: int, n: int, t: float, vol: float) -> float:
    """Closed-form upper bound on the probability that x_t escapes the hull:
    2 * sum_{i<d} C(n,i) s^i (1-s)^{n-i} with s = t/(2 vol), in log space."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not vol > 0:
        raise ValueError(f"vol must be positive, got {vol}")
    s = t / (2.0 * vol)
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"t/(2 vol) must lie in [0, 1], got {s}")
    total = 0.0
    for i in range(min(d, n + 1)):
        if s == 0.0:
            term = 1.0 if i == 0 else 0.0
        elif s == 1.0:
            term = 1.0 if i == n else 0.0
        else:
            log_c = math.lgamma(n + 1) - math.lgamma(i + 1) - math.lgamma(n - i + 1)
            term = math.exp(log_c + i * math.log(s) + (n - i) * math.log1p(-s))
        total += term
    return 2.0 * total
