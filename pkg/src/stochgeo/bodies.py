"""Convex-body abstraction and the concrete analytic bodies.

Five kinds are supported: Euclidean balls, ellipsoids given by a symmetric
positive-definite shape matrix, axis-aligned boxes, simplices, and bounded
H-polytopes with a declared interior witness.  Every body answers
membership, support values, exact volume (Monte Carlo fallback for
H-polytopes above dimension 3), and boundary-ray queries that also report
the outward unit normal and the rolling radius (the radius of the largest
inscribed ball tangent at that boundary point) where those are defined.

All bodies are immutable after construction; every operation is pure.
Tolerances are relative to the body's circumradius.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .specialfn import unit_ball_volume

REL_TOL = 1e-12


def as_vector(x, dim: int | None = None) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-d coordinate vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("coordinates must be finite")
    if dim is not None and v.size != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {v.size}")
    return v


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SurfacePoint:
    """A boundary point with its outward unit normal and rolling radius.

    `normal` is None where the body has no unique normal (polytope edges and
    vertices); in that case the rolling radius is reported as 0.
    """

    x: np.ndarray
    normal: np.ndarray | None
    rolling_radius: float


class ConvexBody:
    """Common interface of all body kinds."""

    dim: int

    def contains(self, z, *, tol: float = REL_TOL) -> bool:
        raise NotImplementedError

    def strictly_contains(self, z, *, margin: float = 1e-10) -> bool:
        raise NotImplementedError

    def support(self, u) -> float:
        raise NotImplementedError

    def volume(self) -> float:
        raise NotImplementedError

    def circumradius(self) -> float:
        raise NotImplementedError

    def interior_point(self) -> np.ndarray:
        raise NotImplementedError

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        d = self.dim
        lo = np.empty(d)
        hi = np.empty(d)
        for j in range(d):
            e = np.zeros(d)
            e[j] = 1.0
            hi[j] = self.support(e)
            lo[j] = -self.support(-e)
        return lo, hi

    def ray_boundary(self, origin, direction, rolling: bool = True) -> SurfacePoint:
        """Boundary point along a ray from a strictly interior origin.

        `rolling=False` skips the rolling-radius computation (reported as 0),
        which matters for bulk boundary sweeps on ellipsoids where the exact
        tangent-ball radius costs a nested root solve.
        """
        raise NotImplementedError

    def _check_ray_args(self, origin, direction) -> tuple[np.ndarray, np.ndarray]:
        o = as_vector(origin, self.dim)
        u = as_vector(direction, self.dim)
        nu = float(np.linalg.norm(u))
        if abs(nu - 1.0) > 1e-9:
            raise ValueError(f"direction must be a unit vector, |u| = {nu}")
        if not self.strictly_contains(o):
            raise ValueError("ray origin must be strictly interior")
        return o, u / nu


@dataclass(frozen=True)
class Ball(ConvexBody):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = as_vector(self.center)
        if c.size < 2:
            raise ValueError(f"dimension must be >= 2, got {c.size}")
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", _freeze(c))

    @property
    def dim(self) -> int:
        return self.center.size

    def contains(self, z, *, tol: float = REL_TOL) -> bool:
        z = as_vector(z, self.dim)
        return float(np.linalg.norm(z - self.center)) <= self.radius * (1.0 + tol)

    def strictly_contains(self, z, *, margin: float = 1e-10) -> bool:
        z = as_vector(z, self.dim)
        return float(np.linalg.norm(z - self.center)) < self.radius * (1.0 - margin)

    def support(self, u) -> float:
        u = as_vector(u, self.dim)
        nu = float(np.linalg.norm(u))
        if nu == 0.0:
            raise ValueError("support direction must be nonzero")
        return float(u @ self.center) + self.radius * nu

    def volume(self) -> float:
        return unit_ball_volume(self.dim) * self.radius**self.dim

    def circumradius(self) -> float:
        return self.radius

    def interior_point(self) -> np.ndarray:
        return self.center.copy()

    def ray_boundary(self, origin, direction, rolling: bool = True) -> SurfacePoint:
        o, u = self._check_ray_args(origin, direction)
        w = o - self.center
        b = float(w @ u)
        c0 = float(w @ w) - self.radius**2
        s = -b + math.sqrt(b * b - c0)
        x = o + s * u
        normal = (x - self.center) / self.radius
        return SurfacePoint(_freeze(x), _freeze(normal), self.radius)


@dataclass(frozen=True)
class Ellipsoid(ConvexBody):
    """Body {x : (x - center)^T shape (x - center) <= 1} for SPD `shape`."""

    center: np.ndarray
    shape: np.ndarray
    # eigendecomposition of the shape matrix, filled in at construction
    _eigvals: np.ndarray = field(repr=False, default=None)
    _eigvecs: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        c = as_vector(self.center)
        if c.size < 2:
            raise ValueError(f"dimension must be >= 2, got {c.size}")
        a = np.asarray(self.shape, dtype=float)
        if a.shape != (c.size, c.size):
            raise ValueError(f"shape matrix must be {c.size}x{c.size}, got {a.shape}")
        if not np.allclose(a, a.T, rtol=0, atol=1e-12 * np.abs(a).max()):
            raise ValueError("shape matrix must be symmetric")
        w, q = np.linalg.eigh(0.5 * (a + a.T))
        if w.min() <= 0:
            raise ValueError(f"shape matrix must be positive definite, eigenvalues {w}")
        object.__setattr__(self, "center", _freeze(c))
        object.__setattr__(self, "shape", _freeze(0.5 * (a + a.T)))
        object.__setattr__(self, "_eigvals", _freeze(w))
        object.__setattr__(self, "_eigvecs", _freeze(q))

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def shape_det(self) -> float:
        return float(np.prod(self._eigvals))

    @property
    def semi_axes(self) -> np.ndarray:
        """Semi-axis lengths 1/sqrt(eigenvalue), descending."""
        return np.sort(1.0 / np.sqrt(self._eigvals))[::-1]

    def unit_ball_map(self) -> np.ndarray:
        """Symmetric L with E = center + L(B^d), i.e. L = shape^(-1/2)."""
        q, w = self._eigvecs, self._eigvals
        return (q * (1.0 / np.sqrt(w))) @ q.T

    def _quad(self, z: np.ndarray) -> float:
        w = z - self.center
        return float(w @ self.shape @ w)

    def contains(self, z, *, tol: float = REL_TOL) -> bool:
        z = as_vector(z, self.dim)
        return math.sqrt(max(self._quad(z), 0.0)) <= 1.0 + tol

    def strictly_contains(self, z, *, margin: float = 1e-10) -> bool:
        z = as_vector(z, self.dim)
        return math.sqrt(max(self._quad(z), 0.0)) < 1.0 - margin

    def support(self, u) -> float:
        u = as_vector(u, self.dim)
        if not np.any(u):
            raise ValueError("support direction must be nonzero")
        q, w = self._eigvecs, self._eigvals
        y = q.T @ u
        return float(u @ self.center) + math.sqrt(float((y * y / w).sum()))

    def volume(self) -> float:
        return unit_ball_volume(self.dim) / math.sqrt(self.shape_det)

    def circumradius(self) -> float:
        return float(self.semi_axes[0])

    def interior_point(self) -> np.ndarray:
        return self.center.copy()

    def ray_boundary(self, origin, direction, rolling: bool = True) -> SurfacePoint:
        o, u = self._check_ray_args(origin, direction)
        w = o - self.center
        a = float(u @ self.shape @ u)
        b = float(w @ self.shape @ u)
        c0 = float(w @ self.shape @ w) - 1.0
        s = (-b + math.sqrt(b * b - a * c0)) / a
        x = o + s * u
        grad = self.shape @ (x - self.center)
        normal = grad / float(np.linalg.norm(grad))
        r = self._rolling_radius(x, normal) if rolling else 0.0
        return SurfacePoint(_freeze(x), _freeze(normal), r)

    def _boundary_distance(self, z: np.ndarray) -> float:
        """Distance from an interior point to the ellipsoid boundary.

        Solved in the eigenbasis: the nearest boundary point satisfies
        w_i (1 + nu * lam_i) = zeta_i with sum lam_i w_i^2 = 1 and nu < 0 for
        interior zeta.  Axes where zeta_i = 0 admit the extra stationary
        branch nu = -1/lam_i with w_i picking up the slack; those candidates
        are enumerated explicitly.
        """
        lam = self._eigvals
        zeta = self._eigvecs.T @ (z - self.center)
        if float((lam * zeta * zeta).sum()) >= 1.0:
            return 0.0  # on or beyond the boundary
        best = math.inf

        def secular(nu, active):
            w = zeta[active] / (1.0 + nu * lam[active])
            return float((lam[active] * w * w).sum())

        active = np.abs(zeta) > 1e-14 * self.circumradius()
        if not active.any():
            # center: nearest boundary point lies along the stiffest axis
            return 1.0 / math.sqrt(float(lam.max()))
        # branch with w_i = 0 on every inactive axis
        lam_max = float(lam[active].max())
        lo, hi = -1.0 / lam_max, 0.0
        if secular(hi, active) < 1.0:
            from scipy.optimize import brentq

            # bracket: secular -> inf as nu -> -1/lam_max
            f_lo = lo + (hi - lo) * 1e-12
            while secular(f_lo, active) < 1.0:
                f_lo = lo + (f_lo - lo) * 0.1
            nu = float(brentq(lambda v: secular(v, active) - 1.0, f_lo, hi,
                              xtol=1e-15, rtol=8.9e-16, maxiter=120))
            w = zeta.copy()
            w[active] = zeta[active] / (1.0 + nu * lam[active])
            w[~active] = 0.0
            best = float(np.linalg.norm(w - zeta))
        # branches nu = -1/lam_j for inactive axes j
        for j in np.nonzero(~active)[0]:
            nuj = -1.0 / float(lam[j])
            denom = 1.0 + nuj * lam
            ok = active & (np.abs(denom) > 1e-14)
            if not np.all(active <= ok):  # some active axis is singular here
                continue
            w = np.zeros_like(zeta)
            w[ok] = zeta[ok] / denom[ok]
            slack = 1.0 - float((lam[ok] * w[ok] * w[ok]).sum())
            if slack < 0.0:
                continue
            w[j] = math.sqrt(slack / float(lam[j]))
            best = min(best, float(np.linalg.norm(w - zeta)))
        return best

    def _rolling_radius(self, x: np.ndarray, normal: np.ndarray) -> float:
        """Largest r with the ball of radius r tangent at x from inside contained.

        The ball B(x - r n, r) is contained iff the distance from its center
        to the boundary is at least r; the distance function is 1-Lipschitz
        along the inward normal, so the feasible set is an interval [0, r*]
        found by bisection.
        """
        scale = self.circumradius()
        r_hi = scale**2 / float(self.semi_axes[-1])  # max curvature radius bound
        eps = 1e-11 * scale

        def fits(r):
            return self._boundary_distance(x - r * normal) >= r - eps

        if not fits(r_hi):
            lo_r, hi_r = 0.0, r_hi
            for _ in range(60):
                mid = 0.5 * (lo_r + hi_r)
                if fits(mid):
                    lo_r = mid
                else:
                    hi_r = mid
            return lo_r
        return r_hi


@dataclass(frozen=True)
class Box(ConvexBody):
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = as_vector(self.lo)
        hi = as_vector(self.hi, lo.size)
        if lo.size < 2:
            raise ValueError(f"dimension must be >= 2, got {lo.size}")
        if not np.all(lo < hi):
            raise ValueError("box requires lo < hi componentwise")
        object.__setattr__(self, "lo", _freeze(lo))
        object.__setattr__(self, "hi", _freeze(hi))

    @property
    def dim(self) -> int:
        return self.lo.size

    def contains(self, z, *, tol: float = REL_TOL) -> bool:
        z = as_vector(z, self.dim)
        slack = tol * self.circumradius()
        return bool(np.all(z >= self.lo - slack) and np.all(z <= self.hi + slack))

    def strictly_contains(self, z, *, margin: float = 1e-10) -> bool:
        z = as_vector(z, self.dim)
        slack = margin * self.circumradius()
        return bool(np.all(z > self.lo + slack) and np.all(z < self.hi - slack))

    def support(self, u) -> float:
        u = as_vector(u, self.dim)
        if not np.any(u):
            raise ValueError("support direction must be nonzero")
        return float(np.where(u >= 0, u * self.hi, u * self.lo).sum())

    def volume(self) -> float:
        return float(np.prod(self.hi - self.lo))

    def circumradius(self) -> float:
        return 0.5 * float(np.linalg.norm(self.hi - self.lo))

    def interior_point(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    def halfspaces(self) -> tuple[np.ndarray, np.ndarray]:
        d = self.dim
        a = np.vstack([np.eye(d), -np.eye(d)])
        b = np.concatenate([self.hi, -self.lo])
        return a, b

    def ray_boundary(self, origin, direction, rolling: bool = True) -> SurfacePoint:
        o, u = self._check_ray_args(origin, direction)
        with np.errstate(divide="ignore"):
            t_hi = np.where(u > 0, (self.hi - o) / u, np.inf)
            t_lo = np.where(u < 0, (self.lo - o) / u, np.inf)
        t = np.minimum(t_hi, t_lo)
        s = float(t.min())
        x = o + s * u
        order = np.sort(t)
        if order[1] - order[0] <= 1e-9 * max(s, self.circumradius()):
            return SurfacePoint(_freeze(x), None, 0.0)  # edge or corner hit
        j = int(t.argmin())
        normal = np.zeros(self.dim)
        normal[j] = 1.0 if u[j] > 0 else -1.0
        a, b = self.halfspaces()
        return SurfacePoint(_freeze(x), _freeze(normal), _facet_rolling_radius(a, b, x, normal))


@dataclass(frozen=True)
class Simplex(ConvexBody):
    vertices: np.ndarray
    _edge_inv: np.ndarray = field(repr=False, default=None)
    _facet_normals: np.ndarray = field(repr=False, default=None)
    _facet_offsets: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1] + 1:
            raise ValueError(f"simplex needs d+1 vertices of dimension d, got {v.shape}")
        d = v.shape[1]
        if d < 2:
            raise ValueError(f"dimension must be >= 2, got {d}")
        edges = (v[1:] - v[0]).T
        scale = max(float(np.abs(edges).max()), 1e-300)
        det = float(np.linalg.det(edges))
        if abs(det) <= 1e-12 * scale**d:
            raise ValueError("simplex vertices are affinely dependent")
        # facet i is opposite vertex i: unit outward normal and offset
        normals = np.empty((d + 1, d))
        offsets = np.empty(d + 1)
        for i in range(d + 1):
            rest = np.delete(v, i, axis=0)
            base = rest[0]
            span = rest[1:] - base
            # normal orthogonal to the span, pointing away from vertex i
            _, _, vt = np.linalg.svd(span)
            n = vt[-1]
            if float(n @ (v[i] - base)) > 0:
                n = -n
            normals[i] = n
            offsets[i] = float(n @ base)
        object.__setattr__(self, "vertices", _freeze(v))
        object.__setattr__(self, "_edge_inv", _freeze(np.linalg.inv(edges)))
        object.__setattr__(self, "_facet_normals", _freeze(normals))
        object.__setattr__(self, "_facet_offsets", _freeze(offsets))

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def barycentric(self, z) -> np.ndarray:
        z = as_vector(z, self.dim)
        mu = self._edge_inv @ (z - self.vertices[0])
        return np.concatenate([[1.0 - mu.sum()], mu])

    def contains(self, z, *, tol: float = REL_TOL) -> bool:
        return bool(np.all(self.barycentric(z) >= -tol))

    def strictly_contains(self, z, *, margin: float = 1e-10) -> bool:
        return bool(np.all(self.barycentric(z) > margin))

    def support(self, u) -> float:
        u = as_vector(u, self.dim)
        if not np.any(u):
            raise ValueError("support direction must be nonzero")
        return float((self.vertices @ u).max())

    def volume(self) -> float:
        edges = self.vertices[1:] - self.vertices[0]
        return abs(float(np.linalg.det(edges))) / math.factorial(self.dim)

    def circumradius(self) -> float:
        c = self.vertices.mean(axis=0)
        return float(np.linalg.norm(self.vertices - c, axis=1).max())

    def interior_point(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def halfspaces(self) -> tuple[np.ndarray, np.ndarray]:
        return self._facet_normals, self._facet_offsets

    def ray_boundary(self, origin, direction, rolling: bool = True) -> SurfacePoint:
        o, u = self._check_ray_args(origin, direction)
        s_hi = self.support(u) - float(u @ o)
        s_lo = 0.0
        base = self._edge_inv @ (o - self.vertices[0])
        step = self._edge_inv @ u
        for _ in range(48):  # bisection to ~1e-13 relative
            mid = 0.5 * (s_lo + s_hi)
            mu = base + mid * step
            if mu.min() >= 0.0 and mu.sum() <= 1.0:
                s_lo = mid
            else:
                s_hi = mid
        x = o + s_lo * u  # the certified-inside endpoint
        a, b = self.halfspaces()
        return _polytope_surface_point(a, b, x, self.circumradius())


@dataclass(frozen=True)
class HPolytope(ConvexBody):
    """Bounded intersection of halfspaces a.x <= b with an interior witness."""

    normals: np.ndarray
    offsets: np.ndarray
    witness: np.ndarray
    _bbox: tuple = field(repr=False, default=None)
    _volume_cache: dict = field(repr=False, default=None)

    def __post_init__(self):
        a = np.asarray(self.normals, dtype=float)
        b = np.asarray(self.offsets, dtype=float)
        if a.ndim != 2 or b.ndim != 1 or a.shape[0] != b.size:
            raise ValueError("normals must be (m, d) with m matching offsets")
        d = a.shape[1]
        if d < 2:
            raise ValueError(f"dimension must be >= 2, got {d}")
        norms = np.linalg.norm(a, axis=1)
        if np.any(norms == 0):
            raise ValueError("zero normal vector in halfspace list")
        w = as_vector(self.witness, d)
        object.__setattr__(self, "normals", _freeze(a / norms[:, None]))
        object.__setattr__(self, "offsets", _freeze(b / norms))
        object.__setattr__(self, "witness", _freeze(w))
        lo, hi = self._certify_bounded()
        object.__setattr__(self, "_bbox", (lo, hi))
        scale = 0.5 * float(np.linalg.norm(hi - lo))
        slack = self.offsets - self.normals @ w
        if np.any(slack <= 1e-10 * max(scale, 1.0)):
            raise ValueError("witness point is not strictly interior")
        object.__setattr__(self, "_volume_cache", {})

    def _certify_bounded(self) -> tuple[np.ndarray, np.ndarray]:
        from scipy.optimize import linprog

        d = self.dim
        lo = np.empty(d)
        hi = np.empty(d)
        for j in range(d):
            for sign in (+1.0, -1.0):
                c = np.zeros(d)
                c[j] = -sign
                res = linprog(
                    c,
                    A_ub=np.asarray(self.normals),
                    b_ub=np.asarray(self.offsets),
                    bounds=[(None, None)] * d,
                    method="highs",
                )
                if res.status == 3:
                    raise ValueError("unbounded")
                if res.status != 0:
                    raise ValueError(f"support LP failed: {res.message}")
                val = -res.fun
                if sign > 0:
                    hi[j] = val
                else:
                    lo[j] = -val
        return _freeze(lo), _freeze(hi)

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    def contains(self, z, *, tol: float = REL_TOL) -> bool:
        z = as_vector(z, self.dim)
        return bool(np.all(self.normals @ z - self.offsets <= tol * self.circumradius()))

    def strictly_contains(self, z, *, margin: float = 1e-10) -> bool:
        z = as_vector(z, self.dim)
        return bool(np.all(self.normals @ z - self.offsets < -margin * self.circumradius()))

    def support(self, u) -> float:
        from scipy.optimize import linprog

        u = as_vector(u, self.dim)
        if not np.any(u):
            raise ValueError("support direction must be nonzero")
        res = linprog(
            -u,
            A_ub=np.asarray(self.normals),
            b_ub=np.asarray(self.offsets),
            bounds=[(None, None)] * self.dim,
            method="highs",
        )
        if res.status == 3:
            raise ValueError("unbounded")
        if res.status != 0:
            raise ValueError(f"support LP failed: {res.message}")
        return float(-res.fun)

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self._bbox
        return lo.copy(), hi.copy()

    def circumradius(self) -> float:
        lo, hi = self._bbox
        return 0.5 * float(np.linalg.norm(hi - lo))

    def interior_point(self) -> np.ndarray:
        return self.witness.copy()

    def halfspaces(self) -> tuple[np.ndarray, np.ndarray]:
        return self.normals, self.offsets

    def vertices(self) -> np.ndarray:
        """Enumerate vertices from d-subsets of active facets (small d only)."""
        a, b = self.normals, self.offsets
        m, d = a.shape
        tol = 1e-9 * max(self.circumradius(), 1.0)
        pts = []
        for idx in itertools.combinations(range(m), d):
            sub = a[list(idx)]
            if abs(np.linalg.det(sub)) < 1e-12:
                continue
            x = np.linalg.solve(sub, b[list(idx)])
            if np.all(a @ x - b <= tol):
                pts.append(x)
        if not pts:
            raise ValueError("no vertices found; polytope may be degenerate")
        pts = np.array(pts)
        # dedupe
        keep = []
        for p in pts:
            if not any(np.linalg.norm(p - q) <= 10 * tol for q in keep):
                keep.append(p)
        return np.array(keep)

    def volume(self) -> float:
        cache = self._volume_cache
        if "volume" not in cache:
            if self.dim <= 3:
                cache["volume"] = self._volume_exact()
                cache["stderr"] = 0.0
            else:
                est, se = self.volume_mc()
                cache["volume"] = est
                cache["stderr"] = se
        return cache["volume"]

    def volume_stderr(self) -> float:
        self.volume()
        return self._volume_cache["stderr"]

    def _volume_exact(self) -> float:
        verts = self.vertices()
        if self.dim == 2:
            c = verts.mean(axis=0)
            order = np.argsort(np.arctan2(verts[:, 1] - c[1], verts[:, 0] - c[0]))
            p = verts[order]
            x, y = p[:, 0], p[:, 1]
            return 0.5 * abs(float(x @ np.roll(y, -1) - y @ np.roll(x, -1)))
        # d = 3: cone over each facet polygon from the witness
        a, b = self.normals, self.offsets
        tol = 1e-8 * max(self.circumradius(), 1.0)
        p0 = self.witness
        total = 0.0
        for i in range(a.shape[0]):
            on = np.abs(verts @ a[i] - b[i]) <= tol
            face = verts[on]
            if face.shape[0] < 3:
                continue
            cf = face.mean(axis=0)
            # order face vertices by angle in the facet plane
            basis = np.linalg.svd(face - cf)[2][:2]
            ang = np.arctan2((face - cf) @ basis[1], (face - cf) @ basis[0])
            face = face[np.argsort(ang)]
            for k in range(1, face.shape[0] - 1):
                mat = np.stack([face[0] - p0, face[k] - p0, face[k + 1] - p0])
                total += abs(float(np.linalg.det(mat))) / 6.0
        return total

    def volume_mc(self, probes: int = 200_000, stream=None) -> tuple[float, float]:
        """Monte Carlo volume over the bounding box with binomial standard error."""
        from .sampling import StreamKey

        if stream is None:
            stream = StreamKey(seed=271_828_182_845, path=())
        lo, hi = self._bbox
        box_vol = float(np.prod(hi - lo))
        gen = stream.generator()
        hits = 0
        todo = probes
        while todo > 0:
            block = min(todo, 1 << 16)
            z = lo + (hi - lo) * gen.random((block, self.dim))
            hits += int(np.sum(np.all(z @ self.normals.T - self.offsets <= 0, axis=1)))
            todo -= block
        frac = hits / probes
        return box_vol * frac, box_vol * math.sqrt(max(frac * (1 - frac), 0.0) / probes)

    def ray_boundary(self, origin, direction, rolling: bool = True) -> SurfacePoint:
        o, u = self._check_ray_args(origin, direction)
        a, b = self.normals, self.offsets
        au = a @ u
        pos = au > 1e-14
        t = (b[pos] - a[pos] @ o) / au[pos]
        s = float(t.min())
        x = o + s * u
        return _polytope_surface_point(a, b, x, self.circumradius())


def _polytope_surface_point(a: np.ndarray, b: np.ndarray, x: np.ndarray, scale: float) -> SurfacePoint:
    """Classify a boundary point of {a.x <= b}: facet interior gets a normal."""
    slack = b - a @ x
    tol = 1e-9 * max(scale, 1.0)
    active = np.nonzero(np.abs(slack) <= tol)[0]
    if active.size != 1:
        return SurfacePoint(_freeze(x), None, 0.0)
    n = a[active[0]]
    return SurfacePoint(_freeze(x), _freeze(n.copy()), _facet_rolling_radius(a, b, x, n))


def _facet_rolling_radius(a: np.ndarray, b: np.ndarray, x: np.ndarray, n: np.ndarray) -> float:
    """Largest inscribed ball tangent at a facet-interior point x with normal n.

    The ball B(x - r n, r) fits inside {a.x <= b} iff for every halfspace
    a_j.(x - r n) + r <= b_j, i.e. r <= slack_j / (1 - a_j.n) whenever the
    denominator is positive (unit rows assumed).
    """
    num = b - a @ x
    den = 1.0 - a @ n
    mask = den > 1e-12
    if not mask.any():
        return math.inf
    return float(np.min(num[mask] / den[mask]))


def contains_many(body: ConvexBody, z: np.ndarray, tol: float = REL_TOL) -> np.ndarray:
    """Vectorized membership test; `z` has shape (m, d)."""
    z = np.atleast_2d(np.asarray(z, dtype=float))
    if z.shape[1] != body.dim:
        raise ValueError(f"dimension mismatch: body d={body.dim}, points d={z.shape[1]}")
    slack = tol * body.circumradius()
    if isinstance(body, Ball):
        return np.linalg.norm(z - body.center, axis=1) <= body.radius * (1.0 + tol)
    if isinstance(body, Ellipsoid):
        w = z - body.center
        q = np.einsum("ij,jk,ik->i", w, body.shape, w)
        return np.sqrt(np.maximum(q, 0.0)) <= 1.0 + tol
    if isinstance(body, Box):
        return np.all(z >= body.lo - slack, axis=1) & np.all(z <= body.hi + slack, axis=1)
    if isinstance(body, Simplex):
        mu = (z - body.vertices[0]) @ body._edge_inv.T
        return np.all(mu >= -tol, axis=1) & (mu.sum(axis=1) <= 1.0 + tol)
    if isinstance(body, HPolytope):
        return np.all(z @ body.normals.T - body.offsets <= slack, axis=1)
    raise ValueError(f"unsupported body kind: {type(body).__name__}")


def make_unit_box(d: int) -> Box:
    return Box(np.zeros(d), np.ones(d))


def make_standard_simplex(d: int) -> Simplex:
    return Simplex(np.vstack([np.zeros(d), np.eye(d)]))


def parse_hpolytope_text(text: str) -> HPolytope:
    """Parse the halfspace text format: one "a1 ... ad b" line per facet and
    a final "interior x1 ... xd" line.  Parsing is strict; malformed lines
    abort with their 1-based line number."""
    rows = []
    witness = None
    width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "interior":
            if witness is not None:
                raise ValueError(f"line {lineno}: duplicate interior line")
            try:
                witness = [float(p) for p in parts[1:]]
            except ValueError as exc:
                raise ValueError(f"line {lineno}: bad interior coordinate: {exc}") from None
            continue
        if witness is not None:
            raise ValueError(f"line {lineno}: halfspace after interior line")
        try:
            vals = [float(p) for p in parts]
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad halfspace entry: {exc}") from None
        if len(vals) < 3:
            raise ValueError(f"line {lineno}: need at least 'a1 a2 b'")
        if width is None:
            width = len(vals)
        elif len(vals) != width:
            raise ValueError(f"line {lineno}: expected {width} fields, got {len(vals)}")
        rows.append(vals)
    if not rows:
        raise ValueError("no halfspace lines found")
    if witness is None:
        raise ValueError("missing final 'interior x1 ... xd' line")
    d = width - 1
    if len(witness) != d:
        raise ValueError(f"interior point has {len(witness)} coordinates, expected {d}")
    arr = np.array(rows, dtype=float)
    return HPolytope(arr[:, :d], arr[:, d], np.array(witness))


def load_hpolytope(path) -> HPolytope:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_hpolytope_text(fh.read())
