"""Point-in-convex-hull oracle and exact low-dimensional hull volumes.

Membership in the hull of n points is decided by a phase-I simplex solve of
the convex-combination program (find lambda >= 0 with sum 1 and
P^T lambda = z) using Bland's rule, so no explicit hull is ever built in
high dimension.  A vectorized implementation runs many probe points
against the same sample simultaneously; a support-direction prefilter
certifies clearly-outside probes without touching the LP.

Exact hull volumes are provided for d = 2 (monotone chain + shoelace,
behind an extreme-point pruning pass) and d = 3 (incremental hull with fan
triangulation).  Degenerate samples report volume 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class Membership(Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class HullSample:
    """An n-point sample in R^d whose convex hull is queried."""

    points: np.ndarray

    def __post_init__(self):
        p = np.ascontiguousarray(self.points, dtype=float)
        if p.ndim != 2 or p.shape[0] < 1:
            raise ValueError(f"points must be a nonempty (n, d) array, got {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ValueError("sample points must be finite")
        p.setflags(write=False)
        object.__setattr__(self, "points", p)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def centroid(self) -> np.ndarray:
        return self.points.mean(axis=0)

    @property
    def circumradius(self) -> float:
        r = float(np.linalg.norm(self.points - self.centroid, axis=1).max())
        return r if r > 0 else 1.0


# ---------------------------------------------------------------------------
# 2-d primitives


def _extreme_point_indices(points: np.ndarray, n_dirs: int = 32) -> np.ndarray:
    ang = np.arange(n_dirs) * (2.0 * math.pi / n_dirs)
    dirs = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    proj = dirs @ points.T  # (n_dirs, n): contiguous rows for the argmax
    return np.unique(np.argmax(proj, axis=1))


def hull_candidates_2d(points: np.ndarray) -> np.ndarray:
    """Prune points that are certifiably interior (extreme-point polygon test).

    The returned subset contains every hull vertex, so any hull computation
    on it is exact for the original sample.
    """
    if points.shape[0] <= 16:
        return points
    ext = points[_extreme_point_indices(points)]
    poly = _monotone_chain(ext)
    if poly.shape[0] < 3:
        return points
    scale = float(np.abs(points).max()) or 1.0
    margin = 1e-12 * scale
    edges = np.roll(poly, -1, axis=0) - poly
    # cross(edge_k, p - v_k) > margin for all k  =>  strictly inside the CCW
    # polygon; expressed as one matmul: points @ A.T > c
    a = np.stack([-edges[:, 1], edges[:, 0]], axis=1)
    c = margin + np.einsum("kj,kj->k", a, poly)
    interior = np.all(points @ a.T > c[None, :], axis=1)
    return points[~interior]


def _monotone_chain(points: np.ndarray) -> np.ndarray:
    """Convex hull of 2-d points, CCW vertex order (Andrew's monotone chain)."""
    pts = np.unique(points, axis=0)  # lexicographic sort + dedupe
    if pts.shape[0] <= 2:
        return pts

    def half(chain_pts):
        chain: list[np.ndarray] = []
        for p in chain_pts:
            while len(chain) >= 2:
                o, a = chain[-2], chain[-1]
                if (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0]) <= 0.0:
                    chain.pop()
                else:
                    break
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


def hull_area_2d(points: np.ndarray) -> float:
    poly = _monotone_chain(hull_candidates_2d(points))
    if poly.shape[0] < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * abs(float(x @ np.roll(y, -1) - y @ np.roll(x, -1)))


def hull_polygon_2d(points: np.ndarray) -> np.ndarray:
    """CCW hull polygon of a 2-d sample (used as the exact membership oracle)."""
    return _monotone_chain(hull_candidates_2d(points))


def polygon_contains(poly: np.ndarray, z: np.ndarray, tol: float) -> np.ndarray:
    """Exact convex-polygon membership for query points z (m, 2), CCW `poly`.

    This is the independent oracle for the LP route: plain halfspace tests
    against the polygon edges, boundary counted as inside within `tol`.
    """
    z = np.atleast_2d(np.asarray(z, dtype=float))
    if poly.shape[0] == 0:
        return np.zeros(z.shape[0], dtype=bool)
    if poly.shape[0] == 1:
        return np.linalg.norm(z - poly[0], axis=1) <= tol
    if poly.shape[0] == 2:
        a, b = poly
        ab = b - a
        t = np.clip((z - a) @ ab / float(ab @ ab), 0.0, 1.0)
        return np.linalg.norm(z - (a + t[:, None] * ab), axis=1) <= tol
    edges = np.roll(poly, -1, axis=0) - poly
    lengths = np.linalg.norm(edges, axis=1)
    rel0 = z[:, None, 0] - poly[None, :, 0]
    rel1 = z[:, None, 1] - poly[None, :, 1]
    cross = edges[None, :, 0] * rel1 - edges[None, :, 1] * rel0
    return np.all(cross >= -tol * lengths[None, :], axis=1)


# ---------------------------------------------------------------------------
# 3-d incremental hull


def hull_volume_3d(points: np.ndarray) -> float:
    pts = np.unique(points, axis=0)
    n = pts.shape[0]
    if n < 4:
        return 0.0
    center = pts.mean(axis=0)
    scale = float(np.linalg.norm(pts - center, axis=1).max())
    if scale == 0.0:
        return 0.0
    eps = 1e-12 * scale

    # affinely independent seed tetrahedron
    i0 = 0
    d0 = np.linalg.norm(pts - pts[i0], axis=1)
    i1 = int(d0.argmax())
    if d0[i1] <= eps:
        return 0.0
    e1 = pts[i1] - pts[i0]
    cr = np.linalg.norm(np.cross(pts - pts[i0], e1), axis=1)
    i2 = int(cr.argmax())
    if cr[i2] <= eps * np.linalg.norm(e1):
        return 0.0
    nrm = np.cross(e1, pts[i2] - pts[i0])
    het = np.abs((pts - pts[i0]) @ nrm)
    i3 = int(het.argmax())
    if het[i3] <= eps * np.linalg.norm(nrm):
        return 0.0

    seed = [i0, i1, i2, i3]
    inner = pts[seed].mean(axis=0)

    def make_facet(a, b, c):
        n_vec = np.cross(pts[b] - pts[a], pts[c] - pts[a])
        norm = np.linalg.norm(n_vec)
        if norm == 0.0:
            return None
        n_vec = n_vec / norm
        if float(n_vec @ (inner - pts[a])) > 0.0:
            n_vec = -n_vec
            a, b, c = a, c, b
        return (a, b, c, n_vec)

    facets = []
    for tri in ((i0, i1, i2), (i0, i1, i3), (i0, i2, i3), (i1, i2, i3)):
        f = make_facet(*tri)
        if f is not None:
            facets.append(f)

    order = [i for i in range(n) if i not in seed]
    for ip in order:
        p = pts[ip]
        visible = [k for k, (a, b, c, nv) in enumerate(facets) if float(nv @ (p - pts[a])) > eps]
        if not visible:
            continue
        edge_count: dict[tuple[int, int], int] = {}
        for k in visible:
            a, b, c, _ = facets[k]
            for u, v in ((a, b), (b, c), (c, a)):
                key = (u, v) if u < v else (v, u)
                edge_count[key] = edge_count.get(key, 0) + 1
        horizon = [e for e, cnt in edge_count.items() if cnt == 1]
        facets = [f for k, f in enumerate(facets) if k not in set(visible)]
        for u, v in horizon:
            f = make_facet(u, v, ip)
            if f is not None:
                facets.append(f)

    total = 0.0
    for a, b, c, _ in facets:
        mat = np.stack([pts[a] - inner, pts[b] - inner, pts[c] - inner])
        total += abs(float(np.linalg.det(mat)))
    return total / 6.0


def hull_volume_low_dim(sample: HullSample) -> float:
    """Exact hull volume for d in {2, 3}; degenerate samples return 0."""
    if sample.dim == 2:
        return hull_area_2d(sample.points)
    if sample.dim == 3:
        return hull_volume_3d(sample.points)
    raise ValueError("use estimated path")


# ---------------------------------------------------------------------------
# membership LP (phase-I simplex, Bland's rule, vectorized over probes)


def _prefilter_directions(d: int) -> np.ndarray:
    if d == 2:
        ang = np.arange(32) * (2.0 * math.pi / 32)
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    eye = np.eye(d)
    gen = np.random.Generator(np.random.Philox(np.random.SeedSequence(918273645)))
    extra = gen.standard_normal((min(64, 4 * d), d))
    extra /= np.linalg.norm(extra, axis=1, keepdims=True)
    return np.vstack([eye, -eye, extra])


def _phase1_feasible(
    cols: np.ndarray, rhs: np.ndarray, tol: float, max_iter: int
) -> np.ndarray:
    """Batched phase-I simplex: is each rhs[l] in the cone {cols @ lam, lam >= 0}
    with the convexity row included?  `cols` is (d+1, n); `rhs` is (L, d+1).

    Returns a boolean array: True where the artificial optimum is <= tol.
    Finished lanes are compacted away each iteration, so the per-iteration
    dense pivot update only touches lanes that still need pivots.
    """
    n_rows, n_struct = cols.shape
    n_lanes = rhs.shape[0]
    eps_enter = 1e-9
    eps_piv = 1e-11

    sign = np.where(rhs < 0.0, -1.0, 1.0)
    tab = np.empty((n_lanes, n_rows + 1, n_struct + n_rows + 1))
    tab[:, :n_rows, :n_struct] = sign[:, :, None] * cols[None, :, :]
    art = np.zeros((n_rows, n_rows))
    np.fill_diagonal(art, 1.0)
    tab[:, :n_rows, n_struct : n_struct + n_rows] = art[None, :, :]
    tab[:, :n_rows, -1] = np.abs(rhs)
    # objective row: reduced costs r_j = c_B B^-1 A_j - c_j with artificial basis
    tab[:, -1, :] = tab[:, :n_rows, :].sum(axis=1)
    tab[:, -1, n_struct : n_struct + n_rows] -= 1.0

    basis = np.tile(np.arange(n_struct, n_struct + n_rows), (n_lanes, 1))
    lanes = np.arange(n_lanes)  # original index of each live tableau row
    feasible = np.zeros(n_lanes, dtype=bool)

    for _ in range(max_iter):
        red = tab[:, -1, :-1]
        improvable = red > eps_enter
        live = improvable.any(axis=1)
        if not live.all():
            done = ~live
            feasible[lanes[done]] = tab[done, -1, -1] <= tol
            tab = tab[live]
            basis = basis[live]
            lanes = lanes[live]
            improvable = improvable[live]
        if lanes.size == 0:
            return feasible
        enter = improvable.argmax(axis=1)  # smallest improving index (Bland)

        sub = np.arange(lanes.size)
        col = tab[sub, :n_rows, enter]
        rhs_col = tab[:, :n_rows, -1]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(col > eps_piv, rhs_col / col, np.inf)
        best = ratio.min(axis=1)
        if not np.all(np.isfinite(best)):
            raise RuntimeError("phase-I simplex: unbounded pivot column")
        near = ratio <= best[:, None] * (1.0 + 1e-12) + 1e-300
        # Bland tie-break: smallest basis variable index among the tied rows
        masked = np.where(near, basis, np.iinfo(np.int64).max)
        leave = masked.argmin(axis=1)

        piv = tab[sub, leave, enter]
        pivrow = tab[sub, leave, :] / piv[:, None]
        factors = tab[sub, :, enter].copy()
        factors[sub, leave] = 0.0
        tab -= factors[:, :, None] * pivrow[:, None, :]
        tab[sub, leave, :] = pivrow
        basis[sub, leave] = enter
    if lanes.size:
        raise RuntimeError("phase-I simplex failed to converge")
    return feasible


def in_hull_batch(sample: HullSample, queries: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Vectorized hull membership: True where the query is inside (or within
    `tol` of) the convex hull of the sample points."""
    z = np.atleast_2d(np.asarray(queries, dtype=float))
    if z.shape[1] != sample.dim:
        raise ValueError(f"dimension mismatch: sample d={sample.dim}, queries d={z.shape[1]}")
    radius = sample.circumradius
    if tol is None:
        tol = 1e-9 * radius
    mu = sample.centroid

    pts = sample.points
    if sample.dim == 2 and sample.n > 64:
        pts = hull_candidates_2d(pts)
    p_sc = (pts - mu) / radius
    z_sc = (z - mu) / radius
    tol_sc = tol / radius

    result = np.ones(z.shape[0], dtype=bool)
    dirs = _prefilter_directions(sample.dim)
    h = (p_sc @ dirs.T).max(axis=0)
    separated = ((z_sc @ dirs.T) - h[None, :] > tol_sc).any(axis=1)
    result[separated] = False

    rest = np.nonzero(~separated)[0]
    if rest.size:
        cols = np.vstack([p_sc.T, np.ones((1, p_sc.shape[0]))])
        rhs = np.concatenate([z_sc[rest], np.ones((rest.size, 1))], axis=1)
        max_iter = 50 * (p_sc.shape[0] + sample.dim + 2)
        feasible = _phase1_feasible(cols, rhs, tol_sc, max_iter)
        result[rest] = feasible
    return result


def in_hull(sample: HullSample, z, tol: float | None = None) -> Membership:
    """Separation-LP membership for one query point."""
    inside = in_hull_batch(sample, np.asarray(z, dtype=float)[None, :], tol)[0]
    return Membership.INSIDE if inside else Membership.OUTSIDE


# ---------------------------------------------------------------------------
# deficit volume


def deficit_volume(body, sample: HullSample, probes: int, stream) -> tuple[float, float]:
    """Volume of the part of the body not covered by the sample's hull.

    Dimensions 2 and 3 use the exact hull volume (standard error 0); higher
    dimensions estimate the uncovered fraction by uniform probing with the
    membership LP.
    """
    if body.dim != sample.dim:
        raise ValueError(f"dimension mismatch: body d={body.dim}, sample d={sample.dim}")
    if body.dim <= 3:
        return body.volume() - hull_volume_low_dim(sample), 0.0
    if probes < 1:
        raise ValueError(f"probes must be >= 1 on the Monte Carlo path, got {probes}")
    return deficit_volume_mc(body, sample, probes, stream)


def deficit_volume_mc(body, sample: HullSample, probes: int, stream) -> tuple[float, float]:
    """Monte Carlo deficit for any dimension (the d > 3 production path;
    callable directly on low dimensions to cross-check the exact path)."""
    from .sampling import sample_uniform

    vol = body.volume()
    outside = 0
    todo = probes
    block_index = 0
    while todo > 0:
        block = min(todo, 1 << 15)
        z = sample_uniform(body, stream.substream(block_index), block)
        outside += int(np.sum(~in_hull_batch(sample, z)))
        todo -= block
        block_index += 1
    frac = outside / probes
    stderr = vol * math.sqrt(max(frac * (1.0 - frac), 0.0) / probes)
    return vol * frac, stderr
