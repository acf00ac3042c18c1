"""Deterministic, stream-splittable uniform sampling inside convex bodies.

A `StreamKey` is a (seed, path) pair; identical keys reproduce identical
draw sequences and distinct paths give statistically independent streams,
so trials can run on any number of threads and still produce bit-identical
results.  The generator is counter-based (Philox keyed through numpy's
SeedSequence spawn mechanism).

Gaussian variates are produced by mapping uniforms through the inverse
normal CDF (monotone, ~1e-15 accurate, rejection-free), which keeps the
draw count per sample point fixed: the first k points of a stream never
depend on how many more will be drawn.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from .bodies import Ball, Box, ConvexBody, Ellipsoid, HPolytope, Simplex

_MIN_UNIFORM = 1e-300  # keep ndtri away from 0 (probability 2^-53 per draw)


@dataclass(frozen=True)
class StreamKey:
    """Root of a reproducible random stream: 64-bit seed plus a split path."""

    seed: int
    path: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        object.__setattr__(self, "path", tuple(int(p) for p in self.path))

    def substream(self, index: int) -> "StreamKey":
        return StreamKey(self.seed, self.path + (int(index),))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=int(self.seed), spawn_key=self.path)
        return np.random.Generator(np.random.Philox(ss))


def substream(stream: StreamKey, index: int) -> StreamKey:
    return stream.substream(index)


def gaussian_from_uniform(u: np.ndarray) -> np.ndarray:
    """Inverse-CDF standard normals from uniforms in [0, 1)."""
    return ndtri(np.maximum(u, _MIN_UNIFORM))


def sample_uniform(body: ConvexBody, stream: StreamKey, count: int) -> np.ndarray:
    """Draw `count` i.i.d. uniform points in the body, shape (count, d).

    Draws are consumed row-major with a fixed number of uniforms per point,
    so the first k rows coincide with a count=k call on the same stream
    (used by common-random-number comparisons across sample sizes).
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    gen = stream.generator()
    if isinstance(body, Ball):
        return _ball_points(gen, count, body.dim) * body.radius + body.center
    if isinstance(body, Ellipsoid):
        z = _ball_points(gen, count, body.dim)
        return z @ body.unit_ball_map().T + body.center
    if isinstance(body, Box):
        u = gen.random((count, body.dim))
        return body.lo + (body.hi - body.lo) * u
    if isinstance(body, Simplex):
        e = -np.log(np.maximum(gen.random((count, body.dim + 1)), _MIN_UNIFORM))
        w = e / e.sum(axis=1, keepdims=True)
        return w @ body.vertices
    if isinstance(body, HPolytope):
        pts, _ = sample_hpolytope_with_rate(body, stream, count)
        return pts
    raise ValueError(f"unsupported body kind: {type(body).__name__}")


def _ball_points(gen: np.random.Generator, count: int, d: int) -> np.ndarray:
    """Uniform points in the unit ball: Gaussian direction, radius U^(1/d)."""
    u = gen.random((count, d + 1))
    g = gaussian_from_uniform(u[:, :d])
    norms = np.linalg.norm(g, axis=1)
    norms[norms == 0.0] = 1.0  # probability-zero guard
    radii = u[:, d] ** (1.0 / d)
    return g * (radii / norms)[:, None]


def sample_hpolytope_with_rate(
    body: HPolytope, stream: StreamKey, count: int, pilot: int = 100_000
) -> tuple[np.ndarray, float]:
    """Rejection sampling from the support bounding box, returning the
    observed acceptance rate.  Aborts if the pilot phase suggests the
    polytope occupies less than 1e-6 of its bounding box."""
    gen = stream.generator()
    lo, hi = body.bounding_box()
    a, b = body.halfspaces()
    accepted: list[np.ndarray] = []
    got = 0
    attempts = 0
    hits = 0
    block = 1 << 14
    while got < count:
        z = lo + (hi - lo) * gen.random((block, body.dim))
        keep = z[np.all(z @ a.T - b <= 0.0, axis=1)]
        attempts += block
        hits += keep.shape[0]
        if keep.shape[0]:
            accepted.append(keep)
            got += keep.shape[0]
        if attempts >= pilot and hits / attempts < 1e-6:
            raise ValueError("rejection infeasible")
    pts = np.concatenate(accepted, axis=0)[:count]
    return pts, hits / attempts
