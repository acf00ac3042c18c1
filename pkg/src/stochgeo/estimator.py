"""Monte Carlo estimation of the expected uncovered volume of random hulls.

For a body K and sample size n, each trial draws n uniform points from its
own substream and computes the uncovered volume vol(K) - vol(hull); the
estimator reports the mean across trials, its standard error, and the
scaled value  deficit / (vol(K)/n)^{2/(d+1)}  that converges to
affine surface area / c(d).

Trial aggregation uses pairwise (tree) summation over the trial-indexed
array, so results are bitwise identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bodies import ConvexBody
from .hull import HullSample, deficit_volume
from .sampling import StreamKey, sample_uniform
from .specialfn import affine_surface_area, c_d


def pairwise_sum(values: np.ndarray) -> float:
    """Deterministic tree summation: the result depends only on the array
    order, never on how the entries were produced or scheduled."""
    arr = np.asarray(values, dtype=float).copy()
    while arr.size > 1:
        odd = arr[-1] if arr.size % 2 else None
        head = arr[: arr.size - (arr.size % 2)]
        arr = head[0::2] + head[1::2]
        if odd is not None:
            arr = np.append(arr, odd)
    return float(arr[0]) if arr.size else 0.0


@dataclass(frozen=True)
class DeficitEstimate:
    """One Monte Carlo run of the uncovered-volume estimator."""

    n: int
    trials: int
    probes: int
    deficit_mean: float
    deficit_stderr: float
    scaled: float
    scaled_stderr: float
    stream: StreamKey


def _trial_deficit(body: ConvexBody, n: int, probes: int, trial_stream: StreamKey) -> float:
    pts = sample_uniform(body, trial_stream, n)
    est, _ = deficit_volume(body, HullSample(pts), probes, trial_stream.substream(1_000_000))
    return est


def estimate_deficit(
    body: ConvexBody,
    n: int,
    trials: int,
    probes: int,
    stream: StreamKey,
    workers: int = 1,
) -> DeficitEstimate:
    """Mean uncovered volume over `trials` independent n-point samples.

    Each trial owns substream(stream, trial); the probe stream on the
    Monte Carlo path is a further split of it.  Worker count affects only
    scheduling: per-trial results land in a trial-indexed array that is
    reduced by pairwise summation.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if trials < 2:
        raise ValueError(f"trials must be >= 2, got {trials}")
    deficits = np.empty(trials)

    def run(t: int) -> None:
        deficits[t] = _trial_deficit(body, n, probes, stream.substream(t))

    if workers <= 1:
        for t in range(trials):
            run(t)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, range(trials)))

    mean = pairwise_sum(deficits) / trials
    var = pairwise_sum((deficits - mean) ** 2) / (trials - 1)
    stderr = float(np.sqrt(var / trials))
    factor = (n / body.volume()) ** (2.0 / (body.dim + 1.0))
    return DeficitEstimate(
        n=n,
        trials=trials,
        probes=probes,
        deficit_mean=mean,
        deficit_stderr=stderr,
        scaled=mean * factor,
        scaled_stderr=stderr * factor,
        stream=stream,
    )


def predicted_limit(body: ConvexBody) -> float:
    """Limit of the scaled deficit: affine surface area over c(d).

    Exactly 0 for polytopal kinds (flat boundary almost everywhere)."""
    return affine_surface_area(body) / c_d(body.dim)


def convergence_table(
    body: ConvexBody,
    ns,
    trials: int,
    probes: int,
    stream: StreamKey,
    workers: int = 1,
    crn: bool = False,
) -> list[DeficitEstimate]:
    """One deficit estimate per sample size, for trend checks against the
    predicted limit.

    With `crn` the same per-trial substreams are reused across all sample
    sizes (the first n points of a larger run coincide with a smaller run),
    which sharpens monotonicity comparisons; otherwise each n gets its own
    substream family.
    """
    ns = [int(n) for n in ns]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError(f"sample sizes must be strictly increasing, got {ns}")
    rows = []
    for i, n in enumerate(ns):
        row_stream = stream if crn else stream.substream(i)
        rows.append(estimate_deficit(body, n, trials, probes, row_stream, workers))
    return rows
