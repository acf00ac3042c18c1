"""Verification suites behind the `verify` CLI subcommand.

Each suite returns a list of CSV-ready row dicts and a list of Assertion
records; the CLI prints one pass/fail line per assertion and exits nonzero
if any failed.  The acceptance test module drives the same functions with
the documented parameters and tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import chisquare

from .bodies import Ball, ConvexBody, contains_many, make_standard_simplex, make_unit_box
from .convolution import (
    covariogram,
    lemma2_check_disk,
    lemma7_bound,
    lemma18_limit,
    lemma18_ratio_ball,
    lens_rho_from_volume,
    lens_volume,
)
from .estimator import convergence_table, predicted_limit
from .hull import HullSample, hull_polygon_2d, in_hull_batch, polygon_contains
from .sampling import StreamKey, sample_uniform
from .specialfn import (
    CapGeometry,
    c_d,
    cap_volume_bounds,
    cap_volume_exact,
    theorem1_consistency,
    unit_ball_volume,
    wieacker_limit,
)


@dataclass(frozen=True)
class Assertion:
    name: str
    passed: bool
    value: float
    detail: str = ""


def constants_rows(dmax: int) -> list[dict]:
    rows = []
    for d in range(2, dmax + 1):
        rows.append(
            {
                "d": d,
                "c_d": c_d(d),
                "ball_limit": wieacker_limit(d, 1.0),
                "asa_unit_ball": d * unit_ball_volume(d),
                "consistency_residual": theorem1_consistency(d, 1.0),
            }
        )
    return rows


def suite_consistency(dmax: int = 10, radii=(0.5, 1.0, 2.0)) -> tuple[list[dict], list[Assertion]]:
    rows, checks = [], []
    for d in range(2, dmax + 1):
        for r in radii:
            resid = theorem1_consistency(d, r)
            rows.append({"d": d, "r": r, "residual": resid})
            checks.append(Assertion(f"consistency d={d} r={r}", resid < 1e-9, resid))
    return rows, checks


def suite_lemma4(
    dmax: int = 8, radii=(0.5, 1.0, 2.0), fracs=None
) -> tuple[list[dict], list[Assertion]]:
    if fracs is None:
        fracs = [0.05 * k for k in range(1, 21)]
    rows = []
    violations = 0
    cells = 0
    for d in range(2, dmax + 1):
        for r in radii:
            for f in fracs:
                cap = CapGeometry(d, r, f * r)
                lower, upper = cap_volume_bounds(cap)
                exact = cap_volume_exact(cap)
                ok = lower <= exact <= upper
                cells += 1
                violations += 0 if ok else 1
                rows.append(
                    {"d": d, "r": r, "delta": f * r, "lower": lower, "exact": exact,
                     "upper": upper, "ok": ok}
                )
    checks = [Assertion(f"cap sandwich holds on all {cells} cells", violations == 0, violations)]
    return rows, checks


def suite_lemma2(r: float = 1.0, grid: int = 20) -> tuple[list[dict], list[Assertion]]:
    big_t = math.pi * r * r
    ts = np.linspace(0.1 * big_t, 0.9 * big_t, grid)
    raw = lemma2_check_disk(r, ts)
    rows = [
        {"t": t, "rho": rho, "lhs": lhs, "rhs": rhs, "ratio": ratio}
        for t, rho, lhs, rhs, ratio in raw
    ]
    ratios = np.array([row["ratio"] for row in rows])
    sd = float(ratios.std(ddof=1))
    checks = [
        Assertion("lemma2 ratio constant across t-grid (sd < 1e-6)", sd < 1e-6, sd,
                  detail=f"ratio mean {ratios.mean():.12f}"),
        Assertion("lemma2 both sides negative", all(row["lhs"] < 0 and row["rhs"] < 0 for row in rows),
                  float(ratios.mean())),
    ]
    return rows, checks


def suite_lemma18(t_frac: float = 1e-8, dims=(2, 3), r: float = 1.0) -> tuple[list[dict], list[Assertion]]:
    rows, checks = [], []
    for d in dims:
        big_t = unit_ball_volume(d) * r**d
        t = t_frac * big_t
        ratio = lemma18_ratio_ball(d, r, t)
        limit = lemma18_limit(d, r)
        relerr = abs(ratio - limit) / limit
        rows.append({"d": d, "t": t, "ratio": ratio, "limit": limit, "relerr": relerr})
        checks.append(Assertion(f"lemma18 ball limit d={d}", relerr < 1e-3, relerr))
    return rows, checks


def _uncovered_probability_disk(
    z: np.ndarray, n: int, trials: int, stream: StreamKey, chunk: int = 4096
) -> tuple[float, float]:
    """Probability that a fixed point escapes the hull of n uniform disk points.

    Membership of one point against each sample reduces to an exact angular
    test: the point is outside the hull iff all sample points fit in an open
    halfplane through it, i.e. the sorted angle gaps exceed pi.
    """
    disk = Ball(np.zeros(2), 1.0)
    outside = 0
    done = 0
    block_idx = 0
    while done < trials:
        m = min(chunk, trials - done)
        pts = sample_uniform(disk, stream.substream(block_idx), m * n).reshape(m, n, 2)
        rel = pts - z
        ang = np.sort(np.arctan2(rel[:, :, 1], rel[:, :, 0]), axis=1)
        gaps = np.diff(ang, axis=1)
        wrap = ang[:, 0] + 2.0 * math.pi - ang[:, -1]
        max_gap = np.maximum(gaps.max(axis=1) if n > 1 else np.zeros(m), wrap)
        outside += int(np.sum(max_gap > math.pi))
        done += m
        block_idx += 1
    p = outside / trials
    return p, math.sqrt(max(p * (1.0 - p), 0.0) / trials)


def suite_lemma7(
    ns=(50, 200, 1000), ss=(0.01, 0.05, 0.2), trials: int = 10_000,
    stream: StreamKey | None = None,
) -> tuple[list[dict], list[Assertion]]:
    if stream is None:
        stream = StreamKey(seed=7, path=())
    vol = math.pi
    rows, checks = [], []
    cell = 0
    for n in ns:
        for s in ss:
            t = s * 2.0 * vol
            rho = lens_rho_from_volume(2, 1.0, t)
            z = np.array([rho, 0.0])
            bound = lemma7_bound(2, n, t, vol)
            mc, se = _uncovered_probability_disk(z, n, trials, stream.substream(cell))
            ok = bound >= mc - 3.0 * se
            rows.append({"n": n, "s": s, "t": t, "bound": bound, "mc_estimate": mc,
                         "mc_stderr": se, "ok": ok})
            checks.append(Assertion(f"lemma7 bound dominates n={n} s={s}", ok, bound - mc))
            cell += 1
    return rows, checks


def suite_oracle_hull(
    instances: int = 500, probes: int = 100, ball_instances: int = 50,
    stream: StreamKey | None = None,
) -> tuple[list[dict], list[Assertion]]:
    if stream is None:
        stream = StreamKey(seed=11, path=())
    rows = []
    disagreements = 0
    queries = 0
    for i in range(instances):
        gen = stream.substream(i).generator()
        n = int(gen.integers(3, 51))
        pts = gen.standard_normal((n, 2))
        sample = HullSample(pts)
        tol = 1e-9 * sample.circumradius
        lo = pts.min(axis=0) - 0.25 * sample.circumradius
        hi = pts.max(axis=0) + 0.25 * sample.circumradius
        z = lo + (hi - lo) * gen.random((probes, 2))
        lp = in_hull_batch(sample, z)
        poly = hull_polygon_2d(pts)
        exact = polygon_contains(poly, z, tol)
        disagreements += int(np.sum(lp != exact))
        queries += probes
    rows.append({"check": "in_hull_vs_polygon", "instances": instances,
                 "queries": queries, "disagreements": disagreements})
    checks = [
        Assertion(
            f"membership LP agrees with polygon oracle on {queries} queries",
            disagreements == 0, disagreements,
        )
    ]

    bad = 0
    worst = 0.0
    for i in range(ball_instances):
        gen = stream.substream(10_000 + i).generator()
        d = 2 if i % 2 == 0 else 3
        r = 0.5 + 1.5 * gen.random()
        c = gen.standard_normal(d)
        body = Ball(c, r)
        u = gen.standard_normal(d)
        u /= np.linalg.norm(u)
        x = c + (gen.random() * 0.98 * r) * u
        exact_g = lens_volume(d, r, float(np.linalg.norm(x - c)))
        mc, se = covariogram(body, x, probes=20_000, stream=stream.substream(20_000 + i),
                             method="mc")
        dev = abs(mc - exact_g) / se if se > 0 else 0.0
        worst = max(worst, dev)
        if dev > 5.0:
            bad += 1
    rows.append({"check": "covariogram_mc_vs_lens", "instances": ball_instances,
                 "queries": ball_instances, "disagreements": bad})
    checks.append(
        Assertion(
            f"covariogram MC within 5 stderr of exact lens on {ball_instances} balls",
            bad == 0, worst,
        )
    )
    return rows, checks


def suite_sampler_uniformity(stream: StreamKey | None = None) -> tuple[list[dict], list[Assertion]]:
    if stream is None:
        stream = StreamKey(seed=13, path=())
    rows, checks = [], []

    box = make_unit_box(2)
    count = 1_000_000
    pts = sample_uniform(box, stream.substream(0), count)
    cells = np.clip((pts * 4).astype(int), 0, 3)
    idx = cells[:, 0] * 4 + cells[:, 1]
    observed = np.bincount(idx, minlength=16)
    stat, pvalue = chisquare(observed)
    rows.append({"check": "chi_square_box_4x4", "statistic": float(stat), "pvalue": float(pvalue)})
    checks.append(Assertion("chi-square uniformity on 4^2 grid (p >= 0.001)", pvalue >= 0.001, pvalue))

    sigma = (1.0 / math.sqrt(12.0)) / math.sqrt(count)
    mean_dev = float(np.abs(pts.mean(axis=0) - 0.5).max())
    rows.append({"check": "box_mean", "statistic": mean_dev, "pvalue": 5 * sigma})
    checks.append(Assertion("box sample mean within 5 sigma of center", mean_dev <= 5 * sigma, mean_dev))

    disk = Ball(np.zeros(2), 1.0)
    z = sample_uniform(disk, stream.substream(1), 100_000)
    frac = float(np.mean(np.linalg.norm(z, axis=1) <= 0.5))
    se = math.sqrt(0.25 * 0.75 / z.shape[0])
    rows.append({"check": "disk_radial_quarter", "statistic": frac, "pvalue": 0.25})
    checks.append(Assertion("disk |z|<=1/2 mass within 5 sigma of 1/4", abs(frac - 0.25) <= 5 * se, frac))

    ball3 = Ball(np.zeros(3), 1.0)
    z3 = sample_uniform(ball3, stream.substream(2), 100_000)
    radii = np.linalg.norm(z3, axis=1)
    for thr in (0.3, 0.7):
        frac = float(np.mean(radii <= thr))
        expect = thr**3
        se = math.sqrt(expect * (1 - expect) / z3.shape[0])
        rows.append({"check": f"ball3_radial_cdf_{thr}", "statistic": frac, "pvalue": expect})
        checks.append(
            Assertion(f"ball d=3 radial CDF at t={thr} within 5 sigma", abs(frac - expect) <= 5 * se, frac)
        )

    for k, (name, body) in enumerate(
        (("ball3", ball3), ("box2", box), ("simplex3", make_standard_simplex(3)))
    ):
        pts = sample_uniform(body, stream.substream(10 + k), 20_000)
        all_in = bool(np.all(contains_many(body, pts)))
        rows.append({"check": f"containment_{name}", "statistic": float(all_in), "pvalue": 1.0})
        checks.append(Assertion(f"all {name} samples pass contains", all_in, float(all_in)))
    return rows, checks


def suite_theorem1_trend(
    body: ConvexBody,
    ns=(1_000, 10_000, 100_000),
    trials: int = 1_000,
    probes: int = 100_000,
    stream: StreamKey | None = None,
    workers: int = 1,
    rel_tol_final: float = 0.15,
) -> tuple[list[dict], list[Assertion]]:
    """Convergence of the scaled deficit toward the predicted limit.

    Bodies with positive limit assert |scaled - limit| strictly decreasing
    and the final value within `rel_tol_final`; polytopal bodies (limit 0)
    assert the scaled deficit decreases and halves by the last sample size.
    """
    if stream is None:
        stream = StreamKey(seed=17, path=())
    limit = predicted_limit(body)
    table = convergence_table(body, ns, trials, probes, stream, workers=workers)
    rows = []
    for est in table:
        rows.append(
            {
                "n": est.n, "trials": est.trials, "probes": est.probes,
                "deficit_mean": est.deficit_mean, "deficit_stderr": est.deficit_stderr,
                "scaled": est.scaled, "scaled_stderr": est.scaled_stderr,
                "predicted_limit": limit,
            }
        )
    checks = []
    scaled = [row["scaled"] for row in rows]
    if limit > 0.0:
        errs = [abs(s - limit) for s in scaled]
        dec = all(b < a for a, b in zip(errs, errs[1:]))
        checks.append(Assertion("|scaled - limit| strictly decreasing", dec, errs[-1]))
        rel = errs[-1] / limit
        checks.append(
            Assertion(
                f"final scaled within {rel_tol_final:.0%} of limit {limit:.4f}",
                rel < rel_tol_final, rel,
            )
        )
    else:
        dec = all(b < a for a, b in zip(scaled, scaled[1:]))
        checks.append(Assertion("scaled deficit strictly decreasing toward 0", dec, scaled[-1]))
        checks.append(
            Assertion(
                "final scaled below half the first value",
                scaled[-1] < 0.5 * scaled[0], scaled[-1] / scaled[0],
            )
        )
    return rows, checks


SUITES = {
    "consistency": suite_consistency,
    "lemma2": suite_lemma2,
    "lemma4": suite_lemma4,
    "lemma7": suite_lemma7,
    "lemma18": suite_lemma18,
    "oracle-hull": suite_oracle_hull,
    "sampler-uniformity": suite_sampler_uniformity,
}
