"""Command-line harness: declarative experiment configs, seeded runs, CSV
emission, and the verification suites.

Usage overview (see README for details):

    stochgeo deficit --body ball:d=2,r=1 --ns 1000,10000 --trials 100 --seed 7
    stochgeo constants --dmax 10
    stochgeo asa --body ellipsoid:axes=2,1
    stochgeo cap --dmax 8
    stochgeo convolution --body ball:d=2,r=1 --out profile.csv
    stochgeo verify --suite lemma4

Exit codes: 0 on success, 1 if any verify assertion failed, 2 on config or
grammar errors.  All randomness derives from the config seed (flag, config
file, or the STOCHGEO_SEED environment variable).  Output is CSV with
shortest round-trip float formatting, so identical configs produce byte
identical files for any worker count; the config fingerprint covers the
semantic fields only (body, ns, n, trials, probes, seed, suite), not the
execution details (workers, output path).
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .bodies import Ball, ConvexBody, Ellipsoid, load_hpolytope, make_standard_simplex, make_unit_box
from .convolution import covariogram, symmetry_point
from .estimator import convergence_table, predicted_limit
from .sampling import StreamKey
from .specialfn import affine_surface_area, c_d
from .verify import SUITES, constants_rows, suite_theorem1_trend

DEFAULT_SEED_ENV = "STOCHGEO_SEED"

_CONFIG_KEYS = ("body", "ns", "n", "trials", "probes", "seed", "suite")


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one run; parses round-trip to itself."""

    body: str = ""
    ns: tuple[int, ...] = field(default_factory=tuple)
    n: int = 0
    trials: int = 100
    probes: int = 100_000
    seed: int = 0
    suite: str = ""

    def canonical_text(self) -> str:
        lines = []
        for key in _CONFIG_KEYS:
            val = getattr(self, key)
            if key == "ns":
                val = ",".join(str(v) for v in val)
            lines.append(f"{key} = {val}")
        return "\n".join(lines) + "\n"

    def fingerprint(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()[:12]

    @staticmethod
    def from_mapping(m: dict) -> "ExperimentConfig":
        ns = m.get("ns", ())
        if isinstance(ns, str):
            ns = tuple(int(p) for p in ns.split(",") if p.strip())
        return ExperimentConfig(
            body=str(m.get("body", "")),
            ns=tuple(int(v) for v in ns),
            n=int(m.get("n", 0)),
            trials=int(m.get("trials", 100)),
            probes=int(m.get("probes", 100_000)),
            seed=int(m.get("seed", 0)),
            suite=str(m.get("suite", "")),
        )


def parse_config_file(path: str) -> dict:
    """Flat "key = value" config text; unknown keys are rejected."""
    out: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in _CONFIG_KEYS + ("out", "workers", "crn", "dmax"):
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            out[key] = val.strip()
    return out


def parse_body_spec(spec: str) -> ConvexBody:
    """Body grammar: ball:d=<int>,r=<real> | ellipsoid:axes=<real,...> |
    box:d=<int> | simplex:d=<int> | hpoly:file=<path>."""
    spec = spec.strip()
    kind, sep, rest = spec.partition(":")
    if not sep:
        raise ValueError(f"body spec {spec!r}: missing ':' after kind (position {len(kind)})")
    params: dict[str, str] = {}
    pos = len(kind) + 1
    if kind == "ellipsoid":
        key, _, val = rest.partition("=")
        if key != "axes":
            raise ValueError(f"body spec {spec!r}: expected 'axes=' at position {pos}")
        params["axes"] = val
    else:
        for part in rest.split(","):
            if not part:
                continue
            key, sep2, val = part.partition("=")
            if not sep2:
                raise ValueError(
                    f"body spec {spec!r}: expected key=value at position {spec.find(part)}"
                )
            params[key.strip()] = val.strip()
    try:
        if kind == "ball":
            d = int(params.pop("d"))
            r = float(params.pop("r", 1.0))
            _reject_extra(spec, params)
            return Ball(np.zeros(d), r)
        if kind == "ellipsoid":
            axes = [float(a) for a in params.pop("axes").split(",") if a.strip()]
            _reject_extra(spec, params)
            if len(axes) < 2:
                raise ValueError("need at least two axes")
            shape = np.diag([1.0 / (a * a) for a in axes])
            return Ellipsoid(np.zeros(len(axes)), shape)
        if kind == "box":
            d = int(params.pop("d"))
            _reject_extra(spec, params)
            return make_unit_box(d)
        if kind == "simplex":
            d = int(params.pop("d"))
            _reject_extra(spec, params)
            return make_standard_simplex(d)
        if kind == "hpoly":
            path = params.pop("file")
            _reject_extra(spec, params)
            return load_hpolytope(path)
    except KeyError as exc:
        raise ValueError(f"body spec {spec!r}: missing parameter {exc}") from None
    except (ValueError, OSError) as exc:
        raise ValueError(f"body spec {spec!r}: {exc}") from None
    raise ValueError(f"body spec {spec!r}: unknown kind {kind!r} (position 0)")


def _reject_extra(spec: str, params: dict) -> None:
    if params:
        raise ValueError(f"unexpected parameters {sorted(params)}")


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (np.floating,)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def write_csv(rows: list[dict], out_path: str | None) -> None:
    if not rows:
        text = ""
    else:
        header = list(rows[0].keys())
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(_fmt(row[k]) for k in header))
        text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _tag_rows(rows: list[dict], config: ExperimentConfig) -> list[dict]:
    fp = config.fingerprint()
    return [{**row, "seed": config.seed, "fingerprint": fp} for row in rows]


def _cmd_deficit(body: ConvexBody, config: ExperimentConfig, workers: int, crn: bool) -> list[dict]:
    ns = config.ns if config.ns else ((config.n,) if config.n else ())
    if not ns:
        raise ValueError("deficit requires --ns or --n")
    stream = StreamKey(seed=config.seed, path=())
    table = convergence_table(body, ns, config.trials, config.probes, stream,
                              workers=workers, crn=crn)
    limit = predicted_limit(body)
    rows = []
    for est in table:
        rows.append(
            {
                "body_id": config.body, "d": body.dim, "n": est.n,
                "trials": est.trials, "probes": est.probes,
                "deficit_mean": est.deficit_mean, "deficit_stderr": est.deficit_stderr,
                "scaled": est.scaled, "scaled_stderr": est.scaled_stderr,
                "predicted_limit": limit,
            }
        )
    return rows


def _cmd_asa(body: ConvexBody, config: ExperimentConfig) -> list[dict]:
    return [
        {
            "body_id": config.body, "d": body.dim,
            "affine_surface_area": affine_surface_area(body),
            "c_d": c_d(body.dim), "predicted_limit": predicted_limit(body),
        }
    ]


def _cmd_convolution(body: ConvexBody, config: ExperimentConfig) -> list[dict]:
    stream = StreamKey(seed=config.seed, path=())
    m, big_t = symmetry_point(body)
    u = np.zeros(body.dim)
    u[0] = 1.0
    sp = body.ray_boundary(m, u)
    reach = float(np.linalg.norm(sp.x - m))
    rows = []
    for k in range(51):
        rho = reach * k / 50
        g, se = covariogram(body, m + rho * u, probes=config.probes, stream=stream.substream(k))
        rows.append({"body_id": config.body, "rho": rho, "g": g, "g_stderr": se, "T": big_t})
    return rows


def _cmd_verify(body_spec: str, config: ExperimentConfig, workers: int) -> tuple[list[dict], bool]:
    suite = config.suite
    if suite == "theorem1-trend":
        body = parse_body_spec(body_spec if body_spec else "ball:d=2,r=1")
        ns = config.ns if config.ns else (1_000, 10_000, 100_000)
        rows, checks = suite_theorem1_trend(
            body, ns=ns, trials=config.trials, probes=config.probes,
            stream=StreamKey(seed=config.seed, path=()), workers=workers,
        )
    elif suite in SUITES:
        fn = SUITES[suite]
        if suite in ("lemma7", "oracle-hull", "sampler-uniformity"):
            rows, checks = fn(stream=StreamKey(seed=config.seed, path=()))
        else:
            rows, checks = fn()
    else:
        raise ValueError(
            f"unknown suite {suite!r}; available: theorem1-trend, "
            + ", ".join(sorted(SUITES))
        )
    ok = True
    for check in checks:
        status = "PASS" if check.passed else "FAIL"
        detail = f" [{check.detail}]" if check.detail else ""
        print(f"{status} {check.name} (value={check.value:.6g}){detail}")
        ok = ok and check.passed
    return rows, ok


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stochgeo", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("deficit", "constants", "asa", "cap", "convolution", "verify"):
        p = sub.add_parser(name)
        p.add_argument("--body", type=str, default="")
        p.add_argument("--ns", type=str, default="")
        p.add_argument("--n", type=int, default=0)
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--probes", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--out", type=str, default="")
        p.add_argument("--suite", type=str, default="")
        p.add_argument("--dmax", type=int, default=None)
        p.add_argument("--crn", action="store_true")
        p.add_argument("--config", type=str, default="")
    return parser


def run(args: argparse.Namespace) -> int:
    file_cfg = parse_config_file(args.config) if args.config else {}
    merged = dict(file_cfg)
    if args.body:
        merged["body"] = args.body
    if args.ns:
        merged["ns"] = args.ns
    if args.n:
        merged["n"] = args.n
    if args.trials is not None:
        merged["trials"] = args.trials
    if args.probes is not None:
        merged["probes"] = args.probes
    if args.suite:
        merged["suite"] = args.suite
    if args.seed is not None:
        merged["seed"] = args.seed
    elif "seed" not in merged:
        merged["seed"] = int(os.environ.get(DEFAULT_SEED_ENV, "0"))
    config = ExperimentConfig.from_mapping(merged)
    out_path = args.out or merged.get("out", "") or None
    workers = args.workers if args.workers else int(merged.get("workers", 1))
    dmax = args.dmax if args.dmax is not None else int(merged.get("dmax", 10))

    if args.command == "deficit":
        body = parse_body_spec(config.body)
        rows = _cmd_deficit(body, config, workers, args.crn or merged.get("crn") == "true")
    elif args.command == "constants":
        rows = constants_rows(dmax)
    elif args.command == "asa":
        rows = _cmd_asa(parse_body_spec(config.body), config)
    elif args.command == "cap":
        from .verify import suite_lemma4

        rows, _ = suite_lemma4(dmax=dmax)
    elif args.command == "convolution":
        rows = _cmd_convolution(parse_body_spec(config.body), config)
    elif args.command == "verify":
        if not config.suite:
            raise ValueError("verify requires --suite")
        rows, ok = _cmd_verify(config.body, config, workers)
        write_csv(_tag_rows(rows, config), out_path)
        return 0 if ok else 1
    else:  # pragma: no cover - argparse enforces the choices
        raise ValueError(f"unknown command {args.command!r}")

    write_csv(_tag_rows(rows, config), out_path)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
