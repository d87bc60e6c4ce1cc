"""Command-line interface.

Exit codes: 0 success, 1 a verification check failed, 2 usage or regime error.
All configuration comes from flags; nothing is read from the environment.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cones import cone_constants, condition_iv_n0
from .core import MapParams, iter_orbit
from .errors import ParameterError
from .measure import attractor_histogram
from .partition import forward_image_polygons, partition_polygons
from .render import encode, histogram_image, polygons_image
from .verify import verification_suite

POLYGON_SCHEMA = "memtent.polygons/1"


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    alpha: float
    seed: int = 0
    iters: int = 100_000
    burn_in: int = 1_000
    starts: int = 64
    resolution: int = 1024
    depth: int = 64
    n: int = 6
    out_path: Optional[str] = None
    format: Optional[str] = None
    x0: Optional[float] = None
    y0: Optional[float] = None
    forward: bool = False
    regimes: bool = False
    workers: int = 1
    scale: str = "full"
    dump: Optional[str] = None

    FORMATS = {
        "constants": ("json",),
        "orbit": ("csv", "json"),
        "attractor": ("ppm", "png"),
        "partition": ("ppm", "png", "json"),
        "verify": ("json",),
    }

    def validate(self) -> None:
        if not (isinstance(self.alpha, float) and math.isfinite(self.alpha)) or not 0.0 < self.alpha < 1.0:
            raise UsageError(f"alpha must lie in (0,1), got {self.alpha}")
        if not 0 <= self.seed < 2 ** 64:
            raise UsageError("seed must be a 64-bit unsigned integer")
        for name in ("iters", "burn_in", "starts", "depth", "n"):
            if getattr(self, name) < 0:
                raise UsageError(f"--{name.replace('_in', '')} must be non-negative")
        if self.workers < 1:
            raise UsageError("--workers must be >= 1")
        allowed = self.FORMATS[self.command]
        if self.format is None:
            self.format = allowed[0]
        if self.format not in allowed:
            raise UsageError(f"{self.command} supports --format {', '.join(allowed)}")
        if (self.x0 is None) != (self.y0 is None):
            raise UsageError("--x0 and --y0 go together")
        if self.x0 is not None and not (0.0 <= self.x0 <= 1.0 and 0.0 <= self.y0 <= 1.0):
            raise UsageError("start point must lie in the unit square")
        if self.command == "constants":
            MapParams(self.alpha)  # raises RegimeError outside (3/4, 1)
        if self.command == "attractor" and self.resolution < 16:
            raise UsageError("--res must be >= 16")
        if self.command == "partition":
            if self.resolution < 1:
                raise UsageError("--res must be positive")
            if self.n < (0 if self.forward else 1):
                raise UsageError("--n must be >= 1 for the defining partition")
        if self.command == "constants" or self.command == "verify":
            return
        if self.out_path is None and self.format in ("ppm", "png"):
            raise UsageError(f"{self.command} writes an image and needs --out")


def _emit(data: bytes | str, out_path: Optional[str]) -> None:
    if isinstance(data, str):
        data = data.encode("utf-8")
    if out_path is None or out_path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        with open(out_path, "wb") as fh:
            fh.write(data)


def cmd_constants(cfg: RunConfig) -> int:
    params = MapParams(cfg.alpha)
    cc = cone_constants(params)
    out = cc.to_json()
    out["n0"] = condition_iv_n0(cc)
    _emit(json.dumps(out, indent=2, sort_keys=True) + "\n", cfg.out_path)
    return 0


def cmd_orbit(cfg: RunConfig) -> int:
    params = MapParams(cfg.alpha, strict=False)
    p0 = (cfg.x0 if cfg.x0 is not None else 0.1, cfg.y0 if cfg.y0 is not None else 0.2)
    rows = [(k, p.x, p.y, s) for k, (p, s) in enumerate(iter_orbit(p0, cfg.iters, params), start=1)]
    if cfg.format == "json":
        text = json.dumps({"alpha": cfg.alpha, "start": list(p0),
                           "rows": [{"k": k, "x": x, "y": y, "symbol": s} for k, x, y, s in rows]}) + "\n"
    else:
        text = "k,x,y,symbol\n" + "".join(f"{k},{x!r},{y!r},{s}\n" for k, x, y, s in rows)
    _emit(text, cfg.out_path)
    return 0


def cmd_attractor(cfg: RunConfig) -> int:
    params = MapParams(cfg.alpha, strict=False)
    points = None if cfg.x0 is None else np.array([[cfg.x0, cfg.y0]])
    hist = attractor_histogram(cfg.starts, cfg.iters, cfg.burn_in, cfg.resolution, cfg.seed, params,
                               points=points, workers=cfg.workers)
    _emit(encode(histogram_image(hist), cfg.format), cfg.out_path)
    if cfg.dump:
        with open(cfg.dump, "wb") as fh:
            fh.write(hist.to_bytes())
    print(f"occupied fraction {hist.occupied_fraction:.6g} at res {cfg.resolution}", file=sys.stderr)
    return 0


def polygons_json(polys, n: int, alpha: float, forward: bool) -> dict:
    return {
        "schema": POLYGON_SCHEMA,
        "alpha": alpha,
        "n": n,
        "kind": "forward-images" if forward else "defining-partition",
        "total_area": float(sum(p.area for p in polys)),
        "polygons": [p.to_json() for p in polys],
    }


def cmd_partition(cfg: RunConfig) -> int:
    params = MapParams(cfg.alpha, strict=False)
    polys = forward_image_polygons(cfg.n, params).polygons if cfg.forward else partition_polygons(cfg.n, params)
    if cfg.format == "json":
        _emit(json.dumps(polygons_json(polys, cfg.n, cfg.alpha, cfg.forward)) + "\n", cfg.out_path)
    else:
        _emit(encode(polygons_image(polys, cfg.resolution), cfg.format), cfg.out_path)
    print(f"{len(polys)} polygons", file=sys.stderr)
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    params = MapParams(cfg.alpha, strict=False)
    report = verification_suite(params, cfg.seed, scale=cfg.scale, include_regimes=cfg.regimes,
                                workers=cfg.workers)
    _emit(report.dumps(), cfg.out_path)
    for c in report.checks:
        status = "skip" if c.skipped else ("pass" if c.passed else "FAIL")
        print(f"{status:4s} {c.name}" + (f" ({c.reason})" if c.reason else ""), file=sys.stderr)
    return 0 if report.passed else 1


COMMANDS = {
    "constants": cmd_constants,
    "orbit": cmd_orbit,
    "attractor": cmd_attractor,
    "partition": cmd_partition,
    "verify": cmd_verify,
}


def _alpha(text: str) -> float:
    try:
        a = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed alpha {text!r}") from None
    if not math.isfinite(a):
        raise argparse.ArgumentTypeError(f"malformed alpha {text!r}")
    return a


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="memtent", description="Tent map with memory: dynamics and SRB estimates.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=_alpha, default=0.82)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", dest="out_path", default=None, help="output path (default: stdout)")
    common.add_argument("--format", default=None)
    common.add_argument("--workers", type=int, default=1)

    sub.add_parser("constants", parents=[common], help="cone constants as JSON")

    p = sub.add_parser("orbit", parents=[common], help="orbit rows k,x,y,symbol")
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--x0", type=float)
    p.add_argument("--y0", type=float)

    p = sub.add_parser("attractor", parents=[common], help="attractor histogram image")
    p.add_argument("--iters", type=int, default=100_000)
    p.add_argument("--burn", dest="burn_in", type=int, default=1_000)
    p.add_argument("--starts", type=int, default=64)
    p.add_argument("--res", dest="resolution", type=int, default=1024)
    p.add_argument("--x0", type=float, help="single start instead of random starts")
    p.add_argument("--y0", type=float)
    p.add_argument("--dump", help="also write the histogram counts to this file")

    p = sub.add_parser("partition", parents=[common], help="partition or image polygons")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--res", dest="resolution", type=int, default=1024)
    p.add_argument("--forward", action="store_true", help="draw G^n of the square instead of the partition")

    p = sub.add_parser("verify", parents=[common], help="run the verification suite")
    p.add_argument("--regimes", action="store_true", help="also run the non-hyperbolic regime regressions")
    p.add_argument("--quick", dest="scale", action="store_const", const="quick", default="full",
                   help="smaller sample sizes")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = RunConfig(**{k: v for k, v in vars(args).items()})
    try:
        cfg.validate()
    except (UsageError, ParameterError) as exc:
        print(f"memtent: error: {exc}", file=sys.stderr)
        return 2
    return COMMANDS[cfg.command](cfg)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
