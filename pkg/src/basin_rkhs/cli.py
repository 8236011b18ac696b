"""Command-line front end.

Exit codes: 0 ok, 1 usage or parse error, 2 hypothesis violation (no
attracting fixed point at 0), 3 I/O error, 4 numeric certification failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .dagger import classify
from .dynamics import (
    DEFAULT_BBOX,
    DEFAULT_BUDGET,
    BasinSamplingError,
    analyze_fixed_point,
    render_basin,
    sample_basin,
)
from .kernel import (
    DEFAULT_TAIL_TOL,
    InnerProductError,
    KernelEngine,
    NotInBasinError,
    TailCertificateError,
    functional_equation_residuals,
    gram_matrix,
    kernel_sections,
)
from .onb import (
    CALIBRATION_SAMPLES,
    CUNTZ_DEFECT_THRESHOLD,
    build_basis,
    cuntz_isometry_check,
    dagger_applicability,
    orthonormality_check,
)
from .parsing import PolynomialSyntaxError, parse_polynomial
from .polynomial import Polynomial, format_polynomial
from .presets import PRESETS

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

EXIT_OK, EXIT_USAGE, EXIT_HYPOTHESIS, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3, 4
COMMANDS = ("classify", "basin", "kernel", "onb", "report")
PSD_SLACK = 1e-8
CUNTZ_PAIRS = 10


class UsageError(Exception):
    pass


class HypothesisError(Exception):
    def __init__(self, message: str, payload: dict | None = None):
        super().__init__(message)
        self.payload = payload


@dataclass(frozen=True)
class RunConfig:
    command: str
    polynomial_text: str = ""
    seed: int = 42
    samples: int = 100
    width: int = 512
    height: int = 512
    bbox: tuple[float, float, float, float] = DEFAULT_BBOX
    count: int = 8
    output_path: str | None = None
    tail_tol: float = DEFAULT_TAIL_TOL
    ridge: float | None = None
    budget: int = DEFAULT_BUDGET
    workers: int = 1
    gram_out: str | None = None
    explicit: frozenset = field(default=frozenset(), compare=False)

    @property
    def onb_samples(self) -> int:
        # the defect threshold is calibrated at 400 points
        return self.samples if "samples" in self.explicit else CALIBRATION_SAMPLES


def _parse_bbox(value) -> tuple[float, float, float, float]:
    parts = value.split(",") if isinstance(value, str) else list(value)
    try:
        box = tuple(float(x) for x in parts)
    except (TypeError, ValueError):
        raise UsageError(f"bad --bbox {value!r}; expected re_min,re_max,im_min,im_max") from None
    if len(box) != 4:
        raise UsageError(f"--bbox needs four numbers, got {value!r}")
    return box


_KEYS = {
    "poly": "polynomial_text",
    "seed": "seed",
    "samples": "samples",
    "width": "width",
    "height": "height",
    "bbox": "bbox",
    "count": "count",
    "out": "output_path",
    "tail_tol": "tail_tol",
    "ridge": "ridge",
    "budget": "budget",
    "workers": "workers",
    "gram_out": "gram_out",
}


def build_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the config file, then command-line flags."""
    values: dict = {}
    if args.config:
        try:
            with open(args.config, "rb") as fh:
                raw = tomllib.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        except tomllib.TOMLDecodeError as exc:
            raise UsageError(f"bad config {args.config}: {exc}") from None
        for key, val in raw.items():
            key = key.replace("-", "_")
            if key == "example":
                values["polynomial_text"] = _preset(str(val))
            elif key in _KEYS:
                values[_KEYS[key]] = val
            else:
                raise UsageError(f"unknown config key {key!r}")
    for key, attr in _KEYS.items():
        val = getattr(args, key, None)
        if val is not None:
            values[attr] = val
    if getattr(args, "example", None):
        values["polynomial_text"] = _preset(args.example)
    if "bbox" in values:
        values["bbox"] = _parse_bbox(values["bbox"])
    for name in ("seed", "samples", "width", "height", "count", "budget", "workers"):
        if name in values and not isinstance(values[name], int):
            raise UsageError(f"{name} must be an integer")
    if not values.get("polynomial_text"):
        raise UsageError("a polynomial is required (--poly or --example)")
    explicit = frozenset(k for k, v in values.items() if v is not None)
    cfg = RunConfig(command=args.command, explicit=explicit, **values)
    for name in ("samples", "count", "budget", "workers"):
        if getattr(cfg, name) < 1:
            raise UsageError(f"{name} must be >= 1")
    if cfg.tail_tol <= 0:
        raise UsageError("tail-tol must be positive")
    return cfg


def _preset(key: str) -> str:
    key = key.removeprefix("example").strip()
    if key not in PRESETS:
        raise UsageError(f"unknown example {key!r}; choose from {sorted(PRESETS)}")
    return PRESETS[key]


def write_atomic(path: str | Path, data: bytes) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent if str(path.parent) else ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def dump_json(payload: dict) -> bytes:
    return (json.dumps(payload, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def _emit(cfg: RunConfig, payload: dict) -> None:
    if cfg.output_path:
        write_atomic(cfg.output_path, dump_json(payload))
    else:
        sys.stdout.write(dump_json(payload).decode("utf-8"))


def _polynomial(cfg: RunConfig) -> Polynomial:
    return parse_polynomial(cfg.polynomial_text)


def _require_attracting(p: Polynomial, payload: dict | None = None) -> None:
    fp = analyze_fixed_point(p)
    if not fp.attracting:
        raise HypothesisError(
            f"{format_polynomial(p)} has no attracting fixed point at 0 (|p'(0)| = {fp.derivative_modulus:g}, p(0) = {p.coefficient(0)})",
            payload,
        )


def classify_payload(cfg: RunConfig) -> dict:
    p = _polynomial(cfg)
    report = classify(p, cfg.samples, cfg.seed)
    payload = report.to_json()
    if not report.attracting:
        raise HypothesisError(f"{format_polynomial(p)} has no attracting fixed point at 0", payload)
    return payload


def cmd_classify(cfg: RunConfig) -> int:
    try:
        payload = classify_payload(cfg)
    except HypothesisError as exc:
        _emit(cfg, exc.payload)
        raise
    _emit(cfg, payload)
    return EXIT_OK


def cmd_basin(cfg: RunConfig) -> int:
    p = _polynomial(cfg)
    _require_attracting(p)
    try:
        raster = render_basin(p, cfg.width, cfg.height, cfg.bbox, cfg.budget, cfg.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = cfg.output_path or "basin.pgm"
    data = raster.to_pgm()
    write_atomic(out, data)
    summary = {
        "polynomial": format_polynomial(p),
        "path": str(out),
        "width": raster.width,
        "height": raster.height,
        "bbox": list(raster.bbox),
        "counts": raster.counts(),
        "sha256": hashlib.sha256(data).hexdigest(),
    }
    sys.stdout.write(dump_json(summary).decode("utf-8"))
    return EXIT_OK


def kernel_payload(cfg: RunConfig) -> tuple[dict, object]:
    p = _polynomial(cfg)
    _require_attracting(p)
    engine = KernelEngine(p, tail_tol=cfg.tail_tol)
    points = sample_basin(p, cfg.samples, cfg.seed, budget=cfg.budget)
    gram = gram_matrix(engine, points, cfg.ridge)
    pts = np.asarray(points)
    partner = np.roll(pts, -1)
    residuals = functional_equation_residuals(engine, pts, partner)
    at_zero = kernel_sections(engine, pts, [0j])[:, 0]
    min_eig, max_diag = gram.min_eigenvalue(), gram.max_diagonal()
    payload = {
        "polynomial": format_polynomial(p),
        "points": len(points),
        "seed": cfg.seed,
        "tail_tol": cfg.tail_tol,
        "ridge": gram.ridge,
        "functional_equation_max_residual": float(residuals.max()),
        "kernel_at_zero_max_error": float(np.max(np.abs(at_zero - 1))),
        "min_eigenvalue": min_eig,
        "max_diagonal": max_diag,
        "psd": bool(min_eig >= -PSD_SLACK * max_diag),
        "condition_estimate": gram.condition_estimate(),
    }
    return payload, gram


def cmd_kernel(cfg: RunConfig) -> int:
    payload, gram = kernel_payload(cfg)
    if cfg.gram_out:
        write_atomic(cfg.gram_out, dump_json(gram.to_json()))
    _emit(cfg, payload)
    return EXIT_OK


def onb_payload(cfg: RunConfig) -> tuple[dict, object, list]:
    p = _polynomial(cfg)
    _require_attracting(p)
    engine = KernelEngine(p, tail_tol=cfg.tail_tol)
    basis = build_basis(p, cfg.count)
    applicable = dagger_applicability(p, seed=cfg.seed)
    ortho = orthonormality_check(engine, basis, cfg.onb_samples, cfg.seed, cfg.ridge, applicability=applicable)
    payload = {"polynomial": format_polynomial(p), **ortho.to_json(basis)}
    centres = sample_basin(p, 2 * CUNTZ_PAIRS, cfg.seed + 1)
    pairs = list(zip(centres[:CUNTZ_PAIRS], centres[CUNTZ_PAIRS:]))
    cuntz = cuntz_isometry_check(engine, pairs, cfg.onb_samples, cfg.seed, cfg.ridge)
    payload["cuntz"] = dict(
        cuntz.to_json(),
        threshold=CUNTZ_DEFECT_THRESHOLD,
        within_threshold=bool(cuntz.max_deviation <= CUNTZ_DEFECT_THRESHOLD),
    )
    return payload, ortho, basis


def cmd_onb(cfg: RunConfig) -> int:
    payload, _, _ = onb_payload(cfg)
    _emit(cfg, payload)
    return EXIT_OK


def cmd_report(cfg: RunConfig) -> int:
    from . import plotting

    out = Path(cfg.output_path or "report.json")
    p = _polynomial(cfg)
    _require_attracting(p)
    report = classify(p, cfg.samples, cfg.seed)
    kernel, _ = kernel_payload(cfg)
    onb, ortho, basis = onb_payload(cfg)
    raster = render_basin(p, cfg.width, cfg.height, cfg.bbox, cfg.budget, cfg.workers)
    stem = out.with_suffix("")
    name = format_polynomial(p)
    figures = [
        plotting.plot_basin(raster, f"{stem}_basin.png", title=f"basin of 0: {name}"),
        plotting.plot_scan(report, f"{stem}_scan.png", title="fibre condition deviations"),
        plotting.plot_gram_defect(ortho.gram, [b.closed_form for b in basis], f"{stem}_gram.png", title=f"empirical Gram ({ortho.samples} points)"),
    ]
    payload = {
        "polynomial": name,
        "classify": report.to_json(),
        "kernel": kernel,
        "onb": onb,
        "basin": {"width": raster.width, "height": raster.height, "bbox": list(raster.bbox), "counts": raster.counts()},
        "figures": [str(f) for f in figures],
    }
    write_atomic(out, dump_json(payload))
    return EXIT_OK


HANDLERS = {
    "classify": cmd_classify,
    "basin": cmd_basin,
    "kernel": cmd_kernel,
    "onb": cmd_onb,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--poly", help="polynomial, e.g. '0.5z^3 + 0.75z'")
    common.add_argument("--example", choices=sorted(PRESETS), help="use a built-in worked polynomial")
    common.add_argument("--config", help="TOML file with defaults; flags override it")
    common.add_argument("--seed", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--width", type=int)
    common.add_argument("--height", type=int)
    common.add_argument("--bbox", help="re_min,re_max,im_min,im_max")
    common.add_argument("--count", type=int, help="number of basis functions")
    common.add_argument("--out", help="output path (JSON or PGM)")
    common.add_argument("--tail-tol", dest="tail_tol", type=float)
    common.add_argument("--ridge", type=float)
    common.add_argument("--budget", type=int, help="iteration budget for basin membership")
    common.add_argument("--workers", type=int, help="threads for basin rendering")
    common.add_argument("--gram-out", dest="gram_out", help="kernel: also export the Gram matrix as JSON")

    parser = argparse.ArgumentParser(prog="basin-rkhs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "classify": "coefficient and pointwise fibre-condition report",
        "basin": "render the basin of 0 as a PGM image",
        "kernel": "kernel evaluation, functional equation and PSD checks",
        "onb": "basis functions from operator words and their empirical Gram",
        "report": "classify + kernel + onb in one JSON document, with figures",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = build_config(args)
        return HANDLERS[cfg.command](cfg)
    except (UsageError, PolynomialSyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HypothesisError as exc:
        print(f"hypothesis violated: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except TailCertificateError as exc:
        print(f"numeric certification failed: {exc}", file=sys.stderr)
        partial = np.asarray(exc.partial)
        print(json.dumps({"error": str(exc), "partial_abs_max": float(np.max(np.abs(partial)))}), file=sys.stdout)
        return EXIT_NUMERIC
    except (InnerProductError, BasinSamplingError, NotInBasinError) as exc:
        print(f"numeric certification failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
