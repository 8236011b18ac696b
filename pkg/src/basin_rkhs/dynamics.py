"""Attracting fixed point at 0, basin membership and basin rasters."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .polynomial import Polynomial, escape_radius, evaluate

Q_MAX = 0.95
DEFAULT_BUDGET = 512
DEFAULT_BBOX = (-2.0, 2.0, -2.0, 2.0)
DEFAULT_SIZE = 512
# contraction disk for degree-1 maps is all of C; cap it for reporting
LINEAR_RADIUS_CAP = 1e6
BISECTION_STEPS = 80

PGM_VALUES = {"in_basin": 255, "escaped": 0, "undecided": 128}


class Verdict(str, Enum):
    IN_BASIN = "in_basin"
    ESCAPED = "escaped"
    UNDECIDED = "undecided"


# integer codes used inside rasters
_CODE = {Verdict.ESCAPED: 0, Verdict.IN_BASIN: 1, Verdict.UNDECIDED: 2}
_FROM_CODE = {v: k for k, v in _CODE.items()}


class BasinError(ValueError):
    """Raised when a polynomial lacks the attracting fixed point at 0."""


class BasinSamplingError(RuntimeError):
    pass


@dataclass(frozen=True)
class FixedPointReport:
    derivative_modulus: float
    fixes_zero: bool
    attracting: bool
    contraction_radius: float
    contraction_factor: float
    escape_radius: float


def contraction_bound(p: Polynomial, r: float) -> float:
    """``|a_1| + sum_{k>=2} |a_k| r^(k-1)``, the Lipschitz bound of p/z on |z| <= r."""
    return abs(p.coefficient(1)) + sum(abs(p.coeffs[k]) * r ** (k - 1) for k in range(2, p.degree + 1))


def analyze_fixed_point(p: Polynomial) -> FixedPointReport:
    fixes_zero = p.coefficient(0) == 0
    slope = abs(p.coefficient(1))
    attracting = fixes_zero and slope < 1
    r_esc = escape_radius(p)
    if not attracting:
        return FixedPointReport(slope, fixes_zero, False, 0.0, 0.0, r_esc)
    # |a_1| may sit above Q_MAX; keep the target strictly between |a_1| and 1
    q_target = Q_MAX if slope < Q_MAX else (1 + slope) / 2
    hi = LINEAR_RADIUS_CAP if p.degree < 2 else r_esc
    if contraction_bound(p, hi) <= q_target:
        lo = hi
    else:
        lo = 0.0
        for _ in range(BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            if contraction_bound(p, mid) <= q_target:
                lo = mid
            else:
                hi = mid
    return FixedPointReport(slope, True, True, lo, contraction_bound(p, lo), r_esc)


@dataclass(frozen=True)
class PointClass:
    verdict: Verdict
    iterations_used: int
    final_modulus: float
    trace: tuple[complex, ...] = ()


def _require_attracting(p: Polynomial, report: FixedPointReport | None) -> FixedPointReport:
    report = report or analyze_fixed_point(p)
    if not report.attracting:
        raise BasinError(f"{p} has no attracting fixed point at 0")
    return report


def classify_point(
    p: Polynomial,
    z: complex,
    budget: int = DEFAULT_BUDGET,
    report: FixedPointReport | None = None,
    trace: bool = False,
) -> PointClass:
    """Iterate ``p`` from ``z`` until the orbit enters the contraction disk or escapes."""
    report = _require_attracting(p, report)
    z = complex(z)
    orbit = [z] if trace else None
    for n in range(budget + 1):
        m = abs(z)
        if m <= report.contraction_radius:
            return PointClass(Verdict.IN_BASIN, n, m, tuple(orbit or ()))
        if m > report.escape_radius or not math.isfinite(m):
            return PointClass(Verdict.ESCAPED, n, m, tuple(orbit or ()))
        if n == budget:
            break
        z = evaluate(p, z)
        if orbit is not None:
            orbit.append(z)
    return PointClass(Verdict.UNDECIDED, budget, abs(z), tuple(orbit or ()))


def classify_array(
    p: Polynomial, z: np.ndarray, budget: int = DEFAULT_BUDGET, report: FixedPointReport | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`classify_point`: returns (codes, iterations) arrays."""
    report = _require_attracting(p, report)
    z = np.array(z, dtype=complex)
    codes = np.full(z.shape, _CODE[Verdict.UNDECIDED], dtype=np.uint8)
    iters = np.full(z.shape, budget, dtype=np.int32)
    active = np.ones(z.shape, dtype=bool)
    for n in range(budget + 1):
        m = np.abs(z)
        inside = active & (m <= report.contraction_radius)
        out = active & ~inside & ((m > report.escape_radius) | ~np.isfinite(m))
        codes[inside] = _CODE[Verdict.IN_BASIN]
        codes[out] = _CODE[Verdict.ESCAPED]
        iters[inside | out] = n
        active &= ~(inside | out)
        if n == budget or not active.any():
            break
        z[active] = evaluate(p, z[active])
    return codes, iters


@dataclass(frozen=True)
class BasinRaster:
    """Grid of verdicts at pixel centres; row 0 is the top (``im_max``) row."""

    width: int
    height: int
    bbox: tuple[float, float, float, float]
    codes: np.ndarray = field(repr=False)
    iterations: np.ndarray = field(repr=False)

    def verdict(self, row: int, col: int) -> Verdict:
        return _FROM_CODE[int(self.codes[row, col])]

    def counts(self) -> dict[str, int]:
        return {v.value: int(np.count_nonzero(self.codes == _CODE[v])) for v in Verdict}

    def to_pgm(self) -> bytes:
        lut = np.zeros(3, dtype=np.uint8)
        for v, code in _CODE.items():
            lut[code] = PGM_VALUES[v.value]
        header = f"P5\n{self.width} {self.height}\n255\n".encode("ascii")
        return header + lut[self.codes].tobytes()

    def write_pgm(self, path: str | Path) -> None:
        Path(path).write_bytes(self.to_pgm())


def pixel_centers(width: int, height: int, bbox: tuple[float, float, float, float]) -> np.ndarray:
    re_min, re_max, im_min, im_max = bbox
    dx = (re_max - re_min) / width
    dy = (im_max - im_min) / height
    re = re_min + (np.arange(width) + 0.5) * dx
    im = im_max - (np.arange(height) + 0.5) * dy
    return re[None, :] + 1j * im[:, None]


def validate_raster(width: int, height: int, bbox) -> tuple[float, float, float, float]:
    if width <= 0 or height <= 0:
        raise ValueError(f"raster dimensions must be positive, got {width}x{height}")
    bbox = tuple(float(b) for b in bbox)
    if len(bbox) != 4 or not (bbox[0] < bbox[1] and bbox[2] < bbox[3]):
        raise ValueError(f"degenerate bounding box {bbox}")
    return bbox


def render_basin(
    p: Polynomial,
    width: int = DEFAULT_SIZE,
    height: int = DEFAULT_SIZE,
    bbox=DEFAULT_BBOX,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
) -> BasinRaster:
    """Classify every pixel centre. Rows are split into bands when ``workers > 1``;
    pixels are independent, so the result does not depend on the split."""
    bbox = validate_raster(width, height, bbox)
    report = _require_attracting(p, None)
    grid = pixel_centers(width, height, bbox)
    codes = np.empty(grid.shape, dtype=np.uint8)
    iters = np.empty(grid.shape, dtype=np.int32)

    def band(rows: slice):
        codes[rows], iters[rows] = classify_array(p, grid[rows], budget, report)

    step = max(1, math.ceil(height / max(1, workers)))
    bands = [slice(i, min(i + step, height)) for i in range(0, height, step)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(band, bands))
    else:
        for rows in bands:
            band(rows)
    return BasinRaster(width, height, bbox, codes, iters)


def sample_basin(
    p: Polynomial,
    count: int,
    seed: int = 42,
    bbox=DEFAULT_BBOX,
    budget: int = DEFAULT_BUDGET,
    max_attempts: int | None = None,
) -> list[complex]:
    """``count`` in-basin points: 0 first, then seeded uniform rejection draws over ``bbox``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    bbox = validate_raster(1, 1, bbox)
    report = _require_attracting(p, None)
    rng = np.random.default_rng(seed)
    max_attempts = max_attempts if max_attempts is not None else 1000 * count
    points = [0j]
    attempts = 0
    while len(points) < count:
        if attempts >= max_attempts:
            raise BasinSamplingError(
                f"found {len(points)} of {count} basin points after {attempts} draws; basin too thin in {bbox}"
            )
        attempts += 1
        z = complex(rng.uniform(bbox[0], bbox[1]), rng.uniform(bbox[2], bbox[3]))
        if classify_point(p, z, budget, report).verdict is Verdict.IN_BASIN:
            points.append(z)
    return points


def orbit(p: Polynomial, z: complex, steps: int) -> list[complex]:
    out = [complex(z)]
    for _ in range(steps):
        out.append(evaluate(p, out[-1]))
    return out
