"""Infinite-product kernel ``K(z, w) = prod_n (1 + p^n(z) conj(p^n(w)))`` on the basin of 0.

Truncation is certified: once both orbits sit in the contraction disk their
moduli shrink at least geometrically with ratio ``q``, so the neglected factors
satisfy ``|log prod| <= t / (1 - q^2)`` with ``t = |p^N(z)| |p^N(w)|``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from .dynamics import FixedPointReport, analyze_fixed_point
from .polynomial import Polynomial, evaluate

DEFAULT_TAIL_TOL = 1e-10
DEFAULT_MAX_DEPTH = 10_000
RIDGE_FACTOR = 1e-10


class TailCertificateError(RuntimeError):
    """``max_depth`` was reached before the tail bound dropped below tolerance."""

    def __init__(self, message: str, partial):
        super().__init__(message)
        self.partial = partial


class NotInBasinError(ValueError):
    pass


class InnerProductError(np.linalg.LinAlgError):
    def __init__(self, message: str, condition: float):
        super().__init__(f"{message} (condition estimate {condition:.3e})")
        self.condition = condition


@dataclass(frozen=True)
class KernelValue:
    value: complex
    depth: int


@dataclass(frozen=True)
class KernelEngine:
    polynomial: Polynomial
    tail_tol: float = DEFAULT_TAIL_TOL
    max_depth: int = DEFAULT_MAX_DEPTH
    contraction: FixedPointReport = field(init=False, repr=False)

    def __post_init__(self):
        if self.tail_tol <= 0:
            raise ValueError("tail_tol must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        report = analyze_fixed_point(self.polynomial)
        if not report.attracting:
            raise NotInBasinError(f"{self.polynomial} has no attracting fixed point at 0")
        object.__setattr__(self, "contraction", report)

    def _tail_ok(self, mz: np.ndarray, mw: np.ndarray) -> np.ndarray:
        r = self.contraction.contraction_radius
        inside = (mz <= r) & (mw <= r)
        s = np.minimum(np.maximum(mz, mw), r)
        # the factor bound only improves as the orbits shrink, so the local value is valid for the tail
        q = np.minimum(self.contraction.contraction_factor, _bound_array(self.polynomial, s))
        t = mz * mw
        with np.errstate(divide="ignore", invalid="ignore"):
            bound = t / (1.0 - q * q)
        return inside & (np.expm1(bound) < self.tail_tol)

    def block(self, zs: Sequence[complex], ws: Sequence[complex]) -> tuple[np.ndarray, np.ndarray]:
        """``K(z_i, w_j)`` for all pairs, with per-pair truncation depths."""
        z = np.array(zs, dtype=complex).ravel()
        w = np.array(ws, dtype=complex).ravel()
        vals = np.ones((z.size, w.size), dtype=complex)
        depth = np.zeros((z.size, w.size), dtype=np.int64)
        active = np.ones((z.size, w.size), dtype=bool)
        r_esc = self.contraction.escape_radius
        for n in range(self.max_depth + 1):
            mz, mw = np.abs(z), np.abs(w)
            if np.any(mz > r_esc) or np.any(mw > r_esc):
                raise NotInBasinError("an orbit left the escape disk; point is not in the basin")
            done = active & self._tail_ok(mz[:, None], mw[None, :])
            depth[done] = n
            active &= ~done
            if not active.any():
                return vals, depth
            if n == self.max_depth:
                break
            factor = 1.0 + z[:, None] * np.conj(w)[None, :]
            vals[active] *= factor[active]
            rows, cols = active.any(axis=1), active.any(axis=0)
            z[rows] = evaluate(self.polynomial, z[rows])
            w[cols] = evaluate(self.polynomial, w[cols])
        raise TailCertificateError(
            f"tail certificate not reached within max_depth={self.max_depth}", vals
        )


def _bound_array(p: Polynomial, s: np.ndarray) -> np.ndarray:
    out = np.full(np.shape(s), abs(p.coefficient(1)), dtype=float)
    for k in range(2, p.degree + 1):
        out = out + abs(p.coeffs[k]) * s ** (k - 1)
    return out


def kernel_eval(engine: KernelEngine, z: complex, w: complex) -> KernelValue:
    vals, depth = engine.block([z], [w])
    return KernelValue(complex(vals[0, 0]), int(depth[0, 0]))


def functional_equation_check(engine: KernelEngine, z: complex, w: complex) -> float:
    """``|K(z, w) - (1 + z conj(w)) K(p(z), p(w))|``."""
    p = engine.polynomial
    lhs = kernel_eval(engine, z, w).value
    rhs = (1 + complex(z) * complex(w).conjugate()) * kernel_eval(engine, evaluate(p, complex(z)), evaluate(p, complex(w))).value
    return abs(lhs - rhs)


def functional_equation_residuals(engine: KernelEngine, zs: Sequence[complex], ws: Sequence[complex]) -> np.ndarray:
    """Elementwise residuals for paired points ``(zs[k], ws[k])``."""
    z = np.asarray(zs, dtype=complex)
    w = np.asarray(ws, dtype=complex)
    out = np.empty(z.size)
    for k in range(z.size):
        out[k] = functional_equation_check(engine, z[k], w[k])
    return out


@dataclass(frozen=True)
class GramMatrix:
    points: np.ndarray
    entries: np.ndarray = field(repr=False)
    ridge: float = 0.0

    @property
    def size(self) -> int:
        return len(self.points)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])

    def max_diagonal(self) -> float:
        return float(np.max(self.entries.diagonal().real))

    def condition_estimate(self) -> float:
        ev = np.clip(np.linalg.eigvalsh(self.entries), 0.0, None) + self.ridge
        return float(ev[-1] / ev[0]) if ev[0] > 0 else math.inf

    @cached_property
    def _spectral(self) -> tuple[np.ndarray, np.ndarray]:
        # rounding leaves eigenvalues slightly below zero; clip them before adding the ridge
        ev, vec = np.linalg.eigh(self.entries)
        shifted = np.clip(ev, 0.0, None) + self.ridge
        if not np.all(shifted > 0):
            raise InnerProductError("Gram matrix is singular and no ridge was given", self.condition_estimate())
        return 1.0 / np.sqrt(shifted), vec

    def whiten(self, values) -> np.ndarray:
        """``W v`` with ``W^* W = (G_+ + ridge I)^{-1}``, ``G_+`` the PSD part of ``G``."""
        scale, vec = self._spectral
        v = np.asarray(values, dtype=complex)
        y = (vec.conj().T @ v) * (scale if v.ndim == 1 else scale[:, None])
        if not np.all(np.isfinite(y)):
            raise InnerProductError("whitening produced non-finite values", self.condition_estimate())
        return y

    def to_json(self) -> dict:
        return {
            "points": [[z.real, z.imag] for z in self.points],
            "entries_re": self.entries.real.tolist(),
            "entries_im": self.entries.imag.tolist(),
            "ridge": self.ridge,
        }

    def write_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json()))


def default_ridge(entries: np.ndarray) -> float:
    return RIDGE_FACTOR * float(np.trace(entries).real) / len(entries)


def gram_matrix(engine: KernelEngine, points: Sequence[complex], ridge: float | None = None) -> GramMatrix:
    """Gram matrix ``G[i, j] = K(z_i, z_j)``; the lower triangle mirrors the upper one."""
    pts = np.array(points, dtype=complex).ravel()
    vals, _ = engine.block(pts, pts)
    upper = np.triu(vals, 1)
    entries = upper + upper.conj().T + np.diag(vals.diagonal().real)
    if ridge is None:
        ridge = default_ridge(entries)
    return GramMatrix(pts, entries, float(ridge))


def empirical_inner_product(gram: GramMatrix, f_values, g_values) -> complex:
    """``g^* (G + ridge I)^{-1} f``: linear in ``f``, conjugate-linear in ``g``."""
    yf = gram.whiten(f_values)
    yg = gram.whiten(g_values)
    return complex(np.vdot(yg, yf))


def empirical_gram(gram: GramMatrix, value_vectors) -> np.ndarray:
    """Matrix of empirical inner products ``E[i, j] = <v_j, v_i>`` for columns ``v``."""
    y = gram.whiten(np.asarray(value_vectors, dtype=complex))
    return y.conj().T @ y


def kernel_sections(engine: KernelEngine, points: Sequence[complex], centres: Sequence[complex]) -> np.ndarray:
    """Columns ``K(., w_k)`` evaluated at ``points``."""
    vals, _ = engine.block(points, centres)
    return vals

