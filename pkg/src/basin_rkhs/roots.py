"""Simultaneous root finding for ``p(zeta) = shift``.

Aberth-Ehrlich iteration is the primary method, Durand-Kerner the first
fallback and companion-matrix eigenvalues the independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .polynomial import Polynomial, derivative

MAX_ITERATIONS = 500
ROOT_TOL = 1e-10
CLUSTER_RADIUS = 1e-6
INITIAL_ANGLE = 0.4


class RootFindingError(RuntimeError):
    pass


@dataclass(frozen=True)
class RootSet:
    """Roots of ``p(zeta) - shift`` repeated by multiplicity."""

    roots: tuple[complex, ...]
    residual: float
    method: Literal["iterative", "companion-oracle"]
    shift: complex = 0j

    def __len__(self) -> int:
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)

    def as_array(self) -> np.ndarray:
        return np.array(self.roots, dtype=complex)


def _monic(p: Polynomial, shift: complex) -> np.ndarray:
    cs = np.array(p.coeffs, dtype=complex)
    cs[0] -= shift
    return cs / cs[-1]


def _initial_guesses(monic: np.ndarray) -> np.ndarray:
    n = len(monic) - 1
    radius = 1.0 + np.max(np.abs(monic[:-1]))
    return radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + INITIAL_ANGLE))


def _horner_with_derivative(monic: np.ndarray, z: np.ndarray):
    p = np.ones_like(z)
    dp = np.zeros_like(z)
    for c in monic[-2::-1]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _converged(step: np.ndarray, z: np.ndarray) -> bool:
    return bool(np.all(np.abs(step) <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(z))))


def aberth(monic: np.ndarray, max_iter: int = MAX_ITERATIONS) -> np.ndarray | None:
    """Aberth-Ehrlich iteration on a monic coefficient vector (low order first)."""
    z = _initial_guesses(monic)
    n = len(z)
    off = ~np.eye(n, dtype=bool)
    for _ in range(max_iter):
        p, dp = _horner_with_derivative(monic, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(p == 0, 0, p / dp)
            diff = z[:, None] - z[None, :]
            inv = np.where(off, 1.0 / np.where(off, diff, 1.0), 0.0)
            step = ratio / (1.0 - ratio * inv.sum(axis=1))
        if not np.all(np.isfinite(step)):
            return None
        z = z - step
        if _converged(step, z):
            return z
    # multiple roots converge linearly; accept if the last step is already tiny
    return z if np.all(np.abs(step) <= 1e-8 * np.maximum(1.0, np.abs(z))) else None


def durand_kerner(monic: np.ndarray, max_iter: int = MAX_ITERATIONS) -> np.ndarray | None:
    z = _initial_guesses(monic)
    n = len(z)
    off = ~np.eye(n, dtype=bool)
    for _ in range(max_iter):
        p, _ = _horner_with_derivative(monic, z)
        diff = np.where(off, z[:, None] - z[None, :], 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = p / diff.prod(axis=1)
        if not np.all(np.isfinite(step)):
            return None
        z = z - step
        if _converged(step, z):
            return z
    return z if np.all(np.abs(step) <= 1e-8 * np.maximum(1.0, np.abs(z))) else None


def companion_roots(p: Polynomial, shift: complex = 0j) -> np.ndarray:
    """Eigenvalues of the companion matrix of ``p - shift`` (independent oracle)."""
    monic = _monic(p, shift)
    n = len(monic) - 1
    comp = np.zeros((n, n), dtype=complex)
    comp[1:, :-1] = np.eye(n - 1)
    comp[:, -1] = -monic[:-1]
    return np.linalg.eigvals(comp)


def cluster(roots: np.ndarray, radius: float = CLUSTER_RADIUS, p: Polynomial | None = None) -> np.ndarray:
    """Replace every group of roots closer than ``radius`` (single linkage) by its centroid.

    With ``p`` given, a centroid of multiplicity ``m`` is refined by Newton steps
    on the ``(m-1)``-th derivative of ``p``, where the root is simple.
    """
    roots = np.asarray(roots, dtype=complex)
    n = len(roots)
    label = list(range(n))

    def find(i):
        while label[i] != i:
            label[i] = label[label[i]]
            i = label[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(roots[i] - roots[j]) < radius:
                label[find(i)] = find(j)
    out = roots.copy()
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    for members in groups.values():
        if len(members) > 1:
            centre = complex(roots[members].mean())
            if p is not None:
                centre = _polish(p, centre, len(members))
            out[members] = centre
    return out


def _polish(p: Polynomial, z: complex, multiplicity: int, steps: int = 8) -> complex:
    d = p
    for _ in range(multiplicity - 1):
        d = derivative(d)
    dd = derivative(d)
    start = z
    for _ in range(steps):
        slope = dd(z)
        if slope == 0:
            break
        step = d(z) / slope
        z -= step
        if abs(step) <= 4 * np.finfo(float).eps * max(1.0, abs(z)):
            break
    # refinement must stay inside the cluster it came from
    return z if abs(z - start) < CLUSTER_RADIUS else start


def residual_scale(p: Polynomial, shift: complex, roots: np.ndarray) -> float:
    """Magnitude at which rounding in evaluating ``p - shift`` at ``roots`` lives."""
    mods = np.abs(roots)
    absc = np.abs(np.array(p.coeffs))
    terms = max(float(np.max(np.polyval(absc[::-1], mods))), 0.0) if len(roots) else 0.0
    return max(1.0, abs(shift), terms)


def _residual(p: Polynomial, shift: complex, roots: np.ndarray) -> float:
    return float(np.max(np.abs(p(roots) - shift))) if len(roots) else 0.0


def find_roots(p: Polynomial, shift: complex = 0j, root_tol: float = ROOT_TOL) -> RootSet:
    """All ``n`` solutions of ``p(zeta) = shift`` counted with multiplicity."""
    if p.degree < 1:
        raise ValueError("root finding needs a polynomial of degree >= 1")
    shift = complex(shift)
    monic = _monic(p, shift)
    if p.degree == 1:
        solvers = [("iterative", lambda: np.array([-monic[0]]))]
    else:
        solvers = [("iterative", lambda: aberth(monic)), ("iterative", lambda: durand_kerner(monic))]
    solvers.append(("companion-oracle", lambda: companion_roots(p, shift)))
    for method, solve in solvers:
        z = solve()
        if z is None:
            continue
        z = cluster(z, p=p)
        res = _residual(p, shift, z)
        if res <= root_tol * residual_scale(p, shift, z):
            return RootSet(tuple(complex(r) for r in z), res, method, shift)
    raise RootFindingError(f"no method met the residual tolerance for {p} = {shift}")


def reconstruct(rs: RootSet, leading: complex) -> Polynomial:
    """Polynomial ``leading * prod(z - r) + shift`` rebuilt from a root set."""
    q = Polynomial.from_roots(rs.roots, leading)
    return Polynomial((q.coeffs[0] + rs.shift,) + q.coeffs[1:])


def max_relative_error(a: Polynomial, b: Polynomial) -> float:
    n = max(len(a.coeffs), len(b.coeffs))
    scale = max(abs(c) for c in a.coeffs) or 1.0
    return max(abs(a.coefficient(k) - b.coefficient(k)) for k in range(n)) / scale

