"""Elementary symmetric values, power sums, Vieta and Newton-Girard."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .polynomial import Polynomial
from .roots import RootSet


@dataclass(frozen=True)
class SymmetricStats:
    """``e[k]`` holds e_k for k = 0..n; ``p[k-1]`` holds the power sum P_k."""

    e: tuple[complex, ...]
    p: tuple[complex, ...] = ()
    e_newton: tuple[complex, ...] = ()

    def elementary(self, k: int) -> complex:
        return self.e[k] if 0 <= k < len(self.e) else 0j

    def power_sum(self, k: int) -> complex:
        return self.p[k - 1]


def elementary_from_roots(roots: Sequence[complex]) -> np.ndarray:
    """e_0..e_n by expanding prod(1 + r x) one root at a time."""
    e = np.zeros(len(roots) + 1, dtype=complex)
    e[0] = 1.0
    for i, r in enumerate(roots, start=1):
        e[1 : i + 1] = e[1 : i + 1] + r * e[0:i]
    return e


def power_sums(roots: Sequence[complex], k_max: int) -> np.ndarray:
    z = np.asarray(roots, dtype=complex)
    return np.array([np.sum(z**k) for k in range(1, k_max + 1)], dtype=complex)


def elementary_from_power_sums(p: Sequence[complex], n: int) -> np.ndarray:
    """Newton-Girard recursion ``k e_k = sum_{l=1}^{k} (-1)^(l-1) e_{k-l} P_l``.

    Returns e_0..e_min(n, len(p)); e_k for k > n is zero by definition.
    """
    top = min(n, len(p))
    e = np.zeros(top + 1, dtype=complex)
    e[0] = 1.0
    for k in range(1, top + 1):
        acc = 0j
        for l in range(1, k + 1):
            acc += (-1) ** (l - 1) * e[k - l] * p[l - 1]
        e[k] = acc / k
    return e


def newton_girard_residuals(stats: SymmetricStats, n: int) -> list[complex]:
    """``sum_{l<k} (-1)^l e_l P_{k-l} + (-1)^k k e_k`` for k = 1..len(p)."""
    out = []
    for k in range(1, len(stats.p) + 1):
        acc = sum((-1) ** l * stats.elementary(l) * stats.p[k - l - 1] for l in range(k))
        e_k = stats.elementary(k) if k <= n else 0j
        out.append(acc + (-1) ** k * k * e_k)
    return out


def symmetric_stats(roots: RootSet | Sequence[complex], k_max: int) -> SymmetricStats:
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    rs = list(roots)
    p = power_sums(rs, k_max)
    e = elementary_from_roots(rs)
    e_ng = elementary_from_power_sums(p, len(rs))
    return SymmetricStats(tuple(e), tuple(p), tuple(e_ng))


def vieta_from_coeffs(poly: Polynomial) -> SymmetricStats:
    """e_k = (-1)^k a_{n-k} / a_n, read directly off the coefficients."""
    if poly.leading == 0:
        raise ValueError("Vieta needs a nonzero leading coefficient")
    n = poly.degree
    e = tuple((-1) ** k * poly.coeffs[n - k] / poly.leading for k in range(n + 1))
    return SymmetricStats(e)


def second_power_sum_from_coeffs(poly: Polynomial) -> complex:
    """P_2 of the roots when a_{n-1} = 0: ``-2 a_{n-2} / a_n``."""
    n = poly.degree
    return -2 * poly.coefficient(n - 2) / poly.leading
