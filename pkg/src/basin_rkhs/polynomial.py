"""Dense complex polynomials: evaluation, arithmetic, composition and iteration."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

#: Symbolic composition refuses to build polynomials above this degree.
DEFAULT_DEGREE_CAP = 4096


class DegreeOverflowError(ValueError):
    """Raised when a composition would exceed the configured degree cap."""


class _Escaped:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "ESCAPED"

    def __bool__(self) -> bool:
        return False


#: Returned by :func:`iterate_eval` when an orbit leaves the escape disk.
ESCAPED = _Escaped()


@dataclass(frozen=True)
class Polynomial:
    """Polynomial ``a_0 + a_1 z + ... + a_n z^n`` with complex coefficients.

    ``coeffs[k]`` is the coefficient of ``z**k``. Trailing zeros are stripped
    on construction, so the leading coefficient is nonzero unless the
    polynomial is identically zero (stored as ``(0j,)``).
    """

    coeffs: tuple[complex, ...]

    def __post_init__(self):
        cs = [complex(c) for c in self.coeffs]
        for c in cs:
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ValueError(f"non-finite coefficient {c!r}")
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs:
            cs = [0j]
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def from_roots(cls, roots: Iterable[complex], leading: complex = 1.0) -> "Polynomial":
        cs = np.array([1.0 + 0j])
        for r in roots:
            # multiply by (z - r); coefficients are low-order first
            cs = np.concatenate([[0j], cs]) - r * np.concatenate([cs, [0j]])
        return cls(tuple(leading * cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> complex:
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return self.degree == 0 and self.coeffs[0] == 0

    def coefficient(self, k: int) -> complex:
        """Coefficient of ``z**k`` (zero outside the stored range)."""
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0j

    def __call__(self, z):
        return evaluate(self, z)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        return multiply(self, other)

    def __str__(self) -> str:
        return format_polynomial(self)


def evaluate(p: Polynomial, z):
    """Horner evaluation; ``z`` may be a Python complex or a numpy array."""
    acc = p.coeffs[-1] * (z * 0 + 1) if isinstance(z, np.ndarray) else p.coeffs[-1]
    for c in reversed(p.coeffs[:-1]):
        acc = acc * z + c
    return acc


def derivative(p: Polynomial) -> Polynomial:
    if p.degree == 0:
        return Polynomial((0j,))
    return Polynomial(tuple(k * p.coeffs[k] for k in range(1, p.degree + 1)))


def multiply(p: Polynomial, q: Polynomial) -> Polynomial:
    return Polynomial(tuple(np.convolve(np.array(p.coeffs), np.array(q.coeffs))))


def add(p: Polynomial, q: Polynomial) -> Polynomial:
    n = max(len(p.coeffs), len(q.coeffs))
    return Polynomial(tuple(p.coefficient(k) + q.coefficient(k) for k in range(n)))


def shift(p: Polynomial, c: complex) -> Polynomial:
    """Return ``p - c``."""
    return Polynomial((p.coeffs[0] - c,) + p.coeffs[1:])


def compose(p: Polynomial, q: Polynomial, degree_cap: int = DEFAULT_DEGREE_CAP) -> Polynomial:
    """Coefficients of ``p(q(z))``, built by Horner's scheme over polynomials."""
    if p.degree * max(q.degree, 0) > degree_cap:
        raise DegreeOverflowError(
            f"composition degree {p.degree * q.degree} exceeds cap {degree_cap}; "
            "iterate too large, evaluate pointwise instead"
        )
    acc = Polynomial((p.coeffs[-1],))
    for c in reversed(p.coeffs[:-1]):
        acc = add(multiply(acc, q), Polynomial((c,)))
    return acc


def escape_radius(p: Polynomial) -> float:
    """Radius beyond which orbits of ``p`` strictly grow to infinity.

    ``max(2, (1 + sum_{k<n} |a_k|) / |a_n|)`` for degree >= 2. Polynomials of
    degree below 2 have no escape disk and get ``inf``.
    """
    if p.degree < 2:
        return math.inf
    lower = sum(abs(c) for c in p.coeffs[:-1])
    return max(2.0, (1.0 + lower) / abs(p.leading))


def iterate_eval(p: Polynomial, z: complex, k: int, radius: float | None = None):
    """``p`` applied ``k`` times to ``z`` by pointwise evaluation.

    Returns :data:`ESCAPED` as soon as an iterate exceeds ``radius``
    (default :func:`escape_radius`).
    """
    if k < 0:
        raise ValueError("iteration count must be nonnegative")
    if radius is None:
        radius = escape_radius(p)
    z = complex(z)
    if abs(z) > radius:
        return ESCAPED
    for _ in range(k):
        z = evaluate(p, z)
        if not abs(z) <= radius:
            return ESCAPED
    return z


def _format_real(x: float) -> str:
    return repr(float(x)) if x != int(x) or abs(x) >= 1e16 else repr(float(x)).removesuffix(".0")


def _format_coeff(c: complex) -> tuple[str, str]:
    """Split ``c`` into (sign, unsigned body) following the input grammar."""
    re, im = c.real, c.imag
    if im == 0:
        return ("-" if re < 0 else "+"), _format_real(abs(re))
    if re == 0:
        body = "" if abs(im) == 1 else _format_real(abs(im))
        return ("-" if im < 0 else "+"), body + "i"
    sign = "-" if re < 0 else "+"
    re_abs, im_signed = abs(re), (im if re >= 0 else -im)
    op = "-" if im_signed < 0 else "+"
    return sign, f"({_format_real(re_abs)}{op}{_format_real(abs(im_signed))}i)"


def format_polynomial(p: Polynomial, var: str = "z") -> str:
    """Render ``p`` highest power first in the grammar accepted by the parser."""
    if p.is_zero():
        return "0"
    parts: list[str] = []
    for k in range(p.degree, -1, -1):
        c = p.coeffs[k]
        if c == 0:
            continue
        sign, body = _format_coeff(c)
        if k > 0 and body == "1":
            body = ""
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        term = body + mono
        if not parts:
            parts.append(term if sign == "+" else "-" + term)
        else:
            parts.append(f"{sign} {term}")
    return " ".join(parts)
