"""Parser for the polynomial input language.

Grammar (whitespace is ignored)::

    expression := term (('+' | '-') term)*
    term       := coeff? ('z' ('^' uint)?)?
    coeff      := real | imag | '(' real ('+' | '-') imag ')'
    imag       := real? 'i'
    real       := decimal literal

A single leading sign on the first term is also accepted, so ``-z^2`` parses.
"""

from __future__ import annotations

import re

from .polynomial import Polynomial

_REAL = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_UINT = re.compile(r"\d+")


class PolynomialSyntaxError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position}: {text!r}")


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def expect(self, ch: str):
        if not self.take(ch):
            self.fail(f"expected {ch!r}")

    def match(self, pattern: re.Pattern) -> str | None:
        self.skip()
        m = pattern.match(self.text, self.pos)
        if m is None:
            return None
        self.pos = m.end()
        return m.group()

    def fail(self, message: str):
        raise PolynomialSyntaxError(message, self.text, self.pos)


def _coeff(s: _Scanner) -> complex | None:
    if s.take("("):
        lit = s.match(_REAL)
        if lit is None:
            s.fail("expected real literal")
        re_part = float(lit)
        ch = s.peek()
        if ch not in ("+", "-"):
            s.fail("expected '+' or '-' in complex literal")
        s.pos += 1
        sign = 1.0 if ch == "+" else -1.0
        im_lit = s.match(_REAL)
        s.expect("i")
        s.expect(")")
        return complex(re_part, sign * (float(im_lit) if im_lit else 1.0))
    lit = s.match(_REAL)
    if s.take("i"):
        return complex(0.0, float(lit) if lit else 1.0)
    if lit is not None:
        return complex(float(lit))
    return None


def _term(s: _Scanner) -> tuple[complex, int]:
    start = s.pos
    c = _coeff(s)
    power = 0
    if s.take("z"):
        power = 1
        if s.take("^"):
            digits = s.match(_UINT)
            if digits is None:
                s.fail("expected unsigned integer exponent")
            power = int(digits)
    elif c is None:
        s.skip()
        s.pos = max(s.pos, start)
        s.fail("expected term")
    return (1.0 + 0j if c is None else c), power


def parse_polynomial(text: str) -> Polynomial:
    """Parse ``text`` into a :class:`Polynomial`; like powers are summed."""
    s = _Scanner(text)
    sign = -1.0 if s.take("-") else 1.0
    if sign > 0:
        s.take("+")
    coeffs: dict[int, complex] = {}
    while True:
        c, k = _term(s)
        coeffs[k] = coeffs.get(k, 0j) + sign * c
        ch = s.peek()
        if ch == "":
            break
        if ch not in ("+", "-"):
            s.fail(f"unexpected character {ch!r}")
        s.pos += 1
        sign = 1.0 if ch == "+" else -1.0
    n = max(coeffs)
    return Polynomial(tuple(coeffs.get(k, 0j) for k in range(n + 1)))
