"""The two worked polynomials: a quartic satisfying the double-dagger test and
a cubic that does not."""

from .parsing import parse_polynomial

EXAMPLE_13 = "i z^4 - 2i z^2 - (0.5+0.5i) z"
EXAMPLE_14 = "0.5z^3 + 0.75z"

PRESETS = {"13": EXAMPLE_13, "14": EXAMPLE_14}

# c = i / (2 sqrt 2): fibre is {-i sqrt 2, i/sqrt 2 (double)}
EXAMPLE_14_DAGGER_POINT = 1j / (2 * 2**0.5)


def example_13():
    return parse_polynomial(EXAMPLE_13)


def example_14():
    return parse_polynomial(EXAMPLE_14)
