"""Shared generators for property tests."""

import numpy as np


def random_polynomial_coeffs(rng: np.random.Generator, degree: int) -> list[complex]:
    """Coefficients in the unit disk with |a_n| >= 0.1."""
    r = np.sqrt(rng.uniform(size=degree + 1))
    cs = r * np.exp(2j * np.pi * rng.uniform(size=degree + 1))
    lead = rng.uniform(0.1, 1.0) * np.exp(2j * np.pi * rng.uniform())
    cs[-1] = lead
    return [complex(c) for c in cs]
