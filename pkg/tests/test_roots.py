import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from basin_rkhs.polynomial import Polynomial, evaluate
from basin_rkhs.roots import (
    RootFindingError,
    aberth,
    cluster,
    companion_roots,
    durand_kerner,
    find_roots,
    max_relative_error,
    reconstruct,
)

from helpers import random_polynomial_coeffs


def _match(found, expected, tol):
    """Greedy matching of two multisets of complex numbers."""
    rest = list(expected)
    for z in found:
        k = min(range(len(rest)), key=lambda i: abs(rest[i] - z))
        assert abs(rest[k] - z) <= tol, (found, expected)
        rest.pop(k)


def test_cubic_fibre_over_zero(q14):
    rs = find_roots(q14, 0)
    s = math.sqrt(1.5)
    _match(rs.roots, [0, 1j * s, -1j * s], 1e-12)
    assert rs.method == "iterative" and len(rs) == 3


def test_double_root_is_repeated():
    rs = find_roots(Polynomial((0, 0, 1)), 0)
    assert rs.roots == (0, 0)


def test_cubic_fibre_over_i_matches_companion_oracle(q14):
    rs = find_roots(q14, 1j)
    _match(rs.roots, companion_roots(q14, 1j), 1e-10)
    assert sum(abs(z) ** 2 for z in rs) > 3


def test_double_root_cluster_is_polished(q14):
    c = 1j / (2 * math.sqrt(2))
    rs = find_roots(q14, c)
    _match(rs.roots, [1j / math.sqrt(2)] * 2 + [-1j * math.sqrt(2)], 1e-12)


def test_constant_rejected():
    with pytest.raises(ValueError):
        find_roots(Polynomial((1,)), 0)


def test_linear():
    rs = find_roots(Polynomial((1, 2)), 3)
    assert rs.roots == (1.0,)


def test_methods_agree_on_simple_roots():
    p = Polynomial.from_roots([1, -2j, 0.5 + 0.5j, 3])
    monic = np.array(p.coeffs)
    for solver in (aberth, durand_kerner):
        _match(solver(monic), [1, -2j, 0.5 + 0.5j, 3], 1e-10)


def test_cluster_merges_only_close_roots():
    z = np.array([1.0, 1.0 + 1e-8, 2.0, 2.0 + 1e-3])
    out = cluster(z)
    assert out[0] == out[1] and out[2] != out[3]


def test_failure_raises(monkeypatch):
    import basin_rkhs.roots as roots

    monkeypatch.setattr(roots, "aberth", lambda m: None)
    monkeypatch.setattr(roots, "durand_kerner", lambda m: None)
    monkeypatch.setattr(roots, "companion_roots", lambda p, s: np.array([5.0, 6.0]))
    with pytest.raises(RootFindingError):
        roots.find_roots(Polynomial((0, 0, 1)), 0)


def test_fallback_to_oracle(monkeypatch):
    import basin_rkhs.roots as roots

    monkeypatch.setattr(roots, "aberth", lambda m: None)
    monkeypatch.setattr(roots, "durand_kerner", lambda m: None)
    rs = roots.find_roots(Polynomial((-1, 0, 1)), 0)
    assert rs.method == "companion-oracle"
    _match(rs.roots, [1, -1], 1e-12)


@given(st.integers(0, 2**32 - 1), st.integers(1, 8), st.complex_numbers(max_magnitude=2))
def test_round_trip(seed, degree, c):
    rng = np.random.default_rng(seed)
    p = Polynomial(tuple(random_polynomial_coeffs(rng, degree)))
    rs = find_roots(p, c)
    assert len(rs) == p.degree
    assert max_relative_error(p, reconstruct(rs, p.leading)) < 1e-8
    for z in rs:
        assert abs(evaluate(p, z) - c) <= 1e-10 * max(1.0, abs(c), sum(abs(a) * abs(z) ** k for k, a in enumerate(p.coeffs)))
