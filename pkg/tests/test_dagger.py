import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from basin_rkhs.dagger import (
    PreconditionError,
    check_ddagger_coeffs,
    check_point_condition,
    classify,
    ddagger_family_sample,
    ddagger_product_check,
    real_solution_probe,
    scan_basin,
    scan_points,
)
from basin_rkhs.dynamics import sample_basin
from basin_rkhs.polynomial import Polynomial, evaluate
from basin_rkhs.presets import EXAMPLE_14_DAGGER_POINT
from basin_rkhs.roots import find_roots
from basin_rkhs.symmetric import second_power_sum_from_coeffs

CUBIC_DD = Polynomial((0, -0.75, 0, 0.5))  # z^3/2 - 3z/4


def test_coefficient_verdicts(r13, q14):
    assert check_ddagger_coeffs(r13).satisfied
    v = check_ddagger_coeffs(q14)
    assert v.a_nm1_zero and not v.a_nm2_ok and not v.satisfied
    assert check_ddagger_coeffs(CUBIC_DD).satisfied
    assert check_ddagger_coeffs(Polynomial((0, 0.5, 1))).status == "out-of-theorem-scope"


def test_origin_witness_of_cubic(q14):
    w = check_point_condition(q14, 0, "dagger")
    assert w.sum_mod_sq == pytest.approx(3, abs=1e-9)
    assert abs(w.sum_zeta) < 1e-12 and w.m == 3 and w.sum_one == 3
    assert w.satisfied


def test_cubic_dagger_holds_at_special_point(q14):
    w = check_point_condition(q14, EXAMPLE_14_DAGGER_POINT, "dagger")
    assert w.sum_mod_sq == pytest.approx(3, abs=1e-8)
    assert w.satisfied


def test_cubic_dagger_fails_at_i(q14):
    w = check_point_condition(q14, 1j, "dagger")
    assert w.sum_mod_sq > 3 + 1e-6 and not w.satisfied


def test_unknown_system(q14):
    with pytest.raises(ValueError):
        check_point_condition(q14, 0, "neither")


def test_quartic_ddagger_scan_finds_nothing(r13):
    scan = scan_basin(r13, "ddagger", samples=50)
    assert not scan.refuted and scan.points_tested == 50
    assert scan.verdict == "no counterexample found in 50 samples"


def test_cubic_dagger_scan_refutes(q14):
    scan = scan_basin(q14, "dagger", samples=20, include=[1j])
    assert scan.refuted
    assert any(w.point == 1j for w in scan.failures)
    assert scan.verdict.startswith("refuted at ")


def test_quartic_dagger_refuted(r13):
    assert scan_basin(r13, "dagger", samples=50).refuted


def test_scan_requires_attracting():
    with pytest.raises(PreconditionError):
        scan_basin(Polynomial((0, 1.5, 1)), "dagger", samples=5)


def test_stop_at_first_failure(q14):
    scan = scan_basin(q14, "dagger", samples=50, include=[1j], stop_at_first_failure=True)
    assert scan.points_tested == 1 and scan.refuted


def test_real_probe():
    assert real_solution_probe(Polynomial((0, -1, 0, 1)), 0)
    assert not real_solution_probe(Polynomial((1, 0, 1)), 0)


def test_classify_report(r13):
    rep = classify(r13, samples=10)
    doc = rep.to_json()
    assert doc["ddagger"]["satisfied"] and doc["ddagger_status"] == "satisfied"
    assert {s["system"] for s in doc["scans"]} == {"dagger", "ddagger"}
    assert rep.scan("ddagger").points_tested == 10


def test_classify_non_attracting_has_no_scans():
    rep = classify(Polynomial((0, 2, 1)))
    assert not rep.attracting and rep.scans == ()


def test_product_of_dd_pair(r13):
    prod, verdict = ddagger_product_check(r13, CUBIC_DD)
    assert prod.degree == 7 and verdict.satisfied
    prod, verdict = ddagger_product_check(r13, r13)
    assert prod.degree == 8 and verdict.satisfied


def test_product_rejects_bad_factor(r13, q14):
    with pytest.raises(PreconditionError):
        ddagger_product_check(r13, q14)


def test_random_products_stay_in_family():
    rng = np.random.default_rng(3)
    for _ in range(100):
        p = ddagger_family_sample(int(rng.integers(3, 7)), rng)
        q = ddagger_family_sample(int(rng.integers(3, 7)), rng)
        prod, v = ddagger_product_check(p, q)
        assert v.satisfied and prod.degree == p.degree + q.degree


def test_family_sampler():
    p = ddagger_family_sample(3, leading=0.5)
    assert p.coeffs == Polynomial((0, -0.75, 0, 0.5)).coeffs
    for seed in range(1000):
        p = ddagger_family_sample(int(3 + seed % 4), seed)
        assert check_ddagger_coeffs(p).satisfied
        assert abs(p.coefficient(1)) < 1 and p.coefficient(0) == 0
    with pytest.raises(ValueError):
        ddagger_family_sample(3, leading=1.0)
    with pytest.raises(ValueError):
        ddagger_family_sample(2)


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1), st.integers(3, 6))
def test_family_members_satisfy_pointwise(seed, n):
    p = ddagger_family_sample(n, seed)
    for c in sample_basin(p, 4, seed):
        w = check_point_condition(p, c, "ddagger")
        assert w.satisfied and w.m == n


@pytest.mark.parametrize("eps", [1e-3, 1e-6])
def test_near_misses_are_caught(eps):
    base = Polynomial((0, -0.75, 0, 0.5))
    bumped = Polynomial((0, -0.75, eps, 0.5))
    assert not check_ddagger_coeffs(bumped).satisfied
    # a_{n-1} != 0 shifts the root sum by -eps/a_n everywhere
    assert abs(check_point_condition(bumped, 0.1, "ddagger").sum_zeta) == pytest.approx(eps / 0.5, rel=1e-6)
    assert check_point_condition(base, 0.1, "ddagger").satisfied


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1), st.integers(3, 6), st.complex_numbers(max_magnitude=0.3))
def test_fibre_count_and_conjugation(seed, n, c):
    p = ddagger_family_sample(n, seed)
    w = check_point_condition(p, c, "dagger")
    assert w.m == n
    assert abs(w.sum_conj_zeta - w.sum_zeta.conjugate()) < 1e-12
    # P_2 of the fibre is independent of c once a_{n-1} = 0
    assert abs(w.sum_zeta_sq - second_power_sum_from_coeffs(p)) < 1e-8 * max(1, abs(w.sum_zeta_sq))


def test_dagger_implies_real_fibre_of_ddagger_cubic():
    # for a ddagger member, dagger holds at c exactly when sum |zeta|^2 = sum zeta^2
    p = Polynomial((0, -0.75, 0, 0.5))
    for c in (0.0, 0.2, -0.3):
        w = check_point_condition(p, c, "dagger")
        assert w.satisfied == w.all_real
    w = check_point_condition(p, 0.2j, "dagger")
    assert not w.all_real and not w.satisfied


def test_scan_points_sorts_failures(q14):
    rep = scan_points(q14, [1j, 0.5j, 0], "dagger")
    assert [abs(w.point) for w in rep.failures] == sorted(abs(w.point) for w in rep.failures)
