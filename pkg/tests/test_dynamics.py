import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from basin_rkhs.dynamics import (
    BasinError,
    BasinSamplingError,
    Verdict,
    analyze_fixed_point,
    classify_array,
    classify_point,
    contraction_bound,
    orbit,
    pixel_centers,
    render_basin,
    sample_basin,
)
from basin_rkhs.polynomial import Polynomial, evaluate


def test_fixed_point_reports(r13, q14):
    rep = analyze_fixed_point(r13)
    assert rep.attracting and rep.derivative_modulus == pytest.approx(math.sqrt(2) / 2)
    assert contraction_bound(r13, rep.contraction_radius) <= 0.95 + 1e-12
    assert analyze_fixed_point(q14).derivative_modulus == pytest.approx(0.75)
    assert not analyze_fixed_point(Polynomial((0, 1))).attracting
    assert not analyze_fixed_point(Polynomial((0.1, 0.5, 1))).attracting


def test_slope_above_q_max_still_certifies():
    rep = analyze_fixed_point(Polynomial((0, 0.97, 0.1)))
    assert rep.attracting and rep.contraction_radius > 0 and rep.contraction_factor < 1


def test_origin_needs_no_iterations(r13):
    pc = classify_point(r13, 0)
    assert pc.verdict is Verdict.IN_BASIN and pc.iterations_used == 0


def test_trace_records_orbit(q14):
    pc = classify_point(q14, 1j, trace=True)
    assert pc.verdict is Verdict.IN_BASIN
    assert pc.trace == tuple(orbit(q14, 1j, pc.iterations_used))


def test_far_point_escapes(r13):
    assert classify_point(r13, 10 + 10j).verdict is Verdict.ESCAPED


def test_zero_budget_is_undecided(q14):
    z = 1.2 + 0.3j
    if abs(z) > analyze_fixed_point(q14).contraction_radius:
        assert classify_point(q14, z, budget=0).verdict is Verdict.UNDECIDED


def test_requires_attracting_fixed_point():
    with pytest.raises(BasinError):
        classify_point(Polynomial((0, 2)), 0.1)


def test_raster_shape_and_orientation(r13):
    raster = render_basin(r13, 64, 64)
    assert raster.verdict(32, 32) is Verdict.IN_BASIN
    for r, c in [(0, 0), (0, 63), (63, 0), (63, 63)]:
        assert raster.verdict(r, c) is Verdict.ESCAPED
    grid = pixel_centers(4, 2, (0, 4, 0, 2))
    assert grid[0, 0] == 0.5 + 1.5j and grid[1, 3] == 3.5 + 0.5j


def test_pgm_bytes(q14):
    a = render_basin(q14, 33, 17).to_pgm()
    b = render_basin(q14, 33, 17, workers=3).to_pgm()
    assert a == b
    assert a.startswith(b"P5\n33 17\n255\n")
    assert len(a) == len(b"P5\n33 17\n255\n") + 33 * 17
    assert set(a[len(b"P5\n33 17\n255\n"):]) <= {0, 128, 255}


@pytest.mark.parametrize("w, h, bbox", [(0, 0, (-2, 2, -2, 2)), (4, 4, (1, 1, -2, 2))])
def test_bad_raster(q14, w, h, bbox):
    with pytest.raises(ValueError):
        render_basin(q14, w, h, bbox)


def test_sampling_is_deterministic(q14):
    a = sample_basin(q14, 100, seed=7)
    assert a == sample_basin(q14, 100, seed=7)
    assert a[0] == 0 and len(a) == 100
    assert a != sample_basin(q14, 100, seed=8)


def test_sampling_gives_up_when_basin_is_thin(q14):
    with pytest.raises(BasinSamplingError):
        sample_basin(q14, 5, bbox=(50, 51, 50, 51), max_attempts=20)


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1))
def test_forward_invariance(seed):
    from basin_rkhs.presets import example_13

    p = example_13()
    pts = sample_basin(p, 5, seed)
    for z in pts:
        assert classify_point(p, evaluate(p, z)).verdict is Verdict.IN_BASIN


def test_contraction_certificate(r13, q14):
    rng = np.random.default_rng(0)
    for p in (r13, q14):
        rep = analyze_fixed_point(p)
        r = rep.contraction_radius * np.sqrt(rng.uniform(size=1000))
        z = r * np.exp(2j * np.pi * rng.uniform(size=1000))
        img = evaluate(p, z)
        assert np.all(np.abs(img) <= rep.contraction_factor * np.abs(z) + 1e-15)


def test_escape_is_sound(r13):
    rep = analyze_fixed_point(r13)
    rng = np.random.default_rng(1)
    z = (rep.escape_radius * 1.01 + rng.uniform(0, 3, 200)) * np.exp(2j * np.pi * rng.uniform(size=200))
    for _ in range(3):
        z2 = evaluate(r13, z)
        assert np.all(np.abs(z2) > np.abs(z))
        z = z2


def test_larger_budget_only_resolves_undecided(r13):
    grid = pixel_centers(48, 48, (-2, 2, -2, 2))
    small, _ = classify_array(r13, grid, budget=2)
    large, _ = classify_array(r13, grid, budget=50)
    decided = small != 2
    assert np.array_equal(small[decided], large[decided])
    assert np.count_nonzero(large == 2) <= np.count_nonzero(small == 2)
