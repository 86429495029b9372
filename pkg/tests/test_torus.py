"""Grid transforms, quasi-norms, and difference operators on the torus.

Every spectral operation is checked against a plain mode-sum or stencil
reference computed inside the test, never against the code path it
exercises.
"""

import json
import math

import numpy as np
import pytest

from kcollapse.errors import UndersampledGrid
from kcollapse.torus import (
    ExponentPair,
    GridSignal,
    TrigPoly,
    convolve,
    dft_analyze,
    dft_synthesize,
    evaluate,
    quasi_norm,
    sample_values,
    symmetric_difference,
    translate,
)

try:
    from hypothesis import given, settings
    from hypothesis import strategies as st
except ModuleNotFoundError:
    pytest.skip("hypothesis not installed", allow_module_level=True)


def random_poly(d: int, degree: int, seed: int, scale: float = 1.0) -> TrigPoly:
    rng = np.random.default_rng(seed)
    shape = (2 * degree + 1,) * d
    c = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return TrigPoly(d, degree, scale * c)


def mode_sum(poly: TrigPoly, x) -> complex:
    """Literal sum over modes at one point; the reference evaluator."""
    ks = range(-poly.degree, poly.degree + 1)
    if poly.d == 1:
        return sum(poly.coef(k) * np.exp(1j * k * x) for k in ks)
    total = 0.0 + 0.0j
    for k1 in ks:
        for k2 in ks:
            total += poly.coef((k1, k2)) * np.exp(1j * (k1 * x[0] + k2 * x[1]))
    return total


# ---------------------------------------------------------------------------
# evaluation and grid transforms


@pytest.mark.parametrize("d", [1, 2])
def test_evaluate_matches_mode_sum(d):
    poly = random_poly(d, 4, seed=10)
    rng = np.random.default_rng(1)
    pts = rng.uniform(0.0, 2 * np.pi, size=(5, d))
    got = evaluate(poly, pts[:, 0] if d == 1 else pts)
    want = [mode_sum(poly, p[0] if d == 1 else p) for p in pts]
    assert np.max(np.abs(got - np.array(want))) < 1e-10


def test_sample_values_match_evaluate():
    poly = random_poly(1, 6, seed=2)
    xs = 2 * np.pi * np.arange(15) / 15
    assert np.allclose(sample_values(poly, (15,)), evaluate(poly, xs), atol=1e-12)


def test_synthesize_constant():
    sig = dft_synthesize(TrigPoly.constant(2.5 - 1.0j, 1), (8,))
    assert np.allclose(sig.samples, 2.5 - 1.0j)


def test_synthesize_single_mode():
    poly = TrigPoly.from_modes(1, 3, {3: 1.0})
    sig = dft_synthesize(poly, (8,))
    want = np.exp(1j * 3 * 2 * np.pi * np.arange(8) / 8)
    assert np.allclose(sig.samples, want, atol=1e-13)


def test_analyze_constant():
    sig = dft_synthesize(TrigPoly.constant(1.0, 1), (8,))
    poly = dft_analyze(sig, 0)
    assert poly.coef(0) == pytest.approx(1.0, abs=1e-14)


def test_analyze_single_mode():
    sig = GridSignal(1, (16,), np.exp(1j * 2 * (2 * np.pi * np.arange(16) / 16)))
    poly = dft_analyze(sig, 2)
    assert poly.coef(2) == pytest.approx(1.0, abs=1e-13)
    assert abs(poly.coef(0)) + abs(poly.coef(1)) + abs(poly.coef(-2)) < 1e-13


@pytest.mark.parametrize("d,degree,size", [(1, 16, 64), (1, 64, 129), (2, 5, 16)])
def test_round_trip_random(d, degree, size):
    poly = random_poly(d, degree, seed=3)
    back = dft_analyze(dft_synthesize(poly, (size,) * d), degree)
    err = np.linalg.norm(back.coeffs - poly.coeffs)
    assert err <= 1e-12 * np.linalg.norm(poly.coeffs)


def test_undersampled_grid_rejected():
    poly = random_poly(1, 8, seed=0)
    with pytest.raises(UndersampledGrid):
        dft_synthesize(poly, (16,))  # needs 17 points
    sig = dft_synthesize(poly, (17,))
    with pytest.raises(UndersampledGrid):
        dft_analyze(sig, 9)  # degree 9 needs 19


# ---------------------------------------------------------------------------
# quasi-norms


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0, math.inf])
def test_quasi_norm_constant(p):
    assert quasi_norm(TrigPoly.constant(1.0, 1), p) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("p", [0.5, 2.0])
def test_quasi_norm_unimodular_mode(p):
    poly = TrigPoly.from_modes(1, 1, {1: 1.0})
    assert quasi_norm(poly, p) == pytest.approx(1.0, abs=1e-12)


def test_quasi_norm_cusp_against_dense_reference():
    # |1 + e^{ix}| = 2|cos(x/2)| vanishes at pi; |f|^{1/2} has a cusp there
    poly = TrigPoly.from_modes(1, 1, {0: 1.0, 1: 1.0})
    xs = 2 * np.pi * np.arange(1 << 20) / (1 << 20)
    ref = float(np.mean(np.abs(2.0 * np.cos(xs / 2.0)) ** 0.5) ** 2)
    # the adaptive mean settles at 1e-3 relative, so ask for no more
    assert quasi_norm(poly, 0.5, oversample=32) == pytest.approx(ref, rel=1e-3)


def test_quasi_norm_max():
    poly = TrigPoly.from_modes(1, 1, {0: 1.0, 1: 1.0})
    assert quasi_norm(poly, math.inf) == pytest.approx(2.0, rel=1e-6)


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0])
def test_quasi_norm_scaling(p):
    poly = random_poly(1, 5, seed=4)
    c = 0.37 - 2.1j
    scaled = TrigPoly(1, 5, c * poly.coeffs)
    assert quasi_norm(scaled, p) == pytest.approx(
        abs(c) * quasi_norm(poly, p), rel=1e-10
    )


COEFF = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)


@st.composite
def small_polys(draw):
    degree = draw(st.integers(min_value=0, max_value=4))
    n = 2 * degree + 1
    re = draw(st.lists(COEFF, min_size=n, max_size=n))
    im = draw(st.lists(COEFF, min_size=n, max_size=n))
    return TrigPoly(1, degree, np.array(re) + 1j * np.array(im))


@settings(max_examples=40, deadline=None)
@given(f=small_polys(), g=small_polys(), p=st.sampled_from([0.3, 0.5, 0.7]))
def test_quasi_triangle_inequality(f, g, p):
    degree = max(f.degree, g.degree)
    s = TrigPoly(
        1, degree, f.with_degree(degree).coeffs + g.with_degree(degree).coeffs
    )
    lhs = quasi_norm(s, p, oversample=32) ** p
    rhs = quasi_norm(f, p, oversample=32) ** p + quasi_norm(g, p, oversample=32) ** p
    assert lhs <= rhs + 1e-6


# ---------------------------------------------------------------------------
# convolution, differences, translation


def test_convolve_matches_riemann_sum():
    a = random_poly(1, 3, seed=5)
    b = random_poly(1, 4, seed=6)
    out = convolve(a, b)
    ys = 2 * np.pi * np.arange(2048) / 2048
    av = evaluate(a, ys)
    for x in (0.0, 1.1, 3.9):
        ref = np.mean(av * evaluate(b, x - ys))
        assert abs(evaluate(out, np.array([x]))[0] - ref) < 1e-10


def stencil(poly, h, r, xs):
    """Pointwise symmetric difference, the definition the spectrum encodes."""
    h = np.atleast_1d(np.asarray(h, dtype=float))
    total = np.zeros(len(xs), dtype=complex)
    for v in range(r + 1):
        shift = (r / 2.0 - v) * h
        pts = xs - shift[0] if poly.d == 1 else xs - shift
        total += (-1) ** v * math.comb(r, v) * evaluate(poly, pts)
    return total


def test_difference_single_mode_multiplier():
    poly = TrigPoly.from_modes(1, 1, {1: 1.0})
    out = symmetric_difference(poly, (1.0,), 2)
    assert out.coef(1) == pytest.approx(-4.0 * math.sin(0.5) ** 2, abs=1e-14)
    assert abs(out.coef(0)) + abs(out.coef(-1)) < 1e-15


def test_difference_annihilates_constants():
    out = symmetric_difference(TrigPoly.constant(3.0, 1), (0.7,), 3)
    assert np.max(np.abs(out.coeffs)) < 1e-15


@pytest.mark.parametrize("d", [1, 2])
@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_difference_matches_stencil(d, r):
    poly = random_poly(d, 5, seed=7)
    rng = np.random.default_rng(r)
    h = rng.uniform(-2.0, 2.0, size=d)
    xs = rng.uniform(0.0, 2 * np.pi, size=(100, d))
    if d == 1:
        xs = xs[:, 0]
    got = evaluate(symmetric_difference(poly, h, r), xs)
    scale = max(1.0, float(np.abs(got).max()))
    assert np.max(np.abs(got - stencil(poly, h, r, xs))) < 1e-10 * scale


@settings(max_examples=25, deadline=None)
@given(
    f=small_polys(),
    h=st.floats(min_value=-3.0, max_value=3.0, allow_nan=False),
    r=st.integers(min_value=0, max_value=4),
)
def test_difference_stencil_property(f, h, r):
    xs = 2 * np.pi * np.arange(8) / 8.0
    got = evaluate(symmetric_difference(f, (h,), r), xs)
    scale = max(1.0, float(np.abs(f.coeffs).max()))
    assert np.max(np.abs(got - stencil(f, (h,), r, xs))) < 1e-9 * scale


def test_translate_zero_is_identity():
    poly = random_poly(1, 4, seed=8)
    assert np.array_equal(translate(poly, (0.0,)).coeffs, poly.coeffs)


def test_translate_half_period_flips_mode():
    poly = TrigPoly.from_modes(1, 1, {1: 1.0})
    out = translate(poly, (np.pi,))
    assert out.coef(1) == pytest.approx(-1.0, abs=1e-15)


def test_translate_round_trip():
    poly = random_poly(1, 6, seed=9)
    back = translate(translate(poly, (1.3,)), (-1.3,))
    assert np.max(np.abs(back.coeffs - poly.coeffs)) < 1e-14


def test_translate_shifts_argument():
    poly = random_poly(1, 4, seed=11)
    t = 0.9
    xs = np.array([0.0, 2.0, 5.1])
    got = evaluate(translate(poly, (t,)), xs)
    assert np.max(np.abs(got - evaluate(poly, xs - t))) < 1e-12


# ---------------------------------------------------------------------------
# types and serialization


def test_exponent_pair_q1():
    assert ExponentPair(0.5, 0.7).q1 == pytest.approx(0.7)
    assert ExponentPair(0.5, 1.0).q1 == 1.0
    assert ExponentPair(0.5, 2.0).q1 == 1.0
    assert ExponentPair(0.5, math.inf).q1 == 1.0


def test_exponent_pair_json_round_trip():
    pair = ExponentPair(0.5, math.inf)
    back = ExponentPair.from_json_dict(
        json.loads(json.dumps(pair.to_json_dict()))
    )
    assert back == pair


def test_trig_poly_accessors():
    poly = TrigPoly.from_modes(1, 3, {0: 2.0, 3: 1.0 - 1.0j})
    assert poly.mean == pytest.approx(2.0)
    assert poly.coef(3) == pytest.approx(1.0 - 1.0j)
    assert poly.coef(7) == 0.0  # outside the band
    wide = poly.with_degree(5)
    assert wide.degree == 5 and wide.coef(3) == pytest.approx(1.0 - 1.0j)


@pytest.mark.parametrize("d", [1, 2])
def test_trig_poly_json_round_trip(d):
    poly = random_poly(d, 3, seed=12)
    back = TrigPoly.loads(poly.dumps())
    assert back.d == d and back.degree == 3
    assert np.max(np.abs(back.coeffs - poly.coeffs)) < 1e-15


def test_grid_signal_json_round_trip():
    sig = dft_synthesize(random_poly(1, 4, seed=13), (16,))
    back = GridSignal.from_json_dict(json.loads(json.dumps(sig.to_json_dict())))
    assert np.max(np.abs(back.samples - sig.samples)) < 1e-15


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
