"""Equispaced node sets: exact means and discrete-vs-continuous norm ratios."""

import numpy as np
import pytest

from kcollapse.errors import DegenerateNorm, ExactnessViolated
from kcollapse.quadrature import NodeSet, mz_ratio, quadrature_mean
from kcollapse.symbols import make_vallee
from kcollapse.torus import TrigPoly

try:
    from hypothesis import given, settings
    from hypothesis import strategies as st
except ModuleNotFoundError:
    pytest.skip("hypothesis not installed", allow_module_level=True)


def random_poly(d: int, degree: int, seed: int) -> TrigPoly:
    rng = np.random.default_rng(seed)
    shape = (2 * degree + 1,) * d
    c = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return TrigPoly(d, degree, c)


# ---------------------------------------------------------------------------
# node sets


def test_node_set_layout():
    nodes = NodeSet(3)
    assert nodes.size == 7
    assert nodes.count == 7
    assert np.allclose(nodes.axis_nodes(), 2 * np.pi * np.arange(7) / 7)
    nodes2 = NodeSet(3, d=2)
    assert nodes2.count == 49
    assert nodes2.points().shape == (49, 2)


def test_exactness_predicate():
    nodes = NodeSet(5)
    assert nodes.exact_for(10)
    assert not nodes.exact_for(11)


# ---------------------------------------------------------------------------
# exact means


def test_mean_of_pure_mode_is_zero():
    poly = TrigPoly.from_modes(1, 3, {3: 1.0})
    assert quadrature_mean(poly, NodeSet(3)) == pytest.approx(0.0, abs=1e-15)


def test_mean_of_constant():
    c = 2.0 - 0.5j
    assert quadrature_mean(TrigPoly.constant(c, 1), NodeSet(1)) == pytest.approx(c)


def test_mean_recovers_zero_coefficient():
    poly = random_poly(1, 10, seed=1)
    got = quadrature_mean(poly, NodeSet(5))
    assert got == pytest.approx(poly.coef(0), abs=1e-12)


def test_mean_two_dimensional():
    poly = random_poly(2, 4, seed=2)
    got = quadrature_mean(poly, NodeSet(4, d=2))
    assert got == pytest.approx(poly.coef((0, 0)), abs=1e-12)


def test_exactness_enforced():
    poly = random_poly(1, 11, seed=3)
    with pytest.raises(ExactnessViolated):
        quadrature_mean(poly, NodeSet(5))


def test_aliasing_when_inexact_allowed():
    # frequency 11 == 0 (mod 11 nodes), so the node mean sees a constant
    poly = TrigPoly.from_modes(1, 11, {11: 1.0})
    got = quadrature_mean(poly, NodeSet(5), allow_inexact=True)
    assert got == pytest.approx(1.0, abs=1e-13)


def test_dimension_mismatch():
    poly = random_poly(1, 2, seed=4)
    with pytest.raises(ValueError):
        quadrature_mean(poly, NodeSet(4, d=2))


@settings(max_examples=30, deadline=None)
@given(
    n=st.integers(min_value=1, max_value=20),
    seed=st.integers(min_value=0, max_value=10_000),
    data=st.data(),
)
def test_mean_exact_up_to_double_degree(n, seed, data):
    degree = data.draw(st.integers(min_value=0, max_value=2 * n))
    poly = random_poly(1, degree, seed)
    got = quadrature_mean(poly, NodeSet(n))
    scale = max(1.0, float(np.abs(poly.coeffs).max()))
    assert abs(got - poly.coef(0)) < 1e-11 * scale


# ---------------------------------------------------------------------------
# norm ratios


def test_ratio_is_one_for_constants():
    assert mz_ratio(TrigPoly.constant(3.0, 1), NodeSet(4), 0.5) == pytest.approx(
        1.0, rel=1e-6
    )


def test_ratio_is_one_for_unimodular_mode():
    poly = TrigPoly.from_modes(1, 2, {2: 1.0})
    assert mz_ratio(poly, NodeSet(4), 0.5) == pytest.approx(1.0, rel=1e-3)


def test_ratio_rejects_zero_polynomial():
    with pytest.raises(DegenerateNorm):
        mz_ratio(TrigPoly.zero(1, 2), NodeSet(4), 1.0)


def test_ratio_rejects_bad_exponent():
    poly = TrigPoly.constant(1.0, 1)
    with pytest.raises(ValueError):
        mz_ratio(poly, NodeSet(2), 0.0)
    with pytest.raises(ValueError):
        mz_ratio(poly, NodeSet(2), -1.0)


def test_window_kernel_ratios_stay_bounded():
    # discrete p-means of the low-pass window track the continuous norm
    for n in (8, 16, 32, 64):
        r = mz_ratio(make_vallee(n, 1), NodeSet(2 * n), 0.5, oversample=32)
        assert 0.5 <= r <= 2.0


def test_random_ratio_sweep():
    # probed worst case over this family is ~1.06
    worst = 0.0
    for seed in range(10):
        poly = random_poly(1, 16, seed=seed)
        r = mz_ratio(poly, NodeSet(32), 0.5)
        worst = max(worst, max(r, 1.0 / r))
    assert worst < 1.5


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
