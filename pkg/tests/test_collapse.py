"""Torus collapse pipeline: approximant, sampling identity, candidate
assembly, certified bounds, and the (m, n) search.

The candidate builder is checked against a literal per-node translate
sum assembled here, and each certified bound against the measured
quantity it dominates.
"""

import json
import math

import numpy as np
import pytest

from kcollapse.collapse import (
    CollapseConfig,
    TestInput,
    _node_count,
    build_candidate,
    collapse_search,
    i2_quasi_triangle_bound,
    initial_approximant,
    measure_split,
    representation_identity_check,
    smooth_decay_poly,
    telescope_bound,
    theoretical_bounds,
)
from kcollapse.errors import (
    ApproximationTargetMissed,
    BudgetExhausted,
    InvalidSymbol,
)
from kcollapse.symbols import (
    HomogeneousSymbol,
    apply_multiplier,
    make_modified_vallee,
)
from kcollapse.torus import ExponentPair, TrigPoly, evaluate, quasi_norm, translate

FL1 = HomogeneousSymbol("fractional_laplacian", 1.0)
WEYL_HALF = HomogeneousSymbol("weyl", 0.5)


# ---------------------------------------------------------------------------
# test inputs


def test_smooth_decay_is_real_and_reproducible():
    f = smooth_decay_poly(1, 16, 0.5, seed=7)
    assert f.degree == 16
    assert f.is_real_valued()
    again = smooth_decay_poly(1, 16, 0.5, seed=7)
    assert np.array_equal(f.coeffs, again.coeffs)


def test_smooth_decay_moduli_follow_power_law():
    amp = 0.3
    f = smooth_decay_poly(1, 8, amp, seed=1)
    for k in range(1, 9):
        assert abs(f.coef(k)) == pytest.approx(amp * (1.0 + k) ** -4.0, rel=1e-12)
        assert f.coef(-k) == pytest.approx(np.conj(f.coef(k)))


def test_smooth_decay_two_dimensional_symmetry():
    f = smooth_decay_poly(2, 4, 1.0, seed=3)
    assert f.is_real_valued()
    for k1 in range(-4, 5):
        for k2 in range(-4, 5):
            assert f.coef((-k1, -k2)) == pytest.approx(np.conj(f.coef((k1, k2))))


def test_test_input_build_paths():
    poly = TrigPoly.from_modes(1, 1, {1: 1.0})
    assert TestInput(generator="explicit", poly=poly).build(1) is poly
    with pytest.raises(ValueError):
        TestInput(generator="explicit").build(1)  # no polynomial given
    with pytest.raises(ValueError):
        TestInput(generator="no_such_generator").build(1)
    with pytest.raises(ValueError):
        TestInput(generator="explicit", poly=poly).build(2)


def test_test_input_json_round_trip():
    ti = TestInput(degree=8, amplitude=0.25, seed=9)
    back = TestInput.from_json_dict(json.loads(json.dumps(ti.to_json_dict())))
    assert back == ti


# ---------------------------------------------------------------------------
# initial approximant


def test_low_degree_input_passes_through():
    f = smooth_decay_poly(1, 8, 1.0, seed=1)
    t_mu, err = initial_approximant(f, 16, 1.0)
    assert t_mu is f and err == 0.0


def test_approximation_error_decreases_in_mu():
    rng = np.random.default_rng(5)
    N = 4096
    c = np.zeros(2 * N + 1, dtype=np.complex128)
    for k in range(1, N + 1):
        z = (1.0 + k) ** -2.0 * np.exp(2j * np.pi * rng.uniform())
        c[N + k] = z
        c[N - k] = np.conj(z)
    f = TrigPoly(1, N, c)
    errs = [initial_approximant(f, mu, 1.0)[1] for mu in (64, 128, 256)]
    assert errs[0] > errs[1] > errs[2] > 0.0


def test_budget_violation_raises():
    f = smooth_decay_poly(1, 256, 1.0, seed=2)
    with pytest.raises(ApproximationTargetMissed):
        initial_approximant(f, 4, 1.0, budget=1e-12)


def test_approximant_rejects_bad_mu():
    f = smooth_decay_poly(1, 8, 1.0, seed=1)
    with pytest.raises(ValueError):
        initial_approximant(f, 0, 1.0)


# ---------------------------------------------------------------------------
# sampling representation


def test_identity_single_mode():
    t_mu = TrigPoly.from_modes(1, 1, {1: 1.0})
    assert representation_identity_check(t_mu, 2, FL1) < 1e-10


def test_identity_constant():
    t_mu = TrigPoly.constant(2.0, 1)
    # degree 0, any m works; the node sum contributes nothing, mean carries
    assert representation_identity_check(t_mu, 1, FL1) < 1e-12


def test_identity_smooth_input():
    t_mu = smooth_decay_poly(1, 8, 1.0, seed=4)
    assert representation_identity_check(t_mu, 4, WEYL_HALF) < 1e-9


def test_identity_two_dimensional():
    t_mu = smooth_decay_poly(2, 2, 1.0, seed=5)
    sym = HomogeneousSymbol("fractional_laplacian", 0.7, d=2)
    assert representation_identity_check(t_mu, 2, sym) < 1e-9


def test_identity_rejects_small_window():
    t_mu = smooth_decay_poly(1, 8, 1.0, seed=4)
    with pytest.raises(ValueError):
        representation_identity_check(t_mu, 2, FL1)  # 2^2 < 8


# ---------------------------------------------------------------------------
# candidate assembly


def node_sum_candidate(t_mu, m, n, sym):
    """Reference assembly: explicit translate per node, no spectral folding."""
    mu, d = t_mu.degree, t_mu.d
    assert d == 1
    M, G = _node_count(mu, m)
    nodes = 2.0 * np.pi * np.arange(G) / G
    a = evaluate(apply_multiplier(t_mu, "sine_ratio", sym), nodes)
    kernel = apply_multiplier(make_modified_vallee(n, 1), "inverse_symbol", sym)
    deg = kernel.degree
    acc = np.zeros(2 * deg + 1, dtype=np.complex128)
    for l in range(G):
        acc += a[l] * translate(kernel, (nodes[l],)).coeffs
    acc /= G
    acc[deg] += t_mu.mean
    return TrigPoly(1, deg, acc)


def test_candidate_matches_node_sum():
    t_mu = TrigPoly.from_modes(1, 1, {0: 0.3, 1: 1.0})
    g, _ = build_candidate(t_mu, 2, 3, FL1)
    ref = node_sum_candidate(t_mu, 2, 3, FL1)
    assert g.degree == ref.degree
    assert np.max(np.abs(g.coeffs - ref.coeffs)) < 1e-10


def test_candidate_at_matching_scale_reproduces_input():
    t_mu = smooth_decay_poly(1, 4, 1.0, seed=6)
    g, psi_d_g = build_candidate(t_mu, 3, 3, FL1)
    assert g.degree == 2**4
    # exact identity up to FFT rounding: no aliasing at the matching scale
    assert np.max(np.abs(g.coeffs - t_mu.with_degree(g.degree).coeffs)) < 1e-14
    I1, I2 = measure_split(t_mu, g, psi_d_g, ExponentPair(0.5, 1.0), 1.0)
    assert I1 < 1e-14
    assert I2 > 0.0


def test_candidate_degree_and_mean():
    t_mu = smooth_decay_poly(1, 4, 1.0, seed=6)
    g, _ = build_candidate(t_mu, 3, 5, FL1)
    assert g.degree == 2**6
    assert g.mean == pytest.approx(t_mu.mean, abs=1e-15)


def test_candidate_rejects_bad_scales():
    t_mu = smooth_decay_poly(1, 4, 1.0, seed=6)
    with pytest.raises(ValueError):
        build_candidate(t_mu, 3, 2, FL1)  # n < m
    with pytest.raises(ValueError):
        build_candidate(t_mu, 1, 3, FL1)  # 2^m < mu


def test_candidate_pair_is_consistent():
    # psi(D) applied to g must reproduce the separately assembled image
    t_mu = smooth_decay_poly(1, 8, 1.0, seed=8)
    g, psi_d_g = build_candidate(t_mu, 4, 6, WEYL_HALF)
    check = apply_multiplier(g, "symbol", WEYL_HALF)
    scale = max(1.0, float(np.abs(psi_d_g.coeffs).max()))
    assert np.max(np.abs(check.coeffs - psi_d_g.coeffs)) < 1e-9 * scale


# ---------------------------------------------------------------------------
# certified bounds


def test_telescope_closed_form_single_mode():
    # one unimodular mode: every node sample of the sine-ratio image has
    # modulus |psi(1)|/sin^2(1), so at q = 1 the bound factorizes exactly
    t_mu = TrigPoly.from_modes(1, 1, {1: 2.0})
    m, n = 2, 4
    got = telescope_bound(t_mu, m, n, FL1, 1.0)
    amp = 2.0 * abs(complex(1.0)) / math.sin(1.0) ** 2  # |c| |psi(1)| / sin^2 1
    total = 0.0
    for nu in range(m, n):
        diff = make_modified_vallee(nu + 1, 1) - make_modified_vallee(nu, 1)
        total += quasi_norm(apply_multiplier(diff, "inverse_symbol", FL1), 1.0)
    assert got == pytest.approx(amp * total, rel=1e-12)


def test_telescope_dominates_measured_alias_error():
    t_mu = TrigPoly.from_modes(1, 1, {1: 1.0})
    m, n = 2, 4
    g, psi_d_g = build_candidate(t_mu, m, n, FL1)
    I1, _ = measure_split(t_mu, g, psi_d_g, ExponentPair(0.5, 1.0), 1.0)
    bound = telescope_bound(t_mu, m, n, FL1, 1.0)
    assert I1 > 0.0  # aliasing is real at this scale gap
    assert I1 <= bound * (1.0 + 1e-9)


@pytest.mark.parametrize("m,n", [(4, 5), (5, 8)])
def test_i2_certificate_dominates_measured(m, n):
    t_mu = smooth_decay_poly(1, 8, 1.0, seed=9)
    g, psi_d_g = build_candidate(t_mu, m, n, WEYL_HALF)
    _, I2 = measure_split(t_mu, g, psi_d_g, ExponentPair(0.5, 1.0), 1.0)
    bound = i2_quasi_triangle_bound(t_mu, m, n, WEYL_HALF, 0.5)
    assert I2 <= bound * (1.0 + 1e-9)


def test_theory_shapes_scale_as_designed():
    pair = ExponentPair(0.5, 1.0)
    norms = {"alpha": 0.5, "d": 1}
    _, i2_a = theoretical_bounds(8, 4, 6, pair, norms)
    _, i2_b = theoretical_bounds(8, 4, 7, pair, norms)
    # one n step multiplies I2^p shape by 2^{d(p-1)}
    assert i2_b / i2_a == pytest.approx(2.0 ** (0.5 - 1.0), rel=1e-12)

    pair_q1 = ExponentPair(0.5, 1.0)
    i1_a, _ = theoretical_bounds(8, 4, 6, pair_q1, norms)
    i1_b, _ = theoretical_bounds(8, 5, 6, pair_q1, norms)
    # at q = 1 the node-count prefactor drops and the m step is pure decay
    assert i1_b / i1_a == pytest.approx(2.0**-0.5, rel=1e-12)


def test_node_count():
    assert _node_count(1, 3) == (17, 35)


# ---------------------------------------------------------------------------
# the search


def tiny_config(**kw):
    base = dict(
        exponents=ExponentPair(0.5, 1.0),
        symbol=WEYL_HALF,
        epsilon=0.5,
        mu=8,
        max_m=6,
        max_n=8,
        test_input=TestInput(degree=8, amplitude=1.0, seed=2),
    )
    base.update(kw)
    return CollapseConfig(**base)


def test_search_achieves_target():
    report = collapse_search(tiny_config())
    assert report.achieved
    assert report.K_upper < 0.5
    assert report.M == report.mu + 2 ** (report.m + 1)
    assert report.probes
    accepted = [pr.K_upper for pr in report.probes if pr.accepted]
    assert accepted == sorted(accepted, reverse=True)
    f = TestInput(degree=8, amplitude=1.0, seed=2).build(1)
    assert report.g.mean == pytest.approx(f.mean, abs=1e-15)


def test_search_with_tiny_delta():
    report = collapse_search(tiny_config(delta=1e-9))
    assert report.achieved
    assert report.K_upper < 1e-6


def test_search_with_infinite_q():
    cfg = tiny_config(
        exponents=ExponentPair(0.5, math.inf),
        symbol=HomogeneousSymbol("weyl", 1.5),
        epsilon=0.5,
    )
    report = collapse_search(cfg)
    assert report.achieved


def test_contrast_run_exhausts_spike_budget():
    # p = 1 removes the concentration discount; the spike leg cannot decay
    cfg = tiny_config(
        exponents=ExponentPair(1.0, 1.0),
        contrast=True,
        epsilon=1e-4,
        max_n=6,
    )
    with pytest.raises(BudgetExhausted) as exc_info:
        collapse_search(cfg)
    assert exc_info.value.leg == "I2"
    report = exc_info.value.report
    assert report is not None and not report.achieved


# ---------------------------------------------------------------------------
# config validation and serialization


def test_config_validation():
    with pytest.raises(ValueError):
        tiny_config(exponents=ExponentPair(1.0, 1.0))  # p = 1 needs contrast
    with pytest.raises(ValueError):
        tiny_config(exponents=ExponentPair(1.2, 1.0), contrast=True)
    with pytest.raises(InvalidSymbol):
        # d(1 - 1/q) = 0.5 at q = 2; alpha = 0.5 sits on the edge
        tiny_config(exponents=ExponentPair(0.5, 2.0), symbol=WEYL_HALF)
    with pytest.raises(ValueError):
        tiny_config(delta=0.0)
    with pytest.raises(ValueError):
        tiny_config(epsilon=-1.0)
    with pytest.raises(ValueError):
        tiny_config(mu=0)
    with pytest.raises(ValueError):
        tiny_config(symbol=HomogeneousSymbol("fractional_laplacian", 1.0, d=2))


def test_config_json_round_trip():
    cfg = tiny_config()
    back = CollapseConfig.from_json_dict(json.loads(json.dumps(cfg.to_json_dict())))
    assert back == cfg


def test_report_serialization():
    report = collapse_search(tiny_config())
    with_g = report.to_json_dict(include_g=True)
    without = report.to_json_dict(include_g=False)
    assert "g" in with_g and "g" not in without
    blob = json.dumps(with_g)  # must be JSON-serializable as-is
    parsed = json.loads(blob)
    assert parsed["achieved"] is True
    assert parsed["K_upper"] == pytest.approx(report.K_upper)
    assert len(parsed["probes"]) == len(report.probes)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
