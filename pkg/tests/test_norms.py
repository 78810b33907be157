import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varmms import (SequenceSample, holder_inequality_check, holder_seminorm,
                    lebesgue_embedding_constant, luxemburg, median,
                    median_bound_check, mixed_modular_closed_form,
                    mixed_modular_lq_lp, mixed_norm_lp_lq, mixed_norm_lq_lp,
                    mixed_norm_lq_lp_constant_q, modular, monotonicity_check,
                    pointwise_lq, rel_sandwich_check)
from varmms.generators import line_space

W2 = np.array([0.5, 0.5])


def test_modular_examples():
    assert modular(np.zeros(4), 2.0, np.ones(4)) == 0.0
    assert modular([2.0, 2.0], [1.0, 2.0], W2) == pytest.approx(3.0)
    # constant function on a unit-mass space
    assert modular([1.5, 1.5], 2.0, W2) == pytest.approx(1.5 ** 2)


def test_luxemburg_analytic_two_point():
    nv = luxemburg([2.0, 2.0], [1.0, 2.0], W2)
    assert nv.value == pytest.approx(2.0, abs=1e-8)


def test_luxemburg_zero_and_constant():
    assert luxemburg(np.zeros(3), 1.5, np.ones(3)).value == 0.0
    # mass one, constant exponent: norm is the absolute value
    assert luxemburg([3.0, 3.0], 1.7, W2).value == pytest.approx(3.0, rel=1e-9)
    assert luxemburg([-3.0, -3.0], 1.7, W2).value == pytest.approx(3.0, rel=1e-9)


@given(st.floats(-50, 50), st.integers(0, 10_000))
@settings(max_examples=100, deadline=None)
def test_luxemburg_homogeneity(c, seed):
    rng = np.random.default_rng(seed)
    n = rng.integers(1, 8)
    u = rng.standard_normal(n)
    p = rng.uniform(0.5, 3.0, n)
    w = rng.uniform(0.1, 2.0, n)
    base = luxemburg(u, p, w).value
    scaled = luxemburg(c * u, p, w).value
    assert scaled == pytest.approx(abs(c) * base, rel=1e-8, abs=1e-12)


def test_unit_ball_equivalence_random():
    rng = np.random.default_rng(10)
    for _ in range(50):
        n = rng.integers(1, 9)
        u = rng.standard_normal(n) * rng.uniform(0.1, 10)
        p = rng.uniform(0.5, 3.0, n)
        w = rng.uniform(0.1, 2.0, n)
        nrm = luxemburg(u, p, w).value
        if nrm == 0:
            continue
        assert modular(u / nrm, p, w) <= 1.0 + 1e-9
        assert modular(u / (nrm * (1 - 1e-9)), p, w) > 1.0


def test_quasi_triangle_with_working_constant():
    rng = np.random.default_rng(11)
    for _ in range(50):
        n = rng.integers(2, 8)
        u = rng.standard_normal(n)
        v = rng.standard_normal(n)
        p = rng.uniform(0.5, 3.0, n)
        w = rng.uniform(0.1, 2.0, n)
        kappa = 2.0 ** (1.0 / p.min())
        lhs = luxemburg(u + v, p, w).value
        rhs = kappa * (luxemburg(u, p, w).value + luxemburg(v, p, w).value)
        assert lhs <= rhs + 1e-8 + 1e-6 * rhs


def test_rel_sandwich_seeds_and_edges():
    for seed in (0, 1, 2):
        rng = np.random.default_rng(seed)
        n = rng.integers(2, 10)
        rep = rel_sandwich_check(rng.standard_normal(n), rng.uniform(0.6, 3.0, n),
                                 rng.uniform(0.1, 2.0, n))
        assert rep["ok"], rep
    # constant exponent: equality with the modular power
    u = np.array([1.0, -2.0, 0.5])
    w = np.array([0.3, 0.4, 0.3])
    rep = rel_sandwich_check(u, 2.0, w)
    assert rep["norm"] == pytest.approx(modular(u, 2.0, w) ** 0.5, rel=1e-9)
    rep0 = rel_sandwich_check(np.zeros(3), 2.0, w)
    assert rep0["ok"] and rep0["norm"] == 0.0


def test_holder_inequality():
    ok = holder_inequality_check([1.0, 1.0], [1.0, 1.0], 2.0, W2)
    assert ok["lhs"] == pytest.approx(1.0) and ok["ok"]
    zero = holder_inequality_check(np.zeros(2), [1.0, 2.0], 2.0, W2)
    assert zero["lhs"] == 0.0 and zero["ok"]
    rng = np.random.default_rng(3)
    n = 6
    rep = holder_inequality_check(rng.standard_normal(n), rng.standard_normal(n),
                                  rng.uniform(1.2, 3.0, n), rng.uniform(0.1, 1.0, n))
    assert rep["ok"], rep
    with pytest.raises(ValueError):
        holder_inequality_check([1.0], [1.0], 1.0, [1.0])


def test_lebesgue_embedding_constant_and_harness():
    c = lebesgue_embedding_constant(1.0, 2.0, W2)
    assert c == pytest.approx(2.0, rel=1e-9)
    rng = np.random.default_rng(4)
    for _ in range(20):
        n = rng.integers(2, 8)
        w = rng.uniform(0.05, 0.5, n)
        p = rng.uniform(0.8, 1.5, n)
        q = p + rng.uniform(0.3, 1.5, n)
        cc = lebesgue_embedding_constant(p, q, w)
        u = rng.standard_normal(n)
        assert luxemburg(u, p, w).value <= cc * luxemburg(u, q, w).value * (1 + 1e-8)
    with pytest.raises(ValueError):
        lebesgue_embedding_constant(2.0, 2.0, W2)


# -- mixed sequence norms -----------------------------------------------------

def test_mixed_modular_infinite_q_feasibility_switch():
    w = np.array([1.0, 1.0])
    small = SequenceSample(0, np.array([[0.5, 0.5]]))
    big = SequenceSample(0, np.array([[2.0, 2.0]]))
    p = np.full(2, 2.0)
    q = np.full(2, np.inf)
    assert mixed_modular_lq_lp(small, p, q, w) == 0.0
    assert mixed_modular_lq_lp(big, p, q, w) == np.inf
    # the norm is the per-level Lebesgue norm
    assert mixed_norm_lq_lp(big, p, q, w).value == pytest.approx(
        luxemburg([2.0, 2.0], p, w).value, rel=1e-9)


def test_mixed_zero_sequence():
    seq = SequenceSample(-1, np.zeros((3, 4)))
    p = np.full(4, 1.5)
    assert mixed_modular_lq_lp(seq, p, 2.0, np.ones(4)) == 0.0
    assert mixed_norm_lq_lp(seq, p, 2.0, np.ones(4)).value == 0.0
    assert mixed_norm_lp_lq(seq, p, 2.0, np.ones(4)).value == 0.0


def test_constant_q_norm_formula_cross_check():
    rng = np.random.default_rng(5)
    for q_const in (1.0, 2.0, 3.5):
        n, L = 5, 3
        w = rng.uniform(0.2, 1.0, n)
        p = rng.uniform(0.8, 2.5, n)
        seq = SequenceSample(-1, rng.uniform(0, 1.5, (L, n)))
        defn = mixed_norm_lq_lp(seq, p, q_const, w).value
        formula = mixed_norm_lq_lp_constant_q(seq, p, q_const, w).value
        assert defn == pytest.approx(formula, rel=1e-7, abs=1e-9)


def test_mixed_modular_self_cross_check_flag():
    rng = np.random.default_rng(13)
    n, L = 4, 3
    w = rng.uniform(0.2, 1.0, n)
    p = rng.uniform(0.8, 2.5, n)
    q = rng.uniform(0.9, 3.0, n)
    seq = SequenceSample(0, rng.uniform(0, 2.0, (L, n)))
    val = mixed_modular_lq_lp(seq, p, q, w, cross_check=True)
    assert np.isfinite(val)


def test_finite_q_closed_form_matches_definition():
    rng = np.random.default_rng(6)
    for _ in range(10):
        n, L = 6, 4
        w = rng.uniform(0.2, 1.0, n)
        p = rng.uniform(0.8, 2.5, n)
        q = rng.uniform(0.9, 4.0, n)
        seq = SequenceSample(-2, rng.uniform(0, 2.0, (L, n)))
        assert mixed_modular_lq_lp(seq, p, q, w) == pytest.approx(
            mixed_modular_closed_form(seq, p, q, w), rel=1e-7, abs=1e-9)
    with pytest.raises(ValueError):
        mixed_modular_closed_form(SequenceSample(0, np.ones((1, 2))),
                                  np.ones(2), np.full(2, np.inf), np.ones(2))


def test_lp_lq_single_level_and_doubling():
    rng = np.random.default_rng(7)
    n = 5
    w = rng.uniform(0.2, 1.0, n)
    p = rng.uniform(0.8, 2.5, n)
    row = rng.uniform(0, 2, n)
    single = SequenceSample(0, row[None, :])
    assert mixed_norm_lp_lq(single, p, rng.uniform(1, 3, n), w).value == pytest.approx(
        luxemburg(row, p, w).value, rel=1e-9)
    twice = SequenceSample(0, np.vstack([row, row]))
    assert mixed_norm_lp_lq(twice, p, 1.0, w).value == pytest.approx(
        luxemburg(2 * row, p, w).value, rel=1e-9)


def test_pointwise_lq_sup_and_sum():
    seq = SequenceSample(0, np.array([[1.0, 3.0], [2.0, 4.0]]))
    q = np.array([np.inf, 2.0])
    out = pointwise_lq(seq, q)
    assert out[0] == 2.0
    assert out[1] == pytest.approx(5.0)


def test_mixed_modular_equality_when_q_equals_p():
    # both mixed modulars coincide with the level sum of plain modulars
    rng = np.random.default_rng(8)
    n, L = 5, 3
    w = rng.uniform(0.2, 1.0, n)
    p = rng.uniform(0.8, 2.5, n)
    seq = SequenceSample(0, rng.uniform(0, 2, (L, n)))
    lqlp = mixed_modular_lq_lp(seq, p, p, w)
    plain = sum(modular(row, p, w) for row in seq.values)
    tl_inner = pointwise_lq(seq, p)
    assert lqlp == pytest.approx(plain, rel=1e-9)
    assert modular(tl_inner, p, w) == pytest.approx(plain, rel=1e-12)


def test_monotonicity_check_cases():
    rng = np.random.default_rng(4)
    n, L = 5, 3
    w = rng.uniform(0.2, 1.0, n)
    p = rng.uniform(0.9, 2.5, n)
    seq = SequenceSample(0, rng.uniform(0, 1.5, (L, n)))
    eq = monotonicity_check(seq, p, 2.0, 2.0, w)
    assert eq["ok"]
    assert eq["besov"][0] == pytest.approx(eq["besov"][1], rel=1e-9)
    rep = monotonicity_check(seq, p, 1.0, 2.0, w)
    assert rep["ok"], rep
    zero = monotonicity_check(SequenceSample(0, np.zeros((2, n))), p, 1.0, 2.0, w)
    assert zero["ok"] and zero["besov"] == (0.0, 0.0)
    with pytest.raises(ValueError):
        monotonicity_check(seq, p, 2.0, 1.0, w)


def test_interpolation_splitting_inequality():
    from varmms import interpolation_splitting_check
    rng = np.random.default_rng(14)
    for _ in range(10):
        n = int(rng.integers(2, 9))
        u = rng.standard_normal(n)
        w = rng.uniform(0.1, 1.0, n)
        q0 = rng.uniform(1.0, 1.5, n)
        q = q0 + rng.uniform(0.3, 0.8, n)
        q1 = q + rng.uniform(0.3, 0.8, n)
        rep = interpolation_splitting_check(u, q0, q, q1, w)
        assert rep["conjugacy_error"] <= 1e-12
        assert rep["ok"], rep
    zero = interpolation_splitting_check(np.zeros(3), 1.0, 1.5, 2.0, np.ones(3))
    assert zero["lhs"] == 0.0 and zero["ok"]
    with pytest.raises(ValueError):
        interpolation_splitting_check(np.ones(2), 2.0, 1.5, 3.0, np.ones(2))


# -- Hoelder seminorm and median ----------------------------------------------

def test_holder_seminorm_cases():
    sp = line_space(4)
    assert holder_seminorm(np.full(4, 2.5), 1.0, sp) == 0.0
    u = sp.dist[0]
    assert holder_seminorm(u, 1.0, sp) == pytest.approx(1.0)
    assert holder_seminorm(3.0 * u, 1.0, sp) == pytest.approx(3.0)


def test_holder_seminorm_asymmetric_exponent():
    sp = line_space(2)
    u = np.array([0.0, 1.0])
    alpha = np.array([1.0, 0.5])
    # exponent taken at the first argument of each ordered pair
    sp2 = line_space(2)
    d = 1.0
    expected = max(1.0 / d ** 1.0, 1.0 / d ** 0.5)
    assert holder_seminorm(u, alpha, sp2) == pytest.approx(expected)


def test_median_examples():
    assert median(np.full(3, 4.2), np.ones(3)) == 4.2
    assert median(np.array([0.0, 1.0]), W2) == 1.0


def test_median_shift_scale_abs_props():
    rng = np.random.default_rng(9)
    for _ in range(100):
        n = rng.integers(1, 9)
        u = rng.standard_normal(n)
        w = rng.uniform(0.1, 2.0, n)
        m = median(u, w)
        c = float(rng.standard_normal())
        assert median(u + c, w) == pytest.approx(m + c, abs=1e-12)
        cpos = float(rng.uniform(0.1, 5.0))
        assert median(cpos * u, w) == pytest.approx(cpos * m, rel=1e-12, abs=1e-12)
        assert abs(m) <= median(np.abs(u), w) + 1e-12


def test_median_bound_equality_instance():
    rep = median_bound_check(np.array([0.0, 1.0]), W2, 1.0, c=0.0)
    assert rep["lhs"] == pytest.approx(1.0)
    assert rep["rhs"] == pytest.approx(1.0, abs=1e-12)
    assert rep["ok"]


def test_median_bound_trivial_and_random():
    rep = median_bound_check(np.full(4, 2.0), np.ones(4), 1.5, c=2.0)
    assert rep["lhs"] == 0.0 and rep["ok"]
    rng = np.random.default_rng(5)
    n = 7
    rep2 = median_bound_check(rng.standard_normal(n), rng.uniform(0.1, 1.0, n),
                              rng.uniform(0.6, 3.0, n), c=float(rng.standard_normal()))
    assert rep2["ok"], rep2
