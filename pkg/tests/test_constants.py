import math

import numpy as np
import pytest

from varmms import constants as K


def test_beta_p():
    assert K.beta_p(1.0) == pytest.approx(6.0)
    assert K.beta_p(2.0) == pytest.approx(4.0 + math.sqrt(2.0))


def test_cover_multiplicity_bound_monotone():
    assert K.cover_multiplicity_bound(1, 2.0, 1.0) == pytest.approx(1.0)
    assert K.cover_multiplicity_bound(4, 2.0, 1.0) == pytest.approx(64 * 2 ** 2)
    assert (K.cover_multiplicity_bound(4, 3.0, 1.0)
            > K.cover_multiplicity_bound(4, 2.0, 1.0))


def test_log_comparability_factor_floor():
    assert K.log_comparability_factor(0.1, 2.0, 0.0) == 1.0
    assert K.log_comparability_factor(1.0, 1.0, 0.0) == pytest.approx(4.0)
    assert K.log_comparability_factor(0.1, 2.0, 1.0) == pytest.approx(math.e)


def test_lipschitz_constants_finite_and_infinite_branches():
    a1 = K.lipschitz_A1(2.0, 0.5, 0.5)
    expected = (4.0 ** 2 / (1 - 2 ** -1.0) + 1 / (1 - 2 ** -1.0)) ** 0.5
    assert a1 == pytest.approx(expected)
    assert K.lipschitz_A1(np.inf, 0.5, 1.0) == 4.0
    assert K.lipschitz_A2(np.inf, 0.5, 1.0) == 5.0
    with pytest.raises(ValueError):
        K.lipschitz_A1(2.0, 0.5, 1.0)
    assert K.lipschitz_constant(2.0, 0.5, 0.5) >= a1


def test_sobolev_threshold_constants_ordering():
    args = dict(b=0.5, sigma=2.0, Q_minus=2.0, Q_plus=2.0, p_plus=1.0,
                p_minus=1.0, r0=0.25)
    m = K.sobolev_M(**args)
    assert m >= 1.0
    assert K.sobolev_L(**args) == pytest.approx(0.5 * m)
    assert K.sobolev_U(**args) == pytest.approx(8.0 * m)


def test_local_embedding_lambda_formula():
    # mass 2 makes the max term exactly 2; kappa**2 = 2**(2/2) = 2
    lam = K.local_embedding_lambda(2.0, 2.0, 1.5)
    assert lam == pytest.approx(2.0 * 2.0 * 1.5)


def test_morrey_DH():
    val = K.morrey_DH(1.0, 0.5, 2.0, 1.0, 0.25)
    assert val == pytest.approx(2.0 ** 1.5 * (2.0 / 0.25) ** 0.5)


def test_zeta_requires_gap():
    p = np.full(3, 1.5)
    s = np.full(3, 0.8)
    t = np.full(3, 0.5)
    z = K.besov_to_sobolev_zeta(p, s, t, delta=0.5)
    assert z > 0
    with pytest.raises(ValueError):
        K.besov_to_sobolev_zeta(p, t, s, delta=0.5)


def test_necessity_eta_positive():
    r_prime, eta = K.necessity_eta(0.5, 2.0, 0.5)
    assert 0 < r_prime < 0.25 + 1e-12
    assert eta > 0


def test_necessity_b_values_positive_and_antitone_in_constant():
    kwargs = dict(s_minus=0.4, s_plus=0.6, gamma_minus=2.0, gamma_plus=2.5,
                  Q_minus=1.0, Q_plus=1.2, c_log_inv_gamma=0.1, c_log_gamma=0.4,
                  c_log_s=0.2, c_log_Q=0.3)
    b1 = K.necessity_b_global_sobolev(1.0, 5.0, **kwargs)
    b2 = K.necessity_b_global_sobolev(10.0, 5.0, **kwargs)
    assert 0 < b2 < b1
    bl = K.necessity_b_local_sobolev(1.0, 5.0, 0.1, **kwargs)
    assert bl > 0
    bm = K.necessity_b_moser(1.0, 2.0, 5.0, 0.1, 1.0, s_minus=0.4, s_plus=0.6,
                             Q_minus=1.0, Q_plus=1.2)
    assert bm > 0
    bh = K.necessity_b_holder(1.0, 5.0, 0.1, p_minus=1.0, p_plus=1.5, s_plus=0.6,
                              alpha_plus=0.3, c_log_s=0.2, c_log_alpha=0.1,
                              c_log_p=0.3)
    assert bh > 0


def test_threshold_rescale_factor():
    assert K.threshold_rescale_factor(1.0, 2.0, 2.0) == pytest.approx(0.25)
    assert K.threshold_rescale_factor(1.0, 1.0, 3.0) == 1.0
    with pytest.raises(ValueError):
        K.threshold_rescale_factor(2.0, 1.0, 1.0)


def test_global_holder_G():
    assert K.global_holder_G(4.0, 0.5, 1.0) == pytest.approx(2.0)
    assert K.global_holder_G(1.0, 0.5, 1.0) == pytest.approx(8.0)
