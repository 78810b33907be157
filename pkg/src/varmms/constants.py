"""Explicit formula constants used by the verification harness.

Every function here evaluates a closed-form constant so the harness can put
a "formula" value next to the empirical one in its reports.  Several
inequality constants in the underlying estimates exist only as dependency
statements (no closed form); those are always reported empirically and have
no evaluator here.  Each docstring names exactly which log-regularity
constant (of f or of 1/f) enters the formula.
"""
from __future__ import annotations

import math

import numpy as np

__all__ = [
    "beta_p",
    "cover_multiplicity_bound",
    "log_comparability_factor",
    "lipschitz_A1",
    "lipschitz_A2",
    "lipschitz_constant",
    "sobolev_M",
    "sobolev_L",
    "sobolev_U",
    "local_embedding_lambda",
    "morrey_DH",
    "besov_to_sobolev_zeta",
    "global_holder_G",
    "necessity_eta",
    "necessity_b_global_sobolev",
    "necessity_b_local_sobolev",
    "necessity_b_moser",
    "necessity_b_holder",
    "threshold_rescale_factor",
]


def beta_p(p_minus: float) -> float:
    """Normalization constant 4 + 2**(1/p^-) used by the local inequalities."""
    return 4.0 + 2.0 ** (1.0 / p_minus)


def cover_multiplicity_bound(M: int, R: float, r: float) -> float:
    """Overlap bound M**3 * (R/r)**log2(M) for nets at scale r inflated to R."""
    return float(M ** 3) * (R / r) ** math.log2(max(M, 1))


def log_comparability_factor(r: float, t_minus: float, c_log_inv_t: float) -> float:
    """M(r, t) = max{1, (2r)**(2/t^-), e**C} with C = C_log(1/t) on the ball."""
    return max(1.0, (2.0 * r) ** (2.0 / t_minus), math.exp(c_log_inv_t))


def lipschitz_A1(q_minus: float, s_minus: float, s_plus: float) -> float:
    """Pointwise bound constant for the cut-off gradient in the TL scale.

    Finite only for s^+ < 1 (at s^+ = 1 the tail over the fine levels
    diverges unless q^- = inf).
    """
    if not np.isfinite(q_minus):
        return 4.0
    if s_plus >= 1.0:
        raise ValueError("needs max s < 1 when min q is finite")
    return ((4.0 ** q_minus) / (1.0 - 2.0 ** (-q_minus * s_minus))
            + 1.0 / (1.0 - 2.0 ** (-q_minus * (1.0 - s_plus)))) ** (1.0 / q_minus)


def lipschitz_A2(q_minus: float, s_minus: float, s_plus: float) -> float:
    """Level-sum bound constant for the cut-off gradient in the Besov scale."""
    if not np.isfinite(q_minus):
        return 5.0
    if s_plus >= 1.0:
        raise ValueError("needs max s < 1 when min q is finite")
    first = (2.0 ** (2.0 * q_minus + 1.0) / (1.0 - 2.0 ** (-s_minus * q_minus))) ** (1.0 / q_minus)
    second = (2.0 / (1.0 - 2.0 ** (-q_minus * (1.0 - s_plus))) ** (1.0 / q_minus)) ** (1.0 / q_minus)
    return 2.0 ** (1.0 / q_minus) * (first + second)


def lipschitz_constant(q_minus: float, s_minus: float, s_plus: float) -> float:
    """Single constant dominating both cut-off gradient norm bounds."""
    return max(lipschitz_A1(q_minus, s_minus, s_plus),
               lipschitz_A2(q_minus, s_minus, s_plus))


def sobolev_M(b: float, sigma: float, Q_minus: float, Q_plus: float,
              p_plus: float, p_minus: float, r0: float) -> float:
    """Dyadic threshold constant M(b, sigma, Q, p, r0) of the local Sobolev
    argument (extrema of Q and p taken over the inflated ball)."""
    bp = beta_p(p_minus)
    denom = 1.0 - 2.0 ** (-1.0 / Q_plus)
    first = (b ** ((Q_minus - Q_plus) / Q_minus) * 2.0 ** (2.0 * Q_plus + 1.0)
             / ((sigma - 1.0) ** Q_plus * denom ** Q_plus))
    second = (2.0 ** (2.0 * Q_minus + 1.0) * r0 ** (Q_plus - Q_minus)
              * bp ** (p_plus * (1.0 - Q_minus / Q_plus))
              / ((sigma - 1.0) ** Q_minus * denom ** Q_minus))
    return max(first, second, 1.0)


def sobolev_L(b, sigma, Q_minus, Q_plus, p_plus, p_minus, r0) -> float:
    return 0.5 * sobolev_M(b, sigma, Q_minus, Q_plus, p_plus, p_minus, r0)


def sobolev_U(b, sigma, Q_minus, Q_plus, p_plus, p_minus, r0) -> float:
    return 8.0 * sobolev_M(b, sigma, Q_minus, Q_plus, p_plus, p_minus, r0)


def local_embedding_lambda(mu_B0: float, gamma_minus_B0: float, norm_one_gamma: float) -> float:
    """Lambda(B0) with the working quasi-triangle constant 2**(1/gamma^-)."""
    kappa = 2.0 ** (1.0 / gamma_minus_B0)
    return kappa ** 2 * max(2.0, (2.0 / mu_B0) ** (1.0 / gamma_minus_B0)) * norm_one_gamma


def morrey_DH(C_H: float, alpha_plus: float, sigma: float, delta: float, r0: float) -> float:
    """Hoelder-quotient constant 2**(alpha^+ + 1) C_H (sigma delta / ((sigma-1) r0))**alpha^+."""
    return 2.0 ** (alpha_plus + 1.0) * C_H * (sigma * delta / ((sigma - 1.0) * r0)) ** alpha_plus


def besov_to_sobolev_zeta(p_vals, s_vals, t_vals, delta: float) -> float:
    """Operator constant zeta(p, s, t, delta) from the Besov-to-Sobolev
    reduction on balls of radius at most delta; extrema over the ball."""
    p = np.asarray(p_vals, dtype=float)
    gap = np.asarray(s_vals, dtype=float) - np.asarray(t_vals, dtype=float)
    gap_minus, gap_plus = float(gap.min()), float(gap.max())
    if gap_minus <= 0:
        raise ValueError("needs s >> t on the ball")
    p_minus, p_plus = float(p.min()), float(p.max())
    Z = (max((4.0 * delta) ** (gap_plus * p_plus), (4.0 * delta) ** (gap_minus * p_minus))
         / (1.0 - 2.0 ** (-p_minus * gap_minus)))
    return max(Z ** (1.0 / p_minus), Z ** (1.0 / p_plus))


def global_holder_G(delta: float, alpha_minus: float, alpha_plus: float) -> float:
    """Large-separation constant 2 max{(4/delta)**alpha^+, (4/delta)**alpha^-}."""
    return 2.0 * max((4.0 / delta) ** alpha_plus, (4.0 / delta) ** alpha_minus)


def necessity_eta(c_log_inv_gamma: float, Q_plus: float, s_minus: float) -> tuple[float, float]:
    """Radius threshold r' and exponent gap eta of the necessity argument.

    Consumes C_log(1/gamma).  Returns (r_prime, eta) with eta > 0.
    """
    r_prime = 0.5 * min(0.25, 0.5 * math.exp(-c_log_inv_gamma * Q_plus / s_minus))
    eta = s_minus / Q_plus - c_log_inv_gamma / math.log(1.0 / (2.0 * r_prime))
    return r_prime, eta


def _necessity_c2(c_log_s: float, c_log_gamma: float, s_plus: float, gamma_minus: float,
                  gamma_plus: float, Q_plus: float, eta: float) -> float:
    """Oscillation factor c2; consumes C_log(s) and C_log(gamma) directly."""
    return ((math.exp(-c_log_s) * 2.0 ** (-s_plus)) ** (1.0 / eta)
            * (math.exp(-c_log_gamma) * 2.0 ** (-gamma_plus)) ** (Q_plus / (eta * gamma_minus ** 2)))


def necessity_b_global_sobolev(C_SG: float, C_lip: float, *, s_minus: float, s_plus: float,
                               gamma_minus: float, gamma_plus: float, Q_minus: float,
                               Q_plus: float, c_log_inv_gamma: float, c_log_gamma: float,
                               c_log_s: float, c_log_Q: float) -> float:
    """Lower regularity constant forced by a global Lebesgue-scale embedding
    with operator constant C_SG."""
    _, eta = necessity_eta(c_log_inv_gamma, Q_plus, s_minus)
    c1 = 1.0 / (max(1.0, C_SG * C_lip * 4.0 ** s_plus) ** (1.0 / eta)
                * 2.0 ** (s_plus / (gamma_minus * eta ** 2) + s_plus / eta))
    c2 = _necessity_c2(c_log_s, c_log_gamma, s_plus, gamma_minus, gamma_plus, Q_plus, eta)
    return c1 * c2 * math.exp(-c_log_Q) * 2.0 ** (Q_minus - Q_plus)


def necessity_b_local_sobolev(C_S: float, C_lip: float, lam: float, *, s_minus: float,
                              s_plus: float, gamma_minus: float, gamma_plus: float,
                              Q_minus: float, Q_plus: float, c_log_inv_gamma: float,
                              c_log_gamma: float, c_log_s: float, c_log_Q: float) -> float:
    """Lower regularity constant forced by the local Poincare-type inequality
    on a uniformly perfect space with annulus constant lam."""
    _, eta = necessity_eta(c_log_inv_gamma, Q_plus, s_minus)
    c3 = 24.0 * C_lip * C_S / lam ** 2
    c5 = 1.0 / (max(1.0, c3) ** (1.0 / eta)
                * 2.0 ** (1.0 / (gamma_minus * eta ** 2) + 1.0 / eta))
    c2 = _necessity_c2(c_log_s, c_log_gamma, s_plus, gamma_minus, gamma_plus, Q_plus, eta)
    return min(c5, 1.0) * c2 * math.exp(-c_log_Q) * 2.0 ** (Q_minus - Q_plus)


def necessity_b_moser(C_MT1: float, C_MT2: float, C_lip: float, lam: float, omega: float, *,
                      s_minus: float, s_plus: float, Q_minus: float, Q_plus: float) -> float:
    """Lower regularity constant forced by the exponential-integrability
    inequality (critical case Q = s p)."""
    c6 = ((2.0 * Q_plus / (s_minus * omega)) ** (1.0 / omega)
          * C_MT2 ** (s_plus / (2.0 * Q_minus)) * (24.0 / lam ** 2) * (C_lip / C_MT1))
    return max(c6, 1.0) ** (-Q_plus / s_minus) * 2.0 ** (-2.0 * s_plus * Q_plus / s_minus)


def necessity_b_holder(D_HG: float, C_lip: float, lam: float, *, p_minus: float,
                       p_plus: float, s_plus: float, alpha_plus: float,
                       c_log_s: float, c_log_alpha: float, c_log_p: float) -> float:
    """Lower regularity constant forced by a Hoelder-scale embedding with
    operator constant D_HG; consumes C_log(s), C_log(alpha), C_log(p)."""
    c8 = lam ** (p_plus * s_plus) / max(1.0, D_HG * C_lip) ** p_plus
    c9 = min(1.0, math.exp(c_log_s - c_log_alpha) * 2.0 ** (-alpha_plus - s_plus)) ** p_plus
    return c8 * c9 * min(math.exp(c_log_p) * 2.0 ** (p_minus - p_plus), 1.0) ** s_plus


def threshold_rescale_factor(delta: float, delta_prime: float, Q_plus: float) -> float:
    """Factor (delta/delta')**Q^+ converting a lower bound valid up to radius
    delta into one valid up to delta' >= delta."""
    if not delta_prime >= delta > 0:
        raise ValueError("needs delta' >= delta > 0")
    return (delta / delta_prime) ** Q_plus
