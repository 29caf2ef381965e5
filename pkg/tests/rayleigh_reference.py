"""Independent Rayleigh-only (shape m = 1) average-BLER reference.

Written from the single-stage Gamma CDF directly, with its own binomial
expansion and mpmath numerics; deliberately does not import nomaspc, so it
can arbitrate the general multinomial machinery at m = 1.

Under Rayleigh fading the post-selection gain CDF is (1 - e^{-x/lam})^a, so
the window average needs nothing beyond plain exponentials:

  interference stage: numeric integration of the binomial sum of
      e^{-p B_x / lam} over the window;
  post-SIC stage: exact exponential antiderivative per binomial term.
"""

import math

import mpmath as mp

_DPS = 40


def _window(n_bits: int, blocklength: float):
    rate = n_bits / blocklength
    beta = 2.0**rate - 1.0
    chi = 1.0 / math.sqrt(2.0 * math.pi * (2.0 ** (2 * rate) - 1.0))
    half = 1.0 / (2.0 * chi * math.sqrt(blocklength))
    return beta, chi, beta - half, beta + half


def interference_stage(a, lam, gamma0, alpha_l, n_bits, blocklength):
    """Average BLER when the stage SINR is (1-al) g0 g / (al g0 g + 1)."""
    with mp.workdps(_DPS):
        _, chi, v, mu = _window(n_bits, blocklength)
        chi_sqrt_n = mp.mpf(chi) * mp.sqrt(mp.mpf(blocklength))
        g0, al = mp.mpf(gamma0), mp.mpf(alpha_l)
        ah = 1 - al
        lam_mp = mp.mpf(lam)

        def cdf_at_threshold(x):
            bx = x / (g0 * (ah - al * x))
            total = mp.mpf(0)
            for p in range(a + 1):
                total += (-1) ** p * math.comb(a, p) * mp.exp(-p * bx / lam_mp)
            return total

        integral = mp.quad(cdf_at_threshold, [mp.mpf(v), mp.mpf(mu)])
        return float(chi_sqrt_n * integral)


def direct_stage(a, lam, gamma0, alpha_l, n_bits, blocklength):
    """Average BLER when the stage SNR is al g0 g (post-SIC, clean)."""
    with mp.workdps(_DPS):
        _, chi, v, mu = _window(n_bits, blocklength)
        chi_sqrt_n = mp.mpf(chi) * mp.sqrt(mp.mpf(blocklength))
        scale = mp.mpf(lam) * mp.mpf(alpha_l) * mp.mpf(gamma0)
        total = chi_sqrt_n * (mp.mpf(mu) - mp.mpf(v))  # p = 0 term
        for p in range(1, a + 1):
            c = scale / p
            term = c * (mp.exp(-mp.mpf(v) / c) - mp.exp(-mp.mpf(mu) / c))
            total += (-1) ** p * math.comb(a, p) * chi_sqrt_n * term
        return float(total)


def bler_h(a_h, lam_h, gamma0, alpha_l, n_bits, blocklength):
    return interference_stage(a_h, lam_h, gamma0, alpha_l, n_bits, blocklength)


def bler_l(a_l, lam_l, gamma0, alpha_l, n_bits_h, blocklength_h, n_bits_l, blocklength_l):
    sic = interference_stage(a_l, lam_l, gamma0, alpha_l, n_bits_h, blocklength_h)
    own = direct_stage(a_l, lam_l, gamma0, alpha_l, n_bits_l, blocklength_l)
    return sic + (1.0 - sic) * own
