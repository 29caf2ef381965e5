"""Special functions and adaptive quadrature used by the closed-form BLER
expressions.

Everything here is a thin, contract-checked layer over scipy: the Gaussian
Q-function, the exponential integral Ei, the (non-regularised) upper
incomplete gamma function, and a general-purpose adaptive integrator that
serves as the semi-analytic oracle for the closed forms.

All functions are pure and thread-safe.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate as _sciint
from scipy import special as _sc

from .errors import NonConvergence

__all__ = [
    "QuadratureSpec",
    "IntegralResult",
    "gaussian_q",
    "exp_integral_ei",
    "upper_incomplete_gamma",
    "integrate",
]

# Largest order for which (a-1)! fits in a float; above this the exact
# integer-order path would overflow anyway, so the generic path is used.
_MAX_FACTORIAL_ORDER = 170


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and budget for adaptive integration.

    The defaults are intentionally an order of magnitude tighter than any
    acceptance tolerance in the library, so quadrature results can arbitrate
    disagreements between analytic code paths.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 200

    def __post_init__(self) -> None:
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be strictly positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


class IntegralResult(NamedTuple):
    value: float
    error_estimate: float


def gaussian_q(x):
    """Gaussian tail probability Q(x) = P(Z > x) for standard normal Z.

    Computed as 0.5*erfc(x/sqrt(2)); accepts scalars or numpy arrays.
    Strictly decreasing, range (0, 1), saturating to 0/1 in the far tails.
    """
    out = 0.5 * _sc.erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(out)
    return out


def exp_integral_ei(x: float) -> float:
    """Exponential integral Ei(x), Cauchy principal value for x > 0.

    For x < 0 this equals -E1(-x). The logarithmic singularity at the
    origin is a domain error.
    """
    if x == 0:
        raise ValueError("Ei(x) is undefined at x = 0")
    return float(_sc.expi(x))


def upper_incomplete_gamma(a: float, x: float) -> float:
    """Non-regularised upper incomplete gamma: integral of t^(a-1) e^-t
    from x to infinity.

    Requires a > 0 and x >= 0. For integer a the exact finite sum
    (a-1)! e^-x sum_k x^k/k! is used (no quadrature, no cancellation);
    the general path falls back to scipy's regularised routine.
    """
    if a <= 0:
        raise ValueError("upper_incomplete_gamma requires a > 0")
    if x < 0:
        raise ValueError("upper_incomplete_gamma requires x >= 0")
    a_int = round(a)
    if a == a_int and a_int <= _MAX_FACTORIAL_ORDER:
        if x == 0.0:
            return float(math.factorial(a_int - 1))
        # (a-1)! * sum_k exp(k ln x - ln k! - x); exp-scaled per term so
        # large x cannot overflow the partial sums.
        lx = math.log(x)
        terms = [math.exp(k * lx - math.lgamma(k + 1) - x) for k in range(a_int)]
        return math.factorial(a_int - 1) * math.fsum(terms)
    return float(_sc.gammaincc(a, x) * _sc.gamma(a))


def integrate(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    spec: QuadratureSpec = QuadratureSpec(),
) -> IntegralResult:
    """Adaptive quadrature of f over [lo, hi] meeting spec's tolerances.

    Returns the estimate together with the integrator's error estimate.
    Raises NonConvergence if the subdivision budget is exhausted or the
    reported error exceeds both tolerances.
    """
    if not lo < hi:
        raise ValueError("integration interval requires lo < hi")
    with warnings.catch_warnings():
        warnings.simplefilter("error", _sciint.IntegrationWarning)
        try:
            value, err = _sciint.quad(
                f,
                lo,
                hi,
                epsabs=spec.abs_tol,
                epsrel=spec.rel_tol,
                limit=spec.max_subdivisions,
            )
        except _sciint.IntegrationWarning as exc:
            raise NonConvergence(str(exc)) from exc
    if err > max(spec.abs_tol, spec.rel_tol * abs(value)):
        raise NonConvergence(
            f"error estimate {err:.3e} exceeds tolerances for integral value {value:.6e}"
        )
    return IntegralResult(float(value), float(err))
