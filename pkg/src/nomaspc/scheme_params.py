"""System configuration, antenna-user selection parameters, and the
channel-gain CDFs they induce.

Both selection methods jointly pick a transmit antenna and a user (plus a
receive branch under selection combining) to maximise one link's channel
power gain; the other cluster then sees that transmit antenna as random and
optimises only over its own users/branches.  Under i.i.d. Nakagami-m fading
every post-selection gain is the maximum of `a` i.i.d. Gamma variates with
`b` stages each, so its CDF is

    F(x) = (1 - e^{-m x/lam} * sum_{p<b} (m x/lam)^p / p!)^a ,

which expands, via the binomial and multinomial theorems, into a finite sum
of signed terms  coeff * x^phi * e^{-omega x}.  That term list is what the
closed-form BLER expressions integrate analytically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Iterator

import numpy as np
from scipy import special as _sc

from .errors import CombinatorialBlowup, PrecisionLoss

__all__ = [
    "SelectionMethod",
    "Diversity",
    "Link",
    "SystemConfig",
    "SchemeSelect",
    "EffectiveOrderParams",
    "CdfTerm",
    "CdfExpansion",
    "effective_params",
    "enumerate_compositions",
    "build_cdf_expansion",
    "evaluate_cdf",
]

# Above this diversity exponent a*b the expansion's alternating terms are
# numerically fragile in float64, so point evaluation defaults to the
# un-expanded product form.
_EXPANSION_AB_LIMIT = 16

DEFAULT_COMPOSITION_CAP = 10**6


class SelectionMethod(Enum):
    """Which cluster's user/antenna pair is jointly optimised."""

    HCS = "hcs"  # high-priority cluster selection
    LCS = "lcs"  # low-priority cluster selection


class Diversity(Enum):
    """Receive-side combining scheme (transmit side always uses TAS)."""

    TAS_SC = "tas_sc"
    TAS_MRC = "tas_mrc"


class Link(Enum):
    """Which downlink the gain refers to."""

    SH = "sh"  # base station -> selected high-priority user
    SL = "sl"  # base station -> selected low-priority user


@dataclass(frozen=True)
class SystemConfig:
    """Static system parameters: antenna counts, cluster sizes, fading
    shapes, geometry, and the average transmit SNR (linear)."""

    k_s: int = 2  # transmit antennas at the base station
    k_h: int = 2  # receive antennas per high-priority user
    k_l: int = 2  # receive antennas per low-priority user
    users_h: int = 1  # users in the high-priority cluster
    users_l: int = 1  # users in the low-priority cluster
    m_h: int = 2  # Nakagami shape on the H link
    m_l: int = 2  # Nakagami shape on the L link
    d_sh: float = 5.0  # distance to the H user, metres
    d_sl: float = 5.0  # distance to the L user, metres
    theta: float = 2.5  # path-loss exponent
    gamma0: float = 100.0  # average transmit SNR, linear

    def __post_init__(self) -> None:
        for name in ("k_s", "k_h", "k_l", "users_h", "users_l"):
            val = getattr(self, name)
            if not (isinstance(val, int) and val >= 1):
                raise ValueError(f"{name} must be an integer >= 1, got {val!r}")
        for name in ("m_h", "m_l"):
            val = getattr(self, name)
            if not (isinstance(val, int) and val >= 1):
                raise ValueError(
                    f"{name} must be an integer >= 1 for the closed-form path, got {val!r}"
                )
        for name in ("d_sh", "d_sl", "theta", "gamma0"):
            val = getattr(self, name)
            if not val > 0:
                raise ValueError(f"{name} must be > 0, got {val!r}")

    @property
    def lambda_sh(self) -> float:
        """Mean channel power gain of the H link (path loss d^-theta)."""
        return self.d_sh**-self.theta

    @property
    def lambda_sl(self) -> float:
        return self.d_sl**-self.theta

    def with_gamma0(self, gamma0: float) -> "SystemConfig":
        """Copy of this config at a different average SNR."""
        return SystemConfig(
            self.k_s, self.k_h, self.k_l, self.users_h, self.users_l,
            self.m_h, self.m_l, self.d_sh, self.d_sl, self.theta, gamma0,
        )


@dataclass(frozen=True)
class SchemeSelect:
    """A (selection method, combining scheme, link) triple."""

    method: SelectionMethod
    diversity: Diversity
    link: Link


@dataclass(frozen=True)
class EffectiveOrderParams:
    """Order-statistic parameters of one post-selection channel gain.

    The gain is distributed as the max of `a` i.i.d. Gamma(b, lam/m)
    variates; a*b is the diversity exponent of the link.
    """

    a: int  # i.i.d. branches maximised over
    b: int  # Gamma stages per branch
    lam: float  # mean power gain per fading stage group
    m: int  # Nakagami shape

    def __post_init__(self) -> None:
        if self.a < 1 or self.b < 1 or self.m < 1:
            raise ValueError("a, b, m must all be >= 1")
        if not self.lam > 0:
            raise ValueError("lam must be > 0")

    @property
    def rate(self) -> float:
        """Exponential rate m/lam appearing in every CDF term."""
        return self.m / self.lam

    @property
    def diversity_exponent(self) -> int:
        return self.a * self.b


def effective_params(cfg: SystemConfig, sel: SchemeSelect) -> EffectiveOrderParams:
    """Map a (method, diversity, link) triple to its (a, b, lam, m).

    The jointly-optimised link maximises over the transmit antennas as
    well; the other link sees the chosen transmit antenna as random and
    maximises only over its own users (and receive branches under SC).
    Under MRC the receive branches are summed instead of maximised, which
    moves the receive-antenna count from `a` into `b`.
    """
    sc = sel.diversity is Diversity.TAS_SC
    if sel.link is Link.SH:
        m, lam, k_u, users = cfg.m_h, cfg.lambda_sh, cfg.k_h, cfg.users_h
        joint = sel.method is SelectionMethod.HCS
    else:
        m, lam, k_u, users = cfg.m_l, cfg.lambda_sl, cfg.k_l, cfg.users_l
        joint = sel.method is SelectionMethod.LCS
    b = m if sc else m * k_u
    a = users * (k_u if sc else 1)
    if joint:
        a *= cfg.k_s
    return EffectiveOrderParams(a=a, b=b, lam=lam, m=m)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_compositions(
    p: int, b: int, cap: int = DEFAULT_COMPOSITION_CAP
) -> list[tuple[int, ...]]:
    """All nonnegative integer vectors (d_0, ..., d_{b-1}) with sum p.

    Exactly the multinomial index set; the count is C(p+b-1, b-1).
    Raises CombinatorialBlowup before enumerating if the count exceeds cap.
    """
    if p < 1 or b < 1:
        raise ValueError("enumerate_compositions requires p >= 1 and b >= 1")
    count = math.comb(p + b - 1, b - 1)
    if count > cap:
        raise CombinatorialBlowup(
            f"{count} compositions of {p} into {b} parts exceeds cap {cap}"
        )
    return list(_compositions(p, b))


@dataclass(frozen=True)
class CdfTerm:
    """One signed term coeff * x^phi * e^{-omega x} of an expanded CDF.

    The coefficient is carried as sign and log-magnitude: multinomials times
    factorial powers overflow float64 well before the expansion itself stops
    being useful.  (p, delta) record which binomial/multinomial cell the term
    came from so higher-precision consumers can rebuild the coefficient
    exactly.
    """

    p: int
    delta: tuple[int, ...]
    phi: int
    omega: float
    sign: int
    log_coeff: float

    @property
    def coeff(self) -> float:
        return self.sign * math.exp(self.log_coeff)


@dataclass(frozen=True)
class CdfExpansion:
    """A selection-gain CDF as 1 + sum of signed exponential-polynomial terms.

    Immutable and safely shareable across threads.  `evaluate` uses the term
    list with exact (fsum) accumulation; `evaluate_product` uses the
    un-expanded product form, which is cancellation-free and preferred for
    large diversity exponents.
    """

    params: EffectiveOrderParams
    terms: tuple[CdfTerm, ...]
    constant: float = 1.0

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    @property
    def clamp_tolerance(self) -> float:
        return 1e-9 * self.n_terms

    def evaluate(self, x: float) -> float:
        """Evaluate the term expansion at x >= 0.

        The raw sum must land within clamp_tolerance of [0, 1]; anything
        further out indicates cancellation beyond benign rounding and raises
        PrecisionLoss rather than being silently clamped.
        """
        if x < 0:
            raise ValueError("CDF argument must be >= 0")
        if x == 0.0:
            vals = [t.sign * math.exp(t.log_coeff) for t in self.terms if t.phi == 0]
        else:
            lx = math.log(x)
            vals = [
                t.sign * math.exp(t.log_coeff + t.phi * lx - t.omega * x)
                for t in self.terms
            ]
        raw = self.constant + math.fsum(vals)
        eps = self.clamp_tolerance
        if raw < -eps or raw > 1.0 + eps:
            raise PrecisionLoss(
                f"expanded CDF value {raw!r} at x={x!r} outside [0,1] by more "
                f"than {eps:.1e} (a*b={self.params.diversity_exponent})"
            )
        return min(1.0, max(0.0, raw))

    def evaluate_product(self, x):
        """Evaluate the un-expanded product form (regularised lower
        incomplete gamma to the a-th power); accepts scalars or arrays."""
        arr = np.asarray(x, dtype=float)
        if np.any(arr < 0):
            raise ValueError("CDF argument must be >= 0")
        p = self.params
        out = _sc.gammainc(p.b, p.rate * arr) ** p.a
        if np.ndim(x) == 0:
            return float(out)
        return out

    def cdf(self, x: float) -> float:
        """Point evaluation, dispatching to the product form when the
        diversity exponent makes the expansion numerically fragile."""
        if self.params.diversity_exponent > _EXPANSION_AB_LIMIT:
            return self.evaluate_product(x)
        return self.evaluate(x)


def build_cdf_expansion(
    params: EffectiveOrderParams, cap: int = DEFAULT_COMPOSITION_CAP
) -> CdfExpansion:
    """Expand (1 - sum_{q<b} (mx/lam)^q e^{-mx/lam}/q!)^a into explicit terms.

    For each outer binomial index p in 1..a and each composition delta of p
    into b parts the term is

        (-1)^p C(a,p) multinomial(p; delta)
            * prod_q (m^q / (q! lam^q))^{delta_q} * x^phi * e^{-p m x / lam}

    with phi = sum_q q*delta_q.  Coefficients are assembled in log space.
    """
    a, b, m, lam = params.a, params.b, params.m, params.lam
    log_m, log_lam = math.log(m), math.log(lam)
    terms: list[CdfTerm] = []
    for p in range(1, a + 1):
        omega = p * params.rate
        log_binom = math.lgamma(a + 1) - math.lgamma(p + 1) - math.lgamma(a - p + 1)
        for delta in enumerate_compositions(p, b, cap=cap):
            phi = sum(q * d for q, d in enumerate(delta))
            log_multi = math.lgamma(p + 1) - sum(math.lgamma(d + 1) for d in delta)
            log_prod = sum(
                d * (q * log_m - math.lgamma(q + 1) - q * log_lam)
                for q, d in enumerate(delta)
            )
            terms.append(
                CdfTerm(
                    p=p,
                    delta=tuple(delta),
                    phi=phi,
                    omega=omega,
                    sign=-1 if p % 2 else 1,
                    log_coeff=log_binom + log_multi + log_prod,
                )
            )
    return CdfExpansion(params=params, terms=tuple(terms))


@lru_cache(maxsize=256)
def _cached_expansion(params: EffectiveOrderParams) -> CdfExpansion:
    return build_cdf_expansion(params)


def expansion_for(cfg: SystemConfig, sel: SchemeSelect) -> CdfExpansion:
    """Convenience: the (cached) CDF expansion of one selection law."""
    return _cached_expansion(effective_params(cfg, sel))


def evaluate_cdf(expansion: CdfExpansion, x: float) -> float:
    """Functional alias for CdfExpansion.evaluate."""
    return expansion.evaluate(x)
