"""High-SNR machinery: one-point Riemann BLER approximation, asymptotic
power-law BLERs, and diversity order.

The Riemann tier collapses the window integral to its midpoint, which is
exactly the channel CDF evaluated at the rate threshold beta.  The
asymptotic tier additionally replaces the CDF by its leading small-argument
power law, giving single-term expressions whose log-log slope against SNR
is the diversity order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .bler import (
    BlerEstimate,
    BlerMethod,
    PacketSpec,
    PowerSplit,
    Stage,
    _b_transform,
    _ceiling_violated,
    _check_window,
    _finish_deterministic,
)
from .errors import CeilingViolation
from .scheme_params import (
    Diversity,
    Link,
    SchemeSelect,
    SelectionMethod,
    SystemConfig,
    effective_params,
    expansion_for,
)

__all__ = [
    "DiversityReport",
    "riemann_bler",
    "asymptotic_bler_h",
    "asymptotic_bler_l",
    "diversity_order",
]


@dataclass(frozen=True)
class DiversityReport:
    """High-SNR log-log BLER slopes of both users under one method."""

    d_h: int
    d_l: int
    method: SelectionMethod


def diversity_order(cfg: SystemConfig, method: SelectionMethod) -> DiversityReport:
    """Diversity orders of both users; the jointly-optimised cluster picks
    up the transmit-antenna factor k_s, the other does not.  Identical for
    both combining schemes."""
    if method is SelectionMethod.HCS:
        d_h = cfg.m_h * cfg.k_s * cfg.k_h * cfg.users_h
        d_l = cfg.m_l * cfg.k_l * cfg.users_l
    else:
        d_h = cfg.m_h * cfg.k_h * cfg.users_h
        d_l = cfg.m_l * cfg.k_s * cfg.k_l * cfg.users_l
    return DiversityReport(d_h=d_h, d_l=d_l, method=method)


def riemann_bler(
    stage: Stage,
    cfg: SystemConfig,
    method: SelectionMethod,
    diversity: Diversity,
    split: PowerSplit,
    pkt_h: PacketSpec,
    pkt_l: Optional[PacketSpec] = None,
    *,
    saturate: bool = False,
) -> BlerEstimate:
    """One-point (midpoint) approximation: the exact channel CDF evaluated
    at the rate threshold beta of the relevant stage."""
    if stage is Stage.L:
        sic = riemann_bler(
            Stage.L_SIC, cfg, method, diversity, split, pkt_h, saturate=saturate
        )
        own = riemann_bler(Stage.L_OWN, cfg, method, diversity, split, pkt_h, pkt_l)
        value = sic.value + (1.0 - sic.value) * own.value
        return BlerEstimate(value=min(1.0, max(0.0, value)), method=BlerMethod.RIEMANN)

    if stage is Stage.L_OWN:
        if pkt_l is None:
            raise ValueError("stage L_OWN requires pkt_l")
        _check_window(pkt_l)
        expansion = expansion_for(cfg, SchemeSelect(method, diversity, Link.SL))
        raw = expansion.cdf(pkt_l.beta / (split.alpha_l * cfg.gamma0))
        return _finish_deterministic(raw, expansion, BlerMethod.RIEMANN)

    _check_window(pkt_h)
    link = Link.SH if stage is Stage.H else Link.SL
    expansion = expansion_for(cfg, SchemeSelect(method, diversity, link))
    if pkt_h.beta >= split.ceiling:
        if saturate:
            return BlerEstimate(1.0, BlerMethod.RIEMANN)
        raise CeilingViolation(
            f"threshold beta={pkt_h.beta:.6g} reaches the SINR ceiling "
            f"{split.ceiling:.6g}"
        )
    raw = expansion.cdf(_b_transform(pkt_h.beta, split, cfg.gamma0))
    return _finish_deterministic(raw, expansion, BlerMethod.RIEMANN)


def _power_law(log_arg: float, a: int, b: int) -> float:
    """(e^log_arg)^(a*b) / (b!)^a evaluated in log space to dodge
    under/overflow for large diversity exponents."""
    log_val = a * b * log_arg - a * math.lgamma(b + 1)
    if log_val < -745.0:
        return 0.0
    return math.exp(log_val)


def asymptotic_bler_h(
    cfg: SystemConfig,
    method: SelectionMethod,
    diversity: Diversity,
    split: PowerSplit,
    pkt_h: PacketSpec,
) -> float:
    """Leading high-SNR term of the H-user average BLER:
    (m B_beta / lam)^(a b) / (b!)^a, a pure power law of order a*b in 1/SNR.

    Unclamped: at low SNR the power law exceeds 1 by construction.
    """
    params = effective_params(cfg, SchemeSelect(method, diversity, Link.SH))
    if pkt_h.beta >= split.ceiling:
        raise CeilingViolation(
            f"threshold beta={pkt_h.beta:.6g} reaches the SINR ceiling "
            f"{split.ceiling:.6g}"
        )
    b_beta = _b_transform(pkt_h.beta, split, cfg.gamma0)
    return _power_law(math.log(params.m * b_beta / params.lam), params.a, params.b)


def asymptotic_bler_l(
    cfg: SystemConfig,
    method: SelectionMethod,
    diversity: Diversity,
    split: PowerSplit,
    pkt_h: PacketSpec,
    pkt_l: PacketSpec,
) -> float:
    """Leading high-SNR L-user average BLER: sum of the SIC-stage and
    own-stage power laws (the cross product term is higher order and
    dropped)."""
    params = effective_params(cfg, SchemeSelect(method, diversity, Link.SL))
    if pkt_h.beta >= split.ceiling:
        raise CeilingViolation(
            f"threshold beta={pkt_h.beta:.6g} reaches the SINR ceiling "
            f"{split.ceiling:.6g}"
        )
    b_sic = _b_transform(pkt_h.beta, split, cfg.gamma0)
    b_own = pkt_l.beta / (split.alpha_l * cfg.gamma0)
    return _power_law(
        math.log(params.m * b_sic / params.lam), params.a, params.b
    ) + _power_law(math.log(params.m * b_own / params.lam), params.a, params.b)
