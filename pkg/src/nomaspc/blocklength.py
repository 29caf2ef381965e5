"""Minimum blocklength and optimal power allocation at high SNR.

Inverting the asymptotic power-law BLERs at the reliability targets turns
both users' blocklengths into explicit functions of the power fraction
alpha_l: the high-priority blocklength rises with alpha_l (its SINR ceiling
tightens) while the low-priority one falls (its post-SIC SNR grows), so the
common minimum sits at the unique crossing, found by bisection.

The low-priority target couples to the high-priority one through the SIC
stage: decoding the H message at user L costs eta_l * eps_h^(DL/DH) of the
L budget before its own message is even considered.  If that floor already
exceeds eps_l the targets are infeasible at any power split or blocklength.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InfeasibleTargets, MaxIterations
from .scheme_params import (
    Diversity,
    Link,
    SchemeSelect,
    SelectionMethod,
    SystemConfig,
    effective_params,
)

__all__ = [
    "ReliabilityTargets",
    "OptimizationResult",
    "blocklength_h",
    "blocklength_l",
    "optimize_alpha",
    "oma_blocklength",
    "oma_user_blocklengths",
]


@dataclass(frozen=True)
class ReliabilityTargets:
    """Average-BLER targets for the two users."""

    eps_h: float = 1e-7
    eps_l: float = 1e-6

    def __post_init__(self) -> None:
        if not (0.0 < self.eps_h < 1.0 and 0.0 < self.eps_l < 1.0):
            raise ValueError("reliability targets must lie in (0, 1)")


@dataclass(frozen=True)
class OptimizationResult:
    """Outcome of the power-allocation bisection."""

    alpha_l_opt: float
    n_opt: float  # common blocklength at the crossing, channel uses (real)
    n_opt_ceil: int  # rounded up to whole channel uses
    iterations: int
    residual: float  # |N_l - N_h| at the returned point
    feasible: bool
    diagnosis: str = ""


def _link_orders(
    cfg: SystemConfig, method: SelectionMethod, diversity: Diversity
) -> tuple:
    ph = effective_params(cfg, SchemeSelect(method, diversity, Link.SH))
    pl = effective_params(cfg, SchemeSelect(method, diversity, Link.SL))
    return ph, pl


def _tau_h(cfg: SystemConfig, method: SelectionMethod, diversity: Diversity,
           eps_h: float) -> float:
    """Full-power SINR threshold the H link can afford at its target:
    (eps_h / eta_h)^(1/(a b)) with eta_h the power-law constant."""
    ph, _ = _link_orders(cfg, method, diversity)
    ab = ph.a * ph.b
    log_eta_h = (
        ab * (math.log(ph.m) - math.log(ph.lam) - math.log(cfg.gamma0))
        - ph.a * math.lgamma(ph.b + 1)
    )
    return math.exp((math.log(eps_h) - log_eta_h) / ab)


def _tau_l(cfg: SystemConfig, method: SelectionMethod, diversity: Diversity,
           targets: ReliabilityTargets) -> float:
    """Post-SIC SNR threshold the L link can afford after spending the SIC
    coupling term of its budget; raises InfeasibleTargets when that term
    alone exceeds the L target."""
    ph, pl = _link_orders(cfg, method, diversity)
    ab_h = ph.a * ph.b
    ab_l = pl.a * pl.b
    log_eta_l = (
        (ab_l / ph.b) * math.lgamma(ph.b + 1)
        - pl.a * math.lgamma(pl.b + 1)
        + ab_l * (math.log(pl.m) + math.log(ph.lam) - math.log(ph.m) - math.log(pl.lam))
    )
    coupling = math.exp(log_eta_l + (ab_l / ab_h) * math.log(targets.eps_h))
    headroom = targets.eps_l - coupling
    if headroom <= 0.0:
        raise InfeasibleTargets(
            f"SIC stage already costs {coupling:.3e} of the L-user budget "
            f"{targets.eps_l:.3e}; target unreachable at any power split"
        )
    log_eta_hat_l = ab_l * (math.log(pl.m) - math.log(pl.lam)) - pl.a * math.lgamma(
        pl.b + 1
    )
    return cfg.gamma0 * math.exp((math.log(headroom) - log_eta_hat_l) / ab_l)


def blocklength_h(
    alpha_l: float,
    cfg: SystemConfig,
    method: SelectionMethod,
    diversity: Diversity,
    targets: ReliabilityTargets,
    n_bits_h: int,
) -> float:
    """Blocklength the H user needs at power fraction alpha_l; strictly
    increasing in alpha_l."""
    if not 0.0 <= alpha_l < 0.5:
        raise ValueError("alpha_l must lie in [0, 0.5)")
    tau = _tau_h(cfg, method, diversity, targets.eps_h)
    return n_bits_h / math.log2((1.0 + tau) / (1.0 + alpha_l * tau))


def blocklength_l(
    alpha_l: float,
    cfg: SystemConfig,
    method: SelectionMethod,
    diversity: Diversity,
    targets: ReliabilityTargets,
    n_bits_l: int,
) -> float:
    """Blocklength the L user needs at power fraction alpha_l; strictly
    decreasing in alpha_l, diverging as alpha_l -> 0."""
    if not 0.0 < alpha_l < 0.5:
        raise ValueError("alpha_l must lie in (0, 0.5)")
    tau = _tau_l(cfg, method, diversity, targets)
    return n_bits_l / math.log2(1.0 + alpha_l * tau)


def optimize_alpha(
    cfg: SystemConfig,
    method: SelectionMethod,
    diversity: Diversity,
    targets: ReliabilityTargets,
    n_bits_h: int,
    n_bits_l: int,
    tol: float = 1e-9,
    max_iter: int = 200,
) -> OptimizationResult:
    """Bisection for the power fraction equalising the two blocklengths.

    f(alpha) = N_l(alpha) - N_h(alpha) is strictly decreasing from +inf, so
    a root in (0, 0.5) exists iff f(0.5-) < 0; otherwise the constraint
    boundary binds and the result is flagged infeasible.  The loop is plain
    interval halving on the sign of f with |f| <= tol as the exit test.
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    tau_h = _tau_h(cfg, method, diversity, targets.eps_h)
    tau_l = _tau_l(cfg, method, diversity, targets)  # raises if infeasible

    def f(alpha: float) -> float:
        if alpha <= 0.0:
            return math.inf
        return n_bits_l / math.log2(1.0 + alpha * tau_l) - n_bits_h / math.log2(
            (1.0 + tau_h) / (1.0 + alpha * tau_h)
        )

    hi_probe = 0.5 - 1e-15
    if f(hi_probe) >= 0.0:
        n_b = n_bits_h / math.log2((1.0 + tau_h) / (1.0 + hi_probe * tau_h))
        return OptimizationResult(
            alpha_l_opt=0.5,
            n_opt=n_b,
            n_opt_ceil=math.ceil(n_b),
            iterations=0,
            residual=abs(f(hi_probe)),
            feasible=False,
            diagnosis="blocklengths do not cross inside (0, 0.5); "
            "the alpha_l < 0.5 boundary binds",
        )

    lo, hi = 0.0, 0.5
    mid = 0.5 * (lo + hi)
    iterations = 0
    while abs(f(mid)) > tol:
        if iterations >= max_iter:
            raise MaxIterations(
                f"bisection residual {abs(f(mid)):.3e} > tol {tol:.1e} "
                f"after {max_iter} iterations"
            )
        if f(mid) * f(lo) > 0.0:
            lo = mid
        else:
            hi = mid
        mid = 0.5 * (lo + hi)
        iterations += 1
    n_opt = n_bits_h / math.log2((1.0 + tau_h) / (1.0 + mid * tau_h))
    return OptimizationResult(
        alpha_l_opt=mid,
        n_opt=n_opt,
        n_opt_ceil=math.ceil(n_opt),
        iterations=iterations,
        residual=abs(f(mid)),
        feasible=True,
    )


def oma_user_blocklengths(
    cfg: SystemConfig,
    method: SelectionMethod,
    diversity: Diversity,
    targets: ReliabilityTargets,
    n_bits_h: int,
    n_bits_l: int,
) -> tuple[float, float]:
    """Single-user minimum blocklengths under orthogonal access: each user
    gets the full power and its own channel uses, with no SIC coupling."""
    ph, pl = _link_orders(cfg, method, diversity)
    tau_h = _tau_h(cfg, method, diversity, targets.eps_h)
    n_hat_h = 0.0 if n_bits_h == 0 else n_bits_h / math.log2(1.0 + tau_h)
    ab_l = pl.a * pl.b
    log_eta_hat_l = ab_l * (math.log(pl.m) - math.log(pl.lam)) - pl.a * math.lgamma(
        pl.b + 1
    )
    tau_hat_l = cfg.gamma0 * math.exp(
        (math.log(targets.eps_l) - log_eta_hat_l) / ab_l
    )
    n_hat_l = 0.0 if n_bits_l == 0 else n_bits_l / math.log2(1.0 + tau_hat_l)
    return n_hat_h, n_hat_l


def oma_blocklength(
    cfg: SystemConfig,
    method: SelectionMethod,
    diversity: Diversity,
    targets: ReliabilityTargets,
    n_bits_h: int,
    n_bits_l: int,
) -> float:
    """Total orthogonal-access blocklength: the sum of both users'
    single-user minima."""
    n_hat_h, n_hat_l = oma_user_blocklengths(
        cfg, method, diversity, targets, n_bits_h, n_bits_l
    )
    return n_hat_h + n_hat_l
