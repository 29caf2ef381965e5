"""End-to-end link simulator: the oracle that is independent of every
analytic approximation.

Each trial draws the post-selection channel gains, forms the three decoding
SINRs, and evaluates the instantaneous Q-form BLER directly (not the
piecewise-linear surrogate the closed forms integrate).  Because all branch
gains are i.i.d., the selected transmit antenna is a uniformly random one
from the other cluster's point of view, so the post-selection gains reduce
to maxima of independent Gamma draws; a literal argmax over fully
materialised channel matrices is kept as a debug path to validate that
shortcut.

Runs are deterministic for a fixed seed: trials are processed in fixed-size
batches, each with its own child RNG stream, and batch results are reduced
with exact (fsum) summation in batch order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bler import DispersionMode, PacketSpec, PowerSplit, instantaneous_bler
from .scheme_params import (
    Diversity,
    Link,
    SchemeSelect,
    SelectionMethod,
    SystemConfig,
    effective_params,
)

__all__ = [
    "SimPlan",
    "MonteCarloReport",
    "sample_link_gain",
    "select_gains",
    "select_hcs",
    "select_lcs",
    "select_gains_literal",
    "run",
]

GENERATOR_NAME = "numpy-PCG64"


@dataclass(frozen=True)
class SimPlan:
    """Trial budget, seed, batching, and instantaneous-BLER variant."""

    trials: int = 10**6
    seed: int = 0
    batch: int = 10**4
    dispersion: DispersionMode = DispersionMode.PAPER

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 1 <= self.batch <= self.trials:
            raise ValueError("batch must satisfy 1 <= batch <= trials")


@dataclass(frozen=True)
class MonteCarloReport:
    """Simulated average BLERs with 95% normal-approximation half-widths.

    bler_l is the per-trial composition of the SIC stage with the
    own-message stage, so it can never fall below bler_l_sic by more than
    sampling noise.
    """

    bler_h: float
    bler_l_sic: float
    bler_l: float
    ci_h: float
    ci_l_sic: float
    ci_l: float
    trials_used: int
    seed: int
    generator: str = GENERATOR_NAME


def sample_link_gain(
    m: float, lam: float, branches: int, rng: np.random.Generator, size=None
):
    """One post-combining channel power gain: the sum of `branches` i.i.d.
    squared-Nakagami gains, i.e. a Gamma(m*branches, lam/m) draw.

    Accepts non-integer m (> 0.5) for simulation-only studies; the
    closed-form path requires integer shapes.
    """
    if m <= 0.5:
        raise ValueError("Nakagami shape must exceed 0.5")
    if lam <= 0 or branches < 1:
        raise ValueError("lam must be > 0 and branches >= 1")
    return rng.gamma(shape=m * branches, scale=lam / m, size=size)


def select_gains(
    cfg: SystemConfig,
    method: SelectionMethod,
    diversity: Diversity,
    rng: np.random.Generator,
    size: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Post-selection gains (g_sh, g_sl) for `size` independent trials.

    Each link's gain is the max over its effective branch count `a` of
    i.i.d. Gamma(b, lam/m) draws; independence across links is exact
    because the branch fades are i.i.d. (the chosen transmit antenna is
    random from the other cluster's perspective).
    """
    out = []
    for link in (Link.SH, Link.SL):
        p = effective_params(cfg, SchemeSelect(method, diversity, link))
        draws = rng.gamma(shape=p.b, scale=p.lam / p.m, size=(size, p.a))
        out.append(draws.max(axis=1))
    return out[0], out[1]


def select_hcs(
    cfg: SystemConfig, diversity: Diversity, rng: np.random.Generator, size: int = 1
):
    """Gains under high-priority cluster selection."""
    return select_gains(cfg, SelectionMethod.HCS, diversity, rng, size)


def select_lcs(
    cfg: SystemConfig, diversity: Diversity, rng: np.random.Generator, size: int = 1
):
    """Gains under low-priority cluster selection."""
    return select_gains(cfg, SelectionMethod.LCS, diversity, rng, size)


def select_gains_literal(
    cfg: SystemConfig,
    method: SelectionMethod,
    diversity: Diversity,
    rng: np.random.Generator,
    size: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Debug path: materialise the full per-antenna gain tensors and apply
    the selection rules literally (joint argmax over transmit antenna, user
    and branch for the prioritised cluster; per-user argmax at the fixed
    transmit antenna for the other). Ties broken by lowest index, which is
    probability-zero under continuous fading.

    Distribution must match select_gains; a test compares the two.
    """
    h = rng.gamma(
        cfg.m_h, cfg.lambda_sh / cfg.m_h, size=(size, cfg.k_s, cfg.users_h, cfg.k_h)
    )
    l = rng.gamma(
        cfg.m_l, cfg.lambda_sl / cfg.m_l, size=(size, cfg.k_s, cfg.users_l, cfg.k_l)
    )
    if diversity is Diversity.TAS_MRC:
        h = h.sum(axis=3)  # (size, k_s, users_h)
        l = l.sum(axis=3)
    else:
        h = h.reshape(size, cfg.k_s, -1)  # branches = users * antennas
        l = l.reshape(size, cfg.k_s, -1)
    joint, other = (h, l) if method is SelectionMethod.HCS else (l, h)
    flat = joint.reshape(size, -1)
    k_hat = np.unravel_index(flat.argmax(axis=1), joint.shape[1:])[0]
    g_joint = flat.max(axis=1)
    g_other = other[np.arange(size), k_hat, :].max(axis=1)
    if method is SelectionMethod.HCS:
        return g_joint, g_other
    return g_other, g_joint


def run(
    cfg: SystemConfig,
    method: SelectionMethod,
    diversity: Diversity,
    split: PowerSplit,
    pkt_h: PacketSpec,
    pkt_l: PacketSpec,
    plan: SimPlan,
) -> MonteCarloReport:
    """Simulate the full link and average the instantaneous BLERs.

    Per trial: the H user decodes its own message at the interference-
    limited SINR; the L user first decodes the H message (SIC stage) and,
    on success, its own message at the clean post-SIC SNR, composing
    eps_sic + (1 - eps_sic) * eps_own.
    """
    seed_seq = np.random.SeedSequence(plan.seed)
    n_batches = math.ceil(plan.trials / plan.batch)
    children = seed_seq.spawn(n_batches)

    sums = {"h": [], "l_sic": [], "l": []}
    sqsums = {"h": [], "l_sic": [], "l": []}
    done = 0
    for i in range(n_batches):
        size = min(plan.batch, plan.trials - done)
        rng = np.random.default_rng(children[i])
        g_sh, g_sl = select_gains(cfg, method, diversity, rng, size)
        gam_h = split.alpha_h * cfg.gamma0 * g_sh / (
            split.alpha_l * cfg.gamma0 * g_sh + 1.0
        )
        gam_l_sic = split.alpha_h * cfg.gamma0 * g_sl / (
            split.alpha_l * cfg.gamma0 * g_sl + 1.0
        )
        gam_l_own = split.alpha_l * cfg.gamma0 * g_sl
        eps_h = instantaneous_bler(gam_h, pkt_h, plan.dispersion)
        eps_sic = instantaneous_bler(gam_l_sic, pkt_h, plan.dispersion)
        eps_own = instantaneous_bler(gam_l_own, pkt_l, plan.dispersion)
        eps_l = eps_sic + (1.0 - eps_sic) * eps_own
        for key, eps in (("h", eps_h), ("l_sic", eps_sic), ("l", eps_l)):
            sums[key].append(float(np.sum(eps)))
            sqsums[key].append(float(np.sum(eps * eps)))
        done += size

    n = plan.trials
    means, cis = {}, {}
    for key in sums:
        total = math.fsum(sums[key])
        total_sq = math.fsum(sqsums[key])
        mean = total / n
        var = max(0.0, (total_sq - n * mean * mean) / (n - 1)) if n > 1 else 0.0
        means[key] = mean
        cis[key] = 1.96 * math.sqrt(var / n)
    return MonteCarloReport(
        bler_h=means["h"],
        bler_l_sic=means["l_sic"],
        bler_l=means["l"],
        ci_h=cis["h"],
        ci_l_sic=cis["l_sic"],
        ci_l=cis["l"],
        trials_used=n,
        seed=plan.seed,
    )
