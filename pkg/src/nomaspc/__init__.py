"""Link-level analysis of short-packet two-user MIMO-NOMA downlinks over
Nakagami-m fading: average block error rate (closed form, quadrature,
one-point and asymptotic tiers, Monte Carlo) and minimum-blocklength /
power-allocation optimisation, for two antenna-user selection methods (HCS,
LCS) under TAS/SC and TAS/MRC.
"""

from .asymptotics import (
    DiversityReport,
    asymptotic_bler_h,
    asymptotic_bler_l,
    diversity_order,
    riemann_bler,
)
from .bler import (
    BlerEstimate,
    BlerMethod,
    DispersionMode,
    PacketSpec,
    PowerSplit,
    Stage,
    avg_bler_closed,
    avg_bler_h_closed,
    avg_bler_l_closed,
    avg_bler_quadrature,
    instantaneous_bler,
    sinr_user_h,
    sinr_user_l_decode_h,
    snr_user_l_own,
)
from .blocklength import (
    OptimizationResult,
    ReliabilityTargets,
    blocklength_h,
    blocklength_l,
    oma_blocklength,
    oma_user_blocklengths,
    optimize_alpha,
)
from .errors import (
    CeilingViolation,
    CombinatorialBlowup,
    InfeasibleTargets,
    MaxIterations,
    NomaSpcError,
    NonConvergence,
    PrecisionLoss,
    ScenarioError,
)
from .montecarlo import (
    MonteCarloReport,
    SimPlan,
    run,
    sample_link_gain,
    select_gains,
    select_gains_literal,
    select_hcs,
    select_lcs,
)
from .scheme_params import (
    CdfExpansion,
    CdfTerm,
    Diversity,
    EffectiveOrderParams,
    Link,
    SchemeSelect,
    SelectionMethod,
    SystemConfig,
    build_cdf_expansion,
    effective_params,
    enumerate_compositions,
    evaluate_cdf,
    expansion_for,
)
from .specfun import (
    IntegralResult,
    QuadratureSpec,
    exp_integral_ei,
    gaussian_q,
    integrate,
    upper_incomplete_gamma,
)

__version__ = "0.1.0"
