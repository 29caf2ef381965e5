import math

import numpy as np
import pytest

from nomaspc import (
    Diversity,
    InfeasibleTargets,
    MaxIterations,
    PacketSpec,
    PowerSplit,
    ReliabilityTargets,
    SelectionMethod,
    SystemConfig,
    asymptotic_bler_h,
    asymptotic_bler_l,
    blocklength_h,
    blocklength_l,
    oma_blocklength,
    oma_user_blocklengths,
    optimize_alpha,
)

SC, MRC = Diversity.TAS_SC, Diversity.TAS_MRC
HCS, LCS = SelectionMethod.HCS, SelectionMethod.LCS


class TestBlocklengthFormulas:
    def test_frozen_n_h(self, opt_cfg, targets):
        # frozen: 50-digit evaluation of the inverted power law
        got = blocklength_h(0.3, opt_cfg, LCS, SC, targets, 80)
        assert got == pytest.approx(520.63056469747593, rel=1e-10)
        got = blocklength_h(0.3, opt_cfg, HCS, SC, targets, 80)
        assert got == pytest.approx(221.83438255322384, rel=1e-10)

    def test_frozen_n_l(self, opt_cfg, targets):
        got = blocklength_l(0.3, opt_cfg, LCS, SC, targets, 80)
        assert got == pytest.approx(373.56490784993281, rel=1e-10)
        got = blocklength_l(0.3, opt_cfg, LCS, MRC, targets, 80)
        assert got == pytest.approx(248.10351547164461, rel=1e-10)

    def test_h_zero_power_limit(self, opt_cfg, targets):
        # alpha_l -> 0 recovers the single-user (full power) blocklength
        lim = blocklength_h(0.0, opt_cfg, LCS, SC, targets, 80)
        n_hat_h, _ = oma_user_blocklengths(opt_cfg, LCS, SC, targets, 80, 80)
        assert lim == pytest.approx(n_hat_h, rel=1e-12)

    def test_h_monotone_up(self, opt_cfg, targets):
        assert blocklength_h(0.4, opt_cfg, LCS, SC, targets, 80) > blocklength_h(
            0.2, opt_cfg, LCS, SC, targets, 80
        )

    def test_l_monotone_down(self, opt_cfg, targets):
        assert blocklength_l(0.4, opt_cfg, LCS, SC, targets, 80) < blocklength_l(
            0.2, opt_cfg, LCS, SC, targets, 80
        )

    def test_l_diverges_at_zero_power(self, opt_cfg, targets):
        assert blocklength_l(1e-9, opt_cfg, LCS, SC, targets, 80) > 1e6

    def test_domain(self, opt_cfg, targets):
        with pytest.raises(ValueError):
            blocklength_h(0.6, opt_cfg, LCS, SC, targets, 80)
        with pytest.raises(ValueError):
            blocklength_l(0.0, opt_cfg, LCS, SC, targets, 80)

    def test_hcs_infeasible_at_equal_distances(self, opt_cfg, targets):
        # the SIC coupling term eta_l * eps_h^(1/2) = sqrt(1e-7) > eps_l
        with pytest.raises(InfeasibleTargets):
            blocklength_l(0.3, opt_cfg, HCS, SC, targets, 80)
        with pytest.raises(InfeasibleTargets):
            blocklength_l(0.3, opt_cfg, HCS, MRC, targets, 80)


class TestOptimizer:
    def test_frozen_lcs_sc(self, opt_cfg, targets):
        # frozen: 50-digit root of N_l(alpha) - N_h(alpha)
        res = optimize_alpha(opt_cfg, LCS, SC, targets, 80, 80)
        assert res.feasible
        assert res.alpha_l_opt == pytest.approx(0.23327909523091291, abs=1e-9)
        assert res.n_opt == pytest.approx(472.81941834644210, rel=1e-9)
        assert res.n_opt_ceil == 473
        assert res.residual <= 1e-9
        assert res.iterations <= 60

    def test_frozen_lcs_mrc(self, opt_cfg, targets):
        res = optimize_alpha(opt_cfg, LCS, MRC, targets, 80, 80)
        assert res.alpha_l_opt == pytest.approx(0.22967304553068322, abs=1e-9)
        assert res.n_opt == pytest.approx(316.12193484231535, rel=1e-9)

    def test_convergence_contract(self, opt_cfg, targets):
        res = optimize_alpha(opt_cfg, LCS, SC, targets, 80, 80, tol=1e-9)
        n_h = blocklength_h(res.alpha_l_opt, opt_cfg, LCS, SC, targets, 80)
        n_l = blocklength_l(res.alpha_l_opt, opt_cfg, LCS, SC, targets, 80)
        assert abs(n_l - n_h) <= 1e-9

    def test_grid_scan_agreement(self, opt_cfg, targets):
        res = optimize_alpha(opt_cfg, LCS, SC, targets, 80, 80)
        grid = np.linspace(1e-6, 0.5 - 1e-6, 10**4)
        f = np.array(
            [
                blocklength_l(a, opt_cfg, LCS, SC, targets, 80)
                - blocklength_h(a, opt_cfg, LCS, SC, targets, 80)
                for a in grid
            ]
        )
        k = int(np.argmin(np.abs(f)))
        cell = grid[1] - grid[0]
        assert abs(res.alpha_l_opt - grid[k]) <= cell

    def test_root_bracketing(self, opt_cfg, targets):
        # sign structure around the root: N_l - N_h decreasing through zero
        res = optimize_alpha(opt_cfg, LCS, SC, targets, 80, 80)
        d = 1e-4
        f = lambda a: blocklength_l(a, opt_cfg, LCS, SC, targets, 80) - blocklength_h(
            a, opt_cfg, LCS, SC, targets, 80
        )
        assert f(res.alpha_l_opt - d) > 0 > f(res.alpha_l_opt + d)

    def test_consistency_with_asymptotic_bler(self, opt_cfg, targets):
        # at (alpha_opt, N_opt) both users sit exactly on their targets
        res = optimize_alpha(opt_cfg, LCS, SC, targets, 80, 80)
        split = PowerSplit.from_alpha_l(res.alpha_l_opt)
        pkt = PacketSpec(80, res.n_opt)
        got_h = asymptotic_bler_h(opt_cfg, LCS, SC, split, pkt)
        got_l = asymptotic_bler_l(opt_cfg, LCS, SC, split, pkt, pkt)
        assert got_h == pytest.approx(targets.eps_h, rel=0.01)
        assert got_l == pytest.approx(targets.eps_l, rel=0.01)

    def test_bit_scaling(self, opt_cfg, targets):
        res1 = optimize_alpha(opt_cfg, LCS, SC, targets, 80, 80)
        res2 = optimize_alpha(opt_cfg, LCS, SC, targets, 160, 160)
        assert res2.n_opt == pytest.approx(2.0 * res1.n_opt, rel=1e-9)
        assert res2.alpha_l_opt == pytest.approx(res1.alpha_l_opt, abs=1e-8)

    def test_infeasible_propagates(self, opt_cfg, targets):
        with pytest.raises(InfeasibleTargets):
            optimize_alpha(opt_cfg, HCS, SC, targets, 80, 80)

    def test_no_crossing_boundary_diagnosis(self):
        # L barely feasible: its blocklength stays above the H curve on the
        # whole admissible interval, so the 0.5 boundary binds.  The SIC
        # coupling floor for HCS/SC here is (d_sl/d_sh)^(theta*8) * sqrt(eps_h).
        cfg = SystemConfig(users_h=2, users_l=2, d_sl=2.0)
        coupling = (2.0 / 5.0) ** (2.5 * 8) * math.sqrt(1e-7)
        targets = ReliabilityTargets(1e-7, coupling * (1.0 + 1e-4))
        res = optimize_alpha(cfg, HCS, SC, targets, 80, 80)
        assert not res.feasible
        assert res.alpha_l_opt == 0.5
        assert "boundary" in res.diagnosis or "cross" in res.diagnosis

    def test_max_iterations(self, opt_cfg, targets):
        with pytest.raises(MaxIterations):
            optimize_alpha(opt_cfg, LCS, SC, targets, 80, 80, tol=1e-18, max_iter=5)

    def test_tol_validation(self, opt_cfg, targets):
        with pytest.raises(ValueError):
            optimize_alpha(opt_cfg, LCS, SC, targets, 80, 80, tol=0.0)


class TestOma:
    def test_positive_gap_on_feasible_cases(self, opt_cfg, targets):
        for div in (SC, MRC):
            res = optimize_alpha(opt_cfg, LCS, div, targets, 80, 80)
            n_oma = oma_blocklength(opt_cfg, LCS, div, targets, 80, 80)
            assert n_oma - res.n_opt > 0

    def test_positive_gap_near_l_user(self, targets):
        cfg = SystemConfig(users_h=2, users_l=2, d_sl=2.0)
        for method in (HCS, LCS):
            for div in (SC, MRC):
                res = optimize_alpha(cfg, method, div, targets, 80, 80)
                n_oma = oma_blocklength(cfg, method, div, targets, 80, 80)
                assert res.feasible
                assert n_oma - res.n_opt > 0

    def test_degenerate_l_bits(self, opt_cfg, targets):
        n_hat_h, _ = oma_user_blocklengths(opt_cfg, LCS, SC, targets, 80, 80)
        assert oma_blocklength(opt_cfg, LCS, SC, targets, 80, 0) == pytest.approx(
            n_hat_h, rel=1e-14
        )

    def test_parts_sum(self, opt_cfg, targets):
        parts = oma_user_blocklengths(opt_cfg, LCS, SC, targets, 80, 80)
        assert sum(parts) == pytest.approx(
            oma_blocklength(opt_cfg, LCS, SC, targets, 80, 80), rel=1e-14
        )

    def test_targets_validation(self):
        with pytest.raises(ValueError):
            ReliabilityTargets(0.0, 1e-6)
        with pytest.raises(ValueError):
            ReliabilityTargets(1e-7, 1.0)
