import itertools
import math

import numpy as np
import pytest

from nomaspc import (
    CdfExpansion,
    CdfTerm,
    CombinatorialBlowup,
    Diversity,
    EffectiveOrderParams,
    Link,
    PrecisionLoss,
    SchemeSelect,
    SelectionMethod,
    SystemConfig,
    build_cdf_expansion,
    effective_params,
    enumerate_compositions,
    evaluate_cdf,
)
from nomaspc.asymptotics import diversity_order


class TestSystemConfig:
    def test_path_loss_gain(self):
        cfg = SystemConfig(d_sh=5.0, theta=2.5)
        assert cfg.lambda_sh == pytest.approx(5.0**-2.5, rel=1e-15)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"k_s": 0},
            {"users_h": 0},
            {"m_h": 0},
            {"d_sh": 0.0},
            {"theta": -1.0},
            {"gamma0": 0.0},
            {"m_l": 1.5},
        ],
    )
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            SystemConfig(**kwargs)


class TestEffectiveParams:
    def test_joint_link_sc(self):
        cfg = SystemConfig(k_s=2, k_h=2, users_h=1, m_h=2)
        p = effective_params(cfg, SchemeSelect(SelectionMethod.HCS, Diversity.TAS_SC, Link.SH))
        assert (p.a, p.b) == (4, 2)

    def test_joint_link_mrc(self):
        cfg = SystemConfig(k_s=2, k_h=2, users_h=1, m_h=2)
        p = effective_params(cfg, SchemeSelect(SelectionMethod.HCS, Diversity.TAS_MRC, Link.SH))
        assert (p.a, p.b) == (2, 4)

    def test_degenerate_single_branch(self):
        cfg = SystemConfig(k_s=1, k_h=1, k_l=1, users_h=1, users_l=1, m_h=1, m_l=1)
        for method, div, link in itertools.product(SelectionMethod, Diversity, Link):
            p = effective_params(cfg, SchemeSelect(method, div, link))
            assert (p.a, p.b) == (1, 1)

    def test_full_table(self):
        cfg = SystemConfig(k_s=2, k_h=3, k_l=4, users_h=2, users_l=3, m_h=2, m_l=3)
        expect = {
            (SelectionMethod.HCS, Diversity.TAS_SC, Link.SH): (2 * 3 * 2, 2),
            (SelectionMethod.HCS, Diversity.TAS_MRC, Link.SH): (2 * 2, 2 * 3),
            (SelectionMethod.HCS, Diversity.TAS_SC, Link.SL): (4 * 3, 3),
            (SelectionMethod.HCS, Diversity.TAS_MRC, Link.SL): (3, 3 * 4),
            (SelectionMethod.LCS, Diversity.TAS_SC, Link.SH): (3 * 2, 2),
            (SelectionMethod.LCS, Diversity.TAS_MRC, Link.SH): (2, 2 * 3),
            (SelectionMethod.LCS, Diversity.TAS_SC, Link.SL): (2 * 4 * 3, 3),
            (SelectionMethod.LCS, Diversity.TAS_MRC, Link.SL): (2 * 3, 3 * 4),
        }
        for key, (a, b) in expect.items():
            p = effective_params(cfg, SchemeSelect(*key))
            assert (p.a, p.b) == (a, b), key

    def test_diversity_exponent_matches_order(self):
        cfg = SystemConfig(k_s=2, k_h=3, k_l=2, users_h=2, users_l=1, m_h=2, m_l=3)
        for method in SelectionMethod:
            rep = diversity_order(cfg, method)
            for div in Diversity:
                ph = effective_params(cfg, SchemeSelect(method, div, Link.SH))
                pl = effective_params(cfg, SchemeSelect(method, div, Link.SL))
                assert ph.diversity_exponent == rep.d_h
                assert pl.diversity_exponent == rep.d_l


class TestCompositions:
    def test_two_into_two(self):
        assert set(enumerate_compositions(2, 2)) == {(2, 0), (1, 1), (0, 2)}

    def test_one_into_three(self):
        assert set(enumerate_compositions(1, 3)) == {(1, 0, 0), (0, 1, 0), (0, 0, 1)}

    def test_count_against_brute_force(self):
        # brute-force oracle: filter the full product lattice
        brute = [
            combo
            for combo in itertools.product(range(4), repeat=4)
            if sum(combo) == 3
        ]
        got = enumerate_compositions(3, 4)
        assert len(got) == len(brute) == math.comb(6, 3) == 20
        assert set(got) == set(brute)
        assert len(set(got)) == len(got)

    def test_cap(self):
        with pytest.raises(CombinatorialBlowup):
            enumerate_compositions(30, 12, cap=10**4)

    def test_domain(self):
        with pytest.raises(ValueError):
            enumerate_compositions(0, 2)


class TestCdfExpansion:
    def test_single_branch_is_exponential(self):
        exp1 = build_cdf_expansion(EffectiveOrderParams(a=1, b=1, lam=1.0, m=1))
        assert exp1.n_terms == 1
        term = exp1.terms[0]
        assert (term.sign, term.phi) == (-1, 0)
        assert term.coeff == pytest.approx(-1.0, rel=1e-15)
        assert term.omega == pytest.approx(1.0)
        assert exp1.evaluate(1.0) == pytest.approx(1.0 - math.exp(-1.0), rel=1e-14)

    def test_term_count(self):
        for a, b in ((2, 2), (3, 4), (4, 2), (6, 6)):
            exp = build_cdf_expansion(EffectiveOrderParams(a=a, b=b, lam=0.7, m=2))
            expected = sum(math.comb(p + b - 1, b - 1) for p in range(1, a + 1))
            assert exp.n_terms == expected

    def test_frozen_values_a2_b2(self):
        # frozen: 50-digit evaluation of (1 - e^-y (1 + y))^2 at y = 2x
        exp = build_cdf_expansion(EffectiveOrderParams(a=2, b=2, lam=1.0, m=2))
        for x, want in [
            (0.5, 0.069823368260681481),
            (1.0, 0.35282905057893147),
            (2.0, 0.82523017681022099),
        ]:
            assert exp.evaluate(x) == pytest.approx(want, abs=1e-12)
            assert evaluate_cdf(exp, x) == pytest.approx(want, abs=1e-12)

    def test_frozen_value_selection_law(self):
        # frozen: 50-digit product form, a=4 b=2 m=2 lam=5^-2.5 at x=0.02
        exp = build_cdf_expansion(
            EffectiveOrderParams(a=4, b=2, lam=5.0**-2.5, m=2)
        )
        assert exp.evaluate(0.02) == pytest.approx(0.18309293464996786, abs=1e-12)

    def test_anchors(self):
        exp = build_cdf_expansion(EffectiveOrderParams(a=3, b=2, lam=0.3, m=2))
        assert exp.evaluate(0.0) == 0.0
        assert exp.evaluate(1e6 * 0.3) == pytest.approx(1.0, abs=1e-12)

    def test_negative_argument_rejected(self):
        exp = build_cdf_expansion(EffectiveOrderParams(a=1, b=1, lam=1.0, m=1))
        with pytest.raises(ValueError):
            exp.evaluate(-0.1)

    @pytest.mark.parametrize("a", range(1, 7))
    @pytest.mark.parametrize("b", range(1, 7))
    @pytest.mark.parametrize("lam", [1.0, 5.0**-2.5])
    def test_product_form_equivalence(self, a, b, lam):
        exp = build_cdf_expansion(EffectiveOrderParams(a=a, b=b, lam=lam, m=b))
        xs = np.logspace(-2.5, 1.5, 50) * lam
        for x in xs:
            assert abs(exp.evaluate(float(x)) - exp.evaluate_product(float(x))) <= 1e-9

    def test_monotone_on_grid(self):
        exp = build_cdf_expansion(EffectiveOrderParams(a=4, b=4, lam=0.018, m=2))
        xs = np.logspace(-4, 0.5, 400) * 0.018
        vals = [exp.evaluate(float(x)) for x in xs]
        assert all(b - a >= -1e-12 for a, b in zip(vals, vals[1:]))

    def test_precision_loss_guard(self):
        params = EffectiveOrderParams(a=1, b=1, lam=1.0, m=1)
        bogus = CdfExpansion(
            params=params,
            terms=(CdfTerm(p=1, delta=(1,), phi=0, omega=1.0, sign=1, log_coeff=5.0),),
        )
        with pytest.raises(PrecisionLoss):
            bogus.evaluate(0.01)

    def test_product_dispatch_above_expansion_limit(self):
        # a*b = 32 routes point evaluation through the product form
        exp = build_cdf_expansion(EffectiveOrderParams(a=8, b=4, lam=0.018, m=2))
        x = 0.018
        assert exp.cdf(x) == pytest.approx(exp.evaluate_product(x), rel=1e-14)

    def test_vectorized_product(self):
        exp = build_cdf_expansion(EffectiveOrderParams(a=2, b=2, lam=1.0, m=2))
        xs = np.array([0.5, 1.0, 2.0])
        out = exp.evaluate_product(xs)
        assert out.shape == (3,)
        assert out[0] == pytest.approx(0.069823368260681481, abs=1e-12)
