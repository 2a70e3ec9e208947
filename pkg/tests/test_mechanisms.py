"""Flows, rejection probabilities, cutoff functionals, and utility gains."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import segsolve as ss
from segsolve import mechanisms as mx
from segsolve.economy import EconomyParams, binary_wealth, example_economy
from segsolve.cdf import Power, Uniform


class TestFlows:
    def test_example_aggregates(self):
        # uniform F, q=0.4, g=0, e=1, pi=1/3:
        # D = (2/3)(0.6) + (1/3)(0+1) = 11/15, S = X = (1/3)(1-0.6) = 2/15
        fl = mx.aggregate_flows(example_economy())
        assert fl.D == pytest.approx(11.0 / 15.0, abs=1e-12)
        assert fl.S == pytest.approx(2.0 / 15.0, abs=1e-12)
        assert fl.X == pytest.approx(2.0 / 15.0, abs=1e-12)

    def test_type_flows_at_market_clearing(self):
        # at F(s) = 1-q the conditional flows equal the aggregates
        p = example_economy()
        s = p.cdf.inverse(1.0 - p.q)
        D, S, X = mx.type_flows(p, s)
        fl = mx.aggregate_flows(p)
        assert (D, S, X) == pytest.approx((fl.D, fl.S, fl.X), abs=1e-12)

    def test_d_minus_s_minus_f_constant(self):
        p = example_economy()
        vals = []
        for s in np.linspace(0.1, 0.9, 9):
            D, S, _ = mx.type_flows(p, s)
            vals.append(D - S - p.cdf.value(s))
        assert max(vals) - min(vals) < 1e-12


class TestRejection:
    def test_example_values(self):
        p = example_economy()
        assert mx.rejection(p, "n") == 1.0
        assert mx.rejection(p, "da") == pytest.approx(9.0 / 11.0, abs=1e-12)
        assert mx.rejection(p, "ttc") == pytest.approx(1.0, abs=1e-12)

    def test_extra_capacity_lowers_rejection(self):
        p = example_economy()
        cfg = p.to_config()
        cfg["delta_q"] = 0.05
        p2 = EconomyParams.from_config(cfg)
        assert mx.rejection(p2, "da") < mx.rejection(p, "da")

    def test_degenerate_rejection_raises(self):
        cfg = example_economy().to_config()
        cfg["delta_q"] = 0.9
        p = EconomyParams.from_config(cfg)
        with pytest.raises(mx.DegenerateChoiceError):
            mx.rejection(p, "da")

    def test_r_da_uniform_example(self):
        # (1-q-g) / ((1-pi)(1-q-g) + pi e) = 0.6 / (0.4 + 1/3) = 9/11
        assert mx.r_da_uniform(example_economy()) == pytest.approx(9.0 / 11.0, abs=1e-12)

    def test_r_da_uniform_matches_rejection_under_uniform(self):
        p = EconomyParams(m=2, q=0.45, g=0.03, e=0.9, pi=0.22,
                          wealth=binary_wealth(0.5), cdf=Uniform())
        assert mx.rejection(p, "da") == pytest.approx(mx.r_da_uniform(p), abs=1e-12)


class TestGamma:
    def test_example_values_at_clearing_signal(self):
        # gamma(0.6): N 0.6, DA (2/3)(0.6)+(1/3) = 11/15, TTC (1/3)(0.6)+2/3 = 13/15
        p = example_economy()
        assert mx.gamma("n", 0.6, p) == pytest.approx(9.0 / 15.0, abs=1e-12)
        assert mx.gamma("da", 0.6, p) == pytest.approx(11.0 / 15.0, abs=1e-12)
        assert mx.gamma("ttc", 0.6, p) == pytest.approx(13.0 / 15.0, abs=1e-12)

    def test_slope_and_intercept_consistent(self):
        p = example_economy()
        for mech in ("n", "da", "ttc"):
            a = mx.cutoff_intercept(mech, p)
            k = mx.gamma_slope(mech, p)
            # gamma is linear with root a and slope k
            assert mx.gamma(mech, a, p) == pytest.approx(0.0, abs=1e-12)
            assert mx.gamma(mech, a + 0.25, p) == pytest.approx(0.25 * k, abs=1e-12)

    def test_example_intercepts(self):
        p = example_economy()
        assert mx.cutoff_intercept("n", p) == pytest.approx(0.0, abs=1e-12)
        assert mx.cutoff_intercept("da", p) == pytest.approx(-0.5, abs=1e-12)
        assert mx.cutoff_intercept("ttc", p) == pytest.approx(-2.0, abs=1e-12)


class TestDeltaU:
    def test_branch_joins_continuous(self):
        p = EconomyParams(m=2, q=0.4, g=0.05, e=0.85, pi=0.25,
                          wealth=binary_wealth(0.5), cdf=Power(0.7))
        h = 1e-9
        joins = {"n": (), "da": (p.g, p.e + p.g),
                 "ttc": (p.g, p.e - p.g, p.e + p.g)}
        for mech, points in joins.items():
            for s0 in points:
                lo = mx.delta_u(mech, 0.8, 0.3, s0 - h, 1.05, p)
                hi = mx.delta_u(mech, 0.8, 0.3, s0 + h, 1.05, p)
                assert abs(hi - lo) < 1e-7

    def test_monotone_in_s_above_g(self):
        p = example_economy()
        s = np.linspace(p.g, 1.0, 400)
        for mech in ("n", "da", "ttc"):
            du = mx.delta_u(mech, 0.9, 0.2, s, 1.125, p)
            assert np.all(np.diff(du) > 0.0)

    def test_decreasing_in_price_and_wealth_index(self):
        p = example_economy()
        for mech in ("n", "da", "ttc"):
            a = mx.delta_u(mech, 0.9, 0.2, 0.5, 1.125, p)
            b = mx.delta_u(mech, 0.9, 0.3, 0.5, 1.125, p)
            c = mx.delta_u(mech, 0.9, 0.2, 0.5, 0.875, p)
            assert b < a < c

    def test_zero_at_cutoff(self):
        # the equilibrium cutoff is exactly the indifference point
        p = example_economy()
        for mech in ("n", "da", "ttc"):
            eq = ss.solve(p, mech)
            for w, s in eq.cutoffs:
                assert mx.delta_u(mech, eq.r, eq.p, s, w, p) == pytest.approx(0.0, abs=1e-9)

    def test_rejects_bad_r(self):
        with pytest.raises(ValueError):
            mx.delta_u("n", 0.0, 0.1, 0.5, 1.0, example_economy())

    def test_scalar_and_array_agree(self):
        p = example_economy()
        s = np.array([0.2, 0.5, 0.9])
        arr = mx.delta_u("da", 0.8, 0.3, s, 1.1, p)
        assert arr.shape == (3,)
        for i, si in enumerate(s):
            assert mx.delta_u("da", 0.8, 0.3, float(si), 1.1, p) == pytest.approx(arr[i])

    @given(r=st.floats(0.1, 1.0), price=st.floats(0.0, 0.8),
           w=st.floats(0.8, 1.2))
    @settings(max_examples=50, deadline=None)
    def test_property_weakly_increasing(self, r, price, w):
        p = example_economy()
        s = np.linspace(0.0, 1.0, 200)
        for mech in ("n", "da", "ttc"):
            du = mx.delta_u(mech, r, price, s, w, p)
            assert np.all(np.diff(du) >= -1e-12)


class TestPolicyDeltaU:
    def test_da_l_at_r_one_matches_da(self):
        # with no rejection risk the lottery policy reduces to plain DA gains
        p = example_economy()
        s = np.linspace(0.0, 1.0, 50)
        got = mx.policy_delta_u("da_l", 1.0, 0.2, s, 1.125, p)
        want = mx.delta_u("da", 1.0, 0.2, s, 1.125, p)
        np.testing.assert_allclose(got, want, atol=1e-12)

    def test_wl_rich_independent_of_r(self):
        p = example_economy()
        a = mx.policy_delta_u("da_wl", 0.9, 0.2, 0.5, 0.875, p)
        b = mx.policy_delta_u("da_wl", 0.5, 0.2, 0.5, 0.875, p)
        assert a == pytest.approx(b, abs=1e-12)

    def test_requires_example_profile(self):
        p = EconomyParams(m=2, q=0.4, g=0.05, e=0.85, pi=0.25,
                          wealth=binary_wealth(0.5), cdf=Uniform())
        with pytest.raises(ValueError):
            mx.policy_delta_u("da_l", 0.8, 0.2, 0.5, 1.0, p)

    def test_mechanism_enum(self):
        assert mx.Mechanism("da") is mx.Mechanism.DA
        assert set(mx.CORE) == {mx.Mechanism.N, mx.Mechanism.DA, mx.Mechanism.TTC}
        assert set(mx.POLICY) == {mx.Mechanism.DA_L, mx.Mechanism.DA_WL}
