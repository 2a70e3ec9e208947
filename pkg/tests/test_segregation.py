"""Segregation profiles, expansion rates, and the ranking theorems."""
import dataclasses

import pytest

import segsolve as ss
from segsolve import mechanisms as mx
from segsolve.cdf import Power, SingleKink
from segsolve.economy import example_economy
from segsolve.equilibrium import solve
from segsolve.segregation import (Comparison, check_theorems, compare,
                                  expansion_rate, in_comparison_set,
                                  neighborhood_profile, school_profile,
                                  theorem2_threshold)


class TestNeighborhoodProfiles:
    @pytest.mark.parametrize("mech,share", [("n", 0.40625), ("da", 0.328125),
                                            ("ttc", 0.09375)])
    def test_example_poor_shares(self, mech, share):
        # published integers 41 / 33 / 9 percent
        eq = solve(example_economy(), mech)
        n1, _ = neighborhood_profile(eq)
        assert n1.poor_share == pytest.approx(share, abs=1e-9)
        assert round(100.0 * n1.poor_share) == round(100.0 * share)

    def test_masses_partition_population(self):
        eq = solve(example_economy(), "da")
        n1, n0 = neighborhood_profile(eq)
        for (w, a), (_, b), (_, rho) in zip(n1.masses, n0.masses,
                                            example_economy().wealth.atoms):
            assert a + b == pytest.approx(rho, abs=1e-12)
        assert n1.total_mass == pytest.approx(example_economy().q, abs=1e-9)

    def test_deviation_is_wealth_gap(self):
        eq = solve(example_economy(), "n")
        n1, n0 = neighborhood_profile(eq)
        assert n1.deviation == pytest.approx(abs(n1.avg_wealth - 1.0), abs=1e-15)
        # binary wealth: deviation proportional to poor-share distance from 1/2
        assert n1.deviation == pytest.approx(abs(n1.poor_share - 0.5) * 0.25, abs=1e-9)


class TestSchoolProfiles:
    @pytest.mark.parametrize("mech,share", [("n", 0.40625), ("da", 0.40625),
                                            ("ttc", 0.09375)])
    def test_example_poor_shares(self, mech, share):
        eq = solve(example_economy(), mech)
        c1 = school_profile(eq)
        assert c1.poor_share == pytest.approx(share, abs=1e-9)

    def test_total_mass_is_capacity(self):
        for mech in ("n", "da", "ttc"):
            eq = solve(example_economy(), mech)
            assert school_profile(eq).total_mass == pytest.approx(0.4, abs=1e-9)

    def test_rejects_policy_equilibria(self):
        eq = ss.solve_policy(example_economy(), "da_l")
        with pytest.raises(ValueError):
            school_profile(eq)


class TestExpansionRates:
    def test_example_n_to_da(self):
        # over-representation (F(s) - (1-q)): N poor 0.075, DA poor 0.1375
        p = example_economy()
        eq_n, eq_da = solve(p, "n"), solve(p, "da")
        assert expansion_rate(eq_n, eq_da, 1.125) == pytest.approx(
            0.1375 / 0.075, abs=1e-9)
        assert expansion_rate(eq_n, eq_da, 0.875) == pytest.approx(
            0.1375 / 0.075, abs=1e-9)
        assert in_comparison_set(eq_n, eq_da, 1.125)

    def test_thresholds(self):
        p = example_economy()
        r_da = mx.rejection(p, "da")
        assert theorem2_threshold((mx.Mechanism.N, mx.Mechanism.DA), p) == \
            pytest.approx(1.0 / (r_da * (2.0 / 3.0)), abs=1e-12)
        assert theorem2_threshold((mx.Mechanism.N, mx.Mechanism.TTC), p) == \
            pytest.approx(1.0, abs=1e-12)
        assert theorem2_threshold((mx.Mechanism.DA, mx.Mechanism.TTC), p) == \
            pytest.approx(r_da * 2.0 / 3.0, abs=1e-12)

    def test_unknown_pair_rejected(self):
        with pytest.raises(ValueError):
            theorem2_threshold((mx.Mechanism.DA, mx.Mechanism.N), example_economy())


class TestCompare:
    def test_orderings(self):
        p = example_economy()
        c1 = {m: school_profile(solve(p, m)) for m in ("n", "da", "ttc")}
        # uniform F: N and DA coincide exactly; TTC is far more segregated
        assert compare(c1["n"], c1["da"]) == Comparison.EQUAL
        assert compare(c1["ttc"], c1["n"]) == Comparison.GREATER
        assert compare(c1["n"], c1["ttc"]) == Comparison.SMALLER


class TestCheckTheorems:
    def test_example_passes(self):
        report = check_theorems(example_economy())
        assert report.passed
        names = [n for n, _ in report.checks]
        assert "d^N < d^DA" in names
        assert "p^DA < p^TTC" in names
        assert "uniform: c1 profiles N = DA" in names

    def test_kink_economy_passes(self):
        p = dataclasses.replace(example_economy(), cdf=SingleKink(0.3, 0.6))
        assert check_theorems(p).passed

    def test_power_economy_passes(self):
        p = dataclasses.replace(example_economy(), cdf=Power(0.5))
        assert check_theorems(p).passed
