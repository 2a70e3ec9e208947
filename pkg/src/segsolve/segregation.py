"""Neighborhood and school wealth profiles and the segregation comparisons."""
from __future__ import annotations

import enum
from dataclasses import dataclass

from . import mechanisms as mx
from .cdf import Uniform
from .economy import AssumptionReport, EconomyParams
from .equilibrium import Equilibrium, solve

EQUAL_TOL = 1e-9


class SignMismatchError(ValueError):
    """Wealth type changes over/under-representation sign between mechanisms."""


class NegativeMassError(ValueError):
    """Closed-form school mass went negative; outside the analyzed regime."""


class Comparison(enum.Enum):
    GREATER = "greater"
    SMALLER = "smaller"
    EQUAL = "equal"
    AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class SegregationProfile:
    location: str
    masses: tuple[tuple[float, float], ...]  # (omega, mass), poorest first
    avg_wealth: float
    poor_share: float

    @property
    def deviation(self) -> float:
        return abs(self.avg_wealth - 1.0)

    def mass(self, omega: float) -> float:
        for w, m in self.masses:
            if abs(w - omega) < 1e-12:
                return m
        raise KeyError(omega)

    @property
    def total_mass(self) -> float:
        return sum(m for _, m in self.masses)


def make_profile(location: str, masses) -> SegregationProfile:
    masses = tuple(masses)
    total = sum(m for _, m in masses)
    avg = sum(w * m for w, m in masses) / total if total > 0 else float("nan")
    poor = masses[0][1] / total if total > 0 else float("nan")
    return SegregationProfile(location, masses, avg, poor)


def neighborhood_profile(eq: Equilibrium) -> tuple[SegregationProfile, SegregationProfile]:
    """Wealth profiles of (n1, n0) implied by the cutoffs."""
    f = eq.params.cdf
    rhos = dict(eq.params.wealth.atoms)
    n1 = [(w, rhos[w] * (1.0 - f.value(s))) for w, s in eq.cutoffs]
    n0 = [(w, rhos[w] * f.value(s)) for w, s in eq.cutoffs]
    return make_profile("n1", n1), make_profile("n0", n0)


def school_profile(eq: Equilibrium) -> SegregationProfile:
    """Wealth profile of one oversubscribed school from the closed forms."""
    if eq.mech not in mx.CORE:
        raise ValueError(f"school closed forms exist for n/da/ttc; got {eq.mech.value}")
    f = eq.params.cdf
    q = eq.params.q
    pi = eq.params.pi
    rhos = dict(eq.params.wealth.atoms)
    masses = []
    for w, s in eq.cutoffs:
        over = f.value(s) - (1.0 - q)
        if eq.mech == mx.Mechanism.N:
            unweighted = 1.0 - f.value(s)
        elif eq.mech == mx.Mechanism.DA:
            unweighted = q - eq.r * (1.0 - pi) * over
        else:
            unweighted = q - eq.r * over
        if unweighted < -EQUAL_TOL:
            raise NegativeMassError(
                f"school mass {unweighted:.3g} for omega={w} under {eq.mech.value}")
        masses.append((w, rhos[w] * unweighted))
    return make_profile("c1", masses)


def expansion_rate(eq_from: Equilibrium, eq_to: Equilibrium, omega: float) -> float:
    """How much a type's n1 over/under-representation scales between mechanisms."""
    f = eq_from.params.cdf
    q = eq_from.params.q
    a = f.value(eq_from.cutoff(omega)) - (1.0 - q)
    b = eq_to.params.cdf.value(eq_to.cutoff(omega)) - (1.0 - q)
    if a == 0.0 or (a > 0) != (b > 0):
        raise SignMismatchError(
            f"omega={omega} flips representation sign: {a:.3g} vs {b:.3g}")
    return abs(b) / abs(a)


def in_comparison_set(eq_from: Equilibrium, eq_to: Equilibrium, omega: float) -> bool:
    try:
        expansion_rate(eq_from, eq_to, omega)
        return True
    except SignMismatchError:
        return False


def compare(a: SegregationProfile, b: SegregationProfile) -> Comparison:
    if a.deviation > b.deviation + EQUAL_TOL:
        return Comparison.GREATER
    if a.deviation < b.deviation - EQUAL_TOL:
        return Comparison.SMALLER
    return Comparison.EQUAL


def theorem2_threshold(pair: tuple[mx.Mechanism, mx.Mechanism], params: EconomyParams) -> float:
    r_da = mx.rejection(params, mx.Mechanism.DA)
    r_ttc = mx.rejection(params, mx.Mechanism.TTC)
    pi = params.pi
    key = (mx.Mechanism(pair[0]), mx.Mechanism(pair[1]))
    if key == (mx.Mechanism.N, mx.Mechanism.DA):
        return 1.0 / (r_da * (1.0 - pi))
    if key == (mx.Mechanism.N, mx.Mechanism.TTC):
        return 1.0 / r_ttc
    if key == (mx.Mechanism.DA, mx.Mechanism.TTC):
        return r_da * (1.0 - pi) / r_ttc
    raise ValueError(f"no threshold for pair {key}")


def check_theorems(params: EconomyParams) -> AssumptionReport:
    """Solve all three mechanisms and assert every applicable ranking result."""
    eqs = {mech: solve(params, mech) for mech in mx.CORE}
    n1 = {mech: neighborhood_profile(eqs[mech])[0] for mech in mx.CORE}
    c1 = {mech: school_profile(eqs[mech]) for mech in mx.CORE}
    checks: list[tuple[str, bool]] = []

    # dispersion and neighborhood-segregation ordering
    d_n, d_da, d_ttc = (eqs[m].d for m in mx.CORE)
    checks.append(("d^N < d^DA", d_n < d_da))
    checks.append(("d^DA < d^TTC", d_da < d_ttc))
    checks.append(("E[s] ordering", eqs[mx.Mechanism.N].e_s <= eqs[mx.Mechanism.DA].e_s + EQUAL_TOL
                   and eqs[mx.Mechanism.DA].e_s <= eqs[mx.Mechanism.TTC].e_s + EQUAL_TOL
                   and eqs[mx.Mechanism.TTC].e_s <= 1.0 - params.q + EQUAL_TOL))
    checks.append(("n1 deviation: DA > N",
                   n1[mx.Mechanism.DA].deviation > n1[mx.Mechanism.N].deviation))
    checks.append(("n1 deviation: TTC > DA",
                   n1[mx.Mechanism.TTC].deviation > n1[mx.Mechanism.DA].deviation))

    # school segregation sufficient conditions
    for pair in ((mx.Mechanism.N, mx.Mechanism.DA),
                 (mx.Mechanism.N, mx.Mechanism.TTC),
                 (mx.Mechanism.DA, mx.Mechanism.TTC)):
        thr = theorem2_threshold(pair, params)
        rates = []
        for w in params.wealth.omegas:
            if in_comparison_set(eqs[pair[0]], eqs[pair[1]], w):
                rates.append(expansion_rate(eqs[pair[0]], eqs[pair[1]], w))
        label = f"{pair[0].value}->{pair[1].value}"
        if rates and all(rate > thr + EQUAL_TOL for rate in rates):
            cmp = compare(c1[pair[1]], c1[pair[0]])
            checks.append((f"school seg {label}: greater", cmp == Comparison.GREATER))
        if pair != (mx.Mechanism.DA, mx.Mechanism.TTC):
            if rates and all(rate < thr - EQUAL_TOL for rate in rates):
                cmp = compare(c1[pair[1]], c1[pair[0]])
                checks.append((f"school seg {label}: smaller", cmp == Comparison.SMALLER))

    # price orderings
    if mx.rejection(params, mx.Mechanism.DA) >= mx.r_da_uniform(params) - 1e-12:
        checks.append(("p^N <= p^DA", eqs[mx.Mechanism.N].p <= eqs[mx.Mechanism.DA].p + EQUAL_TOL))
    if params.e - params.g > 1.0 - params.q + 1e-12:
        checks.append(("p^DA < p^TTC", eqs[mx.Mechanism.DA].p < eqs[mx.Mechanism.TTC].p))

    # uniform-F exact equalities
    if isinstance(params.cdf, Uniform):
        diff = max(abs(c1[mx.Mechanism.N].mass(w) - c1[mx.Mechanism.DA].mass(w))
                   for w in params.wealth.omegas)
        checks.append(("uniform: c1 profiles N = DA", diff <= 1e-10))
        checks.append(("uniform: school seg TTC > N",
                       compare(c1[mx.Mechanism.TTC], c1[mx.Mechanism.N]) == Comparison.GREATER))

    # binary-wealth characterization at g=0, e=1
    if (params.wealth.is_binary() and abs(params.g) < 1e-12
            and abs(params.e - 1.0) < 1e-12):
        checks.append(("binary: school seg TTC > N",
                       compare(c1[mx.Mechanism.TTC], c1[mx.Mechanism.N]) == Comparison.GREATER))
        checks.append(("binary: school seg TTC > DA",
                       compare(c1[mx.Mechanism.TTC], c1[mx.Mechanism.DA]) == Comparison.GREATER))
        if 1.0 - params.q < params.wealth.poor_rho - 1e-12:
            checks.append(("binary 1-q<rho_p: school seg DA > N",
                           compare(c1[mx.Mechanism.DA], c1[mx.Mechanism.N]) == Comparison.GREATER))

    return AssumptionReport("theorems", all(ok for _, ok in checks), False, tuple(checks))
