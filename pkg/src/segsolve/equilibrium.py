"""Symmetric cutoff equilibria: closed form for uniform F, bisection otherwise."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import mechanisms as mx
from .cdf import Uniform
from .economy import (AssumptionReport, EconomyParams, check_assumption1,
                      check_assumption2, is_example_profile, price_bounds)

RESIDUAL_TOL = 1e-11
MAX_ITER = 200


class SolveError(RuntimeError):
    pass


class AssumptionError(SolveError):
    """A pre-solve assumption fails for the requested mechanism."""


class InteriorViolationError(SolveError):
    """Solved cutoffs leave the open interval (g, e-g)."""


class BracketFailureError(SolveError):
    """Capacity residual has no root in the admissible dispersion range."""


class NoFixedPointError(SolveError):
    """Policy rejection fixed point could not be bracketed."""


@dataclass(frozen=True)
class Equilibrium:
    mech: mx.Mechanism
    r: float
    d: float
    p: float
    intercept: float
    cutoffs: tuple[tuple[float, float], ...]  # (omega, s), poorest first
    e_s: float
    residual: float
    iterations: int
    params: EconomyParams = field(repr=False, compare=False)
    r_by_omega: tuple[tuple[float, float], ...] | None = None

    @property
    def cutoff_map(self) -> dict[float, float]:
        return dict(self.cutoffs)

    def cutoff(self, omega: float) -> float:
        for w, s in self.cutoffs:
            if abs(w - omega) < 1e-12:
                return s
        raise KeyError(omega)

    def to_dict(self) -> dict:
        return {
            "mech": self.mech.value,
            "r": self.r,
            "p": self.p,
            "d": self.d,
            "e_s": self.e_s,
            "cutoffs": [{"omega": w, "s": s} for w, s in self.cutoffs],
            "residual": self.residual,
        }


def _require_assumptions(params: EconomyParams, mech: mx.Mechanism) -> None:
    a1 = check_assumption1(params)
    if not a1.passed:
        raise AssumptionError(f"assumption 1 fails: {a1.failures()}")
    a2 = check_assumption2(params, mechs=(mech,))
    if not a2.passed:
        raise AssumptionError(f"assumption 2 fails for {mech.value}: {a2.failures()}")


def solve(params: EconomyParams, mech, check: bool = True) -> Equilibrium:
    """Bisect on dispersion d for the unique market-clearing cutoff profile."""
    mech = mx.Mechanism(mech)
    if mech not in mx.CORE:
        raise ValueError(f"solve handles n/da/ttc; got {mech.value}")
    if check:
        _require_assumptions(params, mech)
    r = mx.rejection(params, mech)
    a = mx.cutoff_intercept(mech, params)
    f = params.cdf
    omegas = [w for w, _ in params.wealth.atoms]
    rhos = [rho for _, rho in params.wealth.atoms]
    target = 1.0 - params.q

    def residual(d: float) -> float:
        acc = 0.0
        for w, rho in zip(omegas, rhos):
            s = a + d * w
            acc += rho * f.value(min(1.0, max(0.0, s)))
        return acc - target

    d_max = (params.e - params.g - a) / max(omegas)
    lo, hi = 0.0, d_max
    res_lo, res_hi = residual(lo), residual(hi)
    if res_lo > RESIDUAL_TOL or res_hi < -RESIDUAL_TOL:
        raise BracketFailureError(
            f"no dispersion root in [0, {d_max:.6g}] for {mech.value} "
            f"(residuals {res_lo:.3g}, {res_hi:.3g})")
    d, res, it = hi, res_hi, 0
    for it in range(1, MAX_ITER + 1):
        mid = 0.5 * (lo + hi)
        res = residual(mid)
        d = mid
        if abs(res) < RESIDUAL_TOL:
            break
        if res < 0.0:
            lo = mid
        else:
            hi = mid
    cutoffs = tuple((w, a + d * w) for w in omegas)
    eps = 1e-12
    for w, s in cutoffs:
        if not (params.g + eps < s < params.e - params.g - eps):
            raise InteriorViolationError(
                f"cutoff {s:.6g} for omega={w} outside ({params.g}, {params.e - params.g})")
    p = r * mx.gamma_slope(mech, params) * d
    e_s = sum(rho * s for (_, s), rho in zip(cutoffs, rhos))
    return Equilibrium(mech, r, d, p, a, cutoffs, e_s, res, it, params)


def solve_closed_form_uniform(params: EconomyParams, mech, check: bool = True) -> Equilibrium:
    """Exact solution for uniform F: E[s] = 1-q, cutoffs linear in omega.

    Computed in rational arithmetic over the (rational) float inputs and
    converted to float on output.
    """
    mech = mx.Mechanism(mech)
    if not isinstance(params.cdf, Uniform):
        raise ValueError("closed form requires a uniform signal CDF")
    if check:
        _require_assumptions(params, mech)
    q = Fraction(params.q)
    g = Fraction(params.g)
    e = Fraction(params.e)
    pi = Fraction(params.pi)
    dq = Fraction(params.delta_q)
    one = Fraction(1)
    if mech == mx.Mechanism.N:
        r = one
        a = g
        kappa = one
    else:
        D = (one - pi) * (one - q - g) + pi * e
        S = pi * (e + g - (one - q))
        if mech == mx.Mechanism.DA:
            r = (D - S - dq) / D
            a = g - pi * e / (one - pi)
            kappa = one - pi
        else:
            X = pi * (e - g - (one - q))
            r = (D - S - dq) / (D - X)
            a = (g - 2 * pi * e) / (one - 2 * pi)
            kappa = one - 2 * pi
        if r <= 0:
            raise mx.DegenerateChoiceError(f"rejection probability is 0 under {mech.value}")
        r = min(r, one)
    d = (one - q) - a
    cutoffs = tuple((float(w), float(a + d * Fraction(w))) for w in
                    (w for w, _ in params.wealth.atoms))
    eps = 1e-12
    for w, s in cutoffs:
        if not (params.g + eps < s < params.e - params.g - eps):
            raise InteriorViolationError(
                f"cutoff {s:.6g} for omega={w} outside ({params.g}, {params.e - params.g})")
    p = r * kappa * d
    rhos = [rho for _, rho in params.wealth.atoms]
    e_s = sum(rho * s for (_, s), rho in zip(cutoffs, rhos))
    return Equilibrium(mech, float(r), float(d), float(p), float(a),
                       cutoffs, e_s, 0.0, 0, params)


def _policy_cutoffs(mech: mx.Mechanism, r: float, p: float, params: EconomyParams):
    """Roots of policy_delta_u in s, one per wealth type (linear in s)."""
    out = []
    for w, _ in params.wealth.atoms:
        if mech == mx.Mechanism.DA_WL and abs(w - params.wealth.poorest) > 1e-12:
            s = (3.0 * w * p - 1.0) / 2.0
        else:
            s = (3.0 * w * p - (2.0 * r - 1.0)) / (1.0 + r)
        out.append((w, s))
    return tuple(out)


def solve_policy(params: EconomyParams, mech) -> Equilibrium:
    """Joint fixed point (r, p) for the desegregation policy mechanisms.

    Inner bisection clears the housing market in p given r; the outer loop
    finds r consistent with seat accounting: vacated supply pi*sum rho(w)
    (1-F(s_w)) rationed by lottery over the eligible out-of-district pool
    (DA_L: everyone in n0; DA_WL: poor n0 residents, rich rejection is 1).
    """
    mech = mx.Mechanism(mech)
    if mech not in mx.POLICY:
        raise ValueError(f"solve_policy handles da_l/da_wl; got {mech.value}")
    if not is_example_profile(params):
        raise ValueError("policy mechanisms are defined on the example profile only")
    f = params.cdf
    rhos = [rho for _, rho in params.wealth.atoms]
    target = 1.0 - params.q

    def clear_price(r: float) -> tuple[float, tuple]:
        def residual(p: float) -> float:
            cuts = _policy_cutoffs(mech, r, p, params)
            return sum(rho * f.value(min(1.0, max(0.0, s)))
                       for (_, s), rho in zip(cuts, rhos)) - target

        lo, hi = 0.0, 4.0
        if residual(lo) >= 0:
            # market already clears (or overshoots) at a zero price
            return 0.0, _policy_cutoffs(mech, r, 0.0, params)
        if residual(hi) < 0:
            raise NoFixedPointError("housing market cannot clear at this rejection rate")
        for _ in range(MAX_ITER):
            mid = 0.5 * (lo + hi)
            if residual(mid) < 0:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-14:
                break
        p = 0.5 * (lo + hi)
        return p, _policy_cutoffs(mech, r, p, params)

    def implied_r(cuts) -> float:
        vacated = params.pi * sum(
            rho * (1.0 - f.value(min(1.0, max(0.0, s))))
            for (_, s), rho in zip(cuts, rhos))
        if mech == mx.Mechanism.DA_L:
            eligible = sum(rho * f.value(min(1.0, max(0.0, s)))
                           for (_, s), rho in zip(cuts, rhos))
        else:
            (_, s_poor) = cuts[0]
            eligible = rhos[0] * f.value(min(1.0, max(0.0, s_poor)))
        if eligible <= vacated:
            return 0.0
        return 1.0 - vacated / eligible

    def gap(r: float) -> float:
        _, cuts = clear_price(r)
        return r - implied_r(cuts)

    # bracket the rejection fixed point by scanning, then bisect
    grid = np.linspace(0.05, 0.999, 40)
    vals = [gap(r) for r in grid]
    lo = hi = None
    for i in range(len(grid) - 1):
        if vals[i] <= 0.0 <= vals[i + 1] or vals[i] >= 0.0 >= vals[i + 1]:
            lo, hi = grid[i], grid[i + 1]
            break
    if lo is None:
        raise NoFixedPointError(f"no rejection fixed point bracketed for {mech.value}")
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if gap(lo) * gap(mid) <= 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-12:
            break
    r = 0.5 * (lo + hi)
    p, cuts = clear_price(r)
    e_s = sum(rho * s for (_, s), rho in zip(cuts, rhos))
    res = sum(rho * f.value(min(1.0, max(0.0, s)))
              for (_, s), rho in zip(cuts, rhos)) - target
    r_by_omega = None
    if mech == mx.Mechanism.DA_WL:
        r_by_omega = tuple((w, r if i == 0 else 1.0)
                           for i, (w, _) in enumerate(cuts))
    return Equilibrium(mech, r, float("nan"), p, float("nan"),
                       cuts, e_s, res, 0, params, r_by_omega)


def verify_lemma1(params: EconomyParams, mech) -> AssumptionReport:
    """Grid regression of the utility-gain monotonicity properties."""
    mech = mx.Mechanism(mech)
    r_hat = mx.rejection(params, mech)
    p_hat, p_bar = price_bounds(params, mech)
    grid = np.arange(0.0, 1.0 + 1e-9, 1e-3)
    below = grid <= params.g + 1e-12
    above = grid >= params.g - 1e-12
    checks = []
    for omega in params.wealth.omegas:
        for r in {r_hat, 1.0}:
            at_zero = mx.delta_u(mech, r, 0.0, params.g, omega, params)
            checks.append((f"du(r={r:.3g},0|g,{omega})>=0", at_zero >= -1e-12))
            for p in (0.0, p_hat, p_bar):
                du = mx.delta_u(mech, r, p, grid, omega, params)
                dlo = np.diff(du[below])
                dhi = np.diff(du[above])
                checks.append((
                    f"weak increase on [0,g] (r={r:.3g},p={p:.3g},w={omega})",
                    bool(dlo.size == 0 or np.all(dlo >= -1e-12))))
                checks.append((
                    f"strict increase on [g,1] (r={r:.3g},p={p:.3g},w={omega})",
                    bool(np.all(dhi > 0.0))))
    return AssumptionReport("lemma1", all(ok for _, ok in checks), False, tuple(checks))
