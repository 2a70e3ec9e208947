"""Per-mechanism primitives: flows, rejection rates, cutoff functionals, utility gains."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class Mechanism(str, enum.Enum):
    N = "n"
    DA = "da"
    TTC = "ttc"
    DA_L = "da_l"
    DA_WL = "da_wl"
    NO_PRIORITY = "no_priority"
    AUCTION = "auction"


CORE = (Mechanism.N, Mechanism.DA, Mechanism.TTC)
POLICY = (Mechanism.DA_L, Mechanism.DA_WL)


class DegenerateChoiceError(ValueError):
    """Rejection probability hit zero; cutoff equations are undefined."""


@dataclass(frozen=True)
class AggregateFlows:
    """Per-school ex-post flows: out-of-zone demand D, vacated supply S,
    in-zone exchange volume X. All independent of the cutoff profile."""

    D: float
    S: float
    X: float


def aggregate_flows(params) -> AggregateFlows:
    f, q, g, e, pi = params.cdf, params.q, params.g, params.e, params.pi
    fg = f.value(g)
    feg = f.value(e - g)
    fepg = f.value(min(e + g, 1.0))
    D = (1.0 - pi) * (1.0 - q - fg) + pi * (fg + feg)
    S = pi * (fepg - (1.0 - q))
    X = pi * (feg - (1.0 - q))
    return AggregateFlows(D, S, X)


def type_flows(params, s: float) -> tuple[float, float, float]:
    """Flows conditional on cutoff signal s: D(s), S(s), X(s)."""
    f, q, g, e, pi = params.cdf, params.q, params.g, params.e, params.pi
    fg = f.value(g)
    feg = f.value(e - g)
    fepg = f.value(min(e + g, 1.0))
    fs = f.value(s)
    D = (1.0 - pi) * (fs - fg) + pi * (fg + feg)
    S = pi * (fepg - fs)
    X = pi * (feg - fs)
    return D, S, X


def rejection(params, mech: Mechanism) -> float:
    """Equilibrium rejection probability of an out-of-zone lottery applicant."""
    mech = Mechanism(mech)
    if mech == Mechanism.N:
        return 1.0
    fl = aggregate_flows(params)
    if mech == Mechanism.DA:
        r = max(0.0, (fl.D - fl.S - params.delta_q) / fl.D)
    elif mech == Mechanism.TTC:
        r = max(0.0, (fl.D - fl.S - params.delta_q) / (fl.D - fl.X))
    else:
        raise ValueError(f"no rejection formula for {mech.value}")
    if r <= 0.0:
        raise DegenerateChoiceError(f"rejection probability is 0 under {mech.value}")
    return min(r, 1.0)


def r_da_uniform(params) -> float:
    """The DA rejection probability a uniform signal CDF would produce."""
    q, g, e, pi = params.q, params.g, params.e, params.pi
    return (1.0 - q - g) / ((1.0 - pi) * (1.0 - q - g) + pi * e)


def gamma(mech: Mechanism, s, params):
    """Linear cutoff functional; the cutoff solves gamma(s_w) = w p / r."""
    mech = Mechanism(mech)
    g, e, pi = params.g, params.e, params.pi
    if mech == Mechanism.N:
        return s - g
    if mech == Mechanism.DA:
        return (1.0 - pi) * (s - g) + pi * e
    if mech == Mechanism.TTC:
        return (1.0 - 2.0 * pi) * s + 2.0 * pi * e - g
    raise ValueError(f"no gamma for {mech.value}")


def gamma_slope(mech: Mechanism, params) -> float:
    mech = Mechanism(mech)
    if mech == Mechanism.N:
        return 1.0
    if mech == Mechanism.DA:
        return 1.0 - params.pi
    if mech == Mechanism.TTC:
        return 1.0 - 2.0 * params.pi
    raise ValueError(f"no gamma slope for {mech.value}")


def cutoff_intercept(mech: Mechanism, params) -> float:
    """Intercept a of the cutoff line s_w = a + d w (the root of gamma)."""
    mech = Mechanism(mech)
    g, e, pi = params.g, params.e, params.pi
    if mech == Mechanism.N:
        return g
    if mech == Mechanism.DA:
        return g - pi * e / (1.0 - pi)
    if mech == Mechanism.TTC:
        return (g - 2.0 * pi * e) / (1.0 - 2.0 * pi)
    raise ValueError(f"no intercept for {mech.value}")


def delta_u(mech: Mechanism, r: float, p: float, s, omega: float, params):
    """Expected utility gain of buying in-zone at signal s versus staying out.

    Piecewise linear in s, continuous at the joins, weakly increasing in s
    (strictly above g), and strictly decreasing in p. Accepts scalar or
    array s.
    """
    mech = Mechanism(mech)
    if not (0.0 < r <= 1.0):
        raise ValueError("r must lie in (0, 1]")
    g, e, pi = params.g, params.e, params.pi
    s = np.asarray(s, dtype=float)
    cost = omega * p
    if mech == Mechanism.N:
        out = r * (s - g) - cost
    elif mech == Mechanism.DA:
        lo = r * pi * (s + e - g)
        mid = r * (pi * (s + e - g) + (1.0 - 2.0 * pi) * (s - g))
        hi = r * (s - g)
        out = np.where(s <= g, lo, np.where(s <= e + g, mid, hi)) - cost
    elif mech == Mechanism.TTC:
        lo = r * 2.0 * pi * (e - g) + 0.0 * s
        mid1 = r * (pi * (s + e - g) + (1.0 - 2.0 * pi) * (s - g) + pi * (e - g - s))
        mid2 = r * (pi * (s + e - g) + (1.0 - 2.0 * pi) * (s - g))
        hi = r * (s - g)
        out = np.where(
            s <= g, lo,
            np.where(s <= e - g, mid1, np.where(s <= e + g, mid2, hi))) - cost
    else:
        raise ValueError(f"no delta_u for {mech.value}; see policy_delta_u")
    return out if out.ndim else float(out)


def policy_delta_u(mech: Mechanism, r: float, p: float, s, omega: float, params):
    """Utility gain under the desegregation policies on the example profile.

    DA_L: a pooled lottery over all out-of-district residents fills vacated
    seats; one rejection probability r for everyone. DA_WL: only poor
    out-of-district residents enter the lottery; r applies to the poor type
    and rich out-of-zone rejection is fixed at 1.
    """
    from .economy import is_example_profile

    mech = Mechanism(mech)
    if not is_example_profile(params):
        raise ValueError("policy mechanisms are defined on the example profile only")
    s = np.asarray(s, dtype=float)
    base = (s + 1.0) / 3.0 + s / 3.0
    if mech == Mechanism.DA_L:
        out = -(1.0 - r) * (1.0 - s) / 3.0 + r * base - omega * p
    elif mech == Mechanism.DA_WL:
        if abs(omega - params.wealth.poorest) < 1e-12:
            out = -(1.0 - r) * (1.0 - s) / 3.0 + r * base - omega * p
        else:
            out = base - omega * p
    else:
        raise ValueError(f"{mech.value} is not a policy mechanism")
    return out if out.ndim else float(out)
