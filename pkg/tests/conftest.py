"""Shared fixtures and the random valid-economy sampler."""
import random

import pytest

import segsolve as ss
from segsolve import mechanisms as mx
from segsolve.cdf import PiecewiseLinear, Power, SingleKink, Uniform
from segsolve.economy import (EconomyError, EconomyParams, WealthDist,
                              check_assumption1, check_assumption2)
from segsolve.equilibrium import SolveError, solve


@pytest.fixture
def example():
    return ss.example_economy()


def _random_wealth(rng: random.Random) -> WealthDist:
    k = rng.randint(2, 4)
    while True:
        omegas = sorted(rng.uniform(0.88, 1.12) for _ in range(k))
        if min(b - a for a, b in zip(omegas, omegas[1:])) > 1e-3:
            break
    weights = [rng.uniform(0.5, 1.5) for _ in range(k)]
    total = sum(weights)
    rhos = [w / total for w in weights]
    mean = sum(w * r for w, r in zip(omegas, rhos))
    return WealthDist(tuple((w / mean, r) for w, r in zip(omegas, rhos)))


def _random_cdf(rng: random.Random):
    kind = rng.choice(["uniform", "power", "kink", "piecewise"])
    if kind == "uniform":
        return Uniform()
    if kind == "power":
        return Power(rng.uniform(0.6, 1.0))
    if kind == "kink":
        x = rng.uniform(0.15, 0.7)
        y = rng.uniform(x, min(0.98, x + 0.3))
        return SingleKink(x, y)
    alpha = rng.uniform(0.65, 1.0)
    xs = (1.0 / 3.0, 2.0 / 3.0)
    return PiecewiseLinear(((0.0, 0.0),) + tuple((x, x ** alpha) for x in xs)
                           + ((1.0, 1.0),))


def random_economy(rng: random.Random, uniform_binary: bool = False,
                   max_tries: int = 500):
    """Sample parameters until both assumptions hold and n/da/ttc all solve.

    Returns (params, {mech: equilibrium}).
    """
    for _ in range(max_tries):
        q = rng.uniform(0.25, 0.75)
        pi = rng.uniform(0.08, 0.42)
        e = rng.uniform(0.6, 1.0)
        g = rng.uniform(0.0, min(0.08, 1.0 - e))
        if uniform_binary:
            cdf = Uniform()
            wealth = ss.binary_wealth(rng.uniform(0.2, 0.8),
                                      spread=rng.uniform(0.1, 0.3))
        else:
            cdf = _random_cdf(rng)
            wealth = _random_wealth(rng)
        try:
            params = EconomyParams(m=2, q=q, g=g, e=e, pi=pi,
                                   wealth=wealth, cdf=cdf)
        except EconomyError:
            continue
        if not check_assumption1(params).passed:
            continue
        if not check_assumption2(params).passed:
            continue
        try:
            eqs = {mech: solve(params, mech) for mech in mx.CORE}
        except (SolveError, mx.DegenerateChoiceError):
            continue
        return params, eqs
    raise RuntimeError("could not sample a valid economy")
