"""Model parameters and the pre-solve assumption checks."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cdf import SignalCdf, Uniform, cdf_from_config, require_valid


class EconomyError(ValueError):
    """Structurally invalid parameter vector."""


@dataclass(frozen=True)
class WealthDist:
    """Finite wealth distribution; atoms sorted poorest (largest omega) first."""

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        atoms = tuple(sorted(((float(w), float(r)) for w, r in self.atoms), reverse=True))
        object.__setattr__(self, "atoms", atoms)
        omegas = [w for w, _ in atoms]
        rhos = [r for _, r in atoms]
        if not atoms:
            raise EconomyError("wealth distribution needs at least one atom")
        if any(w <= 0 for w in omegas):
            raise EconomyError("wealth indices must be positive")
        if len(set(omegas)) != len(omegas):
            raise EconomyError("wealth indices must be pairwise distinct")
        if any(r <= 0 for r in rhos):
            raise EconomyError("atom probabilities must be positive")
        if abs(sum(rhos) - 1.0) > 1e-12:
            raise EconomyError(f"atom probabilities sum to {sum(rhos)}, not 1")
        mean = sum(w * r for w, r in atoms)
        if abs(mean - 1.0) > 1e-12:
            raise EconomyError(f"mean wealth index is {mean}, not 1")

    @property
    def omegas(self) -> np.ndarray:
        return np.array([w for w, _ in self.atoms])

    @property
    def rhos(self) -> np.ndarray:
        return np.array([r for _, r in self.atoms])

    @property
    def poorest(self) -> float:
        return self.atoms[0][0]

    @property
    def poor_rho(self) -> float:
        return self.atoms[0][1]

    def is_binary(self) -> bool:
        return len(self.atoms) == 2


def binary_wealth(rho_poor: float, spread: float = 0.25) -> WealthDist:
    """Two-point wealth distribution with mean 1 and fixed omega spread."""
    w_poor = 1.0 + (1.0 - rho_poor) * spread
    w_rich = 1.0 - rho_poor * spread
    return WealthDist(((w_poor, rho_poor), (w_rich, 1.0 - rho_poor)))


@dataclass(frozen=True)
class EconomyParams:
    m: int
    q: float
    g: float
    e: float
    pi: float
    wealth: WealthDist
    cdf: SignalCdf
    delta_q: float = 0.0

    def __post_init__(self):
        if self.m < 2:
            raise EconomyError("need at least two specialized schools")
        if not (0.0 < self.q < 1.0):
            raise EconomyError("q must lie in (0, 1)")
        if self.delta_q < 0.0:
            raise EconomyError("delta_q must be nonnegative")
        if self.g < 0.0:
            raise EconomyError("g must be nonnegative")
        if self.e <= 0.0:
            raise EconomyError("e must be positive")
        if not (0.0 < self.pi < 0.5):
            raise EconomyError("pi must lie in (0, 1/2)")
        if self.e + self.g > 1.0 + 1e-12:
            raise EconomyError("e + g must not exceed 1")
        require_valid(self.cdf)

    @classmethod
    def from_config(cls, cfg: dict) -> "EconomyParams":
        known = {"m", "q", "delta_q", "g", "e", "pi", "wealth", "cdf"}
        if not isinstance(cfg, dict):
            raise EconomyError("economy config must be an object")
        extra = set(cfg) - known
        if extra:
            raise EconomyError(f"unknown economy fields {sorted(extra)}")
        missing = known - {"delta_q"} - set(cfg)
        if missing:
            raise EconomyError(f"missing economy fields {sorted(missing)}")
        wealth = WealthDist(tuple((w, r) for w, r in cfg["wealth"]))
        return cls(
            m=int(cfg["m"]),
            q=float(cfg["q"]),
            delta_q=float(cfg.get("delta_q", 0.0)),
            g=float(cfg["g"]),
            e=float(cfg["e"]),
            pi=float(cfg["pi"]),
            wealth=wealth,
            cdf=cdf_from_config(cfg["cdf"]),
        )

    def to_config(self) -> dict:
        return {
            "m": self.m,
            "q": self.q,
            "delta_q": self.delta_q,
            "g": self.g,
            "e": self.e,
            "pi": self.pi,
            "wealth": [[w, r] for w, r in self.wealth.atoms],
            "cdf": self.cdf.to_config(),
        }


@dataclass(frozen=True)
class AssumptionReport:
    name: str
    passed: bool
    boundary: bool = False
    checks: tuple[tuple[str, bool], ...] = field(default_factory=tuple)

    def failures(self) -> list[str]:
        return [n for n, ok in self.checks if not ok]


def check_assumption1(params: EconomyParams) -> AssumptionReport:
    """Interior-cutoff condition F(g) < 1-q < F(e-g) <= 1.

    The final inequality is strict in general; equality F(e-g) = 1 is
    accepted with a boundary flag (it arises at g = 0, e = 1).
    """
    f = params.cdf
    fg = f.value(params.g)
    feg = f.value(params.e - params.g)
    checks = (
        ("F(g) < 1-q", fg < 1.0 - params.q),
        ("1-q < F(e-g)", 1.0 - params.q < feg),
        ("F(e-g) <= 1", feg <= 1.0 + 1e-12),
    )
    boundary = feg >= 1.0 - 1e-12
    return AssumptionReport("assumption1", all(ok for _, ok in checks), boundary, checks)


def price_bounds(params: EconomyParams, mech) -> tuple[float, float]:
    """Price interval [p_hat, p_bar] supporting an interior equilibrium."""
    from . import mechanisms as mx

    mech = mx.Mechanism(mech)
    r_hat = mx.rejection(params, mech)
    q, g, e, pi = params.q, params.g, params.e, params.pi
    p_hat = r_hat * mx.gamma(mech, params.cdf.inverse(1.0 - q), params)
    if mech == mx.Mechanism.N:
        p_bar = r_hat * (1.0 - q - g)
    elif mech == mx.Mechanism.DA:
        p_bar = r_hat * ((1.0 - pi) * (1.0 - q - g) + pi * e)
    else:
        p_bar = r_hat * ((1.0 - 2.0 * pi) * (1.0 - q) + 2.0 * pi * e - g)
    if p_hat > p_bar + 1e-12:
        raise EconomyError(f"price bounds inverted for {mech.value}: {p_hat} > {p_bar}")
    return p_hat, p_bar


def check_assumption2(params: EconomyParams, mechs=None) -> AssumptionReport:
    """Interior-cutoff condition on the utility gain at the price bounds.

    Delta u is linear and decreasing in p, so checking Delta u(g) < 0 at
    p_hat and Delta u(e-g) > 0 at p_bar covers the whole interval.
    """
    from . import mechanisms as mx

    if mechs is None:
        mechs = (mx.Mechanism.N, mx.Mechanism.DA, mx.Mechanism.TTC)
    checks = []
    for mech in mechs:
        mech = mx.Mechanism(mech)
        try:
            r_hat = mx.rejection(params, mech)
            p_hat, p_bar = price_bounds(params, mech)
        except (mx.DegenerateChoiceError, EconomyError) as exc:
            checks.append((f"{mech.value}: bounds ({exc})", False))
            continue
        for omega in params.wealth.omegas:
            lo = mx.delta_u(mech, r_hat, p_hat, params.g, omega, params)
            hi = mx.delta_u(mech, r_hat, p_bar, params.e - params.g, omega, params)
            checks.append((f"{mech.value}: du(g)<0 at omega={omega}", lo < 0.0))
            checks.append((f"{mech.value}: du(e-g)>0 at omega={omega}", hi > 0.0))
    return AssumptionReport("assumption2", all(ok for _, ok in checks), False, tuple(checks))


def example_economy() -> EconomyParams:
    """The worked-example profile used by all benchmark tables."""
    return EconomyParams(
        m=2, q=0.4, g=0.0, e=1.0, pi=1.0 / 3.0,
        wealth=WealthDist(((9.0 / 8.0, 0.5), (7.0 / 8.0, 0.5))),
        cdf=Uniform(),
    )


def is_example_profile(params: EconomyParams) -> bool:
    return (
        params.m == 2
        and abs(params.g) < 1e-12
        and abs(params.e - 1.0) < 1e-12
        and abs(params.pi - 1.0 / 3.0) < 1e-9
        and isinstance(params.cdf, Uniform)
        and params.wealth.is_binary()
    )
