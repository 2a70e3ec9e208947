"""Weakly concave signal distributions F on [0, 1]."""
from __future__ import annotations

import bisect
from dataclasses import dataclass

import numpy as np

CONCAVITY_TOL = 1e-12
INVERSE_TOL = 1e-10


class CdfError(ValueError):
    """Invalid argument to a CDF operation (domain or ambiguity error)."""


@dataclass(frozen=True)
class CdfCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class CdfReport:
    checks: tuple[CdfCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CdfCheck]:
        return [c for c in self.checks if not c.passed]


class SignalCdf:
    """Base class. Subclasses implement value/inverse and config round-trip."""

    def value(self, x: float) -> float:
        raise NotImplementedError

    def value_extended(self, x: float) -> float:
        """Evaluate F, continued linearly past 1 with the terminal slope.

        Diagnostic only; the solver never evaluates outside [0, 1].
        """
        if x <= 1.0:
            return self.value(x)
        return 1.0 + self.slope_at_one() * (x - 1.0)

    def inverse(self, y: float) -> float:
        raise NotImplementedError

    def ppf(self, u: np.ndarray) -> np.ndarray:
        """Vectorized inverse for inverse-transform sampling."""
        raise NotImplementedError

    def slope_at_one(self) -> float:
        raise NotImplementedError

    def to_config(self) -> dict:
        raise NotImplementedError


def _check_domain(x: float) -> None:
    if not (0.0 <= x <= 1.0):
        raise CdfError(f"signal {x!r} outside [0, 1]")


@dataclass(frozen=True)
class PiecewiseLinear(SignalCdf):
    """Piecewise-linear CDF given by knots ((0,0), ..., (1,1))."""

    knots: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.knots) < 2:
            raise CdfError("need at least two knots")
        object.__setattr__(self, "knots", tuple((float(x), float(y)) for x, y in self.knots))

    def _xy(self) -> tuple[list[float], list[float]]:
        xs = [k[0] for k in self.knots]
        ys = [k[1] for k in self.knots]
        return xs, ys

    def value(self, x: float) -> float:
        _check_domain(x)
        xs, ys = self._xy()
        i = bisect.bisect_right(xs, x)
        if i >= len(xs):
            return ys[-1]
        if i == 0:
            return ys[0]
        x0, x1 = xs[i - 1], xs[i]
        y0, y1 = ys[i - 1], ys[i]
        if x1 == x0:
            return y1
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def inverse(self, y: float) -> float:
        if not (0.0 <= y <= 1.0):
            raise CdfError(f"probability {y!r} outside [0, 1]")
        xs, ys = self._xy()
        for i in range(1, len(xs)):
            y0, y1 = ys[i - 1], ys[i]
            if y > y1 + 1e-15:
                continue
            if y1 == y0:
                # flat segment; unambiguous only if it sits at probability 1
                if y1 >= 1.0 - 1e-15:
                    return xs[i - 1]
                raise CdfError(f"y={y} lies on a flat segment below 1")
            x0, x1 = xs[i - 1], xs[i]
            return x0 + (x1 - x0) * (y - y0) / (y1 - y0)
        return xs[-1]

    def ppf(self, u: np.ndarray) -> np.ndarray:
        xs, ys = self._xy()
        # truncate after the first knot reaching probability 1 so np.interp
        # maps u=1 to the smallest such signal
        cut = next(i for i, y in enumerate(ys) if y >= 1.0 - 1e-15)
        return np.interp(u, ys[: cut + 1], xs[: cut + 1])

    def slope_at_one(self) -> float:
        xs, ys = self._xy()
        x0, x1 = xs[-2], xs[-1]
        return (ys[-1] - ys[-2]) / (x1 - x0) if x1 > x0 else 0.0

    def to_config(self) -> dict:
        return {"type": "piecewise", "knots": [[x, y] for x, y in self.knots]}


@dataclass(frozen=True)
class Uniform(PiecewiseLinear):
    knots: tuple[tuple[float, float], ...] = ((0.0, 0.0), (1.0, 1.0))

    def to_config(self) -> dict:
        return {"type": "uniform"}


@dataclass(frozen=True)
class SingleKink(PiecewiseLinear):
    """One interior kink at (kink_x, kink_y); concave iff kink_y >= kink_x."""

    kink_x: float = 0.5
    kink_y: float = 0.5

    def __init__(self, kink_x: float, kink_y: float):
        object.__setattr__(self, "kink_x", float(kink_x))
        object.__setattr__(self, "kink_y", float(kink_y))
        super().__init__(((0.0, 0.0), (self.kink_x, self.kink_y), (1.0, 1.0)))

    def to_config(self) -> dict:
        return {"type": "single_kink", "x": self.kink_x, "y": self.kink_y}


@dataclass(frozen=True)
class Power(SignalCdf):
    """F(x) = x ** alpha, concave for alpha in (0, 1]."""

    alpha: float

    def value(self, x: float) -> float:
        _check_domain(x)
        return float(x) ** self.alpha

    def inverse(self, y: float) -> float:
        if not (0.0 <= y <= 1.0):
            raise CdfError(f"probability {y!r} outside [0, 1]")
        return float(y) ** (1.0 / self.alpha)

    def ppf(self, u: np.ndarray) -> np.ndarray:
        return np.asarray(u) ** (1.0 / self.alpha)

    def slope_at_one(self) -> float:
        return self.alpha

    def to_config(self) -> dict:
        return {"type": "power", "alpha": self.alpha}


def validate(f: SignalCdf) -> CdfReport:
    """Check the concave-CDF invariants; returns a report, never raises."""
    checks: list[CdfCheck] = []
    if isinstance(f, Power):
        checks.append(CdfCheck("alpha_range", 0.0 < f.alpha <= 1.0, f"alpha={f.alpha}"))
        checks.append(CdfCheck("endpoints", True))
        checks.append(CdfCheck("nondecreasing", True))
        ok = f.alpha <= 1.0
        checks.append(CdfCheck("concave", ok))
        checks.append(CdfCheck("above_diagonal", ok))
        return CdfReport(tuple(checks))

    assert isinstance(f, PiecewiseLinear)
    xs = [k[0] for k in f.knots]
    ys = [k[1] for k in f.knots]
    checks.append(CdfCheck(
        "endpoints",
        abs(xs[0]) < 1e-15 and abs(ys[0]) < 1e-15
        and abs(xs[-1] - 1.0) < 1e-15 and abs(ys[-1] - 1.0) < 1e-15,
        f"first={f.knots[0]} last={f.knots[-1]}"))
    checks.append(CdfCheck(
        "knots_ordered",
        all(xs[i] < xs[i + 1] for i in range(len(xs) - 1)),
    ))
    checks.append(CdfCheck(
        "nondecreasing",
        all(ys[i] <= ys[i + 1] + CONCAVITY_TOL for i in range(len(ys) - 1)),
    ))
    slopes = [
        (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
        for i in range(len(xs) - 1)
        if xs[i + 1] > xs[i]
    ]
    checks.append(CdfCheck(
        "concave",
        all(slopes[i] >= slopes[i + 1] - CONCAVITY_TOL for i in range(len(slopes) - 1)),
        f"slopes={slopes}"))
    checks.append(CdfCheck(
        "above_diagonal",
        all(y >= x - CONCAVITY_TOL for x, y in f.knots),
    ))
    if isinstance(f, SingleKink):
        checks.append(CdfCheck(
            "kink_above_diagonal", f.kink_y >= f.kink_x,
            f"kink=({f.kink_x}, {f.kink_y})"))
        checks.append(CdfCheck(
            "kink_interior",
            0.0 < f.kink_x < 1.0 and 0.0 < f.kink_y < 1.0,
        ))
    return CdfReport(tuple(checks))


def require_valid(f: SignalCdf) -> SignalCdf:
    report = validate(f)
    if not report.passed:
        names = ", ".join(c.name for c in report.failures())
        raise CdfError(f"invalid signal CDF: failed {names}")
    return f


def enumerate_single_kink(step: float) -> list[SignalCdf]:
    """All grid single-kink CDFs with 0 < x <= y < 1 on a step grid.

    On-diagonal kinks coincide with the uniform distribution but are kept
    as distinct grid records; ordering is lexicographic in (x, y).
    """
    n = round(1.0 / step)
    if abs(n * step - 1.0) > 1e-9 or n < 2:
        raise CdfError(f"step {step} does not divide 1 evenly")
    grid = [i * step for i in range(1, n)]
    out: list[SignalCdf] = []
    for x in grid:
        for y in grid:
            if y >= x:
                out.append(SingleKink(x, y))
    return out


def cdf_from_config(cfg: dict) -> SignalCdf:
    if not isinstance(cfg, dict) or "type" not in cfg:
        raise CdfError("cdf config must be an object with a 'type' field")
    kind = cfg["type"]
    known = {
        "uniform": {"type"},
        "single_kink": {"type", "x", "y"},
        "piecewise": {"type", "knots"},
        "power": {"type", "alpha"},
    }
    if kind not in known:
        raise CdfError(f"unknown cdf type {kind!r}")
    extra = set(cfg) - known[kind]
    if extra:
        raise CdfError(f"unknown cdf fields {sorted(extra)}")
    if kind == "uniform":
        f: SignalCdf = Uniform()
    elif kind == "single_kink":
        f = SingleKink(cfg["x"], cfg["y"])
    elif kind == "piecewise":
        f = PiecewiseLinear(tuple((x, y) for x, y in cfg["knots"]))
    else:
        f = Power(float(cfg["alpha"]))
    return require_valid(f)


def cdf_eval(f: SignalCdf, x: float) -> float:
    return f.value(x)


def cdf_inverse(f: SignalCdf, y: float) -> float:
    return f.inverse(y)
