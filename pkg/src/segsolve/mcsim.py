"""Finite-agent Monte Carlo oracle for the continuum model."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import mechanisms as mx
from .economy import EconomyParams


@dataclass(frozen=True)
class SimConfig:
    params: EconomyParams
    mech: mx.Mechanism
    cutoffs: tuple[tuple[float, float], ...]  # (omega, s)
    n_agents: int = 200_000
    seed: int = 0
    replications: int = 2

    def __post_init__(self):
        if self.n_agents < 1_000:
            raise ValueError("need at least 1,000 agents")
        if self.n_agents * self.params.q < 100:
            raise ValueError("too few seats for meaningful rates")
        if self.replications < 1:
            raise ValueError("need at least one replication")


@dataclass(frozen=True)
class Agents:
    t1: np.ndarray      # primary school, 1..m
    t2: np.ndarray      # secondary school, 1..m
    s: np.ndarray       # signal
    eps: np.ndarray     # realized shock in {-e, 0, +e}
    omega: np.ndarray   # wealth index values
    omega_idx: np.ndarray

    @property
    def n(self) -> int:
        return self.t1.size


@dataclass(frozen=True)
class SimResult:
    mech: mx.Mechanism
    n_agents: int
    replications: int
    seed: int
    stats: dict[str, tuple[float, float]]          # name -> (mean, se)
    per_replication: dict[str, np.ndarray] = field(repr=False)

    def mean(self, name: str) -> float:
        return self.stats[name][0]

    def se(self, name: str) -> float:
        return self.stats[name][1]

    def z(self, name: str, target: float) -> float:
        m, se = self.stats[name]
        if se == 0.0:
            return 0.0 if abs(m - target) < 1e-12 else math.inf
        return (m - target) / se

    def to_dict(self) -> dict:
        return {
            "mech": self.mech.value,
            "n_agents": self.n_agents,
            "replications": self.replications,
            "seed": self.seed,
            "stats": {k: {"mean": m, "se": se} for k, (m, se) in self.stats.items()},
            "per_replication": {k: list(v) for k, v in self.per_replication.items()},
        }


def sample_agents(params: EconomyParams, n: int, rng: np.random.Generator) -> Agents:
    m = params.m
    t1 = rng.integers(1, m + 1, size=n)
    shift = rng.integers(1, m, size=n)
    t2 = (t1 - 1 + shift) % m + 1
    s = params.cdf.ppf(rng.random(n))
    eps = params.e * rng.choice(
        np.array([-1.0, 0.0, 1.0]),
        size=n,
        p=[params.pi, 1.0 - 2.0 * params.pi, params.pi])
    omega_idx = rng.choice(len(params.wealth.atoms), size=n, p=params.wealth.rhos)
    omega = params.wealth.omegas[omega_idx]
    return Agents(t1, t2, s, eps, omega, omega_idx)


def _cutoff_per_agent(agents: Agents, cutoffs, params: EconomyParams) -> np.ndarray:
    lookup = dict(cutoffs)
    table = np.array([lookup[w] for w, _ in params.wealth.atoms])
    return table[agents.omega_idx]


def housing_stage(agents: Agents, cutoffs, params: EconomyParams,
                  rng: np.random.Generator) -> np.ndarray:
    """Residency per agent: 0 for n0, else the neighborhood index 1..m."""
    s_cut = _cutoff_per_agent(agents, cutoffs, params)
    demand = agents.s > s_cut
    cap = int(agents.n * params.q / params.m)
    residency = np.zeros(agents.n, dtype=np.int64)
    for k in range(1, params.m + 1):
        idx = np.flatnonzero(demand & (agents.t1 == k))
        if idx.size > cap:
            idx = rng.choice(idx, size=cap, replace=False)
        residency[idx] = k
    return residency


def preferences(agents: Agents, params: EconomyParams) -> np.ndarray:
    """Strict school rankings (n, 3): the two fitting schools and c0 (id 0).

    Exact utility ties break toward the lower school index.
    """
    fit = agents.s + agents.eps
    utils = np.column_stack([
        np.full(agents.n, params.g),  # c0
        fit,                          # primary
        -fit,                         # secondary
    ])
    ids = np.column_stack([np.zeros(agents.n, dtype=np.int64), agents.t1, agents.t2])
    order = np.lexsort((ids, -utils), axis=1)
    return np.take_along_axis(ids, order, axis=1)


def school_capacities(n: int, params: EconomyParams) -> np.ndarray:
    cap = int(n * (params.q + params.delta_q) / params.m)
    caps = np.zeros(params.m + 1, dtype=np.int64)
    caps[1:] = cap
    caps[0] = n  # c0 never binds
    return caps


def run_da_finite(agents: Agents, residency: np.ndarray, params: EconomyParams,
                  lottery: np.ndarray, prefs: np.ndarray | None = None) -> np.ndarray:
    """Student-proposing deferred acceptance with resident priority and a
    single tie-breaking lottery number per student."""
    if prefs is None:
        prefs = preferences(agents, params)
    caps = school_capacities(agents.n, params)
    ptr = np.zeros(agents.n, dtype=np.int64)
    cur = np.full(agents.n, -1, dtype=np.int64)
    while True:
        free = np.flatnonzero(cur == -1)
        if free.size == 0:
            break
        proposals = prefs[free, ptr[free]]
        cur[free] = proposals  # tentatively hold; trim oversubscribed below
        for k in range(1, params.m + 1):
            pool = np.flatnonzero(cur == k)
            if pool.size <= caps[k]:
                continue
            nonres = (residency[pool] != k).astype(np.int64)
            order = np.lexsort((lottery[pool], nonres))
            rejected = pool[order[caps[k]:]]
            cur[rejected] = -1
            ptr[rejected] += 1
    return cur


def run_n_finite(agents: Agents, residency: np.ndarray) -> np.ndarray:
    """No school choice: everyone attends their neighborhood school."""
    return residency.copy()


def run_ttc_finite(agents: Agents, residency: np.ndarray, params: EconomyParams,
                   lottery: np.ndarray, prefs: np.ndarray | None = None) -> np.ndarray:
    """Top trading cycles with counters; c0 has unlimited seats."""
    if prefs is None:
        prefs = preferences(agents, params)
    n = agents.n
    caps = school_capacities(n, params)
    assigned = np.full(n, -1, dtype=np.int64)
    # school priority orders: residents first, then by lottery
    order_by_school = {}
    sptr = {}
    for k in range(1, params.m + 1):
        nonres = (residency != k).astype(np.int64)
        order_by_school[k] = np.lexsort((lottery, nonres))
        sptr[k] = 0
    stud_ptr = np.zeros(n, dtype=np.int64)

    def top_school(i: int) -> int:
        while True:
            c = prefs[i, stud_ptr[i]]
            if c == 0 or caps[c] > 0:
                return int(c)
            stud_ptr[i] += 1

    def top_student(k: int) -> int:
        order = order_by_school[k]
        p = sptr[k]
        while assigned[order[p]] >= 0:
            p += 1
        sptr[k] = p
        return int(order[p])

    for i in range(n):
        while assigned[i] < 0:
            stack = [i]
            pos = {i: 0}
            restart = False
            while True:
                curr = stack[-1]
                c = top_school(curr)
                if c == 0:
                    assigned[curr] = 0
                    del pos[curr]
                    stack.pop()
                    if not stack:
                        break
                    continue
                t = top_student(c)
                if t in pos:
                    start = pos[t]
                    cycle = stack[start:]
                    targets = [top_school(j) for j in cycle]
                    closed = False
                    for j, cj in zip(cycle, targets):
                        assigned[j] = cj
                        caps[cj] -= 1
                        if caps[cj] == 0:
                            closed = True
                    for j in cycle:
                        del pos[j]
                    del stack[start:]
                    if closed or not stack:
                        restart = True
                        break
                else:
                    pos[t] = len(stack)
                    stack.append(t)
            if restart:
                continue
            break
    return assigned


def check_da_stability(agents: Agents, residency: np.ndarray, assignment: np.ndarray,
                       params: EconomyParams, lottery: np.ndarray,
                       sample: np.ndarray | None = None) -> list[tuple[int, int]]:
    """Blocking pairs under resident-then-lottery priorities; empty if stable."""
    prefs = preferences(agents, params)
    caps = school_capacities(agents.n, params)
    rank = np.argsort(prefs, axis=1)  # rank[i, school] = position in i's list
    blocking = []
    agents_to_check = sample if sample is not None else np.arange(agents.n)
    for k in range(1, params.m + 1):
        admitted = np.flatnonzero(assignment == k)
        if admitted.size < caps[k]:
            worst = (2, math.inf)  # empty seat: anyone prefers in
        else:
            keys = [( int(residency[j] != k), float(lottery[j])) for j in admitted]
            worst = max(keys)
        for i in agents_to_check:
            if assignment[i] == k:
                continue
            if rank[i, k] < rank[i, assignment[i]]:
                key_i = (int(residency[i] != k), float(lottery[i]))
                if key_i < worst:
                    blocking.append((int(i), k))
    return blocking


def find_ttc_improvement(agents: Agents, assignment: np.ndarray,
                         params: EconomyParams) -> list[int] | None:
    """Exhaustive Pareto-improvement search: a free-seat upgrade or a trading
    cycle among students. Returns the improving group or None. O(n^2); use
    at small n only."""
    prefs = preferences(agents, params)
    caps = school_capacities(agents.n, params)
    rank = np.argsort(prefs, axis=1)
    counts = np.bincount(assignment, minlength=params.m + 1)
    n = agents.n
    better: list[list[int]] = []
    for i in range(n):
        better.append([k for k in range(params.m + 1)
                       if k != assignment[i] and rank[i, k] < rank[i, assignment[i]]])
        for k in better[-1]:
            if k == 0 or counts[k] < caps[k]:
                return [i]
    # cycle search: edge i -> j when j holds a school i strictly prefers
    color = np.zeros(n, dtype=np.int64)
    parent_stack: list[int] = []

    def dfs(i: int) -> list[int] | None:
        color[i] = 1
        parent_stack.append(i)
        for k in better[i]:
            for j in np.flatnonzero(assignment == k):
                j = int(j)
                if color[j] == 1:
                    return parent_stack[parent_stack.index(j):]
                if color[j] == 0:
                    found = dfs(j)
                    if found is not None:
                        return found
        color[i] = 2
        parent_stack.pop()
        return None

    for i in range(n):
        if color[i] == 0:
            parent_stack.clear()
            found = dfs(i)
            if found is not None:
                return found
    return None


def run_mechanism(agents: Agents, residency: np.ndarray, params: EconomyParams,
                  mech: mx.Mechanism, lottery: np.ndarray) -> np.ndarray:
    mech = mx.Mechanism(mech)
    if mech == mx.Mechanism.N:
        return run_n_finite(agents, residency)
    if mech == mx.Mechanism.DA:
        return run_da_finite(agents, residency, params, lottery)
    if mech == mx.Mechanism.TTC:
        return run_ttc_finite(agents, residency, params, lottery)
    raise ValueError(f"no finite algorithm for {mech.value}")


def replication_stats(config: SimConfig, rng: np.random.Generator) -> dict[str, float]:
    params = config.params
    agents = sample_agents(params, config.n_agents, rng)
    residency = housing_stage(agents, config.cutoffs, params, rng)
    lottery = rng.random(config.n_agents)
    assignment = run_mechanism(agents, residency, params, config.mech, lottery)

    n = agents.n
    stats: dict[str, float] = {}
    prefs = preferences(agents, params)
    top = prefs[:, 0]
    out_of_zone = (top >= 1) & (residency != top)
    if config.mech == mx.Mechanism.TTC:
        # cross-zone residents trade through cycles; only n0 residents
        # face the tie-breaking lottery
        out_of_zone &= residency == 0
    applicants = np.flatnonzero(out_of_zone)
    if applicants.size:
        rejected = assignment[applicants] != top[applicants]
        stats["r"] = float(np.mean(rejected))
    else:
        stats["r"] = float("nan")

    specialized = assignment >= 1
    in_n1 = residency >= 1
    for idx, (w, _) in enumerate(params.wealth.atoms):
        sel = agents.omega_idx == idx
        stats[f"n1_mass[{w:.6g}]"] = float(np.sum(sel & in_n1)) / n
        stats[f"c1_mass[{w:.6g}]"] = float(np.sum(sel & specialized)) / n
    n1_total = np.sum(in_n1)
    c1_total = np.sum(specialized)
    poor = agents.omega_idx == 0
    stats["poor_share_n1"] = float(np.sum(poor & in_n1)) / n1_total if n1_total else float("nan")
    stats["poor_share_c1"] = float(np.sum(poor & specialized)) / c1_total if c1_total else float("nan")

    fit = agents.s + agents.eps
    value = np.where(assignment == agents.t1, fit,
                     np.where(assignment == agents.t2, -fit, 0.0))
    value = np.where(specialized, value, 0.0)
    stats["quality_total"] = 100.0 * float(np.sum(value)) / n
    for idx, (w, _) in enumerate(params.wealth.atoms):
        sel = agents.omega_idx == idx
        stats[f"quality[{w:.6g}]"] = 100.0 * float(np.sum(value[sel])) / n
    return stats


def estimate(config: SimConfig) -> SimResult:
    seeds = np.random.SeedSequence(config.seed).spawn(config.replications)
    rows = [replication_stats(config, np.random.default_rng(s)) for s in seeds]
    names = rows[0].keys()
    per_rep = {k: np.array([row[k] for row in rows]) for k in names}
    stats = {}
    for k, vals in per_rep.items():
        mean = float(np.mean(vals))
        if len(vals) > 1:
            se = float(np.std(vals, ddof=1) / math.sqrt(len(vals)))
        else:
            se = float("nan")
        stats[k] = (mean, se)
    return SimResult(config.mech, config.n_agents, config.replications,
                     config.seed, stats, per_rep)
