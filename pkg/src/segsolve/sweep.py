"""Batch experiments over single-kink signal distributions and parameter cubes."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from . import mechanisms as mx
from .cdf import SingleKink, enumerate_single_kink
from .economy import (EconomyError, EconomyParams, binary_wealth,
                      check_assumption1, check_assumption2)
from .equilibrium import SolveError, solve
from .segregation import NegativeMassError, school_profile


def thread_count() -> int:
    env = os.environ.get("SEGSOLVE_THREADS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


@dataclass(frozen=True)
class KinkRecord:
    x: float
    y: float
    share_n: float
    share_da: float
    diff: float
    feasible: bool


@dataclass(frozen=True)
class KinkSweepResult:
    step: float
    records: tuple[KinkRecord, ...]

    def feasible_records(self) -> list[KinkRecord]:
        return [r for r in self.records if r.feasible]

    def to_csv(self) -> str:
        lines = ["x,y,share_N,share_DA,diff,feasible"]
        for r in self.records:
            lines.append(
                f"{r.x:.12g},{r.y:.12g},{r.share_n:.12g},{r.share_da:.12g},"
                f"{r.diff:.12g},{int(r.feasible)}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CubeCell:
    rho_p: float
    q: float
    pi: float
    n_feasible: int
    n_da_less: int

    @property
    def pct(self) -> float:
        return 100.0 * self.n_da_less / self.n_feasible if self.n_feasible else 0.0


@dataclass(frozen=True)
class CubeSweepResult:
    rho_list: tuple[float, ...]
    q_list: tuple[float, ...]
    pi_list: tuple[float, ...]
    step: float
    cells: tuple[CubeCell, ...]

    def cell(self, rho_p: float, q: float, pi: float) -> CubeCell:
        for c in self.cells:
            if (abs(c.rho_p - rho_p) < 1e-9 and abs(c.q - q) < 1e-9
                    and abs(c.pi - pi) < 1e-9):
                return c
        raise KeyError((rho_p, q, pi))

    def to_csv(self) -> str:
        lines = ["rho_p,q,pi,n_feasible,n_da_less,pct"]
        for c in self.cells:
            lines.append(
                f"{c.rho_p:.12g},{c.q:.12g},{c.pi:.12g},"
                f"{c.n_feasible},{c.n_da_less},{c.pct:.12g}")
        return "\n".join(lines) + "\n"


def _kink_record(params_base: EconomyParams, f: SingleKink) -> KinkRecord:
    nan = float("nan")
    try:
        params = replace(params_base, cdf=f)
    except EconomyError:
        return KinkRecord(f.kink_x, f.kink_y, nan, nan, nan, False)
    if not check_assumption1(params).passed:
        return KinkRecord(f.kink_x, f.kink_y, nan, nan, nan, False)
    if not check_assumption2(params, mechs=(mx.Mechanism.N, mx.Mechanism.DA)).passed:
        return KinkRecord(f.kink_x, f.kink_y, nan, nan, nan, False)
    try:
        share_n = school_profile(solve(params, mx.Mechanism.N, check=False)).poor_share
        share_da = school_profile(solve(params, mx.Mechanism.DA, check=False)).poor_share
    except (SolveError, mx.DegenerateChoiceError, NegativeMassError):
        return KinkRecord(f.kink_x, f.kink_y, nan, nan, nan, False)
    return KinkRecord(f.kink_x, f.kink_y, share_n, share_da, share_da - share_n, True)


def kink_sweep(params_base: EconomyParams, step: float) -> KinkSweepResult:
    """Solve N and DA for every single-kink signal CDF on the grid."""
    if not params_base.wealth.is_binary():
        raise ValueError("kink sweep expects binary wealth")
    records = tuple(_kink_record(params_base, f) for f in enumerate_single_kink(step))
    return KinkSweepResult(step, records)


SEG_TOL = 1e-9


def da_less_segregated_count(result: KinkSweepResult, params_base: EconomyParams) -> tuple[int, int]:
    """(feasible count, count with school segregation strictly lower under DA).

    Segregation is compared through the poor share at the oversubscribed
    school: with binary wealth, a poor share closer to the population share
    means a smaller average-wealth deviation.
    """
    rho_p = params_base.wealth.poor_rho
    n_feasible = n_less = 0
    for r in result.feasible_records():
        n_feasible += 1
        if abs(r.share_da - rho_p) < abs(r.share_n - rho_p) - SEG_TOL:
            n_less += 1
    return n_feasible, n_less


def _cube_cell(args) -> CubeCell:
    rho_p, q, pi, step = args
    try:
        params = EconomyParams(
            m=2, q=q, g=0.0, e=1.0, pi=pi,
            wealth=binary_wealth(rho_p), cdf=SingleKink(0.5, 0.5))
    except EconomyError:
        return CubeCell(rho_p, q, pi, 0, 0)
    result = kink_sweep(params, step)
    n_feasible, n_less = da_less_segregated_count(result, params)
    return CubeCell(rho_p, q, pi, n_feasible, n_less)


def cube_sweep(rho_list, q_list, pi_list, step: float = 0.1) -> CubeSweepResult:
    """Share of single-kink CDFs with lower school segregation under DA,
    across a (rho_p, q, pi) parameter grid."""
    tasks = [(rho_p, q, pi, step)
             for rho_p in rho_list for q in q_list for pi in pi_list]
    workers = thread_count()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = tuple(pool.map(_cube_cell, tasks))
    else:
        cells = tuple(_cube_cell(t) for t in tasks)
    return CubeSweepResult(tuple(rho_list), tuple(q_list), tuple(pi_list), step, cells)
