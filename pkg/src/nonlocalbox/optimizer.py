"""Maximal equal biasness at a pinned CHSH value.

On the equal-bias slice (all four marginals equal to ``p``) the signed CHSH
value is ``2 + 4(c1 + c2 + c3 - c4) - 8p``.  Pinning it to a target eliminates
``c4``, leaving a three-dimensional search over ``(c1, c2, c3)`` for every trial
``p``.  The no-signaling optimum is available in closed form; the IC and ML
optima are found by bisection on ``p`` with a multistart Nelder-Mead
feasibility test at each trial value.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog, minimize

from ._parallel import worker_count
from .box import (
    TSIRELSON,
    CorrelationBox,
    EqualBiasBox,
    NsParams,
    biasness,
    box_from_equal_bias,
    box_from_ns_params,
    quantum_tsirelson_box,
)
from .criteria import (
    BOUNDARY_TOL,
    CriterionKind,
    CriterionReport,
    check_no_signaling,
    evaluate,
)
from .errors import ConfigError, InfeasibleTarget

# c4 excursions outside its window are weighted this much against criterion excess
WINDOW_PENALTY = 10.0
# inner feasibility threshold; kept below BOUNDARY_TOL so the final report is satisfied
FEASIBILITY_TOL = 0.5 * BOUNDARY_TOL


@dataclass(frozen=True)
class OptimizerOptions:
    chsh_target: float = TSIRELSON
    p_bisection_tol: float = 1e-6
    inner_starts: int = 125
    inner_iter_cap: int = 2000
    seed: int = 0

    def validate(self) -> "OptimizerOptions":
        if not (2.0 <= self.chsh_target <= 4.0):
            raise ConfigError(f"chsh_target must lie in [2, 4], got {self.chsh_target!r}")
        if not self.p_bisection_tol > 0:
            raise ConfigError("p_bisection_tol must be positive")
        if self.inner_starts < 1 or self.inner_iter_cap < 1:
            raise ConfigError("inner_starts and inner_iter_cap must be at least 1")
        if not (0 <= self.seed < 2**64):
            raise ConfigError("seed must be a 64-bit unsigned integer")
        return self


@dataclass(frozen=True)
class Distance:
    max_abs: float
    total_variation: float

    def to_dict(self) -> dict[str, float]:
        return {"max_abs": self.max_abs, "total_variation": self.total_variation}


def distance_to_quantum(box: CorrelationBox) -> Distance:
    """Entrywise and setting-averaged total-variation distance to the Tsirelson box."""
    diff = np.abs(box.prob - quantum_tsirelson_box().prob)
    per_setting_tv = 0.5 * diff.sum(axis=(2, 3))
    return Distance(float(diff.max()), float(per_setting_tv.mean()))


@dataclass(frozen=True)
class BiasMaxResult:
    criterion: CriterionKind
    chsh_target: float
    p_star: float
    bias_percent: float
    extremal_box: EqualBiasBox | NsParams
    report: CriterionReport
    distance_to_quantum: Distance
    method: str
    info: dict = field(default_factory=dict, compare=False)

    @property
    def box(self) -> CorrelationBox:
        if isinstance(self.extremal_box, EqualBiasBox):
            return box_from_equal_bias(self.extremal_box)
        return box_from_ns_params(self.extremal_box)

    def to_dict(self) -> dict:
        eb = self.extremal_box
        if isinstance(eb, EqualBiasBox):
            box_doc = {"format": "equal_bias", "p": eb.p, "c": list(eb.c)}
        else:
            box_doc = {"format": "ns_params", "m1": eb.m1, "m2": eb.m2, "n1": eb.n1, "n2": eb.n2, "c": list(eb.c)}
        return {
            "criterion": self.criterion.value,
            "chsh_target": self.chsh_target,
            "p_star": self.p_star,
            "bias_percent": self.bias_percent,
            "method": self.method,
            "extremal_box": box_doc,
            "report": self.report.to_dict(),
            "distance_to_quantum": self.distance_to_quantum.to_dict(),
            "info": dict(self.info),
        }


class _Slice:
    """Equal-bias boxes at fixed ``p`` with ``c4`` eliminated by the CHSH pin."""

    def __init__(self, kind: CriterionKind, p: float, target: float):
        self.kind = kind
        self.p = p
        self.lo = max(0.0, 2.0 * p - 1.0)
        self.hi = p
        self.s_total = (target - 2.0 + 8.0 * p) / 4.0  # c1 + c2 + c3 - c4

    def c4(self, c1: float, c2: float, c3: float) -> float:
        return c1 + c2 + c3 - self.s_total

    def excess(self, x) -> float:
        """Worst criterion lhs minus its bound, or the c4 window excursion."""
        c1, c2, c3 = (float(v) for v in x)
        c4 = self.c4(c1, c2, c3)
        outside = max(self.lo - c4, c4 - self.hi, 0.0)
        c4 = min(max(c4, self.lo), self.hi)
        p = self.p
        if self.kind is CriterionKind.IC:
            # P(a=b|xy) = 1 + 2c - 2p on the slice; P(a!=b|11) = 2p - 2c4
            same = [1.0 + 2.0 * c - 2.0 * p for c in (c1, c2, c3, c4)]
            e1 = same[0] + same[2] - 1.0
            e2 = same[1] + (1.0 - same[3]) - 1.0
            f1 = same[0] + same[1] - 1.0
            f2 = same[2] + (1.0 - same[3]) - 1.0
            value = max(e1 * e1 + e2 * e2, f1 * f1 + f2 * f2) - 1.0
        else:
            q = p * (1.0 - p)
            total = 0.0
            for sign, c in ((1.0, c1), (1.0, c2), (1.0, c3), (-1.0, c4)):
                d = min(1.0, max(-1.0, (c - p * p) / q))
                total += sign * math.asin(d)
            value = abs(total) - math.pi
        return max(value, WINDOW_PENALTY * outside)

    def starts(self, n: int, seed: int) -> np.ndarray:
        k = max(1, int(round(n ** (1.0 / 3.0))))
        while k**3 > n:
            k -= 1
        fr = (np.arange(k) + 0.5) / k
        grid = np.array([(i, j, l) for i in fr for j in fr for l in fr])
        extra = n - len(grid)
        if extra > 0:
            rng = np.random.default_rng(seed)
            grid = np.vstack([grid, rng.random((extra, 3))])
        return self.lo + (self.hi - self.lo) * grid

    def local_min(self, x0, iter_cap: int):
        res = minimize(
            self.excess,
            x0,
            method="Nelder-Mead",
            bounds=[(self.lo, self.hi)] * 3,
            options={"maxiter": iter_cap, "xatol": 1e-13, "fatol": 1e-15},
        )
        return float(res.fun), np.asarray(res.x, dtype=float)

    def witness(self, x) -> EqualBiasBox:
        c1, c2, c3 = (min(max(float(v), self.lo), self.hi) for v in x)
        c4 = min(max(self.c4(c1, c2, c3), self.lo), self.hi)
        return EqualBiasBox(self.p, c1, c2, c3, c4)


def _feasible(kind, p, opts, tol, pool=None, batch=1) -> tuple[bool, float, EqualBiasBox | None]:
    """Multistart search for a point of the slice satisfying the criterion.

    Starts are run in batches of the worker count and reduced in start order,
    so the first feasible start is the same however many threads are used.
    """
    sl = _Slice(kind, p, opts.chsh_target)
    starts = sl.starts(opts.inner_starts, opts.seed)
    best_val, best_x = math.inf, None
    for i in range(0, len(starts), batch):
        chunk = starts[i : i + batch]
        if pool is None:
            results = [sl.local_min(x0, opts.inner_iter_cap) for x0 in chunk]
        else:
            results = list(pool.map(lambda x0: sl.local_min(x0, opts.inner_iter_cap), chunk))
        for val, x in results:
            if val <= tol:
                return True, val, sl.witness(x)
            if val < best_val:
                best_val, best_x = val, x
    return False, best_val, (sl.witness(best_x) if best_x is not None else None)


def _result(kind, opts, eb: EqualBiasBox, method, info) -> BiasMaxResult:
    box = box_from_equal_bias(eb)
    return BiasMaxResult(
        criterion=kind,
        chsh_target=opts.chsh_target,
        p_star=eb.p,
        bias_percent=biasness(eb.p),
        extremal_box=eb,
        report=evaluate(kind, box),
        distance_to_quantum=distance_to_quantum(box),
        method=method,
        info=info,
    )


def ns_closed_form(chsh_target: float) -> EqualBiasBox:
    """Largest common marginal reachable at ``chsh_target`` by any NS box.

    On the slice ``c1 + c2 + c3 - c4 <= p + 1`` (window ceilings for c1..c3,
    floor ``2p - 1`` for c4), so the pinned CHSH forces ``p <= (6 - t) / 4``,
    attained at that corner.
    """
    p = (6.0 - chsh_target) / 4.0
    return EqualBiasBox(p, p, p, p, 2.0 * p - 1.0)


def max_equal_bias(kind: CriterionKind | str, opts: OptimizerOptions | None = None) -> BiasMaxResult:
    """Maximize the common marginal ``p`` subject to ``kind`` at the pinned CHSH value."""
    kind = CriterionKind.parse(kind)
    opts = (opts or OptimizerOptions()).validate()

    if kind is CriterionKind.NS:
        eb = ns_closed_form(opts.chsh_target)
        return _result(kind, opts, eb, "analytic", {})

    p_lo = 0.5
    p_hi = min((6.0 - opts.chsh_target) / 4.0, 1.0 - opts.p_bisection_tol)
    tol = FEASIBILITY_TOL
    workers = worker_count()
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        ok, val, witness = _feasible(kind, p_lo, opts, tol, pool, workers)
        if not ok:
            raise InfeasibleTarget(
                f"{kind.value}: no equal-bias box at p = 1/2 reaches CHSH {opts.chsh_target:.12g} "
                f"(best excess {val:.3g})"
            )
        steps = 0
        ok_hi, _, witness_hi = _feasible(kind, p_hi, opts, tol, pool, workers)
        if ok_hi:
            witness = witness_hi
        else:
            while p_hi - p_lo > opts.p_bisection_tol:
                mid = 0.5 * (p_lo + p_hi)
                ok, _, w = _feasible(kind, mid, opts, tol, pool, workers)
                steps += 1
                if ok:
                    p_lo, witness = mid, w
                else:
                    p_hi = mid
    finally:
        if pool is not None:
            pool.shutdown()
    return _result(kind, opts, witness, "bisection+multistart", {"bisection_steps": steps})


def max_single_bias_ns(chsh_target: float = TSIRELSON) -> BiasMaxResult:
    """Largest bias of Alice's setting-0 observable over all NS boxes at ``|CHSH| = chsh_target``.

    Every constraint is linear in ``(m1, m2, n1, n2, c1..c4)``, so this is a
    linear program per sign branch and direction of ``m1``.
    """
    if not (2.0 <= chsh_target <= 4.0):
        raise ConfigError(f"chsh_target must lie in [2, 4], got {chsh_target!r}")
    # variable order: m1 m2 n1 n2 c1 c2 c3 c4; cells as (c, m, n) indices
    cells = ((4, 0, 2), (5, 0, 3), (6, 1, 2), (7, 1, 3))
    a_ub, b_ub = [], []
    for c, m, n in cells:
        for coeffs, rhs in (
            ({c: -1.0}, 0.0),  # c >= 0
            ({c: -1.0, m: 1.0, n: 1.0}, 1.0),  # c >= m + n - 1
            ({c: 1.0, m: -1.0}, 0.0),  # c <= m
            ({c: 1.0, n: -1.0}, 0.0),  # c <= n
        ):
            row = np.zeros(8)
            for k, v in coeffs.items():
                row[k] = v
            a_ub.append(row)
            b_ub.append(rhs)
    a_eq = np.array([[-4.0, 0.0, -4.0, 0.0, 4.0, 4.0, 4.0, -4.0]])

    best = None
    for sign in (1.0, -1.0):
        for direction in (-1.0, 1.0):  # maximize m1, then minimize it
            cost = np.zeros(8)
            cost[0] = direction
            res = linprog(
                cost, A_ub=np.array(a_ub), b_ub=b_ub, A_eq=a_eq, b_eq=[sign * chsh_target - 2.0],
                bounds=[(0.0, 1.0)] * 8, method="highs",
            )
            if res.status != 0:
                continue
            x = np.clip(res.x, 0.0, 1.0)
            bias = biasness(x[0])
            if best is None or bias > best[0] + 1e-12:
                best = (bias, x)
    if best is None:
        raise InfeasibleTarget(f"no no-signaling box reaches |CHSH| = {chsh_target!r}")

    params = NsParams(*(float(v) for v in best[1]))
    box = box_from_ns_params(params)
    return BiasMaxResult(
        criterion=CriterionKind.NS,
        chsh_target=chsh_target,
        p_star=params.m1,
        bias_percent=best[0],
        extremal_box=params,
        report=check_no_signaling(box),
        distance_to_quantum=distance_to_quantum(box),
        method="linear-program",
    )
