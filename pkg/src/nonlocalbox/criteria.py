"""No-signaling, Information Causality and Macroscopic Locality tests.

Every check returns a :class:`CriterionReport`.  A report is *satisfied* when
its margin (bound minus the worst left-hand side) is at least
``-boundary_tol``; the Tsirelson box sits exactly on both the IC and the ML
boundary, so a strict comparison would reject it on rounding noise.

The IC check implements the quadratic necessary conditions
``E1^2 + E2^2 <= 1`` (Alice to Bob) and ``F1^2 + F2^2 <= 1`` (Bob to Alice),
not the full entropic principle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .box import SETTINGS, CorrelationBox, EqualBiasBox, box_from_equal_bias, correlators
from .errors import DegenerateBias, DeterministicMarginal, InvalidD, NormalizationViolation

BOUNDARY_TOL = 1e-9
D_CLAMP_TOL = 1e-9
DETERMINISTIC_TOL = 1e-12
ROW_SUM_TOL = 1e-9

# sign (-1)^{xy} carried by each setting pair in the CHSH and arcsine sums
CHSH_SIGNS = {(0, 0): 1.0, (0, 1): 1.0, (1, 0): 1.0, (1, 1): -1.0}


class CriterionKind(str, Enum):
    NS = "NS"
    IC = "IC"
    ML = "ML"

    @classmethod
    def parse(cls, value: "CriterionKind | str") -> "CriterionKind":
        if isinstance(value, CriterionKind):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(f"unknown criterion {value!r}; expected ns, ic or ml") from None


LABELS = {
    CriterionKind.NS: "no-signaling",
    CriterionKind.IC: "IC necessary condition",
    CriterionKind.ML: "macroscopic locality",
}


@dataclass(frozen=True)
class CriterionReport:
    kind: CriterionKind
    lhs_values: tuple[float, ...]
    bound: float
    margin: float
    satisfied: bool
    intermediates: dict[str, float] = field(default_factory=dict)

    @property
    def label(self) -> str:
        return LABELS[self.kind]

    @property
    def worst_lhs(self) -> float:
        return max(self.lhs_values)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "label": self.label,
            "lhs": list(self.lhs_values),
            "bound": self.bound,
            "margin": self.margin,
            "satisfied": self.satisfied,
            "intermediates": dict(self.intermediates),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CriterionReport":
        return cls(
            kind=CriterionKind.parse(data["kind"]),
            lhs_values=tuple(float(v) for v in data["lhs"]),
            bound=float(data["bound"]),
            margin=float(data["margin"]),
            satisfied=bool(data["satisfied"]),
            intermediates={k: float(v) for k, v in data.get("intermediates", {}).items()},
        )


def _report(kind, lhs, bound, boundary_tol, intermediates):
    lhs = tuple(float(v) for v in lhs)
    margin = bound - max(lhs)
    return CriterionReport(kind, lhs, float(bound), float(margin), margin >= -boundary_tol, intermediates)


def check_no_signaling(box: CorrelationBox) -> CriterionReport:
    """Worst absolute defect among the 8 marginal-equality constraints.

    Row sums and the verdict use the box's own tolerance when it is looser
    than the default.
    """
    tol = max(ROW_SUM_TOL, box.tolerance)
    for x, y in SETTINGS:
        total = float(box.prob[x, y].sum())
        if abs(total - 1.0) > tol:
            raise NormalizationViolation(f"row xy={x}{y} sums to {total:.12g}")
    defect = box.signaling_defect()
    return _report(CriterionKind.NS, [defect], 0.0, max(BOUNDARY_TOL, box.tolerance), {"defect": defect})


def ic_check(box: CorrelationBox, boundary_tol: float = BOUNDARY_TOL) -> CriterionReport:
    p = box.prob
    agree = p[:, :, 0, 0] + p[:, :, 1, 1]  # P(a=b|xy)
    disagree = p[:, :, 0, 1] + p[:, :, 1, 0]  # P(a!=b|xy)
    pa1 = 0.5 * (agree[0, 0] + agree[1, 0])
    pa2 = 0.5 * (agree[0, 1] + disagree[1, 1])
    pb1 = 0.5 * (agree[0, 0] + agree[0, 1])
    pb2 = 0.5 * (agree[1, 0] + disagree[1, 1])
    e1, e2 = 2 * pa1 - 1, 2 * pa2 - 1
    f1, f2 = 2 * pb1 - 1, 2 * pb2 - 1
    inter = {
        "P1A": pa1, "P2A": pa2, "P1B": pb1, "P2B": pb2,
        "E1": e1, "E2": e2, "F1": f1, "F2": f2,
    }
    inter = {k: float(v) for k, v in inter.items()}
    return _report(CriterionKind.IC, [e1 * e1 + e2 * e2, f1 * f1 + f2 * f2], 1.0, boundary_tol, inter)


def ic_equal_bias_forms(p: float, c1: float, c2: float, c3: float, c4: float) -> tuple[float, float]:
    """The two quadratic forms of the IC conditions on the equal-bias slice."""
    u = 1.0 - 4.0 * p
    a = u * u + 4 * (c1 + c3) ** 2 + 4 * (c2 - c4) ** 2 + 4 * (c1 + c3) * u
    b = u * u + 4 * (c1 + c2) ** 2 + 4 * (c3 - c4) ** 2 + 4 * (c1 + c2) * u
    return a, b


def ic_check_equal_bias(eb: EqualBiasBox, boundary_tol: float = BOUNDARY_TOL) -> CriterionReport:
    p, (c1, c2, c3, c4) = eb.p, eb.c
    a, b = ic_equal_bias_forms(p, c1, c2, c3, c4)
    inter = {
        "E1": 1 - 4 * p + 2 * (c1 + c3), "E2": 2 * (c2 - c4),
        "F1": 1 - 4 * p + 2 * (c1 + c2), "F2": 2 * (c3 - c4),
    }
    return _report(CriterionKind.IC, [a, b], 1.0, boundary_tol, inter)


def _clamped_asin(d: float, name: str) -> float:
    if abs(d) > 1.0 + D_CLAMP_TOL:
        raise InvalidD(f"{name} = {d:.12g} outside [-1, 1]; the box is not a valid distribution")
    return math.asin(min(1.0, max(-1.0, d)))


def ml_check(box: CorrelationBox, boundary_tol: float = BOUNDARY_TOL) -> CriterionReport:
    """Arcsine criterion ``|sum (-1)^{xy} asin(D_xy)| <= pi``."""
    corr = correlators(box)
    for x in (0, 1):
        if abs(corr.cx[x]) >= 1.0 - DETERMINISTIC_TOL:
            raise DeterministicMarginal(f"Alice setting {x} is deterministic (C_x = {corr.cx[x]:.12g})")
    for y in (0, 1):
        if abs(corr.cy[y]) >= 1.0 - DETERMINISTIC_TOL:
            raise DeterministicMarginal(f"Bob setting {y} is deterministic (C_y = {corr.cy[y]:.12g})")

    inter = corr.as_dict()
    total = 0.0
    for x, y in SETTINGS:
        cx, cy = corr.cx[x], corr.cy[y]
        d = (corr.cxy[x, y] - cx * cy) / math.sqrt((1 - cx * cx) * (1 - cy * cy))
        inter[f"D_{x}{y}"] = float(d)
        total += CHSH_SIGNS[x, y] * _clamped_asin(d, f"D_{x}{y}")
    inter["signed_sum"] = total
    return _report(CriterionKind.ML, [abs(total)], math.pi, boundary_tol, inter)


def ml_equal_bias_d(p: float, c) -> list[float]:
    q = p * (1.0 - p)
    return [(ci - p * p) / q for ci in c]


def ml_check_equal_bias(eb: EqualBiasBox, boundary_tol: float = BOUNDARY_TOL) -> CriterionReport:
    p = eb.p
    if p <= DETERMINISTIC_TOL or p >= 1.0 - DETERMINISTIC_TOL:
        raise DegenerateBias(f"p = {p!r}: the arcsine criterion is undefined at deterministic marginals")
    ds = ml_equal_bias_d(p, eb.c)
    signs = (1.0, 1.0, 1.0, -1.0)
    inter = {}
    total = 0.0
    for (x, y), s, d in zip(SETTINGS, signs, ds):
        inter[f"D_{x}{y}"] = d
        total += s * _clamped_asin(d, f"D_{x}{y}")
    inter["signed_sum"] = total
    return _report(CriterionKind.ML, [abs(total)], math.pi, boundary_tol, inter)


def evaluate(kind: CriterionKind | str, box: CorrelationBox) -> CriterionReport:
    kind = CriterionKind.parse(kind)
    if kind is CriterionKind.NS:
        return check_no_signaling(box)
    if kind is CriterionKind.IC:
        return ic_check(box)
    return ml_check(box)


def evaluate_equal_bias(kind: CriterionKind | str, eb: EqualBiasBox) -> CriterionReport:
    kind = CriterionKind.parse(kind)
    if kind is CriterionKind.NS:
        return check_no_signaling(box_from_equal_bias(eb))
    if kind is CriterionKind.IC:
        return ic_check_equal_bias(eb)
    return ml_check_equal_bias(eb)


def all_reports(box: CorrelationBox) -> dict[str, CriterionReport | str]:
    """Run all three checks; an undefined criterion maps to its error message."""
    out: dict[str, CriterionReport | str] = {}
    for kind in CriterionKind:
        try:
            out[kind.value] = evaluate(kind, box)
        except (DeterministicMarginal, InvalidD) as exc:
            out[kind.value] = f"{type(exc).__name__}: {exc}"
    return out


__all__ = [
    "BOUNDARY_TOL",
    "CriterionKind",
    "CriterionReport",
    "all_reports",
    "check_no_signaling",
    "evaluate",
    "evaluate_equal_bias",
    "ic_check",
    "ic_check_equal_bias",
    "ic_equal_bias_forms",
    "ml_check",
    "ml_check_equal_bias",
]
