"""Bipartite two-input/two-output correlation boxes.

A box is the conditional distribution ``P(ab|xy)`` stored as an array
``prob[x, y, a, b]``.  Rows are laid out in setting order ``xy = 00, 01, 10, 11``
and within a row in outcome order ``ab = 00, 01, 10, 11``, matching the usual
4x4 tables.

Three constructors cover the parametrizations used throughout the package:

* :class:`CorrelationBox` directly from 16 numbers,
* :func:`box_from_ns_params` from marginals ``m1, m2, n1, n2`` and joints
  ``c1..c4 = P(00|xy)``,
* :func:`box_from_equal_bias` from a single common marginal ``p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

import numpy as np

from .errors import NormalizationViolation, PositivityViolation, SignalingViolation

DEFAULT_TOLERANCE = 1e-9
SQRT2 = math.sqrt(2.0)
TSIRELSON = 2.0 * SQRT2

SETTINGS = ((0, 0), (0, 1), (1, 0), (1, 1))
OUTCOMES = ((0, 0), (0, 1), (1, 0), (1, 1))


class Party(str, Enum):
    ALICE = "alice"
    BOB = "bob"

    @classmethod
    def parse(cls, value: "Party | str") -> "Party":
        if isinstance(value, Party):
            return value
        key = str(value).strip().lower()
        if key in ("a", "alice"):
            return cls.ALICE
        if key in ("b", "bob"):
            return cls.BOB
        raise ValueError(f"unknown party {value!r}")


@dataclass(frozen=True, eq=False)
class CorrelationBox:
    """Conditional distribution ``P(ab|xy)``, immutable once built.

    Construction checks positivity and per-setting normalization.  The
    no-signaling property is *not* enforced here so that signaling tables can
    still be inspected; see :meth:`validate` and
    :func:`nonlocalbox.criteria.check_no_signaling`.
    """

    prob: np.ndarray
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self) -> None:
        arr = np.array(self.prob, dtype=float)
        if arr.size != 16:
            raise ValueError(f"a box needs 16 probabilities, got {arr.size}")
        arr = arr.reshape(2, 2, 2, 2)
        arr.setflags(write=False)
        object.__setattr__(self, "prob", arr)

        tol = self.tolerance
        if not np.all(np.isfinite(arr)):
            raise PositivityViolation("box contains non-finite entries")
        for (x, y) in SETTINGS:
            for (a, b) in OUTCOMES:
                v = arr[x, y, a, b]
                if v < -tol or v > 1.0 + tol:
                    raise PositivityViolation(
                        f"P({a}{b}|{x}{y}) = {v:.12g} outside [0, 1] by "
                        f"{max(-v, v - 1.0):.3g}"
                    )
            total = arr[x, y].sum()
            if abs(total - 1.0) > tol:
                raise NormalizationViolation(
                    f"row xy={x}{y} sums to {total:.12g} (off by {total - 1.0:+.3g})"
                )

    @classmethod
    def from_rows(cls, rows, tolerance: float = DEFAULT_TOLERANCE) -> "CorrelationBox":
        """Build from a 4x4 table, one row per setting pair."""
        arr = np.asarray(rows, dtype=float)
        if arr.shape != (4, 4):
            raise ValueError(f"expected a 4x4 table, got shape {arr.shape}")
        return cls(arr.reshape(2, 2, 2, 2), tolerance)

    def rows(self) -> np.ndarray:
        return self.prob.reshape(4, 4).copy()

    def __getitem__(self, index) -> float:
        return float(self.prob[index])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CorrelationBox):
            return NotImplemented
        return bool(np.array_equal(self.prob, other.prob))

    def __hash__(self) -> int:
        return hash(self.prob.tobytes())

    def signaling_defect(self) -> float:
        """Largest violation among the 8 marginal-equality constraints."""
        alice = self.prob.sum(axis=3)  # [x, y, a]
        bob = self.prob.sum(axis=2)  # [x, y, b]
        d_alice = np.abs(alice[:, 0, :] - alice[:, 1, :]).max()
        d_bob = np.abs(bob[0, :, :] - bob[1, :, :]).max()
        return float(max(d_alice, d_bob))

    def validate(self) -> "CorrelationBox":
        defect = self.signaling_defect()
        if defect > self.tolerance:
            raise SignalingViolation(f"no-signaling defect {defect:.3g} exceeds {self.tolerance:g}")
        return self


@dataclass(frozen=True)
class NsParams:
    """Eight-parameter no-signaling parametrization.

    ``m1, m2`` are Alice's outcome-0 marginals for settings 0 and 1, ``n1, n2``
    Bob's, and ``c1..c4`` the joints ``P(00|xy)`` for ``xy = 00, 01, 10, 11``.
    """

    m1: float
    m2: float
    n1: float
    n2: float
    c1: float
    c2: float
    c3: float
    c4: float

    def cells(self) -> Iterator[tuple[tuple[int, int], float, float, float]]:
        """Yield ``((x, y), c, m, n)`` for each setting pair."""
        yield (0, 0), self.c1, self.m1, self.n1
        yield (0, 1), self.c2, self.m1, self.n2
        yield (1, 0), self.c3, self.m2, self.n1
        yield (1, 1), self.c4, self.m2, self.n2

    @property
    def c(self) -> tuple[float, float, float, float]:
        return (self.c1, self.c2, self.c3, self.c4)

    def validate(self, tolerance: float = DEFAULT_TOLERANCE) -> "NsParams":
        for name in ("m1", "m2", "n1", "n2"):
            v = getattr(self, name)
            if not (-tolerance <= v <= 1.0 + tolerance):
                raise PositivityViolation(f"marginal {name} = {v:.12g} outside [0, 1]")
        for i, ((x, y), c, m, n) in enumerate(self.cells(), start=1):
            lo, hi = max(0.0, m + n - 1.0), min(m, n)
            if c < lo - tolerance or c > hi + tolerance:
                excess = lo - c if c < lo else c - hi
                raise PositivityViolation(
                    f"c{i} (cell xy={x}{y}) = {c:.12g} outside window "
                    f"[{lo:.12g}, {hi:.12g}] by {excess:.3g}"
                )
        return self

    def chsh_closed_form(self) -> float:
        """Signed ``2 + 4(c1+c2+c3-c4) - 4(m1+n1)``."""
        return 2.0 + 4.0 * (self.c1 + self.c2 + self.c3 - self.c4) - 4.0 * (self.m1 + self.n1)

    @classmethod
    def from_box(cls, box: CorrelationBox) -> "NsParams":
        p = box.prob
        return cls(
            m1=float(p[0, 0, 0, :].sum()),
            m2=float(p[1, 0, 0, :].sum()),
            n1=float(p[0, 0, :, 0].sum()),
            n2=float(p[0, 1, :, 0].sum()),
            c1=float(p[0, 0, 0, 0]),
            c2=float(p[0, 1, 0, 0]),
            c3=float(p[1, 0, 0, 0]),
            c4=float(p[1, 1, 0, 0]),
        )


@dataclass(frozen=True)
class EqualBiasBox:
    """No-signaling box whose four local marginals all equal ``p``."""

    p: float
    c1: float
    c2: float
    c3: float
    c4: float

    @classmethod
    def from_c(cls, p: float, c) -> "EqualBiasBox":
        c1, c2, c3, c4 = (float(v) for v in c)
        return cls(float(p), c1, c2, c3, c4)

    @property
    def c(self) -> tuple[float, float, float, float]:
        return (self.c1, self.c2, self.c3, self.c4)

    def window(self) -> tuple[float, float]:
        return max(0.0, 2.0 * self.p - 1.0), self.p

    def to_ns_params(self) -> NsParams:
        p = self.p
        return NsParams(p, p, p, p, self.c1, self.c2, self.c3, self.c4)

    def validate(self, tolerance: float = DEFAULT_TOLERANCE) -> "EqualBiasBox":
        self.to_ns_params().validate(tolerance)
        return self

    def chsh_closed_form(self) -> float:
        """Signed ``2 + 4(c1+c2+c3-c4) - 8p``."""
        return 2.0 + 4.0 * (self.c1 + self.c2 + self.c3 - self.c4) - 8.0 * self.p


def box_from_ns_params(params: NsParams, tolerance: float = DEFAULT_TOLERANCE) -> CorrelationBox:
    """Lay out each setting row as ``(c, m - c, n - c, 1 + c - m - n)``.

    ``tolerance`` is the slack allowed on the positivity windows; use the
    printed precision (1e-3) when feeding in values copied from a rounded table.
    """
    params.validate(tolerance)
    prob = np.empty((2, 2, 2, 2))
    for (x, y), c, m, n in params.cells():
        prob[x, y] = [[c, m - c], [n - c, 1.0 + c - m - n]]
    return CorrelationBox(prob, tolerance)


def box_from_equal_bias(eb: EqualBiasBox, tolerance: float = DEFAULT_TOLERANCE) -> CorrelationBox:
    return box_from_ns_params(eb.to_ns_params(), tolerance)


QUANTUM_HIGH = (2.0 + SQRT2) / 8.0  # (1 + 1/sqrt2) / 4
QUANTUM_LOW = (2.0 - SQRT2) / 8.0  # (1 - 1/sqrt2) / 4


def quantum_equal_bias() -> EqualBiasBox:
    return EqualBiasBox(0.5, QUANTUM_HIGH, QUANTUM_HIGH, QUANTUM_HIGH, QUANTUM_LOW)


def quantum_tsirelson_box() -> CorrelationBox:
    """The unique (up to relabeling) box reaching CHSH = 2*sqrt(2)."""
    return box_from_equal_bias(quantum_equal_bias())


def pr_box() -> CorrelationBox:
    return box_from_equal_bias(EqualBiasBox(0.5, 0.5, 0.5, 0.5, 0.0))


def uniform_box() -> CorrelationBox:
    return CorrelationBox(np.full((2, 2, 2, 2), 0.25))


def marginal(box: CorrelationBox, party: Party | str, setting: int) -> tuple[float, float]:
    """Return ``(P(0), P(1))`` for one local observable.

    Computed with the other party at setting 0 and cross-checked against
    setting 1; a discrepancy above the box tolerance raises
    :class:`SignalingViolation`.
    """
    party = Party.parse(party)
    if setting not in (0, 1):
        raise ValueError(f"setting must be 0 or 1, got {setting!r}")
    p = box.prob
    if party is Party.ALICE:
        first, second = p[setting, 0, 0, :].sum(), p[setting, 1, 0, :].sum()
    else:
        first, second = p[0, setting, :, 0].sum(), p[1, setting, :, 0].sum()
    if abs(first - second) > box.tolerance:
        raise SignalingViolation(
            f"{party.value} setting {setting}: marginal depends on the remote setting "
            f"({first:.12g} vs {second:.12g})"
        )
    return float(first), float(1.0 - first)


def biasness(alpha: float) -> float:
    """Biasness ``|1 - 2 alpha| * 100`` of a binary outcome with P(0) = alpha."""
    return abs(1.0 - 2.0 * alpha) * 100.0


def biasness_percent(box: CorrelationBox, party: Party | str, setting: int) -> float:
    return biasness(marginal(box, party, setting)[0])


@dataclass(frozen=True)
class Correlators:
    cxy: np.ndarray = field(repr=True)  # [x, y]
    cx: np.ndarray
    cy: np.ndarray

    def as_dict(self) -> dict[str, float]:
        out = {f"C_{x}{y}": float(self.cxy[x, y]) for x, y in SETTINGS}
        out.update({f"C_x{x}": float(self.cx[x]) for x in (0, 1)})
        out.update({f"C_y{y}": float(self.cy[y]) for y in (0, 1)})
        return out


def correlators(box: CorrelationBox) -> Correlators:
    """Two-point correlators ``C_xy`` and one-point correlators ``C_x``, ``C_y``.

    ``C_x`` is read off Bob's setting 0 and ``C_y`` off Alice's setting 0.
    """
    p = box.prob
    same = p[:, :, 0, 0] + p[:, :, 1, 1]
    diff = p[:, :, 0, 1] + p[:, :, 1, 0]
    cxy = same - diff
    cx = np.array([p[x, 0, 0, :].sum() - p[x, 0, 1, :].sum() for x in (0, 1)])
    cy = np.array([p[0, y, :, 0].sum() - p[0, y, :, 1].sum() for y in (0, 1)])
    return Correlators(cxy, cx, cy)


def signed_chsh(box: CorrelationBox) -> float:
    """``C_00 + C_01 + C_10 - C_11`` without the modulus."""
    c = correlators(box).cxy
    return float(c[0, 0] + c[0, 1] + c[1, 0] - c[1, 1])


def chsh_value(box: CorrelationBox) -> float:
    return abs(signed_chsh(box))
