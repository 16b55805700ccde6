"""Brute-force grid oracle for the maximal equal-bias marginal.

Deliberately independent of ``nonlocalbox.optimizer`` and ``nonlocalbox.criteria``:
the IC forms are written out from the quadratic equal-bias expressions, and
the ML sum is evaluated from the correlators ``C_xy = 1 + 4c - 4p``,
``C_x = C_y = 2p - 1`` of the equal-bias box.

The grid is ``p = 1/2 + k*step`` and ``c_i`` on multiples of ``step`` inside
the positivity window, with ``c4`` eliminated by the CHSH pin.  At the extremal
marginal the feasible set shrinks to a point, which a grid generically misses;
the discretization allowance is therefore the smallest criterion excess the
grid attains at ``p = 1/2``, where the Tsirelson box is known to be feasible.
"""

import math

import numpy as np


def _grid(lo, hi, step):
    k0 = math.ceil(lo / step - 1e-9)
    k1 = math.floor(hi / step + 1e-9)
    return np.arange(k0, k1 + 1) * step


def _excess(kind, p, c1, c2, c3, c4):
    if kind == "ic":
        u = 1 - 4 * p
        a = u**2 + 4 * (c1 + c3) ** 2 + 4 * (c2 - c4) ** 2 + 4 * (c1 + c3) * u
        b = u**2 + 4 * (c1 + c2) ** 2 + 4 * (c3 - c4) ** 2 + 4 * (c1 + c2) * u
        return np.maximum(a, b) - 1.0
    cx = 2 * p - 1

    def asin_d(c):
        cxy = 1 + 4 * c - 4 * p
        return np.arcsin(np.clip((cxy - cx * cx) / (1 - cx * cx), -1.0, 1.0))

    return np.abs(asin_d(c1) + asin_d(c2) + asin_d(c3) - asin_d(c4)) - math.pi


def grid_min_excess(kind, p, step=2e-3, target=2 * math.sqrt(2)):
    """Smallest criterion excess over the (c1, c2, c3) grid at marginal ``p``."""
    lo, hi = max(0.0, 2 * p - 1), p
    cs = _grid(lo, hi, step)
    s_total = (target - 2 + 8 * p) / 4
    c2, c3 = cs[:, None], cs[None, :]
    best = math.inf
    for c1 in cs:
        c4 = c1 + c2 + c3 - s_total
        inside = (c4 >= lo - 1e-12) & (c4 <= hi + 1e-12)
        if not inside.any():
            continue
        ex = np.where(inside, _excess(kind, p, c1, c2, c3, c4), np.inf)
        best = min(best, float(ex.min()))
    return best


def grid_max_p(kind, step=2e-3, target=2 * math.sqrt(2)):
    """Largest grid ``p`` whose best excess is within the allowance; returns ``(p, allowance)``."""
    allowance = grid_min_excess(kind, 0.5, step, target)
    p_top = (6 - target) / 4
    ks = range(int(math.floor((p_top - 0.5) / step + 1e-9)), -1, -1)
    for k in ks:
        p = 0.5 + k * step
        if grid_min_excess(kind, p, step, target) <= allowance:
            return p, allowance
    return None, allowance
