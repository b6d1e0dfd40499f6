"""
Sufficient blowup condition on initial data and its quantitative consequences.

Data (u0, v0) with energy E0 = ||u0||_1^2 + ||v0||_1^2 break in finite time if
some point x0 satisfies

    (u0 + v0)_x(x0) < -|(u0 + v0)(x0)| - sqrt(2) K,
    K = sqrt((1/2 + 2 coth(1/2)) E0).

Then with g0 = sqrt(w0_x(x0)^2 - w0(x0)^2) the breaking time is at most

    T* = ln((g0 + sqrt(2) K) / (g0 - sqrt(2) K)) / (sqrt(2) K)

and the breaking point lies within sqrt(E0/2) T* of x0.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .dynamics import SolutionState
from .evolution import energy
from .grid import _eval_series
from .kernel import COTH_HALF

__all__ = [
    "K_FACTOR",
    "CriterionReport",
    "compute_K",
    "criterion_margin",
    "margin_field",
    "scan_x0",
    "tstar_bound",
    "blowup_interval",
    "evaluate",
    "in_arc",
]

K_FACTOR = 0.5 + 2.0 * COTH_HALF
SQRT2 = math.sqrt(2.0)


def compute_K(E0: float) -> float:
    if E0 < 0.0:
        raise ValueError("energy must be non-negative")
    return math.sqrt(K_FACTOR * E0)


def _w_coefficients(z0: SolutionState):
    g = z0.grid
    wh = np.fft.fft(z0.u.values + z0.v.values) / g.n
    return wh, g.ik * wh


def criterion_margin(z0: SolutionState, x: float, K: float) -> float:
    """-(w0_x)(x) - |w0(x)| - sqrt(2) K; positive means the condition holds at x."""
    wh, wxh = _w_coefficients(z0)
    return _margin_at(z0, wh, wxh, x, K)


def _margin_at(z0, wh, wxh, x, K):
    g = z0.grid
    return -_eval_series(wxh, g, x) - abs(_eval_series(wh, g, x)) - SQRT2 * K


def margin_field(z0: SolutionState, K: float) -> np.ndarray:
    """Margin at every grid node (vectorised)."""
    g = z0.grid
    w = z0.u.values + z0.v.values
    wx = np.fft.ifft(g.ik * np.fft.fft(w)).real
    return -wx - np.abs(w) - SQRT2 * K


def scan_x0(z0: SolutionState, K: float, xtol: float = 1e-10):
    """Maximise the margin over the circle.

    Returns ``(x0, margin)`` for the maximiser, or ``None`` when the best
    margin is not positive.  Grid nodes locate the best cell, a bounded
    scalar search on the two adjacent cells polishes it.
    """
    best_x, best_m = _maximise_margin(z0, K, xtol)
    if best_m <= 0.0:
        return None
    return best_x, best_m


def _maximise_margin(z0: SolutionState, K: float, xtol: float = 1e-10):
    g = z0.grid
    nodal = margin_field(z0, K)
    j = int(np.argmax(nodal))
    best_x, best_m = float(g.nodes[j]), float(nodal[j])
    if not np.any(z0.u.values) and not np.any(z0.v.values):
        return best_x, best_m
    wh, wxh = _w_coefficients(z0)
    wxxh = g.ik * wxh
    centre = g.nodes[j]
    lo, hi = centre - g.dx, centre + g.dx

    def slope(x):
        # d/dx of the margin, valid where w(x) != 0
        return -_eval_series(wxxh, g, x) - math.copysign(1.0, _eval_series(wh, g, x)) * _eval_series(wxh, g, x)

    # a smooth maximum is a sign change of the slope; root-finding pins it to
    # round-off, whereas maximising the flat margin only reaches sqrt(eps)
    candidates = []
    s_lo, s_mid, s_hi = slope(lo), slope(centre), slope(hi)
    for a, b, fa, fb in ((lo, centre, s_lo, s_mid), (centre, hi, s_mid, s_hi)):
        if fa > 0.0 > fb:
            candidates.append(brentq(slope, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps))
    if not candidates:
        res = minimize_scalar(
            lambda x: -_margin_at(z0, wh, wxh, x, K),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": xtol},
        )
        candidates.append(res.x)
    for x in candidates:
        m = _margin_at(z0, wh, wxh, x, K)
        if m > best_m:
            best_x, best_m = float(x) % 1.0, float(m)
    return best_x, best_m


def tstar_bound(z0: SolutionState, x0: float, K: float):
    """(T*, g0) at x0; rejects g0 <= sqrt(2) K."""
    g = z0.grid
    wh, wxh = _w_coefficients(z0)
    w0, w0x = _eval_series(wh, g, x0), _eval_series(wxh, g, x0)
    g0 = math.sqrt(max(w0x * w0x - w0 * w0, 0.0))
    return tstar_from_g0(g0, K), g0


def tstar_from_g0(g0: float, K: float) -> float:
    a = SQRT2 * K
    if not g0 > a:
        raise ValueError(f"g0={g0!r} must exceed sqrt(2) K={a!r}")
    if a == 0.0:
        # K -> 0 limit of ln((g0+a)/(g0-a))/a
        return 2.0 / g0
    return math.log1p(2.0 * a / (g0 - a)) / a


def blowup_interval(x0: float, E0: float, tstar: float):
    half = math.sqrt(E0 / 2.0) * tstar
    return x0 - half, x0 + half


def in_arc(x: float, lo: float, hi: float) -> bool:
    """Whether x (mod 1) lies on the arc [lo, hi] of the circle."""
    if hi - lo >= 1.0:
        return True
    d = (x - lo) % 1.0
    if d == 1.0:  # tiny negative offsets round up to one period
        d = 0.0
    return d <= (hi - lo)


@dataclass(frozen=True)
class CriterionReport:
    satisfied: bool
    x0: float
    margin: float
    E0: float
    K: float
    tstar: float | None = None
    interval: tuple | None = None
    interval_mod1: tuple | None = None
    g0: float | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("interval", "interval_mod1"):
            if d[key] is not None:
                d[key] = list(d[key])
        return d


def evaluate(z0: SolutionState) -> CriterionReport:
    E0 = energy(z0)
    K = compute_K(E0)
    x0, margin = _maximise_margin(z0, K)
    if margin <= 0.0:
        return CriterionReport(False, x0, margin, E0, K)
    tstar, g0 = tstar_bound(z0, x0, K)
    lo, hi = blowup_interval(x0, E0, tstar)
    return CriterionReport(True, x0, margin, E0, K, tstar, (lo, hi), (lo % 1.0, hi % 1.0), g0)
