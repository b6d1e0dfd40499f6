"""
Lagrangian tracking along dq/dt = (u + v)(t, q) and the diagnostics

    M = w - w_x,   N = w + w_x,   g = sqrt(-M N)   (only where M N < 0)

sampled on the track.  Along a track on which M N < -2 K^2 the blowup argument
predicts M increasing, N decreasing and g' >= g^2/2 - K^2; the helpers here
measure those statements on recorded series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .grid import _eval_half

__all__ = [
    "CharacteristicTrack",
    "InsufficientSamplesError",
    "advance_q",
    "sample_MN",
    "sample_w",
    "jacobian_series",
    "jacobian_positivity",
    "riccati_residual",
    "displacement_check",
    "monotonicity_check",
]


class InsufficientSamplesError(ValueError):
    pass


def sample_w(s, q: float):
    """(w, w_x) at position q by trigonometric interpolation."""
    g = s.grid
    wh = sfft.rfft(s.u.values + s.v.values) / g.n
    return _eval_half(wh, g, q), _eval_half(g.rik * wh, g, q)


def sample_MN(s, q: float):
    w, wx = sample_w(s, q)
    return w - wx, w + wx


def _velocity(s, q: float) -> float:
    g = s.grid
    return _eval_half(sfft.rfft(s.u.values + s.v.values) / g.n, g, q)


def advance_q(q: float, stages, dt: float) -> float:
    """One RK4 step of dq/dt = w(t, q) using the PDE's own stage states.

    ``stages`` holds the four states at which the PDE right-hand side was
    evaluated (begin, two midpoints, end predictor).  ``q`` is unwrapped; the
    caller reduces mod 1 where needed.
    """
    s1, s2, s3, s4 = stages
    k1 = _velocity(s1, q)
    k2 = _velocity(s2, q + 0.5 * dt * k1)
    k3 = _velocity(s3, q + 0.5 * dt * k2)
    k4 = _velocity(s4, q + dt * k3)
    return q + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0


@dataclass
class CharacteristicTrack:
    """One tracked point q(t, x0) with its diagnostic series.

    ``g`` holds NaN where M N >= 0 (undefined there).
    """

    x0: float
    times: list = field(default_factory=list)
    q_unwrapped: list = field(default_factory=list)
    w: list = field(default_factory=list)
    wx: list = field(default_factory=list)
    monotonicity_ok: bool | None = None
    riccati_ok: bool | None = None
    displacement_ok: bool | None = None

    def record(self, s, q_unwrapped: float) -> None:
        w, wx = sample_w(s, q_unwrapped)
        self.times.append(float(s.t))
        self.q_unwrapped.append(float(q_unwrapped))
        self.w.append(w)
        self.wx.append(wx)

    @property
    def current_q(self) -> float:
        return self.q_unwrapped[-1] if self.q_unwrapped else self.x0

    @property
    def q(self) -> np.ndarray:
        return np.mod(np.asarray(self.q_unwrapped), 1.0)

    @property
    def M(self) -> np.ndarray:
        return np.asarray(self.w) - np.asarray(self.wx)

    @property
    def N(self) -> np.ndarray:
        return np.asarray(self.w) + np.asarray(self.wx)

    @property
    def g(self) -> np.ndarray:
        mn = self.M * self.N
        out = np.full(mn.shape, np.nan)
        neg = mn < 0
        out[neg] = np.sqrt(-mn[neg])
        return out


def jacobian_series(track: CharacteristicTrack) -> np.ndarray:
    """q_x(t, x0) = exp(int_0^t w_x(tau, q(tau)) dtau), trapezoid in time."""
    t = np.asarray(track.times)
    wx = np.asarray(track.wx)
    if t.size == 0:
        return np.ones(0)
    increments = 0.5 * np.diff(t) * (wx[1:] + wx[:-1])
    return np.exp(np.concatenate([[0.0], np.cumsum(increments)]))


def jacobian_positivity(track: CharacteristicTrack) -> bool:
    qx = jacobian_series(track)
    return bool(np.all(np.isfinite(qx)) and np.all(qx > 0.0))


def _centered_derivative(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Second-order three-point derivative on a non-uniform grid, interior points."""
    hm = t[1:-1] - t[:-2]
    hp = t[2:] - t[1:-1]
    return (hm**2 * y[2:] - hp**2 * y[:-2] + (hp**2 - hm**2) * y[1:-1]) / (hm * hp * (hm + hp))


@dataclass(frozen=True)
class RiccatiResidual:
    """Interior-sample residual series; each should be >= -tol under the hypotheses."""

    times: np.ndarray
    g_residual: np.ndarray  # g' - (g^2/2 - K^2)
    M_residual: np.ndarray  # M' + MN/2 + K^2
    N_residual: np.ndarray  # -N' + MN/2 + K^2
    g: np.ndarray


def riccati_residual(track: CharacteristicTrack, K: float, upto: int | None = None) -> RiccatiResidual:
    t = np.asarray(track.times)[:upto]
    M, N, g = track.M[:upto], track.N[:upto], track.g[:upto]
    defined = np.isfinite(g)
    if t.size < 3 or np.count_nonzero(defined) < 3:
        raise InsufficientSamplesError("need at least three samples with M N < 0")
    # restrict to the leading run on which g is defined
    stop = t.size if np.all(defined) else int(np.argmin(defined))
    if stop < 3:
        raise InsufficientSamplesError("g undefined too early in the track")
    t, M, N, g = t[:stop], M[:stop], N[:stop], g[:stop]
    mn = (M * N)[1:-1]
    gi = g[1:-1]
    return RiccatiResidual(
        times=t[1:-1],
        g_residual=_centered_derivative(t, g) - (0.5 * gi**2 - K**2),
        M_residual=_centered_derivative(t, M) + 0.5 * mn + K**2,
        N_residual=-_centered_derivative(t, N) + 0.5 * mn + K**2,
        g=gi,
    )


def displacement_bound(E0: float, t) -> np.ndarray:
    return math.sqrt(E0 / 2.0) * np.asarray(t)


def displacement_check(track: CharacteristicTrack, E0: float, tol: float = 1e-8) -> bool:
    """|q(t) - x0| <= sqrt(E0/2) t + tol at every sample (unwrapped q)."""
    t = np.asarray(track.times)
    q = np.asarray(track.q_unwrapped)
    ok = bool(np.all(np.abs(q - track.x0) <= displacement_bound(E0, t) + tol))
    track.displacement_ok = ok
    return ok


def monotonicity_check(track: CharacteristicTrack, K: float, rtol: float = 1e-6, upto: int | None = None) -> dict:
    """Per-step checks: M non-decreasing, N non-increasing, MN < -2K^2, g increasing.

    A step passes when the wrong-way change is at most ``rtol`` times the
    magnitude of the quantity.
    """
    M, N, g = track.M[:upto], track.N[:upto], track.g[:upto]
    dM, dN, dg = np.diff(M), np.diff(N), np.diff(g)
    out = {
        "M_nondecreasing": bool(np.all(dM >= -rtol * np.abs(M[1:]))),
        "N_nonincreasing": bool(np.all(dN <= rtol * np.abs(N[1:]))),
        "MN_below": bool(np.all(M * N < -2.0 * K**2)),
        "g_increasing": bool(np.all(np.isfinite(g)) and np.all(dg > -rtol * np.abs(g[1:]))),
    }
    track.monotonicity_ok = all(out.values())
    return out
