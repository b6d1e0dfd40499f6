"""
Right-hand sides of the coupled periodic Camassa-Holm system in nonlocal form

    u_t + (u+v) u_x = -P*(u v_x) - d_x P*(u^2 + u_x^2/2 + u_x v_x + v^2/2 - v_x^2/2)
    v_t + (u+v) v_x = -P*(u_x v) - d_x P*(v^2 + v_x^2/2 + u_x v_x + u^2/2 - u_x^2/2)

and of the combined speed w = u + v.  Every pointwise product is formed in
physical space and 2/3-dealiased before it enters a convolution.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft as sfft

from .grid import PeriodicField, PeriodicGrid
from .kernel import COTH_HALF, conv_p_minus, conv_p_plus, dp_symbol, p_symbol

__all__ = [
    "SolutionState",
    "AprioriReport",
    "NonFiniteStateError",
    "rhs_state",
    "quadratic_bundle",
    "rhs_w",
    "rhs_wx",
    "apriori_check",
]


class NonFiniteStateError(FloatingPointError):
    """Raised when a right-hand side or update produces NaN/Inf."""


@dataclass(frozen=True, eq=False)
class SolutionState:
    t: float
    u: PeriodicField
    v: PeriodicField

    def __post_init__(self):
        if self.u.grid != self.v.grid:
            raise ValueError("u and v must share a grid")

    @property
    def grid(self) -> PeriodicGrid:
        return self.u.grid

    @property
    def w(self) -> PeriodicField:
        return self.u + self.v

    @classmethod
    def from_arrays(cls, grid: PeriodicGrid, u, v, t: float = 0.0) -> "SolutionState":
        return cls(float(t), PeriodicField(grid, u), PeriodicField(grid, v))


def _spectral(grid: PeriodicGrid, values: np.ndarray) -> np.ndarray:
    """Dealiased FFT of a pointwise product."""
    return np.where(grid.dealias_mask, np.fft.fft(values), 0.0)


def _slopes(grid: PeriodicGrid, u: np.ndarray, v: np.ndarray):
    ux, vx = sfft.irfft(grid.rik * sfft.rfft(np.stack([u, v])), n=grid.n)
    return ux, vx


def rhs_arrays(grid: PeriodicGrid, u: np.ndarray, v: np.ndarray, dealias: bool = True):
    """Array-level ``rhs_state``; returns (du_dt, dv_dt) as ndarrays."""
    with np.errstate(over="ignore", invalid="ignore"):
        du, dv = _rhs_kernel(grid, u, v, dealias)
    if not (np.all(np.isfinite(du)) and np.all(np.isfinite(dv))):
        raise NonFiniteStateError("non-finite right-hand side")
    return du, dv


def _rhs_kernel(grid, u, v, dealias):
    n = grid.n
    ux, vx = sfft.irfft(grid.rik * sfft.rfft(np.stack([u, v])), n=n)
    w = u + v
    uxvx = ux * vx
    products = np.stack(
        [
            w * ux,
            w * vx,
            u * vx,
            ux * v,
            u * u + 0.5 * ux * ux + uxvx + 0.5 * v * v - 0.5 * vx * vx,
            v * v + 0.5 * vx * vx + uxvx + 0.5 * u * u - 0.5 * ux * ux,
        ]
    )
    hat = sfft.rfft(products)
    if dealias:
        hat *= grid.rdealias_mask
    p_hat, dp_hat = _half_symbols(grid)
    du_hat = -hat[0] - p_hat * hat[2] - dp_hat * hat[4]
    dv_hat = -hat[1] - p_hat * hat[3] - dp_hat * hat[5]
    return sfft.irfft(np.stack([du_hat, dv_hat]), n=n)


@lru_cache(maxsize=32)
def _half_symbols(grid: PeriodicGrid):
    k2 = (2.0 * np.pi * grid.rk) ** 2
    return 1.0 / (1.0 + k2), grid.rik / (1.0 + k2)


def rhs_state(s: SolutionState, dealias: bool = True):
    du, dv = rhs_arrays(s.grid, s.u.values, s.v.values, dealias)
    return PeriodicField(s.grid, du), PeriodicField(s.grid, dv)


def _bundle_values(grid: PeriodicGrid, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    ux, vx = _slopes(grid, u, v)
    raw = 1.5 * u * u + u * v + 2.0 * ux * vx + 1.5 * v * v
    return np.fft.ifft(_spectral(grid, raw)).real


def quadratic_bundle(s: SolutionState) -> PeriodicField:
    """F = (3/2)u^2 + uv + 2 u_x v_x + (3/2)v^2, dealiased."""
    return PeriodicField(s.grid, _bundle_values(s.grid, s.u.values, s.v.values))


def rhs_w(s: SolutionState) -> PeriodicField:
    """w_t + w w_x = -d_x P*F; returns the right-hand side -d_x P*F."""
    g = s.grid
    F = _bundle_values(g, s.u.values, s.v.values)
    return PeriodicField(g, -np.fft.ifft(dp_symbol(g) * np.fft.fft(F)).real)


def rhs_wx(s: SolutionState) -> PeriodicField:
    """Source of the slope equation along characteristics.

    (w_x)' = -u_x^2 - v_x^2 + (3/2)u^2 + (3/2)v^2 + uv - P*F,  ' = d_t + w d_x.
    """
    g = s.grid
    u, v = s.u.values, s.v.values
    ux, vx = _slopes(g, u, v)
    F = _bundle_values(g, u, v)
    local = -ux * ux - vx * vx + 1.5 * u * u + 1.5 * v * v + u * v
    local = np.fft.ifft(_spectral(g, local)).real
    return PeriodicField(g, local - np.fft.ifft(p_symbol(g) * np.fft.fft(F)).real)


@dataclass(frozen=True)
class AprioriReport:
    max_uv_sq: float
    max_pplus_F: float
    max_pminus_F: float
    bound_uv: float
    bound_conv: float
    violated: bool


def apriori_check(s: SolutionState, E0: float, tol: float = 1e-6) -> AprioriReport:
    """Compare sup-norms against E0/2 and 2 coth(1/2) E0 (relative tolerance ``tol``).

    The split convolutions use the physical-space quadrature route, so this
    check does not share code with the spectral time stepper.
    """
    u, v = s.u.values, s.v.values
    max_uv_sq = float(np.max(u * u + v * v))
    twice_F = 2.0 * quadratic_bundle(s)  # 3u^2 + 2uv + 4u_x v_x + 3v^2
    max_plus = conv_p_plus(twice_F).max_abs()
    max_minus = conv_p_minus(twice_F).max_abs()
    bound_uv = 0.5 * E0
    bound_conv = 2.0 * COTH_HALF * E0
    violated = (
        max_uv_sq > bound_uv * (1.0 + tol)
        or max_plus > bound_conv * (1.0 + tol)
        or max_minus > bound_conv * (1.0 + tol)
    )
    return AprioriReport(max_uv_sq, max_plus, max_minus, bound_uv, bound_conv, bool(violated))
