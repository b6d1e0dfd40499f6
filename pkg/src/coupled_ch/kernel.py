"""
Periodic Helmholtz inverse (1 - d^2/dx^2)^{-1} on the unit circle.

The Green's function is p(x) = cosh(x - [x] - 1/2) / (2 sinh 1/2).  It splits
into two one-sided exponentials on z in [0, 1),

    p_plus(z)  = exp(-(z - 1/2)) / (4 sinh 1/2)
    p_minus(z) = exp( (z - 1/2)) / (4 sinh 1/2)

with p = p_plus + p_minus and p' = p_minus - p_plus away from z = 0.

Two independent routes are provided.  The spectral route multiplies Fourier
coefficients by the exact symbols (used inside the time loop).  The
quadrature route works in physical space: the split convolutions are
computed by an exponential recursion over grid cells whose cell integrals use
Gauss-Legendre nodes placed strictly inside each cell, so the kernel jump at
z = 0 never falls on a quadrature node.  The quadrature route is for
cross-validation only.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.signal import lfilter

from .grid import PeriodicField, PeriodicGrid, derivative

__all__ = [
    "SINH_HALF",
    "COTH_HALF",
    "KernelTable",
    "green_value",
    "split_green_values",
    "kernel_table",
    "conv_p",
    "conv_dp",
    "conv_p_plus",
    "conv_p_minus",
    "conv_p_trapezoid",
    "conv_p_plus_literal",
    "conv_p_minus_literal",
    "helmholtz_residual",
    "p_symbol",
    "dp_symbol",
]

SINH_HALF = np.sinh(0.5)
COTH_HALF = 1.0 / np.tanh(0.5)

# Gauss-Legendre points per cell for the quadrature route
_GAUSS_POINTS = 8


def green_value(x):
    z = np.asarray(x, dtype=float) % 1.0
    out = np.cosh(z - 0.5) / (2.0 * SINH_HALF)
    return float(out) if out.ndim == 0 else out


def split_green_values(z):
    """Return (p_plus(z), p_minus(z)) for 0 <= z < 1."""
    z = np.asarray(z, dtype=float)
    if np.any(z < 0.0) or np.any(z >= 1.0):
        raise ValueError("split kernels are defined for offsets in [0, 1)")
    plus = np.exp(-(z - 0.5)) / (4.0 * SINH_HALF)
    minus = np.exp(z - 0.5) / (4.0 * SINH_HALF)
    if plus.ndim == 0:
        return float(plus), float(minus)
    return plus, minus


@dataclass(frozen=True, eq=False)
class KernelTable:
    """Kernel samples at grid offsets z_j = j/n."""

    grid: PeriodicGrid
    p_values: np.ndarray
    p_plus_values: np.ndarray
    p_minus_values: np.ndarray

    def integral(self, which: str = "p") -> float:
        """Integral of a kernel over one period, by the cell quadrature."""
        ones = np.ones(self.grid.n)
        if which == "p":
            return float(np.mean(_split_quadrature(self.grid, ones, +1) + _split_quadrature(self.grid, ones, -1)))
        if which == "plus":
            return float(np.mean(_split_quadrature(self.grid, ones, +1)))
        if which == "minus":
            return float(np.mean(_split_quadrature(self.grid, ones, -1)))
        raise ValueError(f"unknown kernel {which!r}")


def kernel_table(grid: PeriodicGrid) -> KernelTable:
    plus, minus = split_green_values(grid.nodes)
    return KernelTable(grid, plus + minus, plus, minus)


# ----------------------------------------------------------------------------
# spectral route
# ----------------------------------------------------------------------------


def p_symbol(grid: PeriodicGrid) -> np.ndarray:
    return 1.0 / (1.0 + grid.k2)


def dp_symbol(grid: PeriodicGrid) -> np.ndarray:
    return grid.ik / (1.0 + grid.k2)


def conv_p(f: PeriodicField) -> PeriodicField:
    g = f.grid
    return PeriodicField(g, np.fft.ifft(p_symbol(g) * np.fft.fft(f.values)).real)


def conv_dp(f: PeriodicField) -> PeriodicField:
    g = f.grid
    return PeriodicField(g, np.fft.ifft(dp_symbol(g) * np.fft.fft(f.values)).real)


def helmholtz_residual(f: PeriodicField) -> float:
    """max |p*f - (p*f)_xx - f|; zero up to round-off for a correct inverse."""
    pf = conv_p(f)
    return float(np.max(np.abs((pf - derivative(derivative(pf))).values - f.values)))


# ----------------------------------------------------------------------------
# quadrature route
# ----------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _gauss_rule(m: int):
    xi, w = np.polynomial.legendre.leggauss(m)
    return (1.0 + xi) / 2.0, w / 2.0  # nodes in (0, 1), weights summing to 1


def _shifted_samples(grid: PeriodicGrid, values: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Trigonometric interpolant of ``values`` at x_j + theta_i*dx, shape (m, n)."""
    coeffs = np.fft.fft(values)
    # symmetric treatment of the Nyquist slot keeps the shift real
    kk = grid.k.copy()
    shifts = np.exp(2j * np.pi * np.outer(theta * grid.dx, kk))
    nyq = grid.n // 2
    shifts[:, nyq] = np.cos(np.pi * grid.n * theta * grid.dx)
    return np.fft.ifft(coeffs[None, :] * shifts, axis=1).real


def _cell_integrals(grid: PeriodicGrid, values: np.ndarray, direction: int) -> np.ndarray:
    """Exponentially weighted cell integrals.

    direction=+1: c_j = int_{x_j}^{x_{j+1}} exp(-(x_{j+1} - y)) f(y) dy
    direction=-1: d_j = int_{x_j}^{x_{j+1}} exp(-(y - x_j)) f(y) dy
    """
    h = grid.dx
    theta, w = _gauss_rule(_GAUSS_POINTS)
    samples = _shifted_samples(grid, values, theta)
    if direction > 0:
        weights = w * np.exp(-h * (1.0 - theta))
    else:
        weights = w * np.exp(-h * theta)
    return h * (weights @ samples)


def _split_quadrature(grid: PeriodicGrid, values: np.ndarray, direction: int, periodic: bool = True) -> np.ndarray:
    """P_plus*f (direction=+1) or P_minus*f (direction=-1) at the nodes."""
    n, h = grid.n, grid.dx
    decay = np.exp(-h)
    cells = _cell_integrals(grid, values, direction)
    if direction > 0:
        # G_{j+1} = decay*G_j + c_j, G periodic => G_0 = G_n
        forced = lfilter([1.0], [1.0, -decay], cells)  # zero-start recursion, forced[j] = G_{j+1}
        g0 = forced[-1] / (1.0 - np.exp(-1.0)) if periodic else 0.0
        G = np.empty(n)
        G[0] = g0
        G[1:] = forced[:-1] + g0 * decay ** np.arange(1, n)
        return 0.5 * G
    # H_j = decay*H_{j+1} + d_j, H periodic => H_n = H_0
    forced = lfilter([1.0], [1.0, -decay], cells[::-1])[::-1]  # forced[j] = H_j with H_n = 0
    hn = forced[0] / (1.0 - np.exp(-1.0)) if periodic else 0.0
    H = forced + hn * decay ** (n - np.arange(n))
    return 0.5 * H


def conv_p_plus(f: PeriodicField) -> PeriodicField:
    return PeriodicField(f.grid, _split_quadrature(f.grid, f.values, +1))


def conv_p_minus(f: PeriodicField) -> PeriodicField:
    return PeriodicField(f.grid, _split_quadrature(f.grid, f.values, -1))


def conv_p_plus_literal(f: PeriodicField) -> PeriodicField:
    """(1/2) e^{-x} int_0^x e^y f(y) dy: the one-sided form without periodic closure."""
    return PeriodicField(f.grid, _split_quadrature(f.grid, f.values, +1, periodic=False))


def conv_p_minus_literal(f: PeriodicField) -> PeriodicField:
    """(1/2) e^{x} int_x^1 e^{-y} f(y) dy: the one-sided form without periodic closure."""
    return PeriodicField(f.grid, _split_quadrature(f.grid, f.values, -1, periodic=False))


def conv_p_trapezoid(f: PeriodicField) -> PeriodicField:
    """Direct circulant sum dx * sum_j p(x_i - x_j) f_j (second order: p has a kink at 0)."""
    g = f.grid
    offsets = (g.nodes[:, None] - g.nodes[None, :]) % 1.0
    return PeriodicField(g, g.dx * (green_value(offsets) @ f.values))
