"""
The periodic Helmholtz inverse and its one-sided split.

p(x) = cosh(x - [x] - 1/2) / (2 sinh 1/2) inverts 1 - d^2/dx^2 on the unit
circle.  The split p = p_plus + p_minus into one-sided exponentials turns the
derivative kernel into a difference, p' = p_minus - p_plus.  This script checks
both facts numerically and shows what goes wrong when the one-sided pieces are
integrated without periodic wrap-around.
"""

import numpy as np

from coupled_ch.grid import PeriodicField, PeriodicGrid
from coupled_ch.kernel import (
    conv_dp,
    conv_p,
    conv_p_minus,
    conv_p_minus_literal,
    conv_p_plus,
    conv_p_plus_literal,
    conv_p_trapezoid,
    helmholtz_residual,
    kernel_table,
)
from coupled_ch.selftest import random_band_limited

grid = PeriodicGrid(256)
rng = np.random.default_rng(0)
f = random_band_limited(grid, 64, rng)

print("kernel integrals over one period (cell quadrature):")
table = kernel_table(grid)
for which in ("p", "plus", "minus"):
    print(f"  {which:5s} {table.integral(which):.15f}")

print("\nidentity residuals on a random field with |k| <= 64:")
plus, minus = conv_p_plus(f), conv_p_minus(f)
print(f"  d2(p*f) - p*f + f    {helmholtz_residual(f):.2e}")
print(f"  P+ + P- - P          {(plus + minus - conv_p(f)).max_abs():.2e}")
print(f"  P- - P+ - d(P)       {(minus - plus - conv_dp(f)).max_abs():.2e}")

# a plain circulant sum over the samples is only second order
for n in (32, 64, 128):
    g = PeriodicGrid(n)
    h = PeriodicField.from_function(g, lambda x: np.exp(np.sin(2 * np.pi * x)))
    err = (conv_p_trapezoid(h) - conv_p(h)).max_abs()
    print(f"  trapezoid circulant vs spectral, n={n:4d}: {err:.2e}")

# One-sided integrals over [x - 1, x] only (no periodic closure) lose the mass
# that wraps around the circle: on f = 1 they give 1 - exp(-1/2) cosh(x - 1/2).
one = PeriodicField(grid, np.ones(grid.n))
lit = conv_p_plus_literal(one) + conv_p_minus_literal(one)
print("\nP*1 with periodic split:     ", f"{(conv_p_plus(one) + conv_p_minus(one)).values[:3]}")
print("P*1 without periodic closure:", f"{lit.values[:3]}  (max defect {np.max(np.abs(lit.values - 1)):.3f})")
