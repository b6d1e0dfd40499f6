"""
Self-test: the operator identities, conservation and convergence checks run at
n = 64 and n = 256, one PASS/FAIL line each.  Output is deterministic for a
given seed.
"""

from __future__ import annotations

import math
import operator

import numpy as np

from . import kernel
from .criterion import K_FACTOR, compute_K, criterion_margin, tstar_from_g0
from .dynamics import SolutionState, rhs_state, rhs_w
from .evolution import StepControl, integrate_fixed, run
from .grid import PeriodicField, PeriodicGrid, dealias, derivative, h1_norm_sq, interpolate, to_spectrum

_OPS = {"<=": operator.le, "<": operator.lt, ">=": operator.ge, ">": operator.gt}


def random_band_limited(grid: PeriodicGrid, kmax: int, rng, amplitude: float = 1.0) -> PeriodicField:
    """Random real field with modes |k| <= kmax, scaled to max |f| = amplitude."""
    c = np.zeros(grid.n, dtype=complex)
    c[0] = rng.normal()
    for k in range(1, kmax + 1):
        z = complex(rng.normal(), rng.normal()) / k
        c[k], c[-k] = z, np.conj(z)
    values = np.fft.ifft(c).real * grid.n
    return PeriodicField(grid, amplitude * values / np.max(np.abs(values)))


def _check_grid(n, rng):
    g = PeriodicGrid(n)
    x = g.nodes
    errs = []
    for k in (1, 2, n // 3 - 1):
        f = PeriodicField(g, np.sin(2 * np.pi * k * x))
        d2 = derivative(derivative(f)).values
        errs.append(np.max(np.abs(d2 + (2 * np.pi * k) ** 2 * f.values)) / max(1.0, (2 * np.pi * k) ** 2))
    f = random_band_limited(g, n // 4, rng)
    quad = np.mean(f.values**2 + derivative(f).values ** 2)
    parseval = abs(h1_norm_sq(f) - quad) / quad
    nodes = max(abs(interpolate(f, xj) - fj) for xj, fj in zip(x[:: max(1, n // 16)], f.values[:: max(1, n // 16)]))
    s = dealias(to_spectrum(f))
    idem = np.max(np.abs(dealias(s).coefficients - s.coefficients))
    return [
        ("grid: second derivative of sin modes (relative)", max(errs), "<=", 1e-9),
        ("grid: Parseval H1 vs trapezoid (relative)", parseval, "<=", 1e-10),
        ("grid: interpolation at nodes", nodes, "<=", 1e-13),
        ("grid: dealias idempotent", idem, "<=", 0.0),
    ]


def _check_kernel(n, rng):
    g = PeriodicGrid(n)
    one = PeriodicField(g, np.ones(n))
    worst_h = worst_sum = worst_diff = 0.0
    for _ in range(10):
        f = random_band_limited(g, n // 4, rng)
        worst_h = max(worst_h, kernel.helmholtz_residual(f))
        plus, minus = kernel.conv_p_plus(f), kernel.conv_p_minus(f)
        worst_sum = max(worst_sum, (plus + minus - kernel.conv_p(f)).max_abs())
        worst_diff = max(worst_diff, (minus - plus - kernel.conv_dp(f)).max_abs())
    table = kernel.kernel_table(g)
    positive = float(min(table.p_values.min(), table.p_plus_values.min(), table.p_minus_values.min()))
    return [
        ("kernel: d2(p*f) = p*f - f", worst_h, "<=", 1e-8),
        ("kernel: (P+ + P-)*f = P*f", worst_sum, "<=", 1e-8),
        ("kernel: (P- - P+)*f = d(P*f)", worst_diff, "<=", 1e-8),
        ("kernel: p*1 = 1", (kernel.conv_p(one) - 1.0).max_abs(), "<=", 1e-12),
        ("kernel: P+*1 = 1/2", (kernel.conv_p_plus(one) - 0.5).max_abs(), "<=", 1e-12),
        ("kernel: P-*1 = 1/2", (kernel.conv_p_minus(one) - 0.5).max_abs(), "<=", 1e-12),
        ("kernel: min kernel sample", positive, ">", 0.0),
    ]


def _check_dynamics(n, rng):
    g = PeriodicGrid(n)
    kmax = min(40, n // 6)
    u, v = random_band_limited(g, kmax, rng), random_band_limited(g, kmax, rng)
    s, swapped = SolutionState(0.0, u, v), SolutionState(0.0, v, u)
    du, dv = rhs_state(s)
    su, sv = rhs_state(swapped)
    sym = max((du - sv).max_abs(), (dv - su).max_abs())
    w = u + v
    wcons = (rhs_w(s) - (du + dv + w * derivative(w))).max_abs()
    same = SolutionState(0.0, u, u)
    W = 2.0 * u
    scalar = -kernel.conv_dp(W * W + 0.5 * derivative(W) * derivative(W))
    red = (rhs_w(same) - scalar).max_abs()
    const = SolutionState(0.0, PeriodicField(g, np.full(n, 0.7)), PeriodicField(g, np.full(n, -0.2)))
    cu, cv = rhs_state(const)
    return [
        ("dynamics: u<->v symmetry", sym, "<=", 0.0),
        ("dynamics: w-equation consistency", wcons, "<=", 1e-9),
        ("dynamics: u = v reduces to scalar CH", red, "<=", 1e-10),
        ("dynamics: constants are equilibria", max(cu.max_abs(), cv.max_abs()), "<=", 1e-12),
    ]


def _check_evolution(n, rng):
    g = PeriodicGrid(n)
    x = g.nodes
    s0 = SolutionState.from_arrays(g, 0.05 * np.cos(2 * np.pi * x), 0.05 * np.sin(2 * np.pi * x))
    rec = run(s0, 0.2, StepControl())
    drift = float(np.max(rec.energy_drift()))
    p0 = SolutionState.from_arrays(g, 0.02 * 0.64 / (1.36 - 1.2 * np.cos(2 * np.pi * x)), 0.05 * np.sin(2 * np.pi * x))
    sols = [integrate_fixed(p0, dt, 0.1) for dt in (1e-2, 5e-3, 2.5e-3)]
    e = [np.max(np.abs(a.u.values - b.u.values) + np.abs(a.v.values - b.v.values)) for a, b in zip(sols, sols[1:])]
    order = math.log2(e[0] / e[1])
    return [
        ("evolution: relative energy drift, t <= 0.2", drift, "<=", 1e-8),
        ("evolution: temporal self-convergence order", order, ">=", 3.9),
    ]


def _check_criterion(rng):
    K1 = compute_K(1.0)
    exact = math.sqrt(0.5 + 2.0 * (math.e + 1.0) / (math.e - 1.0))
    g = PeriodicGrid(64)
    x = g.nodes
    s = SolutionState.from_arrays(g, np.sin(2 * np.pi * x), np.zeros(64))
    E0 = h1_norm_sq(s.u)
    worst = max(criterion_margin(s, xi, compute_K(E0)) for xi in x)
    t = tstar_from_g0(10.0, 1.0)
    t_ref = math.log((10.0 + math.sqrt(2)) / (10.0 - math.sqrt(2))) / math.sqrt(2)
    return [
        ("criterion: K(1) closed form", abs(K1 - exact), "<=", 1e-12),
        ("criterion: K factor", abs(K_FACTOR - exact**2), "<=", 1e-12),
        ("criterion: single-harmonic max margin", worst, "<", 0.0),
        ("criterion: T*(g0=10, K=1)", abs(t - t_ref) / t_ref, "<=", 1e-12),
    ]


def literal_split_residuals(n: int = 256):
    """Sum/difference identity residuals of the one-sided split kernels on f = 1.

    Returns (periodic split, one-sided split) maxima; the one-sided forms
    without periodic closure do not reproduce P*1 = 1.
    """
    g = PeriodicGrid(n)
    one = PeriodicField(g, np.ones(n))
    periodic = (kernel.conv_p_plus(one) + kernel.conv_p_minus(one) - kernel.conv_p(one)).max_abs()
    literal = (kernel.conv_p_plus_literal(one) + kernel.conv_p_minus_literal(one) - kernel.conv_p(one)).max_abs()
    return periodic, literal


def collect(seed: int = 0):
    rng = np.random.default_rng(seed)
    results = []
    for n in (64, 256):
        for entry in _check_grid(n, rng) + _check_kernel(n, rng) + _check_dynamics(n, rng):
            results.append((f"[n={n}] " + entry[0],) + tuple(entry[1:]))
    results += [("[n=256] " + e[0],) + tuple(e[1:]) for e in _check_evolution(256, rng)]
    results += _check_criterion(rng)
    return results


def run_selftest(seed: int = 0, stream=None) -> bool:
    import sys

    stream = stream or sys.stdout
    ok_all = True
    for name, value, op, bound in collect(seed):
        ok = bool(_OPS[op](value, bound))
        ok_all &= ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {value:.3e} (want {op} {bound:.1e})", file=stream)
    periodic, literal = literal_split_residuals()
    print(f"INFO  split kernels on f=1: periodic split residual {periodic:.3e}, one-sided literal residual {literal:.3e}", file=stream)
    print("selftest " + ("passed" if ok_all else "FAILED"), file=stream)
    return ok_all
