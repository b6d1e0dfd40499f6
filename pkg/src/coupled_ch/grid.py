"""
Uniform periodic grid on the unit circle and Fourier-space utilities.

Convention: a field f sampled at x_j = j/n is represented as

    f(x) = sum_k c_k exp(2*pi*i*k*x),   k = -n/2, ..., n/2 - 1

with c_k = fft(f)/n.  Coefficient arrays are stored in numpy FFT order;
``PeriodicGrid.k`` gives the integer wavenumber of each slot.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "PeriodicGrid",
    "PeriodicField",
    "Spectrum",
    "make_grid",
    "to_spectrum",
    "from_spectrum",
    "derivative",
    "h1_norm_sq",
    "interpolate",
    "dealias",
]

MIN_NODES = 16


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class PeriodicGrid:
    """n equispaced nodes x_j = j/n on [0, 1)."""

    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise TypeError(f"n must be an integer, got {type(self.n).__name__}")
        if not _is_power_of_two(int(self.n)) or self.n < MIN_NODES:
            raise ValueError(f"n must be a power of two >= {MIN_NODES}, got {self.n}")

    @property
    def dx(self) -> float:
        return 1.0 / self.n

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n) / self.n

    @cached_property
    def k(self) -> np.ndarray:
        """Integer wavenumbers in FFT order (the Nyquist slot holds -n/2)."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n)

    @cached_property
    def ik(self) -> np.ndarray:
        """First-derivative multiplier 2*pi*i*k with the Nyquist mode zeroed."""
        mult = 2j * np.pi * self.k
        mult[self.n // 2] = 0.0
        return mult

    @cached_property
    def k2(self) -> np.ndarray:
        """Second-derivative symbol (2*pi*k)^2, Nyquist included."""
        return (2.0 * np.pi * self.k) ** 2

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        return np.abs(self.k) <= self.n / 3.0

    # half-spectrum (rfft) versions used by the time stepper
    @cached_property
    def rk(self) -> np.ndarray:
        return np.arange(self.n // 2 + 1, dtype=float)

    @cached_property
    def rik(self) -> np.ndarray:
        mult = 2j * np.pi * self.rk
        mult[-1] = 0.0
        return mult

    @cached_property
    def rdealias_mask(self) -> np.ndarray:
        return self.rk <= self.n / 3.0


def make_grid(n: int) -> PeriodicGrid:
    return PeriodicGrid(n)


@dataclass(frozen=True, eq=False)
class PeriodicField:
    """Real samples of a 1-periodic function on a ``PeriodicGrid``.

    Non-finite samples are rejected unless ``broken`` is set, which marks
    fields produced after a numerical breakdown.
    """

    grid: PeriodicGrid
    values: np.ndarray
    broken: bool = field(default=False, compare=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} samples, got shape {vals.shape}")
        if not self.broken and not np.all(np.isfinite(vals)):
            raise ValueError("field contains non-finite samples")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, grid: PeriodicGrid, func) -> "PeriodicField":
        return cls(grid, func(grid.nodes))

    @classmethod
    def zeros(cls, grid: PeriodicGrid) -> "PeriodicField":
        return cls(grid, np.zeros(grid.n))

    def _other_values(self, other):
        if isinstance(other, PeriodicField):
            if other.grid != self.grid:
                raise ValueError("fields live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return PeriodicField(self.grid, self.values + self._other_values(other))

    __radd__ = __add__

    def __sub__(self, other):
        return PeriodicField(self.grid, self.values - self._other_values(other))

    def __rsub__(self, other):
        return PeriodicField(self.grid, self._other_values(other) - self.values)

    def __mul__(self, other):
        return PeriodicField(self.grid, self.values * self._other_values(other))

    __rmul__ = __mul__

    def __neg__(self):
        return PeriodicField(self.grid, -self.values)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Fourier coefficients c_k of a field, FFT order, normalised by 1/n."""

    grid: PeriodicGrid
    coefficients: np.ndarray

    def coefficient(self, k: int) -> complex:
        """Coefficient of integer wavenumber k, for -n/2 <= k < n/2."""
        n = self.grid.n
        if not -n // 2 <= k < n // 2:
            raise IndexError(f"wavenumber {k} outside [-{n // 2}, {n // 2})")
        return complex(self.coefficients[k % n])


def to_spectrum(f: PeriodicField) -> Spectrum:
    return Spectrum(f.grid, np.fft.fft(f.values) / f.grid.n)


def from_spectrum(s: Spectrum) -> PeriodicField:
    return PeriodicField(s.grid, np.fft.ifft(s.coefficients * s.grid.n).real)


def derivative(f: PeriodicField) -> PeriodicField:
    g = f.grid
    return PeriodicField(g, np.fft.ifft(g.ik * np.fft.fft(f.values)).real)


def h1_norm_sq(f: PeriodicField) -> float:
    """Squared H^1 norm, sum_k (1 + 4 pi^2 k^2) |c_k|^2."""
    g = f.grid
    c = np.fft.fft(f.values) / g.n
    return float(np.sum((1.0 + g.k2) * np.abs(c) ** 2))


def interpolate(f: PeriodicField, x: float) -> float:
    """Trigonometric interpolant of ``f`` evaluated at ``x`` (taken mod 1).

    The Nyquist coefficient is split evenly between k = +-n/2 so the
    interpolant is real for real data.
    """
    return _eval_series(np.fft.fft(f.values) / f.grid.n, f.grid, x)


def _eval_series(coeffs: np.ndarray, grid: PeriodicGrid, x: float) -> float:
    x = float(x) % 1.0
    n = grid.n
    phase = np.exp(2j * np.pi * grid.k * x)
    total = np.dot(coeffs, phase)
    # replace c_{-n/2} e^{-i pi n x} by c_{-n/2} cos(pi n x)
    nyq = coeffs[n // 2]
    total += nyq * (np.cos(np.pi * n * x) - phase[n // 2])
    return float(total.real)


def _eval_half(rcoeffs: np.ndarray, grid: PeriodicGrid, x: float) -> float:
    """Evaluate the real series given by half-spectrum coefficients rfft(f)/n."""
    x = float(x) % 1.0
    n = grid.n
    phase = np.exp(2j * np.pi * grid.rk[1:-1] * x)
    total = rcoeffs[0].real + 2.0 * np.dot(rcoeffs[1:-1], phase).real
    return float(total + rcoeffs[-1].real * np.cos(np.pi * n * x))


def dealias(s: Spectrum) -> Spectrum:
    """2/3-rule projection: zero every mode with |k| > n/3."""
    return Spectrum(s.grid, np.where(s.grid.dealias_mask, s.coefficients, 0.0))
