"""
Explicit RK4 time stepping with a CFL rule on |u + v|, energy monitoring and
slope-threshold wave-breaking detection.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .characteristics import CharacteristicTrack, advance_q
from .dynamics import NonFiniteStateError, SolutionState, apriori_check, rhs_arrays
from .grid import PeriodicField, h1_norm_sq

__all__ = [
    "StepControl",
    "RunRecord",
    "DtUnderflow",
    "TERMINATIONS",
    "energy",
    "cfl_dt",
    "step_rk4",
    "detect_breaking",
    "slope_field",
    "integrate_fixed",
    "run",
]

log = logging.getLogger(__name__)

TERMINATIONS = ("reached_t_end", "breaking_detected", "dt_underflow", "nonfinite_state")
VELOCITY_FLOOR = 1e-12


class DtUnderflow(RuntimeError):
    def __init__(self, dt: float, dt_min: float):
        super().__init__(f"CFL step {dt:.3e} below dt_min {dt_min:.3e}")
        self.dt = dt


@dataclass(frozen=True)
class StepControl:
    cfl: float = 0.3
    dt_max: float = 1e-3
    dt_min: float = 1e-9
    slope_threshold: float = 1e4
    dealias: bool = True

    def __post_init__(self):
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError("cfl must lie in (0, 1]")
        if not 0.0 < self.dt_min < self.dt_max:
            raise ValueError("need 0 < dt_min < dt_max")
        if not self.slope_threshold > 0.0:
            raise ValueError("slope_threshold must be positive")


@dataclass
class RunRecord:
    times: list = field(default_factory=list)
    energy: list = field(default_factory=list)
    min_slope: list = field(default_factory=list)
    min_slope_location: list = field(default_factory=list)
    dt: list = field(default_factory=list)
    termination: str | None = None
    break_time: float | None = None
    break_location: float | None = None
    apriori: list = field(default_factory=list)  # (row index, AprioriReport)
    tracks: list = field(default_factory=list)
    final_state: SolutionState | None = None

    @property
    def E0(self) -> float:
        return self.energy[0]

    def energy_drift(self) -> np.ndarray:
        E = np.asarray(self.energy)
        if E[0] == 0.0:
            return np.abs(E)
        return np.abs(E - E[0]) / E[0]


def energy(s: SolutionState) -> float:
    """E = ||u||_1^2 + ||v||_1^2."""
    return h1_norm_sq(s.u) + h1_norm_sq(s.v)


def cfl_dt(s: SolutionState, ctrl: StepControl) -> float:
    speed = max(float(np.max(np.abs(s.u.values + s.v.values))), VELOCITY_FLOOR)
    dt = min(ctrl.dt_max, ctrl.cfl * s.grid.dx / speed)
    if dt < ctrl.dt_min:
        raise DtUnderflow(dt, ctrl.dt_min)
    return dt


def _rk4_arrays(grid, u, v, dt, dealias=True):
    k1u, k1v = rhs_arrays(grid, u, v, dealias)
    u2, v2 = u + 0.5 * dt * k1u, v + 0.5 * dt * k1v
    k2u, k2v = rhs_arrays(grid, u2, v2, dealias)
    u3, v3 = u + 0.5 * dt * k2u, v + 0.5 * dt * k2v
    k3u, k3v = rhs_arrays(grid, u3, v3, dealias)
    u4, v4 = u + dt * k3u, v + dt * k3v
    k4u, k4v = rhs_arrays(grid, u4, v4, dealias)
    with np.errstate(over="ignore", invalid="ignore"):
        un = u + dt * (k1u + 2.0 * k2u + 2.0 * k3u + k4u) / 6.0
        vn = v + dt * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
    if not (np.all(np.isfinite(un)) and np.all(np.isfinite(vn))):
        raise NonFiniteStateError("non-finite state after RK4 update")
    return un, vn, ((u, v), (u2, v2), (u3, v3), (u4, v4))


def step_rk4(s: SolutionState, dt: float, return_stages: bool = False, dealias: bool = True):
    """Classical RK4 step of (u, v).

    With ``return_stages`` the four stage states are returned as well, so a
    characteristic can be advanced with exactly the same velocity samples.
    """
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    g = s.grid
    un, vn, stages = _rk4_arrays(g, s.u.values, s.v.values, dt, dealias)
    new = SolutionState(s.t + dt, PeriodicField(g, un), PeriodicField(g, vn))
    if not return_stages:
        return new
    offsets = (0.0, 0.5 * dt, 0.5 * dt, dt)
    states = [SolutionState.from_arrays(g, a, b, s.t + c) for (a, b), c in zip(stages, offsets)]
    return new, states


def slope_field(s: SolutionState) -> np.ndarray:
    g = s.grid
    return np.fft.ifft(g.ik * np.fft.fft(s.u.values + s.v.values)).real


def detect_breaking(s: SolutionState, ctrl: StepControl):
    """(slope, location) of min_x (u_x + v_x) if it is <= -slope_threshold, else None."""
    slope = slope_field(s)
    j = int(np.argmin(slope))
    if slope[j] <= -ctrl.slope_threshold:
        return float(slope[j]), float(s.grid.nodes[j])
    return None


def integrate_fixed(s: SolutionState, dt: float, t_end: float) -> SolutionState:
    """Fixed-step RK4 to ``t_end`` (last step shortened to land exactly)."""
    nsteps = max(1, int(math.ceil((t_end - s.t) / dt - 1e-9)))
    h = (t_end - s.t) / nsteps
    for _ in range(nsteps):
        s = step_rk4(s, h)
    return s


def run(
    initial: SolutionState,
    t_end: float,
    ctrl: StepControl | None = None,
    tracks=(),
    output_stride: int = 1,
    apriori: bool = False,
    apriori_tol: float = 1e-6,
) -> RunRecord:
    """Advance ``initial`` to ``t_end`` or until a termination trigger fires.

    Diagnostics are recorded after every accepted step; a priori bounds (when
    requested) only on rows that are multiples of ``output_stride`` and on the
    last row.  Numerical terminations are encoded in the record, never raised.
    """
    if not t_end > 0.0:
        raise ValueError("t_end must be positive")
    ctrl = ctrl or StepControl()
    record = RunRecord()
    record.tracks = [CharacteristicTrack(float(x0)) for x0 in tracks]
    positions = [float(x0) for x0 in tracks]
    s = initial
    step_dt = 0.0
    step = 0
    E0 = None

    while True:
        slope = slope_field(s)
        j = int(np.argmin(slope))
        E = energy(s)
        if E0 is None:
            E0 = E
        record.times.append(float(s.t))
        record.energy.append(E)
        record.min_slope.append(float(slope[j]))
        record.min_slope_location.append(float(s.grid.nodes[j]))
        record.dt.append(step_dt)
        for tr, q in zip(record.tracks, positions):
            tr.record(s, q)

        done = None
        if slope[j] <= -ctrl.slope_threshold:
            done = "breaking_detected"
            record.break_time, record.break_location = float(s.t), float(s.grid.nodes[j])
        elif s.t >= t_end - 1e-14:
            done = "reached_t_end"
        else:
            try:
                step_dt = min(cfl_dt(s, ctrl), t_end - s.t)
            except DtUnderflow as exc:
                log.info("dt underflow at t=%.6g: %s", s.t, exc)
                done = "dt_underflow"
                record.break_time, record.break_location = float(s.t), float(s.grid.nodes[j])

        if apriori and (done is not None or step % output_stride == 0):
            record.apriori.append((len(record.times) - 1, apriori_check(s, E0, apriori_tol)))
        if done is not None:
            record.termination = done
            break

        try:
            new, stages = step_rk4(s, step_dt, return_stages=True, dealias=ctrl.dealias)
        except NonFiniteStateError:
            record.termination = "nonfinite_state"
            break
        positions = [advance_q(q, stages, step_dt) for q in positions]
        s = new
        step += 1

    record.final_state = s
    return record
