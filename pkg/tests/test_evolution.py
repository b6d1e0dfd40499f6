import math

import numpy as np
import pytest

from coupled_ch import evolution
from coupled_ch.dynamics import NonFiniteStateError, SolutionState
from coupled_ch.evolution import (
    TERMINATIONS,
    DtUnderflow,
    StepControl,
    cfl_dt,
    detect_breaking,
    energy,
    integrate_fixed,
    run,
    slope_field,
    step_rk4,
)
from coupled_ch.grid import PeriodicGrid


def _smooth_state(n=128, amp=0.05):
    g = PeriodicGrid(n)
    x = g.nodes
    return SolutionState.from_arrays(g, amp * np.cos(2 * np.pi * x), amp * np.sin(2 * np.pi * x))


class TestStepControl:
    def test_defaults(self):
        c = StepControl()
        assert (c.cfl, c.dt_max, c.dt_min, c.slope_threshold, c.dealias) == (0.3, 1e-3, 1e-9, 1e4, True)

    @pytest.mark.parametrize(
        "kwargs", [{"cfl": 0.0}, {"cfl": 1.5}, {"dt_min": 1e-2}, {"slope_threshold": -1.0}, {"dt_min": 0.0}]
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            StepControl(**kwargs)


class TestCfl:
    def test_capped_by_dt_max(self):
        assert cfl_dt(_smooth_state(amp=1e-6), StepControl()) == 1e-3

    def test_scales_with_speed(self):
        s = _smooth_state(n=256, amp=10.0)
        speed = np.max(np.abs(s.w.values))
        assert cfl_dt(s, StepControl()) == pytest.approx(0.3 / 256 / speed)

    def test_zero_velocity_uses_floor(self):
        g = PeriodicGrid(16)
        s = SolutionState.from_arrays(g, np.zeros(16), np.zeros(16))
        assert cfl_dt(s, StepControl()) == 1e-3

    def test_underflow(self):
        s = _smooth_state(amp=1e3)
        with pytest.raises(DtUnderflow):
            cfl_dt(s, StepControl(dt_min=5e-4))


class TestStepping:
    def test_rk4_fourth_order_in_time(self):
        s0 = _smooth_state(n=64, amp=0.5)
        ref = integrate_fixed(s0, 2.5e-3, 0.2)
        errs = [np.max(np.abs(integrate_fixed(s0, dt, 0.2).u.values - ref.u.values)) for dt in (0.04, 0.02)]
        assert math.log2(errs[0] / errs[1]) > 3.7

    def test_integrate_fixed_lands_on_t_end(self):
        s = integrate_fixed(_smooth_state(n=32), 0.03, 0.1)
        assert s.t == pytest.approx(0.1, abs=1e-15)

    def test_stages(self):
        s0 = _smooth_state(n=32)
        new, stages = step_rk4(s0, 0.01, return_stages=True)
        assert [st.t for st in stages] == pytest.approx([0.0, 0.005, 0.005, 0.01])
        np.testing.assert_array_equal(stages[0].u.values, s0.u.values)
        assert new.t == pytest.approx(0.01)

    def test_rejects_non_positive_dt(self):
        with pytest.raises(ValueError):
            step_rk4(_smooth_state(n=16), 0.0)

    def test_slope_and_breaking_detection(self):
        g = PeriodicGrid(64)
        x = g.nodes
        s = SolutionState.from_arrays(g, np.sin(2 * np.pi * x), np.zeros(64))
        slope = slope_field(s)
        assert slope.min() == pytest.approx(-2 * np.pi, rel=1e-12)
        hit = detect_breaking(s, StepControl(slope_threshold=6.0))
        assert hit is not None and hit[1] == pytest.approx(0.5)
        assert detect_breaking(s, StepControl(slope_threshold=7.0)) is None


class TestRun:
    def test_zero_data(self):
        g = PeriodicGrid(32)
        s = SolutionState.from_arrays(g, np.zeros(32), np.zeros(32))
        rec = run(s, 0.01)
        assert rec.termination == "reached_t_end"
        assert rec.times[-1] == pytest.approx(0.01)
        assert np.all(np.asarray(rec.energy) == 0.0)
        assert np.all(np.asarray(rec.min_slope) == 0.0)

    def test_energy_conserved(self):
        rec = run(_smooth_state(n=128), 0.1)
        assert rec.termination == "reached_t_end"
        assert np.max(rec.energy_drift()) < 1e-10
        assert rec.E0 == pytest.approx(energy(_smooth_state(n=128)))

    def test_breaking_recorded(self):
        g = PeriodicGrid(256)
        x = g.nodes
        s = SolutionState.from_arrays(g, np.sin(2 * np.pi * x), np.sin(2 * np.pi * x))
        rec = run(s, 1.0, StepControl(slope_threshold=30.0))
        assert rec.termination == "breaking_detected"
        assert rec.min_slope[-1] <= -30.0
        assert rec.break_time == rec.times[-1]

    def test_dt_underflow(self):
        g = PeriodicGrid(64)
        x = g.nodes
        s = SolutionState.from_arrays(g, 50 * np.sin(2 * np.pi * x), np.zeros(64))
        rec = run(s, 1.0, StepControl(dt_min=5e-4))
        assert rec.termination == "dt_underflow"
        assert rec.break_time == 0.0

    def test_nonfinite_state(self, monkeypatch):
        def boom(*args, **kwargs):
            raise NonFiniteStateError("forced")

        monkeypatch.setattr(evolution, "step_rk4", boom)
        rec = run(_smooth_state(n=32), 1.0)
        assert rec.termination == "nonfinite_state"
        assert rec.termination in TERMINATIONS

    def test_tracks_and_apriori_rows(self):
        rec = run(_smooth_state(n=64), 0.05, tracks=[0.25, 0.75], output_stride=7, apriori=True)
        assert len(rec.tracks) == 2
        assert len(rec.tracks[0].times) == len(rec.times)
        rows = [i for i, _ in rec.apriori]
        assert rows[0] == 0 and rows[-1] == len(rec.times) - 1
        assert all(i % 7 == 0 for i in rows[:-1])
        assert not any(r.violated for _, r in rec.apriori)

    def test_rejects_bad_t_end(self):
        with pytest.raises(ValueError):
            run(_smooth_state(n=16), 0.0)
