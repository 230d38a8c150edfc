import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stridecue.exceptions import ParameterError
from stridecue.noise import NoiseParams, generate, generate_iso
from stridecue.retime import (
    AnimationClock,
    BaselineCycle,
    build_schedule,
    clock_step,
    read_schedule_csv,
    schedule_total,
)

EXAMPLE = [2.15, 1.28, 1.84]


def run_clock(targets, dt, baseline=1.18):
    clock = AnimationClock(build_schedule(baseline, targets))
    times = {}
    while not clock.exhausted:
        for i in clock.step(dt):
            times[i] = clock.elapsed_s
    return clock, [times[i] for i in range(len(targets))]


class TestSchedule:
    def test_identity(self):
        assert build_schedule(BaselineCycle(1.18), [1.18]).speeds.tolist() == [1.0]

    def test_example_speeds(self):
        sched = build_schedule(BaselineCycle(), EXAMPLE)
        assert sched.speeds[0] == pytest.approx(0.5488372093023256, rel=1e-15)
        assert sched.speeds[1] == pytest.approx(0.921875, rel=1e-12)
        assert sched.speeds[2] == pytest.approx(0.6413043478260869, rel=1e-15)
        assert [e.cycle_index for e in sched.entries] == [0, 1, 2]

    def test_default_baseline(self):
        assert BaselineCycle().duration_s == 1.18

    def test_errors(self):
        with pytest.raises(ParameterError):
            build_schedule(1.18, [])
        with pytest.raises(ParameterError):
            build_schedule(1.18, [1.0, 0.0])
        with pytest.raises(ParameterError):
            BaselineCycle(0.0)
        with pytest.raises(ParameterError):
            BaselineCycle(-1.0)

    @given(st.lists(st.floats(0.2, 5.0), min_size=1, max_size=100), st.floats(0.2, 3.0))
    def test_speed_closure(self, targets, baseline):
        sched = build_schedule(baseline, targets)
        rebuilt = baseline / sched.speeds
        assert np.allclose(rebuilt, targets, rtol=1e-12, atol=0)
        for e in sched.entries:
            assert e.speed_factor == baseline / e.target_duration_s

    def test_totals(self):
        assert schedule_total(build_schedule(1.18, EXAMPLE)) == pytest.approx(5.27, rel=1e-15)
        assert schedule_total(build_schedule(1.18, [1.18])) == 1.18
        assert schedule_total(build_schedule(1.18, generate_iso(5000, 1.15))) == pytest.approx(5750.0, rel=1e-12)

    def test_csv_round_trip(self, tmp_path):
        sched = build_schedule(1.18, generate(NoiseParams("pink", 64, 1.15, 0.02, seed=1)))
        path = tmp_path / "sched.csv"
        sched.to_csv(path)
        assert path.read_text().splitlines()[0] == "cycle,target_s,speed_factor"
        back = read_schedule_csv(path)
        assert np.array_equal(back.targets, sched.targets)
        assert np.array_equal(back.speeds, sched.speeds)


class TestClock:
    def test_exact_boundary(self):
        clock = AnimationClock(build_schedule(1.18, [1.0]))
        clock, done = clock_step(clock, 1.0)
        assert done == [0]
        assert clock.phase == 0.0 and clock.exhausted

    def test_phase_rate(self):
        clock = AnimationClock(build_schedule(1.18, [2.0]))
        clock.step(0.5)
        assert clock.phase == pytest.approx(0.25)
        # equivalently dt * speed / baseline
        assert clock.phase == pytest.approx(0.5 * (1.18 / 2.0) / 1.18)

    def test_prefix_sums(self):
        _, times = run_clock(EXAMPLE, 0.01)
        for t, want in zip(times, np.cumsum(EXAMPLE)):
            assert abs(t - want) <= 0.01

    def test_multi_boundary_single_step(self):
        clock = AnimationClock(build_schedule(1.18, EXAMPLE))
        done = clock.step(10.0)
        assert done == [0, 1, 2]
        assert clock.exhausted
        assert clock.completion_times == pytest.approx(np.cumsum(EXAMPLE).tolist())

    def test_carryover(self):
        clock = AnimationClock(build_schedule(1.18, [1.0, 2.0]))
        assert clock.step(1.5) == [0]
        assert clock.phase == pytest.approx(0.25)
        assert clock.current_index == 1

    def test_exhausted_noop(self):
        clock = AnimationClock(build_schedule(1.18, [1.0]))
        clock.step(2.0)
        elapsed = clock.elapsed_s
        assert clock.step(1.0) == []
        assert clock.elapsed_s == elapsed
        assert clock.speed == 0.0

    @pytest.mark.parametrize("dt", [0.0, -0.1])
    def test_bad_dt(self, dt):
        with pytest.raises(ParameterError):
            AnimationClock(build_schedule(1.18, [1.0])).step(dt)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.floats(0.5, 2.5), min_size=1, max_size=20), st.floats(0.001, 1.0))
    def test_duration_conservation(self, targets, frac):
        dt = frac * min(targets)
        _, times = run_clock(targets, dt)
        assert np.all(np.abs(np.array(times) - np.cumsum(targets)) <= dt * (1 + 1e-9))

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(0.5, 2.5), min_size=1, max_size=15), st.floats(0.01, 0.5))
    def test_step_size_independence(self, targets, dt):
        _, coarse = run_clock(targets, dt)
        _, fine = run_clock(targets, dt / 10)
        assert np.all(np.abs(np.array(coarse) - np.array(fine)) <= dt * (1 + 1e-9))

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(0.5, 2.5), min_size=1, max_size=15), st.lists(st.floats(0.001, 3.0), min_size=1, max_size=200))
    def test_monotone_and_gapless(self, targets, steps):
        clock = AnimationClock(build_schedule(1.18, targets))
        seen, last_elapsed = [], 0.0
        for dt in steps:
            seen.extend(clock.step(dt))
            assert clock.elapsed_s >= last_elapsed
            last_elapsed = clock.elapsed_s
            assert clock.exhausted or 0.0 <= clock.phase < 1.0
        assert seen == list(range(len(seen)))

    def test_long_walk_no_drift(self):
        series = generate(NoiseParams("pink", 300, 1.15, 0.02, seed=3))
        _, times = run_clock(series.durations, 1 / 60)
        assert abs(times[-1] - series.durations.sum()) <= 1 / 60
