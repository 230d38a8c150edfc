"""
Retiming a single baseline gait cycle to a sequence of target stride durations.

Each target duration ``T_i`` is played by running the baseline animation cycle
at ``speed_i = baseline / T_i``. `AnimationClock` steps through the resulting
schedule on a discrete clock; time left over when a cycle finishes carries into
the next cycle at that cycle's own rate, so completion times track the prefix
sums of the targets no matter the step size.
"""
import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .exceptions import DataError, ParameterError
from .noise import StrideSeries

__all__ = [
    "DEFAULT_BASELINE_S",
    "BaselineCycle",
    "ScheduleEntry",
    "PlaybackSchedule",
    "AnimationClock",
    "build_schedule",
    "clock_step",
    "schedule_total",
    "write_schedule_csv",
    "read_schedule_csv",
]

DEFAULT_BASELINE_S = 1.18

# relative slack for treating a step as landing exactly on a cycle boundary
_BOUNDARY_RTOL = 1e-12


@dataclass(frozen=True)
class BaselineCycle:
    duration_s: float = DEFAULT_BASELINE_S

    def __post_init__(self):
        d = float(self.duration_s)
        if not (np.isfinite(d) and d > 0):
            raise ParameterError(f"baseline duration must be positive, got {self.duration_s!r}")
        object.__setattr__(self, "duration_s", d)


class ScheduleEntry(NamedTuple):
    cycle_index: int
    target_duration_s: float
    speed_factor: float


@dataclass(frozen=True, eq=False)
class PlaybackSchedule:
    targets: np.ndarray
    speeds: np.ndarray
    baseline: BaselineCycle

    def __len__(self):
        return self.targets.size

    def __getitem__(self, i):
        return ScheduleEntry(int(range(len(self))[i]), float(self.targets[i]), float(self.speeds[i]))

    @property
    def entries(self):
        return [self[i] for i in range(len(self))]

    @property
    def total_s(self):
        return schedule_total(self)

    def to_csv(self, path=None):
        return write_schedule_csv(self, path)


def build_schedule(baseline, series):
    """Speed factor ``baseline / target`` for every stride in ``series``.

    ``baseline`` may be a `BaselineCycle` or a duration in seconds.

    >>> build_schedule(1.18, [1.18]).speeds.tolist()
    [1.0]
    """
    if not isinstance(baseline, BaselineCycle):
        baseline = BaselineCycle(baseline)
    targets = np.array(series.durations if isinstance(series, StrideSeries) else series, dtype=np.float64).ravel()
    if targets.size == 0:
        raise ParameterError("cannot build a schedule from an empty series")
    bad = np.flatnonzero(~np.isfinite(targets) | (targets <= 0))
    if bad.size:
        raise ParameterError(f"target duration at index {bad[0]} is not positive")
    speeds = baseline.duration_s / targets
    targets.setflags(write=False)
    speeds.setflags(write=False)
    return PlaybackSchedule(targets, speeds, baseline)


def schedule_total(schedule):
    return float(np.sum(schedule.targets))


class AnimationClock:
    """Plays a `PlaybackSchedule` on a discrete clock.

    ``phase`` is the fraction of the current cycle already played. Once the
    last cycle completes the clock is ``exhausted`` and further steps do
    nothing; looping or regenerating is up to the caller.

    Not safe for concurrent stepping.
    """

    def __init__(self, schedule):
        self.schedule = schedule
        self.current_index = 0
        self.phase = 0.0
        self.elapsed_s = 0.0
        self.exhausted = len(schedule) == 0
        self.completion_times = []

    @property
    def speed(self):
        """Playback-speed factor of the cycle being played (0 once exhausted)."""
        if self.exhausted:
            return 0.0
        return float(self.schedule.speeds[self.current_index])

    def step(self, dt):
        """Advance by ``dt`` seconds; returns the indices of cycles completed."""
        if not dt > 0:
            raise ParameterError(f"dt must be positive, got {dt!r}")
        if self.exhausted:
            return []
        targets = self.schedule.targets
        done = []
        remaining = float(dt)
        while remaining > 0 and not self.exhausted:
            target = targets[self.current_index]
            to_boundary = (1.0 - self.phase) * target
            if remaining >= to_boundary - _BOUNDARY_RTOL * target:
                remaining -= to_boundary
                done.append(self.current_index)
                self.completion_times.append(self.elapsed_s + (dt - max(remaining, 0.0)))
                self.current_index += 1
                self.phase = 0.0
                if self.current_index == targets.size:
                    self.exhausted = True
            else:
                self.phase += remaining / target
                remaining = 0.0
        self.elapsed_s += dt
        return done


def clock_step(clock, dt):
    """Functional form of `AnimationClock.step`: ``(clock, completed)``."""
    completed = clock.step(dt)
    return clock, completed


def write_schedule_csv(schedule, path=None):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["cycle", "target_s", "speed_factor"])
    for e in schedule.entries:
        w.writerow([e.cycle_index, repr(e.target_duration_s), repr(e.speed_factor)])
    if path is None:
        return buf.getvalue()
    Path(path).write_text(buf.getvalue())


def read_schedule_csv(path, baseline=DEFAULT_BASELINE_S):
    """Rebuild a schedule from its CSV; speeds are recomputed from the targets."""
    targets = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "target_s" not in reader.fieldnames:
            raise DataError("missing target_s column", path=path)
        for line, row in enumerate(reader, start=2):
            try:
                targets.append(float(row["target_s"]))
            except (TypeError, ValueError):
                raise DataError(f"bad target_s {row['target_s']!r}", line=line, path=path) from None
    return build_schedule(baseline, targets)
