"""
Head-tracked walking companion.

The avatar spawns ``follow_distance`` metres ahead of the user along their
heading and keeps that slot as the user walks and turns. Its placement is
smoothed in the user's frame: the user's own displacement is applied rigidly,
and only the error between the avatar's offset and the desired offset decays
with time constant ``smoothing_tau``. A stationary user therefore leaves the
avatar exactly where it is, and straight walking at any speed settles at the
full follow distance with no lag.

User speed, walked distance and turn rate are estimated from successive head
poses with an exponential filter. The smoothed speed drives an Idle/Walking
state machine with hysteresis (``speed_on`` > ``speed_off``).

Geometry is planar: ``x``, ``y`` in metres, heading in radians measured from
the +x axis and normalized to (-pi, pi].
"""
import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

from .exceptions import DataError, ParameterError

__all__ = [
    "Mode",
    "Pose",
    "UserKinematics",
    "CompanionConfig",
    "CompanionState",
    "TraceRow",
    "wrap_angle",
    "bearing_offset",
    "spawn",
    "estimate_kinematics",
    "update",
    "replay",
    "straight_walk",
    "turn_walk",
    "read_pose_csv",
    "write_pose_csv",
    "write_trace_csv",
]

TWO_PI = 2.0 * math.pi


def wrap_angle(a):
    """Wrap an angle to (-pi, pi]."""
    w = math.remainder(a, TWO_PI)
    return math.pi if w == -math.pi else w


class Mode(str, enum.Enum):
    IDLE = "idle"
    WALKING = "walking"


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    heading: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "heading", wrap_angle(float(self.heading)))


@dataclass(frozen=True)
class UserKinematics:
    speed: float = 0.0
    distance: float = 0.0
    heading_rate: float = 0.0


@dataclass(frozen=True)
class CompanionConfig:
    follow_distance: float = 2.0
    fov_half_angle: float = math.radians(26.0)
    speed_on: float = 0.2
    speed_off: float = 0.1
    smoothing_tau: float = 0.3

    def __post_init__(self):
        if not self.follow_distance > 0:
            raise ParameterError(f"follow_distance must be positive, got {self.follow_distance!r}")
        if not 0 < self.speed_off < self.speed_on:
            raise ParameterError(f"need 0 < speed_off < speed_on, got {self.speed_off!r}, {self.speed_on!r}")
        if not 0 < self.fov_half_angle < math.pi / 2:
            raise ParameterError(f"fov_half_angle must lie in (0, pi/2), got {self.fov_half_angle!r}")
        if not self.smoothing_tau > 0:
            raise ParameterError(f"smoothing_tau must be positive, got {self.smoothing_tau!r}")


@dataclass(frozen=True)
class CompanionState:
    """Avatar pose, locomotion mode and the user estimate it was derived from.

    ``user_pose`` is the last head pose seen; the next `update` differences
    against it.
    """

    avatar_pose: Pose
    mode: Mode
    kinematics: UserKinematics
    user_pose: Pose

    @property
    def bearing_offset(self):
        return bearing_offset(self.user_pose, self.avatar_pose)

    @property
    def separation(self):
        return math.hypot(self.avatar_pose.x - self.user_pose.x, self.avatar_pose.y - self.user_pose.y)


def bearing_offset(user, avatar):
    """Angle between the user's heading and the direction from user to avatar."""
    dx, dy = avatar.x - user.x, avatar.y - user.y
    if dx == 0.0 and dy == 0.0:
        return 0.0
    return wrap_angle(math.atan2(dy, dx) - user.heading)


def _slot(user, cfg):
    return (
        user.x + cfg.follow_distance * math.cos(user.heading),
        user.y + cfg.follow_distance * math.sin(user.heading),
    )


def _gain(dt, tau):
    return 1.0 - math.exp(-dt / tau)


def spawn(user_pose, cfg=CompanionConfig()):
    x, y = _slot(user_pose, cfg)
    return CompanionState(Pose(x, y, user_pose.heading), Mode.IDLE, UserKinematics(), user_pose)


def estimate_kinematics(previous, current, dt, state, cfg=CompanionConfig()):
    if not dt > 0:
        raise ParameterError(f"dt must be positive, got {dt!r}")
    step = math.hypot(current.x - previous.x, current.y - previous.y)
    turn = wrap_angle(current.heading - previous.heading)
    g = _gain(dt, cfg.smoothing_tau)
    return UserKinematics(
        speed=state.speed + g * (step / dt - state.speed),
        distance=state.distance + step,
        heading_rate=state.heading_rate + g * (turn / dt - state.heading_rate),
    )


def _next_mode(mode, speed, cfg):
    if mode is Mode.IDLE and speed > cfg.speed_on:
        return Mode.WALKING
    if mode is Mode.WALKING and speed < cfg.speed_off:
        return Mode.IDLE
    return mode


def update(state, user_pose, dt, cfg=CompanionConfig()):
    """Advance the companion by one head-pose sample taken ``dt`` after the last."""
    kin = estimate_kinematics(state.user_pose, user_pose, dt, state.kinematics, cfg)
    prev = state.user_pose
    # carry the avatar rigidly with the user, then relax toward the slot
    ax = state.avatar_pose.x + (user_pose.x - prev.x)
    ay = state.avatar_pose.y + (user_pose.y - prev.y)
    sx, sy = _slot(user_pose, cfg)
    g = _gain(dt, cfg.smoothing_tau)
    ex, ey = sx - ax, sy - ay
    if ex or ey:
        ax += g * ex
        ay += g * ey
    dh = wrap_angle(user_pose.heading - state.avatar_pose.heading)
    heading = state.avatar_pose.heading + g * dh if dh else state.avatar_pose.heading
    return CompanionState(
        avatar_pose=Pose(ax, ay, heading),
        mode=_next_mode(state.mode, kin.speed, cfg),
        kinematics=kin,
        user_pose=user_pose,
    )


class TraceRow(NamedTuple):
    t_s: float
    mode: Mode
    avatar_x: float
    avatar_y: float
    bearing_offset_rad: float
    user_speed_mps: float


def _trace(t, state):
    return TraceRow(
        t,
        state.mode,
        state.avatar_pose.x,
        state.avatar_pose.y,
        state.bearing_offset,
        state.kinematics.speed,
    )


def replay(poses, cfg=CompanionConfig(), clock=None):
    """Run the companion over a timestamped head-pose stream.

    Parameters
    ----------
    poses : iterable of (t_s, Pose)
        Strictly increasing timestamps. The avatar spawns at the first pose.
    cfg : CompanionConfig
    clock : AnimationClock, optional
        Stepped by each interval during which the companion is Walking, so the
        retimed gait animation only plays while the user walks.

    Returns
    -------
    trace : list of TraceRow
    final : CompanionState
    """
    it = iter(poses)
    try:
        t_prev, first = next(it)
    except StopIteration:
        raise DataError("pose stream is empty") from None
    state = spawn(first, cfg)
    trace = [_trace(t_prev, state)]
    for t, pose in it:
        dt = t - t_prev
        if not dt > 0:
            raise DataError(f"timestamps must increase strictly (t={t} after {t_prev})")
        state = update(state, pose, dt, cfg)
        if clock is not None and state.mode is Mode.WALKING:
            clock.step(dt)
        trace.append(_trace(t, state))
        t_prev = t
    return trace, state


def straight_walk(speed, duration, rate=60.0, heading=0.0, start=(0.0, 0.0)):
    """Timestamped poses for a constant-speed straight walk."""
    n = int(round(duration * rate))
    c, s = math.cos(heading), math.sin(heading)
    return [(i / rate, Pose(start[0] + speed * c * i / rate, start[1] + speed * s * i / rate, heading)) for i in range(n + 1)]


def turn_walk(speed, duration, turn_at, turn_by=math.pi / 2, rate=60.0):
    """Straight walk along +x that turns instantly by ``turn_by`` at ``turn_at`` seconds."""
    out = []
    x = y = 0.0
    n = int(round(duration * rate))
    for i in range(n + 1):
        t = i / rate
        heading = 0.0 if t < turn_at else turn_by
        if i:
            x += speed * math.cos(heading) / rate
            y += speed * math.sin(heading) / rate
        out.append((t, Pose(x, y, heading)))
    return out


def read_pose_csv(path):
    """Load ``t_s,x_m,y_m,heading_rad`` rows as ``(t, Pose)`` pairs."""
    out = []
    path = Path(path)
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DataError(f"cannot read poses: {exc.strerror}", path=path) from exc
    with fh:
        reader = csv.DictReader(fh)
        need = ["t_s", "x_m", "y_m", "heading_rad"]
        if reader.fieldnames is None or any(k not in reader.fieldnames for k in need):
            raise DataError(f"pose CSV needs header {','.join(need)}", line=1, path=path)
        for line, row in enumerate(reader, start=2):
            try:
                t, x, y, h = (float(row[k]) for k in need)
            except (TypeError, ValueError):
                raise DataError(f"cannot parse pose row {row!r}", line=line, path=path) from None
            out.append((t, Pose(x, y, h)))
    return out


def write_pose_csv(poses, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t_s", "x_m", "y_m", "heading_rad"])
        for t, p in poses:
            w.writerow([repr(t), repr(p.x), repr(p.y), repr(p.heading)])


def write_trace_csv(trace, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TraceRow._fields)
        for r in trace:
            w.writerow([repr(r.t_s), r.mode.value, repr(r.avatar_x), repr(r.avatar_y), repr(r.bearing_offset_rad), repr(r.user_speed_mps)])
