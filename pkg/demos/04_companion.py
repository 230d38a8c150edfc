"""
Walking companion
=================

Replay a synthetic head-pose stream: stand, walk, turn left, stop.
"""

# %%
import math

from stridecue.companion import CompanionConfig, Mode, Pose, replay, turn_walk, write_trace_csv
from stridecue.noise import NoiseParams, generate
from stridecue.retime import AnimationClock, build_schedule

cfg = CompanionConfig()
poses = [(i / 60, Pose(0.0, 0.0, 0.0)) for i in range(60)]
walk = turn_walk(1.0, 8.0, turn_at=4.0)
poses += [(1.0 + t, Pose(p.x, p.y, p.heading)) for t, p in walk[1:]]
t_end, last = poses[-1]
poses += [(t_end + i / 60, last) for i in range(1, 120)]

# %%
# The gait animation only advances while the avatar is walking.
cue = generate(NoiseParams("pink", 200, 1.15, 0.02, seed=1))
clock = AnimationClock(build_schedule(1.18, cue))
trace, final = replay(poses, cfg, clock)

for r in trace[::60]:
    print(f"t={r.t_s:5.2f}  {r.mode.value:<7}  bearing={math.degrees(r.bearing_offset_rad):+6.1f} deg  speed={r.user_speed_mps:.2f}")
print("cycles played:", clock.current_index, "animation time:", round(clock.elapsed_s, 2))

# %%
walking = [r.t_s for r in trace if r.mode is Mode.WALKING]
print(f"walking from {walking[0]:.2f} s to {walking[-1]:.2f} s")
write_trace_csv(trace, "companion_trace.csv")
