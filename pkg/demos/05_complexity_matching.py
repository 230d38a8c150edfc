"""
Complexity matching with a synthetic follower
=============================================

A follower that mixes its own white gait with a pink cue inherits more of the
cue's long-range correlation as the coupling grows.
"""

# %%
import numpy as np

from stridecue.analysis import dfa_alpha
from stridecue.noise import NoiseParams, generate
from stridecue.sync_sim import FollowerModel, simulate_follow

cues = [generate(NoiseParams("pink", 5000, 1.15, 0.02, seed)) for seed in range(10)]
print("cue alpha:", round(np.mean([dfa_alpha(c) for c in cues]), 3))
for c in (0.0, 0.25, 0.5, 0.75, 1.0):
    a = np.mean([dfa_alpha(simulate_follow(cue, FollowerModel(c, seed=100 + i))) for i, cue in enumerate(cues)])
    print(f"coupling {c:.2f}: follower alpha {a:.3f}")
