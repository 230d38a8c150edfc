"""
Synthetic follower for closing the generate -> cue -> entrain -> analyze loop.

The follower's stride ``i`` is a linear mix of its own white-noise gait and
the cue stride::

    follower_i = (1 - c) * (intrinsic_mu + intrinsic_sigma * z_i) + c * cue_i

With ``c = 0`` it ignores the cue, with ``c = 1`` it reproduces it exactly,
and in between its DFA exponent moves from ~0.5 toward the cue's. This is a
minimal synthetic stand-in for a participant, not a gait model.
"""
from dataclasses import dataclass

import numpy as np

from .exceptions import ParameterError
from .noise import RNG_ALGORITHM, StrideSeries, make_rng, standard_normals

__all__ = ["FollowerModel", "simulate_follow"]


@dataclass(frozen=True)
class FollowerModel:
    coupling: float
    intrinsic_mu: float = 1.15
    intrinsic_sigma: float = 0.02
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.coupling <= 1.0:
            raise ParameterError(f"coupling must lie in [0, 1], got {self.coupling!r}")
        if not self.intrinsic_mu > 0:
            raise ParameterError(f"intrinsic_mu must be positive, got {self.intrinsic_mu!r}")
        if not self.intrinsic_sigma >= 0:
            raise ParameterError(f"intrinsic_sigma must be non-negative, got {self.intrinsic_sigma!r}")
        if not 0 <= self.seed < 2 ** 64:
            raise ParameterError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")


def simulate_follow(cue, model):
    """Follower stride series of the same length as ``cue``."""
    cue_d = cue.durations if isinstance(cue, StrideSeries) else np.asarray(cue, dtype=np.float64)
    if cue_d.size == 0:
        raise ParameterError("cue series is empty")
    c = float(model.coupling)
    z = standard_normals(make_rng(model.seed), cue_d.size)
    own = model.intrinsic_mu + model.intrinsic_sigma * z
    follower = (1.0 - c) * own + c * cue_d
    return StrideSeries(follower, rng_algorithm=RNG_ALGORITHM, source=f"follower(c={c:g})")
