import math

import numpy as np
import pytest

from stridecue.analysis import dfa_alpha
from stridecue.exceptions import ParameterError
from stridecue.noise import NoiseParams, generate, generate_iso
from stridecue.sync_sim import FollowerModel, simulate_follow

LEVELS = [0.0, 0.25, 0.5, 0.75, 1.0]


def test_full_coupling_is_bitwise_cue():
    cue = generate(NoiseParams("pink", 1000, 1.15, 0.02, seed=1))
    f = simulate_follow(cue, FollowerModel(1.0, seed=5))
    assert f.durations.tobytes() == cue.durations.tobytes()


def test_deterministic_and_length():
    cue = generate(NoiseParams("pink", 777, 1.15, 0.02, seed=1))
    a = simulate_follow(cue, FollowerModel(0.4, seed=5))
    b = simulate_follow(cue, FollowerModel(0.4, seed=5))
    assert len(a) == 777
    assert a.durations.tobytes() == b.durations.tobytes()


def test_zero_coupling_ignores_cue():
    m = FollowerModel(0.0, seed=3)
    a = simulate_follow(generate(NoiseParams("pink", 500, 1.15, 0.02, seed=1)), m)
    b = simulate_follow(generate_iso(500, 0.9), m)
    assert np.array_equal(a.durations, b.durations)


def test_zero_coupling_uncorrelated():
    cue = generate(NoiseParams("pink", 20000, 1.15, 0.02, seed=2)).durations
    f = simulate_follow(cue, FollowerModel(0.0, seed=7)).durations
    r = np.corrcoef(cue, f)[0, 1]
    assert abs(r) < 4 / math.sqrt(cue.size)


def test_mixing_formula():
    from stridecue.noise import make_rng, standard_normals

    cue = generate(NoiseParams("white", 100, 1.15, 0.02, seed=2)).durations
    z = standard_normals(make_rng(11), 100)
    want = 0.7 * (1.2 + 0.03 * z) + 0.3 * cue
    got = simulate_follow(cue, FollowerModel(0.3, 1.2, 0.03, 11)).durations
    assert np.allclose(got, want, rtol=1e-15)


@pytest.mark.parametrize("c", [0.0, 0.3, 0.8])
def test_mean_convexity(c):
    n = 5000
    cue = generate(NoiseParams("pink", n, 1.3, 0.02, seed=4)).durations
    f = simulate_follow(cue, FollowerModel(c, 1.1, 0.02, 9)).durations
    sigma_eff = math.hypot((1 - c) * 0.02, c * 0.02)
    assert abs(f.mean() - ((1 - c) * 1.1 + c * cue.mean())) < 4 * sigma_eff / math.sqrt(n)


def test_uncoupled_is_white(pink_batch):
    alphas = [dfa_alpha(simulate_follow(cue, FollowerModel(0.0, seed=s))) for s, cue in enumerate(pink_batch)]
    assert 0.4 <= np.mean(alphas) <= 0.6


def test_monotone_entrainment(pink_batch):
    means = []
    for c in LEVELS:
        means.append(np.mean([dfa_alpha(simulate_follow(cue, FollowerModel(c, seed=100 + s))) for s, cue in enumerate(pink_batch)]))
    for lo, hi in zip(means, means[1:]):
        assert hi >= lo - 0.05
    a2 = np.mean([dfa_alpha(simulate_follow(cue, FollowerModel(0.2, seed=s))) for s, cue in enumerate(pink_batch)])
    a8 = np.mean([dfa_alpha(simulate_follow(cue, FollowerModel(0.8, seed=s))) for s, cue in enumerate(pink_batch)])
    assert 0.4 < a2 < a8 < 1.1


@pytest.mark.parametrize(
    "kwargs",
    [{"coupling": -0.1}, {"coupling": 1.1}, {"coupling": 0.5, "intrinsic_mu": 0.0}, {"coupling": 0.5, "intrinsic_sigma": -1.0}],
)
def test_model_validation(kwargs):
    with pytest.raises(ParameterError):
        FollowerModel(**kwargs)


def test_empty_cue():
    with pytest.raises(ParameterError):
        simulate_follow([], FollowerModel(0.5))
