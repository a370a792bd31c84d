"""
链路噪声测试：衰减序列与采样器
"""

import numpy as np
import pytest

from noise.decay import NoiseDecay, r
from noise.sampler import LinkNoiseSampler, empirical_moments, sample_link_block, sample_link_noise
from utils.errors import ValidationError


def test_decay_values():
    assert r(NoiseDecay(1.0), 9) == pytest.approx(0.1)
    assert NoiseDecay(0.5).r(3) == pytest.approx(0.5)
    assert NoiseDecay(0.75).r(0) == 1.0
    series = NoiseDecay(0.5).series(10)
    assert len(series) == 11
    assert np.all(np.diff(series) < 0)
    assert series[3] == pytest.approx(0.5)


@pytest.mark.parametrize("kappa2", [0.0, -0.1, 1.5])
def test_decay_rejects_exponent_out_of_range(kappa2):
    with pytest.raises(ValidationError) as info:
        NoiseDecay(kappa2)
    assert "(0, 1]" in str(info.value)


def test_zero_distribution_gives_zeros():
    sampler = LinkNoiseSampler(0.0, "zero", True, seed=1, n_agents=3)
    np.testing.assert_array_equal(sampler.sample_block(4, 2), np.zeros((3, 3, 2)))
    assert sampler.is_zero


@pytest.mark.parametrize("dist", ["uniform_ball", "truncated_gaussian"])
def test_draws_stay_in_second_moment_ball(dist):
    sampler = LinkNoiseSampler(4.0, dist, True, seed=5, n_agents=4)
    for t in range(20):
        block = sampler.sample_block(t, 2)
        assert block.shape == (4, 4, 2)
        assert np.linalg.norm(block, axis=-1).max() <= 2.0 + 1e-12


def test_biased_variant_shifts_mean_and_stays_bounded():
    sampler = LinkNoiseSampler(1.0, "uniform_ball", False, seed=2, n_agents=5)
    moments = empirical_moments(sampler, 20_000, 3)
    assert moments["max_norm"] <= 1.0 + 1e-12
    assert moments["mean"][0] == pytest.approx(0.5, abs=0.02)
    assert moments["mean_square"] <= 1.0


def test_zero_mean_moments():
    sampler = LinkNoiseSampler(0.25, "uniform_ball", True, seed=9, n_agents=5)
    moments = empirical_moments(sampler, 20_000, 2)
    assert moments["count"] >= 20_000
    np.testing.assert_allclose(moments["mean"], 0.0, atol=0.01)
    assert moments["mean_square"] <= 0.25


def test_single_link_matches_block():
    sampler = LinkNoiseSampler(0.5, "truncated_gaussian", True, seed=3, n_agents=4)
    block = sample_link_block(sampler, 6, 3)
    np.testing.assert_array_equal(sample_link_noise(sampler, 1, 2, 6, 3), block[1, 2])
    np.testing.assert_array_equal(sampler.sample_block(6, 3), block)
    assert not np.allclose(block[1, 2], block[2, 1])
    assert not np.allclose(sampler.sample_block(7, 3), block)


def test_sampler_rejects_bad_parameters():
    with pytest.raises(ValidationError):
        LinkNoiseSampler(0.1, "laplace", True, seed=0, n_agents=2)
    with pytest.raises(ValidationError):
        LinkNoiseSampler(0.0, "uniform_ball", True, seed=0, n_agents=2)
