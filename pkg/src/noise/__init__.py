"""
链路噪声模块
"""

from .decay import NoiseDecay, r
from .sampler import LinkNoiseSampler, empirical_moments, sample_link_block, sample_link_noise

__all__ = [
    'NoiseDecay',
    'r',
    'LinkNoiseSampler',
    'sample_link_noise',
    'sample_link_block',
    'empirical_moments',
]
