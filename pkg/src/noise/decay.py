"""
噪声衰减模块
链路噪声幅度 r_t = 1/(t+1)^κ₂
"""

import numpy as np

from utils.errors import ValidationError


class NoiseDecay:
    """
    幂律衰减序列，r_0 = 1 且单调不增
    """
    def __init__(self, kappa2):
        """
        Args:
            kappa2 (float): 衰减指数 κ₂ ∈ (0, 1]
        """
        if not 0.0 < kappa2 <= 1.0:
            raise ValidationError(f"noise decay exponent {kappa2} out of range",
                                  key="noise_kappa2", admissible="(0, 1]")
        self.kappa2 = float(kappa2)

    def r(self, t):
        return 1.0 / (t + 1.0) ** self.kappa2

    def series(self, horizon):
        """
        一次性给出 r_0..r_horizon

        Returns:
            np.ndarray: 长度 horizon+1
        """
        return 1.0 / np.arange(1, horizon + 2, dtype=float) ** self.kappa2

    def to_dict(self):
        return {"noise_kappa2": self.kappa2}


def r(decay, t):
    """
    函数式入口：返回 1/(t+1)^κ₂
    """
    return decay.r(t)
