"""
步长模块
α_t = 1/(t+1)^κ₁
"""

import numpy as np

from utils.errors import ValidationError


class StepsizeSchedule:
    """
    幂律步长，α_0 = 1 且单调不增
    """
    def __init__(self, kappa1):
        if not 0.0 < kappa1 < 1.0:
            raise ValidationError(f"stepsize exponent {kappa1} out of range", key="kappa1", admissible="(0, 1)")
        self.kappa1 = float(kappa1)

    def alpha(self, t):
        return 1.0 / (t + 1.0) ** self.kappa1

    def series(self, horizon):
        """
        α_0..α_horizon
        """
        return 1.0 / np.arange(1, horizon + 2, dtype=float) ** self.kappa1

    def to_dict(self):
        return {"kappa1": self.kappa1}


def alpha(schedule, t):
    return schedule.alpha(t)
