"""
收敛速率拟合
在 (log T, log 误差) 上做最小二乘，得到经验收敛阶
"""

import numpy as np

from utils.errors import DegenerateFit
from utils.logger import get_logger

logger = get_logger("harness")

MIN_FIT_POINTS = 4
SLOPE_TOLERANCE = 0.15


class RateFit:
    """
    对数-对数拟合结果

    Attributes:
        slope (float): 拟合斜率（收敛阶的相反数）
        intercept (float): 截距
        fit_window (tuple): 检查点区间 (lower, upper)
        r_squared (float): 决定系数，截断到 [0, 1]
        points (int): 参与拟合的点数
    """
    def __init__(self, slope, intercept, fit_window, r_squared, points):
        self.slope = float(slope)
        self.intercept = float(intercept)
        self.fit_window = (int(fit_window[0]), int(fit_window[1]))
        self.r_squared = float(r_squared)
        self.points = int(points)

    def within(self, expected, tolerance=SLOPE_TOLERANCE):
        return abs(self.slope - expected) <= tolerance

    def to_dict(self):
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "fit_window": list(self.fit_window),
            "r_squared": self.r_squared,
            "points": self.points,
        }

    def __repr__(self):
        return f"RateFit(slope={self.slope:.4f}, r2={self.r_squared:.4f}, window={self.fit_window})"


def tail_window(horizon, decades=2.0):
    """
    最后 decades 个数量级的区间
    """
    horizon = int(horizon)
    return max(1, int(round(horizon / 10.0 ** decades))), horizon


def fit_rate(curve, window=None):
    """
    最小二乘拟合 log(mean) = slope·log(T) + intercept

    Args:
        curve (ErrorCurve): 误差曲线
        window (tuple): (lower, upper)，缺省取最后两个数量级

    Returns:
        RateFit: 拟合结果

    Raises:
        DegenerateFit: 区间内点数不足或存在非正均值
    """
    if window is None:
        window = tail_window(curve.checkpoints[-1] if len(curve) else 1)
    part = curve.window(*window)
    if len(part) < MIN_FIT_POINTS:
        raise DegenerateFit(f"{len(part)} checkpoints in window {tuple(window)}, need {MIN_FIT_POINTS}")
    if np.any(part.mean <= 0.0) or not np.all(np.isfinite(part.mean)):
        raise DegenerateFit(f"non-positive mean error inside window {tuple(window)}")
    x = np.log(part.checkpoints.astype(float))
    y = np.log(part.mean)
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    total = np.sum((y - y.mean()) ** 2)
    r_squared = 1.0 if total == 0.0 else 1.0 - np.sum(residual ** 2) / total
    fit = RateFit(slope, intercept, window, min(max(r_squared, 0.0), 1.0), len(part))
    logger.debug(f"rate fit {fit}")
    return fit


def regime_check(fits, tolerance=SLOPE_TOLERANCE):
    """
    噪声衰减指数对收敛阶的影响：κ2 越小斜率越平

    Args:
        fits (dict): {κ2: RateFit}
        tolerance (float): 允许的斜率反序幅度

    Returns:
        dict: ordered（是否按 κ2 单调）、pairs（相邻比较明细）
    """
    keys = sorted(fits)
    pairs = []
    ordered = True
    for low, high in zip(keys, keys[1:]):
        # κ2 较小者斜率应不低于较大者
        ok = fits[low].slope + tolerance >= fits[high].slope
        if low < 0.5 <= high and not fits[low].slope > fits[high].slope:
            ok = False
        ordered = ordered and ok
        pairs.append({"kappa2_low": low, "kappa2_high": high, "slope_low": fits[low].slope,
                      "slope_high": fits[high].slope, "ok": bool(ok)})
    return {"ordered": bool(ordered), "pairs": pairs}
