"""
混合常数模块
计算转移矩阵乘积 P(t,s) 以及几何收敛常数 (Θ, γ)
"""

import numpy as np

from network.topology import WeightMatrix, check_theta
from utils.errors import IndexOrder, InvalidAgentCount, InvalidWindow, NoisyOptError
from utils.logger import get_logger

logger = get_logger("network")


class MixingConstants:
    """
    混合常数

    |[P(t,s)]_ij - 1/N| <= Θ γ^{t-s}，其中
    Θ = (1 - θ/(4N²))^(-2)，γ = (1 - θ/(4N²))^(1/B)。
    """
    def __init__(self, theta_const, gamma):
        self.Theta = float(theta_const)
        self.gamma = float(gamma)

    def bound(self, t, s):
        """
        P(t,s) 与均匀矩阵的最大偏差上界
        """
        return self.Theta * self.gamma ** (t - s)

    def to_dict(self):
        return {"Theta": self.Theta, "gamma": self.gamma}

    def __repr__(self):
        return f"MixingConstants(Theta={self.Theta:.6g}, gamma={self.gamma:.6g})"


def mixing_constants(n_agents, theta, window_b):
    """
    计算混合常数

    Args:
        n_agents (int): N >= 2
        theta (float): θ ∈ (0, 1/N]
        window_b (int): B >= 1

    Returns:
        MixingConstants: (Θ, γ)
    """
    if int(n_agents) < 2:
        raise InvalidAgentCount("mixing constants need at least two agents", key="n_agents", admissible=">= 2")
    if int(window_b) < 1:
        raise InvalidWindow(f"window_B={window_b} is not a valid window", key="window_B", admissible=">= 1")
    check_theta(int(n_agents), float(theta))
    base = 1.0 - theta / (4.0 * n_agents ** 2)
    return MixingConstants(base ** -2, base ** (1.0 / window_b))


def transition_product(schedule, t, s):
    """
    有序乘积 P(t,s) = P^t P^{t-1} ... P^s

    Args:
        schedule (TopologySchedule): 拓扑序列
        t (int): 末轮
        s (int): 首轮，t = s-1 时返回单位阵

    Returns:
        WeightMatrix: 乘积矩阵
    """
    if t < s - 1:
        raise IndexOrder(f"transition product needs t >= s - 1, got t={t}, s={s}", key="t")
    n = schedule.N
    product = np.eye(n)
    for k in range(s, t + 1):
        product = schedule.weight_matrix_at(k).entries @ product
    tol = 1e-10 * max(1, t - s + 1)
    err = max(np.abs(product.sum(axis=1) - 1.0).max(), np.abs(product.sum(axis=0) - 1.0).max())
    if err > tol:
        raise NoisyOptError(f"P({t},{s}) lost double stochasticity: residual {err:.3e} > {tol:.1e}")
    product.setflags(write=False)
    return WeightMatrix(product, t)


def lemma1_violations(schedule, horizon=200, constants=None):
    """
    穷举 1 <= s <= t <= horizon 检查 |[P(t,s)]_ij - 1/N| <= Θγ^{t-s}

    对每个 s 递推累乘，总代价为 horizon² 次小矩阵乘法。

    Args:
        schedule (TopologySchedule): 拓扑序列
        horizon (int): 最大轮次
        constants (MixingConstants): 混合常数，缺省时按序列参数计算

    Returns:
        dict: 违例数、检查对数与最紧的偏差/上界比
    """
    if constants is None:
        constants = mixing_constants(schedule.N, schedule.theta, schedule.B)
    n = schedule.N
    mats = [schedule.weight_matrix_at(k).entries for k in range(horizon + 1)]
    violations = 0
    checked = 0
    worst_ratio = 0.0
    for s in range(1, horizon + 1):
        product = np.eye(n)
        for t in range(s, horizon + 1):
            product = mats[t] @ product
            deviation = np.abs(product - 1.0 / n).max()
            bound = constants.bound(t, s)
            checked += 1
            worst_ratio = max(worst_ratio, deviation / bound)
            if deviation > bound:
                violations += 1
    if violations:
        logger.warning(f"{violations} mixing-bound violations for {schedule!r}")
    return {
        "violations": violations,
        "pairs_checked": checked,
        "worst_ratio": float(worst_ratio),
        "Theta": constants.Theta,
        "gamma": constants.gamma,
    }
