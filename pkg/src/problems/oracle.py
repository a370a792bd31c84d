"""
随机次梯度预言机模块
在精确次梯度上叠加零均值扰动，扰动由 (seed, t) 定位、按智能体取行
"""

import numpy as np

from utils.errors import ValidationError
from utils.rng import STREAM_ORACLE, counter_generator, philox_key


class StochasticSubgradientOracle:
    """
    随机次梯度预言机

    高斯模式：g̃ = g + σξ，ξ ~ N(0, I)，E‖g̃‖² <= G² + dim·σ²。
    有界模式：扰动在半径 σ√dim 的球内均匀分布，‖g̃‖ <= G + σ√dim 处处成立，
    并对超过上界的输出做范数截断。
    """
    def __init__(self, sigma=0.0, bounded=False, seed=0, n_agents=1):
        if sigma < 0:
            raise ValidationError("gradient noise scale must be nonnegative", key="grad_noise_sigma",
                                  admissible="[0, inf)")
        self.sigma = float(sigma)
        self.bounded = bool(bounded)
        self.seed = int(seed)
        self.n_agents = int(n_agents)
        self._key = philox_key(self.seed)

    def perturbation_block(self, t, dim):
        """
        第 t 轮所有智能体的扰动，形状 (N, dim)
        """
        n = self.n_agents
        if self.sigma == 0.0:
            return np.zeros((n, dim))
        gen = counter_generator(self._key, STREAM_ORACLE, t)
        if not self.bounded:
            return self.sigma * gen.standard_normal((n, dim))
        direction = gen.standard_normal((n, dim))
        direction /= np.maximum(np.linalg.norm(direction, axis=1, keepdims=True), 1e-300)
        radius = self.sigma * np.sqrt(dim) * gen.random((n, 1)) ** (1.0 / dim)
        return direction * radius

    def adjusted_G(self, G, dim):
        """
        把扰动计入后的次梯度上界
        """
        if self.bounded:
            return float(G + self.sigma * np.sqrt(dim))
        return float(np.sqrt(G ** 2 + dim * self.sigma ** 2))

    def sample(self, exact, t, G_guard=None):
        """
        给一组精确次梯度叠加第 t 轮扰动

        Args:
            exact (np.ndarray): 形状 (N, dim) 的精确次梯度
            t (int): 轮次
            G_guard (float): 有界模式下的范数上界

        Returns:
            np.ndarray: 随机次梯度
        """
        exact = np.asarray(exact, dtype=float)
        noisy = exact + self.perturbation_block(t, exact.shape[-1])
        if self.bounded and G_guard is not None:
            norms = np.linalg.norm(noisy, axis=-1, keepdims=True)
            noisy = np.where(norms > G_guard, noisy * (G_guard / np.maximum(norms, 1e-300)), noisy)
        return noisy

    def to_dict(self):
        return {"grad_noise_sigma": self.sigma, "grad_bounded": self.bounded, "oracle_seed": self.seed}


def subgradient(objective, x):
    return objective.subgradient(x)


def stochastic_subgradient(oracle, objective, x, t, agent=0, G_guard=None):
    """
    单个智能体在第 t 轮的随机次梯度（与整轮批量调用中的对应行一致）

    Args:
        oracle (StochasticSubgradientOracle): 预言机
        objective (LocalObjective): 局部目标
        x (np.ndarray): 查询点
        t (int): 轮次
        agent (int): 智能体编号
        G_guard (float): 有界模式下的范数上界

    Returns:
        np.ndarray: g(x) + 扰动
    """
    x = np.asarray(x, dtype=float)
    g = objective.subgradient(x)
    noisy = g + oracle.perturbation_block(t, x.shape[-1])[agent]
    if oracle.bounded and G_guard is not None:
        norm = np.linalg.norm(noisy)
        if norm > G_guard:
            noisy = noisy * (G_guard / norm)
    return noisy
