"""
链路噪声采样模块
每条链路 (i, j) 每轮一份有界噪声 ξ_ij^t，由 (seed, i, j, t) 唯一确定
"""

import numpy as np

from utils.errors import ValidationError
from utils.logger import get_logger
from utils.rng import STREAM_LINK_NOISE, counter_generator, philox_key

logger = get_logger("noise")

TRUNCATION_CAP = 100
# 截断高斯每次为所有链路同时抽取的候选数
TRUNCATION_BATCH = 4


def _project_to_ball(v, radius):
    norms = np.linalg.norm(v, axis=-1, keepdims=True)
    scale = np.where(norms > radius, radius / np.maximum(norms, 1e-300), 1.0)
    return v * scale


class LinkNoiseSampler:
    """
    链路噪声采样器

    一轮的全部 N×N 个链路噪声按固定布局一次生成：计数器随机流由 (seed, t) 定位，
    链路 (i, j) 取布局中的第 (i, j) 个位置，所以单条链路的调用与整块调用给出同一个值。
    """
    DISTS = ("uniform_ball", "truncated_gaussian", "zero")

    def __init__(self, nu, dist, zero_mean, seed, n_agents):
        """
        初始化采样器

        Args:
            nu (float): 二阶矩上界 ν
            dist (str): uniform_ball / truncated_gaussian / zero
            zero_mean (bool): 是否零均值；否则使用有界的偏置变体
            seed (int): 随机种子
            n_agents (int): 智能体数，决定一轮噪声块的布局
        """
        if dist not in self.DISTS:
            raise ValidationError(f"unknown noise distribution {dist!r}", key="noise_dist",
                                  admissible=str(list(self.DISTS)))
        if dist != "zero" and not nu > 0.0:
            raise ValidationError("noise second-moment bound must be positive", key="noise_nu", admissible="(0, inf)")
        self.nu = float(nu)
        self.dist = dist
        self.zero_mean = bool(zero_mean)
        self.seed = int(seed)
        self.n_agents = int(n_agents)
        self._key = philox_key(self.seed)

    @property
    def radius(self):
        return float(np.sqrt(self.nu))

    @property
    def is_zero(self):
        return self.dist == "zero" or self.nu == 0.0

    def _ball_draw(self, gen, shape, dim, radius):
        direction = gen.standard_normal(shape + (dim,))
        norms = np.linalg.norm(direction, axis=-1, keepdims=True)
        direction = np.where(norms > 0, direction / np.maximum(norms, 1e-300), 0.0)
        u = gen.random(shape + (1,))
        return direction * (radius * u ** (1.0 / dim))

    def _truncated_draw(self, gen, shape, dim, radius):
        out = np.zeros(shape + (dim,))
        pending = np.ones(shape, dtype=bool)
        last = None
        drawn = 0
        while drawn < TRUNCATION_CAP and pending.any():
            batch = gen.standard_normal((TRUNCATION_BATCH,) + shape + (dim,))
            for k in range(TRUNCATION_BATCH):
                cand = batch[k]
                inside = np.linalg.norm(cand, axis=-1) <= radius
                take = pending & inside
                out[take] = cand[take]
                pending &= ~take
                last = cand
            drawn += TRUNCATION_BATCH
        if pending.any():
            # 超过重采样上限的链路把最后一个候选投影回球内
            out[pending] = _project_to_ball(last[pending], radius)
        return out

    def sample_block(self, t, dim):
        """
        生成第 t 轮全部链路的噪声

        Args:
            t (int): 轮次
            dim (int): 向量维数

        Returns:
            np.ndarray: 形状 (N, N, dim)，[i, j] 为链路 j -> i 上 i 收到的噪声
        """
        n = self.n_agents
        shape = (n, n)
        if self.is_zero:
            return np.zeros(shape + (dim,))
        gen = counter_generator(self._key, STREAM_LINK_NOISE, t)
        if self.zero_mean:
            radius = self.radius
        else:
            radius = 0.5 * self.radius
        if self.dist == "uniform_ball":
            block = self._ball_draw(gen, shape, dim, radius)
        else:
            block = self._truncated_draw(gen, shape, dim, radius)
        if not self.zero_mean:
            # 偏置变体：半径 √ν/2 的球沿第一坐标平移 √ν/2，仍落在 √ν 球内
            block[..., 0] += 0.5 * self.radius
        return block

    def to_dict(self):
        return {
            "noise_nu": self.nu,
            "noise_dist": self.dist,
            "noise_zero_mean": self.zero_mean,
            "noise_seed": self.seed,
        }


def sample_link_block(sampler, t, dim):
    return sampler.sample_block(t, dim)


def sample_link_noise(sampler, i, j, t, dim):
    """
    单条链路的噪声（与整块生成中的对应位置逐位一致）

    Args:
        sampler (LinkNoiseSampler): 采样器
        i (int): 接收方
        j (int): 发送方
        t (int): 轮次
        dim (int): 维数

    Returns:
        np.ndarray: 长度 dim 的向量
    """
    if not (0 <= i < sampler.n_agents and 0 <= j < sampler.n_agents):
        raise ValidationError(f"link ({i}, {j}) outside 0..{sampler.n_agents - 1}", key="link")
    return sampler.sample_block(t, dim)[i, j].copy()


def empirical_moments(sampler, draws, dim):
    """
    统计至少 draws 个链路噪声样本的一、二阶矩

    Args:
        sampler (LinkNoiseSampler): 采样器
        draws (int): 样本数下限
        dim (int): 维数

    Returns:
        dict: mean（分量均值）、mean_square、sq_norm_std、mean_std（分量标准差）、count
    """
    per_round = sampler.n_agents ** 2
    rounds = int(np.ceil(draws / per_round))
    samples = np.concatenate(
        [sampler.sample_block(t, dim).reshape(per_round, dim) for t in range(rounds)], axis=0
    )
    sq_norms = np.sum(samples ** 2, axis=1)
    return {
        "count": int(samples.shape[0]),
        "mean": samples.mean(axis=0),
        "mean_std": samples.std(axis=0),
        "mean_square": float(sq_norms.mean()),
        "sq_norm_std": float(sq_norms.std()),
        "max_norm": float(np.sqrt(sq_norms.max())),
    }
