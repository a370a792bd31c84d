"""
智能体状态模块
全部智能体的状态按 (N, dim) 数组整体保存，单个智能体通过视图访问
"""

import numpy as np

from utils.errors import ValidationError


class AgentState:
    """
    单个智能体的只读视图
    """
    def __init__(self, network_state, index):
        self._state = network_state
        self.index = index

    @property
    def x(self):
        return self._state.X[self.index]

    @property
    def z(self):
        return None if self._state.Z is None else self._state.Z[self.index]

    @property
    def x_hat_sum(self):
        return self._state.x_hat_sum[self.index]

    @property
    def t(self):
        return self._state.t

    @property
    def x_hat(self):
        return self._state.x_hat[self.index]


class NetworkState:
    """
    同步网络状态

    Attributes:
        X: 原始迭代 x_i^t，形状 (N, dim)
        Z: 对偶累积量 z_i^t（只有对偶平均使用）
        x_hat_sum: Σ_{s=1}^t x_i^s
        t: 公共时钟
        diagnostics: 最近一步的中间量（混合点、步长范数等）
    """
    def __init__(self, X, Z=None, x_hat_sum=None, t=0, diagnostics=None):
        self.X = X
        self.Z = Z
        self.x_hat_sum = np.zeros_like(X) if x_hat_sum is None else x_hat_sum
        self.t = int(t)
        self.diagnostics = diagnostics or {}

    @property
    def n_agents(self):
        return self.X.shape[0]

    @property
    def x_hat(self):
        """
        运行平均 x̂^t = (1/t)Σ_{s=1}^t x^s；t = 0 时返回初始点
        """
        if self.t == 0:
            return self.X.copy()
        return self.x_hat_sum / self.t

    def advance(self, X_new, Z_new=None, diagnostics=None):
        """
        返回下一轮的新状态，旧状态不变
        """
        return NetworkState(X_new, Z_new, self.x_hat_sum + X_new, self.t + 1, diagnostics)

    def agents(self):
        return [AgentState(self, i) for i in range(self.n_agents)]


def initial_state(cset, n_agents, with_dual=False, init_override=None):
    """
    构造初始状态：默认所有智能体取集合中心，z_i^0 = 0

    Args:
        cset (ConstraintSet): 约束集合
        n_agents (int): 智能体数
        with_dual (bool): 是否带对偶变量
        init_override (list): 单个初始点或逐智能体初始点

    Returns:
        NetworkState: 初始状态
    """
    if init_override is None:
        X = np.tile(cset.center(), (n_agents, 1))
    else:
        arr = np.asarray(init_override, dtype=float)
        if arr.ndim == 1:
            arr = np.tile(arr, (n_agents, 1))
        if arr.shape != (n_agents, cset.dim):
            raise ValidationError(f"init_override has shape {arr.shape}", key="init_override",
                                  admissible=f"({cset.dim},) or ({n_agents}, {cset.dim})")
        if not cset.contains(arr):
            raise ValidationError("initial points must lie in the constraint set", key="init_override")
        X = arr.copy()
    Z = np.zeros_like(X) if with_dual else None
    return NetworkState(X, Z)
