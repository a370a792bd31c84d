"""
通信拓扑模块
生成时变通信图与双随机权重矩阵序列
"""

from functools import lru_cache

import networkx as nx
import numpy as np

from utils.errors import InfeasibleTheta, InvalidAgentCount, InvalidWindow, NoisyOptError, ValidationError
from utils.logger import get_logger
from utils.rng import STREAM_TOPOLOGY, seeded_generator

logger = get_logger("network")

SINKHORN_MAX_SWEEPS = 200
SINKHORN_TOL = 1e-13
STOCHASTIC_TOL = 1e-12


class WeightMatrix:
    """
    某一轮的混合权重矩阵

    entries 为只读数组；同一 (schedule, t) 重复获取得到逐位相同的矩阵。
    """
    def __init__(self, entries, t):
        self.entries = entries
        self.t = t

    @property
    def n(self):
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __repr__(self):
        return f"WeightMatrix(t={self.t}, n={self.n})"


def ring_edges(n):
    """
    有向环 k -> k+1 的边按无向对列出（N=2 时只有一条）

    Returns:
        list: [(i, j), ...]，i < j
    """
    edges = []
    for k in range(n):
        pair = tuple(sorted((k, (k + 1) % n)))
        if pair not in edges:
            edges.append(pair)
    return edges


def adjacency_from_edges(n, edges):
    adj = np.zeros((n, n), dtype=bool)
    for i, j in edges:
        adj[i, j] = True
        adj[j, i] = True
    return adj


def sinkhorn_repair(weights, max_sweeps=SINKHORN_MAX_SWEEPS, tol=SINKHORN_TOL):
    """
    交替行、列归一化，把非负矩阵修复为双随机矩阵

    零元素保持为零，所以不会激活新的边。

    Args:
        weights (np.ndarray): 非负方阵
        max_sweeps (int): 最大轮数
        tol (float): 行和与列和的最大偏差容差

    Returns:
        tuple: (修复后的矩阵, 实际轮数)
    """
    w = np.array(weights, dtype=float)
    for sweep in range(max_sweeps):
        err = max(np.abs(w.sum(axis=1) - 1.0).max(), np.abs(w.sum(axis=0) - 1.0).max())
        if err <= tol:
            return w, sweep
        w /= w.sum(axis=1, keepdims=True)
        w /= w.sum(axis=0, keepdims=True)
    err = max(np.abs(w.sum(axis=1) - 1.0).max(), np.abs(w.sum(axis=0) - 1.0).max())
    if err > STOCHASTIC_TOL:
        raise NoisyOptError(f"Sinkhorn repair did not converge: residual {err:.3e}")
    logger.warning(f"Sinkhorn sweeps exhausted, residual {err:.3e} within tolerance")
    return w, max_sweeps


def metropolis_weights(adj, theta):
    """
    带下界的惰性 Metropolis 权重

    活跃边 (j, i) 取 max(θ, 1/(1+max(deg_i, deg_j)))，对角元补足行和，
    再用 Sinkhorn 修复到精确双随机。

    Args:
        adj (np.ndarray): 对称布尔邻接矩阵（不含自环）
        theta (float): 权重下界

    Returns:
        np.ndarray: 双随机权重矩阵
    """
    n = adj.shape[0]
    deg = adj.sum(axis=1)
    w = np.zeros((n, n))
    rows, cols = np.nonzero(adj)
    w[rows, cols] = np.maximum(theta, 1.0 / (1.0 + np.maximum(deg[rows], deg[cols])))
    w[np.diag_indices(n)] = 1.0 - w.sum(axis=1)
    w, _ = sinkhorn_repair(w)
    active = adj | np.eye(n, dtype=bool)
    if (w[active] < theta - STOCHASTIC_TOL).any():
        raise InfeasibleTheta("weight floor violated after repair", key="theta", admissible=f"(0, {1.0 / n}]")
    w[~active] = 0.0
    return w


@lru_cache(maxsize=512)
def _window_adjacency(n, window_b, kind, seed, edge_prob, s):
    """
    第 s 个窗口内 B 个时隙的邻接矩阵（纯函数，按参数缓存）

    Returns:
        tuple: 长度为 B 的只读布尔矩阵元组
    """
    if kind == "static_ring":
        adj = adjacency_from_edges(n, ring_edges(n))
        slots = [adj] * window_b
    elif kind == "periodic_partition":
        edges = ring_edges(n)
        slots = [
            adjacency_from_edges(n, [e for k, e in enumerate(edges) if k % window_b == b])
            for b in range(window_b)
        ]
    elif kind == "random_B_connected":
        rng = seeded_generator(seed, STREAM_TOPOLOGY, s)
        slots = []
        for _ in range(window_b):
            upper = np.triu(rng.random((n, n)) < edge_prob, k=1)
            slots.append(upper | upper.T)
        # 随机生成树保证窗口并图连通，树边随机分到各个时隙
        perm = rng.permutation(n)
        for k in range(1, n):
            parent = perm[rng.integers(0, k)]
            slot = rng.integers(0, window_b)
            slots[slot][perm[k], parent] = True
            slots[slot][parent, perm[k]] = True
    else:
        raise ValidationError(f"unknown topology kind {kind!r}", key="topology_kind")

    frozen = []
    for adj in slots:
        adj = np.array(adj, dtype=bool)
        adj[np.diag_indices(n)] = False
        adj.setflags(write=False)
        frozen.append(adj)
    return tuple(frozen)


@lru_cache(maxsize=512)
def _window_weights(n, window_b, theta, kind, seed, edge_prob, s):
    mats = []
    for adj in _window_adjacency(n, window_b, kind, seed, edge_prob, s):
        w = metropolis_weights(adj, theta)
        w.setflags(write=False)
        mats.append(w)
    return tuple(mats)


class TopologySchedule:
    """
    时变拓扑与权重矩阵序列

    构造后不可变；矩阵生成是 (N, B, θ, kind, seed) 的纯函数，可在并发试验间共享。
    """
    KINDS = ("static_ring", "periodic_partition", "random_B_connected")

    def __init__(self, n_agents, window_b, theta, generator_kind, seed, edge_prob=0.3):
        """
        初始化拓扑序列（参数检查见 generate_schedule）

        Args:
            n_agents (int): 智能体数 N
            window_b (int): 连通窗口长度 B
            theta (float): 权重下界 θ
            generator_kind (str): 生成器类型
            seed (int): 随机种子
            edge_prob (float): random_B_connected 每个时隙的随机边概率
        """
        self.N = int(n_agents)
        self.B = int(window_b)
        self.theta = float(theta)
        self.generator_kind = generator_kind
        self.seed = int(seed)
        self.edge_prob = float(edge_prob)

    def _window_index(self, s):
        # 只有随机生成器依赖窗口编号，其余类型所有窗口共用一份缓存
        return s if self.generator_kind == "random_B_connected" else 0

    def _key(self, s):
        return (self.N, self.B, self.theta, self.generator_kind, self.seed, self.edge_prob, self._window_index(s))

    def _adj_key(self, s):
        return (self.N, self.B, self.generator_kind, self.seed, self.edge_prob, self._window_index(s))

    def adjacency_at(self, t):
        """
        第 t 轮的活跃边（对称布尔矩阵，不含自环）
        """
        s, slot = divmod(int(t), self.B)
        return _window_adjacency(*self._adj_key(s))[slot]

    def weight_matrix_at(self, t):
        """
        第 t 轮的权重矩阵

        Args:
            t (int): 轮次，t >= 0

        Returns:
            WeightMatrix: 权重矩阵
        """
        s, slot = divmod(int(t), self.B)
        return WeightMatrix(_window_weights(*self._key(s))[slot], int(t))

    def window_union(self, s):
        """
        第 s 个窗口 [sB, (s+1)B-1] 的并图邻接矩阵
        """
        slots = _window_adjacency(*self._adj_key(s))
        union = np.zeros((self.N, self.N), dtype=bool)
        for adj in slots:
            union |= adj
        return union

    def to_dict(self):
        return {
            "n_agents": self.N,
            "window_B": self.B,
            "theta": self.theta,
            "topology_kind": self.generator_kind,
            "topology_seed": self.seed,
            "edge_prob": self.edge_prob,
        }

    def __repr__(self):
        return (f"TopologySchedule(N={self.N}, B={self.B}, theta={self.theta}, "
                f"kind={self.generator_kind}, seed={self.seed})")


class SingleAgentSchedule:
    """
    单智能体的退化序列，P^t = [1]
    """
    def __init__(self):
        self.N = 1
        self.B = 1
        self.theta = 1.0
        self.generator_kind = "single_agent"
        self.seed = 0
        self._one = np.ones((1, 1))
        self._one.setflags(write=False)

    def adjacency_at(self, t):
        return np.zeros((1, 1), dtype=bool)

    def weight_matrix_at(self, t):
        return WeightMatrix(self._one, int(t))

    def window_union(self, s):
        return np.zeros((1, 1), dtype=bool)

    def to_dict(self):
        return {"n_agents": 1, "window_B": 1, "theta": 1.0, "topology_kind": "single_agent", "topology_seed": 0}


def check_theta(n_agents, theta):
    if not theta > 0.0:
        raise InfeasibleTheta("theta must be positive", key="theta", admissible=f"(0, {1.0 / n_agents}]")
    if theta > 1.0 / n_agents + 1e-15:
        raise InfeasibleTheta(
            f"theta={theta} admits no doubly stochastic completion for N={n_agents}",
            key="theta",
            admissible=f"(0, {1.0 / n_agents}]",
        )


def generate_schedule(n_agents, window_b, theta, kind, seed, edge_prob=0.3):
    """
    生成满足连通与双随机要求的拓扑序列

    Args:
        n_agents (int): N >= 2
        window_b (int): B >= 1
        theta (float): 0 < θ <= 1/N
        kind (str): static_ring / periodic_partition / random_B_connected
        seed (int): 随机种子
        edge_prob (float): random_B_connected 的随机边概率

    Returns:
        TopologySchedule: 拓扑序列
    """
    if int(n_agents) < 2:
        raise InvalidAgentCount("a schedule needs at least two agents", key="n_agents", admissible=">= 2")
    if int(window_b) < 1:
        raise InvalidWindow(f"window_B={window_b} is not a valid window", key="window_B", admissible=">= 1")
    check_theta(int(n_agents), float(theta))
    if kind not in TopologySchedule.KINDS:
        raise ValidationError(f"unknown topology kind {kind!r}", key="topology_kind",
                              admissible=str(list(TopologySchedule.KINDS)))
    if not 0.0 <= edge_prob <= 1.0:
        raise ValidationError("edge probability out of range", key="edge_prob", admissible="[0, 1]")
    schedule = TopologySchedule(n_agents, window_b, theta, kind, seed, edge_prob)
    logger.debug(f"generated {schedule!r}")
    return schedule


def is_window_connected(schedule, s):
    """
    用 networkx 检查第 s 个窗口并图的强连通性
    """
    if schedule.N == 1:
        return True
    graph = nx.from_numpy_array(schedule.window_union(s).astype(int), create_using=nx.DiGraph)
    return nx.is_strongly_connected(graph)


def validate_schedule(schedule, windows=10):
    """
    复核拓扑序列的全部不变量

    Args:
        schedule (TopologySchedule): 拓扑序列
        windows (int): 检查的窗口数

    Returns:
        dict: 各项检查结果与最大偏差
    """
    n = schedule.N
    worst_stochastic = 0.0
    floor_ok = True
    inactive_zero = True
    for t in range(windows * schedule.B):
        w = schedule.weight_matrix_at(t).entries
        adj = schedule.adjacency_at(t)
        worst_stochastic = max(
            worst_stochastic,
            np.abs(w.sum(axis=1) - 1.0).max(),
            np.abs(w.sum(axis=0) - 1.0).max(),
        )
        active = adj | np.eye(n, dtype=bool)
        floor_ok &= bool((w[active] >= schedule.theta - STOCHASTIC_TOL).all())
        inactive_zero &= bool((w[~active] == 0.0).all())
    connected = all(is_window_connected(schedule, s) for s in range(windows))
    report = {
        "doubly_stochastic": worst_stochastic <= STOCHASTIC_TOL,
        "max_stochastic_error": float(worst_stochastic),
        "floor_respected": floor_ok,
        "inactive_exact_zero": inactive_zero,
        "windows_strongly_connected": connected,
        "windows_checked": windows,
    }
    report["ok"] = all(report[k] for k in ("doubly_stochastic", "floor_respected",
                                              "inactive_exact_zero", "windows_strongly_connected"))
    return report


def weight_matrix_at(schedule, t):
    """
    按轮次取权重矩阵（函数式入口）
    """
    return schedule.weight_matrix_at(t)
