"""
运行上下文模块
一次试验所需的全部只读部件
"""

import numpy as np

from utils.errors import ValidationError

METHODS = ("dscmd_n", "dscda_n")
METHOD_VARIANT = {"dscmd_n": "problem1", "dscda_n": "problem2"}


class RunConfig:
    """
    单次运行的配置
    """
    def __init__(self, method, horizon_T, master_seed=0, trial=0, per_decade=40, cap=200,
                 track_min=True, init_override=None):
        if method not in METHODS:
            raise ValidationError(f"unknown method {method!r}", key="method", admissible=str(list(METHODS)))
        if int(horizon_T) < 0:
            raise ValidationError("horizon must be nonnegative", key="horizon_T", admissible=">= 0")
        self.method = method
        self.horizon_T = int(horizon_T)
        self.master_seed = int(master_seed)
        self.trial = int(trial)
        self.per_decade = int(per_decade)
        self.cap = int(cap)
        self.track_min = bool(track_min)
        self.init_override = init_override

    def to_dict(self):
        return {
            "method": self.method,
            "horizon_T": self.horizon_T,
            "master_seed": self.master_seed,
            "trial": self.trial,
            "checkpoints": {"per_decade": self.per_decade, "cap": self.cap, "spacing": "log"},
            "track_min": self.track_min,
        }


class RunContext:
    """
    运行上下文

    Attributes:
        config: RunConfig
        schedule: 拓扑序列
        decay: 噪声衰减 r_t
        sampler: 链路噪声采样器
        stepsize: 步长 α_t
        problem: 已求参考解的复合问题
        oracle: 随机次梯度预言机
        geometry: DSCMD-N 的 Φ 或 DSCDA-N 的 Ψ
        G_guard: 有界预言机的范数上界
    """
    def __init__(self, config, schedule, decay, sampler, stepsize, problem, oracle, geometry, G_guard=None):
        expected = METHOD_VARIANT[config.method]
        if problem.variant != expected:
            raise ValidationError(
                f"{config.method} runs on {expected}, got {problem.variant}",
                key="problem_variant", admissible=expected,
            )
        if problem.n_agents != schedule.N:
            raise ValidationError("schedule and problem disagree on the agent count", key="n_agents")
        if config.method == "dscmd_n" and geometry.L_phi == float("inf"):
            raise ValidationError("dscmd_n needs a mirror map with finite gradient Lipschitz constant",
                                  key="mirror_map", admissible="euclidean_half_sq_norm, neg_entropy")
        self.config = config
        self.schedule = schedule
        self.decay = decay
        self.sampler = sampler
        self.stepsize = stepsize
        self.problem = problem
        self.oracle = oracle
        self.geometry = geometry
        self.G_guard = G_guard

    @property
    def n_agents(self):
        return self.problem.n_agents

    @property
    def dim(self):
        return self.problem.dim


def query_sup_norm(method, cset, nu):
    """
    预言机查询点的范数上界：DSCMD-N 在带噪混合点 y_i 处查询，集合按 √ν 膨胀

    Args:
        method (str): dscmd_n / dscda_n
        cset (ConstraintSet): 约束集合
        nu (float): 实际生效的 ν

    Returns:
        float: sup ‖x‖
    """
    sup = cset.sup_norm
    if method == "dscmd_n":
        sup += float(np.sqrt(nu))
    return sup
