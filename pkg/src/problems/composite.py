"""
复合问题模块
问题 (1)：F(x) = Σ[f_i(x) + χ_i(x)]；问题 (2)：F(x) = (1/N)Σf_i(x) + η(x)
"""

import numpy as np

from geometry.regularizers import Regularizer
from problems.objectives import ObjectiveStack
from utils.errors import ValidationError

VARIANTS = ("problem1", "problem2")


class CompositeProblem:
    """
    复合优化问题实例

    构造后不可变；f_star / x_star 由 solve_reference 填入。
    """
    def __init__(self, variant, objectives, cset, regularizers=None, eta=None, metadata=None):
        """
        Args:
            variant (str): problem1 / problem2
            objectives (list): N 个 LocalObjective
            cset (ConstraintSet): 约束集合
            regularizers (list): 问题 (1) 的 N 个局部正则
            eta (Regularizer): 问题 (2) 的全局正则
            metadata (dict): 数据来源等记录
        """
        if variant not in VARIANTS:
            raise ValidationError(f"unknown problem variant {variant!r}", key="problem_variant",
                                  admissible=str(list(VARIANTS)))
        self.variant = variant
        self.objectives = list(objectives)
        self.stack = ObjectiveStack(self.objectives)
        self.cset = cset
        if variant == "problem1":
            regs = list(regularizers) if regularizers is not None else [Regularizer("zero")] * len(self.objectives)
            if len(regs) != len(self.objectives):
                raise ValidationError("problem1 needs one local regularizer per agent", key="regularizer_local")
            self.regularizers = regs
            self.eta = None
        else:
            self.regularizers = None
            self.eta = eta if eta is not None else Regularizer("zero")
        self.metadata = dict(metadata or {})
        self.f_star = None
        self.x_star = None
        self.certificate = None
        for obj in self.objectives:
            if obj.dim is not None and obj.dim != cset.dim:
                raise ValidationError("objective dimension does not match the constraint set", key="dim")

    @property
    def n_agents(self):
        return len(self.objectives)

    @property
    def dim(self):
        return self.cset.dim

    def regularizer_of(self, agent):
        if self.variant == "problem1":
            return self.regularizers[agent]
        return self.eta

    def regularizer_value(self, x):
        if self.variant == "problem1":
            return sum(reg.value(x) for reg in self.regularizers)
        return self.eta.value(x)

    def evaluate_F(self, x):
        """
        复合目标的精确值

        Args:
            x (np.ndarray): 形状 (dim,) 或 (k, dim)

        Returns:
            float | np.ndarray: F(x)
        """
        x = np.asarray(x, dtype=float)
        f_vals = self.stack.values_at(x)
        if self.variant == "problem1":
            return np.sum(f_vals, axis=0) + self.regularizer_value(x)
        return np.mean(f_vals, axis=0) + self.eta.value(x)

    def subgradient_F(self, x):
        """
        F 的一个次梯度，x 形状 (dim,) 或 (k, dim)
        """
        x = np.asarray(x, dtype=float)
        g = sum(obj.subgradient(x) for obj in self.objectives)
        if self.variant == "problem1":
            return g + sum(reg.subgradient(x) for reg in self.regularizers)
        return g / self.n_agents + self.eta.subgradient(x)

    def G_f(self, sup_norm=None):
        """
        max_i G_{f_i}，sup_norm 缺省为集合本身的 sup‖x‖
        """
        if sup_norm is None:
            sup_norm = self.cset.sup_norm
        return max(obj.G_f(sup_norm) for obj in self.objectives)

    def G_chi(self):
        if self.variant == "problem1":
            return max(reg.G_chi(self.cset) for reg in self.regularizers)
        return 0.0

    def G_eta(self):
        if self.variant == "problem2":
            return self.eta.G_chi(self.cset)
        return 0.0

    def dist_to_solution(self, x):
        """
        到参考极小点的距离，作为 dist(x, 𝒳*) 的可计算替代
        """
        if self.x_star is None:
            raise ValidationError("reference solution not available", key="x_star")
        return np.linalg.norm(np.asarray(x, dtype=float) - self.x_star, axis=-1)

    def to_dict(self):
        data = {
            "problem_variant": self.variant,
            "n_agents": self.n_agents,
            "dim": self.dim,
            "objective_kinds": sorted({obj.kind for obj in self.objectives}),
            "set": self.cset.to_dict(),
            "f_star": self.f_star,
            "x_star": None if self.x_star is None else self.x_star.tolist(),
            "certificate": self.certificate,
        }
        if self.variant == "problem1":
            data["regularizer_local"] = self.regularizers[0].to_dict()
        else:
            data["regularizer_global"] = self.eta.to_dict()
        data.update(self.metadata)
        return data


def evaluate_F(problem, x):
    return problem.evaluate_F(x)


def dist_to_solution(problem, x):
    return problem.dist_to_solution(x)
