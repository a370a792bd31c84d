"""
正则项模块
局部正则 χ_i 与全局正则 η：取值、次梯度、近端映射与次梯度范数上界
"""

import numpy as np
from scipy.special import wrightomega, xlogy

from geometry.constraint_sets import project_l1_ball
from utils.errors import DomainViolation, ValidationError

REGULARIZER_KINDS = ("zero", "l1", "half_l2_sq", "linf", "entropy", "mixed_l1_l2")


def soft_threshold(v, level):
    """
    软阈值 sign(v)·max(|v| - level, 0)
    """
    return np.sign(v) * np.maximum(np.abs(v) - level, 0.0)


class Regularizer:
    """
    凸正则项

    l1 = λ₁‖x‖₁，half_l2_sq = (λ₂/2)‖x‖²，linf = λ₁‖x‖∞，
    entropy = λ₁Σx ln x（只在非负象限有定义），mixed_l1_l2 = λ₁‖x‖₁ + (λ₂/2)‖x‖²。
    """
    def __init__(self, kind="zero", lambda1=0.0, lambda2=0.0, floor=1e-12):
        """
        Args:
            kind (str): 正则类型
            lambda1 (float): ℓ1 / ℓ∞ / 熵的权重
            lambda2 (float): 二次项权重
            floor (float): 熵正则次梯度上界所用的坐标下界
        """
        if kind not in REGULARIZER_KINDS:
            raise ValidationError(f"unknown regularizer {kind!r}", key="regularizer",
                                  admissible=str(list(REGULARIZER_KINDS)))
        if lambda1 < 0 or lambda2 < 0:
            raise ValidationError("regularizer weights must be nonnegative", key="lambda1", admissible="[0, inf)")
        self.kind = kind
        self.lambda1 = float(lambda1)
        self.lambda2 = float(lambda2)
        self.floor = float(floor)

    @property
    def is_zero(self):
        if self.kind == "zero":
            return True
        if self.kind in ("half_l2_sq",):
            return self.lambda2 == 0.0
        if self.kind == "mixed_l1_l2":
            return self.lambda1 == 0.0 and self.lambda2 == 0.0
        return self.lambda1 == 0.0

    @property
    def is_separable(self):
        return self.kind != "linf"

    @property
    def is_radial_compatible(self):
        """
        球约束下 prox 再径向缩放是否精确（范数型与二次型成立）
        """
        return self.kind in ("zero", "l1", "half_l2_sq", "linf", "mixed_l1_l2")

    def value(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "zero":
            return np.zeros(x.shape[:-1]) if x.ndim > 1 else 0.0
        if self.kind == "l1":
            return self.lambda1 * np.sum(np.abs(x), axis=-1)
        if self.kind == "half_l2_sq":
            return 0.5 * self.lambda2 * np.sum(x ** 2, axis=-1)
        if self.kind == "linf":
            return self.lambda1 * np.max(np.abs(x), axis=-1)
        if self.kind == "entropy":
            if np.any(x < 0):
                raise DomainViolation("entropy regularizer needs nonnegative coordinates")
            return self.lambda1 * np.sum(xlogy(x, x), axis=-1)
        return self.lambda1 * np.sum(np.abs(x), axis=-1) + 0.5 * self.lambda2 * np.sum(x ** 2, axis=-1)

    def __call__(self, x):
        return self.value(x)

    def subgradient(self, x):
        """
        返回 ∂χ(x) 中的一个元素（扭结处取 0 号方向）
        """
        x = np.asarray(x, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(x)
        if self.kind == "l1":
            return self.lambda1 * np.sign(x)
        if self.kind == "half_l2_sq":
            return self.lambda2 * x
        if self.kind == "linf":
            g = np.zeros_like(x)
            idx = np.argmax(np.abs(x), axis=-1)
            picked = np.take_along_axis(x, idx[..., None], axis=-1)
            np.put_along_axis(g, idx[..., None], self.lambda1 * np.sign(picked), axis=-1)
            return g
        if self.kind == "entropy":
            return self.lambda1 * (1.0 + np.log(np.maximum(x, self.floor)))
        return self.lambda1 * np.sign(x) + self.lambda2 * x

    def prox(self, v, step):
        """
        近端映射 argmin_x {step·χ(x) + ½‖x - v‖²}

        Args:
            v (np.ndarray): 形状 (..., dim)
            step (float): 步长 τ >= 0

        Returns:
            np.ndarray: 近端点
        """
        v = np.asarray(v, dtype=float)
        if self.kind == "zero" or step == 0.0:
            return v.copy()
        if self.kind == "l1":
            return soft_threshold(v, step * self.lambda1)
        if self.kind == "half_l2_sq":
            return v / (1.0 + step * self.lambda2)
        if self.kind == "linf":
            tau = step * self.lambda1
            if tau == 0.0:
                return v.copy()
            # Moreau 分解：ℓ∞ 的对偶球是 ℓ1 球
            return v - tau * project_l1_ball(v / tau, 1.0)
        if self.kind == "entropy":
            tau = step * self.lambda1
            if tau == 0.0:
                return v.copy()
            # x + τ ln x = v - τ 的解写成 Wright omega 函数
            return tau * np.real(wrightomega(v / tau - 1.0 - np.log(tau)))
        return soft_threshold(v, step * self.lambda1) / (1.0 + step * self.lambda2)

    def G_chi(self, cset):
        """
        在集合上的次梯度范数上界

        Args:
            cset (ConstraintSet): 约束集合

        Returns:
            float: G_χ
        """
        d = cset.dim
        if self.kind == "zero":
            return 0.0
        if self.kind == "l1":
            return self.lambda1 * np.sqrt(d)
        if self.kind == "half_l2_sq":
            return self.lambda2 * cset.sup_norm
        if self.kind == "linf":
            return self.lambda1
        if self.kind == "entropy":
            lower, upper = cset.coordinate_bounds()
            if np.any(lower < 0):
                raise ValidationError("entropy regularizer needs a set in the nonnegative orthant",
                                      key="set_kind", admissible="simplex or nonnegative box")
            lo = np.maximum(lower, self.floor)
            worst = np.maximum(np.abs(1.0 + np.log(lo)), np.abs(1.0 + np.log(np.maximum(upper, self.floor))))
            return float(self.lambda1 * np.linalg.norm(worst))
        return self.lambda1 * np.sqrt(d) + self.lambda2 * cset.sup_norm

    def to_dict(self):
        return {"kind": self.kind, "lambda1": self.lambda1, "lambda2": self.lambda2}

    def __repr__(self):
        return f"Regularizer({self.kind}, lambda1={self.lambda1}, lambda2={self.lambda2})"


def make_regularizer(kind, lambda1=0.0, lambda2=0.0, floor=1e-12):
    return Regularizer(kind, lambda1, lambda2, floor)
