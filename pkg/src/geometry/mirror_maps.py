"""
镜像映射模块
距离生成函数 Φ、其梯度与 Bregman 散度，全部沿最后一维向量化
"""

import numpy as np
from scipy.special import xlogy

from utils.errors import DomainViolation, ValidationError

DEFAULT_ENTROPY_FLOOR = 1e-12


class MirrorMap:
    """
    镜像映射基类

    子类给出 value / grad / grad_conj（∇Φ 的逆），以及
    强凸模 sigma_phi 与工作域上的梯度 Lipschitz 常数 L_phi。
    """
    kind = None
    sigma_phi = 1.0
    L_phi = 1.0

    def check_domain(self, x, strict=False):
        return np.asarray(x, dtype=float)

    def in_domain(self, x):
        return bool(np.all(np.isfinite(x)))

    def value(self, x):
        raise NotImplementedError

    def grad(self, x):
        raise NotImplementedError

    def grad_conj(self, v):
        raise NotImplementedError

    def bregman(self, x, y):
        """
        D_Φ(x, y) = Φ(x) - Φ(y) - <∇Φ(y), x - y>

        Args:
            x (np.ndarray): 形状 (..., dim)
            y (np.ndarray): 形状 (..., dim)

        Returns:
            float | np.ndarray: 散度，按最后一维求和
        """
        x = self.check_domain(x)
        y = self.check_domain(y, strict=True)
        d = self.value(x) - self.value(y) - np.sum(self.grad(y) * (x - y), axis=-1)
        return np.maximum(d, 0.0)

    def strong_convexity_gap(self, x, y):
        """
        Φ(x) - Φ(y) - <∇Φ(y), x-y> - (σ/2)‖x-y‖²，强凸时非负
        """
        diff = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
        return self.bregman(x, y) - 0.5 * self.sigma_phi * np.sum(diff ** 2, axis=-1)

    def to_dict(self):
        return {"kind": self.kind, "sigma_phi": self.sigma_phi, "L_phi": self.L_phi}

    def __repr__(self):
        return f"{type(self).__name__}(sigma={self.sigma_phi}, L={self.L_phi})"


class EuclideanMap(MirrorMap):
    """
    Φ(x) = ½‖x‖²，镜像下降退化为投影次梯度
    """
    kind = "euclidean_half_sq_norm"

    def value(self, x):
        return 0.5 * np.sum(np.asarray(x, dtype=float) ** 2, axis=-1)

    def grad(self, x):
        return np.asarray(x, dtype=float)

    def grad_conj(self, v):
        return np.asarray(v, dtype=float)

    def bregman(self, x, y):
        diff = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
        return 0.5 * np.sum(diff ** 2, axis=-1)


class NegEntropyMap(MirrorMap):
    """
    负熵 Φ(x) = Σ x_k ln x_k

    在单纯形上对 ‖·‖₂ 是 1-强凸的。∇Φ 在边界无界，所以工作域取坐标下界为 floor 的内部，
    L_Φ = 1/floor。
    """
    kind = "neg_entropy"

    def __init__(self, floor=DEFAULT_ENTROPY_FLOOR):
        if not 0.0 < floor < 1.0:
            raise ValidationError("entropy floor out of range", key="entropy_floor", admissible="(0, 1)")
        self.floor = float(floor)
        self.sigma_phi = 1.0
        self.L_phi = 1.0 / self.floor

    def check_domain(self, x, strict=False):
        x = np.asarray(x, dtype=float)
        bad = (x <= 0.0) if strict else (x < 0.0)
        if np.any(bad):
            raise DomainViolation(
                f"neg_entropy needs {'strictly positive' if strict else 'nonnegative'} coordinates, "
                f"min coordinate {x.min():.3e}"
            )
        return x

    def in_domain(self, x):
        return bool(np.all(np.asarray(x) > 0.0))

    def clamp(self, x):
        return np.maximum(np.asarray(x, dtype=float), self.floor)

    def value(self, x):
        return np.sum(xlogy(x, x), axis=-1)

    def grad(self, x):
        return 1.0 + np.log(x)

    def grad_conj(self, v):
        return np.exp(np.asarray(v, dtype=float) - 1.0)

    def bregman(self, x, y):
        x = self.check_domain(x)
        y = self.check_domain(y, strict=True)
        # 广义 KL，x 为零的坐标按 0·ln0 = 0 处理
        d = np.sum(xlogy(x, x) - xlogy(x, y) - x + y, axis=-1)
        return np.maximum(d, 0.0)

    def to_dict(self):
        data = super().to_dict()
        data["floor"] = self.floor
        return data


class PNormSqMap(MirrorMap):
    """
    Φ(x) = ½‖x‖_p²，p ∈ (1, 2]

    σ_Φ = p - 1；梯度在原点附近只是 Hölder 连续，L_Φ 记为无穷，
    因此只能作为对偶平均的近端函数 Ψ 使用。
    """
    kind = "p_norm_sq"

    def __init__(self, p=1.5):
        if not 1.0 < p <= 2.0:
            raise ValidationError("p-norm exponent out of range", key="p_norm", admissible="(1, 2]")
        self.p = float(p)
        self.q = self.p / (self.p - 1.0)
        self.sigma_phi = self.p - 1.0
        self.L_phi = float("inf")

    def value(self, x):
        return 0.5 * np.linalg.norm(np.asarray(x, dtype=float), ord=self.p, axis=-1) ** 2

    @staticmethod
    def _dual_grad(x, p):
        norm = np.linalg.norm(x, ord=p, axis=-1, keepdims=True)
        safe = np.where(norm > 0, norm, 1.0)
        g = np.sign(x) * np.abs(x) ** (p - 1.0) * safe ** (2.0 - p)
        return np.where(norm > 0, g, 0.0)

    def grad(self, x):
        return self._dual_grad(np.asarray(x, dtype=float), self.p)

    def grad_conj(self, v):
        # (½‖·‖_p²)* = ½‖·‖_q²
        return self._dual_grad(np.asarray(v, dtype=float), self.q)

    def to_dict(self):
        data = super().to_dict()
        data["p"] = self.p
        return data


MAP_KINDS = ("euclidean_half_sq_norm", "neg_entropy", "p_norm_sq")


def make_mirror_map(kind, entropy_floor=DEFAULT_ENTROPY_FLOOR, p_norm=1.5):
    """
    按名称创建镜像映射

    Args:
        kind (str): euclidean_half_sq_norm / neg_entropy / p_norm_sq
        entropy_floor (float): 负熵工作域的坐标下界
        p_norm (float): p_norm_sq 的指数

    Returns:
        MirrorMap: 镜像映射
    """
    if kind in ("euclidean_half_sq_norm", "euclidean"):
        return EuclideanMap()
    if kind == "neg_entropy":
        return NegEntropyMap(entropy_floor)
    if kind == "p_norm_sq":
        return PNormSqMap(p_norm)
    raise ValidationError(f"unknown mirror map {kind!r}", key="mirror_map", admissible=str(list(MAP_KINDS)))


def bregman(mirror_map, x, y):
    return mirror_map.bregman(x, y)


def separate_convexity_check(mirror_map, a, bs, weights, tol=1e-10):
    """
    检查 D_Φ(a, Σν_k b_k) <= Σν_k D_Φ(a, b_k)

    Args:
        mirror_map (MirrorMap): 镜像映射
        a (np.ndarray): 第一参数
        bs (list): 点 b_k 的列表
        weights (list): 凸组合权重

    Returns:
        bool: 是否成立（容差 tol）
    """
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise ValidationError("separate convexity check needs convex weights", key="weights")
    pts = np.asarray(bs, dtype=float)
    mixed = np.tensordot(w, pts, axes=1)
    lhs = mirror_map.bregman(a, mixed)
    rhs = float(np.dot(w, mirror_map.bregman(np.broadcast_to(a, pts.shape), pts)))
    return bool(lhs <= rhs + tol)
