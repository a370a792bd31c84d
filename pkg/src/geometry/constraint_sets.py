"""
约束集合模块
盒子、欧氏球与概率单纯形：成员判断、欧氏投影、直径与采样
"""

import numpy as np

from utils.errors import ValidationError

MEMBERSHIP_TOL = 1e-8


def project_simplex(v, total=1.0):
    """
    投影到 {x >= 0, Σx = total}，按排序求阈值，沿最后一维向量化

    Args:
        v (np.ndarray): 形状 (..., dim)
        total (float): 坐标和

    Returns:
        np.ndarray: 投影结果
    """
    v = np.asarray(v, dtype=float)
    dim = v.shape[-1]
    u = -np.sort(-v, axis=-1)
    css = np.cumsum(u, axis=-1) - total
    ind = np.arange(1, dim + 1)
    cond = u - css / ind > 0
    rho = dim - 1 - np.argmax(cond[..., ::-1], axis=-1)
    tau = np.take_along_axis(css, rho[..., None], axis=-1) / (rho[..., None] + 1.0)
    return np.maximum(v - tau, 0.0)


def project_l1_ball(v, radius=1.0):
    """
    投影到 ℓ1 球，借助单纯形投影
    """
    v = np.asarray(v, dtype=float)
    inside = np.sum(np.abs(v), axis=-1, keepdims=True) <= radius
    proj = np.sign(v) * project_simplex(np.abs(v), radius)
    return np.where(inside, v, proj)


class ConstraintSet:
    """
    约束集合基类
    """
    kind = None

    def __init__(self, dim):
        if int(dim) < 1:
            raise ValidationError("dimension must be positive", key="dim", admissible=">= 1")
        self.dim = int(dim)

    def contains(self, x, tol=MEMBERSHIP_TOL):
        raise NotImplementedError

    def project(self, v):
        raise NotImplementedError

    def center(self):
        raise NotImplementedError

    def sample(self, rng, n):
        raise NotImplementedError

    @property
    def diameter(self):
        raise NotImplementedError

    @property
    def sup_norm(self):
        """sup_{x∈𝒳} ‖x‖"""
        raise NotImplementedError

    def coordinate_bounds(self):
        """
        每个坐标的取值范围 (lower, upper)
        """
        raise NotImplementedError

    def bregman_diameter_sq(self, mirror_map):
        """
        D²_{Φ,𝒳} = sup_{x,y∈𝒳} D_Φ(x, y)
        """
        if mirror_map.kind == "euclidean_half_sq_norm":
            return 0.5 * self.diameter ** 2
        raise ValidationError(
            f"{mirror_map.kind} is not supported on a {self.kind} set", key="mirror_map"
        )

    def working_set(self, mirror_map):
        """
        镜像步的实际可行域（负熵时为带下界的内部）
        """
        return self

    def to_dict(self):
        return {"set_kind": self.kind, "dim": self.dim}


class Box(ConstraintSet):
    """
    盒子 [lower, upper]^dim，上下界可为标量或逐坐标数组
    """
    kind = "box"

    def __init__(self, dim, lower=-1.0, upper=1.0):
        super().__init__(dim)
        self.lower = np.broadcast_to(np.asarray(lower, dtype=float), (self.dim,)).copy()
        self.upper = np.broadcast_to(np.asarray(upper, dtype=float), (self.dim,)).copy()
        if np.any(self.lower >= self.upper):
            raise ValidationError("box needs lower < upper", key="set_params", admissible="lower < upper")

    def contains(self, x, tol=MEMBERSHIP_TOL):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def project(self, v):
        return np.clip(v, self.lower, self.upper)

    def center(self):
        return 0.5 * (self.lower + self.upper)

    def sample(self, rng, n):
        return self.lower + (self.upper - self.lower) * rng.random((n, self.dim))

    @property
    def diameter(self):
        return float(np.linalg.norm(self.upper - self.lower))

    @property
    def sup_norm(self):
        return float(np.linalg.norm(np.maximum(np.abs(self.lower), np.abs(self.upper))))

    def coordinate_bounds(self):
        return self.lower, self.upper

    def to_dict(self):
        data = super().to_dict()
        data["set_params"] = {"lower": self.lower.tolist(), "upper": self.upper.tolist()}
        return data


class EuclideanBall(ConstraintSet):
    """
    以原点为中心的欧氏球
    """
    kind = "euclidean_ball"

    def __init__(self, dim, radius=1.0):
        super().__init__(dim)
        if not radius > 0:
            raise ValidationError("ball radius must be positive", key="set_params", admissible="radius > 0")
        self.radius = float(radius)

    def contains(self, x, tol=MEMBERSHIP_TOL):
        return bool(np.all(np.linalg.norm(np.asarray(x, dtype=float), axis=-1) <= self.radius + tol))

    def project(self, v):
        v = np.asarray(v, dtype=float)
        norms = np.linalg.norm(v, axis=-1, keepdims=True)
        return np.where(norms > self.radius, v * (self.radius / np.maximum(norms, 1e-300)), v)

    def center(self):
        return np.zeros(self.dim)

    def sample(self, rng, n):
        direction = rng.standard_normal((n, self.dim))
        direction /= np.maximum(np.linalg.norm(direction, axis=1, keepdims=True), 1e-300)
        return direction * (self.radius * rng.random((n, 1)) ** (1.0 / self.dim))

    @property
    def diameter(self):
        return 2.0 * self.radius

    @property
    def sup_norm(self):
        return self.radius

    def coordinate_bounds(self):
        r = np.full(self.dim, self.radius)
        return -r, r

    def to_dict(self):
        data = super().to_dict()
        data["set_params"] = {"radius": self.radius}
        return data


class Simplex(ConstraintSet):
    """
    概率单纯形 {x >= floor, Σx = 1}，floor = 0 时即标准单纯形
    """
    kind = "simplex"

    def __init__(self, dim, floor=0.0):
        super().__init__(dim)
        if self.dim < 2:
            raise ValidationError("simplex needs at least two coordinates", key="dim", admissible=">= 2")
        if floor < 0 or floor * self.dim >= 1.0:
            raise ValidationError("simplex floor too large", key="entropy_floor", admissible=f"[0, {1.0 / self.dim})")
        self.floor = float(floor)

    def contains(self, x, tol=MEMBERSHIP_TOL):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.floor - tol) and np.all(np.abs(x.sum(axis=-1) - 1.0) <= tol))

    def project(self, v):
        v = np.asarray(v, dtype=float)
        if self.floor == 0.0:
            return project_simplex(v)
        return self.floor + project_simplex(v - self.floor, 1.0 - self.dim * self.floor)

    def center(self):
        return np.full(self.dim, 1.0 / self.dim)

    def sample(self, rng, n):
        pts = rng.dirichlet(np.ones(self.dim), size=n)
        return self.floor + (1.0 - self.dim * self.floor) * pts

    @property
    def diameter(self):
        return float(np.sqrt(2.0))

    @property
    def sup_norm(self):
        return 1.0

    def coordinate_bounds(self):
        return np.full(self.dim, self.floor), np.ones(self.dim)

    def bregman_diameter_sq(self, mirror_map):
        if mirror_map.kind == "neg_entropy":
            # x 取顶点、y 在对应坐标取到下界时达到上确界
            return float(np.log(1.0 / mirror_map.floor))
        return super().bregman_diameter_sq(mirror_map)

    def working_set(self, mirror_map):
        if mirror_map.kind == "neg_entropy" and self.floor < mirror_map.floor:
            return Simplex(self.dim, mirror_map.floor)
        return self


SET_KINDS = ("box", "euclidean_ball", "simplex")


def make_constraint_set(kind, dim, params=None):
    """
    按配置创建约束集合

    Args:
        kind (str): box / euclidean_ball / simplex
        dim (int): 维数
        params (dict): box 取 lower/upper，euclidean_ball 取 radius

    Returns:
        ConstraintSet: 约束集合
    """
    params = dict(params or {})
    if kind == "box":
        return Box(dim, params.get("lower", -1.0), params.get("upper", 1.0))
    if kind == "euclidean_ball":
        return EuclideanBall(dim, params.get("radius", 1.0))
    if kind == "simplex":
        return Simplex(dim)
    raise ValidationError(f"unknown set kind {kind!r}", key="set_kind", admissible=str(list(SET_KINDS)))
