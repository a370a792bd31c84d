"""
局部目标模块
各智能体的凸（可能非光滑）局部目标 f_i 及其次梯度
"""

import numpy as np

from utils.errors import ValidationError

OBJECTIVE_KINDS = ("l1_regression", "least_abs_dev", "hinge", "quadratic", "linear", "zero")


class LocalObjective:
    """
    局部目标

    l1_regression: ‖Ax - b‖₁
    least_abs_dev: (1/m)‖Ax - b‖₁
    hinge: Σ max(0, 1 - b_k<a_k, x>)，b 为 ±1 标签
    quadratic: ½‖Ax - b‖²
    linear: <c, x>
    zero: 0
    """
    def __init__(self, kind, A=None, b=None, c=None):
        """
        Args:
            kind (str): 目标类型
            A (np.ndarray): 数据矩阵 (m, dim)
            b (np.ndarray): 观测或标签 (m,)
            c (np.ndarray): 线性目标的系数 (dim,)
        """
        if kind not in OBJECTIVE_KINDS:
            raise ValidationError(f"unknown objective {kind!r}", key="objective_kind",
                                  admissible=str(list(OBJECTIVE_KINDS)))
        self.kind = kind
        self.A = None if A is None else np.atleast_2d(np.asarray(A, dtype=float))
        self.b = None if b is None else np.atleast_1d(np.asarray(b, dtype=float))
        self.c = None if c is None else np.atleast_1d(np.asarray(c, dtype=float))
        if kind in ("l1_regression", "least_abs_dev", "hinge", "quadratic"):
            if self.A is None or self.b is None or self.A.shape[0] != self.b.shape[0]:
                raise ValidationError(f"{kind} needs data A (m, dim) and b (m,)", key="objective_kind")
        if kind == "linear" and self.c is None:
            raise ValidationError("linear objective needs coefficients c", key="objective_kind")

    @property
    def dim(self):
        if self.A is not None:
            return self.A.shape[1]
        if self.c is not None:
            return self.c.shape[0]
        return None

    def _residual(self, x):
        return np.einsum("md,...d->...m", self.A, x) - self.b

    def value(self, x):
        """
        目标值，x 形状 (dim,) 或 (..., dim)
        """
        x = np.asarray(x, dtype=float)
        if self.kind == "zero":
            return np.zeros(x.shape[:-1]) if x.ndim > 1 else 0.0
        if self.kind == "linear":
            return x @ self.c
        if self.kind == "hinge":
            margins = self.b * np.einsum("md,...d->...m", self.A, x)
            return np.sum(np.maximum(0.0, 1.0 - margins), axis=-1)
        r = self._residual(x)
        if self.kind == "l1_regression":
            return np.sum(np.abs(r), axis=-1)
        if self.kind == "least_abs_dev":
            return np.mean(np.abs(r), axis=-1)
        return 0.5 * np.sum(r ** 2, axis=-1)

    def __call__(self, x):
        return self.value(x)

    def subgradient(self, x):
        """
        ∂f(x) 中的一个元素；可微点处即梯度，扭结处 sign 取 0
        """
        x = np.asarray(x, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(x)
        if self.kind == "linear":
            return np.broadcast_to(self.c, x.shape).copy()
        if self.kind == "hinge":
            margins = self.b * np.einsum("md,...d->...m", self.A, x)
            active = (margins < 1.0).astype(float)
            return -np.einsum("...m,md->...d", active * self.b, self.A)
        r = self._residual(x)
        if self.kind == "l1_regression":
            return np.einsum("...m,md->...d", np.sign(r), self.A)
        if self.kind == "least_abs_dev":
            return np.einsum("...m,md->...d", np.sign(r), self.A) / self.A.shape[0]
        return np.einsum("...m,md->...d", r, self.A)

    def G_f(self, sup_norm):
        """
        次梯度范数上界

        Args:
            sup_norm (float): 查询域上 ‖x‖ 的上确界（只有二次目标用到）

        Returns:
            float: G_f
        """
        if self.kind == "zero":
            return 0.0
        if self.kind == "linear":
            return float(np.linalg.norm(self.c))
        row_norms = np.linalg.norm(self.A, axis=1)
        if self.kind in ("l1_regression", "hinge"):
            return float(row_norms.sum())
        if self.kind == "least_abs_dev":
            return float(row_norms.mean())
        spec = float(np.linalg.norm(self.A, 2))
        return spec * (spec * sup_norm + float(np.linalg.norm(self.b)))

    def to_dict(self):
        data = {"kind": self.kind}
        if self.A is not None:
            data["A_shape"] = list(self.A.shape)
        return data


class ObjectiveStack:
    """
    N 个局部目标的批量计算

    类型与数据形状一致时把数据堆叠成 (N, m, dim) 一次算完，否则逐个计算。
    """
    def __init__(self, objectives):
        self.objectives = list(objectives)
        self.n = len(self.objectives)
        kinds = {obj.kind for obj in self.objectives}
        self.kind = kinds.pop() if len(kinds) == 1 else None
        self._A = self._b = self._c = None
        if self.kind in ("l1_regression", "least_abs_dev", "hinge", "quadratic"):
            shapes = {obj.A.shape for obj in self.objectives}
            if len(shapes) == 1:
                self._A = np.stack([obj.A for obj in self.objectives])
                self._b = np.stack([obj.b for obj in self.objectives])
        elif self.kind == "linear":
            self._c = np.stack([obj.c for obj in self.objectives])

    @property
    def stacked(self):
        return self.kind == "zero" or self._A is not None or self._c is not None

    def subgradients(self, X):
        """
        X 形状 (N, dim)，第 i 行在第 i 个目标处求次梯度
        """
        X = np.asarray(X, dtype=float)
        if not self.stacked:
            return np.stack([obj.subgradient(X[i]) for i, obj in enumerate(self.objectives)])
        if self.kind == "zero":
            return np.zeros_like(X)
        if self.kind == "linear":
            return self._c.copy()
        if self.kind == "hinge":
            margins = self._b * np.einsum("nmd,nd->nm", self._A, X)
            weights = -(margins < 1.0) * self._b
            return np.einsum("nm,nmd->nd", weights, self._A)
        r = np.einsum("nmd,nd->nm", self._A, X) - self._b
        if self.kind == "l1_regression":
            return np.einsum("nm,nmd->nd", np.sign(r), self._A)
        if self.kind == "least_abs_dev":
            return np.einsum("nm,nmd->nd", np.sign(r), self._A) / self._A.shape[1]
        return np.einsum("nm,nmd->nd", r, self._A)

    def values_at(self, x):
        """
        所有局部目标在同一批点上的取值

        Args:
            x (np.ndarray): 形状 (dim,) 或 (k, dim)

        Returns:
            np.ndarray: 形状 (N,) 或 (N, k)
        """
        return np.stack([obj.value(x) for obj in self.objectives])
