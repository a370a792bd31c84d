"""
内层求解模块
复合镜像下降步与复合对偶平均投影：能写出闭式解的组合直接计算，
其余组合用带回溯的加速近端梯度数值求解并给出最优性残差证书
"""

import numpy as np
from scipy.special import softmax

from geometry.constraint_sets import Box, EuclideanBall, Simplex
from utils.errors import InnerSolverFailure
from utils.logger import get_logger

logger = get_logger("geometry")

INNER_MAX_ITER = 10_000
INNER_TOL = 1e-8
INNER_FAIL_TOL = 1e-6
DYKSTRA_MAX_ITER = 5_000
DYKSTRA_TOL = 1e-13


def _exact_constrained_prox(reg, cset, v, step):
    """
    能精确计算 prox_{step·χ + ι_𝒳} 时返回结果，否则返回 None
    """
    if reg.is_zero:
        return cset.project(v)
    if isinstance(cset, Box) and reg.is_separable:
        return cset.project(reg.prox(v, step))
    if isinstance(cset, EuclideanBall) and reg.is_radial_compatible:
        return cset.project(reg.prox(v, step))
    if isinstance(cset, Simplex):
        # 单纯形上 ‖x‖₁ 恒为 1，只剩二次部分
        if reg.kind == "l1":
            return cset.project(v)
        if reg.kind in ("half_l2_sq", "mixed_l1_l2"):
            return cset.project(v / (1.0 + step * reg.lambda2))
    return None


def dykstra_prox(reg, cset, v, step, max_iter=DYKSTRA_MAX_ITER, tol=DYKSTRA_TOL):
    """
    近端 Dykstra 分裂计算 prox_{step·χ + ι_𝒳}(v)

    Args:
        reg (Regularizer): 正则项
        cset (ConstraintSet): 约束集合
        v (np.ndarray): 形状 (..., dim)
        step (float): 近端步长

    Returns:
        np.ndarray: 近端点
    """
    x = np.asarray(v, dtype=float).copy()
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    for _ in range(max_iter):
        y = reg.prox(x + p, step)
        p = x + p - y
        x_new = cset.project(y + q)
        q = y + q - x_new
        change = np.max(np.abs(x_new - x))
        x = x_new
        if change <= tol * max(1.0, np.max(np.abs(x))):
            return x
    raise InnerSolverFailure(f"Dykstra splitting did not settle, last change {change:.3e}", residual=float(change))


def constrained_prox(reg, cset, v, step):
    """
    prox_{step·χ + ι_𝒳}(v)：精确组合走闭式，其余走 Dykstra
    """
    exact = _exact_constrained_prox(reg, cset, v, step)
    if exact is not None:
        return exact
    return dykstra_prox(reg, cset, v, step)


class InnerProblem:
    """
    内层复合问题 min_x s(x) + scale·R(x) + ι_W(x)

    s 为光滑部分（线性项加镜像项），R 为正则项，W 为工作域。
    残差取步长 alpha 的复合梯度映射 ‖x - prox_{alpha(scale·R + ι_W)}(x - alpha∇s(x))‖。
    """
    def __init__(self, value, grad, reg, scale, working, alpha, in_domain, L0):
        self.value = value
        self.grad = grad
        self.reg = reg
        self.scale = scale
        self.working = working
        self.alpha = alpha
        self.in_domain = in_domain
        self.L0 = L0

    def prox(self, v, step):
        return constrained_prox(self.reg, self.working, v, step * self.scale)

    def residual(self, x):
        t_x = self.prox(x - self.alpha * self.grad(x), self.alpha)
        return float(np.linalg.norm(x - t_x))

    def solve(self, x0, max_iter=INNER_MAX_ITER, tol=INNER_TOL):
        """
        FISTA + 回溯 + 自适应重启

        Returns:
            tuple: (解, 最终残差, 迭代次数)
        """
        x = self.working.project(np.asarray(x0, dtype=float))
        z = x.copy()
        t_k = 1.0
        L = self.L0
        residual = self.residual(x)
        if residual <= tol:
            return x, residual, 0
        for it in range(1, max_iter + 1):
            g_z = self.grad(z)
            f_z = self.value(z)
            while True:
                x_new = self.prox(z - g_z / L, 1.0 / L)
                d = x_new - z
                if self.value(x_new) <= f_z + np.dot(g_z, d) + 0.5 * L * np.dot(d, d) + 1e-14 * abs(f_z):
                    break
                L *= 2.0
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_k ** 2))
            z_next = x_new + ((t_k - 1.0) / t_next) * (x_new - x)
            if np.dot(z - x_new, x_new - x) > 0 or not self.in_domain(z_next):
                # 动量方向变差或越出定义域时重启
                z_next = x_new
                t_next = 1.0
            x, z, t_k = x_new, z_next, t_next
            residual = self.residual(x)
            if residual <= tol:
                return x, residual, it
            # 允许步长缓慢放大，适应局部曲率
            L = max(self.L0, 0.9 * L)
        return x, residual, max_iter


def _certify(problem, x0):
    x, residual, iters = problem.solve(x0)
    if residual > INNER_FAIL_TOL:
        raise InnerSolverFailure(
            f"inner solver stopped at residual {residual:.3e} after {iters} iterations", residual=residual
        )
    if residual > INNER_TOL:
        logger.debug(f"inner solver accepted residual {residual:.3e} after {iters} iterations")
    return x


def _on_row(fn, k):
    try:
        return fn(k)
    except InnerSolverFailure as e:
        raise InnerSolverFailure(e.args[0], agent=k, residual=e.residual) from e


def _rowwise(fn, arr):
    arr = np.asarray(arr, dtype=float)
    if arr.ndim == 1:
        return fn(arr, 0)
    return np.stack([_on_row(lambda k: fn(arr[k], k), k) for k in range(arr.shape[0])])


def _mirror_inner(mirror_map, working, chi, g, y, alpha):
    grad_y = mirror_map.grad(y)

    def value(x):
        return float(np.dot(g, x) + mirror_map.bregman(x, y) / alpha)

    def grad(x):
        return g + (mirror_map.grad(x) - grad_y) / alpha

    return InnerProblem(value, grad, chi, 1.0, working, alpha, mirror_map.in_domain,
                        L0=mirror_map.sigma_phi / alpha)


def _solve_mirror_rows(mirror_map, working, chi, g, y, alpha):
    g_b, y_b = np.broadcast_arrays(g, y)
    if y_b.ndim == 1:
        return _certify(_mirror_inner(mirror_map, working, chi, g_b, y_b, alpha), working.project(y_b))
    return np.stack([
        _on_row(lambda k: _certify(_mirror_inner(mirror_map, working, chi, g_b[k], y_b[k], alpha),
                                   working.project(y_b[k])), k)
        for k in range(y_b.shape[0])
    ])


def mirror_step(mirror_map, cset, chi, g, y, alpha):
    """
    复合镜像下降步 argmin_{x∈𝒳} {<g, x> + D_Φ(x, y)/α + χ(x)}

    Args:
        mirror_map (MirrorMap): 距离生成函数 Φ
        cset (ConstraintSet): 约束集合
        chi (Regularizer): 局部正则 χ
        g (np.ndarray): 随机次梯度，形状 (dim,) 或 (N, dim)
        y (np.ndarray): 混合后的点，形状同 g
        alpha (float): 步长 α > 0

    Returns:
        np.ndarray: 极小点，形状同 y
    """
    g = np.asarray(g, dtype=float)
    y = np.asarray(y, dtype=float)
    kind = mirror_map.kind

    if kind == "euclidean_half_sq_norm":
        return constrained_prox(chi, cset, y - alpha * g, alpha)

    if kind == "neg_entropy" and isinstance(cset, Simplex):
        working = cset.working_set(mirror_map)
        y = mirror_map.clamp(y)
        if chi.is_zero or chi.kind == "l1":
            return working.project(softmax(np.log(y) - alpha * g, axis=-1))
        if chi.kind == "entropy":
            shrink = 1.0 + alpha * chi.lambda1
            return working.project(softmax((np.log(y) - alpha * g) / shrink, axis=-1))
        return _solve_mirror_rows(mirror_map, working, chi, g, y, alpha)

    return _solve_mirror_rows(mirror_map, cset.working_set(mirror_map), chi, g, y, alpha)


def _dual_inner(psi, cset, eta, z, t, alpha):
    def value(x):
        return float(np.dot(z, x) + psi.value(x) / alpha)

    def grad(x):
        return z + psi.grad(x) / alpha

    working = cset.working_set(psi)
    return InnerProblem(value, grad, eta, float(t), working, alpha, psi.in_domain, L0=psi.sigma_phi / alpha)


def dual_averaging_projection(psi, cset, eta, z, t, alpha):
    """
    复合对偶平均投影 argmin_{x∈𝒳} {<z, x> + Ψ(x)/α + tη(x)}

    Args:
        psi (MirrorMap): 近端函数 Ψ
        cset (ConstraintSet): 约束集合
        eta (Regularizer): 全局正则 η
        z (np.ndarray): 对偶累积量，形状 (dim,) 或 (N, dim)
        t (int): 轮次权重
        alpha (float): 步长 α > 0

    Returns:
        np.ndarray: 极小点
    """
    z = np.asarray(z, dtype=float)
    kind = psi.kind

    if kind == "euclidean_half_sq_norm":
        return constrained_prox(eta, cset, -alpha * z, alpha * t)

    if kind == "neg_entropy" and isinstance(cset, Simplex) and (eta.is_zero or eta.kind in ("l1", "entropy")):
        scale = 1.0 + alpha * t * eta.lambda1 if eta.kind == "entropy" else 1.0
        # 坐标不低于工作域下界
        return cset.working_set(psi).project(softmax(-alpha * z / scale, axis=-1))

    if kind == "p_norm_sq" and eta.is_zero:
        x = psi.grad_conj(-alpha * z)
        if z.ndim == 1 and cset.contains(x, tol=0.0):
            return x
        if z.ndim > 1 and all(cset.contains(row, tol=0.0) for row in x):
            return x

    working = cset.working_set(psi)
    return _rowwise(
        lambda row, k: _certify(_dual_inner(psi, cset, eta, row, t, alpha), working.center()),
        z,
    )


def optimality_residual(mirror_map, cset, chi, g, y, alpha, x):
    """
    镜像步解 x 的一阶最优性残差（复合梯度映射，步长 α）
    """
    working = cset.working_set(mirror_map)
    if mirror_map.kind == "neg_entropy":
        y = mirror_map.clamp(y)
    problem = _mirror_inner(mirror_map, working, chi, np.asarray(g, dtype=float), np.asarray(y, dtype=float), alpha)
    return problem.residual(np.asarray(x, dtype=float))


def dual_optimality_residual(psi, cset, eta, z, t, alpha, x):
    """
    对偶平均投影解 x 的一阶最优性残差
    """
    problem = _dual_inner(psi, cset, eta, np.asarray(z, dtype=float), t, alpha)
    return problem.residual(np.asarray(x, dtype=float))
