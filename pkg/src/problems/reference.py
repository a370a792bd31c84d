"""
参考解模块
用 cvxpy 集中求解复合问题得到 (x*, F(x*))，再用切平面下界与多起点投影次梯度复核
"""

import cvxpy as cp
import numpy as np

from geometry.constraint_sets import Box, EuclideanBall, Simplex
from utils.errors import ReferenceSolveUnverified, ValidationError
from utils.logger import get_logger
from utils.rng import STREAM_CERTIFY, seeded_generator

logger = get_logger("problems")

MAX_REFERENCE_DIM = 50
CERTIFY_RESTARTS = 10
CERTIFY_ITERS = 1_000_000
CERTIFY_CHECK_EVERY = 500
CERTIFY_TOL = 1e-5
OPTIMALITY_TOL = 1e-6
CUT_ROUNDS = 60
CUT_RADII = (1e-2, 1e-3, 1e-4, 1e-5)
SOLVERS = ("CLARABEL", "ECOS", "SCS")


def _objective_expr(obj, x):
    if obj.kind == "zero":
        return cp.Constant(0.0)
    if obj.kind == "linear":
        return obj.c @ x
    if obj.kind == "hinge":
        return cp.sum(cp.pos(1.0 - cp.multiply(obj.b, obj.A @ x)))
    residual = obj.A @ x - obj.b
    if obj.kind == "l1_regression":
        return cp.norm1(residual)
    if obj.kind == "least_abs_dev":
        return cp.norm1(residual) / obj.A.shape[0]
    return 0.5 * cp.sum_squares(residual)


def _regularizer_expr(reg, x):
    if reg.is_zero:
        return cp.Constant(0.0)
    if reg.kind == "l1":
        return reg.lambda1 * cp.norm1(x)
    if reg.kind == "half_l2_sq":
        return 0.5 * reg.lambda2 * cp.sum_squares(x)
    if reg.kind == "linf":
        return reg.lambda1 * cp.norm_inf(x)
    if reg.kind == "entropy":
        return -reg.lambda1 * cp.sum(cp.entr(x))
    return reg.lambda1 * cp.norm1(x) + 0.5 * reg.lambda2 * cp.sum_squares(x)


def _constraints(cset, x):
    if isinstance(cset, Box):
        return [x >= cset.lower, x <= cset.upper]
    if isinstance(cset, EuclideanBall):
        return [cp.norm(x, 2) <= cset.radius]
    if isinstance(cset, Simplex):
        return [x >= 0, cp.sum(x) == 1]
    raise ValidationError(f"unsupported set {cset.kind!r}", key="set_kind")


def _solve(prob, x):
    """
    依次尝试已安装的求解器，返回 (求解器名, 是否得到解)
    """
    for solver in SOLVERS:
        if solver not in cp.installed_solvers():
            continue
        try:
            prob.solve(solver=solver)
        except cp.error.SolverError as e:
            logger.warning(f"{solver} failed: {e}")
            continue
        if x.value is not None:
            return solver, True
    if not any(solver in cp.installed_solvers() for solver in SOLVERS):
        prob.solve()
        if x.value is not None:
            return "default", True
    return None, False


def _solve_conic(problem):
    x = cp.Variable(problem.dim)
    f_terms = [_objective_expr(obj, x) for obj in problem.objectives]
    if problem.variant == "problem1":
        expr = cp.sum(f_terms) + cp.sum([_regularizer_expr(reg, x) for reg in problem.regularizers])
    else:
        expr = cp.sum(f_terms) / problem.n_agents + _regularizer_expr(problem.eta, x)
    prob = cp.Problem(cp.Minimize(expr), _constraints(problem.cset, x))
    solver, ok = _solve(prob, x)
    if not ok:
        raise ReferenceSolveUnverified(f"conic solve returned status {prob.status}")
    return problem.cset.project(np.asarray(x.value, dtype=float)), solver


def _closed_form_quadratic(problem):
    """
    二次目标加二次正则且无约束极小点可行时的闭式解，否则返回 None
    """
    if any(obj.kind != "quadratic" for obj in problem.objectives):
        return None
    regs = problem.regularizers if problem.variant == "problem1" else [problem.eta]
    if any(reg.kind not in ("zero", "half_l2_sq") for reg in regs):
        return None
    scale = 1.0 if problem.variant == "problem1" else 1.0 / problem.n_agents
    H = scale * sum(obj.A.T @ obj.A for obj in problem.objectives)
    rhs = scale * sum(obj.A.T @ obj.b for obj in problem.objectives)
    H = H + sum(reg.lambda2 for reg in regs if reg.kind == "half_l2_sq") * np.eye(problem.dim)
    try:
        x = np.linalg.solve(H, rhs)
    except np.linalg.LinAlgError:
        return None
    return x if problem.cset.contains(x, tol=0.0) else None


class CuttingPlaneModel:
    """
    F 的分段线性下方模型 max_k {F(x_k) + ⟨g_k, x - x_k⟩}

    集合上的模型极小值是最优值的下界；Kelley 迭代不断在模型极小点处加切平面。
    """
    def __init__(self, problem):
        self.problem = problem
        self.slopes = np.zeros((0, problem.dim))
        self.offsets = np.zeros(0)
        self.best_value = np.inf
        self.best_point = None

    def __len__(self):
        return len(self.offsets)

    def add(self, X):
        """
        在点集 X（形状 (k, dim)）处加切平面，返回各点的 F 值
        """
        X = np.atleast_2d(np.asarray(X, dtype=float))
        values = np.atleast_1d(self.problem.evaluate_F(X))
        G = np.atleast_2d(self.problem.subgradient_F(X))
        ok = np.isfinite(values) & np.all(np.isfinite(G), axis=1)
        self.slopes = np.concatenate([self.slopes, G[ok]])
        self.offsets = np.concatenate([self.offsets, values[ok] - np.sum(G[ok] * X[ok], axis=1)])
        if ok.any():
            k = int(np.argmin(np.where(ok, values, np.inf)))
            if values[k] < self.best_value:
                self.best_value, self.best_point = float(values[k]), X[k].copy()
        return values

    def minimize(self):
        """
        集合上极小化模型

        Returns:
            tuple: (下界, 模型极小点)
        """
        x = cp.Variable(self.problem.dim)
        s = cp.Variable()
        constraints = [s >= self.slopes @ x + self.offsets] + _constraints(self.problem.cset, x)
        prob = cp.Problem(cp.Minimize(s), constraints)
        _, ok = _solve(prob, x)
        if not ok:
            raise ReferenceSolveUnverified(f"cutting-plane model solve returned status {prob.status}")
        point = self.problem.cset.project(np.asarray(x.value, dtype=float))
        model_at = float(np.max(self.slopes @ point + self.offsets))
        return min(float(prob.value), model_at), point


def _seed_points(cset, x_star, rng):
    """
    x* 周围多个半径上的坐标方向与随机方向，投影回集合
    """
    dim = cset.dim
    directions = np.concatenate([np.eye(dim), -np.eye(dim), rng.standard_normal((2 * dim, dim))])
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    points = [x_star[None, :]]
    for radius in CUT_RADII:
        points.append(cset.project(x_star + radius * directions))
    return np.concatenate(points)


def optimality_lower_bound(model, f_star, tol, rounds=CUT_ROUNDS):
    """
    Kelley 迭代求最优值下界，f* - 下界 <= tol 或轮数用尽时停止

    Returns:
        tuple: (下界, 已用轮数)
    """
    lower = -np.inf
    for k in range(1, rounds + 1):
        lower, point = model.minimize()
        if f_star - lower <= tol:
            return lower, k
        model.add(point)
    return lower, rounds


def certify_reference(problem, x_star, f_star, seed=0, restarts=CERTIFY_RESTARTS, iters=CERTIFY_ITERS):
    """
    复核参考解

    两部分证据：
    1. 切平面下界：集合上 F 的下方模型极小值，给出最优性间隙 f* - 下界；
    2. 多起点投影次梯度：Polyak 步长以切平面下界为目标（不使用待检的 f*），
       各起点的最好值都应落在 f* 的 CERTIFY_TOL 之内。

    Args:
        problem (CompositeProblem): 问题实例
        x_star (np.ndarray): 待检极小点
        f_star (float): 待检最优值
        seed (int): 随机起点与随机方向的种子
        restarts (int): 起点数
        iters (int): 每个起点的迭代上限，全部起点进入容差后提前停止

    Returns:
        dict: lower_bound、optimality_gap、min_gap、max_gap、spread 等
    """
    rng = seeded_generator(seed, STREAM_CERTIFY)
    tol = OPTIMALITY_TOL * max(1.0, abs(f_star))
    starts = problem.cset.sample(rng, restarts)

    model = CuttingPlaneModel(problem)
    model.add(_seed_points(problem.cset, np.asarray(x_star, dtype=float), rng))
    model.add(starts)
    lower, rounds = optimality_lower_bound(model, f_star, tol)

    X = starts.copy()
    best = np.full(restarts, np.inf)
    done = 0
    for k in range(1, iters + 1):
        vals = problem.evaluate_F(X)
        best = np.minimum(best, vals)
        G = problem.subgradient_F(X)
        sq = np.maximum(np.sum(G ** 2, axis=1, keepdims=True), 1e-300)
        step = np.maximum(vals - lower, 0.0)[:, None] / sq
        X = problem.cset.project(X - step * G)
        done = k
        if k % CERTIFY_CHECK_EVERY == 0 and np.all(np.abs(best - f_star) <= 0.1 * CERTIFY_TOL):
            break
    best = np.minimum(best, problem.evaluate_F(X))

    if f_star - lower > tol:
        # 起点轨迹的终点再补一轮切平面
        model.add(X)
        lower, extra = optimality_lower_bound(model, f_star, tol)
        rounds += extra

    gaps = best - f_star
    return {
        "restarts": int(restarts),
        "iterations": int(done),
        "cuts": len(model),
        "cut_rounds": int(rounds),
        "lower_bound": float(lower),
        "optimality_gap": float(f_star - lower),
        "optimality_tol": float(tol),
        "min_gap": float(gaps.min()),
        "max_gap": float(gaps.max()),
        "spread": float(best.max() - best.min()),
    }


def solve_reference(problem, seed=0, restarts=CERTIFY_RESTARTS, iters=CERTIFY_ITERS):
    """
    求参考解并写回 problem.x_star / problem.f_star / problem.certificate

    Args:
        problem (CompositeProblem): 问题实例
        seed (int): 复核起点的随机种子
        restarts (int): 复核起点数
        iters (int): 每个起点的迭代上限

    Returns:
        tuple: (x_star, f_star)

    Raises:
        ReferenceSolveUnverified: 起点低于 f*、起点之间或与 f* 相差超过 1e-5、或最优性间隙未闭合
    """
    if problem.dim > MAX_REFERENCE_DIM:
        raise ValidationError("reference solve limited to small dimensions", key="dim",
                              admissible=f"<= {MAX_REFERENCE_DIM}")
    x_star, solver = _solve_conic(problem)
    f_star = float(problem.evaluate_F(x_star))

    closed = _closed_form_quadratic(problem)
    if closed is not None:
        f_closed = float(problem.evaluate_F(closed))
        if abs(f_closed - f_star) > 1e-6 * max(1.0, abs(f_closed)):
            logger.warning(f"conic and closed-form references differ: {f_star:.10g} vs {f_closed:.10g}")
        if f_closed <= f_star:
            x_star, f_star, solver = closed, f_closed, "closed_form"

    certificate = certify_reference(problem, x_star, f_star, seed=seed, restarts=restarts, iters=iters)
    certificate["solver"] = solver
    if certificate["min_gap"] < -CERTIFY_TOL:
        raise ReferenceSolveUnverified(
            f"a restart reached {certificate['min_gap']:.3e} below the reference value {f_star:.10g}"
        )
    if certificate["max_gap"] > CERTIFY_TOL or certificate["spread"] > CERTIFY_TOL:
        raise ReferenceSolveUnverified(
            f"restarts disagree with the reference value {f_star:.10g}: gap up to {certificate['max_gap']:.3e}, "
            f"spread {certificate['spread']:.3e}"
        )
    if certificate["optimality_gap"] > certificate["optimality_tol"]:
        raise ReferenceSolveUnverified(
            f"optimality gap {certificate['optimality_gap']:.3e} above {certificate['optimality_tol']:.1e} "
            f"after {certificate['cut_rounds']} cutting-plane rounds"
        )
    problem.x_star = x_star
    problem.f_star = f_star
    problem.certificate = certificate
    logger.info(f"reference solved by {solver}: f* = {f_star:.10g}, optimality gap {certificate['optimality_gap']:.2e}, "
                f"restart gaps in [{certificate['min_gap']:.2e}, {certificate['max_gap']:.2e}]")
    return x_star, f_star
