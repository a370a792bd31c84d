"""
带噪分布式随机复合镜像下降（DSCMD-N）
每一轮：带噪混合得到 y_i，在 y_i 处查询随机次梯度，再做一次复合镜像步
"""

import numpy as np

from geometry.inner_solvers import mirror_step
from utils.errors import InnerSolverFailure


def noisy_mix(W, V, r_t, xi):
    """
    带噪混合 Σ_j W_ij (v_j + r_t ξ_ij)

    Args:
        W (np.ndarray): 权重矩阵 (N, N)
        V (np.ndarray): 被混合的量 (N, dim)
        r_t (float): 当前噪声幅度
        xi (np.ndarray): 链路噪声 (N, N, dim)

    Returns:
        np.ndarray: 混合结果 (N, dim)
    """
    mixed = W @ V
    if r_t != 0.0:
        mixed = mixed + r_t * np.einsum("ij,ijd->id", W, xi)
    return mixed


def _same_regularizer(regs):
    first = regs[0].to_dict()
    return all(reg.to_dict() == first for reg in regs[1:])


def local_mirror_steps(geometry, problem, G, Y, alpha_t, t):
    """
    对全部智能体做复合镜像步；局部正则全部相同时整体向量化

    Raises:
        InnerSolverFailure: 带 (agent, t) 标签
    """
    regs = problem.regularizers
    try:
        if _same_regularizer(regs):
            return mirror_step(geometry, problem.cset, regs[0], G, Y, alpha_t)
    except InnerSolverFailure as e:
        raise e.tagged(e.agent, t) from e
    rows = []
    for i, reg in enumerate(regs):
        try:
            rows.append(mirror_step(geometry, problem.cset, reg, G[i], Y[i], alpha_t))
        except InnerSolverFailure as e:
            raise e.tagged(i, t) from e
    return np.stack(rows)


def dscmd_step(state, ctx):
    """
    DSCMD-N 的一轮同步更新

    Args:
        state (NetworkState): 第 t 轮状态
        ctx (RunContext): 运行上下文

    Returns:
        NetworkState: 第 t+1 轮状态，diagnostics 含混合点 Y 与 Lemma 4 的步长范数
    """
    t = state.t
    dim = ctx.dim
    W = ctx.schedule.weight_matrix_at(t).entries
    r_t = ctx.decay.r(t)
    alpha_t = ctx.stepsize.alpha(t)

    xi = ctx.sampler.sample_block(t, dim)
    Y = noisy_mix(W, state.X, r_t, xi)
    G = ctx.oracle.sample(ctx.problem.stack.subgradients(Y), t, ctx.G_guard)
    X_new = local_mirror_steps(ctx.geometry, ctx.problem, G, Y, alpha_t, t)

    diagnostics = {
        "Y": Y,
        "alpha": alpha_t,
        "r": r_t,
        "step_norms": np.linalg.norm(X_new - Y, axis=1),
    }
    return state.advance(X_new, diagnostics=diagnostics)
