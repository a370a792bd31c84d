"""
带噪分布式随机复合对偶平均（DSCDA-N）
噪声只进入对偶变量 z 的混合，原始变量由 z 投影得到
"""

import numpy as np

from algorithms.dscmd import noisy_mix
from geometry.inner_solvers import dual_averaging_projection
from utils.errors import InnerSolverFailure


def dscda_step(state, ctx):
    """
    DSCDA-N 的一轮同步更新

    先在 x_i^t 处查询随机次梯度，再做
    z_i^{t+1} = Σ_j P_ij (z_j^t + r_t ξ_ij^t) + g̃_i^t，
    x_i^{t+1} = argmin_{x∈𝒳} {<z_i^{t+1}, x> + Ψ(x)/α_t + tη(x)}。

    Args:
        state (NetworkState): 第 t 轮状态（需带 Z）
        ctx (RunContext): 运行上下文

    Returns:
        NetworkState: 第 t+1 轮状态，diagnostics 含对偶偏差
    """
    t = state.t
    dim = ctx.dim
    W = ctx.schedule.weight_matrix_at(t).entries
    r_t = ctx.decay.r(t)
    alpha_t = ctx.stepsize.alpha(t)

    G = ctx.oracle.sample(ctx.problem.stack.subgradients(state.X), t, ctx.G_guard)
    xi = ctx.sampler.sample_block(t, dim)
    Z_new = noisy_mix(W, state.Z, r_t, xi) + G
    try:
        X_new = dual_averaging_projection(ctx.geometry, ctx.problem.cset, ctx.problem.eta, Z_new, t, alpha_t)
    except InnerSolverFailure as e:
        raise e.tagged(e.agent, t) from e

    z_bar = Z_new.mean(axis=0)
    diagnostics = {
        "alpha": alpha_t,
        "r": r_t,
        "dual_dev": np.linalg.norm(Z_new - z_bar, axis=1),
        "step_norms": np.linalg.norm(X_new - state.X, axis=1),
    }
    return state.advance(X_new, Z_new, diagnostics)
