"""
集中式对照运行
与分布式运行共用同一预言机随机流，用来检查无噪声情形下的误差差距与单智能体退化
"""

import numpy as np

from algorithms.dscmd import _same_regularizer
from algorithms.recorder import checkpoint_grid
from geometry.inner_solvers import mirror_step
from utils.errors import ConfigMismatch
from utils.logger import get_logger

logger = get_logger("engine")


def centralized_twin(ctx, grid=None):
    """
    在 (1/N)Σ(f_i + χ_i) 上运行集中式随机复合镜像下降

    第 t 轮的次梯度取 N 个智能体在同一点上的随机次梯度的平均，
    扰动与分布式运行第 t 轮的预言机块相同。

    Args:
        ctx (RunContext): DSCMD-N 的运行上下文
        grid (np.ndarray): 检查点，缺省与分布式运行相同

    Returns:
        dict: checkpoints, err_hat（按 F 计的 F(x̂^T) - f*）, x_hat
    """
    problem = ctx.problem
    if ctx.config.method != "dscmd_n":
        raise ConfigMismatch("the centralized twin mirrors dscmd_n runs", key="method", admissible="dscmd_n")
    if not _same_regularizer(problem.regularizers):
        raise ConfigMismatch("the centralized twin needs identical local regularizers", key="regularizer_local")
    chi = problem.regularizers[0]
    cfg = ctx.config
    if grid is None:
        grid = checkpoint_grid(cfg.horizon_T, cfg.per_decade, cfg.cap)
    marks = set(int(g) for g in grid)

    n = ctx.n_agents
    x = problem.cset.center() if cfg.init_override is None else np.asarray(cfg.init_override, dtype=float)
    x_sum = np.zeros_like(x)
    checkpoints, errors, averages = [], [], []
    for t in range(cfg.horizon_T):
        g = ctx.oracle.sample(problem.stack.subgradients(np.tile(x, (n, 1))), t, ctx.G_guard).mean(axis=0)
        x = mirror_step(ctx.geometry, problem.cset, chi, g, x, ctx.stepsize.alpha(t))
        x_sum += x
        if t + 1 in marks:
            x_hat = x_sum / (t + 1)
            checkpoints.append(t + 1)
            errors.append(float(problem.evaluate_F(x_hat)) - problem.f_star)
            averages.append(x_hat)
    logger.debug(f"centralized twin finished T={cfg.horizon_T}")
    return {
        "checkpoints": np.asarray(checkpoints, dtype=int),
        "err_hat": np.asarray(errors),
        "x_hat": np.asarray(averages),
    }


def projected_subgradient_reference(ctx):
    """
    单智能体投影随机次梯度 x^{t+1} = Π_𝒳(x^t - α_t g̃(x^t))

    只对 N = 1 有意义，用于检查欧氏、χ = 0、无链路噪声时的退化。

    Returns:
        np.ndarray: 全部迭代 x^0..x^T，形状 (T+1, dim)
    """
    if ctx.n_agents != 1:
        raise ConfigMismatch("the projected subgradient reference is a single-agent run", key="n_agents",
                             admissible="1")
    problem = ctx.problem
    cfg = ctx.config
    x = problem.cset.center() if cfg.init_override is None else np.asarray(cfg.init_override, dtype=float)
    iterates = [x]
    for t in range(cfg.horizon_T):
        g = ctx.oracle.sample(problem.stack.subgradients(x[None, :]), t, ctx.G_guard)[0]
        x = problem.cset.project(x - ctx.stepsize.alpha(t) * g)
        iterates.append(x)
    return np.asarray(iterates)
