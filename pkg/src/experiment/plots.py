"""
收敛图模块
对数-对数误差曲线叠加理论界，输出静态 SVG
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from utils.logger import get_logger  # noqa: E402

logger = get_logger("artifacts")


def plot_convergence(path, curve, bound=None, title=None, fit=None):
    """
    画一条误差曲线

    Args:
        path (str): 输出 SVG 路径
        curve (ErrorCurve): 均值与标准误
        bound (np.ndarray): 同一检查点上的理论界
        title (str): 标题
        fit (RateFit): 拟合结果，给出时画拟合直线

    Returns:
        str: 写出的路径
    """
    T = curve.checkpoints.astype(float)
    mask = curve.mean > 0
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ax.loglog(T[mask], curve.mean[mask], label="mean error")
    if curve.stderr_defined:
        lower = np.maximum(curve.mean - curve.stderr, 1e-300)
        ax.fill_between(T[mask], lower[mask], (curve.mean + curve.stderr)[mask], alpha=0.25)
    if bound is not None:
        ax.loglog(T, bound, linestyle="--", label="theoretical bound")
    if fit is not None:
        lo, hi = fit.fit_window
        xs = np.array([lo, hi], dtype=float)
        ax.loglog(xs, np.exp(fit.intercept) * xs ** fit.slope, linestyle=":",
                  label=f"fit slope {fit.slope:.3f}")
    ax.set_xlabel("T")
    ax.set_ylabel("F(x_hat) - f*")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    logger.info(f"wrote {path}")
    return path


def plot_sweep(path, curves, axis):
    """
    sweep 各取值的误差曲线画在同一张图上

    Args:
        path (str): 输出 SVG 路径
        curves (dict): {取值: ErrorCurve}
        axis (str): sweep 的配置键
    """
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for value, curve in curves.items():
        mask = curve.mean > 0
        ax.loglog(curve.checkpoints[mask], curve.mean[mask], label=f"{axis}={value}")
    ax.set_xlabel("T")
    ax.set_ylabel("F(x_hat) - f*")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    logger.info(f"wrote {path}")
    return path
