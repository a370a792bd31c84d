"""
试验集合模块
把 M 条共享配置的运行记录当作期望的蒙特卡洛估计
"""

import numpy as np

from utils.errors import ValidationError
from utils.logger import get_logger

logger = get_logger("harness")


class ErrorCurve:
    """
    按检查点的均值与标准误

    Attributes:
        checkpoints (np.ndarray): 检查点 T
        mean (np.ndarray): 试验均值
        stderr (np.ndarray): 标准误，M = 1 时全为 nan
        agent (int): 对应的智能体，None 表示各智能体的最大值
    """
    def __init__(self, checkpoints, mean, stderr, agent=None):
        self.checkpoints = np.asarray(checkpoints, dtype=int)
        self.mean = np.asarray(mean, dtype=float)
        self.stderr = np.asarray(stderr, dtype=float)
        self.agent = agent

    def __len__(self):
        return len(self.checkpoints)

    def window(self, lower, upper):
        """
        截取 lower <= T <= upper 的部分
        """
        mask = (self.checkpoints >= lower) & (self.checkpoints <= upper)
        return ErrorCurve(self.checkpoints[mask], self.mean[mask], self.stderr[mask], self.agent)

    @property
    def stderr_defined(self):
        return not np.all(np.isnan(self.stderr))

    def rows(self):
        """
        逐行 (T, mean, stderr)
        """
        return list(zip(self.checkpoints.tolist(), self.mean.tolist(), self.stderr.tolist()))


class TrialEnsemble:
    """
    试验集合

    失败的试验不参与统计；其余记录必须有相同的检查点。
    """
    def __init__(self, traces, params=None):
        """
        Args:
            traces (list): RunTrace 列表
            params (dict): 生成这些记录的解析后配置
        """
        traces = list(traces)
        if not traces:
            raise ValidationError("an ensemble needs at least one trace", key="trials_M", admissible=">= 1")
        self.failed = [tr for tr in traces if tr.status != "ok"]
        self.traces = [tr for tr in traces if tr.status == "ok"]
        if not self.traces:
            raise ValidationError("every trial in the ensemble failed", key="trials_M")
        if self.failed:
            logger.warning(f"{len(self.failed)} failed trials left out of the ensemble")
        grid = self.traces[0].checkpoints
        for tr in self.traces[1:]:
            if not np.array_equal(tr.checkpoints, grid):
                raise ValidationError(f"trial {tr.trial} has a different checkpoint grid", key="checkpoints")
        self.checkpoints = np.asarray(grid, dtype=int)
        self.params = dict(params or {})
        self.method = self.traces[0].method
        self.n_agents = self.traces[0].n_agents

    @property
    def M(self):
        return len(self.traces)

    @property
    def horizon(self):
        return int(self.checkpoints[-1]) if len(self.checkpoints) else 0

    def stack(self, field):
        """
        把某字段按试验堆叠，形状 (M, K, ...)
        """
        return np.stack([np.asarray(getattr(tr, field), dtype=float) for tr in self.traces])

    def mean_curve(self, field, agent=None):
        """
        任意字段的逐检查点均值与标准误

        Args:
            field (str): RunTrace 的字段名
            agent (int): 智能体编号；None 时按智能体取最大值后再统计

        Returns:
            ErrorCurve: 曲线
        """
        data = self.stack(field)
        if data.ndim == 3:
            if agent is None:
                data = data.max(axis=2)
            else:
                if not 0 <= agent < data.shape[2]:
                    raise ValidationError(f"agent {agent} out of range", key="agent",
                                          admissible=f"[0, {data.shape[2] - 1}]")
                data = data[:, :, agent]
        mean = data.mean(axis=0)
        if self.M < 2:
            stderr = np.full_like(mean, np.nan)
        else:
            stderr = data.std(axis=0, ddof=1) / np.sqrt(self.M)
        return ErrorCurve(self.checkpoints, mean, stderr, agent)

    def final(self, field):
        """
        每个试验在最后一个检查点的值，形状 (M, ...)
        """
        return self.stack(field)[:, -1]


def expected_error_curve(ensemble, agent=0):
    """
    E[F(x̂_agent^T)] - f* 的估计

    Args:
        ensemble (TrialEnsemble): 试验集合
        agent (int): 智能体编号，None 表示各智能体误差的最大值

    Returns:
        ErrorCurve: 均值与标准误
    """
    curve = ensemble.mean_curve("err_hat", agent)
    if not curve.stderr_defined:
        logger.warning("a single trial gives no standard error")
    return curve
