"""
轨迹记录模块
每一步更新累计量，在对数间隔的检查点上存下误差、分歧与原始迭代
"""

import numpy as np
from scipy.spatial.distance import cdist

from utils.timer import Timer

LEMMA7_SLACK = 1e-12


def checkpoint_grid(horizon, per_decade=40, cap=200):
    """
    对数间隔检查点，取值于 [1, horizon] 的整数且必含 horizon

    Args:
        horizon (int): 总步数 T
        per_decade (int): 每个数量级的点数
        cap (int): 检查点总数上限

    Returns:
        np.ndarray: 严格递增的整数数组；T = 0 时为空
    """
    horizon = int(horizon)
    if horizon <= 0:
        return np.zeros(0, dtype=int)
    decades = np.log10(horizon)
    count = int(np.ceil(per_decade * decades)) + 1
    grid = np.unique(np.round(np.logspace(0.0, decades, count)).astype(int))
    grid = grid[(grid >= 1) & (grid <= horizon)]
    if grid.size == 0 or grid[-1] != horizon:
        grid = np.append(grid, horizon)
    if grid.size > cap:
        keep = np.unique(np.round(np.linspace(0, grid.size - 1, cap)).astype(int))
        grid = grid[keep]
    return grid


class RunTrace:
    """
    一次运行的记录

    检查点数组的第一维对应 checkpoints；按智能体的量第二维为 N。
    status 为 "ok" 或 "failed"，失败时只保留失败前已记录的检查点。
    """
    FIELDS = (
        "err_hat", "err_last", "min_err", "dist_hat", "disagreement", "cum_disagreement",
        "step_norms", "step_ratio_max", "alpha", "r", "dual_dev", "lemma7_margin", "x_last", "x_hat", "elapsed",
    )

    def __init__(self, method, trial, n_agents, config=None):
        self.method = method
        self.trial = int(trial)
        self.n_agents = int(n_agents)
        self.config = dict(config or {})
        self.checkpoints = []
        for name in self.FIELDS:
            setattr(self, name, [])
        self.x0 = None
        self.err0 = None
        self.f_star = None
        self.lemma7_violations = 0
        self.status = "ok"
        self.failure = None

    def __len__(self):
        return len(self.checkpoints)

    def finalize(self):
        """
        把逐检查点的列表转成 numpy 数组
        """
        self.checkpoints = np.asarray(self.checkpoints, dtype=int)
        for name in self.FIELDS:
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        return self

    def column(self, name, agent=None):
        values = np.asarray(getattr(self, name))
        if agent is None or values.ndim < 2:
            return values
        return values[:, agent]

    def to_dict(self):
        out = {
            "method": self.method,
            "trial": self.trial,
            "status": self.status,
            "failure": self.failure,
            "checkpoints": np.asarray(self.checkpoints).tolist(),
            "lemma7_violations": int(self.lemma7_violations),
        }
        for name in self.FIELDS:
            if name in ("x_last", "x_hat", "elapsed"):
                continue
            out[name] = np.asarray(getattr(self, name)).tolist()
        return out


class TraceRecorder:
    """
    轨迹记录器

    observe 在每一步之后调用；检查点上把当前量追加到 RunTrace。
    """
    def __init__(self, ctx, grid=None):
        """
        Args:
            ctx (RunContext): 运行上下文（问题需已求参考解）
            grid (np.ndarray): 检查点，缺省由配置生成
        """
        self.ctx = ctx
        cfg = ctx.config
        self.grid = checkpoint_grid(cfg.horizon_T, cfg.per_decade, cfg.cap) if grid is None else np.asarray(grid)
        self._grid_set = set(int(g) for g in self.grid)
        self.trace = RunTrace(cfg.method, cfg.trial, ctx.n_agents, cfg.to_dict())
        self.timer = Timer()
        self.track_min = cfg.track_min
        self._noise_scale = ctx.n_agents * ctx.sampler.radius
        self._min_err = None
        self._cum_dis = np.zeros(ctx.n_agents)
        self._ratio_max = 0.0

    def _errors(self, X):
        return np.asarray(self.ctx.problem.evaluate_F(X), dtype=float) - self.ctx.problem.f_star

    def start(self, state):
        """
        记录初始状态 x^0
        """
        self.timer.start()
        self.trace.x0 = state.X.copy()
        self.trace.err0 = self._errors(state.X)
        self.trace.f_star = self.ctx.problem.f_star
        # 运行最小值只取 t >= 1
        self._min_err = np.full(self.ctx.n_agents, np.inf)

    def _lemma7(self, X_prev, Y, r_t):
        # ‖y_i - x_l‖ <= Σ_j ‖x_j - x_l‖ + N√ν r_t，对全部 (i, l)
        lhs = cdist(Y, X_prev)
        rhs = cdist(X_prev, X_prev).sum(axis=0)[None, :] + self._noise_scale * r_t
        margin = rhs - lhs
        self.trace.lemma7_violations += int(np.count_nonzero(margin < -LEMMA7_SLACK))
        return float(margin.min())

    def observe(self, prev, state):
        """
        一步之后的累计更新

        Args:
            prev (NetworkState): 第 t 轮状态
            state (NetworkState): 第 t+1 轮状态
        """
        diag = state.diagnostics
        X = state.X
        pairwise = cdist(X, X)
        self._cum_dis += pairwise.sum(axis=0)
        errors_last = None
        if self.track_min:
            errors_last = self._errors(X)
            np.minimum(self._min_err, errors_last, out=self._min_err)

        lemma7 = np.nan
        if "Y" in diag:
            lemma7 = self._lemma7(prev.X, diag["Y"], diag["r"])
        ratio = float(np.max(diag["step_norms"]) / diag["alpha"])
        self._ratio_max = max(self._ratio_max, ratio)

        if state.t not in self._grid_set:
            return
        if errors_last is None:
            errors_last = self._errors(X)
        x_hat = state.x_hat
        trace = self.trace
        trace.checkpoints.append(state.t)
        trace.err_hat.append(self._errors(x_hat))
        trace.err_last.append(errors_last)
        trace.min_err.append(self._min_err.copy() if self.track_min else np.full(trace.n_agents, np.nan))
        trace.dist_hat.append(self.ctx.problem.dist_to_solution(x_hat))
        trace.disagreement.append(float(pairwise.max()))
        trace.cum_disagreement.append(self._cum_dis.copy())
        trace.step_norms.append(np.asarray(diag["step_norms"], dtype=float))
        trace.step_ratio_max.append(self._ratio_max)
        trace.alpha.append(diag["alpha"])
        trace.r.append(diag["r"])
        trace.dual_dev.append(diag.get("dual_dev", np.full(trace.n_agents, np.nan)))
        trace.lemma7_margin.append(lemma7)
        trace.x_last.append(X.copy())
        trace.x_hat.append(x_hat)
        trace.elapsed.append(self.timer.get_elapsed())

    def fail(self, message):
        self.trace.status = "failed"
        self.trace.failure = message
        return self.finish()

    def finish(self):
        self.timer.pause()
        return self.trace.finalize()
