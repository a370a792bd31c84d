"""
仿真引擎模块
管理同步迭代主循环，并把独立试验分发到进程池
"""

from concurrent.futures import ProcessPoolExecutor

from algorithms.dscda import dscda_step
from algorithms.dscmd import dscmd_step
from algorithms.factory import ExperimentFactory
from algorithms.recorder import TraceRecorder
from algorithms.state import initial_state
from utils.errors import StepFailure
from utils.logger import get_logger

STEP_FUNCTIONS = {"dscmd_n": dscmd_step, "dscda_n": dscda_step}


class SimulationEngine:
    """
    仿真引擎类
    """
    def __init__(self, context, logger=None):
        """
        初始化仿真引擎

        Args:
            context (RunContext): 运行上下文
            logger (ComponentLogger): 日志记录器
        """
        self.context = context
        self.logger = logger or get_logger("engine")
        self.step_fn = STEP_FUNCTIONS[context.config.method]
        self.state = None
        self.recorder = None

    def _progress_marks(self, horizon):
        if horizon < 10:
            return set()
        return {horizon * k // 10 for k in range(1, 10)}

    def run(self):
        """
        执行 T 轮同步迭代

        Returns:
            RunTrace: 运行记录

        Raises:
            StepFailure: 任何一步出错时抛出，携带失败前的记录
        """
        ctx = self.context
        cfg = ctx.config
        with_dual = cfg.method == "dscda_n"
        self.state = initial_state(ctx.problem.cset, ctx.n_agents, with_dual, cfg.init_override)
        self.recorder = TraceRecorder(ctx)
        self.recorder.start(self.state)
        marks = self._progress_marks(cfg.horizon_T)
        self.logger.info(f"{cfg.method} trial {cfg.trial}: N={ctx.n_agents}, dim={ctx.dim}, T={cfg.horizon_T}")

        for t in range(cfg.horizon_T):
            try:
                new_state = self.step_fn(self.state, ctx)
                self.recorder.observe(self.state, new_state)
            except Exception as e:
                message = f"step t={t} failed: {e}"
                self.logger.error(f"{cfg.method} trial {cfg.trial}: {message}")
                trace = self.recorder.fail(message)
                raise StepFailure(message, trace) from e
            self.state = new_state
            if self.state.t in marks:
                self.logger.info(f"trial {cfg.trial}: {100 * self.state.t // cfg.horizon_T}% ({self.state.t}/{cfg.horizon_T})")
            else:
                self.logger.debug(f"trial {cfg.trial}: step {self.state.t} done")

        trace = self.recorder.finish()
        self.logger.info(f"{cfg.method} trial {cfg.trial} finished in {self.recorder.timer.format_time()}")
        return trace


def run(context):
    """
    函数式入口：执行一次运行
    """
    return SimulationEngine(context).run()


def run_trial(params, trial, problem):
    """
    单次试验（进程池的工作函数），失败时返回带 failed 标记的记录

    Args:
        params (dict): 已校验的配置
        trial (int): 试验编号
        problem (CompositeProblem): 已求参考解的问题

    Returns:
        RunTrace: 运行记录
    """
    context = ExperimentFactory(params).create_context(trial, problem)
    try:
        return run(context)
    except StepFailure as e:
        return e.trace


def run_ensemble(params, trials, jobs=1, problem=None):
    """
    并发执行多次独立试验，结果按试验编号排序

    Args:
        params (dict): 已校验的配置
        trials (int): 试验次数 M
        jobs (int): 进程数上限
        problem (CompositeProblem): 可复用的已求解问题，缺省时在父进程中求一次

    Returns:
        tuple: (RunTrace 列表, CompositeProblem)
    """
    logger = get_logger("engine")
    if problem is None:
        problem = ExperimentFactory(params).create_problem()
    indices = list(range(int(trials)))
    if jobs <= 1 or len(indices) <= 1:
        traces = [run_trial(params, k, problem) for k in indices]
    else:
        logger.info(f"running {len(indices)} trials on {jobs} processes")
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            traces = list(pool.map(run_trial, [params] * len(indices), indices, [problem] * len(indices)))
    failed = [tr.trial for tr in traces if tr.status != "ok"]
    if failed:
        logger.warning(f"{len(failed)} of {len(traces)} trials failed: {failed}")
    return traces, problem
