"""
实验执行模块
一次完整实验：求参考解、跑试验集合、计算界常数与检查，并写出全部产物
"""

import os

from algorithms.engine import run_ensemble
from algorithms.factory import ExperimentFactory
from analysis.checks import disagreement_report, domination_check, expected_bound, lemma4_report, lemma7_report
from analysis.constants import compute_bound_constants
from analysis.ensemble import TrialEnsemble, expected_error_curve
from analysis.rates import fit_rate, tail_window
from experiment.artifacts import ArtifactWriter
from experiment.plots import plot_convergence
from utils.errors import DegenerateFit
from utils.logger import get_logger
from utils.timer import BudgetTimer


class ExperimentResult:
    """
    一次实验的结果

    Attributes:
        config (ExperimentConfig): 使用的配置
        traces (list): 全部 RunTrace（含失败的）
        problem (CompositeProblem): 问题实例
        ensemble (TrialEnsemble): 成功试验的集合，全部失败或 T = 0 时为 None
        constants (BoundConstants): 界常数
        curve (ErrorCurve): 各智能体最大误差的均值曲线
        bound (np.ndarray): 检查点上的期望界
        fit (RateFit): 尾部窗口的速率拟合，无法拟合时为 None
        reports (list): CheckReport 列表
        summary (dict): 写入 summary.json 的内容
        writer (ArtifactWriter): 产物写出器
    """
    def __init__(self, config, traces, problem, writer):
        self.config = config
        self.traces = traces
        self.problem = problem
        self.writer = writer
        self.ensemble = None
        self.constants = None
        self.curve = None
        self.bound = None
        self.fit = None
        self.reports = []
        self.summary = {}

    @property
    def failed(self):
        return [tr.trial for tr in self.traces if tr.status != "ok"]

    @property
    def passed(self):
        return not self.failed and all(r.passed for r in self.reports)

    def report(self, name):
        """
        按名称取检查报告
        """
        for r in self.reports:
            if r.name == name:
                return r
        return None


def run_experiment(config, jobs=1, output_dir=None, problem=None):
    """
    执行一次实验并写出 manifest.json、trials.csv、series.csv、summary.json（及可选图）

    Args:
        config (ExperimentConfig): 已校验的配置
        jobs (int): 并发进程数
        output_dir (str): 输出目录，缺省取配置中的 output_dir
        problem (CompositeProblem): 可复用的已求解问题

    Returns:
        ExperimentResult: 实验结果
    """
    logger = get_logger("cli")
    params = config.params
    writer = ArtifactWriter(output_dir or params["output_dir"])
    timer = BudgetTimer(params["thresholds"].get("budget_seconds"))
    timer.start()

    factory = ExperimentFactory(params)
    if problem is None:
        problem = factory.create_problem()
    traces, problem = run_ensemble(params, params["trials_M"], jobs, problem)
    result = ExperimentResult(config, traces, problem, writer)

    kappa1, kappa2 = params["kappa1"], params["noise_kappa2"]
    result.constants = compute_bound_constants(factory.create_context(0, problem), traces[0].x0)
    writer.write_trials(traces)

    ok = [tr for tr in traces if tr.status == "ok"]
    dis = None
    if ok and len(ok[0].checkpoints):
        ensemble = TrialEnsemble(traces, params)
        result.ensemble = ensemble
        result.curve = expected_error_curve(ensemble, agent=None)
        result.bound = expected_bound(ensemble, result.constants, kappa1, kappa2)
        window = params["fit_window"] or tail_window(ensemble.horizon)
        try:
            result.fit = fit_rate(result.curve, window)
        except DegenerateFit as e:
            logger.warning(f"no rate fit: {e}")

        result.reports.append(domination_check(ensemble, result.constants, kappa1, kappa2))
        dis = disagreement_report(ensemble, result.constants, kappa1, kappa2)
        result.reports.append(dis)
        if ensemble.method == "dscmd_n":
            result.reports.append(lemma4_report(ensemble, result.constants, kappa1))
            result.reports.append(lemma7_report(ensemble))
    elif ok:
        logger.warning("horizon T = 0: no checkpoints to analyse")

    writer.write_manifest(config, result.constants, problem, extra={
        "trials_requested": params["trials_M"],
        "checkpoints": ok[0].checkpoints if ok else [],
    })
    if result.ensemble is not None:
        writer.write_series(result.ensemble, result.bound, dis)
        if params["plot"]:
            path = plot_convergence(writer.path("convergence.svg"), result.curve, result.bound,
                                    title=f"{params['method']} (M={result.ensemble.M})", fit=result.fit)
            writer.written.append(os.path.basename(path))

    timer.pause()
    result.summary = {
        "method": params["method"],
        "trials": {"requested": params["trials_M"], "ok": len(ok), "failed": result.failed},
        "failures": {tr.trial: tr.failure for tr in traces if tr.status != "ok"},
        "fit": result.fit,
        "constants": result.constants,
        "checks": [r.to_dict() for r in result.reports],
        "passed": result.passed,
        "timing": timer.report(),
    }
    if result.curve is not None:
        result.summary["final_mean_error"] = float(result.curve.mean[-1])
        result.summary["initial_error"] = float(max(tr.err0.max() for tr in ok))
    writer.write_summary(result.summary)
    logger.info(f"experiment finished in {timer.format_time()}: {len(ok)}/{len(traces)} trials ok")
    return result
