"""
理论检查模块
把试验集合与理论界逐检查点对比，给出带判定的报告
"""

import numpy as np

from analysis.bounds import lemma4_bound, lemma5_bound, lemma10_bound, theorem1_sum_bound, theorem3_sum_bound
from utils.errors import ConfigMismatch
from utils.logger import get_logger

logger = get_logger("harness")

HIGH_PROB_MIN_TRIALS = 50
BOUND_RTOL = 1e-9
AVERAGE_SLACK = 1e-12


class CheckReport:
    """
    一项检查的结果

    Attributes:
        name (str): 检查名
        passed (bool): 是否通过
        measured: 实测量（标量或逐检查点数组）
        expected: 对照量（界或阈值）
        details (dict): 其它信息
    """
    def __init__(self, name, passed, measured=None, expected=None, **details):
        self.name = name
        self.passed = bool(passed)
        self.measured = measured
        self.expected = expected
        self.details = details

    def to_dict(self):
        def plain(v):
            if isinstance(v, np.ndarray):
                return v.tolist()
            if isinstance(v, np.generic):
                return v.item()
            return v

        out = {"name": self.name, "passed": self.passed, "measured": plain(self.measured),
               "expected": plain(self.expected)}
        out.update({k: plain(v) for k, v in self.details.items()})
        return out

    def __repr__(self):
        return f"CheckReport({self.name}: {'pass' if self.passed else 'FAIL'})"


def _violations(measured, bound):
    # 相对容差 1e-9
    slack = BOUND_RTOL * np.maximum(np.abs(bound), 1.0)
    return int(np.count_nonzero(measured > bound + slack))


def _log_verdict(report):
    level = "INFO" if report.passed else "WARNING"
    logger.log(f"check {report.name}: {'pass' if report.passed else 'fail'}", level)
    return report


def expected_bound(ensemble, constants, kappa1, kappa2, T=None):
    """
    按方法选择期望界的有限和形式
    """
    T = ensemble.checkpoints if T is None else T
    if ensemble.method == "dscmd_n":
        return theorem1_sum_bound(constants, kappa1, kappa2, T)
    return theorem3_sum_bound(constants, kappa1, kappa2, T)


def domination_check(ensemble, constants, kappa1, kappa2):
    """
    每个检查点上理论界 >= 经验均值误差（各智能体取最大）

    Returns:
        CheckReport: 违背次数为 0 时通过
    """
    curve = ensemble.mean_curve("err_hat")
    bound = expected_bound(ensemble, constants, kappa1, kappa2)
    count = _violations(curve.mean, bound)
    return _log_verdict(CheckReport(
        "theorem_domination", count == 0, curve.mean, bound, violations=count,
        checkpoints=ensemble.checkpoints,
    ))


def high_prob_check(ensemble, delta, bound_fn):
    """
    高概率覆盖：最终误差不超过 bound_fn(δ, T) 的试验比例 >= 1 - δ

    Args:
        ensemble (TrialEnsemble): 试验集合（有界次梯度；DSCDA-N 另需零均值有界链路噪声）
        delta (float): δ ∈ (0, 1]
        bound_fn (callable): (delta, T) -> 界值

    Returns:
        CheckReport: measured 为覆盖比例

    Raises:
        ConfigMismatch: 有界性前提不满足
    """
    params = ensemble.params
    if not params.get("grad_bounded", False):
        raise ConfigMismatch("high-probability bounds need a bounded gradient oracle", key="grad_bounded",
                             admissible="true")
    if ensemble.method == "dscda_n" and params.get("noise_dist") != "zero" and not params.get("noise_zero_mean", True):
        raise ConfigMismatch("dscda_n high-probability bounds need zero-mean link noise", key="noise_zero_mean",
                             admissible="true")
    if ensemble.M < HIGH_PROB_MIN_TRIALS:
        logger.warning(f"high-probability coverage from only {ensemble.M} trials")
    horizon = ensemble.horizon
    final = ensemble.final("err_hat")
    worst = final.max(axis=1) if final.ndim == 2 else final
    bound = float(bound_fn(delta, horizon))
    covered = float(np.mean(worst <= bound))
    return _log_verdict(CheckReport(
        "high_probability", covered >= 1.0 - delta, covered, 1.0 - delta, bound=bound, delta=delta,
        horizon=horizon, trials=ensemble.M, worst_error=float(worst.max()),
    ))


def disagreement_report(ensemble, constants=None, kappa1=None, kappa2=None):
    """
    累积不一致度（DSCMD-N）或对偶偏差（DSCDA-N）与其闭式界

    Returns:
        CheckReport: measured 为逐检查点试验均值，expected 为对应的界（未给常数时为 nan）
    """
    if ensemble.method == "dscmd_n":
        measured = ensemble.stack("cum_disagreement").max(axis=2).mean(axis=0)
        name = "lemma5_disagreement"
        if constants is None:
            bound = np.full_like(measured, np.nan)
        else:
            bound = lemma5_bound(constants, kappa1, kappa2, ensemble.checkpoints)
    else:
        measured = ensemble.stack("dual_dev").max(axis=2).mean(axis=0)
        name = "lemma10_dual_deviation"
        if constants is None:
            bound = np.full_like(measured, np.nan)
        else:
            bound = lemma10_bound(constants, kappa2, ensemble.checkpoints)
    count = 0 if constants is None else _violations(measured, bound)
    return _log_verdict(CheckReport(name, count == 0, measured, bound, violations=count,
                                    checkpoints=ensemble.checkpoints))


def lemma4_report(ensemble, constants, kappa1):
    """
    检查点 T 上的单步位移 ‖x_i^T - y_i^{T-1}‖ 的试验均值与 ((G_f+G_χ)/σ_Φ)α_{T-1} 比较
    """
    if ensemble.method != "dscmd_n":
        raise ConfigMismatch("the step-norm bound belongs to dscmd_n", key="method", admissible="dscmd_n")
    measured = ensemble.stack("step_norms").max(axis=2).mean(axis=0)
    bound = lemma4_bound(constants, kappa1, ensemble.checkpoints - 1)
    count = _violations(measured, bound)
    return _log_verdict(CheckReport("lemma4_step_norm", count == 0, measured, bound, violations=count,
                                    checkpoints=ensemble.checkpoints))


def lemma7_report(ensemble):
    """
    带噪混合点到各智能体的距离不等式，逐步检查的违背总数
    """
    if ensemble.method != "dscmd_n":
        raise ConfigMismatch("the mixed-point inequality belongs to dscmd_n", key="method", admissible="dscmd_n")
    total = int(sum(tr.lemma7_violations for tr in ensemble.traces))
    margin = float(min(np.nanmin(tr.lemma7_margin) for tr in ensemble.traces))
    return _log_verdict(CheckReport("lemma7_mixed_point", total == 0, total, 0, min_margin=margin))


def almost_sure_diagnostics(trace, thresholds=None):
    """
    单条长轨迹的几乎必然收敛诊断

    运行最小误差 min_{t<=T} F(x_i^t) - f* 与平均点误差 F(x̂_i^T) - f* 的轨迹；
    最小误差序列必须不增，两者的最终值须低于阈值。
    F(x̂) >= min_t F(x^t) 按检查点逐个比较：比例写入 average_above_min_fraction，
    全部成立时 convex_combination_holds 为真；给出 average_above_min 阈值（比例下限）时
    比例低于阈值判为不通过。凸函数不保证该不等式，缺省不参与判定。

    Args:
        trace (RunTrace): 运行记录
        thresholds (dict): min_err / err_hat / average_above_min 的阈值，缺省不检查

    Returns:
        CheckReport: 诊断报告
    """
    thresholds = thresholds or {}
    min_err = np.asarray(trace.min_err, dtype=float)
    err_hat = np.asarray(trace.err_hat, dtype=float)
    if min_err.size == 0 or np.all(np.isnan(min_err)):
        logger.warning("trace has no running-minimum record; enable track_min")
        monotone = True
        final_min = float("nan")
    else:
        monotone = bool(np.all(np.diff(min_err, axis=0) <= 0.0))
        final_min = float(np.max(min_err[-1]))
    final_hat = float(np.max(err_hat[-1])) if err_hat.size else float("nan")
    if min_err.size and err_hat.shape == min_err.shape:
        above = err_hat >= min_err - AVERAGE_SLACK
        above_min = float(np.mean(above))
        convex_holds = bool(np.all(above))
    else:
        above_min = float("nan")
        convex_holds = None
    dist = np.asarray(trace.dist_hat, dtype=float)
    tail = max(1, len(trace.checkpoints) // 4)
    err_last = np.asarray(trace.err_last, dtype=float)

    passed = monotone
    if "min_err" in thresholds:
        passed = passed and final_min < thresholds["min_err"]
    if "err_hat" in thresholds:
        passed = passed and final_hat < thresholds["err_hat"]
    if "average_above_min" in thresholds:
        passed = passed and above_min >= thresholds["average_above_min"]
    return _log_verdict(CheckReport(
        "almost_sure", passed, {"final_min_err": final_min, "final_err_hat": final_hat},
        dict(thresholds), min_err_monotone=monotone, average_above_min_fraction=above_min,
        convex_combination_holds=convex_holds,
        final_dist_hat=float(np.max(dist[-1])) if dist.size else float("nan"),
        liminf_err_last=float(np.min(err_last[-tail:])) if err_last.size else float("nan"),
        min_err_series=min_err.max(axis=1) if min_err.ndim == 2 else min_err,
        err_hat_series=err_hat.max(axis=1) if err_hat.ndim == 2 else err_hat,
    ))
