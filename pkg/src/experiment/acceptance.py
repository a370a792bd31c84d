"""
验收实验模块
随仓库发布的十个命名实验，每个实验返回一组带判定的检查报告
"""

import os

import numpy as np

from algorithms.dscmd import dscmd_step
from algorithms.factory import ExperimentFactory
from algorithms.state import initial_state
from algorithms.twin import centralized_twin, projected_subgradient_reference
from analysis.bounds import theorem2_bound, theorem4_bound
from analysis.checks import CheckReport, high_prob_check
from analysis.rates import regime_check
from experiment.artifacts import numeric_digest
from experiment.config import ExperimentConfig
from experiment.runner import run_experiment
from geometry.constraint_sets import Box, EuclideanBall, Simplex
from geometry.inner_solvers import dual_averaging_projection, mirror_step
from geometry.mirror_maps import make_mirror_map
from geometry.regularizers import Regularizer
from network.mixing import lemma1_violations
from network.topology import TopologySchedule, generate_schedule, validate_schedule
from utils.errors import NoisyOptError
from utils.logger import get_logger
from utils.rng import STREAM_CERTIFY, STREAM_TOPOLOGY, seeded_generator

logger = get_logger("harness")

# 子实验从验收配置继承的键
INHERITED_KEYS = ("horizon_T", "trials_M", "master_seed", "kappa1", "noise_kappa2", "checkpoints", "delta",
                  "log_level", "grad_bounded", "fit_window")


def _sub_config(config, out_dir, **updates):
    """
    以基准预设为底、继承验收配置中的运行参数构造子实验配置
    """
    data = {key: config[key] for key in INHERITED_KEYS}
    data["output_dir"] = out_dir
    data.update(updates)
    return ExperimentConfig.from_dict(data, source=config.source)


def _trials_report(result, label):
    return CheckReport(f"{label}_trials_ok", not result.failed, len(result.traces) - len(result.failed),
                       len(result.traces), failed=result.failed)


def _domination(result, label):
    report = result.report("theorem_domination")
    if report is None:
        return CheckReport(f"{label}_theorem_domination", False, None, None, reason="no checkpoints")
    return CheckReport(f"{label}_theorem_domination", report.passed, report.details["violations"], 0)


def _slope_report(name, fit, lower, upper):
    if fit is None:
        return CheckReport(name, False, None, [lower, upper], reason="no rate fit")
    return CheckReport(name, lower <= fit.slope <= upper, fit.slope, [lower, upper], fit=fit.to_dict())


# ---------------------------------------------------------------- 速率


def corollary1_rate(config, expect, jobs, out_dir):
    """
    基准 (a) 上 DSCMD-N 的 O(1/√T) 速率
    """
    lower, upper = expect.get("slope_range", [-0.65, -0.35])
    result = run_experiment(config, jobs, out_dir)
    return [
        _trials_report(result, "corollary1"),
        _slope_report("corollary1_slope", result.fit, lower, upper),
        _domination(result, "corollary1"),
    ]


def corollary4_regimes(config, expect, jobs, out_dir):
    """
    DSCDA-N 在不同噪声衰减指数下的速率区间及斜率次序
    """
    targets = expect.get("slopes", {"0.25": [-0.25, 0.12], "0.75": [-0.5, 0.15]})
    reports, fits = [], {}
    for key in sorted(targets, key=float):
        kappa2 = float(key)
        centre, tol = targets[key]
        result = run_experiment(config.with_updates(noise_kappa2=kappa2), jobs,
                                os.path.join(out_dir, f"kappa2_{key}"))
        label = f"kappa2_{key}"
        reports.append(_trials_report(result, label))
        reports.append(_slope_report(f"{label}_slope", result.fit, centre - tol, centre + tol))
        reports.append(_domination(result, label))
        if result.fit is not None:
            fits[kappa2] = result.fit
    if len(fits) == len(targets):
        order = regime_check(fits, expect.get("order_tolerance", 0.15))
        reports.append(CheckReport("regime_order", order["ordered"], [p["slope_low"] for p in order["pairs"]],
                                   [p["slope_high"] for p in order["pairs"]], pairs=order["pairs"]))
    else:
        reports.append(CheckReport("regime_order", False, None, None, reason="missing rate fits"))
    return reports


# ---------------------------------------------------------------- 网络


def lemma1_mixing(config, expect, jobs, out_dir):
    """
    随机生成若干小规模拓扑序列，穷举检查 |[P(t,s)]_ij - 1/N| <= Θγ^{t-s}
    """
    count = int(expect.get("schedules", 5))
    horizon = int(expect.get("horizon", 200))
    max_n = int(expect.get("max_agents", 6))
    max_b = int(expect.get("max_window", 3))
    rng = seeded_generator(config["master_seed"], STREAM_TOPOLOGY)
    reports = []
    for k in range(count):
        n = int(rng.integers(2, max_n + 1))
        window_b = int(rng.integers(1, max_b + 1))
        kind = TopologySchedule.KINDS[k % len(TopologySchedule.KINDS)]
        theta = float(rng.uniform(0.2, 1.0)) / n
        schedule = generate_schedule(n, window_b, theta, kind, int(rng.integers(0, 2 ** 31)))
        structure = validate_schedule(schedule)
        result = lemma1_violations(schedule, horizon)
        reports.append(CheckReport(
            f"schedule_{k}", structure["ok"] and result["violations"] == 0, result["violations"], 0,
            n_agents=n, window_B=window_b, theta=theta, kind=kind, pairs_checked=result["pairs_checked"],
            worst_ratio=result["worst_ratio"], structure=structure,
        ))
    return reports


# ---------------------------------------------------------------- 界与不变量


def theorem_domination(config, expect, jobs, out_dir):
    """
    期望界在每个检查点上不低于经验均值误差
    """
    reports = []
    for name in expect.get("benchmarks", ["a", "b"]):
        sub = _sub_config(config, os.path.join(out_dir, f"benchmark_{name}"), benchmark=name)
        result = run_experiment(sub, jobs)
        reports.append(_trials_report(result, f"benchmark_{name}"))
        reports.append(_domination(result, f"benchmark_{name}"))
    return reports


def lemma_invariants(config, expect, jobs, out_dir):
    """
    单步位移、累积不一致度、混合点距离（基准 a）与对偶偏差（基准 b）
    """
    wanted = {
        "a": ("lemma4_step_norm", "lemma5_disagreement", "lemma7_mixed_point"),
        "b": ("lemma10_dual_deviation",),
    }
    reports = []
    for name in expect.get("benchmarks", ["a", "b"]):
        sub = _sub_config(config, os.path.join(out_dir, f"benchmark_{name}"), benchmark=name)
        result = run_experiment(sub, jobs)
        reports.append(_trials_report(result, f"benchmark_{name}"))
        for check in wanted[name]:
            report = result.report(check)
            if report is None:
                reports.append(CheckReport(f"benchmark_{name}_{check}", False, reason="not produced"))
            else:
                reports.append(CheckReport(f"benchmark_{name}_{check}", report.passed,
                                           report.details.get("violations", report.measured), 0))
    return reports


def _high_prob(config, jobs, out_dir, bound):
    result = run_experiment(config, jobs, out_dir)
    reports = [_trials_report(result, "high_prob")]
    if result.ensemble is None:
        return reports + [CheckReport("high_probability", False, reason="no successful trials")]
    c = result.constants
    k1, k2 = config["kappa1"], config["noise_kappa2"]
    report = high_prob_check(result.ensemble, config["delta"], lambda d, T: bound(c, k1, k2, T, d))
    return reports + [report, _domination(result, "high_prob")]


def high_prob_dscmd(config, expect, jobs, out_dir):
    return _high_prob(config, jobs, out_dir, theorem2_bound)


def high_prob_dscda(config, expect, jobs, out_dir):
    return _high_prob(config, jobs, out_dir, theorem4_bound)


# ---------------------------------------------------------------- 内层求解器


def _grid(cset, centre, half_width, step):
    """
    集合内以 centre 为中心、半宽 half_width 的网格点；centre 为 None 时覆盖整个集合
    """
    if isinstance(cset, Simplex):
        lo, hi = (0.0, 1.0) if centre is None else (max(0.0, centre[0] - half_width),
                                                     min(1.0, centre[0] + half_width))
        s = np.linspace(lo, hi, int(np.ceil((hi - lo) / step)) + 1)
        return np.stack([s, 1.0 - s], axis=1)

    lower, upper = cset.coordinate_bounds()
    if centre is not None:
        lower = np.maximum(lower, centre - half_width)
        upper = np.minimum(upper, centre + half_width)
    axes = [np.linspace(a, b, int(np.ceil((b - a) / step)) + 1) for a, b in zip(lower, upper)]
    points = np.stack([m.ravel() for m in np.meshgrid(*axes, indexing="ij")], axis=1)
    if isinstance(cset, EuclideanBall):
        points = points[np.linalg.norm(points, axis=1) <= cset.radius]
        if cset.dim == 2:
            # 边界上补一圈点
            if centre is None:
                angles = np.linspace(-np.pi, np.pi, int(np.ceil(2 * np.pi * cset.radius / step)) + 1)
            else:
                phi = np.arctan2(centre[1], centre[0])
                width = half_width / cset.radius
                angles = np.linspace(phi - width, phi + width, int(np.ceil(2 * width * cset.radius / step)) + 1)
            rim = cset.radius * np.stack([np.cos(angles), np.sin(angles)], axis=1)
            points = np.concatenate([points, rim])
    return points


def brute_force_argmin(objective, cset, step=1e-4):
    """
    逐级加密网格搜索 argmin（维数 <= 2）

    Args:
        objective (callable): 向量化目标，(K, dim) -> (K,)
        cset (ConstraintSet): 约束集合
        step (float): 最细网格间距

    Returns:
        np.ndarray: 最细一级网格上的极小点
    """
    levels = [1e-2, 1e-3, step] if step < 1e-3 else [1e-2, step]
    best = None
    for k, h in enumerate(levels):
        half = None if k == 0 else 3.0 * levels[k - 1]
        points = _grid(cset, best, half, h)
        best = points[int(np.argmin(objective(points)))]
    return best


def _oracle_cases():
    """
    (算子, 镜像映射, 集合, 正则) 组合，维数 1 与 2
    """
    sets = [Box(1), Box(2), EuclideanBall(1), EuclideanBall(2), Simplex(2)]
    norm_type = ("zero", "l1", "half_l2_sq", "linf", "mixed_l1_l2")
    cases = []
    for operator in ("mirror_step", "dual_averaging_projection"):
        for cset in sets:
            regs = norm_type + ("entropy",) if isinstance(cset, Simplex) else norm_type
            for reg in regs:
                cases.append((operator, "euclidean_half_sq_norm", cset, reg))
        for reg in ("zero", "l1", "half_l2_sq", "entropy"):
            cases.append((operator, "neg_entropy", Simplex(2), reg))
    for cset in sets[:4]:
        for reg in ("zero", "l1"):
            cases.append(("dual_averaging_projection", "p_norm_sq", cset, reg))
    return cases


def _oracle_instance(rng, operator, geometry, cset, reg_kind):
    reg = Regularizer(reg_kind, lambda1=float(rng.uniform(0.0, 0.5)), lambda2=float(rng.uniform(0.0, 1.0)))
    alpha = float(rng.uniform(0.2, 2.0))
    if operator == "mirror_step":
        g = 2.0 * rng.standard_normal(cset.dim)
        y = cset.sample(rng, 1)[0]
        if geometry.kind == "neg_entropy":
            y = 0.9 * y + 0.1 * cset.center()

        def objective(X):
            return X @ g + geometry.bregman(X, y) / alpha + reg.value(X)

        return objective, lambda: mirror_step(geometry, cset, reg, g, y, alpha)

    z = 2.0 * rng.standard_normal(cset.dim)
    t = int(rng.integers(0, 20))

    def objective(X):
        return X @ z + geometry.value(X) / alpha + t * reg.value(X)

    return objective, lambda: dual_averaging_projection(geometry, cset, reg, z, t, alpha)


def inner_solver_oracle(config, expect, jobs, out_dir):
    """
    mirror_step 与 dual_averaging_projection 对比网格暴力极小点
    """
    instances = int(expect.get("instances", 200))
    tolerance = float(expect.get("tolerance", 2e-4))
    step = float(expect.get("grid", 1e-4))
    reports = []
    for index, (operator, map_kind, cset, reg_kind) in enumerate(_oracle_cases()):
        geometry = make_mirror_map(map_kind)
        rng = seeded_generator(config["master_seed"], STREAM_CERTIFY, index)
        worst, failures, errors = 0.0, 0, 0
        for _ in range(instances):
            objective, solve = _oracle_instance(rng, operator, geometry, cset, reg_kind)
            try:
                x = np.asarray(solve(), dtype=float)
            except NoisyOptError as e:
                errors += 1
                logger.debug(f"{operator}/{map_kind}/{cset.kind}/{reg_kind}: {e}")
                continue
            gap = float(np.max(np.abs(x - brute_force_argmin(objective, cset, step))))
            worst = max(worst, gap)
            failures += gap > tolerance
        name = f"{operator}:{map_kind}:{cset.kind}{cset.dim}:{reg_kind}"
        reports.append(CheckReport(name, failures == 0 and errors == 0, worst, tolerance,
                                   mismatches=failures, solver_errors=errors, instances=instances))
    return reports


# ---------------------------------------------------------------- 退化与确定性


def degeneracy(config, expect, jobs, out_dir):
    """
    N = 1、欧氏、χ = 0、无链路噪声时逐步等于投影随机次梯度；
    基准 (c) 上分布式运行与集中式对照的最终误差差距
    """
    tolerance = float(expect.get("step_tolerance", 1e-12))
    factory = ExperimentFactory(config.params)
    problem = factory.create_problem()
    ctx = factory.create_context(0, problem)
    reference = projected_subgradient_reference(ctx)
    state = initial_state(problem.cset, 1, False, config["init_override"])
    worst = float(np.max(np.abs(state.X[0] - reference[0])))
    for t in range(ctx.config.horizon_T):
        state = dscmd_step(state, ctx)
        worst = max(worst, float(np.max(np.abs(state.X[0] - reference[t + 1]))))
    reports = [CheckReport("single_agent_degeneracy", worst <= tolerance, worst, tolerance,
                           steps=ctx.config.horizon_T)]

    twin_tolerance = float(expect.get("twin_tolerance", 1e-3))
    sub = _sub_config(config, os.path.join(out_dir, "benchmark_c"), benchmark="c", trials_M=1,
                      horizon_T=int(expect.get("twin_horizon", config["horizon_T"])), noise_kappa2=1.0)
    result = run_experiment(sub, jobs)
    reports.append(_trials_report(result, "benchmark_c"))
    if result.ensemble is not None:
        twin = centralized_twin(ExperimentFactory(sub.params).create_context(0, result.problem))
        gap = abs(float(result.ensemble.final("err_hat")[0].max()) - float(twin["err_hat"][-1]))
        reports.append(CheckReport("centralized_twin_gap", gap <= twin_tolerance, gap, twin_tolerance,
                                   twin_final=float(twin["err_hat"][-1])))
    return reports


def determinism(config, expect, jobs, out_dir):
    """
    同一配置运行两次，数值 CSV 逐字节相同
    """
    digests = []
    for run_name in ("first", "second"):
        result = run_experiment(config, jobs, os.path.join(out_dir, run_name))
        digests.append({name: numeric_digest(result.writer.path(name))
                        for name in ("trials.csv", "series.csv") if os.path.isfile(result.writer.path(name))})
    same = bool(digests[0]) and digests[0] == digests[1]
    return [CheckReport("byte_identical_csv", same, digests[1], digests[0])]


ACCEPTANCE_EXPERIMENTS = {
    "corollary1_rate": corollary1_rate,
    "corollary4_regimes": corollary4_regimes,
    "lemma1_mixing": lemma1_mixing,
    "theorem_domination": theorem_domination,
    "lemma_invariants": lemma_invariants,
    "inner_solver_oracle": inner_solver_oracle,
    "high_prob_dscmd": high_prob_dscmd,
    "high_prob_dscda": high_prob_dscda,
    "degeneracy": degeneracy,
    "determinism": determinism,
}


def run_acceptance(name, config, jobs=1, out_dir=None):
    """
    运行一个命名验收实验

    Args:
        name (str): 实验名
        config (ExperimentConfig): 验收配置（verify.expect 给出期望值）
        jobs (int): 并发进程数
        out_dir (str): 输出目录

    Returns:
        list: CheckReport 列表
    """
    expect = (config["verify"] or {}).get("expect", {})
    out_dir = out_dir or config["output_dir"]
    logger.info(f"acceptance experiment {name}")
    return ACCEPTANCE_EXPERIMENTS[name](config, expect, jobs, out_dir)
