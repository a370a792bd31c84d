"""
基准实例模块
按种子生成各智能体的数据并组装复合问题
"""

import hashlib

import numpy as np

from geometry.constraint_sets import make_constraint_set
from geometry.regularizers import make_regularizer
from problems.composite import CompositeProblem
from problems.objectives import LocalObjective
from utils.errors import ValidationError
from utils.rng import STREAM_DATA, seeded_generator


def generate_objectives(kind, n_agents, dim, samples, data_seed, cset=None):
    """
    生成 N 个局部目标

    回归类目标：A_i 为标准正态，b_i = A_i x_true + 0.1·噪声，x_true 取集合内一点；
    hinge：标签 b = sign(<a, x_true> + 0.1·噪声)；linear：c_i 为标准正态；
    二次目标的 A_i 除以 √m，使各项量级与样本数无关。

    Args:
        kind (str): 目标类型
        n_agents (int): 智能体数
        dim (int): 维数
        samples (int): 每个智能体的样本数 m
        data_seed (int): 数据种子
        cset (ConstraintSet): 约束集合，用来挑选 x_true

    Returns:
        tuple: (目标列表, 数据校验和)
    """
    rng = seeded_generator(data_seed, STREAM_DATA)
    x_true = rng.standard_normal(dim)
    if cset is not None:
        x_true = cset.project(0.5 * x_true)
    objectives = []
    digest = hashlib.sha256()
    for _ in range(n_agents):
        if kind == "zero":
            objectives.append(LocalObjective("zero"))
            continue
        if kind == "linear":
            c = rng.standard_normal(dim)
            digest.update(c.tobytes())
            objectives.append(LocalObjective("linear", c=c))
            continue
        A = rng.standard_normal((samples, dim))
        noise = 0.1 * rng.standard_normal(samples)
        if kind == "hinge":
            b = np.sign(A @ x_true + noise)
            b[b == 0] = 1.0
        else:
            b = A @ x_true + noise
        if kind == "quadratic":
            A = A / np.sqrt(samples)
            b = b / np.sqrt(samples)
        digest.update(A.tobytes())
        digest.update(b.tobytes())
        objectives.append(LocalObjective(kind, A=A, b=b))
    return objectives, digest.hexdigest()


def build_problem(params):
    """
    由配置字典组装复合问题（不求参考解）

    Args:
        params (dict): 需要 problem_variant, objective_kind, n_agents, dim, samples_per_agent,
            data_seed, set_kind, set_params, regularizer_local / regularizer_global,
            lambda1, lambda2, entropy_floor

    Returns:
        CompositeProblem: 问题实例
    """
    cset = make_constraint_set(params["set_kind"], params["dim"], params.get("set_params"))
    objectives, checksum = generate_objectives(
        params["objective_kind"], params["n_agents"], params["dim"],
        params["samples_per_agent"], params["data_seed"], cset,
    )
    floor = params.get("entropy_floor", 1e-12)
    metadata = {
        "data_seed": params["data_seed"],
        "samples_per_agent": params["samples_per_agent"],
        "data_checksum": checksum,
    }
    if params["problem_variant"] == "problem1":
        regs = [
            make_regularizer(params["regularizer_local"], params["lambda1"], params["lambda2"], floor)
            for _ in range(params["n_agents"])
        ]
        return CompositeProblem("problem1", objectives, cset, regularizers=regs, metadata=metadata)
    eta = make_regularizer(params["regularizer_global"], params["lambda1"], params["lambda2"], floor)
    return CompositeProblem("problem2", objectives, cset, eta=eta, metadata=metadata)


# 三个基准实例的问题部分；网络、噪声与算法部分见 SimConfig.BENCHMARK_PRESETS
BENCHMARK_PROBLEMS = {
    "a": {
        "problem_variant": "problem1",
        "objective_kind": "least_abs_dev",
        "dim": 5,
        "samples_per_agent": 20,
        "set_kind": "box",
        "set_params": {"lower": -1.0, "upper": 1.0},
        "regularizer_local": "l1",
        "regularizer_global": "zero",
        "lambda1": 0.01,
        "lambda2": 0.0,
    },
    "b": {
        "problem_variant": "problem2",
        "objective_kind": "quadratic",
        "dim": 5,
        "samples_per_agent": 20,
        "set_kind": "euclidean_ball",
        "set_params": {"radius": 1.0},
        "regularizer_local": "zero",
        "regularizer_global": "mixed_l1_l2",
        "lambda1": 0.05,
        "lambda2": 0.1,
    },
    "c": {
        "problem_variant": "problem1",
        "objective_kind": "linear",
        "dim": 5,
        "samples_per_agent": 1,
        "set_kind": "simplex",
        "set_params": {},
        "regularizer_local": "zero",
        "regularizer_global": "zero",
        "lambda1": 0.0,
        "lambda2": 0.0,
    },
}


def build_benchmark(name, n_agents, data_seed=0, overrides=None):
    """
    按名字组装基准实例 (a) / (b) / (c)

    Args:
        name (str): 基准名
        n_agents (int): 智能体数
        data_seed (int): 数据种子
        overrides (dict): 覆盖预设中的问题键

    Returns:
        CompositeProblem: 问题实例
    """
    if name not in BENCHMARK_PROBLEMS:
        raise ValidationError(f"unknown benchmark {name!r}", key="benchmark",
                              admissible=str(sorted(BENCHMARK_PROBLEMS)))
    params = dict(BENCHMARK_PROBLEMS[name])
    params.update(overrides or {})
    params["n_agents"] = n_agents
    params["data_seed"] = data_seed
    params.setdefault("entropy_floor", 1e-12)
    return build_problem(params)
