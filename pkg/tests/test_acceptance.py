"""
验收实验测试：小规模参数下运行各命名实验，全尺寸运行标记为 slow
"""

import numpy as np
import pytest

from experiment.acceptance import ACCEPTANCE_EXPERIMENTS, brute_force_argmin, run_acceptance
from experiment.commands import EXIT_OK, cmd_verify
from experiment.config import ACCEPTANCE_NAMES, ExperimentConfig
from geometry.constraint_sets import Box, EuclideanBall, Simplex


def _verify_config(tmp_path, name, expect=None, **params):
    data = {"output_dir": str(tmp_path / name), "verify": {"name": name, "expect": expect or {}}}
    data.update(params)
    return ExperimentConfig.from_dict(data)


def test_every_name_has_an_experiment():
    assert set(ACCEPTANCE_EXPERIMENTS) == set(ACCEPTANCE_NAMES)


def test_brute_force_on_box():
    centre = np.array([0.3, -2.0])
    best = brute_force_argmin(lambda X: np.sum((X - centre) ** 2, axis=1), Box(2))
    np.testing.assert_allclose(best, [0.3, -1.0], atol=2e-4)


def test_brute_force_on_ball_and_simplex():
    best = brute_force_argmin(lambda X: -X[:, 0] - X[:, 1], EuclideanBall(2))
    np.testing.assert_allclose(best, [np.sqrt(0.5), np.sqrt(0.5)], atol=2e-4)
    best = brute_force_argmin(lambda X: (X[:, 0] - 0.7) ** 2, Simplex(2))
    np.testing.assert_allclose(best, [0.7, 0.3], atol=2e-4)


def test_inner_solver_oracle_small(tmp_path):
    config = _verify_config(tmp_path, "inner_solver_oracle", {"instances": 2})
    reports = run_acceptance("inner_solver_oracle", config)
    assert reports
    failing = [r.name for r in reports if not r.passed]
    assert failing == []
    assert all(r.details["instances"] == 2 for r in reports)


def test_lemma1_mixing_small(tmp_path):
    config = _verify_config(tmp_path, "lemma1_mixing", {"schedules": 4, "horizon": 25, "max_agents": 4})
    reports = run_acceptance("lemma1_mixing", config)
    assert len(reports) == 4
    assert all(r.passed for r in reports)
    assert {r.details["kind"] for r in reports} >= {"static_ring", "periodic_partition", "random_B_connected"}


def test_determinism_small(tmp_path, small_params):
    config = _verify_config(tmp_path, "determinism", **{k: v for k, v in small_params.items() if k != "output_dir"})
    reports = run_acceptance("determinism", config)
    assert [r.name for r in reports] == ["byte_identical_csv"]
    assert reports[0].passed
    assert set(reports[0].measured) == {"trials.csv", "series.csv"}


def test_degeneracy_small(tmp_path):
    config = _verify_config(
        tmp_path, "degeneracy", {"twin_horizon": 50},
        n_agents=1, noise_dist="zero", mirror_map="euclidean_half_sq_norm", objective_kind="least_abs_dev",
        dim=2, samples_per_agent=5, regularizer_local="zero", lambda1=0.0, grad_noise_sigma=0.1,
        horizon_T=80, trials_M=1,
    )
    reports = {r.name: r for r in run_acceptance("degeneracy", config)}
    assert reports["single_agent_degeneracy"].passed
    assert reports["single_agent_degeneracy"].details["steps"] == 80
    assert reports["benchmark_c_trials_ok"].passed
    assert np.isfinite(reports["centralized_twin_gap"].measured)


def test_theorem_domination_small(tmp_path):
    config = _verify_config(tmp_path, "theorem_domination", horizon_T=100, trials_M=2)
    reports = {r.name: r for r in run_acceptance("theorem_domination", config)}
    assert set(reports) == {"benchmark_a_trials_ok", "benchmark_a_theorem_domination",
                            "benchmark_b_trials_ok", "benchmark_b_theorem_domination"}
    assert all(r.passed for r in reports.values())


@pytest.mark.slow
@pytest.mark.parametrize("name", ACCEPTANCE_NAMES)
def test_shipped_acceptance_experiment(name, tmp_path):
    assert cmd_verify(name, output_dir=str(tmp_path / name)) == EXIT_OK
