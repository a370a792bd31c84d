"""
问题模块测试：局部目标、复合目标、随机预言机、参考解与基准实例
"""

import numpy as np
import pytest

from geometry.constraint_sets import Box, Simplex
from geometry.regularizers import Regularizer
from problems.benchmarks import BENCHMARK_PROBLEMS, build_benchmark, generate_objectives
from problems.composite import CompositeProblem, evaluate_F
from problems.objectives import LocalObjective, ObjectiveStack
from problems.oracle import StochasticSubgradientOracle, stochastic_subgradient, subgradient
from problems import reference
from problems.reference import CuttingPlaneModel, optimality_lower_bound, solve_reference
from utils.errors import ReferenceSolveUnverified, ValidationError

ABS = LocalObjective("l1_regression", A=[[1.0]], b=[0.0])


def test_subgradient_examples():
    np.testing.assert_allclose(subgradient(ABS, np.array([2.0])), [1.0])
    np.testing.assert_allclose(subgradient(ABS, np.array([0.0])), [0.0])
    quad = LocalObjective("quadratic", A=[[1.0]], b=[3.0])
    np.testing.assert_allclose(quad.subgradient(np.array([1.0])), [-2.0])
    assert quad.value(np.array([1.0])) == pytest.approx(2.0)


def test_hinge_and_linear_subgradients():
    hinge = LocalObjective("hinge", A=[[1.0, 0.0], [0.0, 1.0]], b=[1.0, -1.0])
    x = np.array([0.5, 2.0])
    # 第一个样本间隔 0.5 < 1 活跃，第二个间隔 -2 也活跃
    np.testing.assert_allclose(hinge.subgradient(x), [-1.0, 1.0])
    assert hinge.value(x) == pytest.approx(0.5 + 3.0)
    linear = LocalObjective("linear", c=[1.0, -2.0])
    np.testing.assert_allclose(linear.subgradient(x), [1.0, -2.0])


def test_objective_stack_matches_individual_objectives():
    cset = Box(3)
    objectives, _ = generate_objectives("least_abs_dev", 4, 3, 6, data_seed=2, cset=cset)
    stack = ObjectiveStack(objectives)
    assert stack.stacked
    X = np.random.default_rng(0).uniform(-1, 1, size=(4, 3))
    expected = np.stack([obj.subgradient(X[i]) for i, obj in enumerate(objectives)])
    np.testing.assert_allclose(stack.subgradients(X), expected)


def test_objective_requires_data():
    with pytest.raises(ValidationError):
        LocalObjective("quadratic", A=[[1.0, 2.0]])
    with pytest.raises(ValidationError):
        LocalObjective("cubic")


def test_evaluate_F_examples():
    box = Box(1, -10.0, 10.0)
    p1 = CompositeProblem("problem1", [ABS, ABS], box)
    assert evaluate_F(p1, np.array([3.0])) == pytest.approx(6.0)

    p2 = CompositeProblem("problem2", [ABS], box, eta=Regularizer("half_l2_sq", lambda2=1.0))
    assert evaluate_F(p2, np.array([2.0])) == pytest.approx(4.0)

    p3 = CompositeProblem("problem1", [LocalObjective("zero")], box,
                          regularizers=[Regularizer("l1", lambda1=1.0)])
    assert evaluate_F(p3, np.array([-2.0])) == pytest.approx(2.0)


def test_problem_rejects_mismatched_dimensions():
    with pytest.raises(ValidationError):
        CompositeProblem("problem1", [LocalObjective("linear", c=[1.0, 2.0])], Box(3))
    with pytest.raises(ValidationError):
        CompositeProblem("problem3", [ABS], Box(1))


def test_solve_reference_two_quadratics():
    box = Box(1, -10.0, 10.0)
    objectives = [LocalObjective("quadratic", A=[[np.sqrt(2.0)]], b=[np.sqrt(2.0) * i]) for i in (1, 2)]
    problem = CompositeProblem("problem1", objectives, box)
    x_star, f_star = solve_reference(problem, seed=0)
    assert x_star[0] == pytest.approx(1.5, abs=1e-6)
    assert f_star == pytest.approx(0.5, abs=1e-8)
    assert problem.f_star == f_star
    assert problem.dist_to_solution(np.array([2.5])) == pytest.approx(1.0, abs=1e-6)


def test_solve_reference_problem2_with_kink():
    abs_shift = LocalObjective("l1_regression", A=[[1.0]], b=[1.0])
    problem = CompositeProblem("problem2", [abs_shift], Box(1, -5.0, 5.0),
                               eta=Regularizer("half_l2_sq", lambda2=1.0))
    x_star, f_star = solve_reference(problem)
    assert x_star[0] == pytest.approx(1.0, abs=1e-4)
    assert f_star == pytest.approx(0.5, abs=1e-6)
    assert problem.certificate["min_gap"] >= -1e-5


def test_solve_reference_linear_on_simplex_picks_a_vertex():
    objectives, _ = generate_objectives("linear", 3, 4, 1, data_seed=5)
    problem = CompositeProblem("problem1", objectives, Simplex(4))
    _, f_star = solve_reference(problem)
    c = sum(obj.c for obj in objectives)
    assert f_star == pytest.approx(c.min(), abs=1e-6)


@pytest.mark.parametrize("name", ["a", "b", "c"])
def test_reference_certificate_is_two_sided(name):
    problem = build_benchmark(name, 3, data_seed=0, overrides={"dim": 3, "samples_per_agent": 8})
    _, f_star = solve_reference(problem)
    cert = problem.certificate
    assert cert["min_gap"] >= -1e-5
    assert cert["max_gap"] <= 1e-5
    assert cert["spread"] <= 1e-5
    assert 0.0 <= cert["optimality_gap"] + 1e-9
    assert cert["optimality_gap"] <= cert["optimality_tol"]
    assert cert["lower_bound"] <= f_star + 1e-9


def test_cutting_plane_lower_bound_is_valid_and_tight():
    box = Box(1, -10.0, 10.0)
    objectives = [LocalObjective("quadratic", A=[[np.sqrt(2.0)]], b=[np.sqrt(2.0) * i]) for i in (1, 2)]
    problem = CompositeProblem("problem1", objectives, box)
    model = CuttingPlaneModel(problem)
    model.add(np.array([[-10.0], [10.0], [1.4], [1.6]]))
    lower, rounds = optimality_lower_bound(model, 0.5, 1e-6)
    assert lower <= 0.5 + 1e-9
    assert 0.5 - lower <= 1e-6
    assert rounds >= 1
    assert model.best_value >= 0.5


def _kink_problem():
    abs_shift = LocalObjective("l1_regression", A=[[1.0]], b=[1.0])
    return CompositeProblem("problem2", [abs_shift], Box(1, -5.0, 5.0), eta=Regularizer("half_l2_sq", lambda2=1.0))


def test_wrong_reference_point_is_rejected(monkeypatch):
    problem = _kink_problem()
    monkeypatch.setattr(reference, "_solve_conic", lambda p: (p.cset.center(), "stub"))
    with pytest.raises(ReferenceSolveUnverified):
        solve_reference(problem)
    assert problem.f_star is None


def test_unconverged_restarts_are_rejected():
    # 正确的参考值，但起点只走一步：起点值与 f* 相差远大于 1e-5
    problem = _kink_problem()
    with pytest.raises(ReferenceSolveUnverified, match="restarts disagree"):
        solve_reference(problem, iters=1)


def test_gaussian_oracle_is_unbiased_and_reproducible():
    oracle = StochasticSubgradientOracle(sigma=0.5, seed=3, n_agents=1)
    draws = np.concatenate([oracle.perturbation_block(t, 2) for t in range(4000)])
    np.testing.assert_allclose(draws.mean(axis=0), 0.0, atol=4 * 0.5 / np.sqrt(4000))
    np.testing.assert_array_equal(oracle.perturbation_block(9, 2), oracle.perturbation_block(9, 2))
    assert oracle.adjusted_G(3.0, 4) == pytest.approx(np.sqrt(9.0 + 4 * 0.25))


def test_bounded_oracle_respects_guard():
    oracle = StochasticSubgradientOracle(sigma=1.0, bounded=True, seed=1, n_agents=5)
    exact = np.ones((5, 3))
    guard = oracle.adjusted_G(np.sqrt(3.0), 3)
    for t in range(50):
        noisy = oracle.sample(exact, t, G_guard=guard)
        assert np.linalg.norm(noisy, axis=1).max() <= guard + 1e-12


def test_single_agent_query_matches_batched_row():
    objectives, _ = generate_objectives("l1_regression", 3, 2, 4, data_seed=0, cset=Box(2))
    oracle = StochasticSubgradientOracle(sigma=0.3, seed=8, n_agents=3)
    X = np.array([[0.1, 0.2], [-0.3, 0.5], [0.0, -0.9]])
    batched = oracle.sample(ObjectiveStack(objectives).subgradients(X), 4)
    single = stochastic_subgradient(oracle, objectives[1], X[1], 4, agent=1)
    np.testing.assert_allclose(single, batched[1])


def test_zero_sigma_oracle_is_exact():
    oracle = StochasticSubgradientOracle(sigma=0.0, seed=0, n_agents=2)
    exact = np.array([[1.0, -1.0], [2.0, 0.5]])
    np.testing.assert_array_equal(oracle.sample(exact, 11), exact)


@pytest.mark.parametrize("name", sorted(BENCHMARK_PROBLEMS))
def test_benchmarks_are_deterministic(name):
    a = build_benchmark(name, 4, data_seed=3)
    b = build_benchmark(name, 4, data_seed=3)
    assert a.metadata["data_checksum"] == b.metadata["data_checksum"]
    assert a.variant == BENCHMARK_PROBLEMS[name]["problem_variant"]
    assert a.n_agents == 4


def test_unknown_benchmark():
    with pytest.raises(ValidationError):
        build_benchmark("z", 3)
