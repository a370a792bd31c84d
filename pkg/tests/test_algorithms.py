"""
算法测试：步长、检查点、DSCMD-N / DSCDA-N 单步、运行引擎与集中式对照
"""

import numpy as np
import pytest

from algorithms.context import RunConfig, RunContext
from algorithms.dscda import dscda_step
from algorithms.dscmd import dscmd_step, noisy_mix
from algorithms.engine import SimulationEngine, run, run_ensemble
from algorithms.factory import ExperimentFactory
from algorithms.recorder import checkpoint_grid
from algorithms.state import initial_state
from algorithms.stepsize import StepsizeSchedule, alpha
from algorithms.twin import centralized_twin, projected_subgradient_reference
from geometry.constraint_sets import Box
from geometry.mirror_maps import make_mirror_map
from geometry.regularizers import Regularizer
from network import SingleAgentSchedule, generate_schedule
from noise.decay import NoiseDecay
from noise.sampler import LinkNoiseSampler
from problems.benchmarks import generate_objectives
from problems.composite import CompositeProblem
from problems.objectives import LocalObjective
from problems.oracle import StochasticSubgradientOracle
from problems.reference import solve_reference
from utils.errors import StepFailure, ValidationError


def _context(problem, method="dscmd_n", horizon=20, nu=0.0, sigma=0.0, init=None, kappa1=0.5,
             geometry="euclidean_half_sq_norm", seed=0):
    n = problem.n_agents
    schedule = SingleAgentSchedule() if n == 1 else generate_schedule(n, 1, 1.0 / n, "static_ring", 0)
    dist = "zero" if nu == 0.0 else "uniform_ball"
    return RunContext(
        RunConfig(method, horizon, master_seed=seed, init_override=init),
        schedule,
        NoiseDecay(1.0),
        LinkNoiseSampler(nu, dist, True, seed=seed, n_agents=n),
        StepsizeSchedule(kappa1),
        problem,
        StochasticSubgradientOracle(sigma, seed=seed + 1, n_agents=n),
        make_mirror_map(geometry),
    )


def _regression_problem(n, identical=False, variant="problem1", reg=None):
    objectives, _ = generate_objectives("l1_regression", 1 if identical else n, 2, 6, data_seed=4, cset=Box(2))
    if identical:
        objectives = objectives * n
    if variant == "problem1":
        problem = CompositeProblem("problem1", objectives, Box(2), regularizers=[reg or Regularizer("zero")] * n)
    else:
        problem = CompositeProblem("problem2", objectives, Box(2), eta=reg or Regularizer("zero"))
    solve_reference(problem)
    return problem


def test_stepsize_values():
    assert alpha(StepsizeSchedule(0.5), 3) == pytest.approx(0.5)
    assert StepsizeSchedule(0.25).alpha(15) == pytest.approx(0.5)
    assert StepsizeSchedule(0.5).alpha(0) == 1.0
    np.testing.assert_allclose(StepsizeSchedule(0.5).series(3), [1.0, 2 ** -0.5, 3 ** -0.5, 0.5])
    with pytest.raises(ValidationError):
        StepsizeSchedule(1.0)


def test_checkpoint_grid():
    grid = checkpoint_grid(1000)
    assert grid[0] == 1
    assert grid[-1] == 1000
    assert np.all(np.diff(grid) > 0)
    assert len(checkpoint_grid(10 ** 7)) <= 200
    assert checkpoint_grid(10 ** 7)[-1] == 10 ** 7
    assert checkpoint_grid(0).size == 0
    np.testing.assert_array_equal(checkpoint_grid(3, per_decade=40), [1, 2, 3])


def test_noisy_mix_without_noise_is_plain_mixing():
    W = np.array([[0.5, 0.5], [0.5, 0.5]])
    V = np.array([[0.0, 1.0], [2.0, 3.0]])
    np.testing.assert_allclose(noisy_mix(W, V, 0.3, np.zeros((2, 2, 2))), [[1.0, 2.0], [1.0, 2.0]])
    xi = np.ones((2, 2, 2))
    np.testing.assert_allclose(noisy_mix(W, V, 0.5, xi), [[1.5, 2.5], [1.5, 2.5]])


def test_dscmd_step_two_agents_by_hand():
    quad = LocalObjective("quadratic", A=[[1.0]], b=[3.0])
    problem = CompositeProblem("problem1", [quad, quad], Box(1, -2.0, 2.0))
    ctx = _context(problem, init=[[0.0], [2.0]])
    state = initial_state(problem.cset, 2, init_override=[[0.0], [2.0]])
    new = dscmd_step(state, ctx)
    # y = 1，梯度 -2，α_0 = 1，1 + 2 = 3 截断到 2
    np.testing.assert_allclose(new.X, [[2.0], [2.0]])
    np.testing.assert_allclose(new.diagnostics["Y"], [[1.0], [1.0]])
    np.testing.assert_allclose(new.diagnostics["step_norms"], [1.0, 1.0])
    assert new.t == 1


def test_symmetric_agents_stay_identical():
    problem = _regression_problem(4, identical=True, reg=Regularizer("l1", lambda1=0.1))
    ctx = _context(problem, horizon=30)
    state = initial_state(problem.cset, 4)
    for _ in range(30):
        state = dscmd_step(state, ctx)
        assert np.abs(state.X - state.X[0]).max() <= 1e-12


def test_dscda_single_agent_is_classical_dual_averaging():
    linear = LocalObjective("linear", c=[1.0])
    problem = CompositeProblem("problem2", [linear], Box(1, -100.0, 100.0))
    ctx = _context(problem, method="dscda_n", horizon=5)
    state = initial_state(problem.cset, 1, with_dual=True)
    for t in range(5):
        state = dscda_step(state, ctx)
        # z^{t+1} = t + 1，x^{t+1} = -α_t (t + 1)
        assert state.Z[0, 0] == pytest.approx(t + 1.0)
        assert state.X[0, 0] == pytest.approx(-(t + 1.0) / np.sqrt(t + 1.0))


def test_single_agent_dscmd_matches_projected_subgradient():
    problem = _regression_problem(1)
    ctx = _context(problem, horizon=60, sigma=0.2)
    reference = projected_subgradient_reference(ctx)
    state = initial_state(problem.cset, 1)
    for t in range(60):
        state = dscmd_step(state, ctx)
        assert np.abs(state.X[0] - reference[t + 1]).max() <= 1e-12


def test_engine_records_checkpoints_and_running_average():
    problem = _regression_problem(3, reg=Regularizer("l1", lambda1=0.05))
    ctx = _context(problem, horizon=40, nu=0.04, sigma=0.1)
    trace = run(ctx)
    np.testing.assert_array_equal(trace.checkpoints, checkpoint_grid(40))
    assert trace.err_hat.shape == (len(trace.checkpoints), 3)
    assert trace.status == "ok"
    assert trace.lemma7_violations == 0

    state = initial_state(problem.cset, 3)
    total = np.zeros_like(state.X)
    for _ in range(40):
        state = dscmd_step(state, ctx)
        total += state.X
    np.testing.assert_allclose(trace.x_hat[-1], total / 40)
    np.testing.assert_allclose(trace.x_last[-1], state.X)


def test_running_minimum_is_monotone():
    problem = _regression_problem(3)
    trace = run(_context(problem, horizon=50, nu=0.04, sigma=0.1))
    assert np.all(np.diff(trace.min_err, axis=0) <= 0.0)
    assert np.all(trace.min_err >= -1e-9)


def test_runs_are_deterministic_in_seed():
    problem = _regression_problem(3)
    first = run(_context(problem, horizon=30, nu=0.04, sigma=0.1, seed=5))
    second = run(_context(problem, horizon=30, nu=0.04, sigma=0.1, seed=5))
    other = run(_context(problem, horizon=30, nu=0.04, sigma=0.1, seed=6))
    np.testing.assert_array_equal(first.err_hat, second.err_hat)
    assert not np.array_equal(first.err_hat, other.err_hat)


def test_zero_horizon_run():
    problem = _regression_problem(2)
    trace = run(_context(problem, horizon=0))
    assert trace.status == "ok"
    assert len(trace.checkpoints) == 0
    assert trace.err0.shape == (2,)


def test_failed_step_keeps_earlier_checkpoints():
    problem = _regression_problem(2)
    engine = SimulationEngine(_context(problem, horizon=20))
    original = engine.step_fn

    def flaky(state, ctx):
        if state.t == 5:
            raise FloatingPointError("overflow")
        return original(state, ctx)

    engine.step_fn = flaky
    with pytest.raises(StepFailure) as info:
        engine.run()
    trace = info.value.trace
    assert trace.status == "failed"
    assert "t=5" in trace.failure
    assert len(trace.checkpoints) > 0
    assert trace.checkpoints.max() <= 5


def test_initial_state_validation():
    cset = Box(2)
    with pytest.raises(ValidationError):
        initial_state(cset, 3, init_override=[[0.0, 0.0]] * 2)
    with pytest.raises(ValidationError):
        initial_state(cset, 2, init_override=[5.0, 0.0])
    state = initial_state(cset, 3, with_dual=True, init_override=[0.5, -0.5])
    np.testing.assert_array_equal(state.Z, np.zeros((3, 2)))
    np.testing.assert_array_equal(state.X[2], [0.5, -0.5])


def test_context_rejects_mismatched_method():
    problem = _regression_problem(2, variant="problem2")
    with pytest.raises(ValidationError):
        _context(problem, method="dscmd_n")
    with pytest.raises(ValidationError):
        _context(_regression_problem(2), geometry="p_norm_sq")


def test_centralized_twin_matches_identical_noiseless_agents():
    problem = _regression_problem(3, identical=True)
    ctx = _context(problem, horizon=40)
    trace = run(ctx)
    twin = centralized_twin(ctx)
    np.testing.assert_array_equal(twin["checkpoints"], trace.checkpoints)
    np.testing.assert_allclose(twin["err_hat"], trace.err_hat[:, 0], atol=1e-10)


def test_ensemble_orders_trials_and_varies_noise(make_config):
    params = make_config(horizon_T=30, trials_M=3).params
    traces, problem = run_ensemble(params, 3, jobs=1)
    assert [tr.trial for tr in traces] == [0, 1, 2]
    assert problem.f_star is not None
    assert not np.array_equal(traces[0].err_hat, traces[1].err_hat)


def test_parallel_ensemble_matches_serial(make_config):
    params = make_config(horizon_T=20, trials_M=2).params
    problem = ExperimentFactory(params).create_problem()
    serial, _ = run_ensemble(params, 2, jobs=1, problem=problem)
    parallel, _ = run_ensemble(params, 2, jobs=2, problem=problem)
    for a, b in zip(serial, parallel):
        np.testing.assert_array_equal(a.err_hat, b.err_hat)
