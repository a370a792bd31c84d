"""
分析模块测试：界常数、理论界、试验统计、速率拟合与检查报告
"""

import numpy as np
import pytest

from algorithms.factory import ExperimentFactory
from algorithms.recorder import RunTrace, checkpoint_grid
from analysis import (
    BoundConstants,
    ErrorCurve,
    TrialEnsemble,
    almost_sure_diagnostics,
    compute_bound_constants,
    corollary1_bound,
    corollary1_constant,
    corollary3_bound,
    corollary3_prime_bound,
    corollary3_rate,
    corollary4_regime,
    disagreement_report,
    domination_check,
    expected_error_curve,
    fit_rate,
    high_prob_check,
    lemma4_bound,
    lemma5_bound,
    lemma10_bound,
    mixed_tail,
    proposition2_bound,
    regime_check,
    tail_window,
    theorem1_bound,
    theorem1_sum_bound,
    theorem2_bound,
    theorem3_bound,
    theorem3_sum_bound,
    theorem4_bound,
)
from analysis.rates import RateFit
from utils.errors import ConfigMismatch, DegenerateFit, ExcludedExponent, ValidationError


def _constants(**overrides):
    values = dict(N=2, B=1, theta=0.25, Theta=2.0, gamma=0.5, G_f=1.0, G_chi=0.5, sigma_phi=1.0,
                  L_phi=2.0, nu=0.04, D_X=2.0, D_phi_sq=3.0, x0_norm=1.0, psi_star=0.5)
    values.update(overrides)
    return BoundConstants(**values)


def _random_constants(rng):
    return BoundConstants(
        N=int(rng.integers(2, 10)), B=1, theta=0.05, Theta=rng.uniform(1.0, 2.0), gamma=rng.uniform(0.1, 0.99),
        G_f=rng.uniform(0.1, 5.0), G_chi=rng.uniform(0.0, 2.0), G_eta=rng.uniform(0.0, 2.0),
        L_phi=rng.uniform(1.0, 10.0), nu=rng.uniform(0.0, 1.0), D_X=rng.uniform(0.5, 5.0),
        D_phi_sq=rng.uniform(0.5, 5.0), psi_star=rng.uniform(0.0, 2.0), x0_norm=rng.uniform(0.0, 2.0),
    )


def _trace(trial, err_hat, checkpoints, method="dscmd_n", **fields):
    err_hat = np.asarray(err_hat, dtype=float)
    trace = RunTrace(method, trial, err_hat.shape[1])
    trace.checkpoints = np.asarray(checkpoints, dtype=int)
    trace.err_hat = err_hat
    for name, value in fields.items():
        setattr(trace, name, np.asarray(value, dtype=float))
    return trace


def test_derived_constants_by_hand():
    c = _constants()
    assert c.mix == pytest.approx(8.0)
    assert c.grad_sum == pytest.approx(4.0)
    assert c.disagreement_factor == pytest.approx(40.0)
    assert c.C1 == pytest.approx(64.0)
    assert c.C2 == pytest.approx(6.0)
    assert c.C3 == pytest.approx(242.5)
    assert c.C4 == pytest.approx(65.2)
    assert c.C5 == pytest.approx(0.8 * np.sqrt(6.0))
    assert c.C6 == pytest.approx(0.16)
    assert c.K == pytest.approx(3.0)
    assert c.to_dict()["C3"] == pytest.approx(242.5)


def test_noise_free_constants_drop_noise_terms():
    c = _constants(nu=0.0)
    assert c.C4 == 0.0
    assert c.C5 == 0.0
    assert c.C6 == 0.0


def test_theorem1_closed_form_at_small_horizon():
    c = _constants()
    C1, C2, C3, C4, C5, C6 = c.as_tuple()
    s2 = np.sqrt(2.0)
    expected = (C1 + 3 * C6) / 3 + 4 * C4 * np.log(3) / 3 + (s2 * C2 + 2 * s2 * C3 + 2 * s2 * C5) / np.sqrt(3)
    assert theorem1_bound(c, 0.5, 1.0, 3) == pytest.approx(expected, rel=1e-12)


def test_bounds_vanish_with_zero_constants():
    c = BoundConstants.zeros()
    Ts = np.arange(1, 50)
    assert np.all(theorem1_sum_bound(c, 0.5, 1.0, Ts) == 0.0)
    assert theorem1_bound(c, 0.5, 1.0, 10) == 0.0
    assert theorem3_bound(c, 0.5, 0.75, 10) == 0.0
    assert theorem3_sum_bound(c, 0.5, 0.75, 10) == 0.0
    assert lemma5_bound(c, 0.5, 1.0, 10) == 0.0
    assert lemma10_bound(c, 1.0, 10) == 0.0
    assert lemma4_bound(c, 0.5, 3) == 0.0


def test_finite_sum_is_dominated_by_closed_form():
    rng = np.random.default_rng(0)
    Ts = np.arange(3, 400)
    for _ in range(20):
        c = _random_constants(rng)
        sums = theorem1_sum_bound(c, 0.5, 1.0, Ts)
        closed = theorem1_bound(c, 0.5, 1.0, Ts)
        assert np.all(sums <= closed * (1 + 1e-12))


def test_corollary1_envelope():
    rng = np.random.default_rng(1)
    Ts = np.arange(3, 2000)
    for _ in range(20):
        c = _random_constants(rng)
        assert np.all(theorem1_bound(c, 0.5, 1.0, Ts) <= corollary1_bound(c, Ts) * (1 + 1e-12))
    assert corollary1_bound(_constants(), 4) == pytest.approx(1.5 * corollary1_constant(_constants()))
    with pytest.raises(ValidationError):
        corollary1_bound(_constants(), 2)


def test_high_probability_bounds_reduce_at_delta_one():
    c = _constants()
    Ts = np.arange(1, 100)
    np.testing.assert_allclose(theorem2_bound(c, 0.5, 1.0, Ts, 1.0), theorem1_sum_bound(c, 0.5, 1.0, Ts))
    assert np.all(theorem2_bound(c, 0.5, 1.0, Ts, 0.1) > theorem1_sum_bound(c, 0.5, 1.0, Ts))
    assert proposition2_bound(c, 3, 1.0) == pytest.approx(theorem1_bound(c, 0.5, 1.0, 3))
    assert theorem4_bound(c, 0.5, 1.0, 10, 0.05) > theorem4_bound(c, 0.5, 1.0, 10, 0.5)
    with pytest.raises(ValidationError):
        theorem2_bound(c, 0.5, 1.0, 10, 0.0)


def test_excluded_exponents():
    c = _constants()
    with pytest.raises(ExcludedExponent):
        theorem1_bound(c, 0.5, 0.75, 10)
    with pytest.raises(ExcludedExponent):
        theorem1_bound(c, 0.6, 0.5, 10)
    with pytest.raises(ExcludedExponent):
        theorem3_bound(c, 0.5, 0.5, 10)
    with pytest.raises(ExcludedExponent):
        corollary4_regime(c, 0.25, 0.1)
    with pytest.raises(ValidationError):
        theorem3_bound(c, 0.5, 1.5, 10)


def test_corollary3_envelopes():
    rng = np.random.default_rng(2)
    Ts = np.arange(2, 1000)
    for _ in range(20):
        c = _random_constants(rng)
        closed = theorem3_bound(c, 0.5, 0.75, Ts)
        assert np.all(closed <= corollary3_prime_bound(c, 0.75, Ts) * (1 + 1e-12))
        assert np.all(closed <= corollary3_bound(c, 0.5, 0.75, Ts) * (1 + 1e-12))
    assert corollary3_rate(0.5, 0.25) == pytest.approx(0.25)
    assert corollary3_rate(0.7, 0.9) == pytest.approx(0.3)


def test_corollary4_regimes():
    c = _constants()
    assert corollary4_regime(c, 0.3, 0.1).regime == "slow"
    assert corollary4_regime(c, 0.3, 0.1).exponent == pytest.approx(0.3)
    critical = corollary4_regime(c, 0.5, 0.1)
    assert critical.regime == "critical"
    assert critical.evaluate(100) == pytest.approx(4 * critical.constant * np.sqrt(np.log(100)) / 10)
    fast = corollary4_regime(c, 0.75, 0.1)
    assert fast.regime == "fast"
    assert fast.evaluate(100) == pytest.approx(2 * fast.constant / 10)


def test_mixed_tail_recursion():
    r = np.array([1.0, 0.5, 0.25, 0.125])
    S = mixed_tail(0.5, r)
    np.testing.assert_allclose(S, [0.0, 0.0, 1.0, 0.5 * 1.0 + 0.5])


def test_lemma_bounds_by_hand():
    c = _constants()
    assert lemma4_bound(c, 0.5, 3) == pytest.approx(1.5 / 2.0)
    expected = 2 * 8.0 * 1.0 + 40.0 * sum(1.5 / np.sqrt(t + 1) + 2 * 0.2 / (t + 1) for t in range(3))
    assert lemma5_bound(c, 0.5, 1.0, 2) == pytest.approx(expected)
    # t = 1：S_1 = 0，r_0 = 1
    assert lemma10_bound(c, 1.0, 1) == pytest.approx(10.0 * 1.0 + 2 * 2 * 0.2)


def test_ensemble_statistics():
    grid = [1, 2, 4]
    traces = [
        _trace(0, [[1.0, 2.0], [0.5, 0.4], [0.2, 0.1]], grid),
        _trace(1, [[3.0, 0.0], [0.5, 0.6], [0.2, 0.3]], grid),
    ]
    failed = _trace(2, [[9.0, 9.0]], [1])
    failed.status = "failed"
    ensemble = TrialEnsemble(traces + [failed])
    assert ensemble.M == 2
    assert ensemble.horizon == 4
    curve = expected_error_curve(ensemble, agent=None)
    np.testing.assert_allclose(curve.mean, [2.5, 0.55, 0.25])
    np.testing.assert_allclose(curve.stderr, [np.std([2.0, 3.0], ddof=1) / np.sqrt(2), 0.05, 0.05])
    agent0 = expected_error_curve(ensemble, agent=0)
    np.testing.assert_allclose(agent0.mean, [2.0, 0.5, 0.2])
    with pytest.raises(ValidationError):
        expected_error_curve(ensemble, agent=5)


def test_single_trial_has_no_standard_error():
    ensemble = TrialEnsemble([_trace(0, [[1.0], [0.5]], [1, 2])])
    curve = expected_error_curve(ensemble)
    assert not curve.stderr_defined
    np.testing.assert_allclose(curve.mean, [1.0, 0.5])


def test_ensemble_rejects_mismatched_grids():
    with pytest.raises(ValidationError):
        TrialEnsemble([_trace(0, [[1.0], [0.5]], [1, 2]), _trace(1, [[1.0], [0.5]], [1, 3])])


def test_fit_rate_recovers_slopes():
    grid = checkpoint_grid(10_000)
    sqrt_curve = ErrorCurve(grid, 3.0 / np.sqrt(grid), np.zeros(len(grid)))
    linear_curve = ErrorCurve(grid, 2.0 / grid, np.zeros(len(grid)))
    fit = fit_rate(sqrt_curve, (10, 10_000))
    assert fit.slope == pytest.approx(-0.5, abs=1e-10)
    assert fit.r_squared == pytest.approx(1.0)
    assert fit_rate(linear_curve).slope == pytest.approx(-1.0, abs=1e-10)
    assert fit.within(-0.6)
    assert not fit.within(-0.7)
    assert tail_window(10_000) == (100, 10_000)


def test_fit_rate_degenerate_cases():
    grid = np.array([1, 2, 3, 4, 5])
    with pytest.raises(DegenerateFit):
        fit_rate(ErrorCurve(grid, np.zeros(5), np.zeros(5)), (1, 5))
    with pytest.raises(DegenerateFit):
        fit_rate(ErrorCurve(grid, np.ones(5), np.zeros(5)), (1, 3))


def test_regime_check_orders_slopes():
    ordered = regime_check({0.25: RateFit(-0.25, 0, (1, 10), 1, 5), 0.75: RateFit(-0.5, 0, (1, 10), 1, 5)})
    assert ordered["ordered"]
    reversed_fits = {0.25: RateFit(-0.6, 0, (1, 10), 1, 5), 0.75: RateFit(-0.5, 0, (1, 10), 1, 5)}
    assert not regime_check(reversed_fits)["ordered"]


def test_domination_check_counts_violations():
    grid = [1, 2, 3]
    c = _constants()
    bound = theorem1_sum_bound(c, 0.5, 1.0, np.array(grid))
    below = TrialEnsemble([_trace(0, np.c_[0.5 * bound, 0.1 * bound], grid)])
    assert domination_check(below, c, 0.5, 1.0).passed
    above = TrialEnsemble([_trace(0, np.c_[2.0 * bound, 0.1 * bound], grid)])
    report = domination_check(above, c, 0.5, 1.0)
    assert not report.passed
    assert report.details["violations"] == 3
    assert report.to_dict()["name"] == "theorem_domination"


def test_high_prob_check_coverage():
    grid = [1, 10]
    traces = [_trace(k, [[1.0], [0.1 * (k + 1)]], grid) for k in range(10)]
    ensemble = TrialEnsemble(traces, params={"grad_bounded": True})
    assert high_prob_check(ensemble, 0.1, lambda delta, T: 0.95).measured == pytest.approx(0.9)
    assert high_prob_check(ensemble, 0.1, lambda delta, T: 0.95).passed
    assert not high_prob_check(ensemble, 0.1, lambda delta, T: 0.0).passed
    assert high_prob_check(ensemble, 1.0, lambda delta, T: 0.0).passed
    with pytest.raises(ConfigMismatch):
        high_prob_check(TrialEnsemble(traces, params={}), 0.1, lambda delta, T: 1.0)


def test_disagreement_report_with_consensus():
    grid = [1, 2, 3]
    trace = _trace(0, np.ones((3, 2)), grid, cum_disagreement=np.zeros((3, 2)))
    report = disagreement_report(TrialEnsemble([trace]), _constants(nu=0.0), 0.5, 1.0)
    assert report.name == "lemma5_disagreement"
    assert report.passed
    np.testing.assert_array_equal(report.measured, 0.0)
    unbounded = disagreement_report(TrialEnsemble([trace]))
    assert np.all(np.isnan(unbounded.expected))


def test_almost_sure_diagnostics():
    grid = [1, 2, 3]
    trace = _trace(0, [[0.5], [0.3], [0.2]], grid, min_err=[[0.4], [0.2], [0.1]],
                   dist_hat=[[1.0], [0.5], [0.2]], err_last=[[0.4], [0.2], [0.15]])
    report = almost_sure_diagnostics(trace, {"min_err": 0.2, "err_hat": 0.3})
    assert report.passed
    assert report.details["min_err_monotone"]
    assert not almost_sure_diagnostics(trace, {"err_hat": 0.1}).passed
    trace.min_err = np.array([[0.4], [0.5], [0.1]])
    assert not almost_sure_diagnostics(trace).passed


def test_almost_sure_average_against_running_minimum():
    grid = [1, 2, 3]
    trace = _trace(0, [[0.5], [0.3], [0.2]], grid, min_err=[[0.4], [0.2], [0.1]])
    report = almost_sure_diagnostics(trace, {"average_above_min": 1.0})
    assert report.passed
    assert report.details["convex_combination_holds"]
    assert report.details["average_above_min_fraction"] == pytest.approx(1.0)

    # 第二个检查点上平均点优于运行最小值
    trace.err_hat = np.array([[0.5], [0.1], [0.2]])
    informational = almost_sure_diagnostics(trace)
    assert informational.passed
    assert informational.details["convex_combination_holds"] is False
    assert informational.details["average_above_min_fraction"] == pytest.approx(2.0 / 3.0)
    assert not almost_sure_diagnostics(trace, {"average_above_min": 1.0}).passed
    assert almost_sure_diagnostics(trace, {"average_above_min": 0.5}).passed


@pytest.mark.parametrize("method, overrides", [
    ("dscmd_n", {}),
    ("dscda_n", {"regularizer_global": "half_l2_sq", "lambda2": 0.1}),
])
def test_constants_from_a_run_context(make_config, method, overrides):
    params = make_config(method=method, **overrides).params
    factory = ExperimentFactory(params)
    ctx = factory.create_context(0, factory.create_problem())
    c = compute_bound_constants(ctx)
    assert c.N == 3
    assert c.nu == pytest.approx(0.01)
    assert all(np.isfinite(v) and v >= 0.0 for v in c.as_tuple())
    assert c.G_f >= ctx.problem.G_f()
    if method == "dscda_n":
        assert c.psi_star >= 0.0
        assert c.G_eta > 0.0
