"""
几何模块测试：镜像映射、约束集合、正则项与内层求解
"""

import numpy as np
import pytest

from experiment.acceptance import brute_force_argmin
from geometry.constraint_sets import Box, EuclideanBall, Simplex, make_constraint_set, project_simplex
from geometry.inner_solvers import dual_averaging_projection, mirror_step, optimality_residual
from geometry.mirror_maps import bregman, make_mirror_map, separate_convexity_check
from geometry.regularizers import Regularizer, soft_threshold
from utils.errors import DomainViolation, ValidationError

EUCLID = make_mirror_map("euclidean_half_sq_norm")
ENTROPY = make_mirror_map("neg_entropy")


def test_bregman_reference_values():
    assert bregman(EUCLID, np.array([1.0, 2.0]), np.zeros(2)) == pytest.approx(2.5)
    value = bregman(ENTROPY, np.array([0.5, 0.5]), np.array([0.25, 0.75]))
    assert value == pytest.approx(0.143841, abs=1e-6)


def test_bregman_is_vectorized_and_nonnegative():
    rng = np.random.default_rng(0)
    x = rng.dirichlet(np.ones(3), size=50)
    y = rng.dirichlet(np.ones(3), size=50)
    values = ENTROPY.bregman(x, y)
    assert values.shape == (50,)
    assert np.all(values >= 0.0)
    assert ENTROPY.bregman(x[0], x[0]) == pytest.approx(0.0, abs=1e-14)


def test_neg_entropy_rejects_points_outside_domain():
    with pytest.raises(DomainViolation):
        ENTROPY.check_domain(np.array([-0.1, 1.1]))


@pytest.mark.parametrize("mirror_map, sampler", [
    (EUCLID, lambda rng, n: rng.normal(size=(n, 3))),
    (ENTROPY, lambda rng, n: rng.dirichlet(np.ones(3), size=n)),
])
def test_separate_convexity(mirror_map, sampler):
    rng = np.random.default_rng(1)
    for _ in range(200):
        a = sampler(rng, 1)[0]
        bs = sampler(rng, 4)
        weights = rng.dirichlet(np.ones(4))
        assert separate_convexity_check(mirror_map, a, bs, weights)


def test_p_norm_conjugate_gradient_inverts_gradient():
    psi = make_mirror_map("p_norm_sq", p_norm=1.5)
    x = np.array([0.3, -1.2, 0.7])
    np.testing.assert_allclose(psi.grad_conj(psi.grad(x)), x, atol=1e-10)


def test_simplex_projection():
    x = project_simplex(np.array([0.9, 0.8, -0.4]))
    assert x.sum() == pytest.approx(1.0)
    assert np.all(x >= 0.0)
    np.testing.assert_allclose(x, [0.55, 0.45, 0.0])
    with pytest.raises(ValidationError):
        Simplex(1)


@pytest.mark.parametrize("cset", [Box(3, -2.0, 1.0), EuclideanBall(3, 1.5), Simplex(3)])
def test_constraint_set_samples_and_projections(cset):
    rng = np.random.default_rng(4)
    points = cset.sample(rng, 20)
    assert all(cset.contains(p) for p in points)
    far = 10.0 * rng.normal(size=3)
    assert cset.contains(cset.project(far))


def test_make_constraint_set_reads_params():
    cset = make_constraint_set("euclidean_ball", 2, {"radius": 3.0})
    assert cset.sup_norm == pytest.approx(3.0)


def test_soft_threshold():
    np.testing.assert_allclose(soft_threshold(np.array([3.0, -0.5, -2.0]), 1.0), [2.0, 0.0, -1.0])


def test_entropy_prox_solves_optimality_condition():
    reg = Regularizer("entropy", lambda1=0.7)
    v = np.array([-1.0, 0.2, 3.0])
    x = reg.prox(v, 0.5)
    tau = 0.35
    np.testing.assert_allclose(x + tau * (1.0 + np.log(x)), v, atol=1e-10)
    with pytest.raises(DomainViolation):
        reg.value(np.array([-0.1, 1.1]))


def test_linf_prox_matches_grid_search():
    reg = Regularizer("linf", lambda1=1.0)
    v = np.array([0.8, -0.3])
    x = reg.prox(v, 0.5)
    grid = np.stack(np.meshgrid(np.linspace(-1, 1, 801), np.linspace(-1, 1, 801)), axis=-1).reshape(-1, 2)
    values = 0.5 * reg.value(grid) + 0.5 * np.sum((grid - v) ** 2, axis=1)
    np.testing.assert_allclose(x, grid[np.argmin(values)], atol=5e-3)


def test_mirror_step_euclidean_examples():
    box = Box(1, -10.0, 10.0)
    x = mirror_step(EUCLID, box, Regularizer("zero"), np.array([2.0]), np.array([1.0]), 0.25)
    np.testing.assert_allclose(x, [0.5])
    x = mirror_step(EUCLID, box, Regularizer("l1", lambda1=1.0), np.array([2.0]), np.array([1.0]), 0.25)
    np.testing.assert_allclose(x, [0.25])


def test_mirror_step_projects_onto_box():
    box = Box(2, -1.0, 1.0)
    x = mirror_step(EUCLID, box, Regularizer("zero"), np.array([-10.0, 0.0]), np.array([0.5, 0.5]), 1.0)
    np.testing.assert_allclose(x, [1.0, 0.5])


def test_mirror_step_entropic_closed_form():
    x = mirror_step(ENTROPY, Simplex(2), Regularizer("zero"), np.array([1.0, 0.0]), np.array([0.5, 0.5]), 1.0)
    np.testing.assert_allclose(x, [0.2689414, 0.7310586], atol=1e-6)


def test_mirror_step_rows_are_independent():
    box = Box(2, -1.0, 1.0)
    chi = Regularizer("l1", lambda1=0.3)
    G = np.array([[1.0, -2.0], [0.5, 0.1]])
    Y = np.array([[0.2, 0.2], [-0.4, 0.9]])
    stacked = mirror_step(EUCLID, box, chi, G, Y, 0.5)
    for k in range(2):
        np.testing.assert_allclose(stacked[k], mirror_step(EUCLID, box, chi, G[k], Y[k], 0.5))


def test_dual_averaging_projection_examples():
    ball = EuclideanBall(1, 10.0)
    x = dual_averaging_projection(EUCLID, ball, Regularizer("zero"), np.array([4.0]), 0, 0.5)
    np.testing.assert_allclose(x, [-2.0])
    box = Box(1, -10.0, 10.0)
    x = dual_averaging_projection(EUCLID, box, Regularizer("l1", lambda1=1.0), np.array([4.0]), 2, 0.5)
    np.testing.assert_allclose(x, [-1.0])


def test_dual_averaging_projection_is_nonexpansive():
    rng = np.random.default_rng(7)
    box = Box(3, -1.0, 1.0)
    eta = Regularizer("l1", lambda1=0.2)
    alpha = 0.4
    for _ in range(50):
        z1, z2 = rng.normal(size=(2, 3)) * 3.0
        x1 = dual_averaging_projection(EUCLID, box, eta, z1, 5, alpha)
        x2 = dual_averaging_projection(EUCLID, box, eta, z2, 5, alpha)
        assert np.linalg.norm(x1 - x2) <= alpha * np.linalg.norm(z1 - z2) + 1e-12


@pytest.mark.parametrize("eta", [Regularizer("zero"), Regularizer("entropy", lambda1=0.5)])
def test_entropic_dual_projection_stays_in_the_floored_simplex(eta):
    z = np.array([[1000.0, 0.0, 0.0], [0.0, -800.0, 900.0]])
    x = dual_averaging_projection(ENTROPY, Simplex(3), eta, z, 1, 1.0)
    assert x.min() >= ENTROPY.floor
    np.testing.assert_allclose(x.sum(axis=-1), 1.0, atol=1e-12)
    assert ENTROPY.in_domain(x)
    # 远离边界时就是 softmax(-αz)
    mild = dual_averaging_projection(ENTROPY, Simplex(3), Regularizer("zero"), np.array([0.2, -0.1, 0.4]), 0, 2.0)
    expected = np.exp(-2.0 * np.array([0.2, -0.1, 0.4]))
    np.testing.assert_allclose(mild, expected / expected.sum(), rtol=1e-12)


def test_numeric_mirror_step_agrees_with_grid_search():
    # 负熵 + 二次正则没有闭式解，走数值内层求解
    chi = Regularizer("half_l2_sq", lambda2=0.8)
    g = np.array([0.6, -0.4])
    y = np.array([0.3, 0.7])
    alpha = 1.3
    x = mirror_step(ENTROPY, Simplex(2), chi, g, y, alpha)
    assert optimality_residual(ENTROPY, Simplex(2), chi, g, y, alpha, x) <= 1e-6

    def objective(P):
        return P @ g + ENTROPY.bregman(P, np.broadcast_to(y, P.shape)) / alpha + chi.value(P)

    np.testing.assert_allclose(x, brute_force_argmin(objective, Simplex(2)), atol=2e-4)


def test_p_norm_dual_projection_agrees_with_grid_search():
    psi = make_mirror_map("p_norm_sq", p_norm=1.5)
    ball = EuclideanBall(2, 1.0)
    z = np.array([2.5, -1.0])
    alpha = 1.0
    x = dual_averaging_projection(psi, ball, Regularizer("zero"), z, 0, alpha)

    def objective(P):
        return P @ z + psi.value(P) / alpha

    assert ball.contains(x)
    np.testing.assert_allclose(x, brute_force_argmin(objective, ball), atol=2e-4)
