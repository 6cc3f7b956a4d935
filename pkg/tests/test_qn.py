import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from smoothgn.moments import ContractError, MomentProblem, ParamBox
from smoothgn.problems import QuantileProblem, linear_problem, quantile_smoothed
from smoothgn.qn import (QnBuffer, RankDeficiencyError, default_L, jacobian_ls, jacobian_mean,
                         qn_init, qn_update_jacobian)


def test_default_L():
    assert default_L(2) == 25
    assert default_L(20) == 30
    assert default_L(17) == 26


def test_init_shapes_and_determinism():
    pr = linear_problem(np.eye(2), np.zeros(2))
    b1 = qn_init(pr, np.zeros(2), 0.1, L=3, seed=5)
    b2 = qn_init(pr, np.zeros(2), 0.1, L=3, seed=5)
    assert b1.Z.shape == (3, 2) and b1.Y.shape == (3, 2)
    np.testing.assert_array_equal(b1.Z, b2.Z)
    np.testing.assert_array_equal(b1.Y, b2.Y)
    # Y computed at theta0: linear moments give Y = Z exactly up to rounding
    np.testing.assert_allclose(b1.Y, b1.Z, atol=1e-12)


def test_init_constant_moments():
    pr = MomentProblem(eval=lambda th: np.ones(3), box=ParamBox.cube(-1, 1, 2), p=3)
    buf = qn_init(pr, np.zeros(2), 0.1, L=4, seed=0)
    np.testing.assert_array_equal(buf.Y, 0.0)
    np.testing.assert_array_equal(qn_update_jacobian(buf, pr, np.ones(2)), np.zeros((3, 2)))


def test_init_rejects_small_L():
    pr = linear_problem(np.eye(3), np.zeros(3))
    with pytest.raises(ContractError):
        qn_init(pr, np.zeros(3), 0.1, L=2)


def test_hand_least_squares():
    buf = QnBuffer(eps=1.0, Z=np.array([[1.0], [-1.0], [0.0]]), Y=np.array([[2.0], [-2.0], [0.0]]), seed=0)
    assert jacobian_ls(buf)[0, 0] == pytest.approx(2.0, abs=1e-14)


def test_rank_deficient_design():
    buf = QnBuffer(eps=1.0, Z=np.ones((3, 1)), Y=np.zeros((3, 1)), seed=0)
    with pytest.raises(RankDeficiencyError):
        jacobian_ls(buf)


def test_fifo_eviction():
    pr = linear_problem(np.eye(1), np.zeros(1))
    buf = qn_init(pr, np.zeros(1), 0.1, L=4, seed=1)
    first = buf.Z.copy()
    qn_update_jacobian(buf, pr, np.ones(1))
    # the oldest slot (index 0) was replaced, others kept
    assert buf.Z[0, 0] != first[0, 0]
    np.testing.assert_array_equal(buf.Z[1:], first[1:])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 4), st.integers(0, 2 ** 31 - 1))
def test_exact_recovery_affine(d, extra, seed):
    rng = np.random.default_rng(seed)
    p = d + extra
    A = rng.standard_normal((p, d))
    pr = linear_problem(A, rng.standard_normal(p))
    buf = qn_init(pr, rng.standard_normal(d), 0.05, L=d + 3, seed=seed)
    G = qn_update_jacobian(buf, pr, rng.standard_normal(d))
    assert np.linalg.norm(G - A) <= 1e-8 * np.linalg.norm(A)


def test_after_L_updates_matches_smoothed_jacobian():
    """Once every pair is regenerated at theta*, the estimate targets G_eps(theta*)."""
    qp = QuantileProblem(np.random.default_rng(3).standard_normal(200), 0.5)
    pr = qp.as_problem()
    theta_star, eps, L = np.array([0.2]), 0.3, 30
    ests = []
    for s in range(200):
        buf = qn_init(pr, np.array([-1.0]), eps, L=L, seed=s)
        for _ in range(L):
            G = qn_update_jacobian(buf, pr, theta_star)
        ests.append(G[0, 0])
    ests = np.array(ests)
    f = quantile_smoothed(qp, 0.2, eps)[1]
    assert abs(ests.mean() - f) < 3 * ests.std(ddof=1) / np.sqrt(ests.size)


def test_mean_variant_converges_for_affine():
    A = np.array([[1.0, -0.5], [2.0, 0.3]])
    pr = linear_problem(A, np.zeros(2))
    buf = qn_init(pr, np.zeros(2), 0.1, L=10_000, seed=2, estimator="mean")
    assert np.linalg.norm(jacobian_mean(buf) - A) < 0.05 * np.linalg.norm(A)
    np.testing.assert_allclose(jacobian_ls(buf), A, atol=1e-10)


def test_directions_per_iter():
    pr = linear_problem(np.eye(2), np.zeros(2))
    buf = qn_init(pr, np.zeros(2), 0.1, L=5, seed=0)
    qn_update_jacobian(buf, pr, np.ones(2), directions=3)
    assert buf.draws == 8 and buf.head == 3
