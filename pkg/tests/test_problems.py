import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from smoothgn.moments import ContractError, EvaluationError
from smoothgn.problems import (DdcProblem, QuantileProblem, QuantRegProblem, baseline_smoothed_gn_solve,
                               ddc_moments, ddc_smoothed_moments, draw_regressors, draw_shocks,
                               gmm_root_interval, make_ddc, quantile_moments, quantile_smoothed,
                               quantile_std_err, quantreg_moments, sample_quantile, simulate_panel,
                               smoothed_problem, smoothed_root_bisection, true_theta)
from smoothgn.solver import JacobianMode, SolverConfig
from smoothgn.rng import stream


# quantile

def test_quantile_small_examples():
    qp = QuantileProblem([3.0, 1.0, 2.0, 4.0], 0.5)
    assert quantile_moments(qp, 2.0) == 0.0
    assert quantile_moments(qp, 1.5) == -0.25
    assert quantile_moments(qp, 4.0) == 0.5
    assert gmm_root_interval(qp) == (2.0, 3.0)
    assert sample_quantile(qp) == 2.5


def test_root_interval_absent_when_tn_fractional():
    assert gmm_root_interval(QuantileProblem(np.arange(5.0), 0.5)) is None


def test_quantile_smoothed_oracle():
    x = np.array([-1.0, 0.0, 2.0])
    g, f = quantile_smoothed(QuantileProblem(x, 0.4), 0.5, 0.3)
    from math import erf, exp, pi, sqrt
    cdf = [0.5 * (1 + erf((0.5 - xi) / 0.3 / sqrt(2))) for xi in x]
    pdf = [exp(-((0.5 - xi) / 0.3) ** 2 / 2) / sqrt(2 * pi) / 0.3 for xi in x]
    assert g == pytest.approx(np.mean(cdf) - 0.4, abs=1e-14)
    assert f == pytest.approx(np.mean(pdf), rel=1e-13)


def test_quantile_std_err_examples():
    # n copies of one datum evaluated at that datum: f = phi(0) / eps
    phi0 = 1.0 / np.sqrt(2 * np.pi)
    assert quantile_std_err(QuantileProblem(np.zeros(100), 0.5), 0.0, phi0 / 1.0) == pytest.approx(0.05, rel=1e-12)
    se = quantile_std_err(QuantileProblem(np.zeros(250), 0.7), 0.0, phi0 / 0.35)
    assert se == pytest.approx(np.sqrt(0.21 / 250) / 0.35, rel=1e-12)
    assert se == pytest.approx(0.0828, abs=5e-5)


def test_quantile_contract():
    with pytest.raises(ContractError):
        QuantileProblem([1.0], 1.0)
    with pytest.raises(ContractError):
        quantile_smoothed(QuantileProblem([1.0], 0.5), 0.0, 0.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.floats(-2, 2), st.floats(0.01, 2.0))
def test_smoothed_cdf_increasing_with_positive_density(seed, theta, eps):
    qp = QuantileProblem(stream(seed).standard_normal(30), 0.3)
    g1, f1 = quantile_smoothed(qp, theta, eps)
    g2, _ = quantile_smoothed(qp, theta + 1e-3, eps)
    assert f1 > 0 and g2 >= g1


# quantile regression

def test_quantreg_reduces_to_quantile():
    x = stream(3).standard_normal(40)
    qr = QuantRegProblem(y=x, x=np.ones(40), w=np.ones(40), t=0.3)
    qp = QuantileProblem(x, 0.7)
    for th in np.linspace(-2, 2, 17):
        assert quantreg_moments(qr, [th])[0] == pytest.approx(-quantile_moments(qp, th), abs=1e-15)
        g, G = quantreg_moments(qr, [th], 0.2)
        gs, fs = quantile_smoothed(qp, th, 0.2)
        assert g[0] == pytest.approx(-gs, abs=1e-14)
        assert G[0, 0] == pytest.approx(-fs, rel=1e-12)


def _qr_instance(seed=5, n=60):
    rng = stream(seed)
    x = np.column_stack([np.ones(n), rng.standard_normal(n)])
    y = x @ np.array([0.5, 1.0]) + rng.standard_normal(n)
    w = np.column_stack([x, x[:, 1] ** 2])
    return QuantRegProblem(y, x, w, 0.4)


def test_quantreg_jacobian_matches_finite_differences():
    qr = _qr_instance()
    th = np.array([0.3, 0.8])
    _, G = quantreg_moments(qr, th, 0.3)
    h = 1e-6
    fd = np.column_stack([(quantreg_moments(qr, th + h * e, 0.3)[0] - quantreg_moments(qr, th - h * e, 0.3)[0])
                          / (2 * h) for e in np.eye(2)])
    np.testing.assert_allclose(G, fd, rtol=1e-6, atol=1e-9)


def test_quantreg_small_eps_limit():
    qr = _qr_instance()
    th = np.array([0.2, 1.1])
    g, _ = quantreg_moments(qr, th, 1e-9)
    np.testing.assert_allclose(g, quantreg_moments(qr, th), atol=1e-12)


def test_quantreg_zero_row_rejected():
    with pytest.raises(ContractError):
        QuantRegProblem([1.0, 2.0], [[1.0, 0.0], [0.0, 0.0]], [[1.0, 0.0], [0.0, 1.0]], 0.5)


# dynamic discrete choice

def test_true_theta_layout():
    th = true_theta()
    assert th.shape == (15,)
    np.testing.assert_allclose(th[:5], 1 / np.sqrt(5))
    assert np.all(th[5:14] == 0) and th[14] == 0.7


def _panel(seed, n=120, T=6, k=3):
    rng = stream(seed)
    return draw_regressors(rng, n, T, k), draw_shocks(rng, n, T)


def test_common_random_numbers_zero_at_truth():
    x, e = _panel(1)
    for rho in (0.0, 0.5):
        theta = np.array([0.6, -0.3, 0.2, rho])
        prob = DdcProblem(x, simulate_panel(x, e, theta), e)
        assert np.all(ddc_moments(prob, theta) == 0.0)


def test_static_case_oracle():
    # rho = 0: outcomes are independent probits, so the simulated indicators match a direct computation
    x, e = _panel(2)
    theta = np.array([0.4, 0.1, -0.5, 0.0])
    y = simulate_panel(x, e, theta)
    np.testing.assert_array_equal(y, (x @ theta[:3] + e[:, 1:] > 0).astype(float))


def test_moments_invariant_to_individual_order():
    x, e = _panel(3)
    y = simulate_panel(x, _panel(4)[1], np.array([0.5, 0.0, 0.3, 0.4]))
    perm = stream(9).permutation(x.shape[0])
    a = DdcProblem(x, y, e)
    b = DdcProblem(x[perm], y[perm], e[perm])
    th = np.array([0.2, 0.2, 0.2, 0.3])
    np.testing.assert_allclose(ddc_moments(a, th), ddc_moments(b, th), atol=1e-12)
    np.testing.assert_allclose(ddc_smoothed_moments(a, th, 0.1), ddc_smoothed_moments(b, th, 0.1), atol=1e-12)


def test_truth_separates_from_zero():
    ratios = []
    for s in range(50):
        prob = make_ddc(100 + s, 900 + s, n=250, T=10)
        ratios.append((np.linalg.norm(ddc_moments(prob, prob.theta_dagger)),
                       np.linalg.norm(ddc_moments(prob, np.zeros(15)))))
    near, far = np.array(ratios).T
    assert far.mean() >= 5 * near.mean()


def test_smoothed_moments_limit_and_finite():
    prob = make_ddc(1, 2, n=100, T=5, beta_dim=4)
    th = true_theta(4, 2, 0.5)
    np.testing.assert_allclose(ddc_smoothed_moments(prob, th, 1e-10), ddc_moments(prob, th), atol=1e-10)
    h = 1e-5
    g0 = ddc_smoothed_moments(prob, th, 0.2)
    for e in np.eye(5):
        fd = (ddc_smoothed_moments(prob, th + h * e, 0.2) - g0) / h
        assert np.all(np.isfinite(fd))


def test_degenerate_lag_raises():
    x, e = _panel(5, n=20, T=3, k=2)
    y = np.zeros((20, 4))
    with pytest.raises(EvaluationError):
        DdcProblem(x, y, e)


# smoothed-moment baseline

def test_baseline_reaches_smoothed_root(quantile_exact):
    eps = 0.1
    fn = lambda th: quantile_smoothed(quantile_exact, th, eps)[0]
    root = smoothed_root_bisection(fn, -5, 5)
    cfg = SolverConfig(gamma=0.5, eps=eps, covering=None, b_max=200)
    res = baseline_smoothed_gn_solve(quantile_exact.as_problem(), None, cfg, theta0=[0.0])
    assert abs(fn(res.theta_best[0])) <= 1e-6
    assert res.theta_best[0] == pytest.approx(root, abs=1e-5)


def test_baseline_bias_grows_with_bandwidth():
    x = stream(21).standard_normal(100_000)
    qp = QuantileProblem(x, 0.7)
    target = sample_quantile(qp)
    roots = {eps: smoothed_root_bisection(lambda th: quantile_smoothed(qp, th, eps)[0], -3, 3)
             for eps in (0.5, 0.1)}
    assert abs(roots[0.5] - target) > abs(roots[0.1] - target)


def test_baseline_tiny_bandwidth_agrees_on_linear():
    from smoothgn.problems import linear_problem
    pr = linear_problem([[2.0]], [-1.0])
    cfg = SolverConfig(gamma=0.5, eps=1e-6, jacobian=JacobianMode("closed_form"), covering=None, b_max=80)
    res = baseline_smoothed_gn_solve(pr, None, cfg, theta0=[0.0])
    assert res.theta_best[0] == pytest.approx(0.5, abs=1e-9)


def test_smoothed_problem_prefers_closed_form(quantile_exact):
    sp = smoothed_problem(quantile_exact.as_problem(), 0.2)
    assert sp.moments(np.array([0.3]))[0] == quantile_smoothed(quantile_exact, 0.3, 0.2)[0]
