import numpy as np
import pytest

from smoothgn.moments import ContractError
from smoothgn.momentum import analyse, companion_matrix, companion_rate, momentum_table, optimal_alpha

# (gamma, alpha*, rate at alpha*) as tabulated
TABLE = [(0.01, 0.81, 0.10), (0.05, 0.60, 0.22), (0.1, 0.47, 0.32), (0.2, 0.31, 0.45),
         (0.3, 0.21, 0.54), (0.4, 0.14, 0.63), (0.6, 0.05, 0.77), (0.8, 0.01, 0.89)]


def test_no_momentum_rate_is_gamma():
    for g in (0.05, 0.1, 0.5, 0.9):
        assert companion_rate(g, 0.0) == pytest.approx(g, abs=1e-15)


def test_rate_examples():
    assert companion_rate(0.01, 0.81) == pytest.approx(0.10, abs=0.005)
    # at alpha = 0.47 the roots are complex with modulus sqrt(0.47)
    assert companion_rate(0.1, 0.47) == pytest.approx(1 - np.sqrt(0.47), abs=1e-12)
    a_star, _ = optimal_alpha(0.1)
    assert companion_rate(0.1, a_star) == pytest.approx(0.32, abs=0.005)


def test_spectral_radius_not_singular_value():
    A = companion_matrix(0.1, 0.47)
    assert np.linalg.svd(A, compute_uv=False)[0] > 1.0
    assert 0 < analyse(0.1, 0.47).rate < 1


@pytest.mark.parametrize("gamma,alpha,rate", TABLE)
def test_optimal_alpha_table(gamma, alpha, rate):
    a, r = optimal_alpha(gamma)
    assert a == pytest.approx(alpha, abs=0.01)
    assert r == pytest.approx(rate, abs=0.01)


def test_optimal_alpha_closed_form():
    # double root of the characteristic polynomial: alpha* = (1 - sqrt(gamma))^2
    for g in (0.05, 0.2, 0.6):
        a, r = optimal_alpha(g)
        assert a == pytest.approx((1 - np.sqrt(g)) ** 2, abs=1e-3)
        assert r == pytest.approx(np.sqrt(g), abs=2e-3)


def test_alpha_star_non_increasing():
    alphas = [row["alpha_star"] for row in momentum_table()]
    assert all(b <= a for a, b in zip(alphas, alphas[1:]))


def test_domain_checks():
    with pytest.raises(ContractError):
        companion_rate(1.0, 0.1)
    with pytest.raises(ContractError):
        companion_rate(0.1, 1.0)
