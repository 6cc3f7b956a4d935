import numpy as np
import pytest
from scipy import stats

from smoothgn.moments import ContractError
from smoothgn.stopping import StoppingRule, chi2_quantile, stopping_check


@pytest.mark.parametrize("p,level", [(1, 0.95), (2, 0.95), (5, 0.9), (16, 0.95), (40, 0.99), (3, 0.01)])
def test_chi2_against_scipy(p, level):
    assert chi2_quantile(p, level) == pytest.approx(stats.chi2.ppf(level, p), abs=1e-8)


def test_chi2_frozen_values():
    assert chi2_quantile(1, 0.95) == pytest.approx(3.84146, abs=1e-4)
    assert chi2_quantile(2, 0.95) == pytest.approx(5.99146, abs=1e-4)


def test_chi2_increasing_in_p():
    q = [chi2_quantile(p, 0.95) for p in range(1, 30)]
    assert np.all(np.diff(q) > 0)


def test_chi2_domain():
    with pytest.raises(ContractError):
        chi2_quantile(1, 1.0)
    with pytest.raises(ContractError):
        chi2_quantile(0, 0.5)


def test_threshold():
    assert StoppingRule("chi2", 0.95).threshold(1, 100) == pytest.approx(0.0384146, abs=1e-6)


def test_stop_immediately_on_zero():
    assert stopping_check([0.0], StoppingRule("chi2", 0.95, 0), p=1, n=100, b_max=300) == "chi2"


def test_extra_iterations():
    rule = StoppingRule("chi2", 0.95, extra_j=2)
    norms = [1.0, 0.01]
    assert stopping_check(norms, rule, 1, 100, 300) is None
    assert stopping_check(norms + [0.5], rule, 1, 100, 300) is None
    assert stopping_check(norms + [0.5, 0.5], rule, 1, 100, 300) == "chi2"


def test_fixed_iterations():
    rule = StoppingRule()
    for b in range(1, 300):
        assert stopping_check([0.0] * b, rule, 1, 100, 300) is None
    assert stopping_check([0.0] * 300, rule, 1, 100, 300) == "fixed"
