from .baseline import baseline_smoothed_gn_solve, smoothed_problem, smoothed_root_bisection
from .ddc import (DdcProblem, ddc_moments, ddc_smoothed_moments, draw_regressors, draw_shocks, make_ddc,
                  simulate_panel, true_theta)
from .quantile import (QuantileProblem, gmm_root_interval, quantile_moments, quantile_smoothed,
                       quantile_std_err, sample_quantile)
from .quantreg import QuantRegProblem, quantreg_moments
from .toy import linear_problem, quadratic_problem, two_basin_problem
