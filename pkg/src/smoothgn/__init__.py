"""Smoothed Gauss-Newton for GMM/SMM estimation with non-smooth moments."""
from .covering import CoveringSequence, CoveringSpec, discrepancy
from .moments import (ContractError, EvaluationError, MomentProblem, ParamBox, as_weight_matrix,
                      clamp_to_box, objective, weighted_norm)
from .momentum import companion_rate, optimal_alpha
from .problems import DdcProblem, QuantileProblem, QuantRegProblem
from .qn import QnBuffer, qn_init, qn_update_jacobian
from .smoothing import SmoothingConfig, mc_jacobian, mc_smoothed_moments
from .solver import (IterationRecord, JacobianMode, SolverConfig, SolverError, SolverResult,
                     global_step, local_step, solve)
from .stopping import StoppingRule, chi2_quantile, stopping_check

__version__ = "0.1.0"
