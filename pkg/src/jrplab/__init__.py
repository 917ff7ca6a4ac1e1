"""Joint replenishment laboratory: exact and LP solvers, randomized LP roundings,
online policies with adversarial lower-bound games, and a batch CLI."""
from .exact import ExactResult, OracleLimitError, opt_single_phase, solve_exact, solve_exact_jrpd
from .lp import FractionalSolution, LpCertificateError, build_lp, empirical_pace, ft_lp, solve_lp
from .model import (
    CostBreakdown,
    DeadlineCost,
    InfeasibleError,
    Instance,
    LinearCost,
    Order,
    Retailer,
    Schedule,
    Shipment,
    StepCost,
    Variant,
    evaluate,
    evaluate_horizon,
    make_instance,
    perturb,
)
from .pace import MixtureParams, pace_1srp, pace_combined, ratio_report, waiting_ratio, xi
from .rounding import ALGORITHMS, round_1srp, round_1srp_lps, round_2srp, round_lps, round_mixture, rounding_for

__version__ = "0.1.0"
