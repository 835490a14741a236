"""Equilibrium and efficient consumption paths for competitive credit
contracts when the borrower's discount factor is private and stochastic.

The library solves two nested settings.  In the degenerate-impatience
setting (two discount factors, firms certain of the impatient one) the
equilibrium reduces to a geometric-weight program along the all-impatient
path, completed into a full contract by exact indifference constructions;
see :mod:`creditscreen.degenerate`.  In the general full-support setting
the efficient policy is closed form and the three-period equilibrium is
solved through the binding-upward-IC reduction; see
:mod:`creditscreen.screening`.  :mod:`creditscreen.oracle` provides the
independent full-constraint reference solver and the reporting-strategy
deviation audit used to certify both.

The :mod:`creditscreen.cli` module exposes the solvers, the verification
battery and the figure-data reproduction as a command line tool.
"""

from .model import (
    Income,
    IncomeKind,
    ModelConfig,
    Policy,
    ValidationError,
    choice_reversal_demo,
    discount_representation,
    histories,
    validate,
)
from .utility import (
    NEG_INF_UTILITY,
    UtilityKind,
    UtilitySpec,
    isoelastic,
    log_utility,
    sqrt_power,
)
from .degenerate import (
    PathKind,
    PathSolution,
    WelfareReport,
    build_full_mechanism,
    solve_low_path,
    sweep_horizon,
    welfare_report,
)
from .screening import (
    BackloadingReport,
    EulerReport,
    NonSeparatingError,
    ReducedSolution,
    check_backloading,
    check_inverse_euler,
    continuation_cost,
    log_growth_ratios,
    solve_efficient_policy,
    solve_equilibrium_t3,
)
from .oracle import best_deviation, build_full_program, solve_full

__all__ = [
    "Income",
    "IncomeKind",
    "ModelConfig",
    "Policy",
    "ValidationError",
    "choice_reversal_demo",
    "discount_representation",
    "histories",
    "validate",
    "NEG_INF_UTILITY",
    "UtilityKind",
    "UtilitySpec",
    "isoelastic",
    "log_utility",
    "sqrt_power",
    "PathKind",
    "PathSolution",
    "WelfareReport",
    "build_full_mechanism",
    "solve_low_path",
    "sweep_horizon",
    "welfare_report",
    "BackloadingReport",
    "EulerReport",
    "NonSeparatingError",
    "ReducedSolution",
    "check_backloading",
    "check_inverse_euler",
    "continuation_cost",
    "log_growth_ratios",
    "solve_efficient_policy",
    "solve_equilibrium_t3",
    "best_deviation",
    "build_full_program",
    "solve_full",
]

__version__ = "0.1.0"
