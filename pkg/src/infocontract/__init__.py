"""Contract synthesis and verification for hiring an agent to acquire information."""

from .beliefs import (
    Belief,
    PosteriorDistribution,
    make_belief,
    make_distribution,
    simplex_grid,
    two_state_belief,
    two_state_distribution,
)
from .constructors import (
    construct_efficient,
    construct_efficient_ll,
    construct_ll_zero,
    construct_tau_contract,
    eta_values,
    expand_benchmark,
    two_state_greeks,
)
from .contracts import (
    Contract,
    Hyperplane,
    UtilityModel,
    first_best_cost,
    hyperplane_from_message,
    log_utility,
    make_contract,
    net_utility,
    principal_cost,
    risk_neutral,
    strategy_value,
    truthful,
    value_function,
)
from .costs import CostModel, cost_gradient, cost_value, entropy_cost, expected_cost, quadratic_cost
from .solvers import (
    entropy_log_objective,
    solve_ll_risk_neutral_two_state,
    solve_risk_averse_tangency,
    sweep_regions,
)
from .verification import (
    blackwell_leq_two_state,
    brute_force_agent_oracle,
    check_hyperplane_dominance,
    check_ic_walkaway,
    concavify_two_state,
    verify,
)

__version__ = "0.1.0"

__all__ = [
    "Belief",
    "Contract",
    "CostModel",
    "Hyperplane",
    "PosteriorDistribution",
    "UtilityModel",
    "blackwell_leq_two_state",
    "brute_force_agent_oracle",
    "check_hyperplane_dominance",
    "check_ic_walkaway",
    "concavify_two_state",
    "construct_efficient",
    "construct_efficient_ll",
    "construct_ll_zero",
    "construct_tau_contract",
    "cost_gradient",
    "cost_value",
    "entropy_cost",
    "entropy_log_objective",
    "eta_values",
    "expand_benchmark",
    "expected_cost",
    "first_best_cost",
    "hyperplane_from_message",
    "log_utility",
    "make_belief",
    "make_contract",
    "make_distribution",
    "net_utility",
    "principal_cost",
    "quadratic_cost",
    "risk_neutral",
    "simplex_grid",
    "solve_ll_risk_neutral_two_state",
    "solve_risk_averse_tangency",
    "strategy_value",
    "sweep_regions",
    "truthful",
    "two_state_belief",
    "two_state_distribution",
    "two_state_greeks",
    "value_function",
    "verify",
]
