"""Explicit contract constructions.

All constructions share one structure: optimal learning forces every
message's tangent hyperplane to coincide, which fixes each state's column
of transfers up to one free number.  :func:`expand_benchmark` fills in the
matrix from the free row (the last support point), and each constructor
only has to choose that row.
"""

from __future__ import annotations

import numpy as np

from .beliefs import EPS_INTERIOR, PosteriorDistribution
from .contracts import Contract, Hyperplane
from .costs import CostModel, ScalarCost, bregman_term, min_cost
from .errors import BoundarySupport, InvalidInput, LimitedLiabilityInfeasible

LL_TOL = 1e-9


def _check_support(F: PosteriorDistribution, cost: CostModel) -> None:
    if cost.n != F.n:
        raise InvalidInput("cost model and distribution disagree on the state count")
    for x in F.support:
        if not x.is_interior(EPS_INTERIOR):
            raise BoundarySupport(f"support posterior {x!r} is on the simplex boundary")


def column_offsets(F: PosteriorDistribution, cost: CostModel) -> np.ndarray:
    """``X^k(j, m)`` for every message ``j`` and state ``k`` (``m`` = last message).

    Row ``j`` is what must be added to the benchmark row to get message
    ``j``'s transfers.  The last column is the intercept gap ``Xi_jm``.
    """
    m = F.m
    b = np.array([bregman_term(cost, x) for x in F.support])
    g = np.vstack([cost.kappa * cost.gradient(x) for x in F.support])
    xi = b - b[m - 1]
    out = np.empty((m, F.n))
    out[:, :-1] = g - g[m - 1] + xi[:, None]
    out[:, -1] = xi
    return out


def expand_benchmark(benchmark_transfers, F: PosteriorDistribution, cost: CostModel) -> Contract:
    """Full transfer matrix from the last support point's transfers."""
    _check_support(F, cost)
    t_m = np.asarray(benchmark_transfers, dtype=float).ravel()
    if t_m.size != F.n:
        raise InvalidInput(f"benchmark needs {F.n} transfers, got {t_m.size}")
    return Contract(F.support, t_m[None, :] + column_offsets(F, cost))


def benchmark_from_hyperplane(F: PosteriorDistribution, cost: CostModel, plane: Hyperplane) -> np.ndarray:
    """Benchmark row whose tangent hyperplane is ``plane``."""
    x_m = F.support[-1]
    t_n = plane.intercept + bregman_term(cost, x_m)
    t = np.empty(F.n)
    t[-1] = t_n
    t[:-1] = t_n + plane.slopes + cost.kappa * cost.gradient(x_m)
    return t


def tangent_of_outside_option(cost: CostModel, x_star, v0: float) -> Hyperplane:
    """Hyperplane tangent to ``v0 - kappa*c`` at ``x_star``."""
    g = cost.kappa * cost.gradient(x_star)
    return Hyperplane(-g, v0 - cost.scaled(x_star) + float(g @ x_star.reduced))


def construct_tau_contract(F: PosteriorDistribution, cost: CostModel, v0: float, tau: float | None = None) -> Contract:
    """Flat-hyperplane contract: the agent's value is ``tau`` at every support point.

    By default ``tau = v0 - kappa * min c``, the smallest level at which no
    walk-away deviation pays.
    """
    _check_support(F, cost)
    if tau is None:
        tau = v0 - cost.kappa * min_cost(cost).value
    rows = []
    for x in F.support:
        g = cost.kappa * cost.gradient(x)
        base = bregman_term(cost, x) + tau
        rows.append(np.append(base + g, base))
    return Contract(F.support, np.vstack(rows))


def construct_efficient(F: PosteriorDistribution, cost: CostModel, v0: float) -> Contract:
    """Contract whose concavifying hyperplane touches ``v0 - kappa*c`` at the prior.

    The agent is held to exactly ``v0``; a risk-neutral agent is paid
    ``C(F) + v0`` in expectation.
    """
    _check_support(F, cost)
    plane = tangent_of_outside_option(cost, F.prior, v0)
    return expand_benchmark(benchmark_from_hyperplane(F, cost, plane), F, cost)


def lowest_transfer_indices(offsets: np.ndarray) -> list[int]:
    """``j*(k)`` for each state: the benchmark unless some message pays strictly less."""
    m = offsets.shape[0]
    out = []
    for k in range(offsets.shape[1]):
        col = offsets[:, k]
        neg = np.flatnonzero(col < 0)
        if neg.size == 0:
            out.append(m - 1)
        else:
            out.append(int(neg[np.argmin(col[neg])]))
    return out


def construct_ll_zero(F: PosteriorDistribution, cost: CostModel) -> Contract:
    """Cheapest limited-liability contract for a negligible outside option.

    In each state the lowest-paying message pays exactly zero; optimal
    learning then fixes the rest of the column.
    """
    _check_support(F, cost)
    X = column_offsets(F, cost)
    t = np.empty_like(X)
    for k, j_star in enumerate(lowest_transfer_indices(X)):
        t[:, k] = X[:, k] - X[j_star, k]
        t[j_star, k] = 0.0
    return Contract(F.support, t)


def construct_efficient_ll(F: PosteriorDistribution, cost: CostModel, v0: float) -> Contract:
    """Efficient contract if it respects limited liability.

    Raises :class:`LimitedLiabilityInfeasible` otherwise, locating the most
    negative transfer and, for two states, reporting ``v0/kappa - eta``.
    """
    contract = construct_efficient(F, cost, v0)
    t = contract.transfers
    j, k = np.unravel_index(int(np.argmin(t)), t.shape)
    t_min = float(t[j, k])
    eta_val = None
    margin = t_min
    if F.n == 2 and F.m <= 2:
        eta_val = eta_of_distribution(F, cost)
        margin = v0 / cost.kappa - eta_val
    if t_min < -LL_TOL:
        raise LimitedLiabilityInfeasible(
            f"efficient contract pays {t_min:.6g} for message {j} in state {k}",
            state=int(k), message_index=int(j), min_transfer=t_min, margin=margin, eta=eta_val,
        )
    return contract


def two_state_greeks(contract: Contract) -> dict[str, float]:
    """Name the entries of a two-state, two-message contract.

    Messages are ordered by the probability of the second state, so the
    low message bets on the first state: ``alpha``/``beta`` are its
    payments in states 1/2 and ``gamma``/``delta`` the high message's.
    """
    if contract.n != 2 or contract.m != 2:
        raise InvalidInput("greek labels need two states and two messages")
    lo, hi = sorted(range(2), key=lambda j: contract.messages[j].probs[1])
    t = contract.transfers
    return {"alpha": float(t[lo, 0]), "beta": float(t[lo, 1]),
            "gamma": float(t[hi, 0]), "delta": float(t[hi, 1])}


def eta_values(x_low: float, x_high: float, cost: CostModel) -> tuple[float, float, float]:
    """``(eta_1(x_high), eta_2(x_low), max)`` in utils per unit of kappa.

    Scalars are probabilities of the second state.
    """
    sc = ScalarCost(cost)
    mu = sc.mu
    if not (0 < x_low <= mu <= x_high < 1):
        raise BoundarySupport(f"need 0 < x_low <= mu <= x_high < 1, got {x_low}, {mu}, {x_high}")
    dmu = sc.dc(mu)
    eta1 = -mu * dmu - sc.c(x_high) + sc.dc(x_high) * x_high
    eta2 = (1 - mu) * dmu - sc.c(x_low) - (1 - x_low) * sc.dc(x_low)
    return eta1, eta2, max(eta1, eta2)


def scalar_support(F: PosteriorDistribution) -> tuple[float, float]:
    """``(x_low, x_high)`` of a two-state distribution with at most two points."""
    if F.n != 2 or F.m > 2:
        raise InvalidInput("need a two-state distribution with at most two posteriors")
    xs = sorted(float(b.probs[1]) for b in F.support)
    return xs[0], xs[-1]


def eta_of_distribution(F: PosteriorDistribution, cost: CostModel) -> float:
    x_low, x_high = scalar_support(F)
    return eta_values(x_low, x_high, cost)[2]
