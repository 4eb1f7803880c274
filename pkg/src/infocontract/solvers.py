"""Optimal contracts beyond the closed-form constructions.

* risk-averse agent, no limited liability: search over the tangency point
  of the concavifying hyperplane with ``v0 - kappa*c``;
* risk-neutral agent, two states, limited liability: classify the optimum
  into one of four regimes and build the contract.

Two-state scalars are probabilities of the second state.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .beliefs import EPS_INTERIOR, Belief, PosteriorDistribution, make_belief, two_state_distribution
from .constructors import (
    benchmark_from_hyperplane,
    construct_efficient,
    eta_values,
    expand_benchmark,
    scalar_support,
    tangent_of_outside_option,
    two_state_greeks,
)
from .contracts import Contract, UtilityModel, make_contract, principal_cost, risk_neutral
from .costs import CostModel, ScalarCost, make_cost
from .errors import (
    BoundaryDrift,
    BoundarySupport,
    DomainViolation,
    NonConvergence,
    ResolutionTooCoarse,
    RootFindFailure,
    SolverFailure,
)
from .beliefs import two_state_belief

LABELS = ("efficient", "interior_zero_zero", "beta_zero", "gamma_zero")


# ---------------------------------------------------------------- risk aversion


@dataclass
class TangencySolution:
    x_star: Belief
    contract: Contract
    principal_cost: float
    surplus: float
    starts: list[tuple[list[float], float]] = field(default_factory=list)


def tangency_contract(F: PosteriorDistribution, cost: CostModel, v0: float, x_star: Belief) -> Contract:
    """Contract whose hyperplane is tangent to ``v0 - kappa*c`` at ``x_star``."""
    plane = tangent_of_outside_option(cost, x_star, v0)
    return expand_benchmark(benchmark_from_hyperplane(F, cost, plane), F, cost)


def solve_risk_averse_tangency(F: PosteriorDistribution, cost: CostModel, utility: UtilityModel,
                               v0: float, seed: int = 0, n_starts: int = 9) -> TangencySolution:
    """Cheapest tangency point for a (possibly) risk-averse agent without limited liability.

    The principal cost is minimized over the tangency point: bounded scalar
    search for two states, multi-start SLSQP otherwise.
    """
    n = F.n
    eps = 1e-6

    def objective(x: Belief) -> float:
        try:
            c = principal_cost(tangency_contract(F, cost, v0, x), F, utility)
        except (OverflowError, FloatingPointError):
            return math.inf
        return c if math.isfinite(c) else math.inf

    if utility.kind == "risk_neutral":
        # every tangency point costs at least C(F)+v0; the prior attains it
        x_star = F.prior
        starts = []
    elif n == 2:
        res = optimize.minimize_scalar(
            lambda y: objective(make_belief([y, 1 - y])), bounds=(eps, 1 - eps),
            method="bounded", options={"xatol": 1e-12, "maxiter": 5000})
        if not res.success:
            raise NonConvergence(str(res.message), best=res.x)
        x_star = make_belief([res.x, 1 - res.x])
        starts = [([float(res.x)], float(res.fun))]
    else:
        x_star, starts = _multistart(objective, n, eps, seed, n_starts)
    if np.min(x_star.probs) < 10 * eps:
        raise BoundaryDrift(f"tangency point {x_star!r} drifted to the simplex boundary")
    contract = tangency_contract(F, cost, v0, x_star)
    plane_at_prior = tangent_of_outside_option(cost, x_star, v0)(F.prior)
    return TangencySolution(x_star, contract, principal_cost(contract, F, utility),
                            plane_at_prior - v0, starts)


def _multistart(objective, n, eps, seed, n_starts):
    rng = np.random.default_rng(seed)
    lattice = [np.full(n, 1.0 / n)]
    for i in range(n):
        e = np.full(n, 0.5 / (n - 1))
        e[i] = 0.5
        lattice.append(e)
    while len(lattice) < n_starts:
        lattice.append(rng.dirichlet(np.ones(n)) * 0.8 + 0.2 / n)
    lattice = lattice[:n_starts]

    def obj(y):
        p = np.append(y, 1 - y.sum())
        if np.any(p < eps):
            return 1e12
        return objective(make_belief(p))

    cons = [{"type": "ineq", "fun": lambda y: 1 - eps - y.sum()}]
    best, starts = None, []
    for p0 in lattice:
        with warnings.catch_warnings():
            warnings.filterwarnings("ignore", "Values in x were outside bounds", RuntimeWarning)
            res = optimize.minimize(obj, p0[:-1], method="SLSQP", bounds=[(eps, 1)] * (n - 1),
                                    constraints=cons, options={"ftol": 1e-14, "maxiter": 500})
        starts.append((p0.tolist(), float(res.fun)))
        if best is None or res.fun < best.fun:
            best = res
    if best is None or not math.isfinite(best.fun) or best.fun >= 1e12:
        raise NonConvergence("no start produced a finite principal cost")
    return make_belief(np.append(best.x, 1 - best.x.sum())), starts


def _check_entropy_log_domain(x, x_low, x_high, mu):
    if not (0 < x < 1):
        raise DomainViolation(f"x={x} must lie in (0, 1)")
    if not (0 < x_low < mu < x_high < 1):
        raise DomainViolation("need 0 < x_low < mu < x_high < 1")


def entropy_log_objective(x: float, x_low: float, x_high: float, mu: float, kappa: float) -> float:
    """Principal's cost with entropy information cost and log utility, as a
    function of the tangency point ``x`` (two states, ``v0 = 0``)."""
    _check_entropy_log_domain(x, x_low, x_high, mu)
    k1 = kappa + 1
    hi = (mu - x_low) * (x_high ** k1 / x + (1 - x_high) ** k1 / (1 - x))
    lo = (x_high - mu) * (x_low ** k1 / x + (1 - x_low) ** k1 / (1 - x))
    return -1.0 + (hi + lo) / (x_high - x_low)


def entropy_log_foc(x: float, x_low: float, x_high: float, mu: float, kappa: float) -> float:
    """First-order condition of :func:`entropy_log_objective`, scaled by ``x_high - x_low``."""
    _check_entropy_log_domain(x, x_low, x_high, mu)
    k1 = kappa + 1
    return ((mu - x_low) * ((1 - x_high) ** k1 / (1 - x) ** 2 - x_high ** k1 / x ** 2)
            + (x_high - mu) * ((1 - x_low) ** k1 / (x - 1) ** 2 - x_low ** k1 / x ** 2))


def minimize_entropy_log_objective(x_low, x_high, mu, kappa) -> float:
    """Root of the first-order condition (the objective is strictly convex)."""
    f = lambda x: entropy_log_foc(x, x_low, x_high, mu, kappa)
    lo, hi = 1e-12, 1 - 1e-12
    return optimize.brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


# ------------------------------------------------------ limited liability, n = 2


@dataclass
class RegionLabel:
    label: str
    contract: Contract
    principal_cost: float
    gamma: float
    beta: float
    ic_margin: float
    margins: dict = field(default_factory=dict)


class _TwoStateProblem:
    """Scalar pieces shared by the regime tests for one ``{x_low, x_high}``."""

    def __init__(self, x_low, x_high, cost: CostModel, v0: float):
        self.sc = ScalarCost(cost)
        self.kappa = cost.kappa
        self.mu = self.sc.mu
        self.x_low, self.x_high, self.v0 = x_low, x_high, v0
        c, dc, k = self.sc.c, self.sc.dc, self.kappa
        # optimal learning pins down A = alpha - gamma and B = delta - beta
        self.A = k * (dc(x_high) * x_high - dc(x_low) * x_low) - k * (c(x_high) - c(x_low))
        self.B = k * (dc(x_high) - dc(x_low)) - self.A
        self.cl, self.dcl = c(x_low), dc(x_low)
        self.lo, self.hi = EPS_INTERIOR, 1 - EPS_INTERIOR

    def line(self, x, gamma=0.0, beta=0.0):
        k = self.kappa
        return ((beta - gamma - self.A - k * self.dcl) * x + gamma + self.A
                - k * (self.cl - self.x_low * self.dcl))

    def gap(self, x, gamma=0.0, beta=0.0):
        return self.line(x, gamma, beta) - self.v0 + self.kappa * self.sc.c(x)

    def gap_argmin(self, gamma=0.0, beta=0.0):
        # g'(x) = beta - gamma - A - k c'(x_L) + k c'(x); g is convex
        target = (self.A + gamma - beta) / self.kappa + self.dcl
        return self.sc.c_inv_derivative(target, self.lo, self.hi)

    def min_gap(self, gamma=0.0, beta=0.0):
        x = self.gap_argmin(gamma, beta)
        return self.gap(x, gamma, beta), x

    def contract(self, gamma, beta) -> Contract:
        t = [[self.A + gamma, beta], [gamma, self.B + beta]]
        return make_contract([two_state_belief(self.x_low), two_state_belief(self.x_high)], t)


def _one_sided(prob: _TwoStateProblem, which: str):
    """Smallest ``gamma`` (with ``beta = 0``) or ``beta`` (with ``gamma = 0``) meeting IC.

    The concavifying line rises pointwise in either variable, so the
    minimum walk-away gap is monotone and bisection applies.  Returns
    ``None`` if no finite value restores IC.
    """
    def m(s):
        return prob.min_gap(gamma=s, beta=0.0)[0] if which == "gamma" else prob.min_gap(gamma=0.0, beta=s)[0]

    if m(0.0) >= 0:
        return 0.0
    hi = 1.0
    while m(hi) < 0:
        hi *= 2
        if hi > 1e8:
            return None
    try:
        s = optimize.brentq(m, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    except (ValueError, RuntimeError) as exc:
        raise RootFindFailure(str(exc)) from exc
    return float(s)


def solve_ll_risk_neutral_two_state(F: PosteriorDistribution, cost: CostModel, v0: float,
                                    eta_tol: float = 1e-9) -> RegionLabel:
    """Cheapest limited-liability contract for a risk-neutral agent, two states."""
    x_low, x_high = scalar_support(F)
    eta1, eta2, eta = eta_values(x_low, x_high, cost)
    k = cost.kappa
    margins = {"eta_1": eta1, "eta_2": eta2, "eta": eta, "v0_over_kappa": v0 / k}
    rn = risk_neutral()

    if v0 / k >= eta - eta_tol:
        contract = construct_efficient(F, cost, v0)
        if F.m == 2:
            g = two_state_greeks(contract)
            gamma, beta = g["gamma"], g["beta"]
        else:
            gamma = beta = v0
        return RegionLabel("efficient", contract, principal_cost(contract, F, rn), gamma, beta,
                           0.0, margins)

    if not (x_low < x_high):
        raise BoundarySupport("degenerate support is always efficient")
    prob = _TwoStateProblem(x_low, x_high, cost, v0)
    gmin, x_dag = prob.min_gap()
    margins.update(gap_argmin=x_dag, min_gap=gmin, alpha_minus_gamma=prob.A, delta_minus_beta=prob.B)
    if gmin >= 0:
        contract = prob.contract(0.0, 0.0)
        return RegionLabel("interior_zero_zero", contract, principal_cost(contract, F, rn),
                           0.0, 0.0, gmin, margins)

    options = []
    gamma = _one_sided(prob, "gamma")
    if gamma is not None:
        options.append(("beta_zero", gamma, 0.0, gamma * (1 - prob.mu)))
    beta = _one_sided(prob, "beta")
    if beta is not None:
        options.append(("gamma_zero", 0.0, beta, beta * prob.mu))
    if not options:
        raise SolverFailure("neither one-sided contract satisfies IC; inconsistent with the regime theory")
    label, gamma, beta, _ = min(options, key=lambda o: o[3])
    contract = prob.contract(gamma, beta)
    margins["alternatives"] = {o[0]: {"gamma": o[1], "beta": o[2], "extra_cost": o[3]} for o in options}
    return RegionLabel(label, contract, principal_cost(contract, F, rn), gamma, beta,
                       prob.min_gap(gamma, beta)[0], margins)


@dataclass
class SweepCell:
    x_low: float
    x_high: float
    label: str
    gamma: float
    beta: float
    principal_cost: float
    ic_margin: float


def sweep_regions(mu: float, v0_over_kappa: float, cost_kind: str = "entropy",
                  resolution: int = 200, kappa: float = 1.0) -> list[SweepCell]:
    """Regime label for every cell centre of a grid over ``(0, mu) x (mu, 1)``.

    Cells whose centre is within 1e-4 of the prior or the boundary are
    skipped; cells whose solve fails are labelled ``unresolved``.
    """
    if resolution < 2:
        raise ResolutionTooCoarse("resolution must be at least 2")
    cost = make_cost(cost_kind, two_state_belief(mu), kappa)
    v0 = v0_over_kappa * kappa
    cells = []
    for i in range(resolution):
        x_low = mu * (i + 0.5) / resolution
        for j in range(resolution):
            x_high = mu + (1 - mu) * (j + 0.5) / resolution
            if min(x_low, mu - x_low, x_high - mu, 1 - x_high) < 1e-4:
                continue
            try:
                F = two_state_distribution(x_low, x_high, mu)
                r = solve_ll_risk_neutral_two_state(F, cost, v0)
                cells.append(SweepCell(x_low, x_high, r.label, r.gamma, r.beta,
                                       r.principal_cost, r.ic_margin))
            except Exception:  # noqa: BLE001 - any per-cell failure is recorded, not fatal
                cells.append(SweepCell(x_low, x_high, "unresolved", math.nan, math.nan,
                                       math.nan, math.nan))
    return cells


CSV_COLUMNS = ("x_L", "x_H", "label", "gamma", "beta", "principal_cost", "ic_margin")


def write_region_csv(cells: list[SweepCell], dest) -> None:
    """Write cells to a path or an open text stream."""
    if hasattr(dest, "write"):
        _write_rows(cells, dest)
    else:
        with open(dest, "w", newline="") as fh:
            _write_rows(cells, fh)


def _write_rows(cells, fh):
    w = csv.writer(fh)
    w.writerow(CSV_COLUMNS)
    for c in cells:
        w.writerow([f"{c.x_low:.12g}", f"{c.x_high:.12g}", c.label, f"{c.gamma:.12g}",
                    f"{c.beta:.12g}", f"{c.principal_cost:.12g}", f"{c.ic_margin:.12g}"])


def label_counts(cells: list[SweepCell]) -> dict[str, int]:
    counts = {lab: 0 for lab in LABELS + ("unresolved",)}
    for c in cells:
        counts[c.label] += 1
    return counts
