"""Convex minimization over the probability simplex.

Objectives here are always convex (affine plus a multiple of the cost), so a
local minimizer is global.  One dimension uses bounded Brent/golden-section
search; higher dimensions use SLSQP on reduced coordinates.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize

from .beliefs import EPS_INTERIOR, Belief, make_belief, simplex_grid
from .errors import MinimizationFailure


@dataclass
class SimplexMin:
    x: Belief
    value: float
    method: str  # "convex" or "grid"


def _to_probs(y: np.ndarray) -> np.ndarray:
    return np.append(y, 1.0 - y.sum())


def minimize_on_simplex(
    f: Callable[[Belief], float],
    grad: Callable[[Belief], np.ndarray] | None,
    n: int,
    eps: float = EPS_INTERIOR,
    x0: Belief | None = None,
) -> SimplexMin:
    """Minimize a convex ``f`` over ``{x in simplex : x_i >= eps}``.

    ``grad`` returns the gradient in reduced coordinates.  Raises
    :class:`MinimizationFailure` if the solver reports failure.
    """
    if n == 2:
        res = optimize.minimize_scalar(
            lambda y: f(make_belief([y, 1.0 - y])),
            bounds=(eps, 1.0 - eps),
            method="bounded",
            options={"xatol": 1e-12, "maxiter": 2000},
        )
        if not res.success:
            raise MinimizationFailure(str(res.message))
        x = make_belief([res.x, 1.0 - res.x])
        # bounded search never evaluates the endpoints themselves
        best = (float(res.fun), x)
        for y in (eps, 1.0 - eps):
            b = make_belief([y, 1.0 - y])
            v = f(b)
            if v < best[0]:
                best = (v, b)
        return SimplexMin(best[1], best[0], "convex")

    def obj(y):
        return f(_safe_belief(y, eps))

    def jac(y):
        return np.asarray(grad(_safe_belief(y, eps)), dtype=float)

    start = (x0.reduced.copy() if x0 is not None else np.full(n - 1, 1.0 / n))
    cons = [{
        "type": "ineq",
        "fun": lambda y: 1.0 - eps - y.sum(),
        "jac": lambda y: -np.ones_like(y),
    }]
    with warnings.catch_warnings():
        # SLSQP clips steps that leave the box; _safe_belief handles the rest
        warnings.filterwarnings("ignore", "Values in x were outside bounds", RuntimeWarning)
        res = optimize.minimize(
            obj, start, jac=jac if grad is not None else None, method="SLSQP",
            bounds=[(eps, 1.0)] * (n - 1), constraints=cons,
            options={"ftol": 1e-15, "maxiter": 1000},
        )
    if not res.success and res.status not in (8,):  # 8: positive directional derivative at converged point
        raise MinimizationFailure(str(res.message))
    x = _safe_belief(res.x, eps)
    return SimplexMin(x, float(f(x)), "convex")


def _safe_belief(y: np.ndarray, eps: float) -> Belief:
    y = np.clip(np.asarray(y, dtype=float), eps, 1.0)
    p = _to_probs(y)
    if p[-1] < eps:
        # pull back inside the band along the ray to the centroid
        n = len(p)
        c = np.full(n, 1.0 / n)
        t = (1.0 / n - eps) / (1.0 / n - p[-1])
        p = c + t * (p - c)
    return make_belief(p / p.sum())


def grid_minimum(f: Callable[[Belief], float], n: int, resolution: int) -> SimplexMin:
    best_v, best_x = np.inf, None
    for b in simplex_grid(n, resolution):
        v = f(b)
        if v < best_v:
            best_v, best_x = v, b
    return SimplexMin(best_x, float(best_v), "grid")


def default_grid_resolution(n: int) -> int:
    return {2: 400, 3: 60, 4: 20}.get(n, 8)


def certified_minimum(
    f: Callable[[Belief], float],
    grad: Callable[[Belief], np.ndarray] | None,
    n: int,
    grid_resolution: int | None = None,
    x0: Belief | None = None,
) -> SimplexMin:
    """Convex minimization cross-checked against a simplex grid.

    The grid can only undercut the convex result if the solver stalled; in
    that case (or on solver failure) the grid value is returned and the
    method is reported as ``"grid"``.
    """
    res = grid_resolution or default_grid_resolution(n)
    grid = grid_minimum(f, n, res)
    try:
        conv = minimize_on_simplex(f, grad, n, x0=x0 if x0 is not None else grid.x)
    except MinimizationFailure:
        return grid
    if grid.value < conv.value - 1e-6:
        return grid
    return conv
