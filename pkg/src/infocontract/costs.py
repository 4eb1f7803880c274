"""Posterior-separable information costs.

A :class:`CostModel` bundles the scale ``kappa`` with a convex ``c`` that
vanishes at the prior.  Gradients are taken in reduced coordinates: the
``k``-th partial treats ``x_n = 1 - sum_{i<n} x_i`` as implied.

Two-state quadratic cost uses the scalar form ``(x_1 - mu_1)**2`` rather
than the full-vector sum, which would double it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .beliefs import Belief, PosteriorDistribution
from .errors import BoundaryPoint, InvalidInput

KINDS = ("entropy", "quadratic", "custom")


def _negentropy(p: np.ndarray) -> float:
    return float(np.sum(p * np.log(p)))


@dataclass(frozen=True, eq=False)
class CostModel:
    kind: str
    kappa: float
    prior: Belief
    value_fn: Callable[[np.ndarray], float] | None = None
    grad_fn: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInput(f"unknown cost kind {self.kind!r}")
        if not (self.kappa > 0 and math.isfinite(self.kappa)):
            raise InvalidInput("kappa must be positive")
        if self.kind == "custom" and (self.value_fn is None or self.grad_fn is None):
            raise InvalidInput("custom cost needs value_fn and grad_fn")
        if self.kind == "custom" and abs(float(self.value_fn(self.prior.probs))) > 1e-9:
            raise InvalidInput("custom cost must vanish at the prior")
        if self.kind == "entropy" and not self.prior.is_interior(1e-300):
            raise InvalidInput("entropy cost needs a full-support prior")

    @property
    def n(self) -> int:
        return self.prior.n

    def value(self, x: Belief) -> float:
        p = x.probs
        mu = self.prior.probs
        if self.kind == "entropy":
            if np.any(p <= 0):
                raise BoundaryPoint(f"entropy cost undefined at {x!r}")
            return _negentropy(p) - _negentropy(mu)
        if self.kind == "quadratic":
            if self.n == 2:
                return float((p[0] - mu[0]) ** 2)
            return float(np.sum((p - mu) ** 2))
        return float(self.value_fn(p))

    def gradient(self, x: Belief) -> np.ndarray:
        p = x.probs
        mu = self.prior.probs
        if self.kind == "entropy":
            if np.any(p <= 0):
                raise BoundaryPoint(f"entropy gradient undefined at {x!r}")
            logs = np.log(p)
            return logs[:-1] - logs[-1]
        if self.kind == "quadratic":
            if self.n == 2:
                return np.array([2.0 * (p[0] - mu[0])])
            d = p - mu
            return 2.0 * (d[:-1] - d[-1])
        return np.asarray(self.grad_fn(p), dtype=float)

    def scaled(self, x: Belief) -> float:
        return self.kappa * self.value(x)


def entropy_cost(prior: Belief, kappa: float = 1.0) -> CostModel:
    return CostModel("entropy", kappa, prior)


def quadratic_cost(prior: Belief, kappa: float = 1.0) -> CostModel:
    return CostModel("quadratic", kappa, prior)


def custom_cost(prior: Belief, kappa: float, value_fn, grad_fn) -> CostModel:
    return CostModel("custom", kappa, prior, value_fn, grad_fn)


def make_cost(kind: str, prior: Belief, kappa: float = 1.0) -> CostModel:
    if kind == "entropy":
        return entropy_cost(prior, kappa)
    if kind == "quadratic":
        return quadratic_cost(prior, kappa)
    raise InvalidInput(f"cost kind {kind!r} cannot be built from a name alone")


def cost_value(model: CostModel, x: Belief) -> float:
    """Unscaled ``c(x)``; use :meth:`CostModel.scaled` for ``kappa * c(x)``."""
    return model.value(x)


def cost_gradient(model: CostModel, x: Belief) -> np.ndarray:
    return model.gradient(x)


def expected_cost(model: CostModel, F: PosteriorDistribution) -> float:
    return model.kappa * float(sum(w * model.value(x) for w, x in zip(F.weights, F.support)))


def bregman_term(model: CostModel, x: Belief) -> float:
    """``kappa * (c(x) - sum_k c_k(x) x_k)`` over reduced coordinates.

    This is the intercept of the tangent to ``kappa * c`` at ``x`` and the
    building block of the intercept-matching constants between messages.
    """
    return model.kappa * (model.value(x) - float(model.gradient(x) @ x.reduced))


def min_cost(model: CostModel):
    """Minimum of ``c`` over the simplex, as a :class:`~infocontract.optim.SimplexMin`."""
    from .optim import minimize_on_simplex

    return minimize_on_simplex(model.value, model.gradient, model.n)


class ScalarCost:
    """Two-state view of a cost model in the scalar orientation.

    ``x`` is the probability of the second state, so ``dc(x)`` is the
    negative of the reduced gradient (which differentiates in the first
    state's probability).  Entropy and quadratic costs use closed forms.
    """

    def __init__(self, model: CostModel):
        if model.n != 2:
            raise InvalidInput("scalar view needs a two-state cost")
        self.model = model
        self.kappa = model.kappa
        self.mu = float(model.prior.probs[1])
        mu = self.mu
        if model.kind == "entropy":
            h0 = mu * math.log(mu) + (1 - mu) * math.log(1 - mu)

            def c(x):
                if x <= 0 or x >= 1:
                    return -h0 if x in (0.0, 1.0) else _raise_boundary(x)
                return x * math.log(x) + (1 - x) * math.log(1 - x) - h0

            def dc(x):
                if x <= 0 or x >= 1:
                    _raise_boundary(x)
                return math.log(x / (1 - x))

            self.c, self.dc = c, dc
            self.dc_range = (-math.inf, math.inf)
        elif model.kind == "quadratic":
            self.c = lambda x: (x - mu) ** 2
            self.dc = lambda x: 2.0 * (x - mu)
            self.dc_range = (-2.0 * mu, 2.0 * (1 - mu))
        else:
            from .beliefs import two_state_belief

            self.c = lambda x: model.value(two_state_belief(x))
            self.dc = lambda x: -float(model.gradient(two_state_belief(x))[0])
            self.dc_range = None

    def c_inv_derivative(self, target: float, lo: float, hi: float) -> float:
        """Solve ``dc(x) = target`` on ``[lo, hi]``; clamps to an endpoint if unbracketed."""
        from scipy.optimize import brentq

        flo, fhi = self.dc(lo) - target, self.dc(hi) - target
        if flo >= 0:
            return lo
        if fhi <= 0:
            return hi
        return brentq(lambda x: self.dc(x) - target, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def _raise_boundary(x):
    raise BoundaryPoint(f"entropy derivative undefined at x={x}")
