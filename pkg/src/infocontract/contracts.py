"""Contracts, agent payoffs and principal costs.

Transfers are held in utils (``t[j, k]`` is the payment for message ``j`` in
state ``k``); conversion to money happens only in :func:`principal_cost` and
:func:`first_best_cost`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .beliefs import Belief, PosteriorDistribution
from .costs import CostModel, expected_cost
from .errors import (
    BadMessageIndex,
    IncompleteStrategy,
    InvalidInput,
    TransferOutsideUtilityDomain,
)

TIE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Contract:
    messages: tuple[Belief, ...]
    transfers: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.transfers, dtype=float)
        if t.ndim != 2 or t.shape[0] != len(self.messages):
            raise InvalidInput(f"transfer matrix shape {t.shape} does not match {len(self.messages)} messages")
        if any(b.n != t.shape[1] for b in self.messages):
            raise InvalidInput("message beliefs and transfer columns disagree on the state count")
        if t.shape[0] > t.shape[1]:
            raise InvalidInput("more messages than states")
        if not np.all(np.isfinite(t)):
            raise InvalidInput("transfers must be finite")
        t = t.copy()
        t.setflags(write=False)
        object.__setattr__(self, "transfers", t)
        object.__setattr__(self, "messages", tuple(self.messages))

    @property
    def m(self) -> int:
        return len(self.messages)

    @property
    def n(self) -> int:
        return self.transfers.shape[1]

    def with_transfers(self, transfers) -> "Contract":
        return Contract(self.messages, np.asarray(transfers, dtype=float))


def make_contract(messages: Sequence[Belief], transfers) -> Contract:
    return Contract(tuple(messages), np.asarray(transfers, dtype=float))


@dataclass(frozen=True, eq=False)
class UtilityModel:
    kind: str
    v: Callable[[float], float]
    v_inverse: Callable[[float], float]

    def money(self, utils):
        return np.vectorize(self.v_inverse, otypes=[float])(utils)


def risk_neutral() -> UtilityModel:
    return UtilityModel("risk_neutral", lambda t: t, lambda u: u)


def log_utility() -> UtilityModel:
    # v(t) = log(1 + t); the inverse is total on the reals
    return UtilityModel("log", lambda t: math.log1p(t), lambda u: math.expm1(u))


def custom_utility(v, v_inverse) -> UtilityModel:
    if abs(v(0.0)) > 1e-12:
        raise InvalidInput("utility must satisfy v(0) = 0")
    return UtilityModel("custom", v, v_inverse)


def make_utility(kind: str) -> UtilityModel:
    if kind == "risk_neutral":
        return risk_neutral()
    if kind == "log":
        return log_utility()
    raise InvalidInput(f"unknown utility kind {kind!r}")


@dataclass(frozen=True)
class Hyperplane:
    """Affine ``f(x) = slopes @ x_reduced + intercept``."""

    slopes: np.ndarray
    intercept: float

    def __call__(self, x: Belief) -> float:
        return float(self.slopes @ x.reduced) + self.intercept

    def gradient(self) -> np.ndarray:
        return self.slopes


def _check_index(contract: Contract, d: int) -> None:
    if not 0 <= d < contract.m:
        raise BadMessageIndex(f"message index {d} out of range 0..{contract.m - 1}")


def net_utility(contract: Contract, x: Belief, d: int, cost: CostModel) -> float:
    _check_index(contract, d)
    return float(x.probs @ contract.transfers[d]) - cost.scaled(x)


def value_function(contract: Contract, x: Belief, cost: CostModel, tol: float = TIE_TOL):
    """Return ``(W(x), maximizers)``; ties within ``tol`` are all reported."""
    gross = contract.transfers @ x.probs
    best = float(gross.max())
    argmax = tuple(int(j) for j in np.flatnonzero(gross >= best - tol))
    return best - cost.scaled(x), argmax


def hyperplane_from_message(contract: Contract, j: int, cost: CostModel) -> Hyperplane:
    """Tangent to ``N(. | j)`` at the message's own posterior."""
    _check_index(contract, j)
    x = contract.messages[j]
    t = contract.transfers[j]
    g = cost.kappa * cost.gradient(x)
    slopes = t[:-1] - t[-1] - g
    intercept = t[-1] - cost.scaled(x) + float(g @ x.reduced)
    return Hyperplane(slopes, float(intercept))


def truthful(F: PosteriorDistribution) -> np.ndarray:
    return np.eye(F.m)


def strategy_value(contract: Contract, F: PosteriorDistribution, reporting, cost: CostModel) -> float:
    """Agent's expected payoff from learning ``F`` and reporting per ``reporting``.

    ``reporting[i]`` is the distribution over messages used at the ``i``-th
    support posterior.
    """
    sigma = np.asarray(reporting, dtype=float)
    if sigma.shape != (F.m, contract.m):
        raise IncompleteStrategy(f"reporting has shape {sigma.shape}, expected {(F.m, contract.m)}")
    if np.any(sigma < 0) or not np.allclose(sigma.sum(axis=1), 1.0, atol=1e-12):
        raise IncompleteStrategy("each posterior needs a probability distribution over messages")
    total = 0.0
    for i, (w, x) in enumerate(zip(F.weights, F.support)):
        kc = cost.scaled(x)
        for d in range(contract.m):
            if sigma[i, d] > 0:
                total += w * sigma[i, d] * (float(x.probs @ contract.transfers[d]) - kc)
    return float(total)


def principal_cost(contract: Contract, F: PosteriorDistribution, utility: UtilityModel) -> float:
    """Expected money paid under truthful reporting."""
    if contract.m != F.m:
        raise InvalidInput("contract messages and distribution support differ in size")
    try:
        money = utility.money(contract.transfers)
    except (ValueError, OverflowError) as exc:
        raise TransferOutsideUtilityDomain(str(exc)) from exc
    if not np.all(np.isfinite(money)):
        raise TransferOutsideUtilityDomain("transfer has no finite money equivalent")
    return float(sum(w * float(x.probs @ row) for w, x, row in zip(F.weights, F.support, money)))


def first_best_cost(F: PosteriorDistribution, cost: CostModel, utility: UtilityModel, v0: float) -> float:
    if v0 < 0:
        raise InvalidInput("outside option must be nonnegative")
    return float(utility.v_inverse(expected_cost(cost, F) + v0))
