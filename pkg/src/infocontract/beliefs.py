"""Points of the probability simplex and finite Bayes-plausible distributions.

Beliefs are stored as full probability vectors.  Code that differentiates
the cost works on reduced coordinates, i.e. the first ``n - 1`` entries,
with the last state's probability implied.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    NegativeEntry,
    NotBayesPlausible,
    SumNotOne,
    SupportTooLarge,
    TooFewStates,
    WeightSolveSingular,
)

EPS_INTERIOR = 1e-9
SUM_TOL = 1e-9  # accepted input deviation of sum(probs) from 1
BAYES_TOL = 1e-10
WEIGHT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Belief:
    probs: np.ndarray

    @property
    def n(self) -> int:
        return len(self.probs)

    @property
    def reduced(self) -> np.ndarray:
        return self.probs[:-1]

    def is_interior(self, eps: float = EPS_INTERIOR) -> bool:
        return bool(np.all(self.probs >= eps))

    def allclose(self, other: "Belief", atol: float = 1e-12) -> bool:
        return self.n == other.n and bool(np.allclose(self.probs, other.probs, rtol=0, atol=atol))

    def __repr__(self) -> str:
        return "Belief(" + ", ".join(f"{p:.6g}" for p in self.probs) + ")"


def make_belief(probs: Sequence[float]) -> Belief:
    """Validate ``probs`` and wrap it as a :class:`Belief`.

    Inputs whose sum is off by more than 1e-9 are rejected; smaller drift is
    absorbed into the largest entry so the stored vector sums to 1 to
    machine precision.
    """
    p = np.array(probs, dtype=float).ravel()
    if p.size < 2:
        raise TooFewStates(f"need at least 2 states, got {p.size}")
    if not np.all(np.isfinite(p)):
        raise NegativeEntry("belief entries must be finite")
    if np.any(p < 0):
        raise NegativeEntry(f"negative probability in {p.tolist()}")
    total = float(p.sum())
    if abs(total - 1.0) > SUM_TOL:
        raise SumNotOne(f"probabilities sum to {total!r}")
    if total != 1.0:
        i = int(np.argmax(p))
        p[i] += 1.0 - total
    p.setflags(write=False)
    return Belief(p)


def two_state_belief(x: float) -> Belief:
    """Belief over two states from the probability ``x`` of the second state.

    This is the orientation used by all scalar two-state routines: a
    message at a low ``x`` bets on the first state.
    """
    return make_belief([1.0 - x, x])


@dataclass(frozen=True, eq=False)
class PosteriorDistribution:
    support: tuple[Belief, ...]
    weights: np.ndarray
    prior: Belief

    @property
    def m(self) -> int:
        return len(self.support)

    @property
    def n(self) -> int:
        return self.prior.n

    def matrix(self) -> np.ndarray:
        """Support posteriors as an ``m x n`` array (one row per posterior)."""
        return np.vstack([b.probs for b in self.support])


def _solve_weights(support: Sequence[Belief], prior: Belief) -> np.ndarray:
    A = np.column_stack([b.probs for b in support])
    if np.linalg.matrix_rank(A, tol=1e-12) < len(support):
        raise WeightSolveSingular("support is not affinely independent")
    w, *_ = np.linalg.lstsq(A, prior.probs, rcond=None)
    return w


def make_distribution(
    support: Sequence[Belief],
    weights: Sequence[float] | None,
    prior: Belief,
) -> PosteriorDistribution:
    """Build a validated distribution over posteriors.

    With ``weights=None`` the weights are solved from Bayes plausibility,
    which requires an affinely independent support.
    """
    support = tuple(support)
    n = prior.n
    if not support:
        raise NotBayesPlausible("empty support")
    if any(b.n != n for b in support):
        raise NotBayesPlausible("support beliefs and prior have different state counts")
    if len(support) > n:
        raise SupportTooLarge(f"{len(support)} posteriors for {n} states")
    for a, b in itertools.combinations(support, 2):
        if a.allclose(b, atol=1e-12):
            raise NotBayesPlausible("support points must be distinct")

    if weights is None:
        w = _solve_weights(support, prior)
        if np.any(w < -WEIGHT_TOL):
            raise NotBayesPlausible(f"prior outside the convex hull of the support (weights {w.tolist()})")
        w = np.clip(w, 0.0, None)
    else:
        w = np.array(weights, dtype=float).ravel()
        if w.size != len(support):
            raise NotBayesPlausible("weights and support differ in length")
        if np.any(w < -WEIGHT_TOL):
            raise NotBayesPlausible("negative weight")
    if abs(float(w.sum()) - 1.0) > WEIGHT_TOL * max(1, len(support)) * 10:
        raise NotBayesPlausible(f"weights sum to {float(w.sum())!r}")
    mean = w @ np.vstack([b.probs for b in support])
    gap = float(np.max(np.abs(mean - prior.probs)))
    if gap > BAYES_TOL:
        raise NotBayesPlausible(f"mean posterior misses the prior by {gap:.3g}")
    w.setflags(write=False)
    return PosteriorDistribution(support, w, prior)


def two_state_distribution(x_low: float, x_high: float, mu: float) -> PosteriorDistribution:
    """Binary distribution ``{x_low, x_high}`` around prior ``mu`` (scalar form).

    Scalars are probabilities of the second state.  ``x_low == x_high == mu``
    yields the degenerate (no learning) distribution.
    """
    prior = two_state_belief(mu)
    if x_low == x_high:
        return make_distribution([two_state_belief(x_low)], [1.0], prior)
    if not x_low < x_high:
        raise NotBayesPlausible("need x_low < x_high")
    p_high = (mu - x_low) / (x_high - x_low)
    return make_distribution(
        [two_state_belief(x_low), two_state_belief(x_high)], [1.0 - p_high, p_high], prior
    )


def _clip_interior(p: np.ndarray, eps: float) -> np.ndarray:
    q = np.maximum(p, eps)
    excess = q.sum() - 1.0
    q[int(np.argmax(q))] -= excess
    return q


def simplex_grid(n: int, resolution: int, eps: float = EPS_INTERIOR) -> list[Belief]:
    """All beliefs with denominators ``resolution``, nudged into the interior.

    Zero coordinates are raised to ``eps`` and the excess is taken from the
    largest coordinate, so every point still sums to one.  Ordering is
    lexicographic in the numerators.
    """
    if n < 2:
        raise TooFewStates(f"need at least 2 states, got {n}")
    if resolution < 1:
        raise ValueError("resolution must be positive")
    points = []
    for head in itertools.product(range(resolution + 1), repeat=n - 1):
        s = sum(head)
        if s > resolution:
            continue
        p = np.array(head + (resolution - s,), dtype=float) / resolution
        points.append(make_belief(_clip_interior(p, eps)))
    return points


def grid_count(n: int, resolution: int) -> int:
    return math.comb(resolution + n - 1, n - 1)
