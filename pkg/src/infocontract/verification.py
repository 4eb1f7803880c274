"""Implementability checks and independent agent-side oracles.

The decision procedures exploit convexity: ``f_H - N(.|d)`` and the
walk-away gap ``f_H - v0 + kappa*c`` are affine plus ``kappa*c``, so their
minima over the simplex are found reliably and then cross-checked on a
grid.  The two-state oracles (:func:`concavify_two_state`,
:func:`brute_force_agent_oracle`) share no code with the constructors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .beliefs import EPS_INTERIOR, Belief, PosteriorDistribution, make_belief
from .contracts import (
    Contract,
    Hyperplane,
    UtilityModel,
    first_best_cost,
    hyperplane_from_message,
    principal_cost,
    value_function,
)
from .costs import CostModel
from .errors import InvalidInput, ResolutionTooCoarse, UnsupportedShape
from .optim import certified_minimum

EQ_TOL = 1e-9
MARGIN_TOL = 1e-9


@dataclass
class DominanceResult:
    ok: bool
    margin: float
    witness: dict | None
    hyperplane: Hyperplane
    certified_by: str
    coincidence_gap: float

    def __iter__(self):
        # unpacks as (ok, margin, witness)
        return iter((self.ok, self.margin, self.witness))


@dataclass
class WalkawayResult:
    ok: bool
    margin: float
    argmin: Belief
    certified_by: str

    def __iter__(self):
        return iter((self.ok, self.margin, self.argmin))


@dataclass
class ImplementationReport:
    honest_learning_ok: bool
    ic_margin: float
    ic_argmin: Belief
    ll_required: bool
    ll_ok: bool
    min_transfer: float
    agent_surplus: float
    principal_cost: float
    first_best_cost: float
    certified_by: str
    dominance_margin: float
    witnesses: list[dict] = field(default_factory=list)
    tie_sets: list[tuple[int, ...]] = field(default_factory=list)
    tolerance: float = MARGIN_TOL

    @property
    def implementable(self) -> bool:
        return (self.honest_learning_ok and self.ic_margin >= -self.tolerance
                and (self.ll_ok or not self.ll_required))


def _closeness(a: Hyperplane, b: Hyperplane) -> float:
    return max(float(np.max(np.abs(a.slopes - b.slopes), initial=0.0)), abs(a.intercept - b.intercept))


def check_hyperplane_dominance(contract: Contract, F: PosteriorDistribution, cost: CostModel,
                               tol: float = EQ_TOL, grid_resolution: int | None = None) -> DominanceResult:
    """Check that one hyperplane supports ``W`` at every support posterior.

    The candidate ``f_H`` is the benchmark (last) message's tangent.  Passing
    needs (a) all tangents to coincide, (b) ``f_H >= N(.|d)`` for every
    message, (c) ``f_H(x_j) = W(x_j)`` on the support.
    """
    if contract.m != F.m:
        raise InvalidInput("contract must use the support of F as its messages")
    planes = [hyperplane_from_message(contract, j, cost) for j in range(contract.m)]
    f_h = planes[-1]
    witness = None
    gaps = [_closeness(p, f_h) for p in planes]
    coincidence_gap = max(gaps)
    scale = 1.0 + max(abs(f_h.intercept), float(np.max(np.abs(f_h.slopes), initial=0.0)))
    coincide = coincidence_gap <= tol * scale
    if not coincide:
        j = int(np.argmax(gaps))
        witness = {"kind": "tangent_mismatch", "message": j,
                   "posterior": contract.messages[j].probs.tolist(), "gap": coincidence_gap}

    margin = np.inf
    methods = set()
    n = contract.n
    for d in range(contract.m):
        t = contract.transfers[d]
        g_d = f_h.slopes - (t[:-1] - t[-1])

        def gap(x, t=t):
            return f_h(x) - float(x.probs @ t) + cost.scaled(x)

        def grad(x, g_d=g_d):
            return g_d + cost.kappa * cost.gradient(x)

        res = certified_minimum(gap, grad, n, grid_resolution, x0=contract.messages[d])
        methods.add(res.method)
        if res.value < margin:
            margin = res.value
            if res.value < -tol and (witness is None or witness["kind"] == "tangent_mismatch"):
                witness = {"kind": "dominance", "message": d,
                           "posterior": res.x.probs.tolist(), "gap": res.value}
    contact_ok = True
    for j, x in enumerate(F.support):
        w, _ = value_function(contract, x, cost)
        if abs(w - f_h(x)) > tol * scale:
            contact_ok = False
            if witness is None:
                witness = {"kind": "contact", "message": j, "posterior": x.probs.tolist(),
                           "gap": f_h(x) - w}
    ok = coincide and margin >= -tol and contact_ok
    certified_by = "grid" if "grid" in methods else "convex"
    return DominanceResult(ok, float(margin), witness, f_h, certified_by, coincidence_gap)


def check_ic_walkaway(contract: Contract, F: PosteriorDistribution, cost: CostModel, v0: float,
                      hyperplane: Hyperplane | None = None, tol: float = MARGIN_TOL,
                      grid_resolution: int | None = None) -> WalkawayResult:
    """Minimize ``f_H(x) - v0 + kappa*c(x)``; nonnegative means no walk-away pays."""
    f_h = hyperplane or hyperplane_from_message(contract, contract.m - 1, cost)

    def g(x):
        return f_h(x) - v0 + cost.scaled(x)

    def grad(x):
        return f_h.slopes + cost.kappa * cost.gradient(x)

    res = certified_minimum(g, grad, contract.n, grid_resolution, x0=F.prior)
    return WalkawayResult(res.value >= -tol, float(res.value), res.x, res.method)


def verify(contract: Contract, F: PosteriorDistribution, cost: CostModel, utility: UtilityModel,
           v0: float, require_ll: bool = False, tol: float = MARGIN_TOL) -> ImplementationReport:
    dom = check_hyperplane_dominance(contract, F, cost, tol=max(tol, EQ_TOL))
    ic = check_ic_walkaway(contract, F, cost, v0, hyperplane=dom.hyperplane, tol=tol)
    witnesses = []
    if dom.witness is not None:
        witnesses.append(dom.witness)
    if not ic.ok:
        witnesses.append({"kind": "walkaway", "posterior": ic.argmin.probs.tolist(), "gap": ic.margin})
    t = contract.transfers
    j, k = np.unravel_index(int(np.argmin(t)), t.shape)
    t_min = float(t[j, k])
    ll_ok = t_min >= -tol
    if require_ll and not ll_ok:
        witnesses.append({"kind": "limited_liability", "message": int(j), "state": int(k),
                          "transfer": t_min})
    ties = [value_function(contract, x, cost)[1] for x in F.support]
    honest = dom.ok and all(j in tie for j, tie in enumerate(ties))
    return ImplementationReport(
        honest_learning_ok=honest,
        ic_margin=ic.margin,
        ic_argmin=ic.argmin,
        ll_required=require_ll,
        ll_ok=ll_ok,
        min_transfer=t_min,
        agent_surplus=dom.hyperplane(F.prior) - v0,
        principal_cost=principal_cost(contract, F, utility),
        first_best_cost=first_best_cost(F, cost, utility, v0),
        certified_by="grid" if "grid" in (dom.certified_by, ic.certified_by) else "convex",
        dominance_margin=dom.margin,
        witnesses=witnesses,
        tie_sets=ties,
        tolerance=tol,
    )


# ---------------------------------------------------------------- two states


def _require_two_states(n: int) -> None:
    if n != 2:
        raise UnsupportedShape("two-state routine called with n != 2")


def _upper_hull(xs: np.ndarray, ys: np.ndarray) -> list[int]:
    """Indices of the upper convex hull of points sorted by ``xs`` (Andrew's monotone chain)."""
    hull: list[int] = []
    for i in range(len(xs)):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a])
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return hull


def _w_curve(contract: Contract, cost: CostModel, xs: np.ndarray) -> np.ndarray:
    # xs are first-state probabilities
    t = contract.transfers
    gross = np.max(np.outer(xs, t[:, 0]) + np.outer(1 - xs, t[:, 1]), axis=1)
    kc = np.array([cost.scaled(make_belief([x, 1 - x])) for x in xs])
    return gross - kc


def concavify_two_state(contract: Contract, cost: CostModel, resolution: int = 2000,
                        refine_rounds: int = 3):
    """Upper concave envelope of ``W`` over ``[eps, 1-eps]``.

    Returns ``(contact, hyperplane)``: the endpoints of the envelope segment
    lying over the prior, and that segment as a hyperplane in the first
    state's probability.  If ``W`` is strictly concave around the prior the
    contact set is the prior alone (no learning).  Hull endpoints are
    refined by resampling ever smaller windows around them.
    """
    _require_two_states(contract.n)
    mu = float(cost.prior.probs[0])
    eps = EPS_INTERIOR
    xs = np.unique(np.concatenate([np.linspace(eps, 1 - eps, resolution + 1), [mu]]))
    window = 2.0 / resolution
    for _ in range(refine_rounds + 1):
        lo, hi, hull_x, hull_y = _segment_over(contract, cost, xs, mu)
        extra = [np.linspace(max(eps, q - window), min(1 - eps, q + window), 201)
                 for q in (lo, hi) if q != mu]
        xs = np.unique(np.concatenate([xs, *extra]))
        window /= 50
    lo, hi, hull_x, hull_y = _segment_over(contract, cost, xs, mu)
    local_step = 4 * window * 50 / 200
    if hi - lo <= 10 * max(local_step, 1e-12) or lo == hi:
        return [make_belief([mu, 1 - mu])], _tangent_line(contract, cost, mu)
    ylo = np.interp(lo, hull_x, hull_y)
    yhi = np.interp(hi, hull_x, hull_y)
    slope = (yhi - ylo) / (hi - lo)
    plane = Hyperplane(np.array([slope]), float(ylo - slope * lo))
    return [make_belief([lo, 1 - lo]), make_belief([hi, 1 - hi])], plane


def _segment_over(contract, cost, xs, mu):
    ys = _w_curve(contract, cost, xs)
    hull = _upper_hull(xs, ys)
    hx, hy = xs[hull], ys[hull]
    lo = float(hx[hx <= mu].max())
    hi = float(hx[hx >= mu].min())
    return lo, hi, hx, hy


def _tangent_line(contract, cost, mu):
    h = 1e-6
    w = lambda x: value_function(contract, make_belief([x, 1 - x]), cost)[0]
    slope = (w(mu + h) - w(mu - h)) / (2 * h)
    return Hyperplane(np.array([slope]), float(w(mu) - slope * mu))


@dataclass
class OracleResult:
    value: float
    support: tuple[Belief, ...]
    walkaway_used: bool

    def __iter__(self):
        return iter((self.value, self.support, self.walkaway_used))


def brute_force_agent_oracle(contract: Contract, cost: CostModel, v0: float,
                             resolution: int = 2000, tie_tol: float = 1e-12) -> OracleResult:
    """Exhaustive best response over grid distributions with at most two points.

    At a realized posterior the agent reports the best message or walks
    away, collecting ``max(W(x), v0 - kappa*c(x))``.  Ties are broken
    toward reporting, then toward the earliest pair.
    """
    _require_two_states(contract.n)
    if resolution < 2:
        raise ResolutionTooCoarse("oracle grid needs resolution >= 2")
    mu = float(cost.prior.probs[0])
    eps = EPS_INTERIOR
    xs = np.unique(np.clip(np.concatenate([np.arange(resolution + 1) / resolution, [mu]]), eps, 1 - eps))
    w = _w_curve(contract, cost, xs)
    walk = v0 - np.array([cost.scaled(make_belief([x, 1 - x])) for x in xs])
    u = np.maximum(w, walk)
    walked = walk > w + tie_tol

    left = np.flatnonzero(xs <= mu)
    right = np.flatnonzero(xs >= mu)
    xa, xb = xs[left][:, None], xs[right][None, :]
    width = xb - xa
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(width > 0, (mu - xa) / width, 1.0)
    score = p * u[right][None, :] + (1 - p) * u[left][:, None]
    # a zero-width pair is the degenerate distribution at the prior
    best = float(score.max())
    cand = np.argwhere(score >= best - tie_tol)
    uses_walk = walked[left][cand[:, 0]] & ((1 - p[cand[:, 0], cand[:, 1]]) > 0) \
        | walked[right][cand[:, 1]] & (p[cand[:, 0], cand[:, 1]] > 0)
    order = np.lexsort((cand[:, 1], cand[:, 0], uses_walk))
    ia, ib = cand[order[0]]
    a, b = float(xs[left][ia]), float(xs[right][ib])
    if a == b:
        support = (make_belief([a, 1 - a]),)
    else:
        support = (make_belief([a, 1 - a]), make_belief([b, 1 - b]))
    return OracleResult(float(score[ia, ib]), support, bool(uses_walk[order[0]]))


def blackwell_leq_two_state(F1: PosteriorDistribution, F2: PosteriorDistribution) -> bool:
    """True if binary ``F1`` is a garbling of binary ``F2`` (nested supports)."""
    for F in (F1, F2):
        if F.n != 2 or F.m > 2:
            raise UnsupportedShape("need two-state distributions with at most two posteriors")
    if not F1.prior.allclose(F2.prior, atol=1e-12):
        raise UnsupportedShape("distributions must share a prior")
    a = [float(b.probs[0]) for b in F1.support]
    b = [float(x.probs[0]) for x in F2.support]
    return min(b) <= min(a) + 1e-12 and max(a) <= max(b) + 1e-12
