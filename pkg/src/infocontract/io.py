"""Problem files and JSON serialization."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .beliefs import Belief, PosteriorDistribution, make_belief, make_distribution
from .contracts import Contract, UtilityModel, make_contract, make_utility
from .costs import CostModel, make_cost
from .errors import InvalidInput

SCHEMA_VERSION = "1"
SIG_DIGITS = 12


@dataclass
class ProblemSpec:
    states: int
    prior: Belief
    cost: CostModel
    utility: UtilityModel
    outside_option: float
    distribution: PosteriorDistribution
    limited_liability: bool


def _get(d: dict, key: str, kind=None):
    if key not in d:
        raise InvalidInput(f"problem file is missing {key!r}")
    val = d[key]
    if kind is not None and not isinstance(val, kind):
        raise InvalidInput(f"{key!r} has the wrong type")
    return val


def problem_from_dict(d: dict) -> ProblemSpec:
    if str(d.get("version", "")) != SCHEMA_VERSION:
        raise InvalidInput(f"unsupported problem version {d.get('version')!r}")
    n = int(_get(d, "states"))
    prior = make_belief(_get(d, "prior", list))
    if prior.n != n:
        raise InvalidInput("prior length does not match 'states'")
    cost_d = _get(d, "cost", dict)
    cost = make_cost(_get(cost_d, "kind", str), prior, float(cost_d.get("kappa", 1.0)))
    utility = make_utility(_get(d, "utility", dict).get("kind", "risk_neutral"))
    v0 = float(d.get("outside_option", 0.0))
    if not (v0 >= 0 and math.isfinite(v0)):
        raise InvalidInput("outside_option must be a finite nonnegative number")
    dist_d = _get(d, "distribution", dict)
    support = [make_belief(p) for p in _get(dist_d, "support", list)]
    F = make_distribution(support, dist_d.get("weights"), prior)
    return ProblemSpec(n, prior, cost, utility, v0, F, bool(d.get("limited_liability", False)))


def load_problem(path) -> ProblemSpec:
    return problem_from_dict(read_json(path))


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from exc


def problem_to_dict(spec: ProblemSpec) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "states": spec.states,
        "prior": rounded(spec.prior.probs),
        "cost": {"kind": spec.cost.kind, "kappa": spec.cost.kappa},
        "utility": {"kind": spec.utility.kind},
        "outside_option": spec.outside_option,
        "distribution": {"support": [rounded(b.probs) for b in spec.distribution.support],
                         "weights": rounded(spec.distribution.weights)},
        "limited_liability": spec.limited_liability,
    }


def rounded(x):
    """Round floats (or nested sequences of them) to 12 significant digits."""
    if isinstance(x, (list, tuple, np.ndarray)):
        return [rounded(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if not math.isfinite(v):
            return None
        return float(f"{v:.{SIG_DIGITS}g}")
    if isinstance(x, dict):
        return {k: rounded(v) for k, v in x.items()}
    if isinstance(x, Belief):
        return rounded(x.probs)
    return x


def contract_to_dict(contract: Contract, utility: UtilityModel, report=None, **extra) -> dict:
    out = {
        "messages": rounded([b.probs for b in contract.messages]),
        "transfers_utils": rounded(contract.transfers),
        "transfers_money": rounded(utility.money(contract.transfers)),
    }
    if report is not None:
        out["report"] = report_to_dict(report)
    out.update(rounded(extra))
    return out


def contract_from_dict(d: dict) -> Contract:
    try:
        messages = [make_belief(p) for p in d["messages"]]
        return make_contract(messages, np.array(d["transfers_utils"], dtype=float))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidInput):
            raise
        raise InvalidInput(f"malformed contract: {exc}") from exc


def report_to_dict(report) -> dict:
    return rounded({
        "implementable": report.implementable,
        "honest_learning_ok": report.honest_learning_ok,
        "ic_margin": report.ic_margin,
        "ic_argmin": report.ic_argmin.probs,
        "dominance_margin": report.dominance_margin,
        "ll_required": report.ll_required,
        "ll_ok": report.ll_ok,
        "min_transfer": report.min_transfer,
        "agent_surplus": report.agent_surplus,
        "principal_cost": report.principal_cost,
        "first_best_cost": report.first_best_cost,
        "certified_by": report.certified_by,
        "tie_sets": [list(t) for t in report.tie_sets],
        "witnesses": report.witnesses,
    })


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)
