"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 infeasible or not implementable,
4 solver failure.  Results go to stdout (or ``--output``); stderr carries
only diagnostics, with errors as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import io
from .constructors import (
    construct_efficient,
    construct_efficient_ll,
    construct_ll_zero,
    construct_tau_contract,
    two_state_greeks,
)
from .errors import ContractError, InvalidInput, LimitedLiabilityInfeasible, SolverFailure
from .solvers import (
    label_counts,
    solve_ll_risk_neutral_two_state,
    solve_risk_averse_tangency,
    sweep_regions,
    write_region_csv,
)
from .verification import MARGIN_TOL, verify

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_SOLVER = 0, 2, 3, 4

CONSTRUCTORS = {
    "tau": lambda F, cost, v0: construct_tau_contract(F, cost, v0),
    "efficient": construct_efficient,
    "ll-zero": lambda F, cost, v0: construct_ll_zero(F, cost),
    "efficient-ll": construct_efficient_ll,
}


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_construct(args) -> int:
    prob = io.load_problem(args.problem)
    F, cost, v0 = prob.distribution, prob.cost, prob.outside_option
    require_ll = args.require_ll or prob.limited_liability or args.mode in ("ll-zero", "efficient-ll")
    contract = CONSTRUCTORS[args.mode](F, cost, v0)
    report = verify(contract, F, cost, prob.utility, v0, require_ll=require_ll, tol=args.tolerance)
    extra = {"mode": args.mode}
    if contract.n == 2 and contract.m == 2:
        extra["greeks"] = two_state_greeks(contract)
    _emit(io.dumps(io.contract_to_dict(contract, prob.utility, report, **extra)), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    prob = io.load_problem(args.problem)
    contract = io.contract_from_dict(io.read_json(args.contract))
    if contract.m != prob.distribution.m or contract.n != prob.states:
        raise InvalidInput("contract shape does not match the problem's distribution")
    require_ll = args.require_ll or prob.limited_liability
    report = verify(contract, prob.distribution, prob.cost, prob.utility, prob.outside_option,
                    require_ll=require_ll, tol=args.tolerance)
    _emit(io.dumps(io.report_to_dict(report)), args.output)
    return EXIT_OK if report.implementable else EXIT_INFEASIBLE


def cmd_solve(args) -> int:
    prob = io.load_problem(args.problem)
    F, cost, v0 = prob.distribution, prob.cost, prob.outside_option
    if args.solver == "risk-averse":
        sol = solve_risk_averse_tangency(F, cost, prob.utility, v0, seed=args.seed)
        out = io.contract_to_dict(sol.contract, prob.utility, solver=args.solver,
                                  x_star=sol.x_star.probs, principal_cost=sol.principal_cost,
                                  surplus=sol.surplus)
    else:
        if prob.states != 2:
            raise InvalidInput("ll-two-state needs a two-state problem")
        r = solve_ll_risk_neutral_two_state(F, cost, v0)
        extra = dict(solver=args.solver, label=r.label, gamma=r.gamma, beta=r.beta,
                     principal_cost=r.principal_cost, ic_margin=r.ic_margin,
                     margins={k: v for k, v in r.margins.items() if k != "alternatives"})
        if r.contract.m == 2:
            extra["greeks"] = two_state_greeks(r.contract)
        out = io.contract_to_dict(r.contract, prob.utility, **extra)
    _emit(io.dumps(out), args.output)
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.resolution < 2:
        raise InvalidInput("resolution must be at least 2")
    if not (0 < args.mu < 1) or not (args.v0_over_kappa >= 0):
        raise InvalidInput("need 0 < mu < 1 and v0/kappa >= 0")
    cells = sweep_regions(args.mu, args.v0_over_kappa, args.cost, args.resolution)
    write_region_csv(cells, args.output or sys.stdout)
    counts = label_counts(cells)
    summary = {"cells": len(cells), "counts": counts}
    print(json.dumps(summary), file=sys.stdout if args.output else sys.stderr)
    if counts["unresolved"] >= 0.001 * max(len(cells), 1):
        return EXIT_SOLVER
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="infocontract", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--tolerance", type=float, default=MARGIN_TOL)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--output", "-o", default=None)

    c = sub.add_parser("construct", help="build a contract for a problem file")
    c.add_argument("problem")
    c.add_argument("--mode", choices=sorted(CONSTRUCTORS), default="efficient")
    c.add_argument("--require-ll", action="store_true")
    common(c)
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="check a contract against a problem file")
    v.add_argument("problem")
    v.add_argument("contract")
    v.add_argument("--require-ll", action="store_true")
    common(v)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("solve", help="optimal contract for a problem file")
    s.add_argument("problem")
    s.add_argument("--solver", choices=["risk-averse", "ll-two-state"], default="ll-two-state")
    common(s)
    s.set_defaults(func=cmd_solve)

    w = sub.add_parser("sweep", help="two-state regime map as CSV")
    w.add_argument("--mu", type=float, default=0.5)
    w.add_argument("--v0-over-kappa", type=float, required=True)
    w.add_argument("--cost", choices=["entropy", "quadratic"], default="entropy")
    w.add_argument("--resolution", type=int, default=200)
    common(w)
    w.set_defaults(func=cmd_sweep)
    return p


def _error_payload(exc: Exception) -> dict:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, LimitedLiabilityInfeasible):
        payload.update(state=exc.state, message_index=exc.message_index,
                       min_transfer=exc.min_transfer, margin=exc.margin, eta=exc.eta)
    return io.rounded(payload)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return args.func(args)
    except LimitedLiabilityInfeasible as exc:
        code = EXIT_INFEASIBLE
        err = exc
    except InvalidInput as exc:
        code, err = EXIT_INVALID, exc
    except SolverFailure as exc:
        code, err = EXIT_SOLVER, exc
    except ContractError as exc:
        code, err = EXIT_SOLVER, exc
    print(json.dumps(_error_payload(err)), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
