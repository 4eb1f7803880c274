import math

import numpy as np
import pytest

from infocontract import errors
from infocontract.beliefs import make_belief, two_state_belief, two_state_distribution
from infocontract.contracts import (
    Hyperplane,
    custom_utility,
    first_best_cost,
    hyperplane_from_message,
    log_utility,
    make_contract,
    make_utility,
    net_utility,
    principal_cost,
    risk_neutral,
    strategy_value,
    truthful,
    value_function,
)
from infocontract.costs import entropy_cost, expected_cost


@pytest.fixture
def setup():
    F = two_state_distribution(0.25, 0.75, 0.5)
    cost = entropy_cost(F.prior)
    contract = make_contract(F.support, [[math.log(3), 0.0], [0.0, math.log(3)]])
    return F, cost, contract


def test_contract_validation():
    msgs = [make_belief([0.5, 0.5])]
    with pytest.raises(errors.InvalidInput):
        make_contract(msgs, [[1.0, 2.0, 3.0]])
    with pytest.raises(errors.InvalidInput):
        make_contract(msgs, [[1.0, math.inf]])
    with pytest.raises(errors.InvalidInput):
        make_contract(msgs * 3, np.zeros((3, 2)))


def test_net_utility_by_hand(setup):
    F, cost, contract = setup
    x = make_belief([0.6, 0.4])
    expected = 0.6 * math.log(3) - cost.value(x)
    assert net_utility(contract, x, 0, cost) == pytest.approx(expected, abs=1e-15)
    with pytest.raises(errors.BadMessageIndex):
        net_utility(contract, x, 2, cost)


def test_value_function_ties(setup):
    F, cost, contract = setup
    w, arg = value_function(contract, F.prior, cost)
    assert arg == (0, 1)
    assert w == pytest.approx(0.5 * math.log(3), abs=1e-15)
    w, arg = value_function(contract, make_belief([0.9, 0.1]), cost)
    assert arg == (0,)


def test_hyperplane_is_tangent(setup):
    F, cost, contract = setup
    for j, x in enumerate(F.support):
        plane = hyperplane_from_message(contract, j, cost)
        assert plane(x) == pytest.approx(net_utility(contract, x, j, cost), abs=1e-14)
        h = 1e-6
        up = make_belief(x.probs + [h, -h])
        dn = make_belief(x.probs - [h, -h])
        fd = (net_utility(contract, up, j, cost) - net_utility(contract, dn, j, cost)) / (2 * h)
        assert plane.slopes[0] == pytest.approx(fd, abs=1e-7)


def test_hyperplane_call():
    plane = Hyperplane(np.array([2.0, -1.0]), 0.5)
    assert plane(make_belief([0.5, 0.25, 0.25])) == pytest.approx(0.5 * 2 - 0.25 + 0.5)


def test_truthful_strategy_value(setup):
    F, cost, contract = setup
    direct = sum(w * (x.probs @ contract.transfers[j] - cost.value(x))
                 for j, (w, x) in enumerate(zip(F.weights, F.support)))
    assert strategy_value(contract, F, truthful(F), cost) == pytest.approx(direct, abs=1e-15)
    # misreporting pays less here
    assert strategy_value(contract, F, [[0, 1], [1, 0]], cost) < direct
    with pytest.raises(errors.IncompleteStrategy):
        strategy_value(contract, F, [[0.5, 0.4], [0, 1]], cost)
    with pytest.raises(errors.IncompleteStrategy):
        strategy_value(contract, F, [[1, 0]], cost)


def test_principal_cost_risk_neutral(setup):
    F, cost, contract = setup
    assert principal_cost(contract, F, risk_neutral()) == pytest.approx(0.75 * math.log(3), abs=1e-15)


def test_principal_cost_log_utility(setup):
    F, cost, contract = setup
    # money = e^t - 1, so expected money = 0.75 * 2 + 0.25 * 0
    assert principal_cost(contract, F, log_utility()) == pytest.approx(1.5, abs=1e-14)


def test_first_best(setup):
    F, cost, _ = setup
    C = expected_cost(cost, F)
    assert first_best_cost(F, cost, risk_neutral(), 0.3) == pytest.approx(C + 0.3)
    assert first_best_cost(F, cost, log_utility(), 0.3) == pytest.approx(math.exp(C + 0.3) - 1)
    with pytest.raises(errors.InvalidInput):
        first_best_cost(F, cost, risk_neutral(), -0.1)


def test_utility_models():
    u = log_utility()
    assert u.v(math.e - 1) == pytest.approx(1.0)
    assert np.allclose(u.money([[0.0, 1.0]]), [[0.0, math.e - 1]])
    assert make_utility("risk_neutral").money(2.5) == 2.5
    with pytest.raises(errors.InvalidInput):
        make_utility("cara")
    with pytest.raises(errors.InvalidInput):
        custom_utility(lambda t: t + 1, lambda u: u - 1)


def test_custom_utility_domain_error(setup):
    F, _, contract = setup
    sqrt_u = custom_utility(lambda t: math.sqrt(t), lambda u: u * u if u >= 0 else math.nan)
    bad = contract.with_transfers([[-1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(errors.TransferOutsideUtilityDomain):
        principal_cost(bad, F, sqrt_u)


def test_messages_match_scalar_orientation():
    m = two_state_belief(0.25)
    assert m.probs[1] == 0.25
