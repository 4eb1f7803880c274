"""Exception hierarchy.

Every error raised by the package derives from :class:`ContractError` so
callers (and the CLI) can map failures onto exit codes with one ``except``.
"""

from __future__ import annotations


class ContractError(Exception):
    """Base class for all package errors."""


class InvalidInput(ContractError, ValueError):
    """Malformed or inconsistent input (CLI exit code 2)."""


class NegativeEntry(InvalidInput):
    pass


class SumNotOne(InvalidInput):
    pass


class TooFewStates(InvalidInput):
    pass


class NotBayesPlausible(InvalidInput):
    pass


class SupportTooLarge(InvalidInput):
    pass


class WeightSolveSingular(InvalidInput):
    pass


class BoundaryPoint(InvalidInput):
    """A cost value or gradient was requested where it is not finite."""


class BoundarySupport(BoundaryPoint):
    """A support posterior lies outside the interior band."""


class BadMessageIndex(InvalidInput, IndexError):
    pass


class IncompleteStrategy(InvalidInput):
    pass


class TransferOutsideUtilityDomain(InvalidInput):
    pass


class UnsupportedShape(InvalidInput):
    pass


class DomainViolation(InvalidInput):
    pass


class ResolutionTooCoarse(InvalidInput):
    pass


class SolverFailure(ContractError):
    """Numerical procedure did not converge (CLI exit code 4)."""


class MinimizationFailure(SolverFailure):
    pass


class NonConvergence(SolverFailure):
    def __init__(self, message: str, best=None, grad_norm: float | None = None):
        super().__init__(message)
        self.best = best
        self.grad_norm = grad_norm


class BoundaryDrift(SolverFailure):
    pass


class RootFindFailure(SolverFailure):
    pass


class LimitedLiabilityInfeasible(ContractError):
    """Efficient implementation would need a negative transfer (CLI exit code 3).

    ``state`` and ``message`` locate the most negative transfer; ``margin``
    is ``v0/kappa - eta`` for two states and the minimum transfer otherwise.
    """

    def __init__(self, message: str, *, state: int, message_index: int,
                 min_transfer: float, margin: float, eta: float | None = None):
        super().__init__(message)
        self.state = state
        self.message_index = message_index
        self.min_transfer = min_transfer
        self.margin = margin
        self.eta = eta
