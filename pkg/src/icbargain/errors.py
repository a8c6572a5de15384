"""Exception types raised by the solvers."""


class InvalidGameError(ValueError):
    """A game description violates its invariants."""


class DomainError(ValueError):
    """An argument lies outside the domain of a scalar function."""


class NoRoot(DomainError):
    """The defining equation has no root in the admissible interval."""


class NonPositiveSurplus(ValueError):
    """Some player does not strictly gain over the disagreement point."""

    def __init__(self, player, surplus):
        self.player = player
        self.surplus = surplus
        super().__init__(f"player {player} has non-positive surplus {surplus!r}")


class ZeroCompetitiveRate(ValueError):
    """A competitive rate is zero, so price-of-anarchy ratios are undefined."""


class IterationLimit(RuntimeError):
    """The iterative solver ran out of iterations.

    The best iterate found so far is attached as ``outcome`` together with
    its optimality ``residual``.
    """

    def __init__(self, message, outcome=None, residual=None):
        super().__init__(message)
        self.outcome = outcome
        self.residual = residual
