class BudgetExceededError(RuntimeError):
    """A measurement would exceed the pilot budget. May carry the partial
    result computed before running out (`partial` attribute)."""

    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


class ConfigError(ValueError):
    """An experiment configuration is malformed; raised before any trial runs."""


class RankDeficientWarning(UserWarning):
    """A probe matrix with enough rows to determine the channel turned out
    rank-deficient; the minimum-norm solution is returned instead."""
