"""Exception hierarchy shared by every khinlab module."""


class KhinlabError(Exception):
    """Base class for all library errors."""


class DomainError(KhinlabError, ValueError):
    """An argument lies outside the domain of the operation."""


class DimensionTooLarge(KhinlabError):
    """Exact enumeration was requested beyond the configured pattern cap."""

    def __init__(self, n, n_max):
        super().__init__(f"exact enumeration needs 2^{n} patterns; n_max is {n_max}")
        self.n = n
        self.n_max = n_max


class MalformedWeight(KhinlabError, ValueError):
    """A weight specification violates its schema or invariants."""


class ParseError(KhinlabError, ValueError):
    """An input file or numeric literal could not be parsed."""


class BelowThreshold(KhinlabError):
    """P(w != 0) does not exceed the minimum required by the threshold mode."""

    def __init__(self, s, threshold, mode):
        super().__init__(
            f"P(w != 0) = {float(s):.12g} does not exceed the {mode} threshold "
            f"{float(threshold):.12g}"
        )
        self.s = s
        self.threshold = threshold
        self.mode = mode


class NoValidDelta(KhinlabError):
    """No positive weight level carries the requested survival mass."""
