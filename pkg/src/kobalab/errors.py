"""Exception taxonomy shared by all kobalab modules.

The CLI maps these onto exit codes: rejected input / precondition -> 2,
verification failure -> 1, solver trouble or undecided diagnostics -> 3.
"""


class KobalabError(Exception):
    """Base class for all kobalab errors."""


class RejectedInputError(KobalabError):
    """Malformed or dimensionally inconsistent input."""


class PreconditionError(KobalabError):
    """A documented operation precondition was violated (e.g. point outside)."""


class MetricDegenerateError(KobalabError):
    """The metric degenerates along a complex line (boundary gap is infinite)."""


class SolverError(KobalabError):
    """A numerical solver failed to converge."""


class UndecidedError(KobalabError):
    """Finite data did not settle a verdict; carries a hint how to extend it."""


class VerificationError(KobalabError):
    """A scientific assertion checked by a report failed."""
