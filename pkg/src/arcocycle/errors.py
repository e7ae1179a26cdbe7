"""Exception hierarchy.

Every solver failure that reflects a violated mathematical precondition is a
:class:`ReductionError`.  The CLI maps those to exit status 2; anything else is
treated as an internal error.
"""

from __future__ import annotations


class ReductionError(Exception):
    """Base class for precondition and hypothesis failures.

    Parameters
    ----------
    message:
        Human readable description.
    lemma:
        Name of the construction step that failed (e.g. ``"kernel_vector"``).
    margins:
        Machine-readable numbers explaining the failure (observed value,
        threshold, ...).
    """

    def __init__(self, message: str, lemma: str = "", margins: dict | None = None):
        super().__init__(message)
        self.lemma = lemma
        self.margins = dict(margins or {})

    def to_dict(self) -> dict:
        return {
            "error": type(self).__name__,
            "message": str(self),
            "lemma": self.lemma,
            "margins": self.margins,
        }


class DomainError(ReductionError):
    """Evaluation requested outside the declared strip."""


class ZeroOnStrip(ReductionError):
    """A function that must not vanish comes too close to zero."""


class PrecisionExhausted(ReductionError):
    """Continued fraction expansion ran out of working precision.

    The valid prefix of partial quotients is kept in :attr:`prefix`.
    """

    def __init__(self, message: str, prefix: list[int] | None = None, **kw):
        super().__init__(message, lemma="expand", **kw)
        self.prefix = list(prefix or [])


class CondFailed(ReductionError):
    """The growth condition on the first q iterates is violated."""


class TraceNotConcentrated(ReductionError):
    """The trace of A_q is not close enough to its mean."""


class PreconditionFailed(ReductionError):
    """Generic violated precondition."""


class IllConditioned(ReductionError):
    """The Bezout least-squares problem cannot reach its residual target."""


class NoConvergence(ReductionError):
    """An iteration did not reach its target in the allotted steps."""


class ZeroLocationFailure(ReductionError):
    """Zeros of the meromorphic ratio could not be isolated."""


class ResidualTooLarge(ReductionError):
    """A computed solution fails its residual contract."""


class NotRealDirection(ReductionError):
    """A vector field is not parallel to a real vector on the real line."""


class DeterminantCollapse(ReductionError):
    """The determinant of a constructed frame comes too close to zero."""


class ParityMismatch(ReductionError):
    """Two eigenvector fields have different periodicity type."""


class WindingNonzero(ReductionError):
    """A multiplier that must have zero winding number does not."""


class SmallDivisorOverflow(ReductionError):
    """A small divisor e^{2 pi i k p/q} - 1 is numerically zero."""


class HypothesisFailed(ReductionError):
    """Sampled hypotheses of the fallback construction do not hold."""


class FitError(Exception):
    """Adaptive Fourier fitting did not converge (internal numerical error)."""
