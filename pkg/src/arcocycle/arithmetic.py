"""Continued fractions, convergents and Liouville diagnostics of the frequency.

Irrational inputs are handled in ``mpmath`` at a configurable binary
precision (default 256 bits); partial quotients and convergents are exact
Python integers.  Rational inputs (``Fraction`` or ``"p/q"`` strings, and
finite decimal strings) are expanded by the exact Euclidean algorithm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .errors import PrecisionExhausted

DEFAULT_PREC = 256
QUOTIENT_LIMIT = 10 ** 15

_NAMED = {
    "golden": lambda: (mpmath.sqrt(5) - 1) / 2,
    "silver": lambda: mpmath.sqrt(2) - 1,
    "sqrt2": lambda: mpmath.sqrt(2),
    "e": lambda: mpmath.e,
    "pi": lambda: mpmath.pi,
}


def parse_frequency(spec, prec: int = DEFAULT_PREC):
    """Turn a user frequency into an exact ``Fraction`` or an ``mpf``.

    Accepted forms: ``Fraction``/``int``; strings ``"p/q"``; finite decimal
    strings (read exactly, hence rational); named constants ``golden``,
    ``silver``, ``sqrt2``, ``e``, ``pi``; ``mpf`` values.  Floats are
    rejected because their binary expansion silently changes the continued
    fraction.
    """
    if isinstance(spec, Fraction):
        return spec
    if isinstance(spec, int):
        return Fraction(spec)
    if isinstance(spec, mpmath.mpf):
        return spec
    if isinstance(spec, float):
        raise TypeError("pass frequencies as strings, Fractions or mpf, not floats")
    s = str(spec).strip()
    if s.lower() in _NAMED:
        with mpmath.workprec(prec):
            return +_NAMED[s.lower()]()
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse frequency {spec!r}") from exc


@dataclass
class CFExpansion:
    """Partial quotients ``a`` and convergents ``(p_n, q_n)``.

    ``alpha`` keeps the expanded number (exact ``Fraction`` or ``mpf``) so
    later diagnostics can compare convergents against it.
    """

    a: list[int]
    convergents: list[tuple[int, int]]
    alpha: object = None
    prec: int = DEFAULT_PREC
    terminated: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def denominators(self) -> list[int]:
        return [q for _, q in self.convergents]

    def to_dict(self) -> dict:
        return {
            "a": list(self.a),
            "convergents": [[p, q] for p, q in self.convergents],
            "beta_estimate": beta_estimate(self) if len(self.convergents) >= 2 else None,
            "terminated": self.terminated,
        }


def convergents_from_quotients(a: list[int]) -> list[tuple[int, int]]:
    """Standard recurrences ``p_n = a_n p_{n-1} + p_{n-2}`` (same for q)."""
    out = []
    p2, p1 = 0, 1
    q2, q1 = 1, 0
    for ai in a:
        p2, p1 = p1, ai * p1 + p2
        q2, q1 = q1, ai * q1 + q2
        out.append((p1, q1))
    return out


def _expand_rational(x: Fraction, n_terms: int) -> tuple[list[int], bool]:
    a = []
    num, den = x.numerator, x.denominator
    while len(a) < n_terms:
        ai, r = divmod(num, den)
        a.append(ai)
        if r == 0:
            return a, True
        num, den = den, r
    return a, False


def expand(alpha, n_terms: int, prec: int = DEFAULT_PREC) -> CFExpansion:
    """Continued fraction expansion with at most ``n_terms`` partial quotients.

    For irrational input the expansion stops early with
    :class:`PrecisionExhausted` when a partial quotient exceeds ``1e15`` or
    when the accumulated error bound ``q_n^2 2^{-prec}`` approaches one;
    the exception carries the valid prefix.
    """
    x = parse_frequency(alpha, prec)
    if isinstance(x, Fraction):
        a, done = _expand_rational(x, n_terms)
        return CFExpansion(a, convergents_from_quotients(a), x, prec, terminated=done)
    a: list[int] = []
    with mpmath.workprec(prec):
        r = mpmath.mpf(x)
        qprev, qcur = 1, 0
        for _ in range(n_terms):
            ai = int(mpmath.floor(r))
            if a and ai > QUOTIENT_LIMIT:
                raise PrecisionExhausted(
                    f"partial quotient {ai} exceeds {QUOTIENT_LIMIT}", prefix=a,
                    margins={"terms": len(a)})
            a.append(ai)
            qprev, qcur = qcur, ai * qcur + qprev
            if 2 * math.log2(max(qcur, 1)) > prec - 32:
                raise PrecisionExhausted("working precision exhausted", prefix=a,
                                         margins={"terms": len(a), "q": float(qcur)})
            frac = r - ai
            if frac == 0:
                return CFExpansion(a, convergents_from_quotients(a), x, prec, terminated=True)
            r = 1 / frac
    return CFExpansion(a, convergents_from_quotients(a), x, prec)


def beta_estimate(cf: CFExpansion) -> float:
    """``max_n ln(q_{n+1}) / q_n`` over the available prefix.

    This is a finite-sample proxy for ``limsup ln(q_{n+1}) / q_n``; no finite
    prefix can decide the limit.
    """
    qs = cf.denominators
    if len(qs) < 2:
        raise ValueError("need at least two convergents")
    return max(math.log(qs[i + 1]) / qs[i] for i in range(len(qs) - 1))


def approximation_error(cf: CFExpansion, p: int, q: int, prec: int | None = None):
    """``|alpha - p/q|`` as an ``mpf`` (exact zero when it vanishes)."""
    prec = prec or cf.prec
    if isinstance(cf.alpha, Fraction):
        err = abs(cf.alpha - Fraction(p, q))
        with mpmath.workprec(prec):
            return mpmath.mpf(err.numerator) / err.denominator
    with mpmath.workprec(prec):
        return abs(mpmath.mpf(cf.alpha) - mpmath.mpf(p) / q)


def liouville_approximant(cf: CFExpansion, delta_prime: float) -> list[tuple[int, int]]:
    """Convergents with ``|alpha - p/q| < exp(-delta' q)``.

    Rational inputs are compared exactly.  For irrational inputs the error is
    computed in high precision; convergents whose error is below the working
    precision cannot be decided and are skipped.
    """
    if delta_prime <= 0:
        raise ValueError("delta' must be positive")
    out = []
    for p, q in cf.convergents:
        with mpmath.workprec(cf.prec):
            err = approximation_error(cf, p, q)
            if err == 0:
                out.append((p, q))
                continue
            if not isinstance(cf.alpha, Fraction) and err < mpmath.mpf(2) ** (-cf.prec + 8):
                continue
            if err < mpmath.exp(-mpmath.mpf(delta_prime) * q):
                out.append((p, q))
    return out
