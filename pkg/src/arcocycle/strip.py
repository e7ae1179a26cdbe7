"""Analytic functions on horizontal strips as truncated Fourier series.

A :class:`StripFunction` stores coefficients ``c_k`` for ``k = -N..N`` and
represents

    f(z) = sum_k c_k exp(2 pi i (k + o) z),     o = 0 or 1/2,

on the strip ``|Im z| < half_width``.  The half-integer offset ``o = 1/2``
encodes antiperiodic functions, ``f(z + 1) = -f(z)``.

Design notes
------------
* Products use direct convolution (``np.convolve``).  Its rounding error on a
  coefficient is proportional to the coefficient magnitudes involved, so the
  exponential decay of high modes survives multiplication.  An FFT product
  would smear absolute round-off ``eps * max|c|`` over all modes, which is
  then amplified by ``exp(2 pi |k| eps)`` when norms are taken on a strip.
* Functions defined pointwise (square roots, logarithms, quotients) are
  fitted from samples on two horizontal lines ``Im z = -h`` and
  ``Im z = +h``: positive frequencies are read off the lower line and
  negative ones off the upper line, where each is largest.  This keeps the
  relative accuracy of every coefficient near machine precision.
* The coefficient dtype is either ``complex128`` or ``clongdouble``; every
  operation preserves it.  Norms are reported as Python floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, FitError, ZeroOnStrip

DEFAULT_OVERSAMPLE = 16
_PI_LD = np.longdouble("3.141592653589793238462643383279502884")
_INSET = 1e-9


def real_dtype(dtype) -> np.dtype:
    """Real dtype matching a complex (or real) dtype."""
    return np.finfo(np.dtype(dtype)).dtype


def complex_dtype(dtype) -> np.dtype:
    """Complex dtype matching a real (or complex) dtype."""
    return np.result_type(np.dtype(dtype), np.complex64)


def pi_of(dtype):
    """pi in the real dtype matching ``dtype`` (full long-double accuracy)."""
    rd = real_dtype(dtype)
    return _PI_LD if rd == np.longdouble else rd.type(np.pi)


def _as_fraction(alpha):
    if isinstance(alpha, Fraction):
        return alpha
    if isinstance(alpha, (int, np.integer)):
        return Fraction(int(alpha))
    return None


def _phases(freq2: np.ndarray, alpha, cdtype) -> np.ndarray:
    """exp(2 pi i f alpha) for frequencies ``f = freq2 / 2``.

    For rational ``alpha`` the fractional part of ``f * alpha`` is computed in
    exact integer arithmetic, so shifts by ``p/q`` are exact up to a single
    rounding of the phase.
    """
    rd = real_dtype(cdtype)
    two_pi = 2 * pi_of(cdtype)
    fr = _as_fraction(alpha)
    if fr is not None:
        den = 2 * fr.denominator
        num = (freq2.astype(object) * fr.numerator) % den
        frac = np.array([int(v) for v in num], dtype=rd) / rd.type(den)
    else:
        frac = (freq2.astype(rd) / 2) * rd.type(alpha)
        frac = frac - np.floor(frac)
    return np.exp(1j * two_pi * frac).astype(cdtype)


def _cos_factor(span: float, M: int) -> float:
    """Sampling loss factor for trigonometric polynomials.

    A real trigonometric polynomial of frequency span ``s`` whose maximum is
    ``S`` stays above ``S cos(2 pi s t)`` for ``|t| <= 1/(4 s)``.  Every point of
    the circle lies within ``1/(2M)`` of an ``M``-point grid, so the sampled
    maximum is at least ``S cos(pi s / M)``.
    """
    if span <= 0:
        return 1.0
    t = math.pi * span / M
    if t >= math.pi / 2:
        return 0.0
    return math.cos(t)


@dataclass(frozen=True, eq=False)
class StripFunction:
    """Truncated Fourier series on ``{|Im z| < half_width}``.

    Attributes
    ----------
    coeffs:
        Complex array of length ``2N + 1``; ``coeffs[N + k]`` multiplies
        ``exp(2 pi i (k + o) z)``.
    half_width:
        Declared strip radius.
    antiperiodic:
        If true the offset ``o`` is 1/2, otherwise 0.
    """

    coeffs: np.ndarray
    half_width: float
    antiperiodic: bool = False

    def __post_init__(self):
        c = np.asarray(self.coeffs)
        if not np.iscomplexobj(c):
            c = c.astype(complex_dtype(c.dtype if c.dtype.kind == "f" else np.float64))
        if c.ndim != 1 or len(c) % 2 == 0:
            raise ValueError("coefficient array must be 1-D with odd length")
        if len(c) < 3:
            c = np.concatenate([np.zeros(1, c.dtype), c, np.zeros(1, c.dtype)])
        object.__setattr__(self, "coeffs", c)
        hw = float(self.half_width)
        if not hw > 0:
            raise ValueError("half_width must be positive")
        object.__setattr__(self, "half_width", hw)
        object.__setattr__(self, "antiperiodic", bool(self.antiperiodic))

    # ------------------------------------------------------------------
    # basic attributes
    @property
    def N(self) -> int:
        return (len(self.coeffs) - 1) // 2

    @property
    def offset(self) -> float:
        return 0.5 if self.antiperiodic else 0.0

    @property
    def parity(self) -> str:
        return "antiperiodic" if self.antiperiodic else "periodic"

    @property
    def dtype(self) -> np.dtype:
        return self.coeffs.dtype

    @property
    def ks(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)

    @property
    def freq2(self) -> np.ndarray:
        """Twice the frequencies, as integers."""
        return 2 * self.ks + (1 if self.antiperiodic else 0)

    @property
    def freqs(self) -> np.ndarray:
        return self.freq2.astype(real_dtype(self.dtype)) / 2

    def coeff(self, k: int) -> complex:
        """Coefficient of index ``k`` (zero outside the stored range)."""
        if abs(k) > self.N:
            return 0j
        return complex(self.coeffs[self.N + k])

    @property
    def mean(self) -> complex:
        """Zeroth Fourier coefficient (zero for antiperiodic functions)."""
        return 0j if self.antiperiodic else complex(self.coeffs[self.N])

    # ------------------------------------------------------------------
    # constructors
    @classmethod
    def constant(cls, value, half_width: float, dtype=np.complex128) -> "StripFunction":
        c = np.zeros(3, dtype=complex_dtype(dtype))
        c[1] = value
        return cls(c, half_width)

    @classmethod
    def zeros(cls, half_width: float, antiperiodic=False, dtype=np.complex128, N=1):
        return cls(np.zeros(2 * N + 1, dtype=complex_dtype(dtype)), half_width, antiperiodic)

    @classmethod
    def from_modes(cls, modes: dict, half_width: float, antiperiodic=False,
                   dtype=np.complex128) -> "StripFunction":
        """Build from a mapping ``{k: c_k}``."""
        N = max([1] + [abs(int(k)) for k in modes])
        c = np.zeros(2 * N + 1, dtype=complex_dtype(dtype))
        for k, v in modes.items():
            c[N + int(k)] += v
        return cls(c, half_width, antiperiodic)

    @classmethod
    def from_callable(cls, func: Callable, half_width: float, antiperiodic=False, *,
                      height: float | None = None, dtype=np.complex128,
                      M0: int = 64, max_M: int = 2 ** 16) -> "StripFunction":
        """Fit a function given by a vectorised callable ``func(z)``.

        ``func`` must be analytic on a strip slightly wider than ``height``
        (default ``half_width``); its values are sampled on the lines
        ``Im z = +-height``.
        """
        cd = complex_dtype(dtype)
        rd = real_dtype(cd)

        def sampler(y, M):
            x = np.arange(M, dtype=rd) / rd.type(M)
            z = x + 1j * rd.type(y)
            return np.asarray(func(z.astype(cd)), dtype=cd)

        return fit_lines(sampler, half_width, antiperiodic=antiperiodic, height=height,
                         dtype=cd, M0=M0, max_M=max_M)

    # ------------------------------------------------------------------
    # evaluation
    def __call__(self, z):
        return self.eval(z)

    def eval(self, z):
        """Direct Fourier summation at ``z`` (scalar or array)."""
        z = np.asarray(z)
        if np.any(np.abs(z.imag) >= self.half_width):
            raise DomainError(
                f"|Im z| must be < {self.half_width}", lemma="eval",
                margins={"max_abs_imag": float(np.max(np.abs(z.imag)))})
        cd = self.dtype
        zz = z.astype(cd)[..., None]
        two_pi_i = 2j * pi_of(cd)
        vals = np.sum(self.coeffs * np.exp(two_pi_i * self.freqs * zz), axis=-1)
        return vals if vals.ndim else vals[()]

    def line_values(self, y: float, M: int) -> np.ndarray:
        """Values at ``x_j + i y`` for ``x_j = j/M``, ``j = 0..M-1``.

        Exact for any ``M`` (coefficients are folded modulo ``M``).
        """
        cd = self.dtype
        rd = real_dtype(cd)
        two_pi = 2 * pi_of(cd)
        g = self.coeffs * np.exp(-two_pi * self.freqs * rd.type(y))
        arr = np.zeros(M, dtype=cd)
        np.add.at(arr, self.ks % M, g)
        vals = np.fft.ifft(arr) * M
        if self.antiperiodic:
            x = np.arange(M, dtype=rd) / rd.type(M)
            vals = vals * np.exp(1j * pi_of(cd) * x)
        return vals.astype(cd)

    def default_grid(self, oversample: int = DEFAULT_OVERSAMPLE) -> int:
        return oversample * (self.N + 1)

    # ------------------------------------------------------------------
    # norms
    def support_span(self) -> tuple[float, float]:
        """(half span, max |frequency|) of the nonzero coefficients."""
        nz = np.nonzero(self.coeffs)[0]
        if len(nz) == 0:
            return 0.0, 0.0
        f = self.freq2[nz] / 2
        return float(f.max() - f.min()) / 2, float(np.abs(f).max())

    def coef_norm(self, eps: float) -> float:
        """sum_k |c_k| exp(2 pi eps |k + o|): an upper bound of the strip norm."""
        w = np.exp(2 * np.pi * eps * np.abs(self.freq2.astype(np.float64)) / 2)
        return float(np.sum(np.abs(self.coeffs).astype(np.float64) * w))

    def strip_norm(self, eps: float, M: int | None = None) -> tuple[float, float]:
        """Bracket ``(lower, upper)`` of ``sup_{|Im z| < eps} |f|``.

        ``lower`` is the maximum of sampled values on the lines
        ``Im z = +-eps (1 - 1e-9)``.  ``upper`` is the smaller of the
        coefficient sum and the sampled maximum divided by the grid loss
        factor of :func:`_cos_factor`, both valid for trigonometric
        polynomials.
        """
        check_strip(eps, self.half_width)
        M = M or self.default_grid()
        yp = eps * (1 - _INSET)
        vals = np.concatenate([self.line_values(yp, M), self.line_values(-yp, M)])
        lower = float(np.max(np.abs(vals.astype(np.complex128))))
        upper = self.coef_norm(eps)
        span, kmax = self.support_span()
        fac = _cos_factor(span, M)
        if fac > 0:
            grid_bound = lower / fac * math.exp(2 * math.pi * kmax * (eps - yp))
            upper = min(upper, grid_bound)
        return lower, max(upper, lower)

    def sampled_min(self, eps: float, M: int | None = None, n_lines: int = 5) -> float:
        """Minimum of |f| sampled on ``n_lines`` horizontal lines in the strip."""
        check_strip(eps, self.half_width)
        M = M or self.default_grid()
        ys = np.linspace(-eps, eps, n_lines) * (1 - _INSET)
        return float(min(np.min(np.abs(self.line_values(y, M).astype(np.complex128)))
                         for y in ys))

    # ------------------------------------------------------------------
    # algebra
    def _pad(self, N: int) -> np.ndarray:
        if N == self.N:
            return self.coeffs
        c = np.zeros(2 * N + 1, dtype=self.dtype)
        c[N - self.N:N + self.N + 1] = self.coeffs
        return c

    def padded(self, N: int) -> "StripFunction":
        return StripFunction(self._pad(max(N, self.N)), self.half_width, self.antiperiodic)

    def _binary_setup(self, other: "StripFunction"):
        if self.antiperiodic != other.antiperiodic:
            raise ValueError("cannot add functions of different parity")
        N = max(self.N, other.N)
        cd = np.result_type(self.dtype, other.dtype)
        return N, cd, min(self.half_width, other.half_width)

    def __add__(self, other):
        if isinstance(other, StripFunction):
            N, cd, hw = self._binary_setup(other)
            return StripFunction(self._pad(N).astype(cd) + other._pad(N).astype(cd), hw,
                                 self.antiperiodic)
        if other == 0:
            return self
        if self.antiperiodic:
            raise ValueError("cannot add a constant to an antiperiodic function")
        c = self.coeffs.copy()
        c[self.N] += other
        return StripFunction(c, self.half_width)

    __radd__ = __add__

    def __neg__(self):
        return StripFunction(-self.coeffs, self.half_width, self.antiperiodic)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, StripFunction):
            return multiply(self, other)
        return StripFunction(self.coeffs * other, self.half_width, self.antiperiodic)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, StripFunction):
            raise TypeError("use reciprocal() for pointwise division")
        return StripFunction(self.coeffs / other, self.half_width, self.antiperiodic)

    # ------------------------------------------------------------------
    # transforms
    def shift(self, alpha) -> "StripFunction":
        """``z -> f(z + alpha)``; exact phases for rational ``alpha``."""
        ph = _phases(self.freq2, alpha, self.dtype)
        return StripFunction(self.coeffs * ph, self.half_width, self.antiperiodic)

    def conj_reflect(self) -> "StripFunction":
        """``z -> conj(f(conj z))``."""
        rc = np.conj(self.coeffs[::-1])
        if self.antiperiodic:
            rc = np.concatenate([rc, np.zeros(2, dtype=self.dtype)])
        return StripFunction(rc, self.half_width, self.antiperiodic).trim_zeros()

    def real_part_on_real(self) -> "StripFunction":
        """The real-symmetric average ``(f + f*)/2``."""
        return (self + self.conj_reflect()) * 0.5

    def derivative(self) -> "StripFunction":
        cd = self.dtype
        return StripFunction(self.coeffs * (2j * pi_of(cd) * self.freqs), self.half_width,
                             self.antiperiodic)

    def with_half_width(self, h: float) -> "StripFunction":
        return StripFunction(self.coeffs, h, self.antiperiodic)

    def astype(self, dtype) -> "StripFunction":
        return StripFunction(self.coeffs.astype(complex_dtype(dtype)), self.half_width,
                             self.antiperiodic)

    def trim_zeros(self) -> "StripFunction":
        """Drop symmetric pairs of exactly-zero outer coefficients."""
        c = self.coeffs
        nz = np.nonzero(c)[0]
        if len(nz) == 0:
            return StripFunction(c[self.N - 1:self.N + 2], self.half_width, self.antiperiodic)
        K = max(1, int(max(abs(nz[0] - self.N), abs(nz[-1] - self.N))))
        if K >= self.N:
            return self
        return StripFunction(c[self.N - K:self.N + K + 1], self.half_width, self.antiperiodic)

    def chop(self, rtol: float | None = None, eps: float | None = None) -> "StripFunction":
        """Truncate modes whose weighted size is below ``rtol`` times the total.

        Weights are ``exp(2 pi eps |k + o|)`` with ``eps`` defaulting to the
        half width, so the sup-norm error on the strip is at most ``rtol``
        times the coefficient norm.
        """
        eps = self.half_width if eps is None else eps
        rtol = float(np.finfo(real_dtype(self.dtype)).eps) if rtol is None else rtol
        w = np.abs(self.coeffs).astype(np.float64) * np.exp(
            np.pi * eps * np.abs(self.freq2.astype(np.float64)))
        total = w.sum()
        if total == 0:
            return StripFunction(self.coeffs[self.N - 1:self.N + 2], self.half_width,
                                 self.antiperiodic)
        # remove outer modes while the removed mass stays below rtol * total
        K = self.N
        removed = 0.0
        while K > 1:
            idx = [self.N - K, self.N + K]
            m = w[idx].sum()
            if removed + m > rtol * total:
                break
            removed += m
            K -= 1
        c = self.coeffs[self.N - K:self.N + K + 1].copy()
        return StripFunction(c, self.half_width, self.antiperiodic)

    def truncate(self, K: int) -> "StripFunction":
        K = max(1, K)
        if K >= self.N:
            return self
        return StripFunction(self.coeffs[self.N - K:self.N + K + 1].copy(), self.half_width,
                             self.antiperiodic)

    def project_q_periodic(self, q: int) -> "StripFunction":
        """Keep exactly the frequencies in ``q Z``."""
        if self.antiperiodic:
            raise ValueError("projection is defined for periodic functions")
        c = np.where(self.ks % q == 0, self.coeffs, 0)
        return StripFunction(c.astype(self.dtype), self.half_width)

    def project_q_complement(self, q: int) -> "StripFunction":
        """Keep exactly the frequencies outside ``q Z``."""
        if self.antiperiodic:
            raise ValueError("projection is defined for periodic functions")
        c = np.where(self.ks % q == 0, 0, self.coeffs)
        return StripFunction(c.astype(self.dtype), self.half_width)

    def is_real_on_real(self, tol: float = 1e-10) -> bool:
        d = self - self.conj_reflect()
        return d.coef_norm(0.0) <= tol * max(self.coef_norm(0.0), 1e-300)

    # ------------------------------------------------------------------
    # pointwise maps
    def apply(self, fn: Callable[[np.ndarray], np.ndarray], *, height: float | None = None,
              antiperiodic: bool | None = None, half_width: float | None = None,
              M0: int | None = None, scale: float = 0.0) -> "StripFunction":
        """Fit ``fn(f(z))`` from samples of ``f`` (``scale`` as in :func:`fit_lines`)."""
        hw = self.half_width if half_width is None else half_width
        h = hw if height is None else height
        ap = self.antiperiodic if antiperiodic is None else antiperiodic

        def sampler(y, M):
            return fn(self.line_values(y, M))

        return fit_lines(sampler, hw, antiperiodic=ap, height=h, dtype=self.dtype,
                         M0=M0 or max(64, 4 * (self.N + 1)), scale=scale)

    def reciprocal(self, height: float | None = None) -> "StripFunction":
        """1/f fitted from samples; raises ZeroOnStrip near zeros."""
        h = self.half_width if height is None else height
        if self.sampled_min(h) < 1e-12 * max(self.strip_norm(h)[0], 1e-300):
            raise ZeroOnStrip("reciprocal of a function vanishing on the strip",
                              lemma="reciprocal")
        return self.apply(lambda v: 1 / v, height=h)

    # ------------------------------------------------------------------
    # serialization
    def to_dict(self) -> dict:
        c = self.coeffs.astype(np.complex128)
        return {
            "parity": self.parity,
            "half_width": self.half_width,
            "N": self.N,
            "coeffs": [[float(v.real), float(v.imag)] for v in c],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StripFunction":
        c = np.array([complex(re, im) for re, im in d["coeffs"]], dtype=np.complex128)
        if len(c) != 2 * int(d["N"]) + 1:
            raise ValueError("coefficient count does not match N")
        return cls(c, float(d["half_width"]), d.get("parity", "periodic") == "antiperiodic")


# ----------------------------------------------------------------------
# module level operations

def check_strip(eps: float, half_width: float) -> None:
    if not eps > 0 or eps > half_width * (1 + 1e-12):
        raise DomainError(f"strip {eps} outside (0, {half_width}]", lemma="strip_norm",
                          margins={"eps": eps, "half_width": half_width})


def multiply(f: StripFunction, g: StripFunction) -> StripFunction:
    """Product by direct convolution of coefficient arrays."""
    c = np.convolve(f.coeffs, g.coeffs)
    hw = min(f.half_width, g.half_width)
    if f.antiperiodic and g.antiperiodic:
        c = np.concatenate([np.zeros(2, dtype=c.dtype), c])
        return StripFunction(c, hw, False)
    return StripFunction(c, hw, f.antiperiodic or g.antiperiodic)


def _two_line_coeffs(sampler, h: float, M: int, antiperiodic: bool, cd):
    rd = real_dtype(cd)
    two_pi = 2 * pi_of(cd)
    k = np.fft.fftfreq(M, 1.0 / M).astype(np.int64)
    o = rd.type(0.5) if antiperiodic else rd.type(0)
    x = np.arange(M, dtype=rd) / rd.type(M)
    demod = np.exp(-1j * pi_of(cd) * x).astype(cd) if antiperiodic else None

    def dft(y):
        v = np.asarray(sampler(y, M), dtype=cd)
        if demod is not None:
            v = v * demod
        return np.fft.fft(v) / M

    freq = k.astype(rd) + o
    if h > 0:
        # non-negative frequencies from the lower line, negative from the upper
        dm, dp = dft(-h), dft(h)
        pos = freq >= 0
        neg = ~pos
        c = np.zeros(M, dtype=cd)
        c[pos] = dm[pos] * np.exp(-two_pi * freq[pos] * rd.type(h))
        c[neg] = dp[neg] * np.exp(two_pi * freq[neg] * rd.type(h))
        weights = np.where(pos, np.abs(dm), np.abs(dp)).astype(np.float64)
    else:
        c = dft(0.0)
        weights = np.abs(c).astype(np.float64)
    # reorder to k = -(M/2 - 1) .. M/2 - 1
    half = M // 2
    order = np.concatenate([np.arange(half + 1, M), np.arange(0, half)])
    return c[order].astype(cd), weights[order]


def fit_lines(sampler, half_width: float, *, antiperiodic=False, height=None,
              dtype=np.complex128, M0=64, max_M=2 ** 16, rtol=None,
              scale: float = 0.0) -> StripFunction:
    """Adaptive two-line Fourier fit.

    ``sampler(y, M)`` returns the function on the grid ``j/M + i y``.  The
    grid is doubled until the weighted tail of the spectrum is at round-off
    level relative to ``max(spectrum, scale)``, then negligible outer modes
    are trimmed.  ``scale`` lets callers declare the magnitude of quantities
    that cancelled inside the sampler.
    """
    cd = complex_dtype(dtype)
    h = half_width if height is None else height
    eps_m = float(np.finfo(real_dtype(cd)).eps)
    tail_tol = 64 * eps_m if rtol is None else rtol
    M = 1 << max(4, int(math.ceil(math.log2(max(M0, 16)))))
    while True:
        c, w = _two_line_coeffs(sampler, h, M, antiperiodic, cd)
        if not np.all(np.isfinite(w)):
            raise FitError("non-finite samples while fitting")
        wmax = max(float(w.max()) if len(w) else 0.0, scale)
        n = len(c)
        mid = (n - 1) // 2
        outer = np.abs(np.arange(n) - mid) > (3 * M) // 8
        tail = float(w[outer].max()) if outer.any() else 0.0
        if wmax == 0.0 or tail <= tail_tol * wmax:
            break
        if M >= max_M:
            raise FitError(f"fit did not converge at M={M} (tail ratio {tail / wmax:.3e})")
        M *= 2
    keep = np.nonzero(w > 4 * eps_m * wmax)[0] if wmax > 0 else np.array([mid])
    K = max(1, int(np.max(np.abs(keep - mid)))) if len(keep) else 1
    return StripFunction(c[mid - K:mid + K + 1].copy(), half_width, antiperiodic)


def strip_norm(f: StripFunction, eps: float, M: int | None = None) -> tuple[float, float]:
    return f.strip_norm(eps, M)


def shift(f: StripFunction, alpha) -> StripFunction:
    return f.shift(alpha)


def project_q_periodic(f: StripFunction, q: int) -> StripFunction:
    return f.project_q_periodic(q)


def project_q_complement(f: StripFunction, q: int) -> StripFunction:
    return f.project_q_complement(q)


def interpolation_window(q: int) -> tuple[int, int]:
    """Frequency window ``[-floor(q/2), q - 1 - floor(q/2)]`` of q-point interpolation."""
    return -(q // 2), q - 1 - q // 2


def interpolation_bound(phi: StripFunction, q: int, z0: complex, eps0: float,
                        eps1: float) -> tuple[float, float]:
    """Split a sup bound on the line ``Im z = Im z0`` into tail and sample parts.

    Returns ``(tail, lagrange)`` where ``tail`` is the strip-``eps1`` upper
    norm of the modes outside the interpolation window and ``lagrange`` is
    ``sum_k |phi(z0 + k/q)|``.  The sup of ``phi`` on the line is at most
    ``tail + lagrange``.
    """
    if not (abs(complex(z0).imag) < eps1 < eps0 <= phi.half_width * (1 + 1e-12)):
        raise DomainError("need |Im z0| < eps1 < eps0 <= half_width", lemma="interpolation_bound",
                          margins={"imag_z0": abs(complex(z0).imag), "eps1": eps1, "eps0": eps0,
                                   "half_width": phi.half_width})
    lo, hi = interpolation_window(q)
    inside = (phi.ks >= lo) & (phi.ks <= hi)
    outer = StripFunction(np.where(inside, 0, phi.coeffs).astype(phi.dtype), phi.half_width,
                          phi.antiperiodic)
    tail = outer.strip_norm(eps1)[1] if np.any(outer.coeffs) else 0.0
    pts = complex(z0) + np.arange(q) / q
    lagrange = float(np.sum(np.abs(np.asarray(phi.eval(pts), dtype=np.complex128))))
    return tail, lagrange


def trig_interpolate(samples: Sequence[complex], q: int, z0: complex, t) -> np.ndarray:
    """Evaluate at ``z0 + t`` the trigonometric polynomial with frequencies in
    the interpolation window that takes ``samples[k]`` at ``z0 + k/q``.

    Uses the kernel ``c_q(x) = (1/q) sum_{m<q} e^{2 pi i m x}`` after
    demodulating by ``e^{2 pi i floor(q/2) x}``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    s = np.asarray(samples, dtype=complex)
    m0 = q // 2
    nodes = np.arange(q) / q
    demod = s * np.exp(2j * np.pi * m0 * nodes)
    diff = t[:, None] - nodes[None, :]
    kern = np.exp(2j * np.pi * np.arange(q)[None, None, :] * diff[..., None]).sum(-1) / q
    return np.exp(-2j * np.pi * m0 * t) * (kern @ demod)


def _track_vertical(log_row: np.ndarray, vals: np.ndarray) -> np.ndarray:
    """Choose the branch of ``log(vals)`` closest to ``log_row``."""
    lv = np.log(vals)
    two_pi = 2 * pi_of(vals.dtype)
    n = np.round((log_row.imag - lv.imag) / two_pi)
    return lv + 1j * two_pi * n


def log_branch(mu: StripFunction, floor: float = 1e-12, steps: int = 32) -> tuple[int, StripFunction]:
    """Write ``mu = exp(2 pi i (d z + phi))`` on the strip.

    ``d`` is the winding number of ``mu`` along the real period.  The branch
    of ``log mu`` is tracked continuously along the real line starting from
    ``x = 0`` with ``arg mu(0)`` in ``[0, 2 pi)``, then vertically from the real
    line to each sampling line.
    """
    if mu.antiperiodic:
        raise ValueError("log_branch expects a periodic function")
    h = mu.half_width * (1 - _INSET)
    M = max(256, mu.default_grid())
    scale = mu.strip_norm(h, M)[0]
    if mu.sampled_min(h, M, n_lines=9) <= floor * max(scale, 1.0):
        raise ZeroOnStrip("multiplier vanishes on the strip", lemma="log_branch",
                          margins={"sampled_min": mu.sampled_min(h, M, n_lines=9),
                                   "floor": floor})
    cd = mu.dtype
    rd = real_dtype(cd)
    two_pi = 2 * pi_of(cd)

    def real_log(Mg):
        v = mu.line_values(0.0, Mg)
        ang = np.unwrap(np.angle(np.concatenate([v, v[:1]])))
        ang0 = ang[0] % (2 * pi_of(cd))
        ang = ang - ang[0] + ang0
        return np.log(np.abs(v)) + 1j * ang[:-1], ang[-1] - ang[0]

    _, total = real_log(M)
    d = int(np.round(float(total) / (2 * np.pi)))

    def sampler(y, Mg):
        lr, _ = real_log(Mg)
        cur = lr
        for j in range(1, steps + 1):
            cur = _track_vertical(cur, mu.line_values(y * j / steps, Mg))
        x = np.arange(Mg, dtype=rd) / rd.type(Mg)
        z = x + 1j * rd.type(y)
        return (cur - two_pi * 1j * d * z) / (two_pi * 1j)

    phi = fit_lines(sampler, mu.half_width, height=h, dtype=cd, M0=M, scale=1.0 + abs(d))
    return d, phi


# ----------------------------------------------------------------------
# 2x2 matrix-valued functions

def _opnorm(arr: np.ndarray) -> np.ndarray:
    """Largest singular value of a stack of 2x2 matrices."""
    # sigma_max = (sqrt(F + 2|D|) + sqrt(F - 2|D|)) / 2 with F the squared
    # Frobenius norm; F - 2|D| = |a - w conj(d)|^2 + |b + w conj(c)|^2 for
    # w = D/|D| avoids the cancellation near isometries.
    a = arr.astype(np.complex128)
    scale = np.max(np.abs(a), axis=(-2, -1))
    safe = np.where(scale > 0, scale, 1.0)
    a = a / safe[..., None, None]
    m00, m01, m10, m11 = a[..., 0, 0], a[..., 0, 1], a[..., 1, 0], a[..., 1, 1]
    fro2 = np.abs(m00) ** 2 + np.abs(m01) ** 2 + np.abs(m10) ** 2 + np.abs(m11) ** 2
    det = m00 * m11 - m01 * m10
    adet = np.abs(det)
    w = np.ones_like(det)
    np.divide(det, adet, out=w, where=adet > 1e-300)
    gap = np.abs(m00 - w * np.conj(m11)) ** 2 + np.abs(m01 + w * np.conj(m10)) ** 2
    return scale * (np.sqrt(fro2 + 2 * adet) + np.sqrt(gap)) / 2


def _opnorm_min(arr: np.ndarray) -> np.ndarray:
    """Smallest singular value of a stack of 2x2 matrices."""
    a = arr.astype(np.complex128)
    smax = _opnorm(a)
    det = np.abs(a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0])
    return np.where(smax > 0, det / np.where(smax > 0, smax, 1), 0.0)


@dataclass(frozen=True, eq=False)
class MatrixFunction:
    """2x2 matrix of :class:`StripFunction` entries ``[[a, b], [c, d]]``."""

    a: StripFunction
    b: StripFunction
    c: StripFunction
    d: StripFunction

    def __post_init__(self):
        ents = (self.a, self.b, self.c, self.d)
        if len({e.antiperiodic for e in ents}) != 1:
            raise ValueError("entries must share parity")
        hw = min(e.half_width for e in ents)
        cd = np.result_type(*[e.dtype for e in ents])
        for name, e in zip("abcd", ents):
            if e.half_width != hw or e.dtype != cd:
                object.__setattr__(self, name, StripFunction(e.coeffs.astype(cd), hw,
                                                             e.antiperiodic))

    # ------------------------------------------------------------------
    @property
    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    @property
    def half_width(self) -> float:
        return self.a.half_width

    @property
    def antiperiodic(self) -> bool:
        return self.a.antiperiodic

    @property
    def dtype(self):
        return self.a.dtype

    @property
    def N(self) -> int:
        return max(e.N for e in self.entries)

    def map(self, fn) -> "MatrixFunction":
        return MatrixFunction(*[fn(e) for e in self.entries])

    @classmethod
    def identity(cls, half_width: float, dtype=np.complex128) -> "MatrixFunction":
        return cls.constant(np.eye(2), half_width, dtype)

    @classmethod
    def constant(cls, mat, half_width: float, dtype=np.complex128) -> "MatrixFunction":
        m = np.asarray(mat)
        return cls(*[StripFunction.constant(m[i, j], half_width, dtype)
                     for i in range(2) for j in range(2)])

    @classmethod
    def from_callable(cls, func, half_width: float, antiperiodic=False, *, height=None,
                      dtype=np.complex128) -> "MatrixFunction":
        """Fit from a vectorised callable returning arrays of shape ``(..., 2, 2)``."""
        ents = [StripFunction.from_callable(
            (lambda z, i=i, j=j: np.asarray(func(z))[..., i, j]), half_width,
            antiperiodic, height=height, dtype=dtype) for i in range(2) for j in range(2)]
        return cls(*ents)

    # ------------------------------------------------------------------
    def __call__(self, z):
        vals = [np.asarray(e.eval(z)) for e in self.entries]
        out = np.stack(vals, axis=-1)
        return out.reshape(out.shape[:-1] + (2, 2))

    def line_values(self, y: float, M: int) -> np.ndarray:
        vals = [e.line_values(y, M) for e in self.entries]
        return np.stack(vals, axis=-1).reshape(M, 2, 2)

    def default_grid(self, oversample: int = DEFAULT_OVERSAMPLE) -> int:
        return oversample * (self.N + 1)

    def support_span(self) -> tuple[float, float]:
        spans = [e.support_span() for e in self.entries]
        nz = [e for e in self.entries if np.any(e.coeffs)]
        if not nz:
            return 0.0, 0.0
        f = np.concatenate([e.freq2[np.nonzero(e.coeffs)[0]] / 2 for e in nz])
        return float(f.max() - f.min()) / 2, max(s[1] for s in spans)

    def coef_norm(self, eps: float) -> float:
        """Frobenius combination of entry coefficient sums (operator-norm bound)."""
        return math.sqrt(sum(e.coef_norm(eps) ** 2 for e in self.entries))

    def strip_norm(self, eps: float, M: int | None = None) -> tuple[float, float]:
        """Bracket of ``sup ||M(z)||`` (operator norm) on ``|Im z| < eps``."""
        check_strip(eps, self.half_width)
        M = M or self.default_grid()
        yp = eps * (1 - _INSET)
        vals = np.concatenate([self.line_values(yp, M), self.line_values(-yp, M)])
        lower = float(np.max(_opnorm(vals)))
        upper = self.coef_norm(eps)
        span, kmax = self.support_span()
        fac = _cos_factor(span, M)
        if fac > 0:
            upper = min(upper, lower / fac * math.exp(2 * math.pi * kmax * (eps - yp)))
        return lower, max(upper, lower)

    def sampled_min_norm(self, eps: float, M: int | None = None, n_lines: int = 5) -> float:
        """Minimum operator norm sampled on horizontal lines of the strip."""
        M = M or self.default_grid()
        ys = np.linspace(-eps, eps, n_lines) * (1 - _INSET)
        return float(min(np.min(_opnorm(self.line_values(y, M))) for y in ys))

    # ------------------------------------------------------------------
    def __matmul__(self, other):
        if isinstance(other, MatrixFunction):
            a1, b1, c1, d1 = self.entries
            a2, b2, c2, d2 = other.entries
            return MatrixFunction(a1 * a2 + b1 * c2, a1 * b2 + b1 * d2,
                                  c1 * a2 + d1 * c2, c1 * b2 + d1 * d2)
        if isinstance(other, tuple):
            return self.matvec(other)
        return self.rmul_const(other)

    def __rmatmul__(self, other):
        return self.lmul_const(other)

    def matvec(self, u: tuple) -> tuple:
        return (self.a * u[0] + self.b * u[1], self.c * u[0] + self.d * u[1])

    def lmul_const(self, C) -> "MatrixFunction":
        C = np.asarray(C)
        a, b, c, d = self.entries
        return MatrixFunction(C[0, 0] * a + C[0, 1] * c, C[0, 0] * b + C[0, 1] * d,
                              C[1, 0] * a + C[1, 1] * c, C[1, 0] * b + C[1, 1] * d)

    def rmul_const(self, C) -> "MatrixFunction":
        C = np.asarray(C)
        a, b, c, d = self.entries
        return MatrixFunction(a * C[0, 0] + b * C[1, 0], a * C[0, 1] + b * C[1, 1],
                              c * C[0, 0] + d * C[1, 0], c * C[0, 1] + d * C[1, 1])

    def __add__(self, other):
        if isinstance(other, MatrixFunction):
            return MatrixFunction(*[x + y for x, y in zip(self.entries, other.entries)])
        C = np.asarray(other)
        return MatrixFunction(self.a + C[0, 0], self.b + C[0, 1], self.c + C[1, 0],
                              self.d + C[1, 1])

    __radd__ = __add__

    def __neg__(self):
        return self.map(lambda e: -e)

    def __sub__(self, other):
        if isinstance(other, MatrixFunction):
            return self + (-other)
        return self + (-np.asarray(other))

    def __mul__(self, s):
        if isinstance(s, StripFunction):
            return self.map(lambda e: e * s)
        return self.map(lambda e: e * s)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self.map(lambda e: e / s)

    def shift(self, alpha) -> "MatrixFunction":
        return self.map(lambda e: e.shift(alpha))

    def conj_reflect(self) -> "MatrixFunction":
        return self.map(lambda e: e.conj_reflect())

    def chop(self, rtol=None, eps=None) -> "MatrixFunction":
        return self.map(lambda e: e.chop(rtol, eps))

    def astype(self, dtype) -> "MatrixFunction":
        return self.map(lambda e: e.astype(dtype))

    def with_half_width(self, h: float) -> "MatrixFunction":
        return self.map(lambda e: e.with_half_width(h))

    def det(self) -> StripFunction:
        return self.a * self.d - self.b * self.c

    def trace(self) -> StripFunction:
        return self.a + self.d

    def adj(self) -> "MatrixFunction":
        """Adjugate ``[[d, -b], [-c, a]]`` (the inverse when det = 1)."""
        return MatrixFunction(self.d, -self.b, -self.c, self.a)

    def transpose(self) -> "MatrixFunction":
        return MatrixFunction(self.a, self.c, self.b, self.d)

    def is_real_symmetric(self, tol: float = 1e-10) -> bool:
        return all(e.is_real_on_real(tol) for e in self.entries)

    def to_dict(self) -> dict:
        return {k: e.to_dict() for k, e in zip("abcd", self.entries)}

    @classmethod
    def from_dict(cls, d: dict) -> "MatrixFunction":
        return cls(*[StripFunction.from_dict(d[k]) for k in "abcd"])


# ----------------------------------------------------------------------
# vector helpers (pairs of StripFunction)

def vec_line_values(u: tuple, y: float, M: int) -> np.ndarray:
    return np.stack([u[0].line_values(y, M), u[1].line_values(y, M)], axis=-1)


def vec_strip_norm(u: tuple, eps: float, M: int | None = None) -> tuple[float, float]:
    """Bracket of ``sup ||u(z)||`` (Euclidean) on the strip."""
    check_strip(eps, min(u[0].half_width, u[1].half_width))
    M = M or DEFAULT_OVERSAMPLE * (max(u[0].N, u[1].N) + 1)
    yp = eps * (1 - _INSET)
    vals = np.concatenate([vec_line_values(u, yp, M), vec_line_values(u, -yp, M)])
    lower = float(np.max(np.linalg.norm(vals.astype(np.complex128), axis=-1)))
    upper = math.hypot(u[0].coef_norm(eps), u[1].coef_norm(eps))
    sp = [e.support_span() for e in u]
    nz = [e for e in u if np.any(e.coeffs)]
    if nz:
        f = np.concatenate([e.freq2[np.nonzero(e.coeffs)[0]] / 2 for e in nz])
        span = float(f.max() - f.min()) / 2
        fac = _cos_factor(span, M)
        if fac > 0:
            kmax = max(s[1] for s in sp)
            upper = min(upper, lower / fac * math.exp(2 * math.pi * kmax * (eps - yp)))
    return lower, max(upper, lower)


def vec_sampled_min(u: tuple, eps: float, M: int | None = None, n_lines: int = 5) -> float:
    M = M or DEFAULT_OVERSAMPLE * (max(u[0].N, u[1].N) + 1)
    ys = np.linspace(-eps, eps, n_lines) * (1 - _INSET)
    return float(min(np.min(np.linalg.norm(vec_line_values(u, y, M).astype(np.complex128),
                                           axis=-1)) for y in ys))


def vec_conj_reflect(u: tuple) -> tuple:
    return (u[0].conj_reflect(), u[1].conj_reflect())


def vec_scale(u: tuple, s) -> tuple:
    return (u[0] * s, u[1] * s)
