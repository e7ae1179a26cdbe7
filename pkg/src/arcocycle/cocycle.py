"""Quasi-periodic SL(2,R) cocycles: iteration, Lyapunov exponents, regimes.

A cocycle ``(alpha, A)`` acts by ``(x, w) -> (x + alpha, A(x) w)``; its
iterates are ``A_n(x) = A(x + (n-1) alpha) ... A(x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .strip import MatrixFunction, StripFunction, _opnorm

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
COEFF_OVERFLOW = 1e300


def rotation(theta) -> np.ndarray:
    """Constant rotation ``R_theta`` by angle ``2 pi theta``."""
    c, s = math.cos(2 * math.pi * theta), math.sin(2 * math.pi * theta)
    return np.array([[c, -s], [s, c]])


def _normalize_frequency(alpha):
    if isinstance(alpha, Fraction):
        return alpha
    if isinstance(alpha, (int, np.integer)):
        return Fraction(int(alpha))
    if isinstance(alpha, str):
        return Fraction(alpha)
    return float(alpha)


@dataclass(frozen=True, eq=False)
class Cocycle:
    """Frequency (float or exact :class:`~fractions.Fraction`) plus the map ``A``."""

    frequency: Fraction | float
    map: MatrixFunction

    def __post_init__(self):
        object.__setattr__(self, "frequency", _normalize_frequency(self.frequency))

    @property
    def is_rational(self) -> bool:
        return isinstance(self.frequency, Fraction)

    @property
    def pq(self) -> tuple[int, int]:
        if not self.is_rational:
            raise ValueError("frequency is not an exact rational")
        return self.frequency.numerator, self.frequency.denominator

    @property
    def alpha(self) -> float:
        return float(self.frequency)

    def with_frequency(self, alpha) -> "Cocycle":
        return Cocycle(alpha, self.map)

    def astype(self, dtype) -> "Cocycle":
        return Cocycle(self.frequency, self.map.astype(dtype))

    def det_error(self, n_grid: int = 64) -> float:
        """max |det A(x) - 1| on a real grid."""
        x = np.arange(n_grid) / n_grid
        m = np.asarray(self.map(x), dtype=complex)
        det = m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]
        return float(np.max(np.abs(det - 1)))


# ----------------------------------------------------------------------
# constructors

def constant_cocycle(mat, frequency, half_width: float = 0.25) -> Cocycle:
    return Cocycle(frequency, MatrixFunction.constant(np.asarray(mat, dtype=float), half_width))


def rotation_cocycle(omega: float, frequency, half_width: float = 0.25) -> Cocycle:
    return constant_cocycle(rotation(omega), frequency, half_width)


def schrodinger(v: StripFunction, E: float, frequency=GOLDEN) -> Cocycle:
    """Schrodinger cocycle ``[[E - v(x), -1], [1, 0]]``."""
    hw = v.half_width
    one = StripFunction.constant(1.0, hw, v.dtype)
    zero = StripFunction.constant(0.0, hw, v.dtype)
    return Cocycle(frequency, MatrixFunction(E - v, -one, one, zero))


def almost_mathieu(lam: float, E: float, frequency=GOLDEN, half_width: float = 0.25) -> Cocycle:
    """Almost Mathieu cocycle: potential ``2 lam cos(2 pi x)``."""
    v = StripFunction.from_modes({1: lam, -1: lam}, half_width)
    return schrodinger(v, E, frequency)


# ----------------------------------------------------------------------
# iteration

def iterate(c: Cocycle, k: int, keep_all: bool = False):
    """Fourier data of ``A_k`` (or the list ``[A_0, ..., A_k]``).

    Products are formed by direct convolution, so the order of ``A_k`` is at
    most ``k`` times the order of ``A``.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    A = c.map
    cur = MatrixFunction.identity(A.half_width, A.dtype)
    out = [cur] if keep_all else None
    for j in range(k):
        step = A.shift(c.frequency * j) if j else A
        cur = step @ cur
        big = max(float(np.max(np.abs(e.coeffs))) for e in cur.entries)
        if not math.isfinite(big) or big > COEFF_OVERFLOW:
            raise OverflowError(f"coefficients of A_{j + 1} exceed {COEFF_OVERFLOW:g}")
        if keep_all:
            out.append(cur)
    return out if keep_all else cur


def pointwise_product(c: Cocycle, z: np.ndarray, n: int) -> np.ndarray:
    """``A_n(z)`` evaluated pointwise by direct multiplication (no normalisation)."""
    z = np.asarray(z, dtype=complex)
    out = np.broadcast_to(np.eye(2, dtype=complex), z.shape + (2, 2)).copy()
    alpha = float(c.frequency)
    for j in range(n):
        out = np.asarray(c.map(z + j * alpha), dtype=complex) @ out
    return out


class _Evaluator:
    """Fast repeated evaluation of ``A`` on shifted grids."""

    def __init__(self, A: MatrixFunction):
        N = A.N
        ents = [e.padded(N) for e in A.entries]
        self.coeffs = np.stack([e.coeffs.astype(complex) for e in ents], axis=1)  # (2N+1, 4)
        self.freqs = ents[0].freqs.astype(float)
        self.real = A.is_real_symmetric(1e-13)

    def __call__(self, x: np.ndarray, y: float) -> np.ndarray:
        ph = np.exp(2j * np.pi * np.outer(x + 1j * y, self.freqs))
        vals = (ph @ self.coeffs).reshape(len(x), 2, 2)
        if self.real and y == 0.0:
            vals = vals.real
        return vals


def log_norms(c: Cocycle, eps: float, n: int, grid: int = 128) -> np.ndarray:
    """``ln ||A_n(x + i eps)||`` on ``grid`` points by renormalised products."""
    ev = _Evaluator(c.map)
    x0 = np.arange(grid) / grid
    alpha = float(c.frequency)
    acc = np.zeros(grid)
    M = None
    for j in range(n):
        x = np.mod(x0 + j * alpha, 1.0)
        Aj = ev(x, eps)
        M = Aj if M is None else Aj @ M
        s = np.sqrt(np.sum(np.abs(M) ** 2, axis=(1, 2)))
        acc += np.log(s)
        M = M / s[:, None, None]
    return acc + np.log(_opnorm(M))


def lyapunov(c: Cocycle, eps: float, n: int, grid: int = 128) -> float:
    """Finite-n Lyapunov exponent on the line ``Im z = eps``."""
    if n < 1:
        raise ValueError("n must be positive")
    return float(np.mean(log_norms(c, eps, n, grid)) / n)


# ----------------------------------------------------------------------
# growth condition and subcritical witness

def norm_profile(As: list, eps0: float) -> list[float]:
    """``ln`` of the strip-norm upper bounds of each matrix in ``As``."""
    return [math.log(A.strip_norm(eps0)[1]) for A in As]


def cond_test(c: Cocycle, eps0: float, iterates: list | None = None) -> tuple[float, list]:
    """Growth budget ``delta1 = max_{k<=q} ln ||A_k||_{eps0} / q``.

    Returns ``(delta1, profile)`` with ``profile[k] = ln ||A_k||_{eps0}``
    (upper bound).  ``iterates`` may supply precomputed ``[A_0..A_q]``.
    """
    p, q = c.pq
    if math.gcd(p, q) != 1:
        raise ValueError("p/q must be in lowest terms")
    As = iterates if iterates is not None else iterate(c, q, keep_all=True)
    prof = norm_profile(As[: q + 1], eps0)
    return max(prof) / q, prof


def subcritical_witness(c: Cocycle, eps0: float, delta: float, n_max: int) -> int | None:
    """Smallest ``n <= n_max`` with ``max_{k<=n} ln ||A_k||_{eps0} <= delta n``."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    A = c.map
    cur = MatrixFunction.identity(A.half_width, A.dtype)
    running = 0.0
    for n in range(1, n_max + 1):
        step = A.shift(c.frequency * (n - 1)) if n > 1 else A
        cur = (step @ cur).chop()
        running = max(running, math.log(cur.strip_norm(eps0)[1]))
        if running <= delta * n:
            return n
    return None


# ----------------------------------------------------------------------
# regimes

def _angles_image(M: np.ndarray, ang: np.ndarray) -> np.ndarray:
    """Projective action of real matrices ``M`` (G,2,2) on angles (mod pi)."""
    v = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    w = np.einsum("gij,j->gi", M, v) if v.ndim == 1 else np.einsum("gij,gj->gi", M, v)
    return np.mod(np.arctan2(w[..., 1], w[..., 0]), np.pi)


def cone_certificate(c: Cocycle, depth: int, grid: int = 256,
                     n_centers: int = 32, widths=(np.pi / 8, np.pi / 4, 3 * np.pi / 8)):
    """Search for a constant cone strictly mapped into itself by ``A_m``.

    ``m`` runs through 1, 2, 4, ... up to ``depth``.  The cone is an arc of
    directions ``[center - w, center + w]``; a certificate exists when, at
    every grid point, both endpoints are mapped into the open arc and keep
    their order (which holds for orientation preserving maps).
    Returns a dict describing the cone, or ``None``.
    """
    x = np.arange(grid) / grid
    ev = _Evaluator(c.map)
    alpha = float(c.frequency)
    Ms = {}
    M = np.broadcast_to(np.eye(2), (grid, 2, 2)).copy()
    m_list = []
    m = 1
    while m <= max(depth, 1):
        m_list.append(m)
        m *= 2
    j = 0
    for m in m_list:
        while j < m:
            A = ev(np.mod(x + j * alpha, 1.0), 0.0)
            M = np.real(A) @ M
            M = M / np.sqrt(np.sum(M ** 2, axis=(1, 2)))[:, None, None]
            j += 1
        Ms[m] = M.copy()
    det_sign = np.sign(np.linalg.det(Ms[m_list[0]]))
    if not np.all(det_sign > 0):
        return None
    for m in m_list:
        Mm = Ms[m]
        for ci in range(n_centers):
            center = np.pi * ci / n_centers
            for w in widths:
                a, b = center - w, center + w
                ia = _angles_image(Mm, np.array(a))
                ib = _angles_image(Mm, np.array(b))
                da = np.mod(ia - a, np.pi)
                db = np.mod(ib - a, np.pi)
                width = 2 * w
                margin = 1e-9
                ok = (da > margin) & (da < width - margin) & (db > margin) & \
                    (db < width - margin) & (da < db)
                if np.all(ok):
                    return {"kind": "constant_cone", "iterate": m, "center": center,
                            "half_width": w,
                            "margin": float(min(da.min(), (width - db).min()))}
    return None


@dataclass
class RegimeReport:
    """Outcome of :func:`classify`."""

    L0: float
    profile: list
    uh_verdict: bool
    classification: str
    n_used: int
    certificate: dict | None = None
    thresholds: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "L0": self.L0,
            "profile": [[float(e), float(L)] for e, L in self.profile],
            "classification": self.classification,
            "uh_verdict": self.uh_verdict,
            "n_used": self.n_used,
            "certificate": self.certificate,
        }


def classify(c: Cocycle, eps_grid, n: int, *, grid: int = 128, positive_threshold: float = 1e-3,
             sub_threshold: float = 1e-3, cone_depth: int | None = None) -> RegimeReport:
    """Classify the cocycle as UH, supercritical, subcritical or critical.

    The verdict follows the evidence in this order: a cone certificate gives
    UH; otherwise ``L0 > positive_threshold`` gives supercritical; otherwise a
    profile staying below ``sub_threshold`` on every sampled height gives
    subcritical; a profile that leaves zero at the first positive height is
    reported as critical and anything else as undetermined.
    """
    eps_grid = sorted(float(e) for e in eps_grid)
    if not eps_grid or eps_grid[0] != 0.0:
        eps_grid = [0.0] + eps_grid
    profile = [(e, lyapunov(c, e, n, grid)) for e in eps_grid]
    L0 = profile[0][1]
    cert = cone_certificate(c, cone_depth if cone_depth is not None else min(n, 64))
    thr = {"positive": positive_threshold, "subcritical": sub_threshold}
    if cert is not None:
        label = "UH"
    elif L0 > positive_threshold:
        label = "supercritical"
    elif max(L for _, L in profile) < sub_threshold:
        label = "subcritical"
    elif len(profile) > 1 and profile[1][1] >= sub_threshold:
        label = "critical"
    else:
        label = "undetermined"
    return RegimeReport(L0=L0, profile=profile, uh_verdict=cert is not None,
                        classification=label, n_used=n, certificate=cert, thresholds=thr)
