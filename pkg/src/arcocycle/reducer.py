"""Reduction of cocycles with rational frequency to (near) constant normal form.

Given ``(p/q, A)`` satisfying the growth budget ``ln ||A_k||_{eps0} <= delta1 q``
for ``k <= q``, :func:`reduce` builds an analytic ``B`` (real on the real
line, ``det B = 1``, possibly antiperiodic) such that
``B(z + p/q) A(z) B(z)^{-1}`` is close to a constant.  The route depends on
the mean ``t0`` of the trace ``t = tr A_q``:

* ``|t0| < 2`` with margin: elliptic path (eigenvector of ``A_q``, rotation
  normal form ``R_theta`` with ``theta`` 1/q-periodic);
* ``|t0| > 2`` with margin: hyperbolic path (two real eigenvectors, diagonal
  normal form);
* otherwise: parabolic path, through the finite Fourier family
  ``W_k = sum_s R_{(2k+l)s/2q} A_s`` or, when ``A_q`` is not close to
  ``+-id``, through :func:`wr_fallback`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from . import corona
from .cocycle import Cocycle, cond_test, iterate
from .errors import (CondFailed, DeterminantCollapse, HypothesisFailed, ParityMismatch,
                     PreconditionFailed, SmallDivisorOverflow, TraceNotConcentrated,
                     WindingNonzero)
from .strip import (MatrixFunction, StripFunction, _opnorm, _phases, complex_dtype, fit_lines,
                    log_branch, pi_of, real_dtype, vec_line_values)

CASES = ("elliptic", "hyperbolic", "parabolic_dft", "wr_fallback")


@dataclass
class ReductionConfig:
    """Numerical stand-ins for the constants of the reduction.

    ``strip_ladder = (eps0, eps1, eps_prime, eps)`` is strictly decreasing:
    growth and corona problems live on ``eps0``, the near-identity test on
    ``eps1``, the trace concentration test on ``eps_prime`` and the final
    residual on ``eps``.  ``delta1_max`` is the admissible growth budget;
    ``delta1_floor`` keeps the case-split margin ``exp(-C0^2 delta q)``
    meaningful for bounded cocycles (``delta1 = 0``).
    """

    strip_ladder: tuple = (0.05, 0.045, 0.04, 0.035)
    delta1_max: float = 0.5
    delta1_floor: float = 0.05
    C0: float = 2.0
    delta3: float = 0.1
    delta5: float = 0.05
    C_b: float = 10.0
    C3: float = 1.0
    C4: float = 0.2
    q_min: int = 5
    C_bez: float = 1e3
    det_target: float = 1e-12
    rho_max: float = 0.5
    kernel_tol: float = 1e-8
    n_x0: int = 64
    check_grid: int = 512
    precision: str = "double"

    def __post_init__(self):
        lad = tuple(float(x) for x in self.strip_ladder)
        if len(lad) != 4 or not all(x > 0 for x in lad) or any(
                lad[i] <= lad[i + 1] for i in range(3)):
            raise ValueError("strip_ladder must be four strictly decreasing positive numbers")
        self.strip_ladder = lad
        if self.delta1_max < 0 or self.delta1_floor < 0:
            raise ValueError("growth budgets must be non-negative")
        if self.precision not in ("double", "extended"):
            raise ValueError("precision must be 'double' or 'extended'")

    @classmethod
    def from_eps0(cls, eps0: float, **kw) -> "ReductionConfig":
        """Ladder ``eps0 * (1, 0.9, 0.8, 0.7)``."""
        return cls(strip_ladder=tuple(eps0 * f for f in (1.0, 0.9, 0.8, 0.7)), **kw)

    @property
    def eps0(self) -> float:
        return self.strip_ladder[0]

    @property
    def eps1(self) -> float:
        return self.strip_ladder[1]

    @property
    def eps_prime(self) -> float:
        return self.strip_ladder[2]

    @property
    def eps(self) -> float:
        return self.strip_ladder[3]

    @property
    def dtype(self):
        return np.clongdouble if self.precision == "extended" else np.complex128

    def to_dict(self) -> dict:
        d = asdict(self)
        d["strip_ladder"] = list(self.strip_ladder)
        return d


@dataclass
class ReductionResult:
    """Output of :func:`reduce`.

    ``residual`` is a strip-norm upper bound of
    ``B(. + p/q) A B^{-1} - target`` on ``|Im z| < eps`` where ``target`` is
    the constant normal form (``R_{theta0}``, ``diag(gamma0, 1/gamma0)`` or
    the constant ``D``).  ``diagnostics["exact_residual"]`` measures the
    distance to the non-constant normal form (``R_theta`` with ``theta``
    1/q-periodic, ``diag(gamma, 1/gamma)``).
    """

    B: MatrixFunction
    theta: StripFunction
    case: str
    residual: float
    B_norm: float
    target: np.ndarray
    p: int
    q: int
    eps: float
    delta_target: float = float("nan")
    diagnostics: dict = field(default_factory=dict)

    @property
    def Binv(self) -> MatrixFunction:
        return self.B.adj()

    def conjugated(self, A: MatrixFunction) -> MatrixFunction:
        """``B(z + p/q) A(z) B(z)^{-1}``."""
        return self.B.shift(Fraction(self.p, self.q)) @ A @ self.Binv

    def to_dict(self, include_functions: bool = True) -> dict:
        t = np.asarray(self.target, dtype=complex)
        out = {
            "case": self.case,
            "p": self.p,
            "q": self.q,
            "eps": self.eps,
            "residual": self.residual,
            "delta_target": self.delta_target,
            "B_norm": self.B_norm,
            "target": [[[float(t[i, j].real), float(t[i, j].imag)] for j in range(2)]
                       for i in range(2)],
            "diagnostics": _jsonable(self.diagnostics),
        }
        if include_functions:
            out["B"] = self.B.to_dict()
            out["theta"] = self.theta.to_dict()
        return out


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(np.real(x)), float(np.imag(x))]
    if x is None or isinstance(x, str):
        return x
    return str(x)


# ----------------------------------------------------------------------
# small helpers


def _rot_mf(theta: StripFunction) -> MatrixFunction:
    """``R_theta(z)`` for a function ``theta`` (angle ``2 pi theta``)."""
    cd = theta.dtype
    two_pi = 2 * pi_of(cd)
    h = theta.half_width * (1 - 1e-9)
    c = theta.apply(lambda v: np.cos(two_pi * v), height=h, scale=1.0)
    s = theta.apply(lambda v: np.sin(two_pi * v), height=h, scale=1.0)
    return MatrixFunction(c, -s, s, c)


def _exp2pii(f: StripFunction, factor=1) -> StripFunction:
    """``exp(2 pi i factor f)`` fitted from samples."""
    cd = f.dtype
    two_pi = 2 * pi_of(cd)
    return f.apply(lambda v: np.exp(1j * two_pi * factor * v), height=f.half_width * (1 - 1e-9))


def _const_rot(beta, dtype) -> np.ndarray:
    """``R_beta`` computed in the real dtype matching ``dtype``."""
    rd = real_dtype(dtype)
    if isinstance(beta, Fraction):
        b = rd.type(beta.numerator) / rd.type(beta.denominator)
    else:
        b = rd.type(beta)
    ang = 2 * pi_of(dtype) * b
    c, s = np.cos(ang), np.sin(ang)
    return np.array([[c, -s], [s, c]], dtype=complex_dtype(dtype))


def _residual(C: MatrixFunction, target, eps: float) -> float:
    return (C - target).strip_norm(eps)[1]


def _sym(B: MatrixFunction) -> MatrixFunction:
    return B.map(lambda e: e.real_part_on_real())


def _grid_sup(C: MatrixFunction, target, M: int) -> float:
    vals = C.line_values(0.0, M).astype(np.complex128)
    if isinstance(target, MatrixFunction):
        tv = target.line_values(0.0, M).astype(np.complex128)
    else:
        tv = np.broadcast_to(np.asarray(target, dtype=np.complex128), vals.shape)
    return float(np.max(_opnorm(vals - tv)))


def _det_grid_error(B: MatrixFunction, M: int) -> float:
    v = B.line_values(0.0, M).astype(np.complex128)
    det = v[:, 0, 0] * v[:, 1, 1] - v[:, 0, 1] * v[:, 1, 0]
    return float(np.max(np.abs(det - 1)))


def trace_check(C: MatrixFunction, Aq: MatrixFunction, p: int, q: int, *, grid: int = 64,
                antiperiodic_B: bool = False) -> float:
    """Max over a real grid of ``| tr C_q(x) - s tr A_q(x) | / max(1, |tr A_q(x)|)``.

    ``C_q`` is the pointwise product ``C(x + (q-1)p/q) ... C(x)`` of the
    reduced cocycle and ``s = (-1)^p`` when ``B`` is antiperiodic
    (``B(x + p) = (-1)^p B(x)``), otherwise ``s = 1``.
    """
    x = np.arange(grid) / grid
    prod = np.broadcast_to(np.eye(2, dtype=complex), (grid, 2, 2)).copy()
    for j in range(q):
        shift = (j * p % q) / q
        prod = np.asarray(C(x + shift), dtype=complex) @ prod
    sign = (-1) ** p if antiperiodic_B else 1
    tq = np.asarray(Aq.trace()(x), dtype=complex)
    err = np.abs(np.trace(prod, axis1=1, axis2=2) - sign * tq) / np.maximum(1.0, np.abs(tq))
    return float(np.max(err))


def _finish(B: MatrixFunction, A: MatrixFunction, target_fn, target_const, theta, case, p, q,
            cfg: ReductionConfig, diag: dict, Aq: MatrixFunction) -> ReductionResult:
    """Compute certified residuals and checks shared by all paths."""
    eps = cfg.eps
    B = _sym(B).chop(eps=cfg.eps1)
    Binv = B.adj()
    C = (B.shift(Fraction(p, q)) @ A @ Binv).chop(eps=eps)
    if target_const is None:
        # constant part of the reduced cocycle
        target_const = np.array([[e.mean for e in C.entries[:2]],
                                 [e.mean for e in C.entries[2:]]], dtype=C.dtype)
    res = _residual(C, target_const, eps)
    exact = _residual(C, target_fn, eps) if target_fn is not None else res
    M = cfg.check_grid
    diag = dict(diag)
    diag["exact_residual"] = exact
    diag["grid_residual"] = _grid_sup(C, target_const, M)
    diag["det_B_error"] = _det_grid_error(B, M)
    diag["B_real_on_real"] = bool(B.is_real_symmetric(1e-8))
    diag["B_antiperiodic"] = bool(B.antiperiodic)
    diag["trace_check"] = trace_check(C, Aq, p, q, antiperiodic_B=B.antiperiodic)
    B_norm = B.strip_norm(eps)[1]
    dt = -math.log(res) / q if res > 0 else float("inf")
    return ReductionResult(B, theta, case, res, B_norm, np.asarray(target_const), p, q, eps,
                           dt, diag)


# ----------------------------------------------------------------------
# multiplier factorisation


def factor_multiplier(mu: StripFunction, p: int, q: int, *, floor: float = 1e-12,
                      return_phi: bool = False):
    """Write ``mu(z) = exp(2 pi i theta(z)) exp(2 pi i psi(z + p/q)) / exp(2 pi i psi(z))``.

    ``mu = exp(2 pi i phi)`` with zero winding; ``theta`` keeps the Fourier
    modes of ``phi`` in ``qZ`` (which equals ``phi^{(q)}/q`` for
    ``phi^{(q)} = sum_{j<q} phi(. + j p/q)``) and
    ``psi_k = phi_k / (exp(2 pi i k p/q) - 1)`` for ``k`` outside ``qZ``.
    If ``|mu| = 1`` on the real line ``psi`` is real there; if ``mu`` is real
    there ``psi`` is purely imaginary there.
    """
    if math.gcd(p, q) != 1:
        raise ValueError("p/q must be in lowest terms")
    d, phi = log_branch(mu, floor)
    if d != 0:
        raise WindingNonzero("multiplier has nonzero winding", lemma="factor_multiplier",
                             margins={"winding": d})
    cd = phi.dtype
    ks = phi.ks
    inq = ks % q == 0
    div = _phases(2 * ks, Fraction(p, q), cd) - 1
    small = np.abs(div[~inq].astype(np.complex128))
    if small.size and small.min() < 1e-14:
        raise SmallDivisorOverflow("small divisor below 1e-14", lemma="factor_multiplier",
                                   margins={"min_divisor": float(small.min())})
    psi_c = np.zeros_like(phi.coeffs)
    psi_c[~inq] = phi.coeffs[~inq] / div[~inq]
    psi = StripFunction(psi_c, phi.half_width)
    theta = StripFunction(np.where(inq, phi.coeffs, 0).astype(cd), phi.half_width)
    M = max(256, 16 * (mu.N + 1))
    v = mu.line_values(0.0, M).astype(np.complex128)
    scale = float(np.max(np.abs(v)))
    if np.max(np.abs(np.abs(v) - 1)) < 1e-10:
        psi = psi.real_part_on_real()
        theta = theta.real_part_on_real()
    elif np.max(np.abs(v.imag)) < 1e-10 * scale:
        psi = (psi - psi.conj_reflect()) * 0.5
    return (psi, theta, phi) if return_phi else (psi, theta)


def factorization_error(phi: StripFunction, psi: StripFunction, theta: StripFunction,
                        p: int, q: int) -> float:
    """Coefficient norm of ``phi - theta - psi(. + p/q) + psi``."""
    r = phi - theta - psi.shift(Fraction(p, q)) + psi
    return float(np.sum(np.abs(r.coeffs.astype(np.complex128))))


def multiplier_products_log_max(mu: StripFunction, p: int, q: int, m: int = 16) -> float:
    """``max_{k<=q} max_x ln |mu_k(x)|`` on a real grid of ``m q`` points."""
    M = m * q
    v = np.abs(mu.line_values(0.0, M).astype(np.complex128))
    lv = np.log(v)
    acc = np.zeros(M)
    best = 0.0
    for j in range(q):
        acc = acc + np.roll(lv, -(j * p % q) * m)
        best = max(best, float(acc.max()))
    return best


# ----------------------------------------------------------------------
# pointwise least-squares ratio


def _multiplier(A: MatrixFunction, u: tuple, p: int, q: int) -> StripFunction:
    """Fit ``mu`` with ``A(z) u(z) = mu(z) u(z + p/q)`` by pointwise least squares."""
    Au = A.matvec(u)
    us = (u[0].shift(Fraction(p, q)), u[1].shift(Fraction(p, q)))
    hw = min(u[0].half_width, u[1].half_width)
    cd = u[0].dtype

    def sampler(y, M):
        a = vec_line_values(Au, y, M)
        b = vec_line_values(us, y, M)
        return np.sum(np.conj(b) * a, axis=-1) / np.sum(np.abs(b) ** 2, axis=-1)

    return fit_lines(sampler, hw, height=hw * (1 - 1e-9), dtype=cd,
                     M0=max(256, 16 * (A.N + u[0].N + 1)), scale=1.0)


def _normalize_phase(v: tuple) -> tuple:
    """Multiply by a unimodular constant so ``v_1(0) > 0`` (or ``i v_2(0) > 0``)."""
    v0 = [complex(f.eval(0.0)) for f in v]
    n = math.hypot(abs(v0[0]), abs(v0[1]))
    if abs(v0[0]) >= 1e-3 * n:
        ph = np.conj(v0[0]) / abs(v0[0])
    else:
        ph = np.conj(-1j * v0[1]) / abs(v0[1])
    return (v[0] * ph, v[1] * ph)


# ----------------------------------------------------------------------
# elliptic path


def elliptic_path(c: Cocycle, cfg: ReductionConfig, *, Aq: MatrixFunction | None = None,
                  delta1: float = 0.0) -> ReductionResult:
    """Rotation normal form from an eigenvector field of ``A_q``."""
    p, q = c.pq
    A = c.map
    Aq = Aq if Aq is not None else iterate(c, q)
    cd = A.dtype
    t = Aq.trace().with_half_width(cfg.eps0)
    hw = cfg.eps0
    disc = (4 - t * t)
    M = max(256, 16 * (t.N + 1))
    dv = np.concatenate([disc.line_values(y, M) for y in (-hw * (1 - 1e-9), 0.0,
                                                            hw * (1 - 1e-9))])
    if np.min(dv.real.astype(float)) <= 0:
        raise PreconditionFailed("4 - t^2 leaves the right half plane", lemma="elliptic_path",
                                 margins={"min_real": float(np.min(dv.real))})
    sq = disc.apply(np.sqrt)
    lam = (t + sq * 1j) * 0.5
    P = Aq - MatrixFunction(lam, lam * 0, lam * 0, lam)
    P = P.with_half_width(cfg.eps0)
    nrm = P.strip_norm(cfg.eps0)[1]
    Pn = P / nrm
    dlow = Pn.sampled_min_norm(cfg.eps0)
    diag = {"lambda0": complex(lam.mean), "P_norm": nrm, "P_min_norm": dlow}
    dz = corona.zero_determinant(Pn, max(dlow, 1e-12), cfg.eps0, target=cfg.det_target,
                                 rho_max=cfg.rho_max, C_bez=cfg.C_bez, full=True)
    diag["det_trajectory"] = dz.det_norms
    ker = corona.kernel_vector(dz.P, max(dlow, 1e-12), cfg.eps0, cfg.eps1,
                               residual_tol=cfg.kernel_tol)
    diag["kernel"] = {"route": ker.route, "kappa": ker.kappa, "zeros": ker.zeros_used,
                      "residual": ker.residual, "norm_floor": ker.norm_floor}
    u = ker.u
    mu = _multiplier(A, u, p, q)
    diag["multiplier_log_max"] = multiplier_products_log_max(mu, p, q)
    psi, theta_m, phi = factor_multiplier(mu, p, q, return_phi=True)
    diag["factorization_error"] = factorization_error(phi, psi, theta_m, p, q)
    g = _exp2pii(psi)
    v = _normalize_phase((g * u[0], g * u[1]))
    vs = (v[0].conj_reflect(), v[1].conj_reflect())
    c1 = (v[0] + vs[0], v[1] + vs[1])
    c2 = ((v[0] - vs[0]) * (-1j), (v[1] - vs[1]) * (-1j))
    Bt = MatrixFunction(c1[0], c2[0], c1[1], c2[1])
    b = Bt.det().real_part_on_real()
    if b.mean.real < 0:
        Bt = MatrixFunction(c1[0], -c2[0], c1[1], -c2[1])
        b = -b
        theta_m = -theta_m
    theta = (-theta_m).real_part_on_real()
    theta = theta - float(np.round(float(theta.mean.real)))
    bM = max(256, 16 * (b.N + 1))
    bmin = b.sampled_min(cfg.eps1, bM, n_lines=9)
    bmax = b.strip_norm(cfg.eps1)[1]
    dq = max(delta1, cfg.delta1_floor) * q
    diag["b_min"] = bmin
    diag["b_concentration"] = (b - b.mean).strip_norm(cfg.eps)[1] / abs(b.mean)
    diag["b_concentration_target"] = math.exp(-cfg.delta5 * q)
    diag["b_lower_margin"] = cfg.C_b * dq - math.log(bmax / max(bmin, 1e-300))
    if bmin < 1e-12 * bmax or bmin <= 0:
        raise DeterminantCollapse("det of the eigenvector frame nearly vanishes",
                                  lemma="elliptic_path", margins={"b_min": bmin, "b_max": bmax})
    db, lb = log_branch(b)
    if db != 0:
        raise DeterminantCollapse("det of the eigenvector frame winds", lemma="elliptic_path",
                                  margins={"winding": db})
    rsq = _exp2pii(lb, -0.5).real_part_on_real()
    Binv = Bt * rsq
    B = Binv.adj()
    target_fn = _rot_mf(theta)
    theta0 = theta.coeffs[theta.N].real
    target_const = _const_rot(theta0, cd)
    diag["theta0"] = float(theta0)
    diag["theta_noncq_energy"] = float(np.sum(np.abs(
        theta.project_q_complement(q).coeffs.astype(np.complex128))))
    return _finish(B, A, target_fn, target_const, theta, "elliptic", p, q, cfg, diag, Aq)


# ----------------------------------------------------------------------
# hyperbolic path


def hyperbolic_path(c: Cocycle, cfg: ReductionConfig, *, Aq: MatrixFunction | None = None,
                    delta1: float = 0.0) -> ReductionResult:
    """Diagonal normal form from the two real eigenvector fields of ``A_q``."""
    p, q = c.pq
    A = c.map
    Aq = Aq if Aq is not None else iterate(c, q)
    cd = A.dtype
    t = Aq.trace().with_half_width(cfg.eps0)
    sgn = 1.0 if t.mean.real > 0 else -1.0
    disc = t * t - 4
    sq = disc.apply(np.sqrt)
    lam = (t + sq * sgn) * 0.5
    lam_inv = (t - sq * sgn) * 0.5
    diag = {"lambda0": complex(lam.mean)}
    vecs = []
    for name, L in (("v", lam), ("v_prime", lam_inv)):
        P = (Aq - MatrixFunction(L, L * 0, L * 0, L)).with_half_width(cfg.eps0)
        nrm = P.strip_norm(cfg.eps0)[1]
        Pn = P / nrm
        dlow = Pn.sampled_min_norm(cfg.eps0)
        dz = corona.zero_determinant(Pn, max(dlow, 1e-12), cfg.eps0, target=cfg.det_target,
                                     rho_max=cfg.rho_max, C_bez=cfg.C_bez, full=True)
        ker = corona.kernel_vector(dz.P, max(dlow, 1e-12), cfg.eps0, cfg.eps1, real=True,
                                   residual_tol=cfg.kernel_tol)
        diag[name] = {"route": ker.route, "residual": ker.residual,
                      "antiperiodic": ker.antiperiodic, "det_trajectory": dz.det_norms}
        vecs.append(ker.u)
    (v, vp) = vecs
    if v[0].antiperiodic != vp[0].antiperiodic:
        raise ParityMismatch("eigenvector fields have different parity", lemma="hyperbolic_path",
                             margins={"v": v[0].parity, "v_prime": vp[0].parity})
    gammas = []
    for vec in (v, vp):
        mu = _multiplier(A, vec, p, q)
        mu = mu.real_part_on_real()
        psi, theta, phi = factor_multiplier(mu, p, q, return_phi=True)
        g = _exp2pii(psi).real_part_on_real()
        vec_n = (g * vec[0], g * vec[1])
        gammas.append((_exp2pii(theta).real_part_on_real(), theta, vec_n))
    (gam, theta, v), (_, _, vp) = gammas
    b = (v[0] * vp[1] - v[1] * vp[0]).real_part_on_real()
    bM = max(256, 16 * (b.N + 1))
    bmin = b.sampled_min(cfg.eps1, bM, n_lines=9)
    bmax = b.strip_norm(cfg.eps1)[1]
    diag["b_min"] = bmin
    if bmin < 1e-12 * bmax:
        raise DeterminantCollapse("eigenvector fields nearly parallel", lemma="hyperbolic_path",
                                  margins={"b_min": bmin, "b_max": bmax})
    binv = b.reciprocal(cfg.eps1).real_part_on_real()
    Binv = MatrixFunction(v[0], vp[0] * binv, v[1], vp[1] * binv)
    B = Binv.adj()
    ginv = gam.reciprocal(gam.half_width * (1 - 1e-9)).real_part_on_real()
    z = gam * 0
    target_fn = MatrixFunction(gam, z, z, ginv)
    g0 = complex(gam.mean).real
    target_const = np.diag([g0, 1 / g0]).astype(cd)
    diag["gamma0"] = g0
    res = _finish(B, A, target_fn, target_const, theta, "hyperbolic", p, q, cfg, diag, Aq)
    # gamma^q against the eigenvalue of A_q (sign: antiperiodic fields pick up (-1)^p)
    xs = np.arange(64) / 64
    gq = np.asarray(gam(xs), dtype=complex) ** q
    sign = (-1) ** p if v[0].antiperiodic else 1
    res.diagnostics["gamma_power_error"] = float(np.max(np.abs(
        gq - sign * np.asarray(lam(xs), dtype=complex)) / np.abs(np.asarray(lam(xs)))))
    return res


# ----------------------------------------------------------------------
# parabolic path


def _rotation_table(q: int, l: int, dtype, ks=None) -> tuple[np.ndarray, np.ndarray]:
    """cos and sin of ``2 pi (2k + l) s / 2q`` as (k, s) tables (exact reduction)."""
    rd = real_dtype(dtype)
    ks = np.arange(q) if ks is None else np.asarray(ks)
    s = np.arange(q)
    num = ((2 * ks[:, None] + l) * s[None, :]) % (2 * q)
    ang = 2 * pi_of(dtype) * num.astype(rd) / rd.type(2 * q)
    return np.cos(ang), np.sin(ang)


def _stack_coeffs(As: list) -> tuple[np.ndarray, int]:
    N = max(m.N for m in As)
    arr = np.stack([np.stack([e.padded(N).coeffs for e in m.entries]) for m in As])
    return arr, N


def dft_family(As: list, q: int, l: int, ks=None) -> list[MatrixFunction]:
    """``W_k = sum_{s<q} R_{ks/q} R_{ls/2q} A_s`` for the requested ``k`` (all by default)."""
    A0 = As[0]
    cd = np.result_type(*[m.dtype for m in As[:q]])
    hw = min(m.half_width for m in As[:q])
    arr, N = _stack_coeffs(As[:q])  # (s, 4, L)
    arr = arr.astype(cd)
    cs, sn = _rotation_table(q, l, cd, ks)
    Cc = np.einsum("ks,sel->kel", cs, arr)
    Ss = np.einsum("ks,sel->kel", sn, arr)
    out = []
    anti = A0.antiperiodic
    for k in range(len(cs)):
        # W = C + J S with J = [[0, -1], [1, 0]]; entries ordered a, b, c, d
        a = Cc[k, 0] - Ss[k, 2]
        b = Cc[k, 1] - Ss[k, 3]
        c_ = Cc[k, 2] + Ss[k, 0]
        d = Cc[k, 3] + Ss[k, 1]
        out.append(MatrixFunction(*[StripFunction(x, hw, anti) for x in (a, b, c_, d)]))
    return out


def dft_values(As: list, q: int, l: int, M: int) -> np.ndarray:
    """Values ``W_k(j/M)`` as an array of shape (q, M, 2, 2)."""
    vals = np.stack([m.line_values(0.0, M) for m in As[:q]]).astype(np.complex128)
    cs, sn = _rotation_table(q, l, np.float64)
    Cv = np.einsum("ks,sxij->kxij", cs, vals)
    Sv = np.einsum("ks,sxij->kxij", sn, vals)
    J = np.array([[0, -1], [1, 0]], dtype=complex)
    return Cv + np.einsum("ij,kxjm->kxim", J, Sv)


def parseval_error(As: list, q: int, l: int, M: int = 64, n_vectors: int = 8,
                   seed: int = 0) -> float:
    """Relative error of ``sum_k ||W_k(x) y||^2 = q sum_s ||A_s(x) y||^2``."""
    rng = np.random.default_rng(seed)
    W = dft_values(As, q, l, M)
    Av = np.stack([m.line_values(0.0, M) for m in As[:q]]).astype(np.complex128)
    worst = 0.0
    for _ in range(n_vectors):
        y = rng.normal(size=2)
        y /= np.linalg.norm(y)
        lhs = np.sum(np.abs(W @ y) ** 2, axis=(0, 2))
        rhs = q * np.sum(np.abs(Av @ y) ** 2, axis=(0, 2))
        worst = max(worst, float(np.max(np.abs(lhs - rhs) / rhs)))
    return worst


def wk_identity_error(W: MatrixFunction, A: MatrixFunction, Aq: MatrixFunction, p: int, q: int,
                      k: int, l: int) -> float:
    """Relative coefficient-norm error of
    ``W_k(z + p/q) A(z) = R_{-(2k+l)/2q} (W_k(z) + (-1)^l A_q(z) - id)``."""
    cd = W.dtype
    R = _const_rot(Fraction(-(2 * k + l), 2 * q), cd)
    lhs = W.shift(Fraction(p, q)) @ A
    rhs = (W + Aq * ((-1) ** l) - np.eye(2)).lmul_const(R)
    scale = max(W.coef_norm(0.0), Aq.coef_norm(0.0), 1.0) * max(A.coef_norm(0.0), 1.0)
    return (lhs - rhs).coef_norm(0.0) / scale


def parabolic_path(c: Cocycle, cfg: ReductionConfig, *, As: list | None = None,
                   delta1: float = 0.0) -> ReductionResult:
    """Normal form for ``|t0|`` close to 2."""
    p, q = c.pq
    A = c.map
    cd = A.dtype
    As = As if As is not None else iterate(c, q, keep_all=True)
    Aq = As[q]
    t0 = Aq.trace().mean.real
    l = 0 if t0 > 0 else 1
    sign = 1 if l == 0 else -1
    dq = max(delta1, cfg.delta1_floor) * q
    near = (Aq - sign * np.eye(2)).strip_norm(cfg.eps1)[1]
    near_thr = math.exp(-cfg.C0 * dq)
    diag = {"l": l, "near_identity_norm": near, "near_identity_threshold": near_thr}
    if near > near_thr:
        W = Aq - sign * np.eye(2)
        diag["route"] = "A_q not near +-id"
        return wr_fallback(c, W, A, cfg, delta1=delta1, Aq=Aq, extra=diag)
    M = cfg.n_x0
    Wv = dft_values(As, q, l, M)
    norms = _opnorm(Wv)  # (k, x)
    flat = int(np.argmax(norms.T.ravel()))  # x-major order: lexicographic (x, k) tie-break
    j0, k0 = divmod(flat, q)
    diag.update({"k0": k0, "x0": j0 / M, "W_x0_norm": float(norms[k0, j0]),
                 "parseval_error": parseval_error(As, q, l)})
    W = dft_family(As, q, l, ks=[k0])[0].with_half_width(cfg.eps0)
    diag["wk_identity_error"] = wk_identity_error(W, A, Aq, p, q, k0, l)
    nW = W.strip_norm(cfg.eps0)[1]
    Wn = W / nW
    wmin = Wn.sampled_min_norm(cfg.eps1, n_lines=9)
    diag["W_min_norm"] = wmin
    diag["W_lower_margin"] = cfg.C0 * dq + math.log(max(wmin, 1e-300))
    w = Wn.det().real_part_on_real()
    w0 = w.mean.real
    thr = math.exp(-math.sqrt(cfg.C0) * dq)
    diag.update({"w0": w0, "w0_threshold": thr,
                 "w_concentration": (w - w.mean).strip_norm(cfg.eps)[1]})
    beta = Fraction(2 * k0 + l, 2 * q)
    R = _const_rot(-beta, cd)
    if abs(w0) < thr:
        diag["route"] = "small det W"
        return wr_fallback(c, Wn, R, cfg, delta1=delta1, Aq=Aq, extra=diag)
    if w0 < 0:
        Wn = Wn.lmul_const(np.diag([1.0, -1.0]))
        w = -w
        target = _const_rot(beta, cd)
        theta_c = beta
    else:
        target = R
        theta_c = -beta
    dw, lw = log_branch(w)
    if dw != 0:
        raise DeterminantCollapse("det W winds", lemma="parabolic_path", margins={"winding": dw})
    rs = _exp2pii(lw, -0.5).real_part_on_real()
    B = Wn * rs
    theta = StripFunction.constant(float(theta_c), A.half_width, cd)
    diag["theta0"] = float(theta_c)
    return _finish(B, A, None, target, theta, "parabolic_dft", p, q, cfg, diag, Aq)


# ----------------------------------------------------------------------
# fallback


def wr_fallback(c: Cocycle, W: MatrixFunction, R, cfg: ReductionConfig, *, delta1: float = 0.0,
                Aq: MatrixFunction | None = None, extra: dict | None = None) -> ReductionResult:
    """Reduction from an approximate intertwiner ``W(z + p/q) A(z) ~ R W(z)`` with small det.

    ``R`` is a constant 2x2 matrix or a :class:`MatrixFunction`.  The kernel
    ``u`` of (the determinant-zeroed) ``W`` is an approximately invariant
    direction, ``A u ~ s u(. + p/q)``.  Completing ``u`` to a unimodular
    frame and factoring the diagonal multiplier gives an upper triangular
    cocycle, whose off-diagonal entry is then scaled down by
    ``diag(1/d, d)``.
    """
    p, q = c.pq
    A = c.map
    cd = A.dtype
    Aq = Aq if Aq is not None else iterate(c, q)
    diag = dict(extra or {})
    dq = max(delta1, cfg.delta1_floor) * q
    nW = W.strip_norm(cfg.eps0)[1]
    Wn = (W / nW).with_half_width(min(W.half_width, cfg.eps0))
    Wn = Wn.astype(cd)
    if isinstance(R, MatrixFunction):
        RW = R @ Wn
    else:
        RW = Wn.lmul_const(np.asarray(R))
    inter = (Wn.shift(Fraction(p, q)) @ A - RW).strip_norm(cfg.eps1)[1]
    inter_thr = math.exp(-cfg.C3 * cfg.C4 * dq)
    wmin = Wn.sampled_min_norm(cfg.eps0, n_lines=9)
    low_thr = math.exp(-cfg.C4 * dq)
    detn = Wn.det().strip_norm(cfg.eps0)[1]
    rho = corona.rho_parameter(detn, min(max(wmin, 1e-300), 1.0))
    margins = {"intertwining": inter, "intertwining_threshold": inter_thr,
               "W_min_norm": wmin, "W_min_threshold": low_thr,
               "det_norm": detn, "rho": rho, "rho_max": cfg.rho_max}
    failed = [name for name, ok in (("intertwining", inter <= inter_thr),
                                    ("lower_bound", wmin >= low_thr),
                                    ("det_small", rho <= cfg.rho_max)) if not ok]
    if failed:
        raise HypothesisFailed("fallback hypotheses failed: " + ", ".join(failed),
                               lemma="wr_fallback", margins={**margins, "failed": failed})
    diag["hypotheses"] = margins
    dz = corona.zero_determinant(Wn, wmin, cfg.eps0, target=cfg.det_target,
                                 rho_max=cfg.rho_max, C_bez=cfg.C_bez, full=True)
    diag["det_trajectory"] = dz.det_norms
    ker = corona.kernel_vector(dz.P, wmin, cfg.eps0, cfg.eps1, real=True,
                               residual_tol=cfg.kernel_tol)
    u = ker.u
    diag["kernel"] = {"route": ker.route, "residual": ker.residual,
                      "antiperiodic": ker.antiperiodic}
    # near-invariance of the direction u
    Au = A.matvec(u)
    us = (u[0].shift(Fraction(p, q)), u[1].shift(Fraction(p, q)))
    Mg = max(256, 16 * (max(Au[0].N, us[0].N) + 1))
    a_v, b_v = vec_line_values(Au, 0.0, Mg), vec_line_values(us, 0.0, Mg)
    cross = np.abs(a_v[:, 0] * b_v[:, 1] - a_v[:, 1] * b_v[:, 0]).astype(float)
    nn = (np.linalg.norm(a_v.astype(complex), axis=-1) *
          np.linalg.norm(b_v.astype(complex), axis=-1))
    diag["invariance_defect"] = float(np.max(cross / nn))
    # complete u to a unimodular frame
    umin = corona.vec_sampled_min(u, cfg.eps1)
    f2, f1 = corona.bezout_solve([u[0], -u[1]], umin, cfg.eps1, C_bez=cfg.C_bez,
                                 check_budget=False)
    Bt = MatrixFunction(u[0], f1, u[1], f2)
    Q = (Bt.shift(Fraction(p, q)).adj() @ A @ Bt).chop(eps=cfg.eps1)
    s1 = Q.a.real_part_on_real()
    psi, theta, phi = factor_multiplier(s1, p, q, return_phi=True)
    diag["factorization_error"] = factorization_error(phi, psi, theta, p, q)
    g = _exp2pii(psi).real_part_on_real()
    ginv = _exp2pii(psi, -1).real_part_on_real()
    G = MatrixFunction(ginv, g * 0, g * 0, g)
    Q2 = (G.shift(Fraction(p, q)) @ Q @ G.adj()).chop(eps=cfg.eps1)
    s2 = Q2.b.strip_norm(cfg.eps1)[1]
    d = math.exp(10 * cfg.C4 * max(delta1, 0.0) * q) * (1 + s2)
    diag["d"] = d
    Dm = np.diag([1 / d, d])
    Bt_inv = Bt.adj()
    B = (G @ Bt_inv).lmul_const(Dm)
    gam = _exp2pii(theta).real_part_on_real()
    diag["gamma0"] = complex(gam.mean).real
    return _finish(B, A, None, None, theta, "wr_fallback", p, q, cfg, diag, Aq)


# ----------------------------------------------------------------------
# dispatcher


def dispatch(t0: float, delta1: float, q: int, cfg: ReductionConfig) -> tuple[str, dict]:
    """Case predicate on the mean trace ``t0``."""
    thr = math.exp(-cfg.C0 ** 2 * max(delta1, cfg.delta1_floor) * q)
    gap = 2 - abs(t0)
    info = {"t0": t0, "gap": gap, "threshold": thr}
    if gap >= thr:
        return "elliptic", info
    if -gap >= thr:
        return "hyperbolic", info
    return "parabolic", info


def reduce(c: Cocycle, cfg: ReductionConfig | None = None) -> ReductionResult:
    """Reduce a rational-frequency cocycle to (near) constant normal form."""
    cfg = cfg or ReductionConfig()
    if not c.is_rational:
        raise PreconditionFailed("reduce needs an exact rational frequency", lemma="reduce")
    p, q = c.pq
    if q < cfg.q_min:
        raise PreconditionFailed(f"q = {q} below q_min = {cfg.q_min}", lemma="reduce",
                                 margins={"q": q, "q_min": cfg.q_min})
    if cfg.eps0 > c.map.half_width * (1 + 1e-12):
        raise PreconditionFailed("eps0 exceeds the analyticity strip of A", lemma="reduce",
                                 margins={"eps0": cfg.eps0, "half_width": c.map.half_width})
    c = c.astype(cfg.dtype)
    try:
        As = iterate(c, q, keep_all=True)
    except OverflowError as exc:
        raise CondFailed("iterates overflow", lemma="cond_test") from exc
    delta1, profile = cond_test(c, cfg.eps0, As)
    if delta1 > cfg.delta1_max:
        raise CondFailed("growth budget exceeded", lemma="cond_test",
                         margins={"delta1": delta1, "delta1_max": cfg.delta1_max, "q": q})
    Aq = As[q]
    t = Aq.trace()
    t0 = float(t.mean.real)
    conc = (t - t.mean).strip_norm(cfg.eps_prime)[1] if t.N else 0.0
    conc_thr = math.exp(-cfg.delta3 * q)
    if conc > conc_thr:
        raise TraceNotConcentrated("trace of A_q is not concentrated", lemma="reduce",
                                   margins={"deviation": conc, "threshold": conc_thr})
    case, info = dispatch(t0, delta1, q, cfg)
    info.update({"delta1": delta1, "trace_deviation": conc, "trace_threshold": conc_thr,
                 "dispatched": case})
    if case == "elliptic":
        res = elliptic_path(c, cfg, Aq=Aq, delta1=delta1)
    elif case == "hyperbolic":
        res = hyperbolic_path(c, cfg, Aq=Aq, delta1=delta1)
    else:
        res = parabolic_path(c, cfg, As=As, delta1=delta1)
    res.diagnostics["dispatch"] = info
    res.diagnostics["cond_profile"] = profile
    return res


# ----------------------------------------------------------------------
# transfer to nearby irrational frequencies


def derivative_norm(B: MatrixFunction, eps: float) -> float:
    """``(sum_entries (sum_k 2 pi |k + o| |c_k| e^{2 pi eps |k + o|})^2)^{1/2}``."""
    tot = 0.0
    for e in B.entries:
        f = np.abs(e.freqs.astype(np.float64))
        tot += float(np.sum(2 * np.pi * f * np.abs(e.coeffs.astype(np.complex128)) *
                            np.exp(2 * np.pi * eps * f))) ** 2
    return math.sqrt(tot)


def transfer_to_irrational(r: ReductionResult, A: MatrixFunction, alpha, eps_prime: float) -> float:
    """Upper bound of ``||B(. + alpha) A B^{-1} - target||_{eps'}``.

    ``residual + ||A|| ||B|| |alpha - p/q| ||dB||_{eps'}``; ``||B^{-1}|| = ||B||``
    because ``det B = 1``.
    """
    if not 0 < eps_prime <= r.eps:
        raise ValueError("eps' must lie in (0, eps]")
    if isinstance(alpha, Fraction):
        diff = float(abs(alpha - Fraction(r.p, r.q)))
    elif isinstance(alpha, str):
        from .arithmetic import parse_frequency
        a = parse_frequency(alpha)
        diff = float(abs(a - Fraction(r.p, r.q))) if isinstance(a, Fraction) else float(
            abs(a - mpmath.mpf(r.p) / r.q))
    else:
        diff = float(abs(mpmath.mpf(alpha) - mpmath.mpf(r.p) / r.q))
    if diff == 0:
        return r.residual
    nA = A.strip_norm(r.eps)[1]
    return r.residual + nA * r.B_norm * diff * derivative_norm(r.B, eps_prime)
