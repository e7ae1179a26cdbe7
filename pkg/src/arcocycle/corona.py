"""Function-theoretic solvers on strips.

* :func:`bezout_solve` finds ``b_i`` with ``sum a_i b_i = 1`` by weighted
  least squares in coefficient space.
* :func:`zero_determinant` perturbs a near-rank-one matrix function to an
  exactly (numerically) rank-one one, ``P <- P - K det P``.
* :func:`kernel_vector` returns a nowhere-vanishing analytic kernel vector of
  a rank-one matrix function.
* :func:`real_symmetrize` rotates a vector field that is parallel to a real
  vector on the real line into a real-on-real field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (IllConditioned, NoConvergence, NotRealDirection, PreconditionFailed,
                     ResidualTooLarge, ZeroLocationFailure)
from .strip import (MatrixFunction, StripFunction, _opnorm, fit_lines, log_branch, pi_of,
                    real_dtype, vec_conj_reflect, vec_line_values, vec_sampled_min,
                    vec_strip_norm)

# ----------------------------------------------------------------------
# Bezout identities


def _combined_sampled_min(a: list, eps: float, M: int, n_lines: int = 9) -> float:
    ys = np.linspace(-eps, eps, n_lines) * (1 - 1e-9)
    best = np.inf
    for y in ys:
        tot = sum(np.abs(f.line_values(y, M).astype(np.complex128)) ** 2 for f in a)
        best = min(best, float(np.sqrt(np.min(tot))))
    return best


def bezout_budget(delta: float, C_bez: float) -> float:
    """``C_bez delta^{-2} (1 + |ln delta|)``."""
    return C_bez * delta ** -2 * (1 + abs(math.log(delta)))


def _bezout_lstsq(a: list, eps: float, Nb: int, cost: list):
    """One weighted least-squares solve with unknown order ``Nb``."""
    cd = np.result_type(*[f.dtype for f in a])
    anti = a[0].antiperiodic
    shift2 = 1 if anti else 0  # product frequency m = k + j + 2 o
    Na = max(f.N for f in a)
    Mx = Na + Nb + shift2
    rows = 2 * Mx + 1
    m = np.arange(-Mx, Mx + 1)
    row_w = np.exp(2 * np.pi * eps * np.abs(m))
    blocks = []
    col_scales = []
    js = np.arange(-Nb, Nb + 1)
    jf = np.abs(js + (0.5 if anti else 0.0))
    for f, w in zip(a, cost):
        A = np.zeros((rows, 2 * Nb + 1), dtype=np.complex128)
        cf = f.coeffs.astype(np.complex128)
        for col, j in enumerate(js):
            start = (j - f.N + shift2) + Mx
            A[start:start + len(cf), col] = cf
        s = np.exp(-2 * np.pi * eps * jf) / w
        blocks.append(A * s[None, :])
        col_scales.append(s)
    mat = np.hstack(blocks) * row_w[:, None]
    rhs = np.zeros(rows, dtype=np.complex128)
    rhs[Mx] = 1.0
    y, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
    out = []
    for i, f in enumerate(a):
        coef = y[i * (2 * Nb + 1):(i + 1) * (2 * Nb + 1)] * col_scales[i]
        out.append(StripFunction(coef.astype(cd), f.half_width, anti))
    return out


def bezout_residual(a: list, b: list) -> StripFunction:
    """``sum a_i b_i - 1``."""
    tot = a[0] * b[0]
    for x, y in zip(a[1:], b[1:]):
        tot = tot + x * y
    return tot - 1.0


def bezout_solve(a: list, delta: float, eps: float, *, C_bez: float = 1e3,
                 target: float = 1e-8, cost: list | None = None, real: bool | None = None,
                 max_order: int = 1024, check_budget: bool = True) -> list:
    """Solve ``sum_i a_i b_i = 1`` on the strip ``|Im z| < eps``.

    The unknown coefficients are scaled by ``exp(-2 pi eps |k|)`` and the
    equations weighted by ``exp(2 pi eps |m|)``; the minimum-norm least
    squares solution then keeps the strip norm of the ``b_i`` small.
    ``cost`` gives per-unknown penalty multipliers (default 1): cheaper
    unknowns are preferred by the minimum-norm solution.

    Real-on-real inputs give real-on-real outputs by averaging with the
    reflection ``conj(b(conj z))``.

    Raises :class:`IllConditioned` when the sampled lower bound
    ``(sum |a_i|^2)^{1/2} >= delta`` fails, when the residual cannot be pushed
    below ``target``, or when the solution exceeds the norm budget.
    """
    if not a:
        raise ValueError("need at least one function")
    if len({f.antiperiodic for f in a}) != 1:
        raise ValueError("inputs must share parity")
    hw = min(f.half_width for f in a)
    if eps > hw * (1 + 1e-12):
        raise PreconditionFailed("strip wider than the inputs", lemma="bezout_solve")
    cost = list(cost) if cost is not None else [1.0] * len(a)
    Na = max(f.N for f in a)
    M = max(256, 16 * (Na + 1))
    lower = _combined_sampled_min(a, eps, M)
    if lower < delta * (1 - 1e-9):
        raise IllConditioned("lower bound (sum |a_i|^2)^(1/2) >= delta violated",
                             lemma="bezout_solve",
                             margins={"sampled_min": lower, "delta": delta})
    if real is None:
        real = all(f.is_real_on_real(1e-12) for f in a)
    Nb = max(8, 2 * Na)
    best = None
    while True:
        b = _bezout_lstsq(a, eps, Nb, cost)
        if real:
            b = [f.real_part_on_real() for f in b]
        res = bezout_residual(a, b).strip_norm(eps)[1]
        if best is None or res < best[0]:
            best = (res, b)
        if res < target * 1e-2 or Nb >= max_order:
            break
        Nb *= 2
    res, b = best
    if res >= target:
        raise IllConditioned("least-squares residual above target", lemma="bezout_solve",
                             margins={"residual": res, "target": target, "order": Nb})
    if check_budget:
        nb = vec_norm_list(b, eps)
        budget = bezout_budget(min(delta, 1.0), C_bez)
        if nb > budget:
            raise IllConditioned("solution norm exceeds budget", lemma="bezout_solve",
                                 margins={"norm": nb, "budget": budget})
    return [f.chop(eps=eps) for f in b]


def vec_norm_list(b: list, eps: float) -> float:
    """Sampled sup of ``(sum |b_i|^2)^{1/2}`` with a coefficient-sum cap."""
    M = max(256, 16 * (max(f.N for f in b) + 1))
    ys = (-eps * (1 - 1e-9), eps * (1 - 1e-9), 0.0)
    best = 0.0
    for y in ys:
        tot = sum(np.abs(f.line_values(y, M).astype(np.complex128)) ** 2 for f in b)
        best = max(best, float(np.sqrt(np.max(tot))))
    return best


# ----------------------------------------------------------------------
# determinant zeroing


@dataclass
class DetStep:
    """One step of :func:`zero_determinant`."""

    det_norm: float
    direct_det_norm: float
    detK_norm: float
    bezout_residual: float


@dataclass
class DetZeroResult:
    P: MatrixFunction
    trajectory: list = field(default_factory=list)
    rho: float = 0.0
    displacement: float = 0.0

    @property
    def det_norms(self) -> list[float]:
        return [s.det_norm for s in self.trajectory]

    def ratios(self) -> list[float]:
        """``log d_{n+1} / log d_n`` along the trajectory."""
        d = self.det_norms
        return [math.log(d[i + 1]) / math.log(d[i]) for i in range(len(d) - 1)]


def rho_parameter(det_norm: float, delta: float) -> float:
    """Smallness parameter ``||det P|| ((1 + |ln delta|) / delta^2)^2``."""
    return det_norm * ((1 + abs(math.log(delta))) / delta ** 2) ** 2


def zero_determinant(P0: MatrixFunction, delta: float, eps0: float, *, target: float = 1e-12,
                     max_iter: int = 8, rho_max: float = 0.5, C_bez: float = 1e3,
                     scalar_cost: float = 0.1, margin: float = 1.1,
                     full: bool = False):
    """Iterate ``P <- P - K det P`` with ``tr(adj(P) K) = 1``.

    The identity ``det(P - K D) = D (1 - tr(adj(P) K)) + D^2 det K`` is used
    to carry the determinant along the iteration, so its decay is followed
    below the round-off floor of a direct recomputation (both are recorded).
    ``K`` is written as ``g I + K'`` and the scalar part ``g`` is given a
    lower least-squares cost (``scalar_cost``): a pure minimum-norm solution
    has ``det K`` of the order of ``conj(det P)``, which would turn the
    quadratic decay into a cubic one.

    Returns the new matrix function, or a :class:`DetZeroResult` when
    ``full`` is true.
    """
    D = P0.det()
    d0 = D.strip_norm(eps0)[1]
    result = DetZeroResult(P0, [DetStep(d0, d0, float("nan"), 0.0)])
    if d0 < target:
        return result if full else P0
    rho = rho_parameter(d0, delta)
    result.rho = rho
    if rho > rho_max:
        raise PreconditionFailed("determinant too large for the quadratic scheme",
                                 lemma="zero_determinant",
                                 margins={"rho": rho, "rho_max": rho_max, "det_norm": d0})
    P = P0
    dn = d0
    for _ in range(max_iter):
        a, b, c, d = P.entries
        sol = bezout_solve([a + d, a, d, -b, -c], delta, eps0, C_bez=C_bez, target=1e-10,
                           cost=[scalar_cost, 1, 1, 1, 1], check_budget=False)
        g, Kd, Ka, Kc, Kb = sol
        K = MatrixFunction(g + Ka, Kb, Kc, g + Kd)
        r = bezout_residual([a + d, a, d, -b, -c], sol)
        detK = K.det()
        Dn = D * (-r) + D * D * detK
        P = P - K * D
        P = P.chop(eps=eps0)
        D = Dn.chop(eps=eps0)
        dnew = D.strip_norm(eps0)[1]
        dk = detK.strip_norm(eps0)[1]
        direct = P.det().strip_norm(eps0)[1]
        rn = r.strip_norm(eps0)[1]
        result.trajectory.append(DetStep(dnew, direct, dk, rn))
        # quadratic contraction, plus the (tiny) Bezout residual contribution
        bound = dn * dn * dk * margin + dn * rn * margin
        if dnew > bound:
            raise NoConvergence("determinant failed the per-step contraction",
                                lemma="zero_determinant",
                                margins={"old": dn, "new": dnew, "detK": dk, "bound": bound})
        dn = dnew
        if dn < target:
            result.P = P
            result.displacement = (P - P0).strip_norm(eps0)[1]
            return result if full else P
    raise NoConvergence("determinant did not reach target", lemma="zero_determinant",
                        margins={"det_norm": dn, "target": target, "iterations": max_iter})


# ----------------------------------------------------------------------
# real symmetrisation


def _vec_fit(sampler, hw: float, height: float, antiperiodic: bool, cd, M0: int) -> tuple:
    u0 = fit_lines(lambda y, M: sampler(y, M)[:, 0], hw, antiperiodic=antiperiodic,
                   height=height, dtype=cd, M0=M0)
    u1 = fit_lines(lambda y, M: sampler(y, M)[:, 1], hw, antiperiodic=antiperiodic,
                   height=height, dtype=cd, M0=M0)
    return u0, u1


def _monomial(freq2: int, hw: float, cd) -> StripFunction:
    """``exp(pi i freq2 z)``; antiperiodic when ``freq2`` is odd."""
    anti = freq2 % 2 != 0
    k = (freq2 - 1) // 2 if anti else freq2 // 2
    return StripFunction.from_modes({k: 1.0}, hw, anti, dtype=cd)


def real_symmetrize(w: tuple, delta: float, eps: float, *, tol: float = 1e-9) -> tuple:
    """Rotate ``w`` into a real-on-real field ``phi^{-1/2} w``.

    ``phi = a / conj(a(conj z))`` (equivalently with the second component) is
    evaluated pointwise as a least-squares ratio, written as
    ``exp(2 pi i (d z + chi))`` by :func:`log_branch`, and
    ``w~ = exp(-pi i (d z + chi)) w``.  An odd winding ``d`` toggles the
    parity of the output.
    """
    hw = min(w[0].half_width, w[1].half_width)
    if eps > hw * (1 + 1e-12):
        raise PreconditionFailed("strip wider than the input", lemma="real_symmetrize")
    cd = np.result_type(w[0].dtype, w[1].dtype)
    Ng = max(w[0].N, w[1].N)
    M = max(256, 16 * (Ng + 1))
    vals = vec_line_values(w, 0.0, M).astype(np.complex128)
    nrm2 = np.sum(np.abs(vals) ** 2, axis=-1)
    par = np.abs((vals[:, 0] * np.conj(vals[:, 1])).imag)
    if np.max(par / np.maximum(nrm2, 1e-300)) > max(tol, 1e-7):
        raise NotRealDirection("vector field is not parallel to a real vector on R",
                               lemma="real_symmetrize",
                               margins={"max_ratio": float(np.max(par / nrm2))})
    wr = vec_conj_reflect(w)

    def phi_sampler(y, Mg):
        x = vec_line_values(w, y, Mg)
        xr = vec_line_values(wr, y, Mg)
        num = x[:, 0] * np.conj(xr[:, 0]) + x[:, 1] * np.conj(xr[:, 1])
        den = np.abs(xr[:, 0]) ** 2 + np.abs(xr[:, 1]) ** 2
        return num / den

    phi = fit_lines(phi_sampler, hw, antiperiodic=False, height=hw * (1 - 1e-9), dtype=cd,
                    M0=M, scale=1.0)
    d, chi = log_branch(phi)
    g = chi.apply(lambda v: np.exp(-1j * pi_of(cd) * v), height=hw * (1 - 1e-9))
    mono = _monomial(-d, hw, cd)
    fac = mono * g
    out = (fac * w[0], fac * w[1])
    out = (out[0].real_part_on_real().chop(eps=hw), out[1].real_part_on_real().chop(eps=hw))
    return out


# ----------------------------------------------------------------------
# kernel vectors


@dataclass
class KernelSolution:
    """Analytic kernel vector ``u`` with sampled norm bounds."""

    u: tuple
    norm_floor: float
    norm_ceil: float
    zeros_used: list
    kappa: complex = 0j
    residual: float = 0.0
    route: str = "general"

    @property
    def antiperiodic(self) -> bool:
        return self.u[0].antiperiodic


def _is_zero(f: StripFunction, eps: float, scale: float) -> bool:
    return f.coef_norm(eps) <= 1e-14 * scale


def _poly_from_trig(f: StripFunction) -> np.ndarray:
    """Coefficients (highest first) of ``w^N f`` as a polynomial in ``w = e^{2 pi i z}``."""
    c = f.coeffs
    nz = np.nonzero(np.abs(c) > 0)[0]
    return c[nz[0]:nz[-1] + 1][::-1], nz[0] - f.N


def _winding(vals: np.ndarray, antiperiodic: bool = False) -> float:
    first = -vals[:1] if antiperiodic else vals[:1]
    ang = np.unwrap(np.angle(np.concatenate([vals, first]).astype(np.complex128)))
    return (ang[-1] - ang[0]) / (2 * np.pi)


def _roots_in_strip(n: StripFunction, eps0: float, cd):
    """Zeros of ``n`` in ``|Im z| < eps0`` via companion eigenvalues + Newton."""
    poly, low = _poly_from_trig(n)
    if len(poly) <= 1:
        return np.zeros(0, dtype=cd)
    roots = np.roots(poly.astype(np.complex128))
    # polish only roots near the annulus; far ones overflow and are irrelevant
    lo, hi = math.exp(-2 * math.pi * eps0), math.exp(2 * math.pi * eps0)
    rad = np.abs(roots)
    roots = roots[(rad > lo / 1.1) & (rad < hi * 1.1)].astype(cd)
    pc = poly.astype(cd)
    dpc = np.polyder(pc)
    for _ in range(4):
        step = np.polyval(pc, roots) / np.polyval(dpc, roots)
        roots = roots - step
    rad = np.abs(roots.astype(np.complex128))
    inside = (rad > lo) & (rad < hi)
    r = roots[inside]
    two_pi = 2 * pi_of(cd)
    z = np.log(r) / (1j * two_pi)
    z = z.real - np.floor(z.real) + 1j * z.imag
    return z.astype(cd)


def _line_scores(cols: tuple, kappas: np.ndarray, eps0: float, M: int) -> np.ndarray:
    """Min chordal distance between ``phi = col1/col2`` and each kappa on ``Im z = +-eps0``."""
    (a, c), (b, d) = cols
    best = np.full(len(kappas), np.inf)
    for y in (-eps0, eps0):
        av, cv = a.line_values(y, M).astype(complex), c.line_values(y, M).astype(complex)
        bv, dv = b.line_values(y, M).astype(complex), d.line_values(y, M).astype(complex)
        den = np.sqrt(np.abs(av) ** 2 + np.abs(cv) ** 2 + np.abs(bv) ** 2 + np.abs(dv) ** 2)
        for i, kap in enumerate(kappas):
            num = np.sqrt(np.abs(av - kap * bv) ** 2 + np.abs(cv - kap * dv) ** 2)
            s = np.min(num / den) / math.sqrt(1 + abs(kap) ** 2)
            best[i] = min(best[i], s)
    return best


def _kappa_grid() -> np.ndarray:
    radii = np.array([0.5, 0.58, 0.66, 0.74])
    args = 2 * np.pi * np.arange(16) / 16 + np.pi / 16
    return (radii[:, None] * np.exp(1j * args[None, :])).ravel()


_RHO = (1.0, 0.5 + 0.3j)


def _candidate(P: MatrixFunction, kap: complex, eps0: float, scale: float, cd):
    """Genuine zeros of ``col1' = col1 - kappa col2`` for one kappa, or ``None``."""
    a, b, c, d = P.entries
    a1 = a - kap * b
    c1 = c - kap * d
    n = a1 * _RHO[0] + c1 * _RHO[1]
    if _is_zero(n, eps0, scale):
        n = a1 if not _is_zero(a1, eps0, scale) else c1
    zs = _roots_in_strip(n, eps0, cd)
    # argument principle cross-check on the boundary lines
    M = max(256, 16 * (n.N + 1))
    lo, hi = n.line_values(-eps0, M), n.line_values(eps0, M)
    if min(np.min(np.abs(lo)), np.min(np.abs(hi))) > 1e-10 * scale:
        count = int(round(_winding(lo, n.antiperiodic) - _winding(hi, n.antiperiodic)))
        if count != len(zs):
            return None
    genuine = []
    for z in zs:
        va = complex(a1.eval(z)), complex(c1.eval(z))
        vb = complex((b - np.conj(kap) * a).eval(z)), complex((d - np.conj(kap) * c).eval(z))
        r1 = math.hypot(abs(va[0]), abs(va[1]))
        r2 = math.hypot(abs(vb[0]), abs(vb[1]))
        ratio = r1 / max(r2, 1e-300)
        if ratio < 1e-7:
            genuine.append(z)
        elif ratio < 1e-3:
            return None
    g = np.array(genuine, dtype=cd)
    if len(g) > 1:
        dz = np.abs((g[:, None] - g[None, :]).astype(complex))
        dz = np.minimum(dz, np.abs(dz - 1))
        dz[np.diag_indices(len(g))] = np.inf
        if np.min(dz) < 1e-6:
            return None
    dn = n.derivative()
    dfloor = min([abs(complex(dn.eval(z))) for z in g], default=np.inf)
    dfloor = dfloor / max(n.coef_norm(eps0) * 2 * math.pi * (n.N + 1), 1e-300)
    return g, dfloor


def kernel_vector(P: MatrixFunction, delta: float, eps0: float, eps: float, *,
                  real: bool = False, residual_tol: float = 1e-8,
                  n_top: int = 8) -> KernelSolution:
    """Nowhere-vanishing analytic ``u`` with ``P u = 0`` on ``|Im z| < eps``.

    ``P`` must be rank one (``det P`` at round-off level).  Shortcuts handle
    identically vanishing columns and rows.  Otherwise ``phi = col1 / col2``
    (the common ratio ``a/b = c/d``) is moved by a Mobius map to
    ``(phi - kappa) / (1 - conj(kappa) phi)`` through ``P K`` with
    ``K = [[1, -conj(kappa)], [-kappa, 1]]``; ``kappa`` is chosen on a grid
    to keep ``phi`` away from ``kappa`` on the boundary lines and the zeros
    simple.  With ``u1`` vanishing exactly at the zeros ``z_s`` of the new
    ratio and ``u2 = u1 / phi'``, the vector ``K (-u2, u1)`` spans the kernel.
    With ``real=True`` the result is passed through :func:`real_symmetrize`.
    """
    cd = P.dtype
    hw = P.half_width
    if not eps < eps0 <= hw * (1 + 1e-12):
        raise PreconditionFailed("need eps < eps0 <= half width", lemma="kernel_vector")
    scale = P.strip_norm(eps0)[1]
    a, b, c, d = P.entries
    one = StripFunction.constant(1.0, hw, cd)
    zero = StripFunction.constant(0.0, hw, cd)
    route = "general"
    kap = 0j
    zeros_used: list = []
    u = None
    if _is_zero(a, eps0, scale) and _is_zero(c, eps0, scale):
        u, route = (one, zero), "column1_zero"
    elif _is_zero(b, eps0, scale) and _is_zero(d, eps0, scale):
        u, route = (zero, one), "column2_zero"
    elif _is_zero(c, eps0, scale) and _is_zero(d, eps0, scale):
        u, route = (-b, a), "row2_zero"
    elif _is_zero(a, eps0, scale) and _is_zero(b, eps0, scale):
        u, route = (-d, c), "row1_zero"
    if u is None:
        kappas = _kappa_grid()
        M = max(256, 16 * (P.N + 1))
        scores = _line_scores(((a, c), (b, d)), kappas, eps0, M)
        order = sorted(range(len(kappas)), key=lambda i: (-scores[i], i))
        best = None
        for i in order[:n_top]:
            cand = _candidate(P, complex(kappas[i]), eps0, scale, cd)
            if cand is None:
                continue
            zs, dfloor = cand
            merit = min(scores[i], dfloor)
            if best is None or merit > best[0]:
                best = (merit, i, zs)
        if best is None:
            raise ZeroLocationFailure("no kappa candidate isolates the zeros",
                                      lemma="kernel_vector",
                                      margins={"best_line_score": float(scores.max())})
        _, i, zs = best
        kap = complex(kappas[i])
        zeros_used = [complex(z) for z in zs]
        u = _general_kernel(P, kap, zs, eps0, cd)
    u = tuple(f.with_half_width(min(f.half_width, hw)) for f in u)
    if real:
        floor0 = vec_sampled_min(u, eps)
        u = real_symmetrize(u, max(floor0, 1e-300), eps)
    ceil0 = vec_strip_norm(u, eps)[1]
    u = (u[0] / ceil0, u[1] / ceil0)
    u = (u[0].with_half_width(eps).chop(), u[1].with_half_width(eps).chop())
    res = _kernel_residual(P, u, eps)
    if res > residual_tol * scale:
        raise ResidualTooLarge("kernel residual too large", lemma="kernel_vector",
                               margins={"residual": res, "tol": residual_tol * scale})
    floor, ceil = _norm_bounds(u, eps)
    return KernelSolution(u, floor, ceil, zeros_used, kap, res, route)


def _general_kernel(P: MatrixFunction, kap: complex, zs: np.ndarray, eps0: float, cd) -> tuple:
    a, b, c, d = P.entries
    hw = P.half_width
    ck = np.conj(kap)
    a1, c1 = a - kap * b, c - kap * d
    b1, d1 = b - ck * a, d - ck * c
    w = np.exp(2j * pi_of(cd) * np.asarray(zs, dtype=cd))
    S = len(w)
    poly = np.poly(w).astype(cd) if S else np.ones(1, dtype=cd)
    coef = poly[::-1]
    shift = S // 2
    # coefficients of exp(2 pi i k z) for k = -shift .. S - shift
    N = max(S - shift, shift, 1)
    arr = np.zeros(2 * N + 1, dtype=cd)
    arr[N - shift:N - shift + S + 1] = coef
    u1 = StripFunction(arr, hw)
    u1 = u1 / u1.coef_norm(0.0)

    def u2_sampler(y, Mg):
        v1 = u1.line_values(y, Mg)
        x1 = np.stack([a1.line_values(y, Mg), c1.line_values(y, Mg)], axis=-1)
        x2 = np.stack([b1.line_values(y, Mg), d1.line_values(y, Mg)], axis=-1)
        ratio = np.sum(np.conj(x1) * x2, axis=-1) / np.sum(np.abs(x1) ** 2, axis=-1)
        return v1 * ratio

    u2 = fit_lines(u2_sampler, eps0, height=eps0, dtype=cd,
                   M0=max(256, 16 * (P.N + 1)))
    # kernel of P K is (-u2, u1); kernel of P is K (-u2, u1)
    v0, v1 = -u2, u1
    return (v0 - ck * v1, v1 - kap * v0)


def _kernel_residual(P: MatrixFunction, u: tuple, eps: float) -> float:
    M = max(256, 16 * (max(P.N, u[0].N, u[1].N) + 1))
    worst = 0.0
    for y in (-eps * (1 - 1e-9), 0.0, eps * (1 - 1e-9)):
        Pv = P.line_values(y, M).astype(np.complex128)
        uv = vec_line_values(u, y, M).astype(np.complex128)
        worst = max(worst, float(np.max(np.linalg.norm(np.einsum("gij,gj->gi", Pv, uv),
                                                          axis=-1))))
    return worst


def _norm_bounds(u: tuple, eps: float, n_lines: int = 9) -> tuple[float, float]:
    """Certified-style floor (sampled min minus derivative margin) and ceiling."""
    M = max(256, 16 * (max(u[0].N, u[1].N) + 1))
    smin = vec_sampled_min(u, eps, M, n_lines)
    du = math.hypot(u[0].derivative().coef_norm(eps), u[1].derivative().coef_norm(eps))
    spacing = math.hypot(1.0 / (2 * M), eps / (n_lines - 1))
    floor = max(0.0, smin - du * spacing)
    ceil = vec_strip_norm(u, eps, M)[1]
    return floor, ceil


def floor_model(delta: float, c: float = 1e-2, C: float = 4.0) -> float:
    """Calibrated lower-bound model ``c delta^C`` for kernel vector norms."""
    return c * delta ** C
