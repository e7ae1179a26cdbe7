"""Acceptance criteria 1-8.

Each test records a one-line PASS/FAIL summary (printed in the pytest
terminal summary, and directly when this file is run as a script) and then
asserts the criterion at its stated tolerance.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from arcocycle.cocycle import (GOLDEN, almost_mathieu, classify, constant_cocycle, iterate,
                               lyapunov, rotation_cocycle, schrodinger)
from arcocycle.corona import kernel_vector, zero_determinant
from arcocycle.reducer import (ReductionConfig, dft_family, factor_multiplier,
                               factorization_error, parseval_error, reduce,
                               transfer_to_irrational, wk_identity_error)
from arcocycle.strip import MatrixFunction, StripFunction, vec_line_values
from oracles import amo_lyapunov

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:       # run as a script
    ACCEPTANCE_LINES = {}

HW = 0.25
_REDUCED: list = []       # (label, result) of every successful reduce, for criterion 8


def report(k: int, ok: bool, detail: str) -> None:
    line = f"ACCEPTANCE {k}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[k] = line
    print(line)


def _reduce(label, c, cfg=None):
    r = reduce(c, cfg)
    _REDUCED.append((label, r))
    return r


def _random_cocycle(rng, q, N=2, amp=0.4):
    modes = {}
    for k in range(1, N + 1):
        c = complex(*rng.standard_normal(2)) * amp / k
        modes[k], modes[-k] = c, np.conj(c)
    p = {5: 2, 8: 3, 13: 5}[q]
    v = StripFunction.from_modes(modes, HW)
    return schrodinger(v, float(rng.uniform(-1, 1)), Fraction(p, q))


# ----------------------------------------------------------------------


def test_1_exact_identities():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    wk_err = pars_err = 0.0
    for q in (5, 8, 13):
        for _ in range(2):
            c = _random_cocycle(rng, q)
            p = c.pq[0]
            As = iterate(c, q, keep_all=True)
            for l in (0, 1):
                pars_err = max(pars_err, parseval_error(As, q, l))
                Ws = dft_family(As, q, l)
                for k in range(q):
                    wk_err = max(wk_err, wk_identity_error(Ws[k], c.map, As[q], p, q, k, l))
    fac_err = 0.0
    pqs = [(1, 5), (2, 5), (3, 8), (5, 13), (8, 21)]
    for i in range(100):
        N = 3
        c = (rng.standard_normal(2 * N + 1) + 1j * rng.standard_normal(2 * N + 1)) * 0.2
        c /= (1 + np.abs(np.arange(-N, N + 1))) ** 2
        g = StripFunction(c, HW)
        mu = StripFunction.from_callable(lambda z: np.exp(2j * np.pi * g(z)), 0.08)
        p, q = pqs[i % len(pqs)]
        psi, theta, phi = factor_multiplier(mu, p, q, return_phi=True)
        fac_err = max(fac_err, factorization_error(phi, psi, theta, p, q))
    dt = time.perf_counter() - t0
    ok = wk_err < 1e-9 and pars_err < 1e-9 and fac_err < 1e-10 and dt < 5
    report(1, ok, f"Wk={wk_err:.1e} Parseval={pars_err:.1e} factor={fac_err:.1e} "
                  f"time={dt:.1f}s")
    assert wk_err < 1e-9 and pars_err < 1e-9
    assert fac_err < 1e-10
    assert dt < 5


def test_2_quadratic_determinant_signature():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    one = StripFunction.constant(1.0, 0.1)
    lo, hi = np.inf, -np.inf
    for _ in range(50):
        eta = 10 ** rng.uniform(-3, -1.5)
        ph = rng.uniform(0, 1, 3)

        def trig(a, phase, const=0.0):
            e = a * np.exp(2j * np.pi * phase)
            return StripFunction.from_modes({0: const, 1: e, -1: np.conj(e)}, 0.1)

        P0 = MatrixFunction(one, trig(0.5, ph[0]) * eta, trig(0.5, ph[1]) * eta,
                            trig(0.3, ph[2], rng.uniform(0.5, 1.5)) * eta ** 2)
        res = zero_determinant(P0, 0.5, 0.05, full=True)
        ratios = res.ratios()[1:] if len(res.ratios()) > 1 else res.ratios()
        lo, hi = min(lo, min(ratios)), max(hi, max(ratios))
    dt = time.perf_counter() - t0
    ok = 1.7 <= lo and hi <= 2.3 and dt < 5
    report(2, ok, f"ratio range [{lo:.4f}, {hi:.4f}] time={dt:.1f}s")
    assert 1.7 <= lo and hi <= 2.3
    assert dt < 5


def test_3_kernel_oracle():
    t0 = time.perf_counter()
    hw, eps0, eps = 0.1, 0.05, 0.04
    rng = np.random.default_rng(11)

    def rvec():
        out = []
        for _ in range(2):
            c = rng.standard_normal(5) + 1j * rng.standard_normal(5)
            c /= (1 + np.abs(np.arange(-2, 3))) ** 2
            out.append(StripFunction(c, hw).real_part_on_real())
        return out

    worst_res = worst_orth = 0.0
    M = 256
    for _ in range(50):
        v, w = rvec(), rvec()
        P = MatrixFunction(v[0] * w[0], v[0] * w[1], v[1] * w[0], v[1] * w[1])
        P = P / P.strip_norm(eps0)[1]
        k = kernel_vector(P, P.sampled_min_norm(eps0), eps0, eps)
        worst_res = max(worst_res, k.residual)
        for y in np.linspace(-eps, eps, 5) * (1 - 1e-9):
            uv = vec_line_values(k.u, y, M)
            wv = vec_line_values(w, y, M)
            rel = np.abs(np.sum(uv * wv, -1)) / (np.linalg.norm(uv, axis=-1)
                                                  * np.linalg.norm(wv, axis=-1))
            worst_orth = max(worst_orth, float(np.max(rel)))
    sp = StripFunction.from_callable(lambda z: np.sin(np.pi * z) * np.cos(np.pi * z), hw)
    s2 = StripFunction.from_callable(lambda z: np.sin(np.pi * z) ** 2, hw)
    c2 = StripFunction.from_callable(lambda z: np.cos(np.pi * z) ** 2, hw)
    kr = kernel_vector(MatrixFunction(-sp, -s2, c2, sp), 0.5, eps0, eps, real=True)
    dt = time.perf_counter() - t0
    ok = worst_res < 1e-8 and worst_orth < 1e-7 and kr.antiperiodic and dt < 10
    report(3, ok, f"residual={worst_res:.1e} orthogonality={worst_orth:.1e} "
                  f"antiperiodic={kr.antiperiodic} time={dt:.1f}s")
    assert worst_res < 1e-8 and worst_orth < 1e-7
    assert kr.antiperiodic
    assert dt < 10


def test_4_constant_closed_forms():
    t0 = time.perf_counter()
    r1 = _reduce("rotation", rotation_cocycle(0.1, Fraction(3, 7)))
    x = np.linspace(0, 1, 64)
    Bv = r1.B(x)
    B_dev = float(np.max(np.abs(Bv - Bv[0])))
    h = 0.3
    r2 = _reduce("diag", constant_cocycle(np.diag([math.exp(h), math.exp(-h)]), Fraction(3, 7)))
    gamma = np.exp(2j * np.pi * r2.theta(x))
    g_err = float(np.max(np.abs(gamma - math.exp(h))))
    dt = time.perf_counter() - t0
    ok = (r1.case == "elliptic" and r1.residual < 1e-10 and B_dev < 1e-8
          and r2.case == "hyperbolic" and g_err < 1e-8 and dt < 1)
    report(4, ok, f"rotation residual={r1.residual:.1e} B-const={B_dev:.1e}; "
                  f"diag case={r2.case} gamma err={g_err:.1e} time={dt:.2f}s")
    assert r1.case == "elliptic" and r1.residual < 1e-10 and B_dev < 1e-8
    assert r2.case == "hyperbolic" and g_err < 1e-8
    assert dt < 1


def test_5_residual_decay_along_convergents():
    t0 = time.perf_counter()
    cfg = ReductionConfig.from_eps0(0.05, precision="extended")
    rows = []
    for p, q in [(34, 55), (55, 89), (89, 144)]:
        r = _reduce(f"amo {p}/{q}", almost_mathieu(0.5, 0.0, Fraction(p, q)), cfg)
        rows.append((q, r.case, r.residual))
    dt = time.perf_counter() - t0
    cases_ok = all(case == "elliptic" for _, case, _ in rows)
    res = [r for _, _, r in rows]
    decreasing = all(res[i + 1] < res[i] for i in range(len(res) - 1))
    tenfold = res[2] < res[0] / 10
    ok = cases_ok and decreasing and tenfold and dt < 300
    detail = " ".join(f"q={q}:{case}:{r:.2e}" for q, case, r in rows)
    report(5, ok, f"{detail} elliptic={cases_ok} decreasing={decreasing} "
                  f"r144<r55/10={tenfold} time={dt:.0f}s")
    assert cases_ok, "q=144 has trace mean 2 (parabolic dispatch)"
    assert decreasing
    assert tenfold
    assert dt < 300


def test_6_lyapunov_fixtures():
    t0 = time.perf_counter()
    L_diag = lyapunov(constant_cocycle(np.diag([2.0, 0.5]), GOLDEN), 0.0, 1000)
    L_amo = lyapunov(almost_mathieu(2.0, 0.0, GOLDEN), 0.0, 10 ** 4)
    L_ref = amo_lyapunov(2.0, 0.0, GOLDEN, 10 ** 5)
    grid = [0.0, 0.02, 0.04, 0.06]
    sup = classify(almost_mathieu(2.0, 0.0, GOLDEN), grid, 2000).classification
    sub = classify(almost_mathieu(0.5, 0.0, GOLDEN), grid, 2000).classification
    dt = time.perf_counter() - t0
    ok = (abs(L_diag - math.log(2)) < 1e-10 and abs(L_amo - 0.693) < 0.02
          and abs(L_amo - L_ref) < 0.02 and sup == "supercritical" and sub == "subcritical"
          and dt < 120)
    report(6, ok, f"diag={L_diag - math.log(2):.1e} amo={L_amo:.4f} oracle={L_ref:.4f} "
                  f"classify={sup}/{sub} time={dt:.0f}s")
    assert abs(L_diag - math.log(2)) < 1e-10
    assert abs(L_amo - 0.693) < 0.02 and abs(L_amo - L_ref) < 0.02
    assert sup == "supercritical" and sub == "subcritical"
    assert dt < 120


def test_7_transfer_bound_monotone():
    t0 = time.perf_counter()
    bounds = []
    for p, q in [(34, 55), (55, 89)]:
        c = almost_mathieu(0.5, 0.0, Fraction(p, q))
        r = _reduce(f"amo {p}/{q} (double)", c)
        bounds.append(transfer_to_irrational(r, c.map, "golden", 0.03))
    dt = time.perf_counter() - t0
    ok = bounds[1] < bounds[0] and dt < 300
    report(7, ok, f"bound(55)={bounds[0]:.3e} bound(89)={bounds[1]:.3e} time={dt:.0f}s")
    assert bounds[1] < bounds[0]
    assert dt < 300


def test_8_trace_invariance():
    t0 = time.perf_counter()
    # add hyperbolic and parabolic runs so every case is represented
    _reduce("amo E=3.2 8/13", almost_mathieu(0.5, 3.2, Fraction(8, 13)),
            ReductionConfig(delta1_max=2.0))
    _reduce("rotation 2/7 at 3/7", rotation_cocycle(2 / 7, Fraction(3, 7)))
    _reduce("rotation 3/14 at 3/7", rotation_cocycle(3 / 14, Fraction(3, 7)))
    worst = max((r.diagnostics["trace_check"], label) for label, r in _REDUCED)
    cases = sorted({r.case for _, r in _REDUCED})
    dt = time.perf_counter() - t0
    ok = worst[0] < 1e-8 and dt < 30
    report(8, ok, f"{len(_REDUCED)} runs, cases={cases}, worst={worst[0]:.1e} ({worst[1]}) "
                  f"time={dt:.1f}s")
    assert worst[0] < 1e-8
    assert dt < 30


if __name__ == "__main__":
    for fn in [test_1_exact_identities, test_2_quadratic_determinant_signature,
               test_3_kernel_oracle, test_4_constant_closed_forms,
               test_5_residual_decay_along_convergents, test_6_lyapunov_fixtures,
               test_7_transfer_bound_monotone, test_8_trace_invariance]:
        try:
            fn()
        except AssertionError:
            pass
