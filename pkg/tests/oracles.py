"""Independent reference computations used by the tests.

None of these helpers call into the package; they work from closed forms,
dense sampling, or plain per-point iteration.
"""

from __future__ import annotations

import numpy as np


def trig_eval(coeffs: np.ndarray, z, offset: float = 0.0) -> np.ndarray:
    """Direct summation of ``sum_k c_k exp(2 pi i (k + offset) z)`` for k=-N..N."""
    N = (len(coeffs) - 1) // 2
    z = np.asarray(z, dtype=complex)
    k = np.arange(-N, N + 1) + offset
    return np.exp(2j * np.pi * np.multiply.outer(z, k)) @ coeffs


def dense_sup(func, eps: float, M: int = 4096, n_lines: int = 9) -> float:
    """Max of ``|func|`` over a dense grid of the closed strip ``|Im z| <= eps``."""
    x = np.arange(M) / M
    best = 0.0
    for y in np.linspace(-eps, eps, n_lines):
        best = max(best, float(np.max(np.abs(func(x + 1j * y)))))
    return best


def amo_lyapunov(lam: float, E: float, alpha: float, n: int, grid: int = 64,
                 seed: int = 0) -> float:
    """Growth rate of a transfer-matrix vector orbit, averaged over phases.

    The vector ``(u_{k+1}, u_k)`` is iterated with the recursion
    ``u_{k+1} = (E - 2 lam cos 2 pi (x + k alpha)) u_k - u_{k-1}`` and
    renormalised every step; its growth rate converges to the exponent for
    almost every start.
    """
    rng = np.random.default_rng(seed)
    x = (np.arange(grid) + 0.5) / grid
    u1 = rng.standard_normal(grid)
    u0 = rng.standard_normal(grid)
    acc = np.zeros(grid)
    for k in range(n):
        v = E - 2 * lam * np.cos(2 * np.pi * (x + k * alpha))
        u1, u0 = v * u1 - u0, u1
        r = np.hypot(u1, u0)
        acc += np.log(r)
        u1 /= r
        u0 /= r
    return float(np.mean(acc) / n)


def fibonacci(n: int) -> list[int]:
    out = [1, 1]
    while len(out) < n:
        out.append(out[-1] + out[-2])
    return out[:n]


def rotation(t: float) -> np.ndarray:
    c, s = np.cos(2 * np.pi * t), np.sin(2 * np.pi * t)
    return np.array([[c, -s], [s, c]])
