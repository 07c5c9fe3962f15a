"""First generalised Laguerre polynomials and the weighted integrals
``I(n, k) = int_0^inf |L^1_n(2t)| e^{-t} t^k dt``.

Evaluation always goes through the three-term recurrence; the explicit
coefficient sum cancels catastrophically and is kept only as a low-degree
reference (:func:`laguerre_explicit`).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaincc, gammaln

from .errors import InputError, NumericalError, RangeError
from .gridfunc import GridFunction
from .semigroup import GrowthFit, fit_power_growth

T_CUT_MAX = 2000.0
NODES = 32
MAX_SEGMENT = 2.0
_RESCALE = 1e150

_gl_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre(m: int) -> tuple[np.ndarray, np.ndarray]:
    if m not in _gl_cache:
        _gl_cache[m] = np.polynomial.legendre.leggauss(m)
    return _gl_cache[m]


def laguerre_eval(n: int, t):
    """``L^1_n(t)`` via ``(m+1) L_{m+1} = (2m+2-t) L_m - (m+1) L_{m-1}``."""
    if n < 0:
        raise InputError("degree must be non-negative")
    t = np.asarray(t, dtype=float)
    prev = np.ones_like(t)
    if n == 0:
        return prev if t.ndim else float(prev)
    cur = 2.0 - t
    for m in range(1, n):
        prev, cur = cur, ((2 * m + 2 - t) * cur - (m + 1) * prev) / (m + 1)
    return cur if t.ndim else float(cur)


def laguerre_explicit(n: int, t):
    """Reference value from the coefficient sum.

    The sum cancels badly in floating point, so it is evaluated in exact
    rational arithmetic and rounded once; meant for small n only.
    """
    coeffs = [Fraction((-1) ** m * math.comb(n + 1, n - m), math.factorial(m)) for m in range(n + 1)]

    def one(x):
        x = Fraction(float(x))
        acc = Fraction(0)
        for c in reversed(coeffs):
            acc = acc * x + c
        return float(acc)

    t = np.asarray(t, dtype=float)
    if not t.ndim:
        return one(t)
    return np.array([one(x) for x in t.ravel()]).reshape(t.shape)


def _scaled_laguerre(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``L^1_n(x) = mant * exp(logscale)`` without overflow."""
    x = np.asarray(x, dtype=float)
    logscale = np.zeros_like(x)
    prev = np.ones_like(x)
    if n == 0:
        return prev, logscale
    cur = 2.0 - x
    for m in range(1, n):
        prev, cur = cur, ((2 * m + 2 - x) * cur - (m + 1) * prev) / (m + 1)
        big = np.abs(cur) > _RESCALE
        if big.any():
            s = np.where(big, np.abs(cur), 1.0)
            cur, prev = cur / s, prev / s
            logscale += np.log(s)
    return cur, logscale


def laguerre_function(n: int, t, rate: float = 1.0):
    """``L^1_n(2t) exp(-rate * t)``, safe for large n and t."""
    t = np.asarray(t, dtype=float)
    mant, logscale = _scaled_laguerre(n, 2 * t)
    return mant * np.exp(logscale - rate * t)


def laguerre_sign(n: int, t) -> np.ndarray:
    """``sign(L^1_n(2t))`` without the exponential factor (no underflow)."""
    mant, _ = _scaled_laguerre(n, 2 * np.asarray(t, dtype=float))
    return np.sign(mant)


def laguerre_roots(n: int) -> np.ndarray:
    """Ascending roots of ``L^1_n``: Jacobi-matrix eigenvalues polished by
    bisection on the recurrence."""
    if n < 1:
        raise InputError("need n >= 1 for roots")
    return _roots_cached(int(n)).copy()


@functools.lru_cache(maxsize=512)
def _roots_cached(n: int) -> np.ndarray:
    m = np.arange(n)
    diag = 2.0 * m + 2.0
    off = np.sqrt(m[1:] * (m[1:] + 1.0))
    approx = np.sort(eigh_tridiagonal(diag, off, eigvals_only=True))
    if n == 1:
        lo, hi = np.array([approx[0] / 2]), np.array([2 * approx[0]])
    else:
        mids = (approx[1:] + approx[:-1]) / 2
        lo = np.concatenate([[approx[0] / 2], mids])
        hi = np.concatenate([mids, [approx[-1] + (approx[-1] - mids[-1])]])

    def sign(x):
        return np.sign(laguerre_function(n, x / 2.0))

    s_lo, s_hi = sign(lo), sign(hi)
    if np.any(s_lo == 0) or np.any(s_hi == 0) or np.any(s_lo == s_hi):
        raise NumericalError(f"Jacobi eigenvalues of L^1_{n} do not bracket sign changes")
    for _ in range(200):
        mid = (lo + hi) / 2
        done = (mid <= lo) | (mid >= hi)
        if done.all():
            break
        s_mid = sign(mid)
        left = s_mid == s_lo
        lo = np.where(left & ~done, mid, lo)
        hi = np.where(~left & ~done, mid, hi)
    else:
        raise NumericalError(f"root bisection for L^1_{n} did not converge")
    roots = (lo + hi) / 2
    roots.flags.writeable = False
    return roots


@dataclass
class QuadratureResult:
    value: complex | float
    abs_error_estimate: float
    segments: int
    t_cut: float = math.nan
    tail_bound: float = 0.0


def _log_tail_bound(n: int, k: int, rate: float, T: float) -> float:
    """log of a bound on ``int_T^inf |L^1_n(2t)| t^k e^{-rate t} dt``.

    Valid once 2T exceeds the largest root, where
    ``|L^1_n(2t)| <= (2t)^n / n!``.
    """
    order = n + k + 1
    q = gammaincc(order, rate * T)
    if q == 0:
        return -math.inf
    return (
        n * math.log(2.0) - gammaln(n + 1) + gammaln(order) + math.log(q) - order * math.log(rate)
    )


def segment_rule(breaks, nodes: int = NODES, max_len: float = MAX_SEGMENT):
    """Composite Gauss-Legendre nodes and weights on the pieces of ``breaks``.

    Each piece is further split into parts no longer than ``max_len``.
    Returns two flat arrays (points, weights).
    """
    breaks = np.asarray(breaks, dtype=float)
    a_list, b_list = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        pieces = max(1, int(math.ceil((b - a) / max_len)))
        edges = np.linspace(a, b, pieces + 1)
        a_list.append(edges[:-1])
        b_list.append(edges[1:])
    a = np.concatenate(a_list)
    b = np.concatenate(b_list)
    half, mid = (b - a) / 2, (b + a) / 2
    x, w = gauss_legendre(nodes)
    pts = mid[:, None] + half[:, None] * x[None, :]
    wts = half[:, None] * w[None, :]
    return pts.ravel(), wts.ravel()


def _segmented(func, breaks: np.ndarray, nodes: int = NODES, max_len: float = MAX_SEGMENT):
    """Integrate ``func`` with :func:`segment_rule`; the error estimate compares
    ``nodes`` with a rule of 3/4 as many nodes."""
    totals = []
    for m in (nodes, (3 * nodes) // 4):
        pts, wts = segment_rule(breaks, m, max_len)
        totals.append(np.tensordot(wts, func(pts), axes=(0, 0)))
    return totals[0], float(np.max(np.abs(totals[0] - totals[1])))


def _truncated_integral(func, n_poly: int, k: int, rate: float, rel: float, abs_floor: float = 0.0):
    """Integrate ``func`` over [0, T_cut] with breaks at the roots of L^1_n(2t).

    T_cut starts at (largest root) + 40 and doubles until the analytic tail
    bound drops below ``rel * |value| + abs_floor``.
    """
    roots = laguerre_roots(n_poly) / 2.0 if n_poly >= 1 else np.zeros(0)
    T = (roots[-1] if roots.size else 0.0) + 40.0
    while True:
        breaks = np.concatenate([[0.0], roots, [T]])
        value, err = _segmented(func, breaks)
        log_tail = _log_tail_bound(n_poly, k, rate, T)
        tail = math.exp(log_tail) if log_tail > -700 else 0.0
        if tail <= rel * abs(value) + abs_floor:
            return QuadratureResult(value, err + tail, roots.size + 1, T, tail)
        T *= 2
        if T > T_CUT_MAX:
            raise RangeError(f"tail bound not reached below t_cut_max={T_CUT_MAX}")


def weighted_abs_integral(n: int, k: int) -> QuadratureResult:
    """``int_0^inf |L^1_n(2t)| e^{-t} t^k dt`` on sign-constant segments."""
    if n < 0 or k < 0:
        raise InputError("n and k must be non-negative")

    def integrand(t):
        return np.abs(laguerre_function(n, t)) * t**k

    res = _truncated_integral(integrand, n, k, 1.0, rel=1e-9)
    res.value = float(res.value)
    return res


def laplace_transform(n: int, s: complex) -> QuadratureResult:
    """``int_0^inf -2 L^1_{n-1}(2t) e^{-t} e^{-st} dt`` for Re s > -1."""
    if n < 1:
        raise InputError("need n >= 1")
    s = complex(s)
    if not s.real > -1:
        raise InputError("need Re s > -1")
    rate = 1.0 + s.real

    def integrand(t):
        return -2.0 * laguerre_function(n - 1, t, rate) * np.exp(-1j * s.imag * t)

    return _truncated_integral(integrand, n - 1, 0, rate, rel=1e-13, abs_floor=1e-14)


def laplace_closed_form(n: int, s: complex) -> complex:
    s = complex(s)
    return ((s - 1) / (s + 1)) ** n - 1


def laplace_identity_residual(n: int, s: complex) -> float:
    return float(abs(laplace_transform(n, s).value - laplace_closed_form(n, s)))


def carlson_ratio(f: GridFunction) -> float:
    """``||f||_1 / (2 sqrt(||f||_2 ||t f||_2))`` with trapezoidal norms."""
    t = f.t
    a = np.abs(f.values)
    l1 = np.trapezoid(a, dx=f.step)
    l2 = math.sqrt(np.trapezoid(a**2, dx=f.step))
    tl2 = math.sqrt(np.trapezoid((t * a) ** 2, dx=f.step))
    denom = 2.0 * math.sqrt(l2 * tl2)
    if denom == 0:
        raise InputError("Carlson ratio undefined for the zero function")
    return float(l1 / denom)


def laguerre_test_function(n: int, k: int, step: float = 1 / 64, t_max: float | None = None) -> GridFunction:
    """``L^1_{n-1}(2t) e^{-t} t^k`` sampled far enough out for negligible tail."""
    if t_max is None:
        t_max = 2.0 * n + 60.0 + 10.0 * k
        t_max = step * math.ceil(t_max / step)
    return GridFunction.sample(lambda t: laguerre_function(n - 1, t) * t**k, step, t_max)


def integral_sweep(k: int, n_values, jobs: int = 1) -> list[QuadratureResult]:
    n_values = [int(n) for n in n_values]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(weighted_abs_integral, n_values, [k] * len(n_values)))
    return [weighted_abs_integral(n, k) for n in n_values]


def asymptotic_fit(n_values, results, window=None) -> GrowthFit:
    return fit_power_growth(np.asarray(n_values, dtype=float), [r.value for r in results], window)


def asymptotic_exponent(k: int, n_range, window=None, jobs: int = 1) -> GrowthFit:
    """Fitted exponent of ``I(n, k)`` over ``n_range``; expected ``k + 1/2``."""
    ns = np.asarray(list(n_range), dtype=int)
    if ns.size < 20 or ns.max() < 100:
        raise InputError("n_range needs at least 20 values reaching n >= 100")
    return asymptotic_fit(ns, integral_sweep(k, ns, jobs), window)
