"""Grid model of the left-shift semigroup on C_0([0, inf)), its (k+1)-block
Jordan extension, and cogenerator powers computed from the Laguerre integral
representation ``V^n h = h - 2 int L^1_{n-1}(2t) e^{-t} T(t) h dt``.

Quadrature nodes never land on the grid exactly. Each node's weight is split
between its two neighbouring grid points (linear interpolation of ``h``), so
the shift itself is only ever applied by whole cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft

from .cogenerator import cayley
from .config import DEFAULTS, Tolerances
from .errors import AlignmentError, InputError, RangeError, ResolutionError
from .gridfunc import GridFunction, grid_points
from .laguerre import (
    NODES,
    T_CUT_MAX,
    _log_tail_bound,
    laguerre_function,
    laguerre_roots,
    laguerre_sign,
    segment_rule,
    weighted_abs_integral,
)
from .matrix_core import as_cmatrix, eigenvalues
from .report import CheckReport
from .semigroup import GrowthFit, fit_power_growth, semigroup_stack

DEFAULT_STEP = 1 / 256
DEFAULT_T_MAX = 400.0


@dataclass(frozen=True)
class VectorFunction:
    """``k+1`` grid functions on a common grid; norm is the max of sup-norms."""

    blocks: tuple[GridFunction, ...]

    def __post_init__(self) -> None:
        blocks = tuple(self.blocks)
        if not blocks:
            raise InputError("a vector function needs at least one block")
        step, size = blocks[0].step, blocks[0].values.size
        for b in blocks[1:]:
            if b.step != step or b.values.size != size:
                raise InputError("all blocks must share one grid")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_arrays(cls, step: float, arrays) -> "VectorFunction":
        return cls(tuple(GridFunction(step, np.asarray(a)) for a in arrays))

    @property
    def step(self) -> float:
        return self.blocks[0].step

    @property
    def size(self) -> int:
        return self.blocks[0].values.size

    @property
    def k(self) -> int:
        return len(self.blocks) - 1

    @property
    def t(self) -> np.ndarray:
        return self.blocks[0].t

    def norm(self) -> float:
        return max(b.sup_norm() for b in self.blocks)

    def stack(self) -> np.ndarray:
        return np.stack([b.values for b in self.blocks])


def _cells(t: float, step: float) -> int:
    if t < 0:
        raise InputError(f"shift must be non-negative, got {t}")
    m = int(round(t / step))
    if abs(m * step - t) > 1e-9 * max(1.0, t):
        raise AlignmentError(f"shift {t} is not a multiple of the grid step {step}")
    return m


def _shift_values(values: np.ndarray, m: int) -> np.ndarray:
    out = np.zeros_like(values)
    if m < values.size:
        out[: values.size - m] = values[m:]
    return out


def left_shift(f: GridFunction, t: float) -> GridFunction:
    """``(T_0(t) f)(eta) = f(t + eta)``; points past the grid end read as 0."""
    return GridFunction(f.step, _shift_values(f.values, _cells(t, f.step)))


def jordan_apply(k: int, t: float, h: VectorFunction) -> VectorFunction:
    """Upper-triangular Jordan semigroup: block i gets
    ``sum_{j >= i} t^(j-i)/(j-i)! T_0(t) h_j``."""
    if len(h.blocks) != k + 1:
        raise InputError(f"expected {k + 1} blocks, got {len(h.blocks)}")
    m = _cells(t, h.step)
    shifted = [_shift_values(b.values, m) for b in h.blocks]
    out = []
    for i in range(k + 1):
        acc = np.zeros_like(shifted[i])
        for j in range(i, k + 1):
            acc = acc + (t ** (j - i) / math.factorial(j - i)) * shifted[j]
        out.append(acc)
    return VectorFunction.from_arrays(h.step, out)


def plateau(step: float, t_max: float, width: float) -> GridFunction:
    """1 on [0, width], linear down to 0 over one unit, 0 afterwards."""
    return GridFunction.sample(lambda t: np.clip(width + 1.0 - t, 0.0, 1.0), step, t_max)


def semigroup_norm_estimate(k: int, t_grid, step: float = DEFAULT_STEP) -> np.ndarray:
    """Lower estimates of ``||T(t)||`` from the unit witness ``(0, .., 0, plateau)``."""
    ts = np.asarray(t_grid, dtype=float)
    t_max = step * math.ceil((ts.max() + 2.0) / step)
    bump = plateau(step, t_max, ts.max())
    zero = GridFunction(step, np.zeros_like(bump.values))
    h = VectorFunction((zero,) * k + (bump,))
    return np.array([jordan_apply(k, t, h).norm() / h.norm() for t in ts])


def semigroup_growth(k: int, t_grid=None, step: float = DEFAULT_STEP) -> GrowthFit:
    ts = np.arange(1, 41) * 1.0 if t_grid is None else np.asarray(t_grid, dtype=float)
    return fit_power_growth(ts, semigroup_norm_estimate(k, ts, step))


def _grid_for(step: float, t_max: float) -> np.ndarray:
    return grid_points(step, t_max)


def sign_test_vector(n: int, k: int, step: float = DEFAULT_STEP, t_max: float = DEFAULT_T_MAX) -> VectorFunction:
    """``(0, .., 0, sign(L^1_{n-1}(2 eta)))`` sampled on the grid."""
    if n < 1:
        raise InputError("need n >= 1")
    eta = _grid_for(step, t_max)
    last = laguerre_sign(n - 1, eta)
    return VectorFunction.from_arrays(step, [np.zeros_like(last)] * k + [last])


def smooth_test_vector(
    n: int,
    k: int,
    eps: float,
    step: float = DEFAULT_STEP,
    t_max: float = DEFAULT_T_MAX,
    taper: float | None = None,
) -> VectorFunction:
    """Continuous version of :func:`sign_test_vector`.

    The sign is multiplied by ``min(1, dist(eta, roots) / (eps/2))`` and by a
    linear taper that starts at ``taper`` (default 0.9 t_max) and reaches 0 at
    0.95 t_max, so the last 5% of the grid is exactly zero.
    """
    if eps < step:
        raise ResolutionError(f"eps={eps} is below the grid step {step}")
    eta = _grid_for(step, t_max)
    sign = laguerre_sign(n - 1, eta)
    if n >= 2:
        roots = laguerre_roots(n - 1) / 2.0
        idx = np.clip(np.searchsorted(roots, eta), 1, roots.size)
        dist = np.minimum(
            np.abs(eta - roots[idx - 1]),
            np.abs(eta - roots[np.minimum(idx, roots.size - 1)]),
        )
        sign = sign * np.minimum(1.0, dist / (eps / 2.0))
    start = 0.9 * t_max if taper is None else float(taper)
    end = 0.95 * t_max
    if not start < end:
        raise InputError("taper must start before 0.95 * t_max")
    last = sign * np.clip((end - eta) / (end - start), 0.0, 1.0)
    return VectorFunction.from_arrays(step, [np.zeros_like(last)] * k + [last])


@dataclass
class KernelInfo:
    nodes: int
    t_cut: float
    tail_bound: float


def _kernels(n: int, k: int, step: float, size: int, nodes: int = NODES):
    """Grid kernels ``K_d`` with ``sum_l K_d[l] h[l + m] ~ int g_d(t) h(t + m step) dt``
    where ``g_d(t) = L^1_{n-1}(2t) e^{-t} t^d / d!``."""
    t_cut = step * (size - 1)
    roots = laguerre_roots(n - 1) / 2.0 if n >= 2 else np.zeros(0)
    roots = roots[roots < t_cut]
    pts, wts = segment_rule(np.concatenate([[0.0], roots, [t_cut]]), nodes)
    base = wts * laguerre_function(n - 1, pts)
    pos = pts / step
    cell = np.minimum(np.floor(pos).astype(int), size - 1)
    frac = pos - cell
    kernels = []
    for d in range(k + 1):
        w = base * pts**d / math.factorial(d)
        K = np.bincount(cell, w * (1 - frac), minlength=size + 1)
        K += np.bincount(cell + 1, w * frac, minlength=size + 1)
        kernels.append(K[:size])  # weight past the last point multiplies h = 0
    log_tail = _log_tail_bound(n - 1, k, 1.0, t_cut)
    tail = math.exp(log_tail) if log_tail > -700 else 0.0
    return kernels, KernelInfo(pts.size, t_cut, tail)


def cogen_power_apply(
    n: int, h: VectorFunction, *, nodes: int = NODES, tail_tol: float = 1e-9
) -> VectorFunction:
    """``V^n h`` for the Jordan shift semigroup, on the whole grid at once.

    The integral against every shift of ``h`` is a correlation with a grid
    kernel, done by FFT.
    """
    if n < 1:
        raise InputError("need n >= 1")
    k, size, step = h.k, h.size, h.step
    kernels, info = _kernels(n, k, step, size, nodes)
    if info.tail_bound > tail_tol:
        raise RangeError(
            f"grid end {info.t_cut} too short for n={n}: tail bound {info.tail_bound:.3g}"
        )
    H = h.stack()
    is_complex = np.iscomplexobj(H)
    nfft = sfft.next_fast_len(2 * size - 1, real=not is_complex)
    fwd, inv = (sfft.fft, sfft.ifft) if is_complex else (sfft.rfft, sfft.irfft)
    H_hat = fwd(H, nfft, axis=-1)
    K_hat = [fwd(K[::-1], nfft) for K in kernels]
    out = []
    for i in range(k + 1):
        acc = sum(K_hat[d] * H_hat[i + d] for d in range(k + 1 - i))
        corr = inv(acc, nfft)[size - 1 : 2 * size - 1]
        out.append(H[i] - 2.0 * corr)
    return VectorFunction.from_arrays(step, out)


def cogen_power_matrix(n: int, A, *, nodes: int = NODES, tol: Tolerances = DEFAULTS) -> np.ndarray:
    """``V^n = I - 2 int L^1_{n-1}(2t) e^{-t} exp(tA) dt`` for a stable matrix ``A``.

    The cut-off doubles until the integral over ``[T, 2T]`` is below 1e-13.
    """
    A = as_cmatrix(A)
    if n < 1:
        raise InputError("need n >= 1")
    if np.max(eigenvalues(A).real) >= 1.0:
        raise InputError("the integral diverges unless every eigenvalue has Re < 1")
    roots = laguerre_roots(n - 1) / 2.0 if n >= 2 else np.zeros(0)

    def integrate(breaks):
        pts, wts = segment_rule(breaks, nodes)
        E = semigroup_stack(A, pts, tol=tol)
        return np.tensordot(wts * laguerre_function(n - 1, pts), E, axes=(0, 0))

    T = (roots[-1] if roots.size else 0.0) + 40.0
    total = integrate(np.concatenate([[0.0], roots, [T]]))
    while True:
        extra = integrate(np.array([T, 2 * T]))
        total = total + extra
        if np.abs(extra).max() <= 1e-13:
            break
        T *= 2
        if T > T_CUT_MAX:
            raise RangeError("matrix Laguerre integral did not settle")
    return np.eye(A.shape[0]) - 2.0 * total


def matrix_crosscheck(A, n_max: int = 20) -> float:
    """Max over n <= n_max of ``||quadrature V^n - cayley(A)^n||_max``."""
    V = cayley(A)
    P = np.eye(V.shape[0], dtype=complex)
    worst = 0.0
    for n in range(1, n_max + 1):
        P = P @ V
        worst = max(worst, float(np.abs(cogen_power_matrix(n, A) - P).max()))
    return worst


@dataclass
class ShiftRow:
    n: int
    k: int
    vn_h_norm: float
    first_component_at_0: float
    laguerre_lower_bound: float


def lower_bound_row(n: int, k: int, h: VectorFunction | None = None, **grid) -> ShiftRow:
    h = sign_test_vector(n, k, **grid) if h is None else h
    v = cogen_power_apply(n, h)
    bound = 2.0 / math.factorial(k) * weighted_abs_integral(n - 1, k).value
    return ShiftRow(n, k, v.norm(), float(np.real(v.blocks[0].values[0])), bound)


def lower_bound_check(n: int, k: int, rel: float = 1e-2, **grid) -> CheckReport:
    """Compare ``(V^n h)_1(0)`` for the sign vector with the Laguerre integral.

    The first block of ``h`` at 0 is 0 for k >= 1 and 1 for k = 0, so the
    predicted value is ``h_1(0) - (2/k!) I(n-1, k)``.
    """
    if n < 1:
        raise InputError("need n >= 1")
    h = sign_test_vector(n, k, **grid)
    row = lower_bound_row(n, k, h)
    h0 = float(h.blocks[0].values[0])
    predicted = h0 - row.laguerre_lower_bound
    err = abs(row.first_component_at_0 - predicted)
    floor = (1 - rel) * (row.laguerre_lower_bound - abs(h0))
    passed = err <= rel * row.laguerre_lower_bound and row.vn_h_norm >= floor
    details = {
        "predicted": predicted,
        "first_component_at_0": row.first_component_at_0,
        "norm": row.vn_h_norm,
        "laguerre_lower_bound": row.laguerre_lower_bound,
        "abs_error": err,
    }
    margin = 1.0 - err / (rel * row.laguerre_lower_bound)
    return CheckReport(passed, n, margin, None if passed else details, True, details)


def sharpness_sweep(k: int, n_values, jobs: int = 1, **grid) -> list[ShiftRow]:
    n_values = [int(n) for n in n_values]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        from functools import partial

        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(partial(lower_bound_row, k=k, **grid), n_values))
    return [lower_bound_row(n, k, **grid) for n in n_values]


def sharpness_exponent(rows: list[ShiftRow], window=None) -> GrowthFit:
    return fit_power_growth([r.n for r in rows], [r.vn_h_norm for r in rows], window)
