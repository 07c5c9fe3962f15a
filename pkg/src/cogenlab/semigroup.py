"""Matrix semigroup trajectories, growth fits and grid-based criterion checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .config import DEFAULTS, Tolerances
from .errors import BracketError, InputError
from .matrix_core import (
    INF,
    as_cmatrix,
    check_p,
    eigenvalues,
    mat_exp,
    op_p_norm_estimate,
    resolvent,
    vec_p_norm,
)
from .report import CheckReport


def default_t_grid(t_max: float = 20.0) -> np.ndarray:
    """Hybrid time grid on [0, t_max].

    A log-spaced micro prefix and a 1e-3 step prefix on [0, 0.1] resolve the
    sign of the initial derivative; geometric plus linear points cover the rest.
    """
    parts = [
        [0.0],
        np.geomspace(1e-8, 1e-3, 41),
        np.linspace(0.0, 0.1, 101),
        np.geomspace(0.1, t_max, 100),
        np.linspace(0.1, t_max, 100),
    ]
    return np.unique(np.concatenate(parts))


def refine_grid(grid: Sequence[float]) -> np.ndarray:
    """Insert the midpoint of every interval (halves each step)."""
    g = np.asarray(grid, dtype=float)
    return np.unique(np.concatenate([g, (g[1:] + g[:-1]) / 2]))


@dataclass
class SemigroupProfile:
    generator: np.ndarray
    norm: float
    t_grid: np.ndarray
    norms: np.ndarray
    growth_bound: float
    exact: bool = True
    witnesses: list = field(default_factory=list, repr=False)
    operators: np.ndarray | None = field(default=None, repr=False)


def semigroup_stack(A, ts, *, tol: Tolerances = DEFAULTS) -> np.ndarray:
    """``exp(t A)`` for every ``t`` in ``ts`` as one batched computation.

    Arguments beyond the mat_exp range are scaled down by a power of two and
    squared back up.
    """
    A = as_cmatrix(A)
    ts = np.asarray(ts, dtype=float)
    norms = ts * float(np.abs(A).sum(axis=0).max())
    over = norms > tol.max_exp_norm
    s = np.zeros(ts.shape, dtype=int)
    s[over] = np.ceil(np.log2(norms[over] / tol.max_exp_norm)).astype(int)
    E = mat_exp(A, ts / 2.0**s, tol=tol)
    for j in range(int(s.max(initial=0))):
        mask = s > j
        E[mask] = E[mask] @ E[mask]
    return E


def trajectory(A, p, t_grid=None, *, tol: Tolerances = DEFAULTS, **norm_opts) -> SemigroupProfile:
    """Sample ``||exp(tA)||_p`` on ``t_grid``.

    For p outside {1, 2, inf} each grid point is warm-started from the previous
    point's witness, so fewer random restarts (4 by default) are needed.
    """
    A = as_cmatrix(A)
    p = check_p(p)
    ts = default_t_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    if ts.ndim != 1 or ts.size < 2 or ts[0] != 0 or np.any(np.diff(ts) <= 0):
        raise InputError("t_grid must be increasing and start at 0")
    T = semigroup_stack(A, ts, tol=tol)
    norms, witnesses, exact = [], [], True
    norm_opts.setdefault("restarts", 4)
    for Ti in T:
        warm = witnesses[-1:] if p not in (1.0, 2.0, INF) else []
        est = op_p_norm_estimate(Ti, p, tol=tol, starts=warm, **norm_opts)
        norms.append(est.value)
        witnesses.append(est.witness)
        exact &= est.exact
    return SemigroupProfile(
        generator=A,
        norm=p,
        t_grid=ts,
        norms=np.asarray(norms),
        growth_bound=float(np.max(eigenvalues(A).real)),
        exact=exact,
        witnesses=witnesses,
        operators=T,
    )


@dataclass
class GrowthFit:
    constant: float
    exponent: float
    residual: float
    window: tuple[int, int]


def fit_power_growth(x, values, window: tuple[int, int] | None = None) -> GrowthFit:
    """Least-squares fit of ``values ~ constant * x**exponent`` in log-log space.

    ``window`` is a half-open index range; by default the upper half of the
    samples (the asymptotic regime) is used.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(values, dtype=float)
    if x.shape != v.shape or x.ndim != 1:
        raise InputError("x and values must be 1-D arrays of equal length")
    if window is None:
        window = (len(x) // 2, len(x))
    lo, hi = window
    xs, vs = x[lo:hi], v[lo:hi]
    if len(xs) < 8:
        raise InputError(f"need at least 8 samples in the fit window, got {len(xs)}")
    if np.any(vs <= 0) or np.any(xs <= 0):
        raise InputError("power-law fit needs positive abscissae and values")
    lx, lv = np.log(xs), np.log(vs)
    slope, intercept = np.polyfit(lx, lv, 1)
    resid = float(np.max(np.abs(lv - (intercept + slope * lx))))
    return GrowthFit(float(np.exp(intercept)), float(slope), resid, (lo, hi))


def contractivity_check(
    A,
    p,
    t_grid=None,
    *,
    witnesses: Sequence | None = None,
    tol: Tolerances = DEFAULTS,
    **norm_opts,
) -> CheckReport:
    """Decide ``||exp(tA)||_p <= 1`` on a time grid.

    A FAIL carries a certificate ``{"t", "x", "ratio"}`` with
    ``||T(t)x|| / ||x|| > 1``. Extra candidate vectors can be supplied through
    ``witnesses``; each is tested on every grid point.
    """
    prof = trajectory(A, p, t_grid, tol=tol, **norm_opts)
    ts, norms = prof.t_grid, prof.norms
    limit = 1.0 + tol.contract_tol
    i = int(np.argmax(norms))
    details = {
        "max_norm": float(norms[i]),
        "initial_derivative": float((norms[1] - norms[0]) / (ts[1] - ts[0])),
        "growth_bound": prof.growth_bound,
    }
    cert = None
    if norms[i] > limit:
        x = prof.witnesses[i]
        ratio = vec_p_norm(prof.operators[i] @ x, p) / vec_p_norm(x, p)
        cert = {"t": float(ts[i]), "x": x, "ratio": ratio}
    for w in witnesses or ():
        w = np.asarray(w, dtype=complex)
        ratios = np.array([vec_p_norm(T @ w, p) for T in prof.operators]) / vec_p_norm(w, p)
        j = int(np.argmax(ratios))
        details.setdefault("witness_ratios", []).append(float(ratios[j]))
        if ratios[j] > limit and (cert is None or ratios[j] > cert["ratio"]):
            cert = {"t": float(ts[j]), "x": w, "ratio": float(ratios[j])}
    if cert is not None and cert["ratio"] > limit:
        return CheckReport(False, cert["t"], 1.0 - cert["ratio"], cert, True, details)
    return CheckReport(True, float(ts[i]), 1.0 - float(norms[i]), None, prof.exact, details)


def threshold_search(
    family: Callable[[float], np.ndarray],
    p,
    interval: tuple[float, float],
    *,
    t_grid=None,
    predicate: Callable[[np.ndarray], bool] | None = None,
    tol: Tolerances = DEFAULTS,
) -> float:
    """Bisection for the parameter where ``predicate(family(beta))`` flips.

    The predicate defaults to grid contractivity in the p-norm and is assumed
    monotone on ``interval``.
    """
    if predicate is None:
        grid = default_t_grid() if t_grid is None else t_grid

        def predicate(M):
            return contractivity_check(M, p, grid, tol=tol).passed

    lo, hi = map(float, interval)
    at_lo, at_hi = predicate(family(lo)), predicate(family(hi))
    if at_lo == at_hi:
        raise BracketError(
            f"predicate is {at_lo} at both ends of [{lo}, {hi}]; no threshold inside"
        )
    while hi - lo > tol.thresh_tol:
        mid = 0.5 * (lo + hi)
        if predicate(family(mid)) == at_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def default_resolvent_region(a0: float) -> tuple[np.ndarray, np.ndarray]:
    ims = np.array([0.0, 0.25, -0.25, 1.0, -1.0, 4.0, -4.0])
    near_re = a0 * np.geomspace(1e-4, 1.0, 41)[:-1]
    far_re = a0 * np.geomspace(1.0, 100.0, 13)
    near = (near_re[:, None] + 1j * ims[None, :]).ravel()
    far = (far_re[:, None] + 1j * ims[None, :]).ravel()
    return near, far


def poly_resolvent_check(
    A,
    p,
    k: int,
    M: float,
    *,
    a0: float | None = None,
    near=None,
    far=None,
    tol: Tolerances = DEFAULTS,
) -> CheckReport:
    """Check ``||R(l,A)|| <= M / (Re l)^(k+1)`` for ``0 < Re l < a0`` and
    ``||R(l,A)|| <= M`` for ``Re l >= a0``."""
    A = as_cmatrix(A)
    p = check_p(p)
    omega0 = float(np.max(eigenvalues(A).real))
    if a0 is None:
        a0 = max(0.0, omega0) + 1.0
    if a0 <= max(0.0, omega0):
        raise InputError(f"a0 = {a0} must exceed max(0, growth bound {omega0})")
    d_near, d_far = default_resolvent_region(a0)
    near = d_near if near is None else np.asarray(near, dtype=complex)
    far = d_far if far is None else np.asarray(far, dtype=complex)
    if np.any(near.real <= 0) or np.any(near.real >= a0) or np.any(far.real < a0):
        raise InputError("resolvent region points fall outside their strips")
    points = np.concatenate([near, far])
    bounds = np.concatenate([M / near.real ** (k + 1), np.full(len(far), float(M))])
    worst_ratio, worst_lam, worst_norm = -np.inf, None, None
    exact = True
    for lam, bound in zip(points, bounds):
        est = op_p_norm_estimate(resolvent(A, lam, tol=tol), p, tol=tol)
        exact &= est.exact
        if est.value / bound > worst_ratio:
            worst_ratio, worst_lam, worst_norm = est.value / bound, complex(lam), est.value
    passed = worst_ratio <= 1.0 + tol.rel_tol
    details = {"a0": a0, "growth_bound": omega0, "k": k, "M": M, "worst_norm": worst_norm}
    cert = None if passed else {"lambda": worst_lam, "resolvent_norm": worst_norm}
    # a FAIL is certified whenever the norm used is exact or a lower bound
    return CheckReport(passed, worst_lam, 1.0 - worst_ratio, cert, exact or not passed, details)
