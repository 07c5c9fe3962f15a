"""Cayley transforms and cogenerator-side criteria for contractive and bounded
matrix semigroups.

With ``V = (A + I)(A - I)^{-1}`` and ``V_tau = (tau A + I)(tau A - I)^{-1}``:

* ``lambda R(lambda, A) = (mu + 1)/2 (I - V) R(mu, V)`` for
  ``mu = (lambda + 1)/(lambda - 1)``, so Hille-Yosida bounds on ``A`` turn into
  bounds on ``(I - V) R(mu, V)`` for ``mu`` close to 1;
* ``t R(t, A) = (I - V_tau)/2`` with ``t = 1/tau``, so the same bounds can be
  phrased through ``V_tau - I`` for small ``tau``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy.optimize import linear_sum_assignment

from .config import DEFAULTS, Tolerances
from .errors import InputError, NumericalError, RangeError, SingularityError
from .matrix_core import (
    INF,
    as_cmatrix,
    check_p,
    eigenvalues,
    op_p_norm_estimate,
    resolvent,
    vec_p_norm,
)
from .report import CheckReport


def cayley(A, *, tol: Tolerances = DEFAULTS) -> np.ndarray:
    A = as_cmatrix(A)
    d = A.shape[0]
    ev = eigenvalues(A)
    if np.min(np.abs(ev - 1.0)) <= tol.eig_tol:
        raise SingularityError("1 is an eigenvalue; the Cayley transform is undefined", 1.0)
    ident = np.eye(d)
    # (A + I) and (A - I)^{-1} commute
    return np.linalg.solve(A - ident, A + ident)


def generator_of(V, *, tol: Tolerances = DEFAULTS) -> np.ndarray:
    """Inverse Cayley map ``(V + I)(V - I)^{-1}``; same formula as :func:`cayley`."""
    return cayley(V, tol=tol)


def v_tau(A, tau: float, *, tol: Tolerances = DEFAULTS) -> np.ndarray:
    """Cogenerator of the rescaled semigroup, computed as ``I - 2t R(t, A)``."""
    if not tau > 0:
        raise InputError(f"tau must be positive, got {tau}")
    A = as_cmatrix(A)
    t = 1.0 / tau
    return np.eye(A.shape[0]) - 2.0 * t * resolvent(A, t, tol=tol)


@dataclass
class CogeneratorFamily:
    generator: np.ndarray
    taus: list[float]
    members: dict[float, np.ndarray] = field(repr=False)
    base: np.ndarray = field(repr=False)


def build_family(A, taus, *, tol: Tolerances = DEFAULTS) -> CogeneratorFamily:
    """Construct ``V_tau`` for each tau, cross-checked against ``cayley(tau A)``."""
    A = as_cmatrix(A)
    members = {}
    for tau in taus:
        V = v_tau(A, tau, tol=tol)
        W = cayley(tau * A, tol=tol)
        if np.linalg.norm(V - W) > 1e-10 * max(1.0, np.linalg.norm(V)):
            raise NumericalError(f"V_tau and cayley(tau A) disagree at tau={tau}")
        if np.min(np.abs(eigenvalues(V) - 1.0)) <= tol.eig_tol:
            raise SingularityError(f"1 is an eigenvalue of V_tau at tau={tau}", tau)
        members[float(tau)] = V
    return CogeneratorFamily(A, [float(t) for t in taus], members, cayley(A, tol=tol))


def inverse_duality_residual(A, tau: float, *, tol: Tolerances = DEFAULTS) -> float:
    """Frobenius norm of ``V_{tau, A^{-1}} + V_{1/tau, A}``; zero in exact arithmetic."""
    A = as_cmatrix(A)
    if np.min(np.abs(eigenvalues(A))) <= tol.eig_tol:
        raise InputError("A is singular")
    Ainv = np.linalg.inv(A)
    return float(np.linalg.norm(v_tau(Ainv, tau, tol=tol) + v_tau(A, 1.0 / tau, tol=tol)))


def resolvent_transfer_residual(A, lam: complex, *, tol: Tolerances = DEFAULTS) -> float:
    """``|| R(lam, A) - (I - V) R((lam+1)/(lam-1), V) / (lam - 1) ||_F``."""
    A = as_cmatrix(A)
    lam = complex(lam)
    if lam == 1:
        raise InputError("lambda = 1 is excluded")
    V = cayley(A, tol=tol)
    mu = (lam + 1) / (lam - 1)
    rhs = (np.eye(A.shape[0]) - V) @ resolvent(V, mu, tol=tol) / (lam - 1)
    return float(np.linalg.norm(resolvent(A, lam, tol=tol) - rhs))


def spectral_map_check(A, *, tol: Tolerances = DEFAULTS) -> CheckReport:
    """Compare sigma(A) \\ {1} with the image of sigma(V) \\ {1} under
    ``mu -> (mu + 1)/(mu - 1)`` as multisets."""
    A = as_cmatrix(A)
    ev_a = eigenvalues(A)
    ev_v = eigenvalues(cayley(A, tol=tol))
    ev_a = ev_a[np.abs(ev_a - 1) > tol.eig_tol]
    ev_v = ev_v[np.abs(ev_v - 1) > tol.eig_tol]
    mapped = (ev_v + 1) / (ev_v - 1)
    if len(mapped) != len(ev_a):
        return CheckReport(False, None, -np.inf, {"sigma_A": ev_a, "mapped": mapped})
    scale = np.maximum(1.0, np.abs(ev_a))
    cost = np.abs(ev_a[:, None] - mapped[None, :]) / scale[:, None]
    rows, cols = linear_sum_assignment(cost)
    dev = cost[rows, cols]
    j = int(np.argmax(dev))
    passed = bool(dev[j] <= tol.eig_tol)
    cert = None if passed else {"sigma_A": ev_a, "mapped": mapped}
    return CheckReport(passed, complex(ev_a[rows[j]]), 1.0 - dev[j] / tol.eig_tol, cert,
                       details={"max_relative_deviation": float(dev[j])})


def default_mu_grid() -> np.ndarray:
    """64 geometric points in (1, 2] plus a refinement down to 1 + 1e-6."""
    gaps = np.concatenate([np.geomspace(1e-3, 1.0, 64), np.geomspace(1e-6, 1e-3, 16, endpoint=False)])
    return np.sort(1.0 + gaps)


def default_tau_grid(tau0: float = 1.0) -> np.ndarray:
    return np.geomspace(1e-3, tau0, 65)[:-1]


def _require_cogenerator(V: np.ndarray, tol: Tolerances) -> None:
    if np.min(np.abs(eigenvalues(V) - 1.0)) <= tol.eig_tol:
        raise SingularityError("V - I is not invertible (1 is an eigenvalue of V)", 1.0)


def _norm(M, p, norm_opts):
    return op_p_norm_estimate(M, p, **norm_opts)


def hy_contraction_check(
    V, p, mu_grid=None, *, tol: Tolerances = DEFAULTS, **norm_opts
) -> CheckReport:
    """``||(I - V) R(mu, V)|| <= 2/(mu + 1)`` on a grid of mu > 1.

    The operator is formed twice, as ``(I - V) R`` and as ``I - (mu - 1) R``;
    a disagreement above 1e-10 raises :class:`NumericalError`.
    """
    V = as_cmatrix(V)
    p = check_p(p)
    _require_cogenerator(V, tol)
    mus = default_mu_grid() if mu_grid is None else np.asarray(mu_grid, dtype=float)
    if np.any(mus <= 1):
        raise InputError("mu grid must lie in (1, inf)")
    ident = np.eye(V.shape[0])
    worst = (-np.inf, None, None, None)
    exact, disagreement = True, 0.0
    for mu in mus:
        R = resolvent(V, mu, tol=tol)
        B = (ident - V) @ R
        B2 = ident - (mu - 1) * R
        gap = np.linalg.norm(B - B2) / max(1.0, np.linalg.norm(B))
        disagreement = max(disagreement, gap)
        if gap > 1e-10:
            raise NumericalError(f"(I-V)R(mu,V) and I-(mu-1)R(mu,V) differ by {gap:.3g} at mu={mu}")
        est = _norm(B, p, norm_opts)
        exact &= est.exact
        ratio = est.value * (mu + 1) / 2
        if ratio > worst[0]:
            worst = (ratio, float(mu), est, B)
    ratio, mu, est, B = worst
    passed = est.value <= 2 / (mu + 1) + tol.rel_tol
    details = {"worst_ratio": ratio, "identity_disagreement": disagreement}
    cert = None
    if not passed:
        cert = {"mu": mu, "x": est.witness, "norm": est.value, "bound": 2 / (mu + 1)}
    return CheckReport(bool(passed), mu, 1.0 - ratio, cert, exact or not passed, details)


def _power_sweep(C: np.ndarray, p, n_max: int, bound: float, tol: Tolerances, norm_opts):
    """Largest ``||C^n|| / bound`` over 1 <= n <= n_max, by repeated multiplication."""
    worst = (-np.inf, 0, None)
    exact = True
    P = np.eye(C.shape[0], dtype=complex)
    for n in range(1, n_max + 1):
        P = P @ C
        est = _norm(P, p, norm_opts)
        exact &= est.exact
        if est.value > tol.overflow:
            raise RangeError(f"power norm exceeded {tol.overflow:g} at n={n}")
        if est.value / bound > worst[0]:
            worst = (est.value / bound, n, est)
    return worst, exact


def hy_bounded_check(
    V, p, M: float, mu_grid=None, n_max: int = 40, *, tol: Tolerances = DEFAULTS, **norm_opts
) -> CheckReport:
    """``||[(I - V) R(mu, V)]^n|| <= 2^n M / (mu + 1)^n`` for mu on the grid and
    ``1 <= n <= n_max``.

    Powers are taken of the rescaled operator ``(mu + 1)/2 (I - V) R(mu, V)``
    (which equals ``lambda R(lambda, A)``) and compared with ``M`` relatively.
    """
    V = as_cmatrix(V)
    p = check_p(p)
    if n_max < 1:
        raise InputError("n_max must be >= 1")
    _require_cogenerator(V, tol)
    mus = default_mu_grid() if mu_grid is None else np.asarray(mu_grid, dtype=float)
    ident = np.eye(V.shape[0])
    worst = (-np.inf, None, None, None)
    exact = True
    for mu in mus:
        C = (mu + 1) / 2 * ((ident - V) @ resolvent(V, mu, tol=tol))
        (ratio, n, est), ex = _power_sweep(C, p, n_max, M, tol, norm_opts)
        exact &= ex
        if ratio > worst[0]:
            worst = (ratio, float(mu), n, est)
    ratio, mu, n, est = worst
    passed = ratio <= 1 + tol.rel_tol
    cert = None if passed else {"mu": mu, "n": n, "x": est.witness, "scaled_norm": est.value}
    return CheckReport(bool(passed), (mu, n), 1.0 - ratio, cert, exact or not passed,
                       {"worst_ratio": ratio})


def vtau_contraction_check(
    A, p, tau_grid=None, *, tol: Tolerances = DEFAULTS, **norm_opts
) -> CheckReport:
    """``||V_tau - I|| <= 2`` for tau on a grid in (0, tau0)."""
    A = as_cmatrix(A)
    p = check_p(p)
    taus = default_tau_grid() if tau_grid is None else np.asarray(tau_grid, dtype=float)
    ident = np.eye(A.shape[0])
    worst = (-np.inf, None, None)
    exact = True
    for tau in taus:
        est = _norm(v_tau(A, tau, tol=tol) - ident, p, norm_opts)
        exact &= est.exact
        if est.value > worst[0]:
            worst = (est.value, float(tau), est)
    value, tau, est = worst
    passed = value <= 2 + tol.rel_tol
    cert = None if passed else {"tau": tau, "x": est.witness, "norm": value}
    return CheckReport(bool(passed), tau, 1.0 - value / 2, cert, exact or not passed)


def vtau_bounded_check(
    A, p, M: float, tau_grid=None, n_max: int = 40, *, tol: Tolerances = DEFAULTS, **norm_opts
) -> CheckReport:
    """``||[(V_tau - I)/2]^n|| <= M`` for tau on the grid and 1 <= n <= n_max."""
    A = as_cmatrix(A)
    p = check_p(p)
    taus = default_tau_grid() if tau_grid is None else np.asarray(tau_grid, dtype=float)
    ident = np.eye(A.shape[0])
    worst = (-np.inf, None, None, None)
    exact = True
    for tau in taus:
        W = (v_tau(A, tau, tol=tol) - ident) / 2
        (ratio, n, est), ex = _power_sweep(W, p, n_max, M, tol, norm_opts)
        exact &= ex
        if ratio > worst[0]:
            worst = (ratio, float(tau), n, est)
    ratio, tau, n, est = worst
    passed = ratio <= 1 + tol.rel_tol
    cert = None if passed else {"tau": tau, "n": n, "x": est.witness, "norm": est.value}
    return CheckReport(bool(passed), (tau, n), 1.0 - ratio, cert, exact or not passed)


def power_bound_transfer_check(
    V, p, M: float | None = None, n_max: int = 40, *, tol: Tolerances = DEFAULTS, **norm_opts
) -> CheckReport:
    """Binomial transfer from powers of ``V`` to powers of ``(V - I)/2``.

    For each n checks ``||W^n|| <= 2^-n sum_j C(n, j) ||V^j||`` with
    ``W = (V - I)/2``, which gives ``max_n ||W^n|| <= max_n ||V^n||``.
    If ``M`` is given, ``details`` also records whether ``max ||V^n|| <= M``.
    """
    V = as_cmatrix(V)
    p = check_p(p)
    d = V.shape[0]
    W = (V - np.eye(d)) / 2
    v_norms = [1.0]
    w_norms = []
    Pv = np.eye(d, dtype=complex)
    Pw = np.eye(d, dtype=complex)
    exact = True
    worst = (-np.inf, None)
    for n in range(1, n_max + 1):
        Pv, Pw = Pv @ V, Pw @ W
        ev, ew = _norm(Pv, p, norm_opts), _norm(Pw, p, norm_opts)
        exact &= ev.exact and ew.exact
        if max(ev.value, ew.value) > tol.overflow:
            raise RangeError(f"power norm exceeded {tol.overflow:g} at n={n}")
        v_norms.append(ev.value)
        w_norms.append(ew.value)
        binom = sum(comb(n, j) * v_norms[j] for j in range(n + 1)) / 2.0**n
        if ew.value / binom > worst[0]:
            worst = (ew.value / binom, n)
    ratio, n = worst
    sup_v, sup_w = max(v_norms), max(w_norms)
    passed = ratio <= 1 + tol.rel_tol and sup_w <= (1 + tol.rel_tol) * sup_v
    details = {"sup_V_powers": sup_v, "sup_W_powers": sup_w}
    if M is not None:
        details["premise_holds"] = sup_v <= M * (1 + tol.rel_tol)
        details["conclusion_holds"] = sup_w <= M * (1 + tol.rel_tol)
    return CheckReport(bool(passed), n, 1.0 - ratio, None if passed else {"n": n},
                       exact or not passed, details)


def cogenerator_contraction_check(V, p, *, tol: Tolerances = DEFAULTS, **norm_opts) -> CheckReport:
    """The Hilbert-space hypotheses on V: ``||V|| <= 1`` and 1 not an eigenvalue."""
    V = as_cmatrix(V)
    est = op_p_norm_estimate(V, p, tol=tol, **norm_opts)
    gap = float(np.min(np.abs(eigenvalues(V) - 1.0)))
    passed = est.value <= 1 + tol.rel_tol and gap > tol.eig_tol
    return CheckReport(bool(passed), None, 1.0 - est.value, None if passed else {"norm": est.value},
                       est.exact or not passed, {"norm": est.value, "distance_of_1_to_spectrum": gap})


def hilbert_form_residual(A, tau: float, x, *, tol: Tolerances = DEFAULTS) -> float:
    """``| ||V_tau x||^2 - ||x||^2 - 4t Re<Ay, y> |`` with ``y = -R(t, A) x``, t = 1/tau."""
    A = as_cmatrix(A)
    x = np.asarray(x, dtype=complex)
    t = 1.0 / tau
    y = -resolvent(A, t, tol=tol) @ x
    lhs = vec_p_norm(v_tau(A, tau, tol=tol) @ x, 2) ** 2 - vec_p_norm(x, 2) ** 2
    rhs = 4 * t * np.vdot(y, A @ y).real
    return float(abs(lhs - rhs))
