"""Dense complex linear algebra for small matrices.

Matrices are plain ``numpy`` complex arrays of shape ``(d, d)``. A norm index
``p`` is a float in ``[1, inf]``; the strings ``"inf"``/``"infinity"`` are
accepted wherever ``p`` is parsed from user input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO

import numpy as np
import scipy.linalg
import scipy.optimize

from .config import DEFAULTS, Tolerances
from .errors import (
    DimensionError,
    InputError,
    NumericalError,
    ParseError,
    RangeError,
    SingularityError,
)

INF = math.inf


def as_cmatrix(M) -> np.ndarray:
    """Validate and convert to a square complex matrix."""
    A = np.asarray(M, dtype=complex)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InputError("matrix has non-finite entries")
    return A


def check_p(p) -> float:
    if isinstance(p, str):
        if p.strip().lower() in ("inf", "infinity", "oo"):
            return INF
        try:
            p = float(p)
        except ValueError:
            raise InputError(f"cannot parse norm index {p!r}") from None
    p = float(p)
    if not p >= 1:
        raise InputError(f"norm index must lie in [1, inf], got {p}")
    return p


def conjugate_exponent(p: float) -> float:
    if p == 1:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1.0)


def vec_p_norm(x, p) -> float:
    x = np.asarray(x, dtype=complex).ravel()
    if x.size == 0:
        raise DimensionError("p-norm of an empty vector")
    p = check_p(p)
    a = np.abs(x)
    if p == INF:
        return float(a.max())
    if p == 1:
        return float(a.sum())
    if p == 2:
        return float(np.linalg.norm(a))
    # scale first so large p does not overflow
    m = a.max()
    if m == 0:
        return 0.0
    return float(m * np.sum((a / m) ** p) ** (1.0 / p))


def _phase(z: np.ndarray) -> np.ndarray:
    # angle-based so subnormal entries do not overflow
    out = np.exp(1j * np.angle(z))
    out[z == 0] = 1.0
    return out


def _dual_vector(y: np.ndarray, p: float) -> np.ndarray:
    """Unit vector in the dual norm attaining <w, y> = ||y||_p."""
    if p == INF:
        i = int(np.argmax(np.abs(y)))
        w = np.zeros_like(y)
        w[i] = _phase(y[i : i + 1])[0]
        return w
    if p == 1:
        return _phase(y)
    a = np.abs(y)
    nrm = vec_p_norm(y, p)
    if nrm == 0:
        return np.zeros_like(y)
    return _phase(y) * (a / nrm) ** (p - 1.0)


@dataclass
class NormEstimate:
    """Induced-norm value with provenance.

    ``exact`` marks closed-form values (p in {1, 2, inf}). Otherwise ``value``
    is the best of ``restarts`` ascent runs and is a certified lower bound;
    ``agreed`` counts runs that reached it within ``rel_tol``.
    """

    value: float
    p: float
    exact: bool
    witness: np.ndarray = field(repr=False)
    restarts: int = 0
    agreed: int = 0
    converged: bool = True

    @property
    def certified(self) -> bool:
        return self.exact

    @property
    def uncertified(self) -> bool:
        return not self.exact and (not self.converged or self.agreed < 2)


def _exact_norm(M: np.ndarray, p: float) -> NormEstimate:
    d = M.shape[0]
    if p == 1:
        sums = np.abs(M).sum(axis=0)
        j = int(np.argmax(sums))
        x = np.zeros(d, dtype=complex)
        x[j] = 1.0
        return NormEstimate(float(sums[j]), p, True, x)
    if p == INF:
        sums = np.abs(M).sum(axis=1)
        i = int(np.argmax(sums))
        x = np.conj(_phase(M[i]))
        return NormEstimate(float(sums[i]), p, True, x)
    _, s, vh = np.linalg.svd(M)
    return NormEstimate(float(s[0]), p, True, np.conj(vh[0]))


def _ascent(M: np.ndarray, x: np.ndarray, p: float, q: float, max_iter: int, step_tol: float):
    """Dual-vector power iteration; the value never decreases.

    Stops once a step improves the value by less than ``step_tol`` relative.
    """
    x = x / vec_p_norm(x, p)
    best = vec_p_norm(M @ x, p)
    MH = M.conj().T
    for _ in range(max_iter):
        y = M @ x
        if not np.any(y):
            return best, x, True
        z = MH @ _dual_vector(y, p)
        xn = _dual_vector(z, q)
        nx = vec_p_norm(xn, p)
        if nx == 0:
            return best, x, True
        xn = xn / nx
        val = vec_p_norm(M @ xn, p)
        if val <= best * (1 + step_tol):
            return max(best, val), (xn if val > best else x), True
        best, x = val, xn
    return best, x, False


def _log_ratio_and_grad(v: np.ndarray, M: np.ndarray, p: float, real: bool):
    """-(log ||Mx||_p - log ||x||_p) and its gradient in real coordinates."""
    d = M.shape[0]
    x = v.astype(complex) if real else v[:d] + 1j * v[d:]

    def power_sum(y, B):
        a = np.maximum(np.abs(y), 1e-300)
        m = a.max()
        phi = np.sum((a / m) ** p)
        g = B.conj().T @ ((a / m) ** (p - 2) * y / m**2)
        return np.log(m) + np.log(phi) / p, g / phi

    f1, g1 = power_sum(M @ x, M)
    f0, g0 = power_sum(x, np.eye(d))
    g = g1 - g0
    grad = g.real if real else np.concatenate([g.real, g.imag])
    return -(f1 - f0), -grad


def _polish(M: np.ndarray, x: np.ndarray, p: float, real: bool):
    v0 = x.real if real else np.concatenate([x.real, x.imag])
    res = scipy.optimize.minimize(
        _log_ratio_and_grad, v0, args=(M, p, real), jac=True, method="BFGS",
        options={"gtol": 1e-13, "maxiter": 400},
    )
    d = M.shape[0]
    xr = res.x.astype(complex) if real else res.x[:d] + 1j * res.x[d:]
    return xr / vec_p_norm(xr, p)


def op_p_norm_estimate(
    M,
    p,
    *,
    restarts: int = 32,
    seed: int = 0,
    max_iter: int = 60,
    step_tol: float = 1e-14,
    starts=(),
    force_generic: bool = False,
    tol: Tolerances = DEFAULTS,
) -> NormEstimate:
    """Induced p-norm with a witness vector.

    For p outside {1, 2, inf} (or with ``force_generic``) this runs a
    multi-start ascent on the unit p-sphere: a dual-vector power iteration
    followed, when it has not settled, by a BFGS polish of
    ``log ||Mx|| - log ||x||``. Starts are the coordinate vectors, any caller
    supplied ``starts`` and seeded random vectors up to ``restarts`` in total.
    """
    M = as_cmatrix(M)
    p = check_p(p)
    if p in (1.0, 2.0, INF) and not force_generic:
        return _exact_norm(M, p)
    q = conjugate_exponent(p)
    d = M.shape[0]
    # the norm is homogeneous; unit scale keeps the power sums away from underflow
    scale = float(np.abs(M).max())
    if scale == 0:
        return NormEstimate(0.0, p, True, np.eye(d, dtype=complex)[0], 1, 1, True)
    M = M / scale
    rng = np.random.default_rng(seed)
    real = not np.any(M.imag)
    starts = [np.asarray(x, dtype=complex) for x in starts]
    starts += [np.eye(d, dtype=complex)[j] for j in range(d)]
    while len(starts) < restarts:
        x = rng.standard_normal(d)
        if not real:
            x = x + 1j * rng.standard_normal(d)
        starts.append(x.astype(complex))
    values, vectors, converged = [], [], True
    smooth = 1 < p < INF
    for x0 in starts:
        if not np.any(x0):
            continue
        v, x, ok = _ascent(M, x0, p, q, max_iter, step_tol)
        if not ok and smooth:
            xp = _polish(M, x, p, real)
            vp = vec_p_norm(M @ xp, p)
            if vp > v:
                v, x = vp, xp
            ok = True
        values.append(v)
        vectors.append(x)
        converged &= ok
    values = np.asarray(values)
    b = int(np.argmax(values))
    best = float(values[b])
    agreed = int(np.sum(values >= best * (1 - tol.rel_tol)))
    return NormEstimate(best * scale, p, False, vectors[b], len(values), agreed, converged)


def op_p_norm(M, p, **opts) -> float:
    """Induced operator norm; exact for p in {1, 2, inf}, a lower bound otherwise."""
    return op_p_norm_estimate(M, p, **opts).value


# Pade [13/13] coefficients and the scaling threshold for double precision
_PADE13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)
_THETA13 = 5.371920351148152


def _expm_pade13(X: np.ndarray) -> np.ndarray:
    """exp of a stack of matrices, shape (..., d, d), all with 1-norm <= theta13."""
    b = _PADE13
    d = X.shape[-1]
    ident = np.broadcast_to(np.eye(d, dtype=complex), X.shape)
    X2 = X @ X
    X4 = X2 @ X2
    X6 = X4 @ X2
    U = X @ (
        X6 @ (b[13] * X6 + b[11] * X4 + b[9] * X2)
        + b[7] * X6 + b[5] * X4 + b[3] * X2 + b[1] * ident
    )
    V = (
        X6 @ (b[12] * X6 + b[10] * X4 + b[8] * X2)
        + b[6] * X6 + b[4] * X4 + b[2] * X2 + b[0] * ident
    )
    return np.linalg.solve(V - U, V + U)


def mat_exp(A, t=1.0, *, tol: Tolerances = DEFAULTS) -> np.ndarray:
    """exp(tA) by scaling and squaring with a degree-13 Pade approximant.

    ``t`` may be a scalar or a 1-D array, in which case a stack of shape
    ``(len(t), d, d)`` is returned. Arguments with ``||tA||_1`` above
    ``tol.max_exp_norm`` raise :class:`RangeError`.
    """
    A = as_cmatrix(A)
    ts = np.asarray(t, dtype=float)
    scalar = ts.ndim == 0
    ts = np.atleast_1d(ts)
    if np.any(ts < 0) or not np.all(np.isfinite(ts)):
        raise InputError("mat_exp needs finite t >= 0")
    norm_a = float(np.abs(A).sum(axis=0).max())
    norms = ts * norm_a
    if np.any(norms > tol.max_exp_norm):
        raise RangeError(
            f"||tA||_1 = {norms.max():.6g} exceeds the supported range {tol.max_exp_norm}"
        )
    s = np.maximum(0, np.ceil(np.log2(np.maximum(norms, 1e-300) / _THETA13))).astype(int)
    X = ts[:, None, None] * A[None] / (2.0 ** s)[:, None, None]
    E = _expm_pade13(X)
    for k in range(int(s.max(initial=0))):
        mask = s > k
        E[mask] = E[mask] @ E[mask]
    return E[0] if scalar else E


def expm_long(A, t: float, *, tol: Tolerances = DEFAULTS) -> np.ndarray:
    """exp(tA) for arguments beyond the mat_exp range, via exp(tA/m)^m."""
    A = as_cmatrix(A)
    norm = t * float(np.abs(A).sum(axis=0).max())
    m = max(1, math.ceil(norm / tol.max_exp_norm))
    E = mat_exp(A, t / m, tol=tol)
    return np.linalg.matrix_power(E, m) if m > 1 else E


@dataclass
class SpectralReport:
    eigenvalues: np.ndarray
    spectral_radius: float
    unit_eigenvalue_flag: bool


def eigenvalues(M) -> np.ndarray:
    M = as_cmatrix(M)
    d = M.shape[0]
    if d == 1:
        return M[0].copy()
    if d == 2:
        a, b, c, e = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
        if b == 0 or c == 0:
            return np.array([a, e])
        half_tr = (a + e) / 2
        disc = np.sqrt(((a - e) / 2) ** 2 + b * c)
        return np.array([half_tr - disc, half_tr + disc])
    try:
        return np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue iteration failed: {exc}") from exc


def spectrum(M, *, tol: Tolerances = DEFAULTS) -> SpectralReport:
    ev = eigenvalues(M)
    radius = float(np.abs(ev).max())
    flag = bool(np.any(np.abs(ev - 1.0) <= tol.eig_tol))
    return SpectralReport(ev, radius, flag)


def resolvent(A, lam: complex, *, tol: Tolerances = DEFAULTS) -> np.ndarray:
    """(lam I - A)^{-1} by LU with partial pivoting."""
    A = as_cmatrix(A)
    lam = complex(lam)
    d = A.shape[0]
    if np.min(np.abs(eigenvalues(A) - lam)) <= tol.eig_tol:
        raise SingularityError(f"lambda = {lam} lies in the spectrum", lam)
    lu, piv = scipy.linalg.lu_factor(lam * np.eye(d) - A, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if pivots.min() <= tol.singular_tol * max(1.0, pivots.max()):
        raise SingularityError(f"lambda = {lam}: pivot below singular_tol", lam)
    return scipy.linalg.lu_solve((lu, piv), np.eye(d, dtype=complex), check_finite=False)


# -- matrix text format -----------------------------------------------------

def format_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}i"


def parse_complex(token: str) -> complex:
    tok = token.strip().replace("I", "i").replace("j", "i")
    if not tok or any(bad in tok.lower() for bad in ("nan", "inf")):
        raise ParseError(f"bad complex entry {token!r}")
    try:
        if tok.endswith("i"):
            body = tok[:-1]
            if body in ("", "+", "-") or body[-1] in "+-":
                body += "1"
            return complex(body + "j")
        return complex(float(tok))
    except ValueError:
        raise ParseError(f"bad complex entry {token!r}") from None


def dumps_matrix(M) -> str:
    M = as_cmatrix(M)
    lines = [f"dim {M.shape[0]}"]
    lines += [" ".join(format_complex(z) for z in row) for row in M]
    return "\n".join(lines) + "\n"


def loads_matrix(text: str) -> np.ndarray:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ParseError("empty matrix file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "dim":
        raise ParseError(f"first line must be 'dim d', got {lines[0]!r}")
    try:
        d = int(head[1])
    except ValueError:
        raise ParseError(f"bad dimension {head[1]!r}") from None
    if d < 1 or len(lines) != d + 1:
        raise ParseError(f"expected {d} rows after the header, got {len(lines) - 1}")
    rows = []
    for ln in lines[1:]:
        toks = ln.split()
        if len(toks) != d:
            raise ParseError(f"expected {d} entries per row, got {len(toks)}")
        rows.append([parse_complex(tk) for tk in toks])
    return np.array(rows, dtype=complex)


def write_matrix(path: str | Path | IO[str], M) -> None:
    text = dumps_matrix(M)
    if hasattr(path, "write"):
        path.write(text)
    else:
        Path(path).write_text(text)


def read_matrix(path: str | Path) -> np.ndarray:
    return loads_matrix(Path(path).read_text())
