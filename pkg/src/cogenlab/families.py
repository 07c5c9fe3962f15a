"""Named generators and seeded random fixture sets."""

from __future__ import annotations

import math

import numpy as np

from .errors import InputError


def shear(beta: float) -> np.ndarray:
    """Upper-triangular 2x2 generator whose max-norm semigroup stops being
    contractive at beta = 1 while its cogenerator stays contractive up to 3."""
    return np.array([[-1.0, beta], [0.0, -2.0]], dtype=complex)


def shear_cayley(beta: float) -> np.ndarray:
    return np.array([[0.0, -beta / 3], [0.0, 1.0 / 3]], dtype=complex)


def shear_semigroup(beta: float, t: float) -> np.ndarray:
    a, b = math.exp(-t), math.exp(-2 * t)
    return np.array([[a, beta * (a - b)], [0.0, b]], dtype=complex)


def shear_norm_inf(beta: float, t):
    t = np.asarray(t, dtype=float)
    return np.maximum((1 + beta) * np.exp(-t) - beta * np.exp(-2 * t), np.exp(-2 * t))


def shear_cayley_norm(beta: float, p: float) -> float:
    if math.isinf(p):
        return max(1 / 3, beta / 3)
    return ((beta**p + 1) / 3**p) ** (1 / p)


def critical_beta(p: float) -> float:
    """Largest beta with ``||V||_p <= 1`` for :func:`shear_cayley`."""
    return 3.0 if math.isinf(p) else (3**p - 1) ** (1 / p)


def shear_inverse(beta: float) -> np.ndarray:
    """Inverse of :func:`shear`; its max-norm semigroup is contractive iff beta <= 2."""
    return np.array([[-1.0, -beta / 2], [0.0, -0.5]], dtype=complex)


def shear_inverse_semigroup(beta: float, t: float) -> np.ndarray:
    a, b = math.exp(-t), math.exp(-t / 2)
    return np.array([[a, beta * (a - b)], [0.0, b]], dtype=complex)


def jordan_generator(k: int, diagonal: float = 0.0) -> np.ndarray:
    """``(k+1) x (k+1)`` Jordan block; with diagonal 0 the semigroup grows like t^k."""
    if k < 0:
        raise InputError("k must be non-negative")
    return (np.diag(np.ones(k), 1) + diagonal * np.eye(k + 1)).astype(complex)


def random_stable(d: int, rng: np.random.Generator, margin: float = 0.2, complex_: bool = False) -> np.ndarray:
    """Gaussian matrix shifted so every eigenvalue has real part <= -margin."""
    B = rng.standard_normal((d, d))
    if complex_:
        B = B + 1j * rng.standard_normal((d, d))
    shift = np.max(np.linalg.eigvals(B).real) + margin + rng.random()
    return (B - shift * np.eye(d)).astype(complex)


def random_invertible(d: int, rng: np.random.Generator, avoid=(0.1, 1.0, 10.0)) -> np.ndarray:
    """Complex Gaussian matrix, redrawn until it is well conditioned and no
    eigenvalue sits near 0 or near a point of ``avoid``."""
    avoid = np.concatenate([[0.0], np.asarray(avoid, dtype=float)])
    while True:
        B = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        ev = np.linalg.eigvals(B)
        if np.linalg.cond(B) < 1e3 and np.min(np.abs(ev[:, None] - avoid[None, :])) > 0.05:
            return B


def random_dissipative(d: int, rng: np.random.Generator, margin: float = 0.1) -> np.ndarray:
    """Skew-Hermitian part minus ``P P^H`` minus ``margin * I``; its numerical
    range lies in Re z <= -margin, so the 2-norm semigroup is contractive."""
    G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    S = (G - G.conj().T) / 2
    P = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return S - P @ P.conj().T / d - margin * np.eye(d)


def random_inf_contractive(d: int, rng: np.random.Generator, slack: float = 0.2) -> np.ndarray:
    """Non-normal generator with ``Re a_ii + sum_{j != i} |a_ij| <= -slack``
    for every row, which makes the max-norm semigroup contractive."""
    off = rng.standard_normal((d, d)) * np.triu(np.ones((d, d)), 1) * 2
    off += rng.standard_normal((d, d)) * np.tril(np.ones((d, d)), -1) * 0.3
    np.fill_diagonal(off, 0.0)
    diag = -(np.abs(off).sum(axis=1) + slack + rng.random(d))
    return (off + np.diag(diag)).astype(complex)


def consistency_fixtures(seed: int = 0) -> list[tuple[str, np.ndarray, float, bool]]:
    """20 generators ``(id, A, p, contractive)``: 10 dissipative (p=2),
    5 row-dominant non-normal (p=inf) and 5 non-contractive."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(10):
        out.append((f"dissipative-{i}", random_dissipative(2 + i % 3, rng), 2.0, True))
    for i in range(5):
        out.append((f"row-dominant-{i}", random_inf_contractive(2 + i % 3, rng), math.inf, True))
    shifted_jordan = jordan_generator(1, -0.2)
    out += [
        ("shear-b1.5", shear(1.5), math.inf, False),
        ("shear-b3", shear(3.0), math.inf, False),
        ("jordan-shifted-inf", shifted_jordan, math.inf, False),
        ("jordan-shifted-2", shifted_jordan, 2.0, False),
        ("sheared-2", np.array([[-1.0, 5.0], [0.0, -1.0]], dtype=complex), 2.0, False),
    ]
    return out


FAMILIES = {
    "shear": shear,
    "shear-inverse": shear_inverse,
}
