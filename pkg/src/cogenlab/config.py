"""Global numerical tolerances.

The defaults are tuned for double precision on matrices of dimension up to
roughly 50. Override them per call with ``dataclasses.replace(DEFAULTS, ...)``.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    eig_tol: float = 1e-9
    singular_tol: float = 1e-12
    rel_tol: float = 1e-8
    # slack allowed above 1 when deciding contractivity of exp(tA) on a grid
    contract_tol: float = 1e-12
    thresh_tol: float = 1e-4
    max_exp_norm: float = 50.0
    overflow: float = 1e100

    def __post_init__(self) -> None:
        for name, value in self.__dict__.items():
            if not value > 0:
                raise ValueError(f"tolerance {name} must be positive, got {value!r}")


DEFAULTS = Tolerances()
