"""Cogenerators (Cayley transforms) of matrix and shift semigroups: norm
criteria, Laguerre integral asymptotics and sharpness experiments."""

from .cogenerator import cayley, v_tau
from .config import DEFAULTS, Tolerances
from .matrix_core import mat_exp, op_p_norm, resolvent, spectrum, vec_p_norm
from .report import CheckReport

__all__ = [
    "CheckReport",
    "DEFAULTS",
    "Tolerances",
    "cayley",
    "mat_exp",
    "op_p_norm",
    "resolvent",
    "spectrum",
    "v_tau",
    "vec_p_norm",
]
