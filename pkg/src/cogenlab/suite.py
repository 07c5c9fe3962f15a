"""Criterion registry and config-driven check suites.

A suite config is a JSON object::

    {
      "p": "inf",
      "params": {"M": 1.0, "n_max": 40, "k": 1},
      "tolerances": {"rel_tol": 1e-8},
      "generators": [
        {"id": "shear-b3", "family": "shear", "beta": 3,
         "expect": {"hy_contraction": "fail", "cogenerator_contraction": "pass"}},
        {"id": "mine", "matrix_file": "A.txt", "criteria": ["contractivity"]}
      ]
    }

A generator entry names its matrix through ``family`` (plus ``beta``),
``matrix`` (nested list of numbers or "a+bi" strings) or ``matrix_file``.
``p`` and ``params`` may be overridden per generator. Criteria listed without
an expectation default to "pass".
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .cogenerator import (
    cayley,
    cogenerator_contraction_check,
    default_mu_grid,
    default_tau_grid,
    hy_bounded_check,
    hy_contraction_check,
    power_bound_transfer_check,
    spectral_map_check,
    vtau_bounded_check,
    vtau_contraction_check,
)
from .config import DEFAULTS, Tolerances
from .errors import ConfigError
from .families import FAMILIES
from .matrix_core import as_cmatrix, check_p, parse_complex, read_matrix
from .report import CheckReport, jsonable
from .semigroup import contractivity_check, default_t_grid, poly_resolvent_check


def _grid_summary(kind: str, grid) -> dict:
    g = np.asarray(grid, dtype=float)
    return {"kind": kind, "size": int(g.size), "min": float(g.min()), "max": float(g.max())}


@dataclass(frozen=True)
class Criterion:
    name: str
    run: Callable[..., CheckReport]
    grid: Callable[[], dict]
    needs: tuple[str, ...] = ()


def _run_contractivity(A, p, prm, tol, opts):
    return contractivity_check(A, p, tol=tol, **opts)


def _run_hy_contraction(A, p, prm, tol, opts):
    return hy_contraction_check(cayley(A, tol=tol), p, tol=tol, **opts)


def _run_hy_bounded(A, p, prm, tol, opts):
    return hy_bounded_check(cayley(A, tol=tol), p, prm["M"], n_max=prm.get("n_max", 40), tol=tol, **opts)


def _run_vtau_contraction(A, p, prm, tol, opts):
    return vtau_contraction_check(A, p, tol=tol, **opts)


def _run_vtau_bounded(A, p, prm, tol, opts):
    return vtau_bounded_check(A, p, prm["M"], n_max=prm.get("n_max", 40), tol=tol, **opts)


def _run_transfer(A, p, prm, tol, opts):
    return power_bound_transfer_check(
        cayley(A, tol=tol), p, prm.get("M"), n_max=prm.get("n_max", 40), tol=tol, **opts
    )


def _run_cogen_contraction(A, p, prm, tol, opts):
    return cogenerator_contraction_check(cayley(A, tol=tol), p, tol=tol, **opts)


def _run_spectral_map(A, p, prm, tol, opts):
    return spectral_map_check(A, tol=tol)


def _run_poly_resolvent(A, p, prm, tol, opts):
    return poly_resolvent_check(A, p, prm["k"], prm["M"], a0=prm.get("a0"), tol=tol)


CRITERIA: dict[str, Criterion] = {
    c.name: c
    for c in [
        Criterion("contractivity", _run_contractivity, lambda: _grid_summary("t", default_t_grid())),
        Criterion("hy_contraction", _run_hy_contraction, lambda: _grid_summary("mu", default_mu_grid())),
        Criterion("hy_bounded", _run_hy_bounded, lambda: _grid_summary("mu", default_mu_grid()), ("M",)),
        Criterion("vtau_contraction", _run_vtau_contraction, lambda: _grid_summary("tau", default_tau_grid())),
        Criterion("vtau_bounded", _run_vtau_bounded, lambda: _grid_summary("tau", default_tau_grid()), ("M",)),
        Criterion("power_bound_transfer", _run_transfer, lambda: {"kind": "n"}),
        Criterion("cogenerator_contraction", _run_cogen_contraction, lambda: {"kind": "none"}),
        Criterion("spectral_map", _run_spectral_map, lambda: {"kind": "none"}),
        Criterion("poly_resolvent", _run_poly_resolvent, lambda: {"kind": "lambda"}, ("k", "M")),
    ]
}

DEFAULT_SUITE = ("contractivity", "hy_contraction", "vtau_contraction", "cogenerator_contraction")


def run_criterion(name: str, A, p, params=None, *, tol: Tolerances = DEFAULTS, **norm_opts) -> CheckReport:
    if name not in CRITERIA:
        raise ConfigError(f"unknown criterion {name!r}; choose from {sorted(CRITERIA)}")
    crit = CRITERIA[name]
    params = dict(params or {})
    missing = [key for key in crit.needs if key not in params]
    if missing:
        raise ConfigError(f"criterion {name} needs parameters {missing}")
    return crit.run(as_cmatrix(A), check_p(p), params, tol, norm_opts)


def parse_p(value) -> float:
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity"):
        return math.inf
    try:
        return check_p(float(value))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid norm index {value!r}") from exc


def p_label(p: float) -> str:
    return "inf" if math.isinf(p) else format(p, ".17g")


def tolerances_from(mapping: dict | None, base: Tolerances = DEFAULTS) -> Tolerances:
    if not mapping:
        return base
    fields = {f.name for f in dataclasses.fields(Tolerances)}
    unknown = set(mapping) - fields
    if unknown:
        raise ConfigError(f"unknown tolerance keys {sorted(unknown)}")
    try:
        return dataclasses.replace(base, **{k: float(v) for k, v in mapping.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def matrix_from_entry(entry: dict, base_dir: Path) -> np.ndarray:
    if "family" in entry:
        fam = entry["family"]
        if fam not in FAMILIES:
            raise ConfigError(f"unknown family {fam!r}; choose from {sorted(FAMILIES)}")
        if "beta" not in entry:
            raise ConfigError(f"family {fam} needs a beta")
        return FAMILIES[fam](float(entry["beta"]))
    if "matrix" in entry:
        rows = entry["matrix"]
        try:
            return as_cmatrix([[parse_complex(v) if isinstance(v, str) else complex(v) for v in r] for r in rows])
        except TypeError as exc:
            raise ConfigError(f"bad inline matrix: {exc}") from exc
    if "matrix_file" in entry:
        return read_matrix(base_dir / entry["matrix_file"])
    raise ConfigError("generator entry needs one of family, matrix, matrix_file")


@dataclass
class SuiteResult:
    rows: list[dict]
    mismatches: list[str]

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_json(self) -> str:
        return json.dumps(jsonable(self.rows), indent=2)


def run_suite(config: dict, *, base_dir: Path = Path("."), tol: Tolerances | None = None, **norm_opts) -> SuiteResult:
    """Run every generator's criteria and compare with its expectations."""
    if not isinstance(config, dict) or not isinstance(config.get("generators"), list):
        raise ConfigError("suite config needs a 'generators' list")
    tol = tolerances_from(config.get("tolerances"), tol or DEFAULTS)
    rows, mismatches = [], []
    for i, entry in enumerate(config["generators"]):
        if not isinstance(entry, dict):
            raise ConfigError(f"generator #{i} is not an object")
        gid = str(entry.get("id", f"gen{i}"))
        A = matrix_from_entry(entry, base_dir)
        p = parse_p(entry.get("p", config.get("p", 2)))
        params = {**config.get("params", {}), **entry.get("params", {})}
        expect = dict(entry.get("expect", {}))
        names = list(entry.get("criteria", [])) or list(expect) or list(DEFAULT_SUITE)
        for name in names:
            want = expect.get(name, "pass")
            if want not in ("pass", "fail"):
                raise ConfigError(f"{gid}/{name}: expectation must be 'pass' or 'fail', got {want!r}")
            rep = run_criterion(name, A, p, params, tol=tol, **norm_opts)
            rows.append(
                {
                    "criterion": name,
                    "generator_id": gid,
                    "p": p_label(p),
                    "grid": CRITERIA[name].grid(),
                    "pass": rep.passed,
                    "worst_param": jsonable(rep.worst_param),
                    "margin": jsonable(rep.margin),
                }
            )
            if rep.passed != (want == "pass"):
                mismatches.append(f"{gid}/{name}: expected {want}, got {'pass' if rep.passed else 'fail'}")
    return SuiteResult(rows, mismatches)
