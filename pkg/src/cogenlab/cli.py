"""Command-line front end.

Exit codes: 0 expectations met, 1 mismatch, 2 input or config error,
3 singularity or other numerical breakdown.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import dataclasses
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import laguerre, shift
from .cogenerator import cayley, inverse_duality_residual, v_tau
from .config import DEFAULTS, Tolerances
from .errors import (
    BracketError,
    CogenError,
    ConfigError,
    NumericalError,
    RangeError,
    SingularityError,
)
from .families import FAMILIES, jordan_generator, random_stable
from .matrix_core import read_matrix, spectrum, write_matrix
from .report import jsonable
from .semigroup import poly_resolvent_check, threshold_search
from .suite import DEFAULT_SUITE, p_label, parse_p, run_suite, tolerances_from

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_SINGULAR = 0, 1, 2, 3


@dataclass
class RunConfig:
    command: str
    p: float = 2.0
    tol: Tolerances = DEFAULTS
    jobs: int = 1
    seed: int = 0
    out: str | None = None
    settings: dict = field(default_factory=dict)


def fmt(x) -> str:
    """17 significant digits, the round-trip precision of a double."""
    return format(float(x), ".17g")


@contextlib.contextmanager
def _sink(path: str | None):
    if path in (None, "-"):
        yield sys.stdout
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            yield fh


def _write_csv(path, header, rows) -> None:
    with _sink(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _write_json(path, obj) -> None:
    with _sink(path) as fh:
        fh.write(json.dumps(jsonable(obj), indent=2) + "\n")


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _norm_opts(cfg: RunConfig) -> dict:
    return {"seed": cfg.seed}


def load_config(path: str | None) -> tuple[dict, Path]:
    if path is None:
        return {}, Path(".")
    p = Path(path)
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return data, p.parent


# -- commands ---------------------------------------------------------------


def cmd_cayley(cfg: RunConfig, args) -> int:
    A = read_matrix(args.matrix)
    taus = args.tau or [1.0]
    out = Path(cfg.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    V = cayley(A, tol=cfg.tol)
    write_matrix(out / "V.txt", V)
    report = {"A": dataclasses.asdict(spectrum(A, tol=cfg.tol)), "V": dataclasses.asdict(spectrum(V, tol=cfg.tol))}
    report["V_tau"], report["duality_residual"] = {}, {}
    invertible = np.min(np.abs(np.linalg.eigvals(A))) > cfg.tol.eig_tol
    for tau in taus:
        Vt = v_tau(A, tau, tol=cfg.tol)
        write_matrix(out / f"V_tau_{fmt(tau)}.txt", Vt)
        report["V_tau"][fmt(tau)] = dataclasses.asdict(spectrum(Vt, tol=cfg.tol))
        res = inverse_duality_residual(A, tau, tol=cfg.tol) if invertible else None
        report["duality_residual"][fmt(tau)] = res
        _log(f"tau={fmt(tau)} duality residual={'n/a' if res is None else fmt(res)}")
    _write_json(str(out / "spectrum.json"), report)
    return EXIT_OK


def cmd_criteria(cfg: RunConfig, args) -> int:
    config, base = dict(cfg.settings), Path(args.config).parent if args.config else Path(".")
    if args.matrix:
        suite = args.suite.split(",") if args.suite else list(DEFAULT_SUITE)
        entry = {"id": Path(args.matrix).stem, "matrix_file": str(Path(args.matrix).resolve()), "criteria": suite}
        config = {**config, "generators": [entry]}
    if args.p is not None or "p" not in config:
        config["p"] = p_label(cfg.p)
    if args.M is not None or args.k is not None or args.n_max is not None:
        extra = {k: v for k, v in (("M", args.M), ("k", args.k), ("n_max", args.n_max)) if v is not None}
        config["params"] = {**config.get("params", {}), **extra}
    result = run_suite(config, base_dir=base, tol=cfg.tol, **_norm_opts(cfg))
    with _sink(cfg.out) as fh:
        fh.write(result.to_json() + "\n")
    for m in result.mismatches:
        _log(f"MISMATCH {m}")
    return EXIT_OK if result.ok else EXIT_MISMATCH


def cmd_threshold(cfg: RunConfig, args) -> int:
    s = cfg.settings
    family = args.family or s.get("family")
    if family not in FAMILIES:
        raise ConfigError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    interval = args.interval or s.get("interval")
    if not interval or len(interval) != 2:
        raise ConfigError("threshold needs an interval of two numbers")
    expect = args.expect if args.expect is not None else s.get("expect")
    expect_tol = args.expect_tol if args.expect_tol is not None else s.get("expect_tol", cfg.tol.thresh_tol)
    try:
        beta = threshold_search(FAMILIES[family], cfg.p, tuple(map(float, interval)), tol=cfg.tol)
    except BracketError as exc:
        raise ConfigError(str(exc)) from exc
    ok = expect is None or abs(beta - float(expect)) <= float(expect_tol)
    _write_json(cfg.out, {"family": family, "p": p_label(cfg.p), "beta_star": beta, "expected": expect, "pass": ok})
    return EXIT_OK if ok else EXIT_MISMATCH


def _n_values(lo: int, hi: int, step: int) -> list[int]:
    if lo < 1 or hi < lo or step < 1:
        raise ConfigError(f"bad n range {lo}..{hi} step {step}")
    return list(range(lo, hi + 1, step))


def cmd_laguerre(cfg: RunConfig, args) -> int:
    s = cfg.settings
    ks = args.k if args.k is not None else s.get("k", [0, 1, 2])
    ns = _n_values(args.n_min or s.get("n_min", 20), args.n_max or s.get("n_max", 200), args.n_step or s.get("n_step", 1))
    if len(ns) < 20 or max(ns) < 100:
        raise ConfigError("the n range needs at least 20 values reaching n >= 100")
    exp_tol = args.exp_tol if args.exp_tol is not None else s.get("exponent_tol", 0.1)
    rows, fits, ok = [], {}, True
    for k in ks:
        res = laguerre.integral_sweep(k, ns, cfg.jobs)
        rows += [[n, k, fmt(r.value), fmt(r.abs_error_estimate)] for n, r in zip(ns, res)]
        fit = laguerre.asymptotic_fit(ns, res)
        good = abs(fit.exponent - (k + 0.5)) <= exp_tol
        ok &= good
        fits[k] = fit
        _log(f"k={k} exponent={fmt(fit.exponent)} constant={fmt(fit.constant)} expected={k + 0.5} {'ok' if good else 'MISMATCH'}")
    _write_csv(cfg.out, ["n", "k", "integral", "abs_error_estimate"], rows)
    if args.fits:
        _write_json(args.fits, {str(k): dataclasses.asdict(f) for k, f in fits.items()})
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_shift_demo(cfg: RunConfig, args) -> int:
    s = cfg.settings
    k = args.k if args.k is not None else s.get("k", 0)
    ns = _n_values(args.n_min or s.get("n_min", 10), args.n_max or s.get("n_max", 120), args.n_step or s.get("n_step", 1))
    grid = {"step": args.step or s.get("step", shift.DEFAULT_STEP), "t_max": args.t_max or s.get("T_max", shift.DEFAULT_T_MAX)}
    exp_tol = args.exp_tol if args.exp_tol is not None else s.get("exponent_tol", 0.15)
    rows = shift.sharpness_sweep(k, ns, cfg.jobs, **grid)
    _write_csv(
        cfg.out,
        ["n", "k", "Vn_h_norm", "first_component_at_0", "laguerre_lower_bound"],
        [[r.n, r.k, fmt(r.vn_h_norm), fmt(r.first_component_at_0), fmt(r.laguerre_lower_bound)] for r in rows],
    )
    ok = True
    h0 = 1.0 if k == 0 else 0.0
    worst = max(abs(r.first_component_at_0 - (h0 - r.laguerre_lower_bound)) / r.laguerre_lower_bound for r in rows)
    _log(f"worst relative gap of (V^n h)_1(0) to the Laguerre bound: {fmt(worst)}")
    ok &= worst <= 1e-2
    if len(rows) >= 16:
        fit = shift.sharpness_exponent(rows)
        good = abs(fit.exponent - (k + 0.5)) <= exp_tol
        ok &= good
        _log(f"k={k} exponent={fmt(fit.exponent)} expected={k + 0.5} {'ok' if good else 'MISMATCH'}")
    if args.matrix_check:
        rng = np.random.default_rng(cfg.seed)
        resid = max(shift.matrix_crosscheck(random_stable(3, rng), 20) for _ in range(20))
        _log(f"matrix cross-check max residual: {fmt(resid)}")
        ok &= resid < 1e-6
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_poly_res_check(cfg: RunConfig, args) -> int:
    s = cfg.settings
    if args.matrix:
        A = read_matrix(args.matrix)
    elif args.jordan is not None:
        A = jordan_generator(args.jordan)
    else:
        raise ConfigError("poly-res-check needs a matrix file or --jordan K")
    k = args.k if args.k is not None else s.get("k")
    M = args.M if args.M is not None else s.get("M")
    if k is None or M is None:
        raise ConfigError("poly-res-check needs --k and --M")
    expect = args.expect or s.get("expect", "pass")
    rep = poly_resolvent_check(A, cfg.p, int(k), float(M), a0=args.a0 or s.get("a0"), tol=cfg.tol)
    _write_json(cfg.out, rep.to_dict())
    return EXIT_OK if rep.passed == (expect == "pass") else EXIT_MISMATCH


# -- parser -----------------------------------------------------------------


def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--p", default=d(None), help="norm index: a number >= 1 or 'inf'")
    parser.add_argument("--tol", type=float, default=d(None), help="relative tolerance for inequality checks")
    parser.add_argument("--jobs", type=int, default=d(1), help="worker processes for sweeps")
    parser.add_argument("--seed", type=int, default=d(None), help="seed for random starts and fixtures")
    parser.add_argument("--out", default=d(None), help="output file (directory for cayley); default stdout")
    parser.add_argument("--config", default=d(None), help="JSON config file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cogenlab", description=__doc__.splitlines()[0])
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        sp = sub.add_parser(name, help=help_)
        _global_options(sp, suppress=True)
        return sp

    sp = add("cayley", "write the cogenerator and rescaled cogenerators of a matrix")
    sp.add_argument("matrix")
    sp.add_argument("--tau", type=float, nargs="+")

    sp = add("criteria", "run criterion checks against expectations")
    sp.add_argument("--matrix")
    sp.add_argument("--suite", help="comma separated criteria (with --matrix)")
    sp.add_argument("--M", type=float)
    sp.add_argument("--k", type=int)
    sp.add_argument("--n-max", type=int)

    sp = add("threshold", "bisect a family parameter for semigroup contractivity")
    sp.add_argument("--family", choices=sorted(FAMILIES))
    sp.add_argument("--interval", type=float, nargs=2)
    sp.add_argument("--expect", type=float)
    sp.add_argument("--expect-tol", type=float)

    sp = add("laguerre", "weighted Laguerre integral sweep with exponent fits")
    sp.add_argument("--k", type=int, nargs="+")
    sp.add_argument("--n-min", type=int)
    sp.add_argument("--n-max", type=int)
    sp.add_argument("--n-step", type=int)
    sp.add_argument("--exp-tol", type=float)
    sp.add_argument("--fits", help="write the fitted exponents as JSON here")

    sp = add("shift-demo", "cogenerator powers on the Jordan shift semigroup")
    sp.add_argument("--k", type=int)
    sp.add_argument("--n-min", type=int)
    sp.add_argument("--n-max", type=int)
    sp.add_argument("--n-step", type=int)
    sp.add_argument("--step", type=float)
    sp.add_argument("--t-max", type=float)
    sp.add_argument("--exp-tol", type=float)
    sp.add_argument("--matrix-check", action="store_true")

    sp = add("poly-res-check", "polynomial resolvent bound on a matrix generator")
    sp.add_argument("matrix", nargs="?")
    sp.add_argument("--jordan", type=int, metavar="K", help="use the nilpotent (K+1)-block instead")
    sp.add_argument("--k", type=int)
    sp.add_argument("--M", type=float)
    sp.add_argument("--a0", type=float)
    sp.add_argument("--expect", choices=["pass", "fail"])
    return parser


COMMANDS = {
    "cayley": cmd_cayley,
    "criteria": cmd_criteria,
    "threshold": cmd_threshold,
    "laguerre": cmd_laguerre,
    "shift-demo": cmd_shift_demo,
    "poly-res-check": cmd_poly_res_check,
}


def make_run_config(args) -> RunConfig:
    settings, _ = load_config(args.config)
    tol = tolerances_from(settings.get("tolerances"))
    if args.tol is not None:
        if not args.tol > 0:
            raise ConfigError("--tol must be positive")
        tol = dataclasses.replace(tol, rel_tol=args.tol)
    p_raw = args.p if args.p is not None else settings.get("p", "inf" if args.command == "threshold" else 2)
    if args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    return RunConfig(
        command=args.command,
        p=parse_p(p_raw),
        tol=tol,
        jobs=args.jobs,
        seed=int(args.seed if args.seed is not None else settings.get("seed", 0)),
        out=args.out if args.out is not None else settings.get("out"),
        settings=settings,
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        cfg = make_run_config(args)
        return COMMANDS[args.command](cfg, args)
    except SingularityError as exc:
        _log(f"singularity: {exc}")
        return EXIT_SINGULAR
    except (NumericalError, RangeError) as exc:
        _log(f"numerical failure: {exc}")
        return EXIT_SINGULAR
    except (CogenError, ValueError, OSError) as exc:
        _log(f"input error: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
