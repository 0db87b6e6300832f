"""Command-line front end: ``bihenon <command> [options]``.

Options may also come from an INI file given with ``--config``. Keys are read
from the ``[bihenon]`` section and then from a section named after the
command; flags given on the command line win over both. Unknown keys are
rejected.

Exit status: 0 when every verdict passes, 1 for usage errors, 2 for
computational errors or failed verdicts (the report says which).
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from . import report as rep
from .energy import PROOF_FORM, TYPESET_FORM, monotonicity_check
from .errors import BihenonError, InvalidParameters
from .identities import (
    SOLUTION_RESIDUAL_LIMIT,
    catalog,
    gradient_weight_defect,
    hardy_rellich_ratio,
    pohozaev_defect,
    product_rule_defect,
)
from .params import (
    ProblemParams,
    classify,
    derive_scalars,
    hardy_rellich_constant,
    jl_exponent,
    n_threshold,
    sobolev_critical,
)
from .shooting import ShootingConfig, estimate_decay, integrate, ode_residual
from .singular import build_singular, is_stable_singular, residual_scale, singular_residual
from .sphere import scan_grid

OUTPUT_DIR_ENV = "BIHENON_OUTPUT_DIR"
EXIT_OK, EXIT_USAGE, EXIT_FAILURE = 0, 1, 2
SINGULAR_RESIDUAL_TOL = 1e-10


class UsageError(Exception):
    pass


# -- option parsing -------------------------------------------------------------


def int_list(text: str) -> list[int]:
    """``5:20`` (inclusive range) or ``5,6,9``."""
    text = str(text).strip()
    try:
        if ":" in text:
            lo, hi = (int(x) for x in text.split(":"))
            if hi < lo:
                raise UsageError(f"empty range {text!r}")
            return list(range(lo, hi + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad integer list {text!r}") from exc


def float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad number list {text!r}") from exc


@dataclass(frozen=True)
class Option:
    parse: object
    default: object = None
    required: bool = False
    positive: bool = False
    help: str = ""


N = Option(int, required=True, help="dimension n >= 5")
A = Option(float, 0.0, help="weight exponent a >= 0")
P = Option(float, required=True, help="nonlinearity exponent p > 1")
SHOOT = {
    "n": N, "a": A, "p": P,
    "alpha": Option(float, 1.0, help="u(0)"),
    "b": Option(float, -0.5, help="Δu(0)"),
    "r_start": Option(float, 1e-4, positive=True, help="first radius"),
    "r_max": Option(float, 10.0, positive=True, help="integration horizon"),
    "rel_tol": Option(float, 1e-11, positive=True, help="relative tolerance"),
    "abs_tol": Option(float, 1e-14, positive=True, help="absolute tolerance"),
    "blowup_bound": Option(float, 1e8, positive=True, help="stop when |u| or |Δu| exceeds this"),
}

COMMANDS: dict[str, dict[str, Option]] = {
    "exponents": {
        "n": Option(int_list, required=True, help="dimensions, e.g. 5:20 or 13,14"),
        "a": Option(float_list, [0.0], help="weights, e.g. 0,1,2"),
    },
    "classify": {"n": N, "a": A, "p": P},
    "singular": {
        "n": N, "a": A, "p": P,
        "radii": Option(int, 20, positive=True, help="number of log-spaced radii"),
        "r_lo": Option(float, 1e-2, positive=True, help="smallest radius"),
        "r_hi": Option(float, 1e2, positive=True, help="largest radius"),
    },
    "shoot": dict(SHOOT),
    "energy": {
        **SHOOT,
        "radii": Option(int, 30, positive=True, help="number of log-spaced radii"),
        "r_lo": Option(float, 0.1, positive=True, help="smallest radius"),
        "r_hi": Option(float, 5.0, positive=True, help="largest radius"),
        "form": Option(str, PROOF_FORM, help=f"{PROOF_FORM} or {TYPESET_FORM}"),
    },
    "pohozaev": {
        **SHOOT,
        "radius": Option(float_list, [1.0, 2.0, 4.0], help="ball radii R"),
        "tol": Option(float, 1e-6, positive=True, help="pass threshold on |defect|"),
    },
    "identities": {
        "n": Option(int_list, [5, 6, 8, 13], help="dimensions"),
        "tol": Option(float, 1e-8, positive=True, help="pass threshold on |defect|"),
    },
    "scan": {
        "n": Option(int_list, required=True, help="dimensions"),
        "a": Option(float_list, [0.0], help="weights"),
        "p_step": Option(float, 0.01, positive=True, help="p grid spacing"),
        "p_cap": Option(float, 100.0, positive=True, help="largest p"),
        "workers": Option(int, 1, positive=True, help="worker processes"),
    },
}

GLOBAL_KEYS = ("format", "output")


@dataclass(frozen=True)
class RunConfig:
    command: str
    options: dict
    fmt: str = "json"
    output: str | None = None
    timing: bool = False


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bihenon", description="Numerical checks for Δ²u = |x|^a |u|^{p-1} u.")
    parser.add_argument("--version", action="version", version=f"bihenon {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, spec in COMMANDS.items():
        cmd = sub.add_parser(name, help=f"run the {name} command")
        cmd.add_argument("--config", help="INI file with default option values")
        cmd.add_argument("--format", choices=("json", "csv"), default=None,
                         help="output format (default json)")
        cmd.add_argument("--output", help=f"output file; relative paths go under ${OUTPUT_DIR_ENV}")
        cmd.add_argument("--timing", action="store_true", help="record wall-clock time")
        for key, opt in spec.items():
            default = opt.default if not isinstance(opt.default, list) else ",".join(map(str, opt.default))
            extra = "required" if opt.required else f"default {default}"
            cmd.add_argument("--" + key.replace("_", "-"), dest=key, default=None,
                             help=f"{opt.help} ({extra})")
    return parser


def _read_config(path: str, command: str) -> dict[str, str]:
    cp = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from exc
    unknown_sections = set(cp.sections()) - {"bihenon", command} - set(COMMANDS)
    if unknown_sections:
        raise UsageError(f"unknown config section(s): {', '.join(sorted(unknown_sections))}")
    values: dict[str, str] = {}
    for section in ("bihenon", command):
        if cp.has_section(section):
            for key, val in cp.items(section):
                values[key.replace("-", "_")] = val
    allowed = set(COMMANDS[command]) | set(GLOBAL_KEYS)
    unknown = sorted(set(values) - allowed)
    if unknown:
        raise UsageError(f"unknown config key(s) for {command}: {', '.join(unknown)}")
    return values


def _convert(key: str, opt: Option, raw):
    if isinstance(raw, str):
        try:
            value = opt.parse(raw)
        except ValueError as exc:
            raise UsageError(f"--{key.replace('_', '-')}: bad value {raw!r}") from exc
    else:
        value = raw
    if opt.positive:
        items = value if isinstance(value, list) else [value]
        if any(not (x > 0) for x in items):
            raise UsageError(f"--{key.replace('_', '-')} must be positive")
    return value


def parse_and_validate(argv: list[str]) -> RunConfig:
    args = build_parser().parse_args(argv)
    command = args.command
    spec = COMMANDS[command]
    file_values = _read_config(args.config, command) if args.config else {}

    options = {}
    for key, opt in spec.items():
        raw = getattr(args, key)
        if raw is None:
            raw = file_values.get(key, opt.default)
        if raw is None:
            if opt.required:
                raise UsageError(f"{command}: missing required option --{key.replace('_', '-')}")
            options[key] = None
            continue
        options[key] = _convert(key, opt, raw)

    fmt = args.format or file_values.get("format", "json")
    if fmt not in ("json", "csv"):
        raise UsageError(f"unknown format {fmt!r}")
    _validate(command, options)
    return RunConfig(command, options, fmt, args.output or file_values.get("output"), args.timing)


def _validate(command: str, o: dict) -> None:
    try:
        if {"n", "p"} <= o.keys() and not isinstance(o["n"], list):
            ProblemParams(o["n"], o["a"], o["p"])
        if "r_start" in o and not o["r_start"] < o["r_max"]:
            raise UsageError("--r-start must be below --r-max")
        if "r_lo" in o and not o["r_lo"] < o["r_hi"]:
            raise UsageError("--r-lo must be below --r-hi")
        if "form" in o and o["form"] not in (PROOF_FORM, TYPESET_FORM):
            raise UsageError(f"unknown energy form {o['form']!r}")
        if command in ("exponents", "scan", "identities"):
            if not o["n"]:
                raise UsageError("--n is empty")
            if any(n < 5 for n in o["n"]):
                raise UsageError("dimensions must be >= 5")
            if any(not a >= 0 for a in o.get("a") or []):
                raise UsageError("weights must be >= 0")
    except InvalidParameters as exc:
        raise UsageError(str(exc)) from exc


# -- commands ------------------------------------------------------------------------


def _params(o) -> ProblemParams:
    return ProblemParams(o["n"], o["a"], o["p"])


def _shoot(o):
    config = ShootingConfig(alpha=o["alpha"], b=o["b"], r_start=o["r_start"], r_max=o["r_max"],
                            rel_tol=o["rel_tol"], abs_tol=o["abs_tol"],
                            blowup_bound=o["blowup_bound"])
    return integrate(config, _params(o))


def _solution_summary(report, sol) -> None:
    report["summary"].update({
        "termination": sol.termination,
        "blowup_radius": sol.blowup_radius,
        "r_end": sol.r_end,
        "grid_points": len(sol.r),
    })


def run_exponents(o, report):
    for n in o["n"]:
        for a in o["a"]:
            report["records"].append({
                "n": n, "a": a,
                "p_crit": sobolev_critical(n, a),
                "n_a": n_threshold(a),
                "p_a": jl_exponent(n, a),
            })


def run_classify(o, report):
    params = _params(o)
    regime = classify(params)
    d = derive_scalars(params)
    report["records"].append({
        "n": params.n, "a": params.a, "p": params.p, "regime": regime.tag,
        "p_crit": regime.p_crit, "p_a": regime.p_jl,
        "beta": d.beta, "rho": d.rho, "gamma": d.gamma, "ell1": d.ell1, "ell2": d.ell2, "c": d.c,
    })


def run_singular(o, report):
    params = _params(o)
    sol = build_singular(params)
    report["summary"].update({"amplitude": sol.amplitude, "decay": sol.decay,
                              "is_stable": is_stable_singular(params)})
    worst = 0.0
    for r in np.geomspace(o["r_lo"], o["r_hi"], o["radii"]):
        scaled = abs(singular_residual(sol, float(r))) / residual_scale(sol, float(r))
        worst = max(worst, scaled)
        report["records"].append({"r": float(r), "u": float(sol(r)), "scaled_residual": scaled})
    rep.add_verdict(report, "singular_residual", worst < SINGULAR_RESIDUAL_TOL,
                    SINGULAR_RESIDUAL_TOL - worst)


def run_shoot(o, report):
    sol = _shoot(o)
    _solution_summary(report, sol)
    try:
        report["summary"]["decay_slope"] = estimate_decay(sol)
    except BihenonError as exc:
        report["summary"]["decay_slope"] = None
        report["summary"]["decay_note"] = str(exc)
    for s in sol.samples():
        report["records"].append({"r": s.r, "u": s.u, "du": s.du, "v": s.v, "dv": s.dv})
    worst = float(np.max(ode_residual(sol))) if len(sol.r) > 1 else 0.0
    rep.add_verdict(report, "ode_residual", worst <= SOLUTION_RESIDUAL_LIMIT,
                    SOLUTION_RESIDUAL_LIMIT - worst)


def run_energy(o, report):
    sol = _shoot(o)
    _solution_summary(report, sol)
    radii = np.geomspace(o["r_lo"], o["r_hi"], o["radii"])
    trace, verdict = monotonicity_check(sol, radii, form=o["form"])
    for r, e, bound, est, tol in zip(trace.radii, trace.E, trace.dE_bound, trace.dE_estimate,
                                     trace.tolerance):
        report["records"].append({"r": r, "E": e, "dE_bound": bound, "dE_estimate": est,
                                  "tolerance": tol})
    rep.add_verdict(report, "monotonicity", verdict.passed, verdict.worst_margin)


def run_pohozaev(o, report):
    sol = _shoot(o)
    _solution_summary(report, sol)
    for R in o["radius"]:
        res = pohozaev_defect(sol, R)
        report["records"].append({"R": res.radius, "lhs": res.lhs, "rhs": res.rhs,
                                  "defect": res.defect})
        rep.add_verdict(report, f"pohozaev_R={R!r}", abs(res.defect) < o["tol"],
                        o["tol"] - abs(res.defect))


def run_identities(o, report):
    funcs = catalog()
    tol = o["tol"]
    for n in o["n"]:
        worst = 0.0
        for i, zeta in enumerate(funcs):
            for j, eta in enumerate(funcs):
                d1 = product_rule_defect(zeta, eta, n)
                d2 = gradient_weight_defect(zeta, eta, n)
                worst = max(worst, abs(d1), abs(d2))
                report["records"].append({"kind": "pair", "n": n, "zeta": f"{i}:{zeta.name}",
                                          "eta": f"{j}:{eta.name}", "product_rule_defect": d1,
                                          "gradient_weight_defect": d2})
        rep.add_verdict(report, f"identities_n={n}", worst < tol, tol - worst)
        bound = hardy_rellich_constant(n)
        low = math.inf
        for i, psi in enumerate(funcs):
            ratio = hardy_rellich_ratio(psi, n)
            low = min(low, ratio)
            report["records"].append({"kind": "hardy_rellich", "n": n, "psi": f"{i}:{psi.name}",
                                      "ratio": ratio, "constant": bound})
        rep.add_verdict(report, f"hardy_rellich_n={n}", low >= bound * (1 - 1e-8),
                        low / bound - 1)


def _scan_one(args):
    n, a, p_step, p_cap = args
    return scan_grid([n], [a], p_step, p_cap)


def run_scan(o, report):
    jobs = [(n, a, o["p_step"], o["p_cap"]) for n in sorted(set(o["n"])) for a in sorted(set(o["a"]))]
    if o["workers"] > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=o["workers"]) as pool:
            results = list(pool.map(_scan_one, jobs))
    else:
        results = [_scan_one(job) for job in jobs]
    rows = sorted((r for rows, _ in results for r in rows), key=lambda r: (r.n, r.a, r.p))
    summaries = sorted((s for _, ss in results for s in ss), key=lambda s: (s.n, s.a))
    for r in rows:
        report["records"].append({"n": r.n, "a": r.a, "p": r.p, "coeff1": r.coeff_bilaplacian,
                                  "coeff2": r.coeff_gradient, "coeff3": r.coeff_mass,
                                  "conclusion": r.conclusion})
    for s in summaries:
        margin = None
        if s.sign_changes and math.isfinite(s.p_jl):
            margin = s.step - abs(s.sign_changes[0] - s.p_jl)
        rep.add_verdict(report, f"scan_n={s.n}_a={s.a!r}", s.consistent, margin)


RUNNERS = {
    "exponents": run_exponents,
    "classify": run_classify,
    "singular": run_singular,
    "shoot": run_shoot,
    "energy": run_energy,
    "pohozaev": run_pohozaev,
    "identities": run_identities,
    "scan": run_scan,
}


def run(config: RunConfig) -> tuple[dict, int]:
    inputs = {k: v for k, v in sorted(config.options.items())}
    report = rep.new_report(config.command, inputs, __version__)
    started = time.perf_counter()
    try:
        RUNNERS[config.command](config.options, report)
    except (BihenonError, ValueError) as exc:
        rep.add_error(report, exc)
    if config.timing:
        report["timing"] = {"wall_seconds": time.perf_counter() - started}
    return report, EXIT_OK if rep.passed(report) else EXIT_FAILURE


def render(report: dict, fmt: str) -> str:
    return rep.to_json(report) if fmt == "json" else rep.records_csv(report["records"])


def _destination(output: str) -> Path:
    path = Path(output)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    return path


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        config = parse_and_validate(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report, status = run(config)
    text = render(report, config.fmt)
    if config.output:
        path = _destination(config.output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)
    if config.fmt == "csv":
        # csv carries records only; verdicts and errors go to stderr
        for v in report["verdicts"]:
            print(f"{'PASS' if v['passed'] else 'FAIL'} {v['name']}", file=sys.stderr)
    for e in report["errors"]:
        print(f"error: {e['type']}: {e['message']}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
