"""Command-line front end: ``modkg <subcommand> [flags]``.

Exit codes: 0 success, 2 hypothesis violated / not covered, 1 any other error.
``--config file.ini`` supplies defaults (section ``[modkg]`` and/or a section
named after the subcommand); explicit flags override them.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io as stdio
import json
import math
import os
import sys

import numpy as np

from . import admissibility as adm
from . import io as mio
from . import verify as ver
from .decomposition import decompose
from .errors import ConfigParse, HypothesisViolated, ModKGError
from .grid import Field, GridSpec, set_workers
from .norms import SpaceParams, besov_norm, modulation_norm, sobolev_norm, write_norm_report
from .operators import bessel_potential, kg_cosine, kg_sine, riesz_potential
from .solver import (
    CauchyData,
    Hartree,
    Power,
    SolverConfig,
    duhamel_picard,
    energy_drift,
    reference_integrator,
    residual,
)

EXIT_OK, EXIT_ERROR, EXIT_HYPOTHESIS = 0, 1, 2
PROBLEM_KEYS = ("k", "s", "p", "q", "theta", "mu", "r", "gamma")


def _float(text) -> float:
    """Float flag that also accepts exact rationals 'a/b' and 'inf'."""
    return float(adm.parse_number(text))


def _grid_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--L", type=_float, default=64.0)
    p.add_argument("--N", type=int, default=512)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="INI file with defaults for this subcommand")
    p.add_argument("--threads", type=int, help="FFT worker cap (overrides MODKG_THREADS)")
    p.add_argument("--seed", type=int, default=ver.DEFAULT_SEED)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="modkg", description="Modulation-space Klein-Gordon toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="split a field into its unit-band pieces")
    _common(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("norm", help="modulation / Besov / Sobolev norm of a field")
    _common(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--s", type=_float, default=0.0)
    p.add_argument("--p", type=_float, default=2.0)
    p.add_argument("--q", type=_float, default=2.0)
    kind = p.add_mutually_exclusive_group()
    kind.add_argument("--besov", action="store_true")
    kind.add_argument("--sobolev", action="store_true")
    p.add_argument("--out", help="CSV report path")

    p = sub.add_parser("propagate", help="apply K(t), K'(t), J_sigma or I_alpha")
    _common(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--kind", choices=("K", "Kp", "J", "Riesz"), required=True)
    p.add_argument("--t", type=_float, default=0.0)
    p.add_argument("--sigma", type=_float, default=0.0)
    p.add_argument("--alpha", type=_float)
    p.add_argument("--format-version", type=int, default=2, choices=(1, 2), help="MKGF version of the output")

    p = sub.add_parser("solve", help="Picard or Lawson-RK4 solve of u_tt + (I - Lap)u = F(u)")
    _common(p)
    _grid_args(p)
    data = p.add_mutually_exclusive_group()
    data.add_argument("--in", dest="input", help="u0 as MKGF (grid flags are then ignored)")
    data.add_argument("--plane-wave", help="lattice index j (comma separated for n > 1): u0 = exp(i xi_j . x)")
    data.add_argument("--gaussian", type=_float, metavar="AMPLITUDE", help="u0 = A exp(-|x|^2 / (2 width^2))")
    p.add_argument("--width", type=_float, default=1.0)
    p.add_argument("--in-ut", help="u1 as MKGF (default 0)")
    p.add_argument("--nonlinearity", choices=("none", "power", "hartree"), default="power")
    p.add_argument("--k", type=_float, default=2.5)
    p.add_argument("--focusing", action="store_true")
    p.add_argument("--mu", type=_float, default=1.5)
    p.add_argument("--T", type=_float, default=1.0)
    p.add_argument("--M", type=int, default=64)
    p.add_argument("--eps", type=_float, default=1e-8)
    p.add_argument("--max-sweeps", type=int, default=50)
    p.add_argument("--leakage-tol", type=_float, default=1e-4)
    p.add_argument("--method", choices=("picard", "lawson"), default="picard")
    p.add_argument("--format-version", type=int, default=2, choices=(1, 2))
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("admissible", help="check Theorem 1-4 / Lemma 3 / Remark 6 hypotheses")
    _common(p)
    p.add_argument("--n", type=int)
    for key in PROBLEM_KEYS:
        p.add_argument(f"--{key}")
    p.add_argument("--p-window", choices=("statement", "proof"), default="statement")
    p.add_argument("--sweep", help="INI file whose [grid] section lists values per parameter")
    p.add_argument("--out", help="JSON report (or CSV with --sweep); default stdout")

    p = sub.add_parser("verify", help="run one inequality of sections 2-3 on the ensemble")
    _common(p)
    p.add_argument("--inequality", required=True, choices=ver.INEQUALITIES)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=_float)
    p.add_argument("--count", type=int, default=ver.DEFAULT_COUNT)
    p.add_argument("--no-refine", action="store_true")
    p.add_argument("--out", help="CSV path; default stdout")

    p = sub.add_parser("decay", help="(3.1) decay fit; alias for verify 3.1 with the fitted series")
    _common(p)
    p.add_argument("--theta", type=_float, default=1.0)
    p.add_argument("--p", type=_float, default=4.0)
    p.add_argument("--q", type=_float, default=2.0)
    p.add_argument("--t0", type=_float, default=1.0)
    p.add_argument("--t1", type=_float, default=20.0)
    p.add_argument("--points", type=int, default=40)
    p.add_argument("--out", help="CSV path; default stdout")
    p.add_argument("--series", help="optional CSV of t, g(t), envelope")
    return ap


# --------------------------------------------------------------------------
# configuration


def _apply_config(ap: argparse.ArgumentParser, argv) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("command", nargs="?")
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    cp = configparser.ConfigParser()
    cp.optionxform = str
    try:
        with open(known.config) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigParse(f"cannot read config {known.config}: {exc}") from exc
    values = {}
    for section in ("modkg", known.command):
        if section and cp.has_section(section):
            values.update(cp.items(section))
    subparser = _subparsers(ap)[known.command]
    actions = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, raw in values.items():
        dest = key.replace("-", "_")
        if dest == "in":
            dest = "input"
        act = actions.get(dest)
        if act is None:
            raise ConfigParse(f"unknown config key {key!r} for {known.command}")
        if isinstance(act, argparse._StoreTrueAction):
            defaults[dest] = raw.strip().lower() in ("1", "true", "yes", "on")
        else:
            try:
                defaults[dest] = act.type(raw) if act.type else raw
            except (ValueError, ArithmeticError) as exc:
                raise ConfigParse(f"bad value for {key}: {raw!r}") from exc
            if act.choices is not None and defaults[dest] not in act.choices:
                raise ConfigParse(f"{key} must be one of {sorted(map(str, act.choices))}")
    subparser.set_defaults(**defaults)
    # Required flags may now come from the file.
    for dest in defaults:
        actions[dest].required = False


def _subparsers(ap):
    for a in ap._actions:
        if isinstance(a, argparse._SubParsersAction):
            return a.choices
    return {}


# --------------------------------------------------------------------------
# subcommands


def _emit(text: str, path) -> None:
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_decompose(a) -> int:
    f = mio.read_field(a.input)
    d = decompose(f)
    os.makedirs(a.out, exist_ok=True)
    with open(os.path.join(a.out, "index.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"k{i}" for i in range(f.spec.n)] + ["file", "l2"])
        for k in sorted(d.bands):
            name = "band_" + "_".join(str(v) for v in k) + ".mkgf"
            band = d.bands[k]
            mio.write_field(os.path.join(a.out, name), band)
            l2 = math.sqrt(float(np.sum(np.abs(band.values) ** 2)) * f.spec.h ** f.spec.n)
            w.writerow(list(k) + [name, repr(l2)])
    return EXIT_OK


def cmd_norm(a) -> int:
    f = mio.read_field(a.input)
    params = SpaceParams(a.s, a.p, a.q)
    if a.sobolev:
        kind, value = "sobolev", sobolev_norm(f, a.s)
    elif a.besov:
        kind, value = "besov", besov_norm(f, params)
    else:
        kind, value = "modulation", modulation_norm(f, params)
    row = {"norm_kind": kind, "s": a.s, "p": None if a.sobolev else a.p, "q": None if a.sobolev else a.q, "value": value}
    if a.out:
        write_norm_report(a.out, [row])
    else:
        print(f"{kind} {value!r}")
    return EXIT_OK


def cmd_propagate(a) -> int:
    f = mio.read_field(a.input)
    if a.kind == "K":
        g = kg_sine(f, a.t)
    elif a.kind == "Kp":
        g = kg_cosine(f, a.t)
    elif a.kind == "J":
        g = bessel_potential(f, a.sigma)
    else:
        if a.alpha is None:
            raise ConfigParse("--kind Riesz needs --alpha")
        g = riesz_potential(f, a.alpha)
    mio.write_field(a.out, g, a.format_version)
    return EXIT_OK


def _initial_data(a):
    if a.input:
        u0 = mio.read_field(a.input)
        spec = u0.spec
    else:
        spec = GridSpec(a.n, a.L, a.N)
        if a.plane_wave is not None:
            j = [int(v) for v in str(a.plane_wave).split(",")]
            if len(j) == 1:
                j = j + [0] * (spec.n - 1)
            if len(j) != spec.n:
                raise ConfigParse(f"--plane-wave needs {spec.n} indices")
            u0 = Field.plane_wave(spec, j)
        else:
            amp = 1.0 if a.gaussian is None else a.gaussian
            u0 = Field.from_function(spec, lambda *x: amp * np.exp(-sum(v * v for v in x) / (2 * a.width ** 2)))
    u1 = mio.read_field(a.in_ut) if a.in_ut else Field.zeros(spec)
    if u1.spec != spec:
        raise ConfigParse("u0 and u1 live on different grids")
    return CauchyData(u0, u1)


def cmd_solve(a) -> int:
    data = _initial_data(a)
    if a.nonlinearity == "none":
        model = None
    elif a.nonlinearity == "power":
        model = Power(a.k, sign=1 if a.focusing else -1)
    else:
        model = Hartree(a.mu)
    cfg = SolverConfig(a.T, a.M, nonlinearity=model, eps=a.eps, max_sweeps=a.max_sweeps, leakage_tol=a.leakage_tol)
    traj = duhamel_picard(data, cfg) if a.method == "picard" else reference_integrator(data, cfg)
    res = residual(traj, data, cfg)
    drift = energy_drift(traj) if traj.diagnostics.get("energy") else None
    mio.write_trajectory(a.out, traj, a.format_version)
    mio.write_diagnostics(os.path.join(a.out, "diagnostics.csv"), traj, res, drift)
    return EXIT_OK


def _sweep_grid(path) -> dict:
    cp = configparser.ConfigParser()
    cp.optionxform = str
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigParse(f"cannot read sweep grid {path}: {exc}") from exc
    if not cp.has_section("grid"):
        raise ConfigParse("sweep file needs a [grid] section")
    grid = {k: [v for v in raw.replace(",", " ").split()] for k, raw in cp.items("grid")}
    if "n" not in grid:
        raise ConfigParse("sweep grid must list n")
    unknown = set(grid) - {"n", *PROBLEM_KEYS}
    if unknown:
        raise ConfigParse(f"unknown sweep keys {sorted(unknown)}")
    grid["n"] = [int(v) for v in grid["n"]]
    return grid


def cmd_admissible(a) -> int:
    if a.sweep:
        rows = list(adm.sweep(_sweep_grid(a.sweep), p_window=a.p_window))
        if a.out:
            adm.write_sweep_csv(a.out, rows)
        else:
            buf = stdio.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            if rows:
                w.writerow(["params"] + [v.name for v in rows[0][1].results])
            for P, rep in rows:
                w.writerow([json.dumps(P.to_dict(), sort_keys=True)] + [v.status for v in rep.results])
            sys.stdout.write(buf.getvalue())
        return EXIT_OK
    if a.n is None:
        raise ConfigParse("admissible needs --n (or --sweep)")
    P = adm.ProblemParams.parse(a.n, **{k: getattr(a, k) for k in PROBLEM_KEYS})
    rep = adm.check_all(P, a.p_window)
    _emit(rep.to_json() + "\n", a.out)
    return rep.exit_code()


def cmd_verify(a) -> int:
    rep = ver.run_inequality(a.inequality, seed=a.seed, count=a.count, refine=not a.no_refine, n=a.n, k=a.k)
    _write_reports([rep], a.out)
    return EXIT_OK


def _write_reports(reports, path) -> None:
    if path:
        ver.write_reports_csv(path, reports)
        return
    buf = stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ver.CSV_COLUMNS)
    for r in reports:
        w.writerow(r.row())
    sys.stdout.write(buf.getvalue())


def cmd_decay(a) -> int:
    rep = ver.decay_run(theta=a.theta, p=a.p, q=a.q, t0=a.t0, t1=a.t1, points=a.points)
    _write_reports([rep], a.out)
    if a.series:
        g = np.array(rep.extra["series"][0])
        env = np.maximum.accumulate(g[::-1])[::-1]
        with open(a.series, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "g", "envelope"])
            for t, gv, ev in zip(rep.extra["times"], g, env):
                w.writerow([repr(float(t)), repr(float(gv)), repr(float(ev))])
    return EXIT_OK


COMMANDS = {
    "decompose": cmd_decompose,
    "norm": cmd_norm,
    "propagate": cmd_propagate,
    "solve": cmd_solve,
    "admissible": cmd_admissible,
    "verify": cmd_verify,
    "decay": cmd_decay,
}


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        _apply_config(ap, argv)
        a = ap.parse_args(argv)
    except ConfigParse as exc:
        print(f"modkg: config error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except SystemExit as exc:  # argparse usage errors
        return EXIT_ERROR if exc.code else EXIT_OK
    if a.threads is not None:
        set_workers(a.threads)
    try:
        return COMMANDS[a.command](a)
    except HypothesisViolated as exc:
        print(f"modkg: hypothesis violated: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (ModKGError, OSError, ValueError) as exc:
        print(f"modkg: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())
