"""Command-line front end: ``fracfields <subcommand> --<selector> NAME [--param value ...]``.

Exit codes: 0 success, 1 numerical failure, 2 usage error, 3 a verification
check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import fields as fl
from . import moments as mo
from . import samplers as smp
from . import specfun as sf
from . import verify as vf

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2, 3
SEED_ENV = "FRACFIELDS_SEED"


class UsageError(Exception):
    pass


# flag name -> (type, help)
PARAMS = {
    "alpha": (float, "stable index"),
    "beta": (float, "inverse stable index"),
    "alpha1": (float, "stable index, first axis"),
    "beta1": (float, "inverse stable index, first axis"),
    "alpha2": (float, "stable index, second axis"),
    "beta2": (float, "inverse stable index, second axis"),
    "gamma": (float, "stable index of the counting clock (Type III)"),
    "sigma": (float, "Wright sigma"),
    "rho": (float, "Wright rho"),
    "lambda": (float, "field intensity"),
    "lambda1": (float, "rate of the first Poisson coordinate"),
    "lambda2": (float, "rate of the second Poisson coordinate"),
    "a": (float, "drift"),
    "x": (float, "argument"),
    "c": (float, "coefficient"),
    "u": (float, "pgf argument"),
    "t": (float, "time"),
    "s": (float, "earlier time"),
    "t1": (float, "first time coordinate"),
    "t2": (float, "second time coordinate"),
    "s1": (float, "earlier first coordinate"),
    "s2": (float, "earlier second coordinate"),
    "eta": (float, "Laplace variable in space"),
    "eta1": (float, "space Laplace variable, first axis"),
    "eta2": (float, "space Laplace variable, second axis"),
    "z": (float, "Laplace variable in time"),
    "z1": (float, "time Laplace variable, first axis"),
    "z2": (float, "time Laplace variable, second axis"),
    "n": (int, "count"),
    "n-max": (int, "largest count (pmf rows 0..n-max)"),
    "axis": (int, "time axis, 1 or 2"),
    "pair": (str, "clock dependence: independent or common"),
}


@dataclass
class Op:
    func: Callable  # called with the resolved keyword parameters, returns rows
    required: tuple
    optional: dict = field(default_factory=dict)


# -- eval -------------------------------------------------------------------

EVAL = {
    "mittag_leffler": Op(lambda alpha, beta, x: sf.mittag_leffler(alpha, beta, x), ("alpha", "beta", "x")),
    "wright": Op(lambda sigma, rho, x: sf.wright(sigma, rho, x), ("sigma", "rho", "x")),
    "rgamma": Op(lambda x: sf.rgamma(x), ("x",)),
    "stable_density": Op(lambda alpha, x, t: float(smp.stable_density(alpha, x, t)), ("alpha", "x"), {"t": 1.0}),
    "stable_cdf": Op(lambda alpha, x, t: float(smp.stable_cdf(alpha, x, t)), ("alpha", "x"), {"t": 1.0}),
    "inverse_stable_density": Op(lambda beta, x, t: float(smp.inverse_stable_density(beta, x, t)),
                                 ("beta", "x"), {"t": 1.0}),
    "inverse_stable_cdf": Op(lambda beta, x, t: float(smp.inverse_stable_cdf(beta, x, t)), ("beta", "x"), {"t": 1.0}),
    "composition_density": Op(lambda alpha, beta, x, t: smp.composition_density(alpha, beta, x, t),
                              ("alpha", "beta", "x"), {"t": 1.0}),
    "typeIII_density": Op(lambda gamma, alpha, beta, x, t1, t2, a, **kw:
                          fl.typeIII_density(kw["lambda"], a, gamma, alpha, beta, x, t1, t2),
                          ("lambda", "a", "gamma", "alpha", "beta", "x", "t1", "t2")),
}

# -- pmf --------------------------------------------------------------------

PMF = {
    "prf": (lambda p, n: fl.prf_pmf(p["lambda"], n, p["t1"], p["t2"]), ("lambda", "t1", "t2")),
    "tc": (lambda p, n: fl.tc_prf_pmf(p["lambda"], p["alpha1"], p["beta1"], n, p["t1"], p["t2"]),
           ("lambda", "alpha1", "beta1", "t1", "t2")),
    "tc_swapped": (lambda p, n: fl.tc_prf_pmf_swapped(p["lambda"], p["alpha2"], p["beta2"], n, p["t1"], p["t2"]),
                   ("lambda", "alpha2", "beta2", "t1", "t2")),
    "double": (lambda p, n: fl.double_fractional_pmf(p["lambda"], p["beta1"], p["beta2"], n, p["t1"], p["t2"]),
               ("lambda", "beta1", "beta2", "t1", "t2")),
    "stable_inverse": (lambda p, n: fl.stable_inverse_pmf(p["lambda"], p["alpha1"], p["beta2"], n, p["t1"], p["t2"]),
                       ("lambda", "alpha1", "beta2", "t1", "t2")),
}


# -- laplace ----------------------------------------------------------------

def _bivariate(alpha, beta, eta1, eta2, z1, z2, pair):
    # same index for the outer stable pair and the pair behind the inverse clocks
    if alpha != beta:
        raise ValueError("bivariate transform needs alpha == beta")
    B1, B2, B = smp.stable_exponents(pair, alpha)
    return smp.bivariate_composition_double_laplace(B1, B2, B, eta1, eta2, z1, z2)


def _kw(f):
    # ``lambda`` is a Python keyword, so it arrives in **kw
    return lambda **kw: f(kw.pop("lambda"), **kw)


LAPLACE = {
    "inverse_stable": Op(lambda beta, eta, t: smp.inverse_stable_laplace(beta, eta, t), ("beta", "eta"), {"t": 1.0}),
    "composition": Op(lambda alpha, beta, eta, t: smp.composition_laplace(alpha, beta, eta, t),
                      ("alpha", "beta", "eta"), {"t": 1.0}),
    "composition_time": Op(lambda alpha, beta, x, z: smp.composition_time_laplace(alpha, beta, x, z),
                           ("alpha", "beta", "x", "z")),
    "bivariate": Op(_bivariate, ("alpha", "beta", "eta1", "eta2", "z1", "z2"), {"pair": "independent"}),
    "tc_pgf": Op(_kw(lambda lam, alpha1, beta1, u, t1, t2: fl.tc_prf_pgf(lam, alpha1, beta1, u, t1, t2)),
                 ("lambda", "alpha1", "beta1", "u", "t1", "t2")),
    "drifted": Op(_kw(lambda lam, a, eta, t1, t2: fl.drifted_laplace(lam, a, eta, t1, t2)),
                  ("lambda", "eta", "t1", "t2"), {"a": 0.0}),
    "typeI": Op(_kw(lambda lam, a, beta1, beta2, eta, t1, t2: fl.typeI_laplace(lam, a, beta1, beta2, eta, t1, t2)),
                ("lambda", "beta1", "beta2", "eta", "t1", "t2"), {"a": 0.0}),
    "typeII": Op(_kw(lambda lam, a, alpha, beta, eta, t1, t2: fl.typeII_laplace(lam, a, alpha, beta, eta, t1, t2)),
                 ("lambda", "alpha", "beta", "eta", "t1", "t2"), {"a": 0.0}),
    "typeIII": Op(_kw(lambda lam, a, gamma, alpha, beta, eta, t1, t2:
                      fl.typeIII_laplace(lam, a, gamma, alpha, beta, eta, t1, t2)),
                  ("lambda", "gamma", "alpha", "beta", "eta", "t1", "t2"), {"a": 0.0}),
}


# -- moments ----------------------------------------------------------------

def _inverse_stable_moments(beta, s, t):
    m = mo.inverse_stable_moments(beta, s, t)
    lo, hi = min(s, t), max(s, t)
    return [("mean", m.mean), ("variance", m.variance), ("covariance", m.cross_cov[(lo, hi)])]


def _fprf(lam, beta1, beta2, s1, s2, t1, t2):
    m = mo.fprf_moments(lam, beta1, beta2, s1, s2, t1, t2)
    return [("mean", m.mean), ("variance", m.variance), ("autocovariance", m.autocov),
            ("autocorrelation", m.autocorrelation)]


def _tclp(lambda1, lambda2, beta1, beta2, s, t, pair):
    outer = mo.OuterMoments.independent_poisson(lambda1, lambda2)
    clocks = mo.ClockMoments.inverse_stable(beta1, beta2, common=(pair == "common"))
    return [(f"cov{i}{j}", mo.tclp_autocov(outer, clocks, i, j, s, t)) for i, j in ((1, 1), (2, 2), (1, 2))]


MOMENTS = {
    "inverse_stable": Op(_inverse_stable_moments, ("beta", "t"), {"s": None}),
    "fprf": Op(_kw(_fprf), ("lambda", "beta1", "beta2", "t1", "t2"), {"s1": None, "s2": None}),
    "tclp": Op(_tclp, ("lambda1", "lambda2", "beta1", "beta2", "s", "t"), {"pair": "independent"}),
}


# -- residual ---------------------------------------------------------------

RESIDUAL = {
    "caputo_ml": Op(lambda beta, c, t: sf.caputo_ml_residual(beta, c, t), ("beta", "c", "t")),
    "caputo_fde": Op(_kw(lambda lam, alpha1, beta1, n, t1, t2: fl.caputo_fde_residual(lam, alpha1, beta1, n, t1, t2)),
                     ("lambda", "alpha1", "beta1", "n", "t1", "t2")),
    "pgf_ode": Op(_kw(lambda lam, alpha1, beta1, u, t1, t2: fl.pgf_ode_residual(lam, alpha1, beta1, u, t1, t2)),
                  ("lambda", "alpha1", "beta1", "u", "t1", "t2")),
    "double_caputo": Op(_kw(lambda lam, beta1, beta2, n, t1, t2:
                            fl.double_caputo_recursion_residual(lam, beta1, beta2, n, t1, t2)),
                        ("lambda", "beta1", "beta2", "n", "t1", "t2")),
    "drifted_laplace": Op(_kw(lambda lam, a, eta, t1, t2, axis:
                              fl.drifted_laplace_residual(lam, a, eta, t1, t2, axis)),
                          ("lambda", "eta", "t1", "t2"), {"a": 0.0, "axis": 1}),
}


# -- simulate ---------------------------------------------------------------

TC = smp.TimeChangeSpec


def _field_sampler(lam, t1, t2, clock1=None, clock2=None, a=0.0):
    model = fl.FieldModel(lam, clock1 or TC.identity(), clock2 or TC.identity(), a)
    return lambda rng, size: fl.sample_field(model, t1, t2, rng, size)


SIMULATE = {
    "stable": Op(lambda alpha, t: lambda rng, n: smp.sample_stable(alpha, t, rng, n), ("alpha",), {"t": 1.0}),
    "inverse_stable": Op(lambda beta, t: lambda rng, n: smp.sample_inverse_stable(beta, t, rng, n),
                         ("beta",), {"t": 1.0}),
    "composition": Op(lambda alpha, beta, t: lambda rng, n: smp.sample_composition(alpha, beta, t, rng, n),
                      ("alpha", "beta"), {"t": 1.0}),
    "prf": Op(_kw(lambda lam, t1, t2, a: _field_sampler(lam, t1, t2, a=a)), ("lambda", "t1", "t2"), {"a": 0.0}),
    "tc": Op(_kw(lambda lam, alpha1, beta1, t1, t2: _field_sampler(lam, t1, t2, TC.composition(alpha1, beta1))),
             ("lambda", "alpha1", "beta1", "t1", "t2")),
    "double": Op(_kw(lambda lam, beta1, beta2, t1, t2:
                     _field_sampler(lam, t1, t2, TC.inverse_stable(beta1), TC.inverse_stable(beta2))),
                 ("lambda", "beta1", "beta2", "t1", "t2")),
    "stable_inverse": Op(_kw(lambda lam, alpha1, beta2, t1, t2:
                             _field_sampler(lam, t1, t2, TC.stable(alpha1), TC.inverse_stable(beta2))),
                         ("lambda", "alpha1", "beta2", "t1", "t2")),
    "typeI": Op(_kw(lambda lam, a, beta1, beta2, t1, t2:
                    _field_sampler(lam, t1, t2, TC.inverse_stable(beta1), TC.inverse_stable(beta2), a)),
                ("lambda", "beta1", "beta2", "t1", "t2"), {"a": 0.0}),
    "typeII": Op(_kw(lambda lam, a, alpha, beta, t1, t2:
                     _field_sampler(lam, t1, t2, TC.stable(alpha), TC.inverse_stable(beta), a)),
                 ("lambda", "alpha", "beta", "t1", "t2"), {"a": 0.0}),
    "typeIII": Op(_kw(lambda lam, a, gamma, alpha, beta, t1, t2:
                      lambda rng, n: fl.sample_typeIII(lam, a, gamma, alpha, beta, t1, t2, rng, n)),
                  ("lambda", "gamma", "alpha", "beta", "t1", "t2"), {"a": 0.0}),
}

SELECTORS = {
    "eval": ("fn", EVAL),
    "pmf": ("family", PMF),
    "laplace": ("kind", LAPLACE),
    "moments": ("kind", MOMENTS),
    "residual": ("kind", RESIDUAL),
    "simulate": ("process", SIMULATE),
}


# -- output -----------------------------------------------------------------

def fmt_table(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    v = float(v)
    if v == 0 or (math.isfinite(v) and 1e-4 <= abs(v) < 1e6):
        return f"{v:.6f}"
    return f"{v:.6e}"


def render(header, rows, fmt: str) -> str:
    if fmt == "json":
        return json.dumps([dict(zip(header, _json_ready(r))) for r in rows], indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([c if isinstance(c, str) else vf.fmt17(c) for c in r])
        return buf.getvalue()
    cells = [list(header)] + [[fmt_table(c) for c in r] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    return "".join("  ".join(c.rjust(w) for c, w in zip(row, widths)).rstrip() + "\n" for row in cells)


def _json_ready(row):
    out = []
    for c in row:
        if isinstance(c, (bool, np.bool_, str)):
            out.append(c if not isinstance(c, np.bool_) else bool(c))
        elif isinstance(c, (int, np.integer)):
            out.append(int(c))
        else:
            out.append(vf._json_float(float(c)))
    return out


def emit(text: str, output: str | None):
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(output, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)


# -- parsing ----------------------------------------------------------------

def _seed_type(s: str) -> int:
    try:
        v = int(s, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {s!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2^64)")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fracfields", description="Time-changed Poisson random fields: evaluate, simulate, verify.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for cmd, (sel, table) in SELECTORS.items():
        sp = sub.add_parser(cmd)
        sp.add_argument(f"--{sel}", required=True, choices=sorted(table))
        for name, (typ, help_) in PARAMS.items():
            sp.add_argument(f"--{name}", dest=name.replace("-", "_"), type=typ, default=None, help=help_)
        sp.add_argument("--format", choices=("table", "json", "csv"), default="table")
        sp.add_argument("--output", "-o", default=None, help="file path; stdout by default")
        if cmd == "simulate":
            sp.add_argument("--samples", type=int, default=1000)
            sp.add_argument("--seed", type=_seed_type, default=None)
            sp.add_argument("--chunks", type=int, default=1)
    vp = sub.add_parser("verify")
    vp.add_argument("--manifest", default="default.json")
    vp.add_argument("--samples", type=int, default=100_000)
    vp.add_argument("--seed", type=_seed_type, default=None)
    vp.add_argument("--chunks", type=int, default=1)
    vp.add_argument("--workers", type=int, default=None)
    vp.add_argument("--sigmas", type=float, default=4.0, help="acceptance band in standard errors")
    vp.add_argument("--format", choices=("table", "json", "csv"), default="json")
    vp.add_argument("--output", "-o", default=None, help="report path; report.json or report.csv by default")
    return p


def resolve_seed(flag) -> int:
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV)
    if env is None or env.strip() == "":
        return 0
    try:
        return _seed_type(env.strip())
    except argparse.ArgumentTypeError as e:
        raise UsageError(f"{SEED_ENV}: {e}") from None


def _params(args, op: Op, extra_required=(), extra_optional=()) -> dict:
    """Pick the parameters ``op`` uses; any other numeric flag that was given is an error."""
    given = {name: getattr(args, name.replace("-", "_")) for name in PARAMS}
    given = {k: v for k, v in given.items() if v is not None}
    allowed = set(op.required) | set(op.optional) | set(extra_required) | set(extra_optional)
    unknown = sorted(set(given) - allowed)
    if unknown:
        raise UsageError("unused parameter(s) for this operation: " + ", ".join("--" + u for u in unknown))
    missing = [k for k in tuple(op.required) + tuple(extra_required) if k not in given]
    if missing:
        raise UsageError("missing parameter(s): " + ", ".join("--" + m for m in missing))
    out = dict(op.optional)
    out.update(given)
    return out


def _call(op: Op, params: dict):
    kw = {k.replace("-", "_"): v for k, v in params.items() if k in op.required or k in op.optional}
    return op.func(**kw)


# -- dispatch ---------------------------------------------------------------

def _run_scalar(args, op):
    params = _params(args, op)
    if "pair" in params and params["pair"] not in ("independent", "common"):
        raise UsageError("--pair must be independent or common")
    if "s" in op.optional and params.get("s") is None:
        params["s"] = params["t"]
    if "s1" in op.optional:
        params["s1"] = params["t1"] if params.get("s1") is None else params["s1"]
        params["s2"] = params["t2"] if params.get("s2") is None else params["s2"]
    out = _call(op, params)
    rows = out if isinstance(out, list) else [("value", out)]
    return ("quantity", "value"), [(k, float(v)) for k, v in rows]


def _run_pmf(args):
    func, required = PMF[args.family]
    params = _params(args, Op(func, required), extra_optional=("n", "n-max"))
    if ("n" in params) == ("n-max" in params):
        raise UsageError("give exactly one of --n and --n-max")
    ns = [params["n"]] if "n" in params else range(params["n-max"] + 1)
    if min(ns, default=0) < 0:
        raise UsageError("counts must be non-negative")
    return ("n", "probability"), [(n, float(func(params, n))) for n in ns]


def _run_simulate(args):
    op = SIMULATE[args.process]
    params = _params(args, op)
    if args.samples < 1 or args.chunks < 1:
        raise UsageError("--samples and --chunks must be at least 1")
    sampler = _call(op, params)
    seed = resolve_seed(args.seed)
    x = vf.draw_blocks(sampler, args.samples, seed, 0, args.chunks)
    return ("replicate", "value"), [(i, float(v)) for i, v in enumerate(x)]


def _run_verify(args) -> int:
    if args.samples < 1 or args.chunks < 1 or not args.sigmas > 0:
        raise UsageError("--samples, --chunks must be >= 1 and --sigmas positive")
    seed = resolve_seed(args.seed)
    try:
        manifest = vf.load_manifest(args.manifest)
    except FileNotFoundError:
        raise UsageError(f"manifest not found: {args.manifest}") from None
    except (json.JSONDecodeError, ValueError) as e:
        raise UsageError(f"bad manifest: {e}") from None
    cfg = vf.MCConfig(args.samples, seed, args.chunks, args.sigmas, args.workers)
    try:
        reports = vf.run_campaign(manifest, cfg)
    except (KeyError, TypeError) as e:
        raise UsageError(f"bad check parameters: {e}") from None
    if args.format == "csv":
        text = vf.reports_to_csv(reports)
    elif args.format == "json":
        text = vf.reports_to_json(reports)
    else:
        text = render(vf.REPORT_COLUMNS,
                      [(r.name, r.analytic, r.empirical, r.std_error, r.statistic, r.threshold, r.passed)
                       for r in reports], "table")
    out = args.output or ("report.csv" if args.format == "csv" else "report.json" if args.format == "json" else None)
    emit(text, out)
    failed = [r.name for r in reports if not r.passed]
    where = f" (report: {out})" if out not in (None, "-") else ""
    print(f"{len(reports) - len(failed)}/{len(reports)} checks passed{where}", file=sys.stderr)
    for name in failed:
        print(f"FAILED {name}", file=sys.stderr)
    return EXIT_VERIFY if failed else EXIT_OK


def dispatch(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "verify":
            return _run_verify(args)
        if args.command == "pmf":
            header, rows = _run_pmf(args)
        elif args.command == "simulate":
            header, rows = _run_simulate(args)
        else:
            sel, table = SELECTORS[args.command]
            header, rows = _run_scalar(args, table[getattr(args, sel)])
        emit(render(header, rows, args.format), args.output)
        return EXIT_OK
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (sf.SeriesError, ArithmeticError, FloatingPointError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, TypeError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main(argv=None):
    sys.exit(dispatch(argv))


if __name__ == "__main__":
    main()
