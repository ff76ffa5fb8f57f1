"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 numerical or verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from ._common import relative_residual
from .diagnostics import Thresholds, normality_independence_report
from .errors import InputError, VarMomentsError
from .moments import (
    Ar1Spec,
    CrossMomentModel,
    ExpectedSymmetricMoments,
    IidMomentModel,
    bias_decomposition,
    expected_s2_ar1,
    expected_s2_general,
    expected_s4,
    var_s2_general,
    var_s2_iid,
    var_s2_normal,
)
from .samplestats import (
    sample_mean,
    sample_variance,
    sample_variance_pairs,
    sample_variance_ustat,
    variance_breakdown,
)
from .stochastic import DistributionSpec, run_replications
from .symsum import power_sums, symmetric_moments
from .verify import TOLERANCES, perturbed_coefficients, run_verification

SCHEMA = "varmoments/1"
EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3
PAIR_LOOP_MAX_N = 2000


class NumericalFailure(Exception):
    """Carries a finished report whose integrity checks failed."""

    def __init__(self, result, message):
        super().__init__(message)
        self.result = result


def read_sample(path):
    """Parse one number per line; commas separate several numbers on a
    line; '#' starts a comment. '-' reads stdin."""
    if path in (None, "-"):
        text = sys.stdin.read()
        name = "<stdin>"
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror}") from None
        name = path
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        for tok in line.split(","):
            tok = tok.strip()
            if not tok:
                continue
            try:
                v = float(tok)
            except ValueError:
                raise InputError(f"{name}, line {lineno}: {tok!r} is not a number") from None
            if not math.isfinite(v):
                raise InputError(f"{name}, line {lineno}: {tok!r} is not a finite number")
            values.append(v)
    if not values:
        raise InputError(f"{name} contains no numbers")
    return np.array(values)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def _flatten(obj, prefix=""):
    rows = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            rows += _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        for i, v in enumerate(obj):
            rows += _flatten(v, f"{prefix}{i}.")
    else:
        rows.append((prefix[:-1], obj))
    return rows


def _distribution(args):
    if args.dist == "normal":
        return DistributionSpec.normal(args.mean, args.sigma2)
    if args.dist == "exp":
        return DistributionSpec.exponential(args.rate)
    return DistributionSpec.uniform(args.lo, args.hi)


def _int_arg(value, name):
    if value is None:
        raise InputError(f"--{name} is required for this command")
    try:
        return int(value)
    except ValueError:
        raise InputError(f"--{name} must be an integer, got {value!r}") from None


def _int_list(value, name):
    if value is None:
        raise InputError(f"--{name} is required for this command")
    try:
        return [int(v) for v in str(value).split(",") if v.strip()]
    except ValueError:
        raise InputError(f"--{name} must be a comma-separated list of integers") from None


def cmd_stats(args):
    x = read_sample(args.input)
    n = x.size
    if n < 2:
        raise InputError(f"need at least 2 values, got {n}")
    res = {
        "n": n,
        "mean": sample_mean(x),
        "s2": sample_variance(x),
        "s2_ustat": sample_variance_ustat(x),
        "power_sums": vars(power_sums(x)),
        "symmetric_moments": symmetric_moments(x, partial=True).as_dict(),
    }
    residuals = {"u_statistic_identity": relative_residual(res["s2"], res["s2_ustat"])}
    if n <= PAIR_LOOP_MAX_N:
        res["s2_pairs"] = sample_variance_pairs(x)
        residuals["pair_loop"] = relative_residual(res["s2"], res["s2_pairs"])
    if n >= 4:
        br = variance_breakdown(x)
        res["breakdown"] = {k: v for k, v in br.as_dict().items() if k != "moments"}
        residuals["s4_decomposition"] = relative_residual(br.s4_direct, br.s4_decomposed)
    tol = {
        "u_statistic_identity": TOLERANCES["u_statistic_identity"],
        "pair_loop": TOLERANCES["u_statistic_identity"],
        "s4_decomposition": TOLERANCES["s4_decomposition"],
    }
    res["identity_residuals"] = residuals
    res["identity_tolerances"] = {k: tol[k] for k in residuals}
    failed = [k for k, v in residuals.items() if v > tol[k]]
    res["identities_passed"] = not failed
    if failed:
        raise NumericalFailure(res, f"identity residual above tolerance: {', '.join(failed)}")
    return res


def _source(args):
    if args.rho is not None:
        return Ar1Spec(args.sigma2, args.rho, _int_arg(args.n, "n"))
    return _distribution(args)


def cmd_theory_s2(args):
    src = _source(args)
    n = _int_arg(args.n, "n")
    if isinstance(src, Ar1Spec):
        model = CrossMomentModel.ar1(src)
        closed = expected_s2_ar1(src)
        res = {"model": "ar1", "marginal_variance": src.marginal_variance, "expected_s2": closed}
    else:
        m1, m2, _, _ = src.raw_moments()
        model = CrossMomentModel.iid(n, m1, m2)
        res = {"model": "iid", "population_variance": src.variance}
    res["expected_s2_general"] = expected_s2_general(model)
    first, second, third = bias_decomposition(model)
    res["bias_decomposition"] = {
        "second_moment_term": first,
        "mean_product_term": second,
        "covariance_term": third,
    }
    return res


def cmd_theory_var(args):
    n = _int_arg(args.n, "n")
    if args.rho is not None:
        raise InputError("no closed-form Var[s^2] for AR(1); use 'replicate' for a plug-in estimate")
    d = _distribution(args)
    m = IidMomentModel.from_central(d.mean, d.central_moment(2), d.central_moment(4))
    res = {
        "mu2c": m.mu2c,
        "mu4c": m.mu4c,
        "var_s2_iid": var_s2_iid(m, n),
    }
    if d.kind == "normal":
        res["var_s2_normal"] = var_s2_normal(d.variance, n)
    if n >= 4:
        esm = ExpectedSymmetricMoments.iid(d.raw_moments(), n)
        res["expected_s4"] = expected_s4(esm)
        res["var_s2_general"] = var_s2_general(esm)
    return res


def cmd_ar1_bias(args):
    rows = []
    for n in _int_list(args.n, "n"):
        spec = Ar1Spec(args.sigma2, args.rho, n)
        closed = expected_s2_ar1(spec)
        rep = run_replications(spec, r=args.r, seed=args.seed, symmetric=False, workers=args.workers)
        z = (rep.mean_of_s2 - closed) / rep.se_of_mean_s2 if rep.se_of_mean_s2 > 0 else 0.0
        rows.append(
            {
                "n": n,
                "closed_form": closed,
                "monte_carlo": rep.mean_of_s2,
                "se": rep.se_of_mean_s2,
                "z": z,
            }
        )
    return {"rows": rows}


def cmd_replicate(args):
    src = _source(args)
    n = _int_arg(args.n, "n")
    rep = run_replications(src, n, args.r, args.seed, keep_pairs=args.keep_pairs, workers=args.workers)
    res = rep.as_dict(include_pairs=args.keep_pairs)
    theory = {}
    if isinstance(src, Ar1Spec):
        theory["expected_s2"] = expected_s2_ar1(src)
    else:
        theory["expected_s2"] = src.variance
        m = IidMomentModel.from_central(src.mean, src.central_moment(2), src.central_moment(4))
        theory["var_s2"] = var_s2_iid(m, n)
    if rep.mean_symmetric_moments is not None:
        theory["plugin_expected_s4"] = expected_s4(rep.mean_symmetric_moments)
        theory["plugin_var_s2"] = var_s2_general(rep.mean_symmetric_moments)
    res["theory"] = theory
    return res


def cmd_independence(args):
    if args.rho is not None:
        raise InputError("the independence diagnostic applies to i.i.d. parents; drop --rho")
    d = _distribution(args)
    rep = normality_independence_report(
        d,
        _int_arg(args.n, "n"),
        args.r,
        args.m,
        args.seed,
        u_max=args.u_max,
        h=args.h,
        thresholds=Thresholds(),
    )
    return rep.as_dict()


def cmd_verify(args):
    if not 4 <= args.max_n <= 14:
        raise InputError(f"--max-n must lie in [4, 14], got {args.max_n}")
    coef = perturbed_coefficients() if args.perturb_coefficients else None
    res = run_verification(args.max_n, args.cases, args.seed, coef)
    if not res["passed"]:
        bad = [k for k, v in res["properties"].items() if not v["passed"]]
        raise NumericalFailure(res, f"verification failed: {', '.join(bad)}")
    return res


COMMANDS = {
    "stats": (cmd_stats, "moments and identity checks of a data file"),
    "theory-s2": (cmd_theory_s2, "closed-form E[s^2] and its bias decomposition"),
    "theory-var": (cmd_theory_var, "closed-form Var[s^2] for i.i.d. parents"),
    "ar1-bias": (cmd_ar1_bias, "AR(1) bias of s^2: closed form vs Monte Carlo"),
    "replicate": (cmd_replicate, "Monte Carlo sampling law of s^2"),
    "independence": (cmd_independence, "dependence of sample mean and variance"),
    "verify": (cmd_verify, "run the oracle-equivalence suite"),
}


def build_parser():
    p = argparse.ArgumentParser(prog="varmoments", description="Moments of the sample variance.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        s = sub.add_parser(name, help=help_)
        s.add_argument("--input", help="data file (one number per line); '-' for stdin")
        s.add_argument("--output", help="write the report here instead of stdout")
        s.add_argument("--format", choices=("json", "csv"), default="json")
        s.add_argument("--seed", type=int, default=42)
        s.add_argument("--n", default="20" if name != "stats" else None,
                       help="sample size (ar1-bias: comma-separated list)")
        s.add_argument("--r", type=int, default=100_000 if name != "independence" else 10_000)
        s.add_argument("--m", type=int, default=100_000)
        s.add_argument("--rho", type=float)
        s.add_argument("--sigma2", type=float, default=1.0)
        s.add_argument("--mean", type=float, default=0.0)
        s.add_argument("--rate", type=float, default=1.0)
        s.add_argument("--lo", type=float, default=0.0)
        s.add_argument("--hi", type=float, default=1.0)
        s.add_argument("--dist", choices=("normal", "exp", "uniform"), default="normal")
        s.add_argument("--u-max", type=float, default=1.0)
        s.add_argument("--h", type=float, default=0.05)
        s.add_argument("--keep-pairs", action="store_true")
        s.add_argument("--max-n", type=int, default=12)
        s.add_argument("--cases", type=int, default=20)
        s.add_argument("--workers", type=int, default=1)
        s.add_argument("--perturb-coefficients", action="store_true", help=argparse.SUPPRESS)
    return p


def _config(args):
    return {k: v for k, v in vars(args).items() if k not in ("output", "command")}


def render(report, fmt):
    if fmt == "json":
        return json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    result = _jsonable(report["result"])
    if isinstance(result, dict) and "rows" in result:
        rows = result["rows"]
        w.writerow(list(rows[0]))
        for row in rows:
            w.writerow([row[k] for k in rows[0]])
    elif isinstance(result, dict) and result.get("pairs") is not None:
        w.writerow(["xbar", "s2"])
        w.writerows(result["pairs"])
    else:
        w.writerow(["key", "value"])
        for k, v in _flatten({"schema": report["schema"], "version": report["version"]}):
            w.writerow([k, v])
        for k, v in _flatten(result):
            w.writerow([k, v])
    return buf.getvalue()


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed < 0:
        parser.error("--seed must be nonnegative")
    if args.command == "ar1-bias" and args.rho is None:
        parser.error("ar1-bias requires --rho")
    func = COMMANDS[args.command][0]
    report = {
        "schema": SCHEMA,
        "tool": "varmoments",
        "version": __version__,
        "command": args.command,
        "seed": args.seed,
        "config": _config(args),
    }
    code = EXIT_OK
    try:
        report["result"] = func(args)
    except NumericalFailure as exc:
        report["result"] = exc.result
        report["error"] = str(exc)
        code = EXIT_NUMERIC
        print(f"varmoments: {exc}", file=sys.stderr)
    except VarMomentsError as exc:
        print(f"varmoments: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(render(report, args.format), args.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
