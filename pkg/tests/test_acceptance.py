"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

The verdict lines are repeated in an "acceptance criteria" section at the
end of any pytest run. Run alone with ``pytest tests/test_acceptance.py``
or ``python3 tests/test_acceptance.py``. Every check recomputes its
inputs; nothing is cached between criteria.
"""

import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest
from scipy import integrate

sys.path.insert(0, str(Path(__file__).parent))
from conftest import mixed_sample, rel_err  # noqa: E402

from varmoments.diagnostics import ecf_curvature, normality_independence_report  # noqa: E402
from varmoments.moments import (  # noqa: E402
    Ar1Spec,
    CrossMomentModel,
    IidMomentModel,
    expected_s2_ar1,
    expected_s2_general,
    expected_s4,
    geometric_weighted_sum,
    var_s2_general,
    var_s2_iid,
    var_s2_normal,
)
from varmoments.samplestats import (  # noqa: E402
    sample_variance,
    sample_variance_ustat,
    variance_breakdown,
)
from varmoments.stochastic import (  # noqa: E402
    STREAM_ECF,
    DistributionSpec,
    draw_sample,
    run_replications,
)
from varmoments.symsum import FIELDS, brute_force_symmetric_moments, symmetric_moments  # noqa: E402

SEED = 42


def gate(log, label, limit_s, check):
    """Time `check()` -> (ok, detail), log and print the verdict, then assert."""
    t0 = time.perf_counter()
    ok, detail = check()
    elapsed = time.perf_counter() - t0
    in_time = elapsed < limit_s
    verdict = "PASS" if ok and in_time else "FAIL"
    line = f"[{verdict}] {label}: {detail}; {elapsed:.2f}s (limit {limit_s:g}s)"
    log.append(line)
    print(line)
    assert ok, detail
    assert in_time, f"{label} took {elapsed:.1f}s, limit {limit_s}s"


def pair_loop(x):
    n = len(x)
    return sum((x[i] - x[j]) ** 2 / 2 for i in range(n) for j in range(n) if i != j) / (n * (n - 1))


def z_score(estimate, target, se):
    return (estimate - target) / se


def test_ac1_symsum_oracle_equivalence(acceptance_log):
    def check():
        rng = np.random.default_rng(SEED)
        worst = 0.0
        for _ in range(500):
            x = mixed_sample(rng, int(rng.integers(4, 13)))
            a, b = symmetric_moments(x), brute_force_symmetric_moments(x)
            worst = max(worst, max(rel_err(getattr(a, f), getattr(b, f)) for f in FIELDS))
        return worst <= 1e-10, f"worst relative residual {worst:.2e} (tol 1e-10, 500 samples)"

    gate(acceptance_log, "AC1 O(n) symmetric sums vs brute force", 10, check)


def test_ac2_u_statistic_identity(acceptance_log):
    def check():
        rng = np.random.default_rng(SEED + 1)
        worst = 0.0
        for _ in range(500):
            x = mixed_sample(rng, int(rng.integers(2, 31)))
            ref = pair_loop(list(x))
            worst = max(worst, rel_err(sample_variance(x), ref), rel_err(sample_variance_ustat(x), ref))
        return worst <= 1e-12, f"worst relative residual {worst:.2e} (tol 1e-12, 500 samples)"

    gate(acceptance_log, "AC2 Bessel s^2 == pair-kernel average == pair loop", 5, check)


def test_ac3_s4_decomposition(acceptance_log):
    def check():
        rng = np.random.default_rng(SEED + 2)
        worst = 0.0
        for _ in range(500):
            b = variance_breakdown(mixed_sample(rng, int(rng.integers(4, 101))))
            worst = max(worst, rel_err(b.s4_direct, b.s4_decomposed))
        return worst <= 1e-9, f"worst relative residual {worst:.2e} (tol 1e-9, n in [4, 100])"

    gate(acceptance_log, "AC3 s^4 direct vs symmetric-moment decomposition", 5, check)


def test_ac4_ar1_bias(acceptance_log):
    def check():
        parts, ok = [], True
        for i, rho in enumerate((-0.5, 0.0, 0.5, 0.9)):
            spec = Ar1Spec(1.0, rho, 20)
            rep = run_replications(spec, r=100_000, seed=SEED + i, symmetric=False)
            z = z_score(rep.mean_of_s2, expected_s2_ar1(spec), rep.se_of_mean_s2)
            ok &= abs(z) <= 3
            parts.append(f"rho={rho:+.1f} z={z:+.2f}")
        worst = 0.0
        for rho in (-0.9, -0.5, 0.0, 0.3, 0.5, 0.9):
            for n in range(2, 51):
                spec = Ar1Spec(1.0, rho, n)
                worst = max(worst, rel_err(expected_s2_ar1(spec), expected_s2_general(CrossMomentModel.ar1(spec))))
        ok &= worst <= 1e-12
        return ok, ", ".join(parts) + f"; closed vs general worst {worst:.2e} (tol 1e-12, n<=50)"

    gate(acceptance_log, "AC4 AR(1) bias of s^2", 60, check)


def _exp_central(k):
    val, _ = integrate.quad(lambda x: (x - 1.0) ** k * math.exp(-x), 0, math.inf)
    return val


def test_ac5_variance_of_s2(acceptance_log):
    def check():
        rep = run_replications(DistributionSpec.normal(), 11, 100_000, seed=SEED, symmetric=False)
        z1 = z_score(rep.var_of_s2, var_s2_normal(1.0, 11), rep.se_of_var_s2)
        m = IidMomentModel.from_central(1.0, _exp_central(2), _exp_central(4))
        target = var_s2_iid(m, 10)
        rep2 = run_replications(DistributionSpec.exponential(), 10, 100_000, seed=SEED + 1, symmetric=False)
        z2 = z_score(rep2.var_of_s2, target, rep2.se_of_var_s2)
        ok = abs(z1) <= 3 and abs(z2) <= 3
        return ok, f"normal n=11 z={z1:+.2f} (target 0.2); exponential n=10 z={z2:+.2f} (target {target:.4f})"

    gate(acceptance_log, "AC5 Var[s^2] normal and i.i.d. formulas", 60, check)


def test_ac6_plugin_consistency(acceptance_log):
    def check():
        rep = run_replications(Ar1Spec(1.0, 0.3, 12), r=100_000, seed=SEED)
        esm = rep.mean_symmetric_moments
        z4 = z_score(expected_s4(esm), rep.mean_of_s4, rep.se_of_mean_s4)
        zv = z_score(var_s2_general(esm), rep.var_of_s2, rep.se_of_var_s2)
        ok = abs(z4) <= 3 and abs(zv) <= 3
        return ok, f"E[s^4] z={z4:+.3f}, Var[s^2] z={zv:+.3f}"

    gate(acceptance_log, "AC6 plug-in E[s^4] and Var[s^2] for AR(1)", 90, check)


def test_ac7_independence_diagnostic(acceptance_log):
    def check():
        out, ok = [], True
        for kind, d in (("normal", DistributionSpec.normal()), ("exponential", DistributionSpec.exponential()),
                        ("uniform", DistributionSpec.uniform())):
            rep = normality_independence_report(d, n=10, r=10_000, m=100_000, seed=SEED)
            dep = rep.dependence
            zc = dep.cov_mean_s2 / dep.se_cov
            if kind == "normal":
                good = abs(zc) <= 3 and not dep.above_null(0.95)
            elif kind == "exponential":
                zc = (dep.cov_mean_s2 - 0.2) / dep.se_cov
                good = abs(zc) <= 3 and dep.above_null(0.99)
            else:
                good = abs(zc) <= 3 and dep.above_null(0.95)
            ok &= good
            out.append(f"{kind}: cov z={zc:+.2f} dcor={dep.dcor:.4f} "
                       f"q95={dep.null_quantiles[0.95]:.4f} q99={dep.null_quantiles[0.99]:.4f}")
        return ok, "; ".join(out)

    gate(acceptance_log, "AC7 mean/variance independence diagnostic", 120, check)


def _max_z(diff, se):
    pos = se > 0
    return float(np.max(diff[pos] / se[pos]))


def test_ac8_log_cf_curvature(acceptance_log):
    def check():
        xn = draw_sample(DistributionSpec.normal(), 100_000, SEED, 0, STREAM_ECF)
        dn = ecf_curvature(xn, u_max=1.0, h=0.05).max_deviation()
        xe = draw_sample(DistributionSpec.exponential(), 100_000, SEED, 0, STREAM_ECF)
        ce = ecf_curvature(xe, u_max=1.0, h=0.05)
        de = ce.max_deviation()
        exact = -1.0 / (1.0 - 1j * ce.curvature_u) ** 2
        dr = np.abs(ce.curvature_re - exact.real)
        di = np.abs(ce.curvature_im - exact.imag)
        # the imaginary part at u = 0 is exactly 0 with zero SE on both sides
        within = np.all(dr <= 3 * ce.curvature_se_re) and np.all(di <= 3 * ce.curvature_se_im)
        zr = _max_z(dr, ce.curvature_se_re)
        zi = _max_z(di, ce.curvature_se_im)
        ok = dn <= 0.05 and de >= 3 * 0.05 and within
        return ok, (f"normal max dev {dn:.4f} (<= 0.05); exponential max dev {de:.3f} (>= 0.15); "
                    f"exponential vs analytic max |z| re={zr:.2f} im={zi:.2f}")

    gate(acceptance_log, "AC8 log-CF curvature normality check", 30, check)


def test_ac9_geometric_identity(acceptance_log):
    def check():
        worst = 0.0
        for rho in (-0.9, -0.5, 0.0, 0.5, 0.9):
            for n in (2, 3, 5, 10, 50):
                direct = math.fsum((n - i) * rho**i for i in range(1, n + 1))
                worst = max(worst, rel_err(geometric_weighted_sum(rho, n), direct))
        return worst <= 1e-12, f"worst relative residual {worst:.2e} (tol 1e-12)"

    gate(acceptance_log, "AC9 geometric weighted sum closed form", 1, check)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
