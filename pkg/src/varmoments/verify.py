"""Self-check suite: every closed form against an independent route."""

from __future__ import annotations

import numpy as np

from ._common import relative_residual
from .moments import (
    Ar1Spec,
    CrossMomentModel,
    ExpectedSymmetricMoments,
    IidMomentModel,
    expected_s2_ar1,
    expected_s2_general,
    geometric_weighted_sum,
    s4_coefficients,
    var_s2_general,
    var_s2_iid,
    var_s2_normal,
)
from .samplestats import (
    sample_variance,
    sample_variance_pairs,
    sample_variance_ustat,
    variance_breakdown,
)
from .symsum import FIELDS, brute_force_symmetric_moments, symmetric_moments

TOLERANCES = {
    "symsum_vs_brute_force": 1e-10,
    "u_statistic_identity": 1e-12,
    "s4_decomposition": 1e-9,
    "reduction_chain": 1e-12,
    "ar1_closed_vs_general": 1e-12,
    "geometric_identity": 1e-12,
}

RHO_GRID = (-0.9, -0.5, 0.0, 0.5, 0.9)
N_GRID = (2, 3, 5, 10, 50)


def random_sample(rng, n):
    """A test sample drawn from a rotating mix of shapes and scales
    (10^-3 .. 10^3)."""
    scale = 10.0 ** rng.uniform(-3, 3)
    kind = rng.integers(3)
    if kind == 0:
        x = rng.standard_normal(n) + rng.uniform(-2, 2)
    elif kind == 1:
        x = rng.exponential(size=n)
    else:
        x = rng.uniform(-1, 1, n)
    return x * scale


class _Worst:
    def __init__(self, name):
        self.name = name
        self.tol = TOLERANCES[name]
        self.worst = 0.0
        self.checks = 0
        self.where = None

    def add(self, a, b, where=None):
        r = relative_residual(a, b)
        self.checks += 1
        if self.where is None or r > self.worst:
            self.worst, self.where = r, where

    def result(self):
        return {
            "passed": bool(self.worst <= self.tol),
            "worst_residual": self.worst,
            "tolerance": self.tol,
            "checks": self.checks,
            "worst_case": self.where,
        }


def run_verification(max_n=12, cases=20, seed=42, coefficients=None):
    """Run all oracle-equivalence checks.

    `coefficients`, when given as a callable n -> 5-tuple, replaces the s^4
    weights in the decomposition check (mutation testing).

    Returns a dict with one entry per property plus an overall ``passed``.
    """
    rng = np.random.default_rng(seed)
    sym = _Worst("symsum_vs_brute_force")
    lem = _Worst("u_statistic_identity")
    s4 = _Worst("s4_decomposition")
    chain = _Worst("reduction_chain")
    ar1 = _Worst("ar1_closed_vs_general")
    geo = _Worst("geometric_identity")

    for n in range(4, max_n + 1):
        for c in range(cases):
            x = random_sample(rng, n)
            where = {"n": n, "case": c}
            a = symmetric_moments(x)
            b = brute_force_symmetric_moments(x)
            for f in FIELDS:
                sym.add(getattr(a, f), getattr(b, f), {**where, "field": f})
            v = sample_variance(x)
            lem.add(v, sample_variance_ustat(x), where)
            lem.add(v, sample_variance_pairs(x), where)
            coef = coefficients(n) if coefficients is not None else None
            br = variance_breakdown(x, coef)
            s4.add(br.s4_direct, br.s4_decomposed, where)

        mu1, mu2c = rng.uniform(-2, 2), rng.uniform(0.5, 2)
        mu4c = mu2c**2 * rng.uniform(1.0, 6.0)
        model = IidMomentModel.from_central(mu1, mu2c, mu4c)
        chain.add(expected_s2_general(CrossMomentModel.iid(n, model.mu1, model.mu2)), model.mu2 - model.mu1**2, {"n": n, "step": "expected_s2"})
        centred = ExpectedSymmetricMoments.iid((0.0, mu2c, 0.0, mu4c), n)
        chain.add(var_s2_general(centred), var_s2_iid(model, n), {"n": n, "step": "var_general_to_iid"})
        sigma2 = rng.uniform(0.1, 5.0)
        chain.add(var_s2_iid(IidMomentModel.normal(mu1, sigma2), n), var_s2_normal(sigma2, n), {"n": n, "step": "iid_to_normal"})

    for rho in RHO_GRID:
        for n in N_GRID:
            where = {"rho": rho, "n": n}
            spec = Ar1Spec(1.0, rho, n)
            ar1.add(expected_s2_ar1(spec), expected_s2_general(CrossMomentModel.ar1(spec)), where)
            direct = float(sum((n - i) * rho**i for i in range(1, n + 1)))
            geo.add(geometric_weighted_sum(rho, n), direct, where)

    props = {w.name: w.result() for w in (sym, lem, s4, chain, ar1, geo)}
    return {
        "properties": props,
        "passed": all(p["passed"] for p in props.values()),
        "worst_residual": max(p["worst_residual"] for p in props.values()),
    }


def perturbed_coefficients(eps=1e-6):
    """Weights with the mu22 coefficient nudged by a relative `eps`."""

    def coef(n):
        c = list(s4_coefficients(n))
        c[2] *= 1.0 + eps
        return tuple(c)

    return coef
