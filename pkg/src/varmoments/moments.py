"""Theoretical first and second moments of the sample variance.

Four regimes are covered:

* general, possibly dependent and heterogeneous observations described by
  their first and second cross moments (`expected_s2_general`);
* stationary Gaussian AR(1) (`expected_s2_ar1`);
* i.i.d. observations (`var_s2_iid`), and the normal special case
  (`var_s2_normal`);
* arbitrary processes for which the expectations of the distinct-index
  symmetric means are known or estimated (`expected_s4`, `var_s2_general`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InputError
from .symsum import FIELDS, SymmetricMoments


@dataclass(frozen=True)
class CrossMomentModel:
    """First and second (cross) moments of n observations.

    ``cross_moments[i, j]`` holds E[X_i X_j] for i != j; its diagonal is
    ignored, E[X_i^2] lives in ``second_moments``.
    """

    second_moments: np.ndarray
    cross_moments: np.ndarray
    means: np.ndarray

    def __post_init__(self):
        m2 = np.asarray(self.second_moments, dtype=np.float64).reshape(-1)
        cm = np.asarray(self.cross_moments, dtype=np.float64)
        mu = np.asarray(self.means, dtype=np.float64).reshape(-1)
        n = m2.size
        if cm.shape != (n, n) or mu.size != n:
            raise InputError(
                f"inconsistent shapes: second_moments {m2.shape}, "
                f"cross_moments {cm.shape}, means {mu.shape}"
            )
        if not (np.all(np.isfinite(m2)) and np.all(np.isfinite(cm)) and np.all(np.isfinite(mu))):
            raise InputError("moment model contains non-finite values")
        off = ~np.eye(n, dtype=bool)
        asym = np.abs(cm - cm.T)[off]
        scale = np.maximum(np.abs(cm), np.abs(cm.T))[off]
        if asym.size and np.any(asym > 1e-12 * np.maximum(scale, 1.0)):
            raise InputError("cross_moments matrix is not symmetric")
        var = m2 - mu * mu
        if np.any(var < -1e-12 * np.maximum(m2, 1.0)):
            i = int(np.argmin(var))
            raise InputError(f"E[X_{i}^2] < E[X_{i}]^2: negative variance")
        object.__setattr__(self, "second_moments", m2)
        object.__setattr__(self, "cross_moments", cm)
        object.__setattr__(self, "means", mu)

    @property
    def n(self):
        return self.second_moments.size

    @classmethod
    def iid(cls, n, mu1, mu2):
        """Embedding of i.i.d. observations with E[X] = mu1, E[X^2] = mu2."""
        return cls(
            second_moments=np.full(n, float(mu2)),
            cross_moments=np.full((n, n), float(mu1) ** 2),
            means=np.full(n, float(mu1)),
        )

    @classmethod
    def from_covariance(cls, cov, means=None):
        cov = np.asarray(cov, dtype=np.float64)
        n = cov.shape[0]
        mu = np.zeros(n) if means is None else np.asarray(means, dtype=np.float64)
        return cls(
            second_moments=np.diag(cov) + mu * mu,
            cross_moments=cov + np.outer(mu, mu),
            means=mu,
        )

    @classmethod
    def ar1(cls, spec: "Ar1Spec"):
        """Explicit rho^|i-j| covariance of a stationary zero-mean AR(1)."""
        return cls.from_covariance(ar1_covariance(spec))


@dataclass(frozen=True)
class IidMomentModel:
    """Population moments of an i.i.d. sample: raw mu1, mu2 and central
    mu2c, mu4c."""

    mu1: float
    mu2: float
    mu2c: float
    mu4c: float

    def __post_init__(self):
        for name in ("mu1", "mu2", "mu2c", "mu4c"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise InputError(f"{name} must be finite, got {v!r}")
        if self.mu2c < 0 or self.mu4c < 0:
            raise InputError("central moments mu2c and mu4c must be nonnegative")
        if abs(self.mu2 - self.mu1**2 - self.mu2c) > 1e-12 * max(1.0, abs(self.mu2)):
            raise InputError(
                f"mu2 - mu1^2 = {self.mu2 - self.mu1**2!r} does not match mu2c = {self.mu2c!r}"
            )
        if self.mu4c < self.mu2c**2 * (1 - 1e-12):
            raise InputError("mu4c < mu2c^2 violates Jensen's inequality")

    @classmethod
    def from_central(cls, mean, mu2c, mu4c):
        return cls(mu1=float(mean), mu2=float(mean) ** 2 + mu2c, mu2c=float(mu2c), mu4c=float(mu4c))

    @classmethod
    def normal(cls, mean=0.0, variance=1.0):
        return cls.from_central(mean, variance, 3.0 * variance**2)


@dataclass(frozen=True)
class Ar1Spec:
    """Stationary AR(1): X_t = rho X_{t-1} + e_t, e_t ~ N(0, sigma2).

    ``sigma2`` is the innovation *variance*; the marginal variance is
    sigma2 / (1 - rho^2).
    """

    sigma2: float
    rho: float
    n: int

    def __post_init__(self):
        if not (math.isfinite(self.sigma2) and self.sigma2 > 0):
            raise DomainError(f"innovation variance must be > 0, got {self.sigma2!r}")
        if not (math.isfinite(self.rho) and abs(self.rho) < 1):
            raise DomainError(f"stationarity needs |rho| < 1, got rho={self.rho!r}")
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"n must be an integer >= 2, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def marginal_variance(self):
        return self.sigma2 / (1.0 - self.rho**2)


def ar1_covariance(spec: Ar1Spec) -> np.ndarray:
    lag = np.abs(np.subtract.outer(np.arange(spec.n), np.arange(spec.n)))
    return spec.marginal_variance * float(spec.rho) ** lag


ESM_FIELDS = (
    "e_mu4",
    "e_mu31",
    "e_mu22",
    "e_mu211",
    "e_mu1111",
    "e_mu2_tilde",
    "e_mu11_tilde",
)


@dataclass(frozen=True)
class ExpectedSymmetricMoments:
    """Expectations of the seven distinct-index symmetric means."""

    e_mu4: float
    e_mu31: float
    e_mu22: float
    e_mu211: float
    e_mu1111: float
    e_mu2_tilde: float
    e_mu11_tilde: float
    n: int
    # standard errors, filled in when the values are Monte Carlo averages
    se: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 4:
            raise DomainError(f"expected symmetric moments need n >= 4, got {self.n!r}")
        if self.e_mu4 < 0 or self.e_mu22 < 0:
            raise InputError("e_mu4 and e_mu22 average nonnegative terms and cannot be negative")

    @classmethod
    def from_sample_moments(cls, sm: SymmetricMoments):
        """Degenerate plug-in: one realisation taken as its own expectation."""
        return cls(*(getattr(sm, f) for f in FIELDS), n=sm.n)

    @classmethod
    def iid(cls, raw_moments, n):
        """Exact expectations for i.i.d. data with raw moments
        (E[X], E[X^2], E[X^3], E[X^4])."""
        m1, m2, m3, m4 = (float(v) for v in raw_moments)
        return cls(
            e_mu4=m4,
            e_mu31=m3 * m1,
            e_mu22=m2 * m2,
            e_mu211=m2 * m1 * m1,
            e_mu1111=m1**4,
            e_mu2_tilde=m2,
            e_mu11_tilde=m1 * m1,
            n=n,
        )

    def as_dict(self):
        d = {k: getattr(self, k) for k in ESM_FIELDS}
        d["n"] = self.n
        if self.se is not None:
            d["se"] = dict(self.se)
        return d


def s4_coefficients(n):
    """Weights of (mu4, mu31, mu22, mu211, mu1111) in s^4.

    The same combination holds sample by sample and, taking expectations,
    for E[s^4].
    """
    if n < 4:
        raise DomainError(f"the s^4 decomposition needs n >= 4, got n={n}")
    d = n * (n - 1)
    return (
        1.0 / n,
        -4.0 / n,
        (n * n - 2 * n + 3) / d,
        -2.0 * (n - 2) * (n - 3) / d,
        (n - 2) * (n - 3) / d,
    )


def _require_n(n, minimum, what):
    if n < minimum:
        raise DomainError(f"{what} needs n >= {minimum}, got n={n}")


def expected_s2_general(m: CrossMomentModel) -> float:
    """E[s^2] = sum_i E[X_i^2] / n - sum_{i!=j} E[X_i X_j] / (n (n-1))."""
    n = m.n
    _require_n(n, 2, "E[s^2]")
    off = m.cross_moments.sum() - np.trace(m.cross_moments)
    return math.fsum(m.second_moments) / n - off / (n * (n - 1))


def bias_decomposition(m: CrossMomentModel):
    """Split E[s^2] into (second-moment term, mean-product term, covariance term).

    E[s^2] = first - second - third, where

    * first  = sum_i E[X_i^2] / n
    * second = sum_{i!=j} E[X_i] E[X_j] / (n (n-1))
    * third  = sum_{i!=j} (E[X_i X_j] - E[X_i] E[X_j]) / (n (n-1))

    The third term vanishes for uncorrelated observations and is the bias
    of s^2 under dependence.
    """
    n = m.n
    _require_n(n, 2, "E[s^2]")
    d = n * (n - 1)
    mu = m.means
    first = math.fsum(m.second_moments) / n
    prod = np.outer(mu, mu)
    second = (prod.sum() - np.trace(prod)) / d
    cov = m.cross_moments - prod
    third = (cov.sum() - np.trace(cov)) / d
    return first, second, third


def geometric_weighted_sum(rho, n):
    """sum_{i=1}^{n} (n - i) rho^i in closed form."""
    if rho == 0:
        return 0.0
    return rho * (n * (1.0 - rho) - (1.0 - rho**n)) / (1.0 - rho) ** 2


def expected_s2_ar1(a: Ar1Spec) -> float:
    """E[s^2] for a stationary AR(1) sample of length n.

    gamma0 * (1 - 2 rho / ((1-rho)(n-1)) + 2 rho (1 - rho^n) / (n (n-1) (1-rho)^2))
    with gamma0 = sigma2 / (1 - rho^2). For rho > 0 the sample variance
    underestimates gamma0.
    """
    n, rho = a.n, a.rho
    g0 = a.marginal_variance
    if rho == 0:
        return g0
    return g0 * (
        1.0
        - 2.0 * rho / ((1.0 - rho) * (n - 1))
        + 2.0 * rho * (1.0 - rho**n) / (n * (n - 1) * (1.0 - rho) ** 2)
    )


def _esm_terms(esm):
    c = s4_coefficients(esm.n)
    return [
        c[0] * esm.e_mu4,
        c[1] * esm.e_mu31,
        c[2] * esm.e_mu22,
        c[3] * esm.e_mu211,
        c[4] * esm.e_mu1111,
    ]


def expected_s4(esm: ExpectedSymmetricMoments) -> float:
    """E[s^4] from the expected symmetric means; valid without independence."""
    return math.fsum(_esm_terms(esm))


def var_s2_general(esm: ExpectedSymmetricMoments) -> float:
    """Var[s^2] = E[s^4] - (E[mu2~] - E[mu11~])^2, written out term by term."""
    t = _esm_terms(esm)
    m2, m11 = esm.e_mu2_tilde, esm.e_mu11_tilde
    return math.fsum(
        [t[0], t[1], t[2], -m2 * m2, t[3], 2.0 * m11 * m2, t[4], -m11 * m11]
    )


def var_s2_iid(m: IidMomentModel, n: int) -> float:
    """mu4c / n - (n - 3) mu2c^2 / (n (n - 1)).

    Uses central moments, so the mean of the population is irrelevant
    (s^2 is shift invariant).
    """
    _require_n(n, 2, "Var[s^2]")
    return m.mu4c / n - (n - 3) * m.mu2c**2 / (n * (n - 1))


def var_s2_normal(sigma2: float, n: int) -> float:
    """2 sigma^4 / (n - 1) for i.i.d. normal data."""
    _require_n(n, 2, "Var[s^2]")
    if not (math.isfinite(sigma2) and sigma2 > 0):
        raise DomainError(f"sigma2 must be > 0, got {sigma2!r}")
    return 2.0 * sigma2 * sigma2 / (n - 1)
