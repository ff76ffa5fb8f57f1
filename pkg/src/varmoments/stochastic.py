"""Random samples, stationary AR(1) paths and Monte Carlo replication.

Seeding
-------
Replication ``i`` of a run with master seed ``s`` draws from its own
Philox generator keyed by ``s`` whose 256-bit counter starts at
``(0, 0, i, stream)``. Streams are therefore addressed by index rather
than by position in a shared sequence, and any partition of the
replications across workers reproduces the same per-replication values.
Aggregates are reduced over the concatenated per-replication arrays in
index order, so reports do not depend on the worker count.

Normal variates come from `numpy.random.Generator.standard_normal`
(ziggurat). Bit-for-bit reproducibility is promised for a fixed numpy
build only.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from ._common import neumaier_rowsum
from .errors import DomainError
from .moments import ESM_FIELDS, Ar1Spec, ExpectedSymmetricMoments
from .symsum import FIELDS, batch_symmetric_moments

BLOCK_SIZE = 4096

# stream tags for the last counter word
STREAM_REPLICATION = 0
STREAM_ECF = 1
STREAM_PERMUTATION = 2


def replication_rng(seed: int, index: int = 0, stream: int = STREAM_REPLICATION):
    """Generator for replication `index` of master `seed`."""
    if int(seed) != seed or seed < 0:
        raise DomainError(f"seed must be a nonnegative integer, got {seed!r}")
    if index < 0 or stream < 0:
        raise DomainError("replication index and stream must be nonnegative")
    bitgen = np.random.Philox(key=int(seed), counter=[0, 0, int(index), int(stream)])
    return np.random.Generator(bitgen)


@dataclass(frozen=True)
class DistributionSpec:
    """An i.i.d. parent law: normal(mean, variance), exponential(rate) or
    uniform(lo, hi). Build with the classmethods."""

    kind: str
    params: tuple

    def __post_init__(self):
        p = tuple(float(v) for v in self.params)
        if not all(math.isfinite(v) for v in p):
            raise DomainError(f"non-finite distribution parameter in {p}")
        if self.kind == "normal":
            if len(p) != 2 or p[1] <= 0:
                raise DomainError("normal needs (mean, variance) with variance > 0")
        elif self.kind == "exponential":
            if len(p) != 1 or p[0] <= 0:
                raise DomainError("exponential needs (rate,) with rate > 0")
        elif self.kind == "uniform":
            if len(p) != 2 or not p[0] < p[1]:
                raise DomainError("uniform needs (lo, hi) with lo < hi")
        else:
            raise DomainError(f"unknown distribution kind {self.kind!r}")
        object.__setattr__(self, "params", p)

    @classmethod
    def normal(cls, mean=0.0, variance=1.0):
        return cls("normal", (mean, variance))

    @classmethod
    def exponential(cls, rate=1.0):
        return cls("exponential", (rate,))

    @classmethod
    def uniform(cls, lo=0.0, hi=1.0):
        return cls("uniform", (lo, hi))

    @property
    def mean(self):
        if self.kind == "normal":
            return self.params[0]
        if self.kind == "exponential":
            return 1.0 / self.params[0]
        return 0.5 * (self.params[0] + self.params[1])

    def central_moment(self, k: int) -> float:
        """Exact central moment of order k = 2, 3 or 4."""
        if k not in (2, 3, 4):
            raise DomainError(f"central moments implemented for k in 2..4, got {k}")
        if self.kind == "normal":
            v = self.params[1]
            return {2: v, 3: 0.0, 4: 3.0 * v * v}[k]
        if self.kind == "exponential":
            lam = self.params[0]
            return {2: 1.0, 3: 2.0, 4: 9.0}[k] / lam**k
        w = self.params[1] - self.params[0]
        return {2: w**2 / 12.0, 3: 0.0, 4: w**4 / 80.0}[k]

    @property
    def variance(self):
        return self.central_moment(2)

    def raw_moments(self):
        """(E[X], E[X^2], E[X^3], E[X^4])."""
        m = self.mean
        c2, c3, c4 = (self.central_moment(k) for k in (2, 3, 4))
        return (
            m,
            c2 + m * m,
            c3 + 3 * m * c2 + m**3,
            c4 + 4 * m * c3 + 6 * m * m * c2 + m**4,
        )

    def sample(self, rng, size):
        if self.kind == "normal":
            mean, var = self.params
            return mean + math.sqrt(var) * rng.standard_normal(size)
        if self.kind == "exponential":
            return rng.standard_exponential(size) / self.params[0]
        lo, hi = self.params
        return lo + (hi - lo) * rng.random(size)


def ar1_from_innovations(z, sigma2, rho):
    """Map standard normal innovations to a stationary AR(1) path.

    Works along the last axis, so a (r, n) array yields r independent
    paths. X_1 takes the stationary law N(0, sigma2 / (1 - rho^2)); no
    burn-in is needed.
    """
    z = np.asarray(z, dtype=np.float64)
    x = np.empty_like(z)
    s = math.sqrt(sigma2)
    x[..., 0] = math.sqrt(sigma2 / (1.0 - rho * rho)) * z[..., 0]
    for t in range(1, z.shape[-1]):
        x[..., t] = rho * x[..., t - 1] + s * z[..., t]
    return x


def simulate_ar1(a: Ar1Spec, seed: int) -> np.ndarray:
    """One stationary AR(1) sample of length a.n, deterministic in (a, seed)."""
    if not isinstance(a, Ar1Spec):
        raise DomainError(f"expected an Ar1Spec, got {type(a).__name__}")
    z = replication_rng(seed, 0).standard_normal(a.n)
    return ar1_from_innovations(z, a.sigma2, a.rho)


def draw_sample(source, n, seed, index=0, stream=STREAM_REPLICATION):
    """A single length-n sample from a DistributionSpec or Ar1Spec."""
    return _simulate_rows(source, n, seed, index, index + 1, stream)[0]


def _simulate_rows(source, n, seed, start, stop, stream=STREAM_REPLICATION):
    out = np.empty((stop - start, n))
    if isinstance(source, Ar1Spec):
        for row, i in enumerate(range(start, stop)):
            out[row] = replication_rng(seed, i, stream).standard_normal(n)
        return ar1_from_innovations(out, source.sigma2, source.rho)
    for row, i in enumerate(range(start, stop)):
        out[row] = source.sample(replication_rng(seed, i, stream), n)
    return out


def _block_statistics(args):
    source, n, seed, start, stop, symmetric = args
    x = _simulate_rows(source, n, seed, start, stop)
    xbar = neumaier_rowsum(x) / n
    d = x - xbar[:, None]
    corr = neumaier_rowsum(d)
    s2 = np.maximum(neumaier_rowsum(d * d) - corr * corr / n, 0.0) / (n - 1)
    out = {"xbar": xbar, "s2": s2}
    if symmetric:
        out.update(batch_symmetric_moments(x))
    return out


@dataclass(frozen=True)
class ReplicationReport:
    """Monte Carlo summary of s^2 over r independent samples of size n."""

    r: int
    n: int
    seed: int
    mean_of_s2: float
    se_of_mean_s2: float
    var_of_s2: float
    se_of_var_s2: float
    mean_of_s4: float
    se_of_mean_s4: float
    mean_symmetric_moments: ExpectedSymmetricMoments | None
    pairs: np.ndarray | None = None

    def as_dict(self, include_pairs=False):
        d = {
            k: getattr(self, k)
            for k in (
                "r",
                "n",
                "seed",
                "mean_of_s2",
                "se_of_mean_s2",
                "var_of_s2",
                "se_of_var_s2",
                "mean_of_s4",
                "se_of_mean_s4",
            )
        }
        esm = self.mean_symmetric_moments
        d["mean_symmetric_moments"] = None if esm is None else esm.as_dict()
        if include_pairs and self.pairs is not None:
            d["pairs"] = self.pairs.tolist()
        return d


def _mean_and_se(v):
    r = v.size
    m = math.fsum(v) / r
    return m, float(np.std(v, ddof=1)) / math.sqrt(r)


def variance_with_se(v):
    """Unbiased variance of `v` and its standard error.

    The SE comes from the sample fourth central moment m4 through
    Var[s^2] ~= m4 / r - (r - 3) s^4 / (r (r - 1)).
    """
    v = np.asarray(v, dtype=np.float64)
    r = v.size
    d = v - math.fsum(v) / r
    var = math.fsum(d * d) / (r - 1)
    m4 = math.fsum(d**4) / r
    se2 = m4 / r - (r - 3) * var * var / (r * (r - 1))
    return var, math.sqrt(max(se2, 0.0))


def _blocks(r, block_size):
    return [(s, min(s + block_size, r)) for s in range(0, r, block_size)]


def run_replications(
    source,
    n=None,
    r=100_000,
    seed=42,
    keep_pairs=False,
    symmetric=None,
    workers=1,
) -> ReplicationReport:
    """Simulate r samples and summarise the sampling law of s^2.

    Parameters
    ----------
    source : DistributionSpec or Ar1Spec
        Parent law. For an Ar1Spec, `n` defaults to its own length and a
        different `n` replaces it.
    n, r : int
        Sample size (>= 2) and number of replications (>= 2).
    seed : int
        Master seed; see the module docstring for the derivation scheme.
    keep_pairs : bool
        Retain the (xbar, s^2) pair of each replication.
    symmetric : bool or None
        Also average the distinct-index symmetric means (needs n >= 4).
        None means "when n >= 4".
    workers : int
        Processes to spread the blocks over. The report is identical for
        every value.
    """
    if isinstance(source, Ar1Spec):
        if n is None:
            n = source.n
        elif n != source.n:
            source = replace(source, n=n)
    elif not isinstance(source, DistributionSpec):
        raise DomainError(f"unsupported source {type(source).__name__}")
    if n is None or int(n) != n or n < 2:
        raise DomainError(f"sample size n must be an integer >= 2, got {n!r}")
    if int(r) != r or r < 2:
        raise DomainError(f"replication count r must be an integer >= 2, got {r!r}")
    n, r = int(n), int(r)
    if symmetric is None:
        symmetric = n >= 4
    elif symmetric and n < 4:
        raise DomainError(f"symmetric moments need n >= 4, got n={n}")

    tasks = [(source, n, seed, a, b, symmetric) for a, b in _blocks(r, BLOCK_SIZE)]
    if workers is None or workers <= 1 or len(tasks) == 1:
        parts = [_block_statistics(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_block_statistics, tasks))
    cols = {k: np.concatenate([p[k] for p in parts]) for k in parts[0]}

    s2 = cols["s2"]
    mean_s2, se_mean_s2 = _mean_and_se(s2)
    var_s2, se_var_s2 = variance_with_se(s2)
    mean_s4, se_mean_s4 = _mean_and_se(s2 * s2)

    esm = None
    if symmetric:
        vals, ses = {}, {}
        for f, ef in zip(FIELDS, ESM_FIELDS):
            vals[ef], ses[ef] = _mean_and_se(cols[f])
        esm = ExpectedSymmetricMoments(**vals, n=n, se=ses)

    return ReplicationReport(
        r=r,
        n=n,
        seed=int(seed),
        mean_of_s2=mean_s2,
        se_of_mean_s2=se_mean_s2,
        var_of_s2=var_s2,
        se_of_var_s2=se_var_s2,
        mean_of_s4=mean_s4,
        se_of_mean_s4=se_mean_s4,
        mean_symmetric_moments=esm,
        pairs=np.column_stack((cols["xbar"], s2)) if keep_pairs else None,
    )
