"""Numerical checks of the normal characterisation of independence between
sample mean and sample variance.

Two complementary views:

* across replications, measure how (xbar, s^2) co-vary: Pearson
  correlation, covariance (which equals mu3c / n for i.i.d. data) and
  distance correlation against a permutation null;
* on one large sample, estimate the log characteristic function
  Psi(u) = log E[exp(iuX)] and its curvature. Independence holds exactly
  when Psi'' is the constant -sigma^2.

Neither produces a p-value with guarantees; they are statistics compared
against configurable thresholds.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from ._common import as_sample
from .errors import DomainError, InputError, RangeError
from .moments import Ar1Spec
from .samplestats import sample_variance
from .stochastic import (
    STREAM_ECF,
    STREAM_PERMUTATION,
    DistributionSpec,
    draw_sample,
    replication_rng,
    run_replications,
)

MIN_PAIRS = 100
N_PERMUTATIONS = 199
NAIVE_DCOR_MAX = 200


def _double_centred_distances(v):
    a = np.abs(np.subtract.outer(v, v))
    return a - a.mean(axis=0)[None, :] - a.mean(axis=1)[:, None] + a.mean()


def distance_correlation_naive(x, y):
    """Squared-root distance correlation from double-centred distance
    matrices; O(r^2) memory."""
    a = _double_centred_distances(np.asarray(x, dtype=np.float64))
    b = _double_centred_distances(np.asarray(y, dtype=np.float64))
    dcov2 = (a * b).mean()
    dvar2 = (a * a).mean() * (b * b).mean()
    if dvar2 <= 0:
        return float("nan")
    return math.sqrt(max(dcov2, 0.0) / math.sqrt(dvar2))


def distance_correlation(x, y, method="auto"):
    """Distance correlation of two real vectors.

    ``method="naive"`` double-centres the full distance matrices.
    ``"fast"`` uses the O(r log r) univariate algorithm of the `dcor`
    package, which evaluates the same V-statistic. ``"auto"`` picks naive
    up to 200 points, where it beats the compiled route's start-up cost.
    """
    if method == "auto":
        method = "naive" if len(x) <= NAIVE_DCOR_MAX else "fast"
    if method == "naive":
        return distance_correlation_naive(x, y)
    if method == "fast":
        with warnings.catch_warnings():
            # numba may complain about the TBB version on import
            warnings.simplefilter("ignore")
            import dcor

        x = np.ascontiguousarray(x, dtype=np.float64)
        y = np.ascontiguousarray(y, dtype=np.float64)
        return float(dcor.distance_correlation(x, y, method="mergesort"))
    raise ValueError(f"unknown method {method!r}")


def permutation_null(x, y, n_permutations=N_PERMUTATIONS, seed=0, method="auto"):
    """dcor of x against independent shuffles of y."""
    rng = replication_rng(seed, 0, STREAM_PERMUTATION)
    y = np.asarray(y, dtype=np.float64)
    return np.array(
        [distance_correlation(x, rng.permutation(y), method) for _ in range(n_permutations)]
    )


@dataclass(frozen=True)
class DependenceSummary:
    """Dependence statistics of (xbar, s^2) replicate pairs.

    ``null_quantiles`` maps levels (0.95, 0.99) to quantiles of the
    permuted-dcor distribution. ``degenerate`` is set when a column is
    constant; pearson and dcor are NaN then.
    """

    pearson: float
    dcor: float
    cov_mean_s2: float
    se_cov: float
    n_pairs: int
    null_quantiles: dict = field(default_factory=dict)
    degenerate: bool = False

    def above_null(self, level):
        return bool(self.dcor > self.null_quantiles[level])

    def as_dict(self):
        d = asdict(self)
        d["null_quantiles"] = {str(k): v for k, v in self.null_quantiles.items()}
        return d


def dependence_summary(pairs, n_permutations=N_PERMUTATIONS, seed=0, levels=(0.95, 0.99)):
    """Summarise dependence between the two columns of `pairs`.

    Parameters
    ----------
    pairs : (r, 2) array_like
        (xbar, s^2) per replication; r >= 100.
    n_permutations : int
        Size of the permutation null for dcor (0 skips it).
    seed : int
        Seeds the permutations.
    """
    p = np.asarray(pairs, dtype=np.float64)
    if p.ndim != 2 or p.shape[1] != 2:
        raise InputError(f"pairs must have shape (r, 2), got {p.shape}")
    r = p.shape[0]
    if r < MIN_PAIRS:
        raise DomainError(f"dependence_summary needs at least {MIN_PAIRS} pairs, got {r}")
    if not np.all(np.isfinite(p)):
        raise InputError("pairs contain non-finite values")
    x, y = p[:, 0], p[:, 1]
    dx = x - x.mean()
    dy = y - y.mean()
    prod = dx * dy
    cov = math.fsum(prod) / (r - 1)
    se_cov = float(np.std(prod, ddof=1)) / math.sqrt(r)

    if np.ptp(x) == 0 or np.ptp(y) == 0:
        nan = float("nan")
        return DependenceSummary(nan, nan, cov, se_cov, r, {}, degenerate=True)

    pearson = float(np.clip(cov / (np.std(x, ddof=1) * np.std(y, ddof=1)), -1.0, 1.0))
    dc = distance_correlation(x, y)
    quantiles = {}
    if n_permutations:
        null = permutation_null(x, y, n_permutations, seed)
        quantiles = {lv: float(np.quantile(null, lv)) for lv in levels}
    return DependenceSummary(pearson, dc, cov, se_cov, r, quantiles)


@dataclass(frozen=True)
class EcfCurve:
    """Empirical log characteristic function on a symmetric grid.

    ``curvature_*`` are centred second differences at the interior grid
    points ``curvature_u``; ``curvature_se_*`` are their delta-method
    standard errors.
    """

    u_grid: np.ndarray
    psi_re: np.ndarray
    psi_im: np.ndarray
    curvature_u: np.ndarray
    curvature_re: np.ndarray
    curvature_im: np.ndarray
    curvature_se_re: np.ndarray
    curvature_se_im: np.ndarray
    sigma2_hat: float
    h: float

    @property
    def curvature(self):
        return self.curvature_re + 1j * self.curvature_im

    def max_deviation(self):
        """max_u |Psi''(u) + sigma2_hat| over the interior grid."""
        return float(np.max(np.abs(self.curvature + self.sigma2_hat)))

    def as_dict(self):
        return {
            k: (v.tolist() if isinstance(v, np.ndarray) else v)
            for k, v in asdict(self).items()
        }


def symmetric_grid(u_max=1.0, h=0.05):
    k = int(round(u_max / h))
    return h * np.arange(-k, k + 1)


def _check_grid(u, std):
    if u.ndim != 1 or u.size < 3:
        raise DomainError("u_grid needs at least three points")
    steps = np.diff(u)
    h = float(steps.mean())
    if not np.allclose(steps, h, rtol=1e-9, atol=0):
        raise DomainError("u_grid must be uniformly spaced")
    if not (0 < h <= 0.1 + 1e-12):
        raise DomainError(f"grid spacing h must lie in (0, 0.1], got {h!r}")
    if not np.allclose(u, -u[::-1], rtol=0, atol=1e-9 * h):
        raise DomainError("u_grid must be symmetric about 0")
    if u.size % 2 == 0:
        raise DomainError("u_grid must contain 0")
    umax = float(np.max(np.abs(u)))
    if std > 0 and umax > 2.0 / std * (1 + 1e-12):
        raise DomainError(
            f"max |u| = {umax:g} exceeds 2 / stddev = {2.0 / std:g}; shrink the u range"
        )
    return h


def ecf_curvature(x, u_grid=None, *, u_max=1.0, h=0.05, floor=0.1, min_size=1000, chunk=20000):
    """Empirical log characteristic function and its curvature.

    phi(u) = mean_j exp(i u x_j) on the grid; Psi = log phi takes the
    principal log of |phi| and unwraps the phase outward from u = 0 so it
    stays continuous. Curvature is (Psi(u+h) - 2 Psi(u) + Psi(u-h)) / h^2.

    Standard errors linearise Psi around phi: each observation contributes
    sum_k w_k exp(i u_k x_j) / phi(u_k) with w = (1, -2, 1) / h^2, and the
    spread of those contributions over j gives the SE at each u.

    Raises
    ------
    DomainError
        Fewer than `min_size` points, or a grid that is not symmetric,
        uniform, with 0 < h <= 0.1 and max |u| <= 2 / stddev(x).
    RangeError
        |phi(u)| < `floor` somewhere on the grid.
    """
    x = as_sample(x, min_size)
    m = x.size
    s2 = sample_variance(x)
    u = symmetric_grid(u_max, h) if u_grid is None else np.asarray(u_grid, dtype=np.float64)
    h = _check_grid(u, math.sqrt(s2))

    re = np.zeros(u.size)
    im = np.zeros(u.size)
    for a in range(0, m, chunk):
        ux = np.outer(x[a : a + chunk], u)
        re += np.cos(ux).sum(axis=0)
        im += np.sin(ux).sum(axis=0)
    phi = (re + 1j * im) / m
    # phi(0) is 1 exactly; pin it so Psi(0) = 0 without rounding
    mid = u.size // 2
    phi[mid] = 1.0
    mod = np.abs(phi)
    if np.any(mod < floor):
        bad = float(u[np.argmin(mod)])
        raise RangeError(
            f"characteristic function too small (|phi({bad:g})| = {mod.min():.3g} < {floor}); "
            "shrink u range"
        )

    phase = np.angle(phi)
    phase[mid] = 0.0
    right = np.unwrap(phase[mid:])
    left = np.unwrap(phase[: mid + 1][::-1])[::-1]
    phase = np.concatenate([left[:-1], right])
    psi = np.log(mod) + 1j * phase
    psi[mid] = 0.0

    curv = (psi[2:] - 2.0 * psi[1:-1] + psi[:-2]) / (h * h)

    # delta-method standard errors, accumulated in chunks
    inv_phi = 1.0 / phi
    s_re = np.zeros(u.size - 2)
    s_im = np.zeros(u.size - 2)
    q_re = np.zeros(u.size - 2)
    q_im = np.zeros(u.size - 2)
    for a in range(0, m, chunk):
        e = np.exp(1j * np.outer(x[a : a + chunk], u)) * inv_phi
        c = (e[:, 2:] - 2.0 * e[:, 1:-1] + e[:, :-2]) / (h * h)
        s_re += c.real.sum(axis=0)
        s_im += c.imag.sum(axis=0)
        q_re += (c.real**2).sum(axis=0)
        q_im += (c.imag**2).sum(axis=0)
    var_re = np.maximum(q_re / m - (s_re / m) ** 2, 0.0)
    var_im = np.maximum(q_im / m - (s_im / m) ** 2, 0.0)

    return EcfCurve(
        u_grid=u,
        psi_re=psi.real.copy(),
        psi_im=psi.imag.copy(),
        curvature_u=u[1:-1].copy(),
        curvature_re=curv.real.copy(),
        curvature_im=curv.imag.copy(),
        curvature_se_re=np.sqrt(var_re / m),
        curvature_se_im=np.sqrt(var_im / m),
        sigma2_hat=s2,
        h=h,
    )


@dataclass(frozen=True)
class Thresholds:
    """Decision thresholds for `normality_independence_report`."""

    dcor_level: float = 0.99
    cov_z: float = 4.0
    curvature_budget: float = 0.05


@dataclass(frozen=True)
class IndependenceReport:
    distribution: DistributionSpec
    n: int
    r: int
    m: int
    seed: int
    dependence: DependenceSummary
    ecf: EcfCurve | None
    ecf_max_deviation: float | None
    cov_z: float
    dcor_above_null: bool
    curvature_within_budget: bool | None
    verdict: str
    thresholds: Thresholds
    ecf_error: str | None = None

    def as_dict(self):
        return {
            "distribution": {"kind": self.distribution.kind, "params": list(self.distribution.params)},
            "n": self.n,
            "r": self.r,
            "m": self.m,
            "seed": self.seed,
            "dependence": self.dependence.as_dict(),
            "ecf_max_deviation": self.ecf_max_deviation,
            "ecf_sigma2_hat": None if self.ecf is None else self.ecf.sigma2_hat,
            "ecf_error": self.ecf_error,
            "cov_z": self.cov_z,
            "dcor_above_null": self.dcor_above_null,
            "curvature_within_budget": self.curvature_within_budget,
            "verdict": self.verdict,
            "thresholds": asdict(self.thresholds),
        }


CONSISTENT = "consistent with independence"
DEPENDENT = "dependence detected"


def normality_independence_report(
    d, n=10, r=10_000, m=100_000, seed=42, *, u_max=1.0, h=0.05, thresholds=None, n_permutations=N_PERMUTATIONS
) -> IndependenceReport:
    """Replicate (xbar, s^2), measure their dependence, and inspect the
    log-CF curvature of one large sample from the same law.

    The verdict is "dependence detected" when the covariance exceeds
    ``cov_z`` standard errors or dcor exceeds the ``dcor_level``
    permutation quantile, else "consistent with independence".

    AR(1) sources are refused: the curvature criterion characterises i.i.d.
    parents only.
    """
    if isinstance(d, Ar1Spec):
        raise DomainError(
            "the independence/curvature diagnostic is defined for i.i.d. parents only; "
            "AR(1) samples are dependent by construction"
        )
    if not isinstance(d, DistributionSpec):
        raise DomainError(f"unsupported source {type(d).__name__}")
    th = thresholds or Thresholds()
    rep = run_replications(d, n, r, seed, keep_pairs=True, symmetric=False)
    levels = tuple(sorted({0.95, 0.99, th.dcor_level}))
    dep = dependence_summary(rep.pairs, n_permutations, seed, levels)

    ecf = dev = within = err = None
    x = draw_sample(d, m, seed, 0, STREAM_ECF)
    try:
        ecf = ecf_curvature(x, u_max=u_max, h=h)
        dev = ecf.max_deviation()
        within = dev <= th.curvature_budget
    except (DomainError, RangeError) as exc:
        err = str(exc)

    cov_z = dep.cov_mean_s2 / dep.se_cov if dep.se_cov > 0 else 0.0
    above = (not dep.degenerate) and dep.above_null(th.dcor_level)
    verdict = DEPENDENT if (above or abs(cov_z) > th.cov_z) else CONSISTENT
    return IndependenceReport(
        distribution=d,
        n=n,
        r=r,
        m=m,
        seed=seed,
        dependence=dep,
        ecf=ecf,
        ecf_max_deviation=dev,
        cov_z=cov_z,
        dcor_above_null=above,
        curvature_within_budget=within,
        verdict=verdict,
        thresholds=th,
        ecf_error=err,
    )
