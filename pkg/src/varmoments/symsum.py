"""Distinct-index symmetric means of a sample.

The five "hatted" quantities average monomials over tuples of pairwise
distinct indices, normalised by the falling factorial count of such
tuples::

    mu4_hat    = sum_i x_i^4 / n
    mu31_hat   = sum_{i!=j} x_i^3 x_j / (n (n-1))
    mu22_hat   = sum_{i!=j} x_i^2 x_j^2 / (n (n-1))
    mu211_hat  = sum_{i,j,k distinct} x_i^2 x_j x_k / (n (n-1) (n-2))
    mu1111_hat = sum_{i,j,k,l distinct} x_i x_j x_k x_l / (n (n-1) (n-2) (n-3))

together with the two "tilde" quantities ``mu2_tilde = sum_i x_i^2 / n`` and
``mu11_tilde = sum_{i!=j} x_i x_j / (n (n-1))``.

`symmetric_moments` evaluates them in O(n) by writing every distinct-index
sum as a polynomial in the power sums p1..p4 (Moebius inversion over the
lattice of index coincidences). `brute_force_symmetric_moments` enumerates
the tuples literally and serves as the oracle.

None of these quantities is shift invariant.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ._common import as_sample, neumaier_rowsum
from .errors import DomainError

FIELDS = (
    "mu4_hat",
    "mu31_hat",
    "mu22_hat",
    "mu211_hat",
    "mu1111_hat",
    "mu2_tilde",
    "mu11_tilde",
)

# polynomial degree of each field, used by scaling checks
DEGREES = {
    "mu4_hat": 4,
    "mu31_hat": 4,
    "mu22_hat": 4,
    "mu211_hat": 4,
    "mu1111_hat": 4,
    "mu2_tilde": 2,
    "mu11_tilde": 2,
}

# smallest n for which each field has at least one distinct tuple
MIN_SIZE = {
    "mu4_hat": 1,
    "mu31_hat": 2,
    "mu22_hat": 2,
    "mu211_hat": 3,
    "mu1111_hat": 4,
    "mu2_tilde": 1,
    "mu11_tilde": 2,
}

BRUTE_FORCE_MAX_N = 40


@dataclass(frozen=True)
class PowerSums:
    """p_k = sum_i x_i^k for k = 1..4."""

    p1: float
    p2: float
    p3: float
    p4: float
    n: int


@dataclass(frozen=True)
class SymmetricMoments:
    """The seven distinct-index symmetric means of one sample.

    Fields that need more distinct indices than the sample has are NaN
    (only produced by the pair-only variant, see `pair_moments`).
    `shift` records the value subtracted from the data before evaluation,
    0.0 unless a diagnostic pre-centering was requested.
    """

    mu4_hat: float
    mu31_hat: float
    mu22_hat: float
    mu211_hat: float
    mu1111_hat: float
    mu2_tilde: float
    mu11_tilde: float
    n: int
    shift: float = 0.0

    def as_dict(self):
        return asdict(self)

    def values(self):
        return np.array([getattr(self, f) for f in FIELDS])

    def defined(self, field):
        return self.n >= MIN_SIZE[field]


def power_sums(x) -> PowerSums:
    """Power sums p1..p4 of a sample.

    Each sum is accumulated with `math.fsum`, which is correctly rounded
    and therefore independent of the order of the data.

    Examples
    --------
    >>> power_sums([1, 2, 3])
    PowerSums(p1=6.0, p2=14.0, p3=36.0, p4=98.0, n=3)
    """
    x = as_sample(x)
    x2 = x * x
    return PowerSums(
        p1=math.fsum(x),
        p2=math.fsum(x2),
        p3=math.fsum(x2 * x),
        p4=math.fsum(x2 * x2),
        n=int(x.size),
    )


def distinct_sums(ps: PowerSums) -> dict:
    """Unnormalised distinct-index sums as polynomials in the power sums.

    Keys: ``s4, s31, s22, s211, s1111, s2, s11``. Sums are over ordered
    tuples of pairwise distinct indices.
    """
    p1, p2, p3, p4 = ps.p1, ps.p2, ps.p3, ps.p4
    fs = math.fsum
    return {
        "s4": p4,
        "s31": fs((p1 * p3, -p4)),
        "s22": fs((p2 * p2, -p4)),
        "s211": fs((p1 * p1 * p2, -p2 * p2, -2.0 * p1 * p3, 2.0 * p4)),
        "s1111": fs(
            (
                p1 * p1 * p1 * p1,
                -6.0 * p1 * p1 * p2,
                3.0 * p2 * p2,
                8.0 * p1 * p3,
                -6.0 * p4,
            )
        ),
        "s2": p2,
        "s11": fs((p1 * p1, -p2)),
    }


def _normalise(s, n):
    nan = float("nan")
    n1 = n * (n - 1)
    n2 = n1 * (n - 2)
    n3 = n2 * (n - 3)
    return dict(
        mu4_hat=s["s4"] / n,
        mu31_hat=s["s31"] / n1 if n >= 2 else nan,
        mu22_hat=s["s22"] / n1 if n >= 2 else nan,
        mu211_hat=s["s211"] / n2 if n >= 3 else nan,
        mu1111_hat=s["s1111"] / n3 if n >= 4 else nan,
        mu2_tilde=s["s2"] / n,
        mu11_tilde=s["s11"] / n1 if n >= 2 else nan,
    )


def _check_size(n, partial):
    if n < 2:
        raise DomainError(f"symmetric moments need n >= 2 (pair sums), got n={n}")
    if partial:
        return
    for field in FIELDS:
        if n < MIN_SIZE[field]:
            raise DomainError(
                f"{field} is undefined for n={n}: it needs at least "
                f"{MIN_SIZE[field]} distinct indices"
            )


def _resolve_shift(x, shift):
    if shift is None:
        return 0.0
    if isinstance(shift, str):
        if shift != "median":
            raise ValueError(f"unknown shift {shift!r}; use a number or 'median'")
        return float(np.median(x))
    return float(shift)


def symmetric_moments(x, *, partial=False, shift=None) -> SymmetricMoments:
    """Distinct-index symmetric means in O(n).

    Parameters
    ----------
    x : array_like
        The sample, at least 4 finite values (2 with ``partial=True``).
    partial : bool
        Accept 2 <= n < 4 and mark fields lacking enough distinct indices
        as NaN instead of raising.
    shift : None, float or "median"
        Subtract this value from the data first. The result then describes
        the shifted sample, which is a different quantity: these means are
        not shift invariant. Intended for conditioning diagnostics only.

    Raises
    ------
    DomainError
        n < 2, or n < 4 without ``partial``; the message names the first
        undefined field.
    InputError
        Non-finite entries.
    """
    x = as_sample(x)
    n = int(x.size)
    _check_size(n, partial)
    c = _resolve_shift(x, shift)
    if c != 0.0:
        x = x - c
    s = distinct_sums(power_sums(x))
    return SymmetricMoments(**_normalise(s, n), n=n, shift=c)


def pair_moments(x) -> SymmetricMoments:
    """Reduced variant for short samples (n >= 2); see `symmetric_moments`."""
    return symmetric_moments(x, partial=True)


def brute_force_symmetric_moments(x, *, max_n=BRUTE_FORCE_MAX_N) -> SymmetricMoments:
    """Literal O(n^4) enumeration over distinct index tuples.

    Every admissible tuple's monomial is formed explicitly and the terms are
    accumulated with `math.fsum`. `max_n` guards against accidental use on
    long samples; pass ``max_n=None`` to lift it.
    """
    x = as_sample(x)
    n = int(x.size)
    _check_size(n, partial=False)
    if max_n is not None and n > max_n:
        raise DomainError(
            f"brute-force enumeration limited to n <= {max_n} (got n={n}); "
            "raise max_n explicitly to override"
        )
    idx = np.arange(n)
    ne = idx[:, None] != idx[None, :]
    i, j = np.nonzero(ne)
    s31 = math.fsum(x[i] ** 3 * x[j])
    s22 = math.fsum(x[i] ** 2 * x[j] ** 2)
    s11 = math.fsum(x[i] * x[j])

    ne3 = ne[:, :, None] & ne[:, None, :] & ne[None, :, :]
    i, j, k = np.nonzero(ne3)
    s211 = math.fsum(x[i] ** 2 * x[j] * x[k])

    ne4 = (
        ne3[:, :, :, None]
        & ne[:, None, None, :]
        & ne[None, :, None, :]
        & ne[None, None, :, :]
    )
    i, j, k, m = np.nonzero(ne4)
    s1111 = math.fsum(x[i] * x[j] * x[k] * x[m])

    sums = dict(
        s4=math.fsum(x**4),
        s31=s31,
        s22=s22,
        s211=s211,
        s1111=s1111,
        s2=math.fsum(x**2),
        s11=s11,
    )
    return SymmetricMoments(**_normalise(sums, n), n=n)


def batch_symmetric_moments(samples) -> dict:
    """Symmetric means of every row of an (r, n) array, vectorised.

    Returns a dict of length-r arrays keyed by field name. Power sums use
    compensated row sums; used by the Monte Carlo harness.
    """
    a = np.asarray(samples, dtype=np.float64)
    if a.ndim != 2:
        raise DomainError(f"expected a 2-d array of samples, got shape {a.shape}")
    n = a.shape[1]
    _check_size(n, partial=False)
    a2 = a * a
    p1 = neumaier_rowsum(a)
    p2 = neumaier_rowsum(a2)
    p3 = neumaier_rowsum(a2 * a)
    p4 = neumaier_rowsum(a2 * a2)
    sums = {
        "s4": p4,
        "s31": p1 * p3 - p4,
        "s22": p2 * p2 - p4,
        "s211": p1 * p1 * p2 - p2 * p2 - 2.0 * p1 * p3 + 2.0 * p4,
        "s1111": p1**4 - 6.0 * p1 * p1 * p2 + 3.0 * p2 * p2 + 8.0 * p1 * p3 - 6.0 * p4,
        "s2": p2,
        "s11": p1 * p1 - p2,
    }
    return _normalise(sums, n)
