"""Sample mean, sample variance and the exact identities linking them to
pair and quadruple sums."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ._common import as_sample
from .moments import s4_coefficients
from .symsum import SymmetricMoments, power_sums, symmetric_moments


@dataclass(frozen=True)
class VarianceBreakdown:
    """s^2 and s^4 of one sample, each computed two ways.

    ``bessel`` is the two-pass definition, ``ustat`` the kernel average
    (x_i - x_j)^2 / 2 over distinct pairs. ``s4_direct`` squares
    ``bessel``; ``s4_decomposed`` recombines the distinct-index symmetric
    means with the `s4_coefficients` weights.
    """

    bessel: float
    ustat: float
    s4_direct: float
    s4_decomposed: float
    moments: SymmetricMoments

    def as_dict(self):
        d = asdict(self)
        d["moments"] = self.moments.as_dict()
        return d


def sample_mean(x) -> float:
    """Arithmetic mean, summed with `math.fsum`."""
    x = as_sample(x, 1)
    return math.fsum(x) / x.size


def sample_variance(x) -> float:
    """Bessel-corrected variance, two-pass with a compensation term.

    The second pass subtracts (sum of deviations)^2 / n, which removes the
    rounding error left in the mean (corrected two-pass algorithm).
    """
    x = as_sample(x, 2)
    n = x.size
    d = x - math.fsum(x) / n
    corr = math.fsum(d)
    return max(math.fsum(d * d) - corr * corr / n, 0.0) / (n - 1)


def sample_variance_ustat(x) -> float:
    """s^2 as the average of h(a, b) = (a - b)^2 / 2 over distinct pairs.

    The pair sum is reduced in O(n): sum_{i!=j} (x_i - x_j)^2 / 2 equals
    n sum x_i^2 - (sum x_i)^2, so the average is
    (sum x_i^2 - n xbar^2) / (n - 1). This raw-moment form cancels badly
    when |mean| >> spread; `sample_variance` does not.
    """
    x = as_sample(x, 2)
    ps = power_sums(x)
    n = ps.n
    return math.fsum((ps.p2, -ps.p1 * ps.p1 / n)) / (n - 1)


def sample_variance_pairs(x) -> float:
    """Literal O(n^2) kernel average over all ordered distinct pairs."""
    x = as_sample(x, 2)
    n = x.size
    diff = np.subtract.outer(x, x)
    # diagonal terms are zero, so including them changes nothing
    return math.fsum((diff * diff).ravel() / 2.0) / (n * (n - 1))


def s4_decomposed(sm: SymmetricMoments, coefficients=None) -> float:
    c = s4_coefficients(sm.n) if coefficients is None else coefficients
    vals = (sm.mu4_hat, sm.mu31_hat, sm.mu22_hat, sm.mu211_hat, sm.mu1111_hat)
    return math.fsum(ci * v for ci, v in zip(c, vals))


def variance_breakdown(x, coefficients=None) -> VarianceBreakdown:
    """Compute s^2 both ways and s^4 both ways for a sample of n >= 4.

    `coefficients` overrides the five s^4 weights; only useful to check
    that a perturbed combination is caught by the identity test.
    """
    x = as_sample(x, 4)
    s2 = sample_variance(x)
    sm = symmetric_moments(x)
    return VarianceBreakdown(
        bessel=s2,
        ustat=sample_variance_ustat(x),
        s4_direct=s2 * s2,
        s4_decomposed=s4_decomposed(sm, coefficients),
        moments=sm,
    )
