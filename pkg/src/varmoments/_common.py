import numpy as np

from .errors import DomainError, InputError


def as_sample(x, min_size=1, what="sample"):
    """Coerce `x` to a 1-d float64 array and validate it.

    Raises DomainError when shorter than `min_size` and InputError on the
    first non-finite entry.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise InputError(f"{what} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise DomainError(f"{what} is empty")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        i = int(bad[0])
        raise InputError(f"{what} entry {i} is not finite ({arr[i]!r})")
    if arr.size < min_size:
        raise DomainError(f"{what} needs at least {min_size} values, got {arr.size}")
    return arr


def relative_residual(a, b, floor=0.0):
    """|a - b| / max(|a|, |b|, floor); 0 when both are exactly equal."""
    a = float(a)
    b = float(b)
    if a == b:
        return 0.0
    denom = max(abs(a), abs(b), floor)
    if denom == 0.0:
        return float("inf")
    return abs(a - b) / denom


def neumaier_rowsum(a):
    """Compensated (Neumaier) sum along the last axis of a 2-d array.

    Loops over columns and vectorises over rows, so it is cheap when rows
    are short and numerous (Monte Carlo replicate matrices).
    """
    a = np.asarray(a, dtype=np.float64)
    s = np.zeros(a.shape[0])
    c = np.zeros(a.shape[0])
    for j in range(a.shape[1]):
        v = a[:, j]
        t = s + v
        big = np.abs(s) >= np.abs(v)
        c += np.where(big, (s - t) + v, (v - t) + s)
        s = t
    return s + c
