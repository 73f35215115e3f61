"""Exact finite-n statistics of uniformly random partitions.

The area-biased CDF comes from the coefficient of ``x^n`` in ``g(x) h_s(x)``,
computed as a truncated divisor-sum convolution with ``p(0..n)``. The
distinct-part and uniform-part CDFs need the joint law of a ratio of two
counts, which is obtained from a dynamic program over part sizes split at
``s``: parts ``<= s`` and parts ``> s`` are independent factors of the
generating function, so both halves are tabulated once per ``n`` and then
combined for any threshold.

Thresholds ``s`` are real; only ``floor(s)`` matters (``j <= s``
inclusive), and CDFs are right-continuous step functions of ``s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._validation import check_int, threshold
from .laws import cdf_sigma1, cdf_sigma2, cdf_sigma3_normalized
from .partitions import Partition, partition_count, partition_counts

SIGMA1_LIMIT = 300
SIGMA3_LIMIT = 60


class ExactLimitError(ValueError):
    """Raised when n exceeds the cost limit of an exact dynamic program."""


@dataclass(frozen=True)
class ExactProbability:
    """A probability kept as an exact rational."""

    fraction: Fraction

    def __post_init__(self):
        if not 0 <= self.fraction <= 1:
            raise ValueError(f"probability {self.fraction} outside [0, 1]")

    @property
    def value(self) -> float:
        return float(self.fraction)

    def __float__(self):
        return float(self.fraction)

    def __eq__(self, other):
        if isinstance(other, ExactProbability):
            return self.fraction == other.fraction
        if isinstance(other, (int, Fraction)):
            return self.fraction == other
        return NotImplemented

    def __hash__(self):
        return hash(self.fraction)

    def __str__(self):
        return str(self.fraction)


@dataclass(frozen=True)
class PartitionStats:
    n: int
    s: float
    Y_n: int
    Z_n: int
    Y_sn: int
    Z_sn: int
    X_sn: int


def stats_of(partition: Partition, s) -> PartitionStats:
    """Distinct parts, number of parts, and their restrictions to sizes ``<= s``."""
    k = threshold(s)
    small = [(j, m) for j, m in partition.mults.items() if j <= k]
    return PartitionStats(
        n=partition.n,
        s=float(s),
        Y_n=len(partition.mults),
        Z_n=sum(partition.mults.values()),
        Y_sn=len(small),
        Z_sn=sum(m for _, m in small),
        X_sn=sum(j * m for j, m in small),
    )


def truncated_divisor_sums(n: int, s) -> np.ndarray:
    """``h[m] = sum of divisors j of m with j <= s``, for ``m = 0..n``."""
    k = min(threshold(s), n)
    h = np.zeros(n + 1, dtype=np.int64)
    for j in range(1, k + 1):
        h[j::j] += j
    return h


def coeff_g_hs(n: int, s) -> int:
    """``[x^n] g(x) h_s(x)``, i.e. ``p(n) * E(X_{s,n})``, exactly."""
    n = check_int(n, "n", minimum=1)
    k = threshold(s)
    p = partition_counts(n)
    if k >= n:
        return n * p[n]
    h = truncated_divisor_sums(n, k)
    return sum(p[n - m] * int(h[m]) for m in range(1, n + 1) if h[m])


def sigma2_cdf_exact(n: int, s) -> ExactProbability:
    """``P(sigma_{n,2} <= s) = E(X_{s,n}) / n`` for area-biased selection."""
    n = check_int(n, "n", minimum=1)
    return ExactProbability(Fraction(coeff_g_hs(n, s), n * partition_count(n)))


def expected_Ysn(n: int, s) -> Fraction:
    """``E(Y_{s,n}) = sum_{j <= s} p(n-j) / p(n)``."""
    n = check_int(n, "n", minimum=1)
    k = min(threshold(s), n)
    p = partition_counts(n)
    return Fraction(sum(p[n - j] for j in range(1, k + 1)), p[n])


def expected_Y(n: int) -> Fraction:
    """Mean number of distinct part sizes."""
    return expected_Ysn(n, n)


def expected_Z(n: int) -> Fraction:
    """Mean number of parts, ``sum_m d(m) p(n-m) / p(n)`` with ``d`` the divisor count."""
    n = check_int(n, "n", minimum=1)
    p = partition_counts(n)
    d = np.zeros(n + 1, dtype=np.int64)
    for j in range(1, n + 1):
        d[j::j] += 1
    return Fraction(sum(p[n - m] * int(d[m]) for m in range(1, n + 1)), p[n])


# -- joint DP for ratio statistics -------------------------------------------


def _dtype_for(n: int):
    return np.int64 if partition_count(n) < 2**62 else object


def _residue_cumsum(arr: np.ndarray, j: int) -> np.ndarray:
    """``out[r] = sum_{k >= 0} arr[r - j*k]`` along axis 0."""
    rows = arr.shape[0]
    pad = (-rows) % j
    if pad:
        arr = np.concatenate([arr, np.zeros((pad,) + arr.shape[1:], dtype=arr.dtype)])
    out = np.cumsum(arr.reshape((-1, j) + arr.shape[1:]), axis=0)
    return out.reshape(arr.shape)[:rows]


def _add_part_distinct(table: np.ndarray, j: int) -> np.ndarray:
    # factor 1 + v x^j / (1 - x^j): marker counts distinct sizes
    out = table.copy()
    summed = _residue_cumsum(table, j)
    out[j:, 1:] += summed[:-j, :-1]
    return out


def _add_part_counted(table: np.ndarray, j: int) -> np.ndarray:
    # factor 1 / (1 - u x^j): marker counts parts with multiplicity
    out = table.copy()
    for r in range(j, table.shape[0]):
        out[r, 1:] += out[r - j, :-1]
    return out


class _SplitTables:
    """Tables ``lower[s][r, a]`` (parts <= s) and ``upper[s][r, b]`` (parts > s).

    The marker ``a``/``b`` counts distinct sizes (``counted=False``) or parts
    with multiplicity (``counted=True``); rows run over the weight ``r <= n``.
    """

    def __init__(self, n: int, counted: bool):
        self.n = n
        if counted:
            width = n + 1
            step = _add_part_counted
        else:
            width = int((math.isqrt(8 * n + 1) - 1) // 2) + 1
            step = _add_part_distinct
        base = np.zeros((n + 1, width), dtype=_dtype_for(n))
        base[0, 0] = 1
        lower = [base]
        for j in range(1, n + 1):
            lower.append(step(lower[-1], j))
        upper = [None] * (n + 1)
        upper[n] = base
        for j in range(n, 0, -1):
            upper[j - 1] = step(upper[j], j)
        self.lower, self.upper = lower, upper
        self._check = int(lower[n][n].sum())
        if self._check != partition_count(n):
            raise AssertionError("split DP disagrees with p(n)")

    def expected_ratio(self, s: int) -> Fraction:
        """``E(a / (a + b))`` over partitions of ``n`` split at ``s``."""
        n = self.n
        lower = self.lower[s].astype(object)
        upper = self.upper[s].astype(object)[::-1]
        joint = lower.T.dot(upper)  # joint[a, b] = #partitions with markers (a, b)
        width = joint.shape[0]
        total = Fraction(0)
        for y in range(1, 2 * width - 1):
            num = 0
            for a in range(max(1, y - width + 1), min(y, width - 1) + 1):
                num += a * joint[a, y - a]
            if num:
                total += Fraction(num, y)
        return total / partition_count(n)


@lru_cache(maxsize=8)
def _split_tables(n: int, counted: bool) -> _SplitTables:
    return _SplitTables(n, counted)


def sigma1_cdf_exact(n: int, s, limit: int = SIGMA1_LIMIT) -> ExactProbability:
    """``P(sigma_{n,1} <= s) = E(Y_{s,n} / Y_n)`` (uniform over distinct sizes)."""
    n = check_int(n, "n", minimum=1)
    k = threshold(s)
    if k >= n:
        return ExactProbability(Fraction(1))
    if n > limit:
        raise ExactLimitError(f"n={n} exceeds the distinct-part DP limit {limit}; use Monte Carlo")
    return ExactProbability(_split_tables(n, False).expected_ratio(k))


def sigma3_cdf_exact(n: int, s, limit: int = SIGMA3_LIMIT) -> ExactProbability:
    """``P(sigma_{n,3} <= s) = E(Z_{s,n} / Z_n)`` (uniform over all parts)."""
    n = check_int(n, "n", minimum=1)
    k = threshold(s)
    if k >= n:
        return ExactProbability(Fraction(1))
    if n > limit:
        raise ExactLimitError(f"n={n} exceeds the all-parts DP limit {limit}; use Monte Carlo")
    return ExactProbability(_split_tables(n, True).expected_ratio(k))


_EXACT_CDF = {1: sigma1_cdf_exact, 2: sigma2_cdf_exact, 3: sigma3_cdf_exact}


def exact_cdf(n: int, procedure: int, s, limit: int | None = None) -> ExactProbability:
    """Exact ``P(sigma_{n,proc} <= s)``; ``s < 1`` gives 0."""
    if s < 1:
        return ExactProbability(Fraction(0))
    func = _EXACT_CDF[int(procedure)]
    if limit is not None and procedure != 2:
        return func(n, s, limit=limit)
    return func(n, s)


def threshold_for(n: int, procedure: int, t: float) -> int:
    """Integer threshold ``s`` matching normalized level ``t``.

    Procedures 1 and 2 use ``t = pi s / sqrt(6n)``; procedure 3 uses
    ``t = 2 log s / log n``.
    """
    if procedure == 3:
        if n < 2:
            return 1
        return math.floor(n ** (t / 2) * (1 + 1e-12))
    return math.floor(t * math.sqrt(6 * n) / math.pi * (1 + 1e-12))


def limit_cdf(procedure: int, t: float) -> float:
    return {1: cdf_sigma1, 2: cdf_sigma2, 3: cdf_sigma3_normalized}[int(procedure)](t)


def cdf_grid(n: int, procedure: int, t_values, limit: int | None = None) -> list[dict]:
    """Rows ``(n, s, t, exact_cdf, limit_cdf, abs_error)`` over a grid of ``t``."""
    rows = []
    for t in t_values:
        s = threshold_for(n, procedure, t)
        exact = exact_cdf(n, procedure, s, limit=limit)
        lim = limit_cdf(procedure, t)
        rows.append({
            "n": n,
            "s": s,
            "t": float(t),
            "exact_cdf": exact,
            "limit_cdf": lim,
            "abs_error": abs(exact.value - lim),
        })
    return rows
