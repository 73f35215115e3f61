"""Limiting distributions of sampled part sizes and multiplicities.

Part sizes (normalized):

* distinct-part selection ``pi*sigma/sqrt(6n)``: ``1 - exp(-t)``
* area-biased selection ``pi*sigma/sqrt(6n)``: the Debye CDF
  ``(6/pi^2) * int_0^t u/(e^u - 1) du``
* uniform-part selection ``2*log(sigma)/log(n)``: uniform on ``(0, 1)``

Multiplicities: ``1/(m(m+1))``, ``6(2m+1)/(pi^2 m (m+1)^2)`` and again the
uniform law on the ``2*log(mu)/log(n)`` scale.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.special import bernoulli

ZETA2 = math.pi**2 / 6

# Taylor coefficients of int_0^t u/(e^u-1) du = sum_k c_k t^(k+1)
_N_TAYLOR = 40
_BERN = bernoulli(_N_TAYLOR)
_TAYLOR = np.array([_BERN[k] / ((k + 1) * math.factorial(k)) for k in range(_N_TAYLOR + 1)])
_SWITCH = 1.0


def cdf_sigma1(t):
    """Exponential limit ``1 - exp(-t)`` (clamped to 0 for ``t < 0``)."""
    t = np.asarray(t, dtype=float)
    out = -np.expm1(-np.maximum(t, 0.0))
    return out if out.ndim else float(out)


def _debye_series(t):
    # Bernoulli series, radius of convergence 2*pi; used for t < 1
    return np.polyval(_TAYLOR[::-1], t) * t


_K_TAIL = np.arange(1, 41, dtype=float)


def _debye_tail(t):
    # int_t^inf u/(e^u-1) du = sum_k e^{-kt} (t/k + 1/k^2); 40 terms suffice for t >= 1
    t = np.asarray(t, dtype=float)[..., None]
    return np.sum(np.exp(-_K_TAIL * t) * (t / _K_TAIL + 1.0 / _K_TAIL**2), axis=-1)


def debye_integral(t):
    """``int_0^t u/(e^u - 1) du`` for ``t >= 0`` (0 for negative ``t``)."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    small = (t > 0) & (t < _SWITCH)
    big = (t >= _SWITCH) & np.isfinite(t)
    out[small] = _debye_series(t[small])
    out[big] = ZETA2 - _debye_tail(t[big])
    out[np.isposinf(t)] = ZETA2
    return out if out.ndim else float(out)


def cdf_sigma2(t):
    """Debye CDF ``(6/pi^2) int_0^t u/(e^u-1) du``; accurate to about 1e-15."""
    out = np.clip(np.asarray(debye_integral(t)) / ZETA2, 0.0, 1.0)
    return out if out.ndim else float(out)


def cdf_sigma3_normalized(t):
    """Uniform law on ``(0, 1)``: ``clamp(t, 0, 1)``."""
    out = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    return out if out.ndim else float(out)


cdf_mult3_normalized = cdf_sigma3_normalized


def _check_mult(m) -> int:
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise ValueError(f"multiplicity must be an integer >= 1, got {m!r}")
    return int(m)


def pmf_mult1(m) -> float:
    """``1 / (m (m+1))``."""
    m = _check_mult(m)
    return 1.0 / (m * (m + 1))


def pmf_mult1_exact(m) -> Fraction:
    m = _check_mult(m)
    return Fraction(1, m * (m + 1))


def pmf_mult2(m) -> float:
    """``6 (2m+1) / (pi^2 m (m+1)^2)``."""
    m = _check_mult(m)
    return 6.0 * (2 * m + 1) / (math.pi**2 * m * (m + 1) ** 2)


def mult2_partial_sum(M: int) -> float:
    """``sum_{m<=M} pmf_mult2(m)`` in closed form.

    Uses ``(2m+1)/(m(m+1)^2) = 1/m - 1/(m+1) + 1/(m+1)^2``.
    """
    M = int(M)
    if M < 1:
        return 0.0
    sq_sum = math.fsum(1.0 / (k * k) for k in range(2, M + 2))
    return (6.0 / math.pi**2) * (1.0 - 1.0 / (M + 1) + sq_sum)


class LawKind(str, enum.Enum):
    SIGMA1 = "sigma1-exponential"
    SIGMA2 = "sigma2-debye"
    SIGMA3 = "sigma3-loguniform"
    MULT1 = "mult1-zipflike"
    MULT2 = "mult2-debyetype"
    MULT3 = "mult3-loguniform"


@dataclass(frozen=True)
class LimitLaw:
    """A limit law plus the normalization that maps raw values onto its scale.

    ``n`` only enters through ``normalize``; the law itself is n-free.
    """

    kind: LawKind
    n: int | None = None

    @property
    def discrete(self) -> bool:
        return self.kind in (LawKind.MULT1, LawKind.MULT2)

    def cdf(self, t):
        if self.kind is LawKind.SIGMA1:
            return cdf_sigma1(t)
        if self.kind is LawKind.SIGMA2:
            return cdf_sigma2(t)
        if self.kind in (LawKind.SIGMA3, LawKind.MULT3):
            return cdf_sigma3_normalized(t)
        raise TypeError(f"{self.kind.value} is discrete; use pmf")

    def pmf(self, m):
        if self.kind is LawKind.MULT1:
            return pmf_mult1(m)
        if self.kind is LawKind.MULT2:
            return pmf_mult2(m)
        raise TypeError(f"{self.kind.value} is continuous; use cdf")

    def normalize(self, values):
        """Map raw part sizes / multiplicities onto the law's scale."""
        values = np.asarray(values, dtype=float)
        if self.kind in (LawKind.SIGMA1, LawKind.SIGMA2):
            return math.pi * values / math.sqrt(6 * self._n())
        if self.kind in (LawKind.SIGMA3, LawKind.MULT3):
            return 2 * np.log(values) / math.log(self._n())
        return values

    def _n(self) -> int:
        if self.n is None or self.n < 2:
            raise ValueError(f"{self.kind.value} normalization needs n >= 2")
        return self.n


def ks_distance(sample, cdf: Callable, weights=None, support: tuple[float, float] | None = None) -> float:
    """Sup-distance between the empirical CDF of ``sample`` and ``cdf``.

    Both one-sided limits are checked at every jump point. ``weights``
    gives per-value counts (so a summary's value/count table can be passed
    directly). With ``support=(lo, hi)`` the sup is taken over ``[lo, hi]``
    only; the endpoints are included.

    ``cdf`` is treated as continuous; for a step reference pass its values
    at the jump points through ``sample`` instead.
    """
    x = np.asarray(sample, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("empty sample")
    w = np.ones_like(x) if weights is None else np.asarray(weights, dtype=float).ravel()
    order = np.argsort(x, kind="stable")
    x, w = x[order], w[order]
    xs, idx = np.unique(x, return_index=True)
    mass = np.add.reduceat(w, idx)
    total = mass.sum()
    upper = np.cumsum(mass) / total
    lower = upper - mass / total
    if support is not None:
        lo, hi = support
        cum = np.concatenate([[0.0], upper])
        ends = np.array([lo, hi], dtype=float)
        end_vals = cum[np.searchsorted(xs, ends, side="right")]
        dist = float(np.max(np.abs(end_vals - np.asarray(cdf(ends), dtype=float))))
        inside = (xs > lo) & (xs <= hi)
        if np.any(inside):
            ref = np.asarray(cdf(xs[inside]), dtype=float)
            dist = max(dist, float(np.max(np.abs(upper[inside] - ref))),
                       float(np.max(np.abs(lower[inside] - ref))))
        return dist
    ref = np.asarray(cdf(xs), dtype=float)
    return float(max(np.max(np.abs(upper - ref)), np.max(np.abs(lower - ref))))
