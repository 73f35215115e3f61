"""Saddle-point asymptotics of the partition generating function.

With ``x = e^{-d}``, ``a(d) = sum_k k x^k / (1 - x^k)`` and
``b(d) = sum_k k^2 x^k / (1 - x^k)^2`` are the first two cumulants of the
weight under the geometric (Boltzmann) model. The saddle point ``d_n`` solves
``a(d_n) = n`` and gives Hayman's estimate

    p(n) ~ exp(n d_n) g(e^{-d_n}) / sqrt(2 pi b(d_n)).

Everything is evaluated in log space; series over ``k`` stop once terms drop
below ``1e-20`` of the running total, with a hard cap of ``ceil(60 / d)`` terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_int, check_real
from .laws import ZETA2, cdf_sigma2

REL_CUTOFF = 1e-20


class SolverError(RuntimeError):
    pass


def _terms(d: float, cap: int | None = None) -> np.ndarray:
    # terms decay like k^2 e^{-kd}; beyond 60/d they are < 1e-20 of the total
    nterms = math.ceil(60.0 / d) if cap is None else cap
    return np.arange(1, max(nterms, 1) + 1, dtype=float)


def _trim(terms: np.ndarray) -> np.ndarray:
    total = terms.sum()
    if total == 0:
        return terms
    small = np.flatnonzero(terms >= REL_CUTOFF * total)
    return terms[: small[-1] + 1] if small.size else terms[:1]


def a_of(d) -> float:
    """Mean weight ``sum_k k e^{-kd} / (1 - e^{-kd})``."""
    d = check_real(d, "d", minimum=0.0, strict=True)
    k = _terms(d)
    return float(math.fsum(_trim(k / np.expm1(k * d))))


def b_of(d) -> float:
    """Weight variance ``sum_k k^2 e^{-kd} / (1 - e^{-kd})^2``."""
    d = check_real(d, "d", minimum=0.0, strict=True)
    k = _terms(d)
    e = np.expm1(k * d)
    return float(math.fsum(_trim(k * k * (e + 1) / (e * e))))


def log_g_at(d, terms: int | None = None) -> float:
    """``log g(e^{-d}) = -sum_k log(1 - e^{-kd})``; ``terms`` overrides the cutoff."""
    d = check_real(d, "d", minimum=0.0, strict=True)
    k = _terms(d, terms)
    vals = -np.log1p(-np.exp(-k * d))
    return float(math.fsum(vals if terms is not None else _trim(vals)))


def log_g_complex(d: float, theta: float) -> complex:
    """``log g(e^{-d + i theta})`` on the principal branch of each factor."""
    k = _terms(d)
    z = np.exp(-k * d + 1j * k * theta)
    return complex(-np.sum(np.log1p(-z)))


def meinardus_log_g(d) -> float:
    """Leading terms ``zeta(2)/d + (1/2) log d - (1/2) log(2 pi)`` of ``log g(e^{-d})``."""
    d = check_real(d, "d", minimum=0.0, strict=True)
    return ZETA2 / d + 0.5 * math.log(d) - 0.5 * math.log(2 * math.pi)


@dataclass(frozen=True)
class SaddleSolution:
    n: int
    d_n: float
    a_val: float
    b_val: float
    log_g: float
    p_estimate_log: float

    @property
    def residual(self) -> float:
        return abs(self.a_val - self.n)

    @property
    def first_order(self) -> float:
        return math.pi / math.sqrt(6 * self.n)


def solve_saddle(n: int, tol: float = 1e-10, max_iter: int = 200) -> SaddleSolution:
    """Solve ``a(d) = n``: bracket, bisect, then Newton polish.

    ``a`` strictly decreases in ``d`` and ``a'(d) = -b(d)``. Converged when
    ``|a(d) - n| <= tol * n``.
    """
    n = check_int(n, "n", minimum=1)
    tol = check_real(tol, "tol", minimum=0.0, strict=True)
    guess = math.pi / math.sqrt(6 * n)
    lo, hi = guess / 2, guess * 2
    for _ in range(60):
        if a_of(lo) > n:
            break
        lo /= 2
    for _ in range(60):
        if a_of(hi) < n:
            break
        hi *= 2
    if not a_of(lo) > n > a_of(hi):
        raise SolverError(f"could not bracket the saddle point for n={n}: [{lo}, {hi}]")
    # coarse bisection, then Newton steps guarded by the bracket
    for _ in range(20):
        mid = 0.5 * (lo + hi)
        if a_of(mid) > n:
            lo = mid
        else:
            hi = mid
    d = 0.5 * (lo + hi)
    for _ in range(max_iter):
        a = a_of(d)
        if abs(a - n) <= tol * n:
            break
        if a > n:
            lo = d
        else:
            hi = d
        step = d + (a - n) / b_of(d)
        d = step if lo < step < hi else 0.5 * (lo + hi)
    else:
        raise SolverError(f"no convergence for n={n}: bracket [{lo}, {hi}], residual {a - n}")
    a, b, lg = a_of(d), b_of(d), log_g_at(d)
    est = n * d + lg - 0.5 * math.log(2 * math.pi * b)
    return SaddleSolution(n=n, d_n=d, a_val=a, b_val=b, log_g=lg, p_estimate_log=est)


def hayman_p_estimate(n: int) -> float:
    """Log of ``exp(n d_n) g(e^{-d_n}) / sqrt(2 pi b(d_n))``."""
    return solve_saddle(n).p_estimate_log


def hardy_ramanujan(n: int) -> float:
    """``exp(pi sqrt(2n/3)) / (4 n sqrt 3)``; overflows to inf past n ~ 2.5e5 (use the log)."""
    try:
        return math.exp(hardy_ramanujan_log(n))
    except OverflowError:
        return math.inf


def hardy_ramanujan_log(n: int) -> float:
    n = check_int(n, "n", minimum=1)
    return math.pi * math.sqrt(2 * n / 3) - math.log(4 * n * math.sqrt(3))


def expectation_X_asymptotic(n: int, t: float) -> float:
    """Leading-order ``E(X_{s,n})`` at ``s = t sqrt(6n) / pi``: ``n`` times the Debye CDF."""
    t = check_real(t, "t", minimum=0.0)
    return n * cdf_sigma2(t)


def locality_diagnostic(n: int, omega: float = 10.0, points: int = 9, outside: int = 6) -> list[dict]:
    """Compare the generating function on the circle ``|x| = e^{-d_n}`` with its Gaussian model.

    Inside ``|theta| <= delta_n = d_n^{4/3} / omega`` each row reports the
    compensated ratio ``e^{-i theta n} g(e^{-d_n + i theta}) / g(e^{-d_n})``
    against ``exp(-theta^2 b / 2)``. Outside, rows report the modulus ratio,
    flagged ``below_inside_min`` when it is smaller than the smallest
    inside-regime modulus.
    """
    n = check_int(n, "n", minimum=1)
    omega = check_real(omega, "omega", minimum=1.0, strict=True)
    sol = solve_saddle(n)
    d, b = sol.d_n, sol.b_val
    delta = d ** (4 / 3) / omega
    rows = []
    inside = np.linspace(0.0, delta, points)
    min_inside = math.inf
    for theta in inside:
        ratio = np.exp(log_g_complex(d, theta) - sol.log_g - 1j * theta * n) if theta else 1.0 + 0j
        gauss = math.exp(-theta * theta * b / 2)
        modulus = abs(ratio)
        min_inside = min(min_inside, modulus)
        rows.append({
            "regime": "inside",
            "theta": float(theta),
            "theta_over_delta": float(theta / delta),
            "ratio_re": float(ratio.real),
            "ratio_im": float(ratio.imag),
            "modulus": float(modulus),
            "gaussian": gauss,
            "rel_deviation": float(abs(ratio - gauss) / gauss),
            "below_inside_min": "",
        })
    for theta in np.geomspace(2 * delta, math.pi, outside):
        modulus = math.exp((log_g_complex(d, theta) - sol.log_g).real)
        rows.append({
            "regime": "outside",
            "theta": float(theta),
            "theta_over_delta": float(theta / delta),
            "ratio_re": "",
            "ratio_im": "",
            "modulus": modulus,
            "gaussian": math.exp(-theta * theta * b / 2),
            "rel_deviation": "",
            "below_inside_min": bool(modulus < min_inside),
        })
    return rows


def asymptotic_row(n: int, exact_limit: int = 50000) -> dict:
    """Saddle-point quantities for ``n`` and, when ``n <= exact_limit``, ratios to the exact ``p(n)``."""
    from .partitions import partition_count

    sol = solve_saddle(n)
    hr_log = hardy_ramanujan_log(n)
    row = {
        "n": n,
        "d_n": sol.d_n,
        "first_order": sol.first_order,
        "residual": sol.residual,
        "b_val": sol.b_val,
        "log_g": sol.log_g,
        "hayman_log": sol.p_estimate_log,
        "hr_log": hr_log,
        "exact_log_p": "",
        "hayman_ratio": "",
        "hr_ratio": "",
    }
    if n <= exact_limit:
        log_p = math.log(partition_count(n))
        row.update(exact_log_p=log_p, hayman_ratio=math.exp(sol.p_estimate_log - log_p),
                   hr_ratio=math.exp(hr_log - log_p))
    return row
