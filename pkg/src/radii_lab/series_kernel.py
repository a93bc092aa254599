"""Certified evaluation of square-root coefficient series and monotone root solving.

Every lower bound for a polydisk Bohr-type radius in this package reduces to a
scalar equation ``series(r) = 1/2`` where ``series`` is a power series with
nonnegative coefficients of the shape ``sqrt(binomial) * r^k``.  The functions
here evaluate those series by direct summation and return the partial sum
together with an explicit bound on the discarded tail, so downstream callers
can treat every evaluation as a two-sided enclosure:

    series(r) in [value, value + tail_bound].

Tail bounds used (all elementary, all one-sided majorants):

* ``sum_{k>=1} sqrt(k) r^k``:  after K terms, ``sqrt(K+j) <= sqrt(K)(1+j)``
  gives tail <= sqrt(K) r^K (r/(1-r) + r/(1-r)^2).
* ``sum_{k>=1} sqrt(C(d+k-2, k-1)) r^k``:  for fixed d the coefficients grow
  only polynomially in k (C(d+k-2, k-1) = C(d+k-2, d-1) ~ k^(d-1)/(d-1)!), so
  the radius of convergence is 1.  Two tails are combined:
  (i) when r sqrt(d) < 1, the crude majorant C(d+k-2, k-1) <= d^(k-1) gives
  tail <= r (r sqrt(d))^K / (1 - r sqrt(d));
  (ii) for any r < 1, the term ratio r sqrt((d+k-1)/k) decreases in k, so once
  it drops below 1 the remaining terms are dominated by a geometric series:
  tail <= a_K * rho / (1 - rho) with rho the next-term ratio at K.
  The reported tail_bound is the smaller applicable bound.
* ``r + sum_{k>=2} sqrt(C(d+k-1, k)) r^k`` (Boas-Khavinson majorant):
  same two-tail scheme with term ratio r sqrt((d+k)/(k+1)) and crude tail
  (r sqrt(d))^(K+1) / (1 - r sqrt(d)).
* ``sum_{k>=1} r^k d^((k-1)/2)``:  geometric, the tail formula is exact; this
  series genuinely diverges at r sqrt(d) = 1, so its domain stays restricted.

Roots of monotone equations are then bracketed by plain bisection, which stays
honest because each evaluation carries its own error estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Tuple, Union

import mpmath as mp

# Bisection and summation caps.  The summation cap only binds for r within
# ~1e-7 of the convergence boundary at default tolerances.
_MAX_TERMS = 20_000_000
_HP_BITS = 96


class BracketError(ValueError):
    """Raised when the endpoint values do not straddle the target."""


class ConvergenceError(RuntimeError):
    """Raised when an iteration cap is reached before the tolerance is met."""


@dataclass(frozen=True)
class SeriesValue:
    """A partial sum ``value`` with a certified bound on the discarded tail."""

    value: float
    tail_bound: float
    terms_used: int


def _check_tol(tol: float) -> None:
    if not (tol > 0.0):
        raise ValueError(f"tolerance must be positive, got {tol}")


def _check_d(d: int) -> None:
    if not (isinstance(d, int) and d >= 1):
        raise ValueError(f"dimension must be an integer >= 1, got {d!r}")


def _sqrt_int(n: int) -> float:
    """sqrt of a nonnegative integer that may exceed float range."""
    try:
        return math.sqrt(n)
    except OverflowError:
        return math.exp(0.5 * math.log(n))


def polylog_neg_half(r: float, tol: float = 1e-12, hp: bool = False) -> SeriesValue:
    """Evaluate ``Li_{-1/2}(r) = sum_{k>=1} sqrt(k) r^k`` for 0 <= r < 1.

    With ``hp=True`` the summation runs in 96-bit mpmath arithmetic to squeeze
    out accumulated rounding; the result is rounded back to a double.
    """
    _check_tol(tol)
    if not (0.0 <= r < 1.0):
        raise ValueError(f"polylog_neg_half needs 0 <= r < 1, got {r}")
    if r == 0.0:
        return SeriesValue(0.0, 0.0, 0)

    def run(rr, sqrt):
        geom = rr / (1 - rr) + rr / (1 - rr) ** 2
        total = rr * 0
        rk = rr * 0 + 1
        k = 0
        while k < _MAX_TERMS:
            k += 1
            rk = rk * rr
            total = total + sqrt(k) * rk
            tail = sqrt(k) * rk * geom
            if tail <= tol:
                return total, tail, k
        raise ConvergenceError(
            f"polylog_neg_half(r={r}) did not reach tol={tol} in {_MAX_TERMS} terms"
        )

    if hp:
        with mp.workprec(_HP_BITS):
            total, tail, k = run(mp.mpf(r), mp.sqrt)
        return SeriesValue(float(total), float(tail), k)
    total, tail, k = run(float(r), math.sqrt)
    return SeriesValue(total, tail, k)


def binom_sqrt_series(d: int, r: float, tol: float = 1e-12, hp: bool = False) -> SeriesValue:
    """Evaluate ``sum_{k>=1} sqrt(C(d+k-2, k-1)) r^k`` for 0 <= r < 1.

    The coefficients count monomials of degree k-1 in d variables; their
    square roots majorize the homogeneous-part sums of a transfer-function
    realization, which is why the root of this series against 1/2 furnishes
    a Bohr-Agler radius lower bound.  Coefficients are exact big integers;
    the square root alone is floating point.
    """
    _check_d(d)
    _check_tol(tol)
    if not (0.0 <= r < 1.0):
        raise ValueError(f"binom_sqrt_series needs 0 <= r < 1, got r={r}")
    if r == 0.0:
        return SeriesValue(0.0, 0.0, 0)
    rsd = r * math.sqrt(d)

    def run(rr, sqrt):
        total = rr * 0
        rk = rr * 0 + 1
        comb = 1  # C(d+k-2, k-1) at k=1
        k = 0
        while k < _MAX_TERMS:
            k += 1
            rk = rk * rr
            if comb <= 1e300 or hp:
                term = sqrt(comb) * rk
            else:
                term = math.exp(0.5 * math.log(comb) + k * math.log(r))
            total = total + term
            tail = math.inf
            if rsd < 1.0:
                tail = rsd**k * r / (1.0 - rsd)
            ratio = r * math.sqrt((d + k - 1) / k)  # next-term ratio, decreasing in k
            if ratio < 1.0:
                tail = min(tail, float(term) * ratio / (1.0 - ratio))
            if tail <= tol:
                return total, tail, k
            comb = comb * (d + k - 1) // k  # advance to C(d+k-1, k)
        raise ConvergenceError(
            f"binom_sqrt_series(d={d}, r={r}) did not reach tol={tol} in {_MAX_TERMS} terms"
        )

    if hp:
        with mp.workprec(_HP_BITS):
            total, tail, k = run(mp.mpf(r), mp.sqrt)
        return SeriesValue(float(total), float(tail), k)
    total, tail, k = run(float(r), _sqrt_int)
    return SeriesValue(total, tail, k)


def boas_khavinson_series(d: int, r: float, tol: float = 1e-12, hp: bool = False) -> SeriesValue:
    """Evaluate ``r + sum_{k>=2} sqrt(C(d+k-1, k)) r^k`` for 0 <= r < 1.

    This is the classical Boas-Khavinson majorant: C(d+k-1, k) counts the
    monomials of degree k in d variables, and Cauchy-Schwarz against the
    Wiener norm bounds each homogeneous part of a bounded function by
    sqrt(C(d+k-1, k)) (1 - |f(0)|^2).  Its root against 1/2 gives the
    d-variable Bohr radius lower bound.
    """
    _check_d(d)
    _check_tol(tol)
    if not (0.0 <= r < 1.0):
        raise ValueError(f"boas_khavinson_series needs 0 <= r < 1, got r={r}")
    if r == 0.0:
        return SeriesValue(0.0, 0.0, 0)
    rsd = r * math.sqrt(d)

    def run(rr, sqrt):
        total = rr  # degree-1 term enters with coefficient 1, not sqrt(d)
        rk = rr
        comb = d  # C(d, 1)
        k = 1
        if rsd < 1.0:
            tail = rsd * rsd / (1.0 - rsd)
            if tail <= tol:
                return total, tail, k
        while k < _MAX_TERMS:
            k += 1
            comb = comb * (d + k - 1) // k  # C(d+k-1, k)
            rk = rk * rr
            if comb <= 1e300 or hp:
                term = sqrt(comb) * rk
            else:
                term = math.exp(0.5 * math.log(comb) + k * math.log(r))
            total = total + term
            tail = math.inf
            if rsd < 1.0:
                tail = rsd ** (k + 1) / (1.0 - rsd)
            ratio = r * math.sqrt((d + k) / (k + 1))  # next-term ratio, decreasing in k
            if ratio < 1.0:
                tail = min(tail, float(term) * ratio / (1.0 - ratio))
            if tail <= tol:
                return total, tail, k
        raise ConvergenceError(
            f"boas_khavinson_series(d={d}, r={r}) did not reach tol={tol} in {_MAX_TERMS} terms"
        )

    if hp:
        with mp.workprec(_HP_BITS):
            total, tail, k = run(mp.mpf(r), mp.sqrt)
        return SeriesValue(float(total), float(tail), k)
    total, tail, k = run(float(r), _sqrt_int)
    return SeriesValue(total, tail, k)


def geometric_sqrt_series(d: int, r: float, tol: float = 1e-12, hp: bool = False) -> SeriesValue:
    """Evaluate ``sum_{k>=1} r^k d^((k-1)/2)`` for 0 <= r < 1/sqrt(d).

    This dominates ``binom_sqrt_series`` term by term and sums in closed form
    to ``r / (1 - r sqrt(d))``; it is kept as an honest truncated series so the
    same root-solving machinery applies to it.
    """
    _check_d(d)
    _check_tol(tol)
    sd = math.sqrt(d)
    rsd = r * sd
    if not (0.0 <= r and rsd < 1.0):
        raise ValueError(
            f"geometric_sqrt_series needs 0 <= r < 1/sqrt(d)={1.0 / sd:.6g}, got r={r}"
        )
    if r == 0.0:
        return SeriesValue(0.0, 0.0, 0)

    def run(rr, sdd):
        total = rr * 0
        term = (rr * 0 + 1) / sdd
        k = 0
        while k < _MAX_TERMS:
            k += 1
            term = term * rr * sdd
            total = total + term
            tail = rsd**k * r / (1.0 - rsd)
            if tail <= tol:
                return total, tail, k
        raise ConvergenceError(
            f"geometric_sqrt_series(d={d}, r={r}) did not reach tol={tol} in {_MAX_TERMS} terms"
        )

    if hp:
        with mp.workprec(_HP_BITS):
            total, tail, k = run(mp.mpf(r), mp.sqrt(mp.mpf(d)))
        return SeriesValue(float(total), float(tail), k)
    total, tail, k = run(float(r), sd)
    return SeriesValue(total, tail, k)


SeriesLike = Callable[[float], Union[SeriesValue, float]]


def _value_of(y: Union[SeriesValue, float]) -> float:
    return y.value if isinstance(y, SeriesValue) else float(y)


def solve_root(
    series: SeriesLike,
    target: float,
    bracket: Tuple[float, float],
    tol: float = 1e-10,
    max_iter: int = 200,
) -> float:
    """Bisect a nondecreasing scalar function to ``series(r) = target``.

    ``series`` may return either a plain float or a :class:`SeriesValue`
    (whose ``value`` field is used).  Requires
    ``series(lo) < target < series(hi)``; raises :class:`BracketError`
    otherwise and :class:`ConvergenceError` if ``max_iter`` bisection steps do
    not bring both the interval width and the residual under ``tol``.
    """
    _check_tol(tol)
    lo, hi = bracket
    if not (lo < hi):
        raise ValueError(f"bracket must satisfy lo < hi, got {bracket}")
    flo = _value_of(series(lo))
    fhi = _value_of(series(hi))
    if not (flo < target < fhi):
        raise BracketError(
            f"series({lo}) = {flo} and series({hi}) = {fhi} do not straddle target {target}"
        )
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fmid = _value_of(series(mid))
        if fmid < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol and abs(fmid - target) <= tol:
            return 0.5 * (lo + hi)
    raise ConvergenceError(
        f"bisection did not converge to tol={tol} in {max_iter} iterations "
        f"(last interval [{lo}, {hi}])"
    )
