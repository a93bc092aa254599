"""Explicit lower and upper bounds for the polydisk Bohr-type radii.

Three radii of the d-dimensional polydisk are tracked:

* ``K_d``   the Bohr radius: largest r with ``l1_norm(f_r) <= 1`` for every
  analytic f bounded by 1;
* ``KA_d``  the Bohr-Agler radius: the same quantity over the Schur-Agler
  class (functions contractive on every commuting strict matrix contraction);
* ``SA_d``  the Schur-Agler radius: largest r such that dilation by r maps
  every bounded function into the Schur-Agler class.

Lower bounds come from root equations of square-root binomial series
(:mod:`.series_kernel`); upper bounds from Fourier-matrix polynomials with
small Agler norm, from an explicit three-variable defect-operator ratio, and
from a Steiner-system / multilinear-constant argument whose explicit form is
minimized here.  ``assemble_report`` gathers everything applicable for one d
and enforces lower <= upper consistency per quantity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Tuple

from .series_kernel import (
    binom_sqrt_series,
    boas_khavinson_series,
    geometric_sqrt_series,
    solve_root,
)

QUANTITIES = ("K_d", "KA_d", "SA_d")
DIRECTIONS = ("lower", "upper")


class ConsistencyError(RuntimeError):
    """A lower bound exceeds an upper bound for the same quantity."""


@dataclass(frozen=True)
class BoundEntry:
    """One bound: quantity in {K_d, KA_d, SA_d}, direction lower/upper."""

    quantity: str
    direction: str
    value: float
    method: str
    anchor: str


@dataclass(frozen=True)
class MQUpperBound:
    """Best Fourier-matrix upper bound q^(1/(2m) - 1/2) with its (q, m)."""

    value: float
    q: int
    m: int


@dataclass(frozen=True)
class DixonUpperBound:
    """Minimized explicit Steiner/multilinear upper bound with its n (k = 2n+1)."""

    value: float
    n: int

    @property
    def k(self) -> int:
        return 2 * self.n + 1


@dataclass(frozen=True)
class BoundReport:
    """All bounds assembled for one dimension d, consistency-checked."""

    d: int
    entries: Tuple[BoundEntry, ...]

    def values(self, quantity: str, direction: str) -> List[float]:
        return [
            e.value
            for e in self.entries
            if e.quantity == quantity and e.direction == direction
        ]

    def best_lower(self, quantity: str) -> float:
        vals = self.values(quantity, "lower")
        return max(vals) if vals else math.nan

    def best_upper(self, quantity: str) -> float:
        vals = self.values(quantity, "upper")
        return min(vals) if vals else math.nan


def _root(series: Callable[[float], object], d: int, tol: float) -> float:
    """Root of series = 1/2 with an automatically expanded upper bracket.

    The series values at the initial hi already exceed 1/2 for every d used
    here (coefficients are >= 1, so series(0.98) >= 0.98/0.02 = 49); the
    expansion loop is a safety net only.
    """
    hi = min(0.98, 3.0 / math.sqrt(d))
    for _ in range(60):
        if series(hi).value > 0.5:
            break
        hi = 0.5 * (hi + 0.999)
    return solve_root(series, 0.5, (0.0, hi), tol=tol)


def ka_lower_root(d: int, tol: float = 1e-10) -> float:
    """Bohr-Agler radius lower bound: root of sum sqrt(C(d+k-2,k-1)) r^k = 1/2.

    Comes from transfer-function realizations: writing an Agler-class f
    through an isometric colligation bounds each homogeneous coefficient sum
    by (1-|f(0)|^2) sqrt(C(d+k-2,k-1)), and the root is where the dilated
    l1 norm is forced under 1.
    """
    if not (isinstance(d, int) and d >= 1):
        raise ValueError(f"d must be an integer >= 1, got {d!r}")
    if not (tol > 0):
        raise ValueError(f"tol must be positive, got {tol}")
    series_tol = min(tol / 4.0, 1e-12)
    return _root(lambda r: binom_sqrt_series(d, r, series_tol), d, tol)


def ka_lower_closed(d: int) -> float:
    """Closed-form Bohr-Agler lower bound 1/(sqrt(d) + 2).

    Obtained by replacing sqrt(C(d+k-2,k-1)) with its majorant d^((k-1)/2);
    the dominated series sums to r/(1 - r sqrt(d)) and its root against 1/2
    is exactly 1/(sqrt(d)+2), which is why ka_lower_root(d) is never smaller.
    """
    if not (isinstance(d, int) and d >= 1):
        raise ValueError(f"d must be an integer >= 1, got {d!r}")
    return 1.0 / (math.sqrt(d) + 2.0)


def kd_lower_bk(d: int, tol: float = 1e-10) -> float:
    """Bohr radius lower bound: root of the Boas-Khavinson equation.

    Solves r + sum_{k>=2} sqrt(C(d+k-1,k)) r^k = 1/2; valid for every bounded
    analytic function on the polydisk, hence a K_d lower bound (and a fortiori
    a lower bound for KA_d and SA_d).
    """
    if not (isinstance(d, int) and d >= 1):
        raise ValueError(f"d must be an integer >= 1, got {d!r}")
    if not (tol > 0):
        raise ValueError(f"tol must be positive, got {tol}")
    series_tol = min(tol / 4.0, 1e-12)
    return _root(lambda r: boas_khavinson_series(d, r, series_tol), d, tol)


def ka_lower_closed_root(d: int, tol: float = 1e-10) -> float:
    """Root of the dominating geometric series sum r^k d^((k-1)/2) = 1/2.

    Mathematically equal to ka_lower_closed(d); exposed so the closed form
    can be cross-checked through the generic solver.
    """
    if not (isinstance(d, int) and d >= 1):
        raise ValueError(f"d must be an integer >= 1, got {d!r}")
    series_tol = min(tol / 4.0, 1e-12)
    hi = 0.999 / math.sqrt(d)
    return solve_root(
        lambda r: geometric_sqrt_series(d, r, series_tol), 0.5, (0.0, hi), tol=tol
    )


def sa_lower(d: int) -> float:
    """Schur-Agler radius lower bound 1/sqrt(d-1) for d >= 2.

    Scaling a commuting contraction tuple by 1/sqrt(d-1) makes all the
    relevant defect operators positive semidefinite (any d-1 of the scaled
    operators have squares summing below the identity), which places every
    dilated Schur function in the Agler class.
    """
    if not (isinstance(d, int) and d >= 2):
        raise ValueError(f"sa_lower needs an integer d >= 2, got {d!r}")
    return 1.0 / math.sqrt(d - 1.0)


def sa3_upper_grinshpan() -> float:
    """Explicit three-variable Schur-Agler upper bound 1/sqrt(1.23) = 0.90167...

    There is a degree-2 polynomial in three variables whose Agler norm
    exceeds its sup norm by a factor of at least sqrt(1.23); dilating by any
    r > 1/sqrt(1.23) therefore pushes some Schur function out of the Agler
    class.
    """
    return 1.0 / math.sqrt(1.23)


def ka_upper_mq(d: int) -> MQUpperBound:
    """Best Fourier-matrix upper bound on KA_d over factorizations qm <= d.

    A homogeneous degree-m polynomial in qm variables built from q-point
    Fourier matrices has coefficient l1 norm q^m but Agler norm at most
    q^((m+1)/2), so KA_{qm} <= q^(1/(2m) - 1/2); monotonicity of KA in the
    dimension extends the bound from qm up to d.  All pairs (q >= 2, m >= 1)
    with qm <= d are admissible; for fixed m the bound improves with q, so
    only q = d // m needs scanning.
    """
    if not (isinstance(d, int) and d >= 2):
        raise ValueError(f"ka_upper_mq needs an integer d >= 2, got {d!r}")
    best: MQUpperBound | None = None
    for m in range(1, d + 1):
        q = d // m
        if q < 2:
            break
        value = float(q) ** (1.0 / (2.0 * m) - 0.5)
        if best is None or value < best.value:
            best = MQUpperBound(value, q, m)
    assert best is not None
    return best


def sa_upper_dixon(d: int, kappa_free: bool = True) -> DixonUpperBound:
    """Minimized explicit Schur-Agler upper bound from odd-degree monomials.

    For k = 2n+1 and d >= 2k there are polynomials (supported on a partial
    Steiner system) whose Agler-to-sup norm ratio is at least
    R = (2^(-k/2)/8) d^(n/2) / (k^((n+1)/2) sqrt(log k)); any dilation
    radius r with r^(-k) < R fails, giving

        SA_d <= r*(n, d) = sqrt(2) 8^(1/k) (log k)^(1/(2k)) k^((n+1)/(2k)) / d^(n/(2k)),

    which is R^(-1/k).  This function minimizes r* over n >= 1 with
    2(2n+1) <= d.  The normalization absorbs the multilinear-constant
    prefactor; only the kappa-normalized form is explicit, so
    ``kappa_free=False`` is rejected.
    """
    if not (isinstance(d, int) and d >= 2):
        raise ValueError(f"sa_upper_dixon needs an integer d >= 2, got {d!r}")
    if not kappa_free:
        raise ValueError(
            "only the kappa-normalized explicit bound is available; "
            "the free-constant variant has no closed numeric form"
        )
    if d < 6:
        raise ValueError(f"no admissible n: need d >= 6 (2(2n+1) <= d), got d={d}")
    best: DixonUpperBound | None = None
    n = 0
    while True:
        n += 1
        k = 2 * n + 1
        if 2 * k > d:
            break
        value = (
            math.sqrt(2.0)
            * 8.0 ** (1.0 / k)
            * math.log(k) ** (1.0 / (2.0 * k))
            * float(k) ** ((n + 1.0) / (2.0 * k))
            / float(d) ** (n / (2.0 * k))
        )
        if best is None or value < best.value:
            best = DixonUpperBound(value, n)
    assert best is not None
    return best


def _check_consistency(d: int, entries: List[BoundEntry], tol: float) -> None:
    for quantity in QUANTITIES:
        lowers = [e for e in entries if e.quantity == quantity and e.direction == "lower"]
        uppers = [e for e in entries if e.quantity == quantity and e.direction == "upper"]
        for lo in lowers:
            for up in uppers:
                if lo.value > up.value + tol:
                    raise ConsistencyError(
                        f"d={d} {quantity}: lower {lo.method}={lo.value} exceeds "
                        f"upper {up.method}={up.value} beyond tol {tol}"
                    )


def assemble_report(d: int, tol: float = 1e-8) -> BoundReport:
    """Gather every applicable bound for dimension d into one checked report.

    Lower bounds: the Boas-Khavinson root for all three quantities (the Bohr
    radius bounds the other two from below), the transfer-realization root
    and its closed form for KA_d, the exact one-variable/two-variable values
    for SA, and 1/sqrt(d-1) for SA_d at d >= 3.  Upper bounds: 1/3 for K_d
    (restriction to one variable; exact at d=1), the Fourier-matrix bound for
    KA_d at d >= 2 (1/3 exactly at d=1), 1 for SA_d by definition, the
    three-variable defect bound at d=3, and the minimized explicit
    Steiner/multilinear bound once it dips below 1.  Raises ConsistencyError
    if any lower exceeds any upper for the same quantity.
    """
    if not (isinstance(d, int) and d >= 1):
        raise ValueError(f"d must be an integer >= 1, got {d!r}")
    if not (tol > 0):
        raise ValueError(f"tol must be positive, got {tol}")
    entries: List[BoundEntry] = []
    add = entries.append

    bk = kd_lower_bk(d, tol=min(tol, 1e-9))
    root = ka_lower_root(d, tol=min(tol, 1e-9))
    closed = ka_lower_closed(d)

    # K_d
    add(BoundEntry("K_d", "lower", bk, "bk_root", "Boas-Khavinson root equation"))
    if d == 1:
        add(BoundEntry("K_d", "upper", 1.0 / 3.0, "exact_one_variable", "classical one-variable Bohr radius"))
    else:
        add(BoundEntry("K_d", "upper", 1.0 / 3.0, "one_variable_restriction", "restriction to a single coordinate"))

    # KA_d
    add(BoundEntry("KA_d", "lower", root, "transfer_root", "transfer-realization series root"))
    add(BoundEntry("KA_d", "lower", closed, "closed_form", "dominated geometric series root 1/(sqrt(d)+2)"))
    add(BoundEntry("KA_d", "lower", bk, "bk_root", "Bohr radius bounds the Agler-class radius from below"))
    if d == 1:
        add(BoundEntry("KA_d", "upper", 1.0 / 3.0, "exact_one_variable", "one-variable Schur class equals Agler class"))
    else:
        mq = ka_upper_mq(d)
        add(
            BoundEntry(
                "KA_d",
                "upper",
                mq.value,
                f"mq(q={mq.q},m={mq.m})",
                "Fourier-matrix polynomial Agler norm bound",
            )
        )

    # SA_d
    add(BoundEntry("SA_d", "lower", bk, "bk_root", "Bohr radius bounds the Schur-Agler radius from below"))
    if d <= 2:
        add(BoundEntry("SA_d", "lower", 1.0, "ando_von_neumann", "one and two variable dilation theorems"))
    else:
        add(BoundEntry("SA_d", "lower", sa_lower(d), "defect_scaling", "scaling by 1/sqrt(d-1) restores defect positivity"))
    add(BoundEntry("SA_d", "upper", 1.0, "definition", "dilation radius never exceeds 1"))
    if d == 3:
        add(BoundEntry("SA_d", "upper", sa3_upper_grinshpan(), "defect_ratio", "three-variable Agler-to-sup ratio sqrt(1.23)"))
    if d >= 6:
        dx = sa_upper_dixon(d)
        if dx.value <= 1.0:
            add(
                BoundEntry(
                    "SA_d",
                    "upper",
                    dx.value,
                    f"dixon(n={dx.n})",
                    "odd-degree monomials on a partial Steiner system",
                )
            )

    _check_consistency(d, entries, max(tol, 1e-9))
    return BoundReport(d, tuple(entries))


# -- serialization --------------------------------------------------------


def report_to_json_obj(report: BoundReport) -> dict:
    return {
        "d": report.d,
        "entries": [
            {
                "quantity": e.quantity,
                "direction": e.direction,
                "value": e.value,
                "method": e.method,
                "anchor": e.anchor,
            }
            for e in report.entries
        ],
    }


def report_from_json_obj(obj: dict) -> BoundReport:
    if not isinstance(obj, dict) or "d" not in obj or "entries" not in obj:
        raise ValueError('report JSON needs "d" and "entries"')
    entries = []
    for e in obj["entries"]:
        quantity = e["quantity"]
        direction = e["direction"]
        if quantity not in QUANTITIES:
            raise ValueError(f"unknown quantity {quantity!r}")
        if direction not in DIRECTIONS:
            raise ValueError(f"unknown direction {direction!r}")
        entries.append(
            BoundEntry(quantity, direction, float(e["value"]), str(e["method"]), str(e["anchor"]))
        )
    return BoundReport(int(obj["d"]), tuple(entries))


def report_rows(report: BoundReport) -> List[Tuple]:
    """Flatten to (d, quantity, direction, value, method, anchor) rows."""
    return [
        (report.d, e.quantity, e.direction, e.value, e.method, e.anchor)
        for e in report.entries
    ]
