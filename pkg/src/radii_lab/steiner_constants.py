"""Partial Steiner systems, their counting bounds, and the constant pipeline
for the k-homogeneous Agler-to-sup ratio C_k(d).

A partial Steiner system S_p(t, k, d) is a family of k-subsets of a
d-element ground set in which every t-subset lies in at most one member;
equivalently, distinct members intersect in at most t-1 points.  Exact
rational bounds on the maximal size N(t, k, d):

    upper:        C(d,t) / C(k,t)          (count t-subsets with multiplicity)
    dixon_lower:  C(d,k) / (C(d,k-t) C(k,t))   (greedy elimination count)
    crude_lower:  2^{-k} (d/k)^t           (valid once d >= 2k)

``greedy_steiner`` realizes the elimination argument constructively: in
exhaustive mode every maximal greedy run produces at least
ceil(dixon_lower) blocks regardless of candidate order, because each
accepted block rules out at most C(k,t) C(d-t, k-t) candidates.

The constants: Pol_m bounds the polarization ratio of m-homogeneous
polynomials, B_m <= kappa m^{(1-gamma)/2} (gamma Euler-Mascheroni, kappa an
unnamed normalization fixed to 1 here) bounds the sup norm of the full
multilinear extension, and the combination

    C_k(d) <= G_C B_{k-1} d^{(k-2)/2} Pol_k

uses the complex Grothendieck constant G_C in [1.33807, 1.40491].  Finally
``dixon_ratio_bound`` is the probabilistic ratio lower bound
(2^{-k/2}/8) d^{n/2} / (k^{(n+1)/2} sqrt(log k)) with k = 2n+1, whose
reciprocal k-th root is exactly the radius threshold used by the
Schur-Agler upper bounds.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

EXHAUSTIVE_CAP = 100_000
_SAMPLE_MAX_TRIALS = 20_000
_SAMPLE_MAX_MISSES = 500
_REGISTRY_THRESHOLD = 1_000


class BudgetError(RuntimeError):
    """Requested enumeration exceeds the configured candidate budget."""


def _check_order(t: int, k: int, d: int) -> None:
    if not (1 <= t <= k <= d):
        raise ValueError(f"need 1 <= t <= k <= d, got t={t}, k={k}, d={d}")


# -- counting bounds -------------------------------------------------------


@dataclass(frozen=True)
class SteinerBounds:
    """Exact rational bounds on N(t,k,d); crude_lower only when d >= 2k."""

    t: int
    k: int
    d: int
    upper: Fraction
    dixon_lower: Fraction
    crude_lower: Optional[float]


def steiner_bounds(t: int, k: int, d: int) -> SteinerBounds:
    """Upper and lower counts for maximal partial Steiner systems."""
    _check_order(t, k, d)
    upper = Fraction(math.comb(d, t), math.comb(k, t))
    dixon = Fraction(math.comb(d, k), math.comb(d, k - t) * math.comb(k, t))
    crude = None
    if d >= 2 * k:
        crude = float(Fraction(d, k) ** t / 2**k)
    return SteinerBounds(t=t, k=k, d=d, upper=upper, dixon_lower=dixon, crude_lower=crude)


# -- systems and the greedy construction -----------------------------------


def _validate_blocks(t: int, k: int, d: int, blocks: Sequence[Tuple[int, ...]]) -> None:
    seen = set()
    for b in blocks:
        if len(b) != k or len(set(b)) != k:
            raise ValueError(f"block {b} is not a {k}-subset")
        if any(not (0 <= x < d) for x in b):
            raise ValueError(f"block {b} leaves the ground set 0..{d - 1}")
        key = tuple(sorted(b))
        if key in seen:
            raise ValueError(f"duplicate block {key}")
        seen.add(key)
    # t-subset condition: either register all t-subsets or compare pairwise
    if math.comb(k, t) <= _REGISTRY_THRESHOLD:
        used = set()
        for b in blocks:
            for sub in itertools.combinations(sorted(b), t):
                if sub in used:
                    raise ValueError(f"t-subset {sub} lies in two blocks")
                used.add(sub)
    else:
        masks = [sum(1 << x for x in b) for b in blocks]
        for i in range(len(masks)):
            for j in range(i + 1, len(masks)):
                if (masks[i] & masks[j]).bit_count() >= t:
                    raise ValueError(
                        f"blocks {blocks[i]} and {blocks[j]} share a {t}-subset"
                    )


class PartialSteiner:
    """Validated partial Steiner system on the ground set {0..d-1}."""

    __slots__ = ("t", "k", "d", "blocks")

    def __init__(self, t: int, k: int, d: int, blocks: Sequence[Sequence[int]]):
        _check_order(t, k, d)
        clean = tuple(tuple(sorted(int(x) for x in b)) for b in blocks)
        _validate_blocks(t, k, d, clean)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "blocks", clean)

    def __setattr__(self, name, value):
        raise AttributeError("PartialSteiner is immutable")

    def __len__(self) -> int:
        return len(self.blocks)

    def __repr__(self) -> str:
        return f"PartialSteiner(t={self.t}, k={self.k}, d={self.d}, blocks={len(self.blocks)})"


class _ConflictTracker:
    """Accept/reject incoming k-subsets against the t-subset condition."""

    def __init__(self, t: int, k: int):
        self.t = t
        self.use_registry = math.comb(k, t) <= _REGISTRY_THRESHOLD
        self.registry = set()
        self.masks: List[int] = []

    def compatible(self, block: Tuple[int, ...], mask: int) -> bool:
        if self.use_registry:
            return all(
                sub not in self.registry
                for sub in itertools.combinations(block, self.t)
            )
        return all((mask & m).bit_count() < self.t for m in self.masks)

    def accept(self, block: Tuple[int, ...], mask: int) -> None:
        if self.use_registry:
            self.registry.update(itertools.combinations(block, self.t))
        self.masks.append(mask)


def greedy_steiner(
    t: int, k: int, d: int, seed: int, strategy: str = "auto"
) -> PartialSteiner:
    """Greedy partial Steiner construction in a seeded candidate order.

    strategy "exhaustive" shuffles all C(d,k) candidates (budget
    EXHAUSTIVE_CAP) and accepts greedily; any maximal run yields at least
    ceil of the dixon_lower count.  strategy "sample" draws random
    candidates with rejection and carries no count guarantee.  "auto"
    picks exhaustive whenever the candidate count fits the budget.
    """
    _check_order(t, k, d)
    if strategy not in ("auto", "exhaustive", "sample"):
        raise ValueError(f"unknown strategy {strategy!r}")
    total = math.comb(d, k)
    if strategy == "auto":
        strategy = "exhaustive" if total <= EXHAUSTIVE_CAP else "sample"
    if strategy == "exhaustive" and total > EXHAUSTIVE_CAP:
        raise BudgetError(
            f"C({d},{k}) = {total} candidates exceed the exhaustive budget {EXHAUSTIVE_CAP}"
        )

    rng = np.random.default_rng(seed)
    tracker = _ConflictTracker(t, k)
    accepted: List[Tuple[int, ...]] = []

    if strategy == "exhaustive":
        candidates = list(itertools.combinations(range(d), k))
        order = rng.permutation(total)
        for idx in order:
            block = candidates[idx]
            mask = sum(1 << x for x in block)
            if tracker.compatible(block, mask):
                tracker.accept(block, mask)
                accepted.append(block)
    else:
        misses = 0
        for _ in range(_SAMPLE_MAX_TRIALS):
            if misses >= _SAMPLE_MAX_MISSES:
                break
            block = tuple(sorted(rng.choice(d, size=k, replace=False).tolist()))
            mask = sum(1 << x for x in block)
            if tracker.compatible(block, mask):
                tracker.accept(block, mask)
                accepted.append(block)
                misses = 0
            else:
                misses += 1

    return PartialSteiner(t, k, d, accepted)


# -- the constant pipeline -------------------------------------------------


@dataclass(frozen=True)
class DixonConstants:
    """Named constants of the ratio pipeline.

    kappa is the unnamed normalization of the B_m bound; it defaults to 1
    and every kappa-dependent output is labeled normalized unless a caller
    supplies a different value.
    """

    G_lo: float = 1.33807
    G_hi: float = 1.40491
    gamma: float = 0.5772156649
    kappa: float = 1.0

    def __post_init__(self):
        if not (self.G_lo <= self.G_hi):
            raise ValueError(f"need G_lo <= G_hi, got [{self.G_lo}, {self.G_hi}]")
        if not (self.kappa > 0):
            raise ValueError(f"need kappa > 0, got {self.kappa}")

    @property
    def bm_exponent(self) -> float:
        """(1 - gamma)/2, the growth exponent of the B_m bound."""
        return (1.0 - self.gamma) / 2.0


def pol_bound(m: int) -> float:
    """Polarization bound m^{m/2} (m+1)^{(m+1)/2} / (2^m m!), in log space."""
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    logv = (
        0.5 * m * math.log(m)
        + 0.5 * (m + 1) * math.log(m + 1)
        - m * math.log(2.0)
        - math.lgamma(m + 1)
    )
    return math.exp(logv)


def bm_bound(m: int, kappa: float = 1.0, gamma: float = 0.5772156649) -> float:
    """kappa * m^{(1-gamma)/2}, the multilinear sup-norm growth bound.

    At m = 1 this returns kappa: linear forms satisfy B_1 = 1 because the
    l1 norm of the coefficients is attained on the torus (choose each
    coordinate to align the phases), which anchors the pipeline base when
    kappa is left at its normalized default.
    """
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    if not (kappa > 0):
        raise ValueError(f"need kappa > 0, got {kappa}")
    return kappa * float(m) ** ((1.0 - gamma) / 2.0)


@dataclass(frozen=True)
class CkBound:
    """Side-by-side upper bounds for the degree-k ratio constant."""

    k: int
    d: int
    corollary: float
    crude: Optional[float]
    b_value: float
    kappa: float
    kappa_normalized: bool


def ck_upper(
    k: int,
    d: int,
    consts: Optional[DixonConstants] = None,
    b_value: Optional[float] = None,
    crude_c: Optional[float] = None,
) -> CkBound:
    """C_k(d) <= G_hi * B_{k-1} * d^{(k-2)/2} * Pol_k, plus the crude form.

    B_{k-1} comes from bm_bound with the configured kappa unless supplied
    explicitly (use b_value=1.0 at k=2 for the duality-forced base).  When
    ``crude_c`` is given, the alternative c k (e/2)^k d^{(k-2)/2} bound is
    reported alongside; it is never computed with an uncalibrated constant.
    """
    if k < 2 or d < 2:
        raise ValueError(f"need k >= 2 and d >= 2, got k={k}, d={d}")
    if consts is None:
        consts = DixonConstants()
    bval = bm_bound(k - 1, consts.kappa, consts.gamma) if b_value is None else float(b_value)
    growth = float(d) ** ((k - 2) / 2.0)
    corollary = consts.G_hi * bval * growth * pol_bound(k)
    crude = None
    if crude_c is not None:
        crude = float(crude_c) * k * (math.e / 2.0) ** k * growth
    return CkBound(
        k=k,
        d=d,
        corollary=corollary,
        crude=crude,
        b_value=bval,
        kappa=consts.kappa,
        kappa_normalized=(b_value is None and consts.kappa == 1.0),
    )


def dixon_ratio_bound(n: int, d: int) -> float:
    """(2^{-k/2}/8) d^{n/2} / (k^{(n+1)/2} sqrt(log k)) with k = 2n+1.

    Lower bound on the Agler-to-sup ratio achievable by k-homogeneous
    polynomials supported on a partial Steiner system; requires d >= 2k so
    the crude Steiner count applies.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    k = 2 * n + 1
    if d < 2 * k:
        raise ValueError(f"need d >= 2k = {2 * k}, got d={d}")
    # log space: the intermediate powers overflow long before the value does
    logv = (
        -k / 2.0 * math.log(2.0)
        - math.log(8.0)
        + n / 2.0 * math.log(d)
        - (n + 1) / 2.0 * math.log(k)
        - 0.5 * math.log(math.log(k))
    )
    return math.exp(logv)
