"""Commuting contraction tuples: polynomial evaluation, defect operators,
positivity experiments, and randomized Agler-ratio searches.

The objects here are d-tuples T = (T_1, ..., T_d) of commuting N x N
contractions.  ``eval_poly`` computes f(T) for sparse polynomials;
``defect`` forms the alternating sums

    Delta_T^alpha = sum_{0 <= beta <= alpha} (-1)^|beta| T^beta (T^beta)*

whose positivity controls membership of dilated functions in the Schur-Agler
class; ``check_positivity_lemma`` tests the sufficient condition
``sum_{j in S} T_j T_j* <= I  =>  Delta_T^{1_S} >= 0`` (with the complement
reading available as well, see the keyword); and ``agler_ratio_search`` hunts
for tuples pushing ``norm(f(T)) / sup|f|`` above 1.

Two random families are provided: simultaneously diagonalizable tuples
(a common unitary conjugating random diagonal contractions, commuting exactly
up to roundoff) and nilpotent coordinate-multiplication shifts on a
total-degree-truncated polynomial space (commuting exactly, the classic
source of ratio > 1 witnesses in three or more variables).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .poly_core import Alpha, SparsePoly, l1_norm, sup_norm_torus

_FULL_LATTICE_CAP = 2**16
_STRICT_MARGIN = 1e-6  # default pullback from the unit sphere of norms


def _as_rng(seed_or_rng: Union[int, np.random.Generator]) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def spectral_norm(mat: np.ndarray) -> float:
    return float(np.linalg.norm(mat, 2))


def hermitian_min_eig(mat: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian part (symmetrized for roundoff)."""
    herm = 0.5 * (mat + mat.conj().T)
    return float(np.linalg.eigvalsh(herm)[0])


class OperatorTuple:
    """A validated tuple of d commuting N x N complex contractions.

    Validation happens at construction: every pairwise commutator norm must
    stay under ``tol_commute`` and every operator norm under
    ``1 + tol_norm``; violations raise ValueError naming the offending pair
    or index.  Matrices are copied and marked read-only, so instances are
    immutable and safe to share across threads.
    """

    __slots__ = ("mats", "d", "dim", "tol_commute", "tol_norm", "norms", "max_commutator")

    def __init__(
        self,
        mats: Sequence[np.ndarray],
        tol_commute: float = 1e-10,
        tol_norm: float = 1e-10,
    ):
        if len(mats) < 1:
            raise ValueError("need at least one matrix")
        clean: List[np.ndarray] = []
        n = None
        for i, m in enumerate(mats):
            a = np.array(m, dtype=complex)
            if a.ndim != 2 or a.shape[0] != a.shape[1]:
                raise ValueError(f"matrix {i} is not square: shape {a.shape}")
            if n is None:
                n = a.shape[0]
            elif a.shape[0] != n:
                raise ValueError(f"matrix {i} has size {a.shape[0]}, expected {n}")
            a.setflags(write=False)
            clean.append(a)

        norms = tuple(spectral_norm(a) for a in clean)
        for i, nm in enumerate(norms):
            if nm > 1.0 + tol_norm:
                raise ValueError(f"matrix {i} has norm {nm} > 1 + {tol_norm}")
        max_comm = 0.0
        for i in range(len(clean)):
            for j in range(i + 1, len(clean)):
                comm = spectral_norm(clean[i] @ clean[j] - clean[j] @ clean[i])
                scale = max(1.0, norms[i] * norms[j])
                if comm > tol_commute * scale:
                    raise ValueError(
                        f"matrices {i} and {j} do not commute: "
                        f"commutator norm {comm} > {tol_commute * scale}"
                    )
                max_comm = max(max_comm, comm)

        object.__setattr__(self, "mats", tuple(clean))
        object.__setattr__(self, "d", len(clean))
        object.__setattr__(self, "dim", int(n))
        object.__setattr__(self, "tol_commute", float(tol_commute))
        object.__setattr__(self, "tol_norm", float(tol_norm))
        object.__setattr__(self, "norms", norms)
        object.__setattr__(self, "max_commutator", max_comm)

    def __setattr__(self, name, value):
        raise AttributeError("OperatorTuple is immutable")

    def __repr__(self) -> str:
        return f"OperatorTuple(d={self.d}, dim={self.dim}, max_norm={max(self.norms):.6f})"

    def require(self, norm_cap: float, commute_tol: float) -> None:
        """Re-validate against caller-specific tolerances."""
        for i, nm in enumerate(self.norms):
            if nm > norm_cap:
                raise ValueError(f"matrix {i} has norm {nm} > {norm_cap}")
        if self.max_commutator > commute_tol:
            raise ValueError(
                f"worst commutator norm {self.max_commutator} exceeds {commute_tol}"
            )

    def scaled(self, c: float) -> "OperatorTuple":
        """The tuple (c T_1, ..., c T_d) for 0 <= c <= 1."""
        if not (0.0 <= c <= 1.0):
            raise ValueError(f"scale must lie in [0, 1], got {c}")
        return OperatorTuple(
            [c * m for m in self.mats], self.tol_commute, self.tol_norm
        )


# -- polynomial evaluation -------------------------------------------------


def _power(mat: np.ndarray, e: int, cache: Dict[int, np.ndarray]) -> np.ndarray:
    """mat**e by repeated squaring with a per-variable exponent cache."""
    if e in cache:
        return cache[e]
    if e % 2 == 0:
        half = _power(mat, e // 2, cache)
        out = half @ half
    else:
        out = mat @ _power(mat, e - 1, cache)
    cache[e] = out
    return out


def eval_poly(f: SparsePoly, T: OperatorTuple) -> np.ndarray:
    """f(T) = sum f_alpha T^alpha in the canonical factor order T_1^a1 ... T_d^ad.

    Commutation makes the factor order immaterial up to ``tol_commute``;
    powers are repeated-squared and cached per variable.
    """
    if f.dim != T.d:
        raise ValueError(f"polynomial has {f.dim} variables, tuple has {T.d}")
    n = T.dim
    eye = np.eye(n, dtype=complex)
    caches: List[Dict[int, np.ndarray]] = [{0: eye, 1: T.mats[j]} for j in range(T.d)]
    out = np.zeros((n, n), dtype=complex)
    for alpha, c in f.coeffs.items():
        term: Optional[np.ndarray] = None
        for j, e in enumerate(alpha):
            if e == 0:
                continue
            p = _power(T.mats[j], e, caches[j])
            term = p if term is None else term @ p
        out += c * (eye if term is None else term)
    return out


# -- defect operators ------------------------------------------------------


def defect(T: OperatorTuple, alpha: Sequence[int], full_lattice: bool = False) -> np.ndarray:
    """Alternating defect sum over the sublattice 0 <= beta <= alpha.

    By default alpha must be a 0/1 multi-index (the only shape the bound
    arguments need); pass ``full_lattice=True`` to allow larger entries, with
    the product of (alpha_j + 1) capped at 2^16 terms.  The result is
    symmetrized, hence exactly Hermitian.
    """
    key = tuple(int(a) for a in alpha)
    if len(key) != T.d:
        raise ValueError(f"multi-index length {len(key)} != tuple size {T.d}")
    if any(a < 0 for a in key):
        raise ValueError(f"multi-index must be nonnegative, got {key}")
    lattice_size = 1
    for a in key:
        lattice_size *= a + 1
    if not full_lattice and any(a > 1 for a in key):
        raise ValueError(
            f"multi-index {key} has entries > 1; pass full_lattice=True to allow"
        )
    if lattice_size > _FULL_LATTICE_CAP:
        raise ValueError(f"lattice has {lattice_size} terms, cap is {_FULL_LATTICE_CAP}")

    n = T.dim
    out = np.zeros((n, n), dtype=complex)
    caches: List[Dict[int, np.ndarray]] = [
        {0: np.eye(n, dtype=complex), 1: T.mats[j]} for j in range(T.d)
    ]
    for beta in itertools.product(*(range(a + 1) for a in key)):
        tb: Optional[np.ndarray] = None
        for j, e in enumerate(beta):
            if e == 0:
                continue
            p = _power(T.mats[j], e, caches[j])
            tb = p if tb is None else tb @ p
        if tb is None:
            term = np.eye(n, dtype=complex)
        else:
            term = tb @ tb.conj().T
        if sum(beta) % 2:
            out -= term
        else:
            out += term
    return 0.5 * (out + out.conj().T)


@dataclass(frozen=True)
class PositivityCheck:
    """Outcome of the defect-positivity test for one index set S."""

    holds_hypothesis: bool
    holds_conclusion: bool
    min_eig: float
    hypothesis_min_eig: float


def check_positivity_lemma(
    T: OperatorTuple,
    S: Iterable[int],
    tol: float = 1e-8,
    complement_reading: bool = False,
) -> PositivityCheck:
    """Test ``sum_{j in S} T_j T_j* <= I  =>  Delta_T^{1_S} >= 0``.

    ``S`` contains 0-based indices into the tuple.  ``min_eig`` is the
    smallest eigenvalue of the defect at the indicator index of S, and the
    conclusion holds when it is >= -tol.  The hypothesis is evaluated over
    j in S by default; ``complement_reading=True`` sums over j not in S
    instead (a printed variant of the condition, kept for comparison: it is
    not what the inductive proof uses).
    """
    Ss = sorted(set(int(j) for j in S))
    if not Ss:
        raise ValueError("S must be a nonempty set of indices")
    if Ss[0] < 0 or Ss[-1] >= T.d:
        raise ValueError(f"S={Ss} out of range for a {T.d}-tuple")
    if not (tol >= 0):
        raise ValueError(f"tol must be >= 0, got {tol}")

    n = T.dim
    hyp_set = [j for j in range(T.d) if j not in Ss] if complement_reading else Ss
    H = np.eye(n, dtype=complex)
    for j in hyp_set:
        H -= T.mats[j] @ T.mats[j].conj().T
    hyp_min = hermitian_min_eig(H)

    alpha = tuple(1 if j in Ss else 0 for j in range(T.d))
    dmin = hermitian_min_eig(defect(T, alpha))
    return PositivityCheck(
        holds_hypothesis=hyp_min >= -tol,
        holds_conclusion=dmin >= -tol,
        min_eig=dmin,
        hypothesis_min_eig=hyp_min,
    )


# -- random families -------------------------------------------------------


def haar_unitary(rng: Union[int, np.random.Generator], n: int) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian with phase fix."""
    rng = _as_rng(rng)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    ph = np.diag(r).copy()
    ph /= np.abs(ph)
    return q * ph


def random_commuting_tuple(
    rng: Union[int, np.random.Generator],
    d: int,
    dim: int,
    allow_boundary: bool = False,
) -> OperatorTuple:
    """Simultaneously diagonalizable random tuple U diag(lambda_j) U*.

    Joint eigenvalues are uniform in the unit disk, then pulled to norm at
    most 1 - 1e-6 (strict contractivity, mirroring the class definition);
    with ``allow_boundary`` each matrix keeps unit-modulus eigenvalues with
    probability 0.3 instead.  Commutation is exact up to conjugation
    roundoff.
    """
    rng = _as_rng(rng)
    if d < 1 or dim < 1:
        raise ValueError(f"need d >= 1 and dim >= 1, got d={d}, dim={dim}")
    U = haar_unitary(rng, dim)
    lams = _random_joint_eigs(rng, d, dim, allow_boundary)
    return _conjugated_tuple(U, lams)


def _random_joint_eigs(
    rng: np.random.Generator, d: int, dim: int, allow_boundary: bool = False
) -> np.ndarray:
    """Joint eigenvalue draws shared by the tuple sampler and the search.

    Returns shape (d, dim): row j holds the eigenvalues of the j-th
    operator on the common eigenbasis.
    """
    cap = 1.0 if allow_boundary else 1.0 - _STRICT_MARGIN
    rows = []
    for _ in range(d):
        radii = np.sqrt(rng.uniform(0.0, 1.0, dim))
        if allow_boundary and rng.uniform() < 0.3:
            radii = np.ones(dim)
        if rng.uniform() < 0.5:
            # push this matrix close to the norm cap for sharper tests
            radii = radii / max(radii.max(), 1e-12)
        rows.append(cap * radii * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, dim)))
    return np.array(rows)


def _conjugated_tuple(U: np.ndarray, lams: np.ndarray) -> OperatorTuple:
    mats = [(U * lam[None, :]) @ U.conj().T for lam in lams]
    return OperatorTuple(mats, tol_commute=1e-10, tol_norm=1e-10)


def _graded_basis(d: int, g: int) -> List[Alpha]:
    basis: List[Alpha] = []
    for total in range(g + 1):
        level = [
            beta
            for beta in itertools.product(range(total + 1), repeat=d)
            if sum(beta) == total
        ]
        basis.extend(sorted(level))
    return basis


def shift_tuple(d: int, degree_cap: int, scale: float = 1.0 - _STRICT_MARGIN) -> OperatorTuple:
    """Coordinate multiplication operators on polynomials of degree <= degree_cap.

    The basis is all monomials z^beta with |beta| <= degree_cap; M_j sends
    z^beta to scale * z^(beta+e_j), truncating to zero at the top degree.
    The M_j commute exactly, are jointly nilpotent, and are scaled partial
    isometries of norm ``scale``.
    """
    if d < 1 or degree_cap < 1:
        raise ValueError(f"need d >= 1 and degree_cap >= 1, got {d}, {degree_cap}")
    if not (0.0 < scale <= 1.0):
        raise ValueError(f"scale must lie in (0, 1], got {scale}")
    basis = _graded_basis(d, degree_cap)
    index = {beta: i for i, beta in enumerate(basis)}
    n = len(basis)
    mats = []
    for j in range(d):
        m = np.zeros((n, n), dtype=complex)
        for beta, i in index.items():
            if sum(beta) < degree_cap:
                up = tuple(b + (1 if t == j else 0) for t, b in enumerate(beta))
                m[index[up], i] = scale
        mats.append(m)
    return OperatorTuple(mats, tol_commute=1e-12, tol_norm=1e-10)


# -- ratio search ----------------------------------------------------------


@dataclass
class RatioSearchResult:
    """Best found norm(f(T)) / denominator with the witness tuple."""

    ratio: float
    witness: Optional[OperatorTuple]
    evaluations: int
    budget_exhausted: bool
    denominator: float
    certified: bool


_SUP_GRIDS = {1: 256, 2: 64, 3: 24, 4: 16, 5: 12, 6: 8}


def _search_denominator(f: SparsePoly, certified: bool) -> Tuple[float, bool]:
    if certified or f.dim not in _SUP_GRIDS:
        # l1 dominates the sup norm, so dividing by it certifies the ratio
        return l1_norm(f), True
    grid = _SUP_GRIDS[f.dim]
    return sup_norm_torus(f, grid_per_dim=grid, refine_steps=4), False


def agler_ratio_search(
    f: SparsePoly,
    budget: int,
    seed: int,
    dims: Sequence[int],
    certified: bool = False,
) -> RatioSearchResult:
    """Randomized lower-bound search for the Agler-to-sup norm ratio of f.

    Evaluates norm(f(T)) over the two generator families until ``budget``
    evaluations are spent: first the deterministic nilpotent shift tuples
    (degree caps increasing while the basis stays small), then random
    simultaneously diagonalizable tuples with matrix sizes drawn from
    ``dims``.  Diagonalizable candidates are scored directly on their joint
    eigenvalues (norm(f(T)) = max_j |f(lambda_j)| for a normal commuting
    tuple), and only the best one is conjugated into matrix form as the
    witness.  The denominator is a certified lower estimate of sup|f|
    (so the reported ratio may slightly overestimate the true normalized
    ratio); pass ``certified=True`` to divide by l1_norm(f) >= sup|f|
    instead, making the ratio a certified lower bound on the Agler ratio.
    In dimension > 6 the certified denominator is used automatically.
    """
    if f.dim > 8:
        raise ValueError(f"search supports at most 8 variables, got {f.dim}")
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    if not dims or any((not isinstance(x, (int, np.integer))) or x < 1 for x in dims):
        raise ValueError(f"dims must be a nonempty list of positive integers, got {dims}")
    if f.is_zero():
        raise ValueError("zero polynomial has no ratio")

    denom, is_certified = _search_denominator(f, certified)
    rng = _as_rng(seed)
    best_ratio = -math.inf
    best_T: Optional[OperatorTuple] = None
    best_eigs: Optional[np.ndarray] = None
    evals = 0

    def consider(T: OperatorTuple) -> None:
        nonlocal best_ratio, best_T, best_eigs, evals
        val = spectral_norm(eval_poly(f, T)) / denom
        evals += 1
        if val > best_ratio:
            best_ratio = val
            best_T = T
            best_eigs = None

    max_dim = max(dims)
    g = 0
    while evals < budget:
        g += 1
        if math.comb(f.dim + g, f.dim) > max(max_dim, 16) or g > max(4, f.degree() + 1):
            break
        consider(shift_tuple(f.dim, g))

    alphas = np.array(list(f.coeffs.keys()), dtype=np.int64).reshape(len(f.coeffs), f.dim)
    cvec = np.array(list(f.coeffs.values()))
    while evals < budget:
        n = int(dims[int(rng.integers(len(dims)))])
        lams = _random_joint_eigs(rng, f.dim, n)
        vals = cvec @ np.prod(lams[None, :, :] ** alphas[:, :, None], axis=1)
        val = float(np.max(np.abs(vals))) / denom
        evals += 1
        if val > best_ratio:
            best_ratio = val
            best_eigs = lams
            best_T = None

    if best_eigs is not None:
        # materialize the winning diagonalizable candidate with a
        # deterministically derived eigenbasis
        best_T = _conjugated_tuple(
            haar_unitary(np.random.default_rng([seed, best_eigs.shape[1]]), best_eigs.shape[1]),
            best_eigs,
        )

    return RatioSearchResult(
        ratio=best_ratio,
        witness=best_T,
        evaluations=evals,
        budget_exhausted=evals >= budget,
        denominator=denom,
        certified=is_certified,
    )


# -- interchange -----------------------------------------------------------


def tuple_to_json(T: OperatorTuple) -> dict:
    """{"d": d, "N": N, "mats": [matrix][row][entry] with entry = [re, im]}."""
    mats = [
        [[[float(z.real), float(z.imag)] for z in row] for row in m]
        for m in T.mats
    ]
    return {"d": T.d, "N": T.dim, "mats": mats}


def tuple_from_json(
    obj: dict, tol_commute: float = 1e-10, tol_norm: float = 1e-10
) -> OperatorTuple:
    if not isinstance(obj, dict) or any(k not in obj for k in ("d", "N", "mats")):
        raise ValueError('tuple JSON needs "d", "N", and "mats"')
    d, n = int(obj["d"]), int(obj["N"])
    raw = obj["mats"]
    if len(raw) != d:
        raise ValueError(f'"mats" has {len(raw)} matrices, expected d={d}')
    mats = []
    for m in raw:
        a = np.array(
            [[complex(entry[0], entry[1]) for entry in row] for row in m], dtype=complex
        )
        if a.shape != (n, n):
            raise ValueError(f"matrix shape {a.shape} != ({n}, {n})")
        mats.append(a)
    return OperatorTuple(mats, tol_commute=tol_commute, tol_norm=tol_norm)
