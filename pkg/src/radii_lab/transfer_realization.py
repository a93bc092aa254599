"""Isometric transfer-function realizations on the polydisk.

A colligation is a block isometry

    V = [[A, B],
         [C, D]]

on C (+) C^n together with a partition of {0..n-1} into d blocks, defining
projections P_1..P_d and the function

    f(z) = A + B P(z) (I - D P(z))^{-1} C,      P(z) = sum_j z_j P_j,

which lies in the Schur-Agler class of the polydisk: |f| <= 1 on the closed
polydisk and the power-series coefficient at a multi-index alpha of weight k
is the word sum  sum_{alpha(w) = alpha} B P_{w(1)} D P_{w(2)} ... D P_{w(k)} C.

``coefficient`` and ``sk_sum`` extract coefficients through a homogeneous
stage recursion (cost polynomial in n and the number of multi-indices, never
enumerating the d^k words).  ``verify_lemma`` checks the coefficient-sum
bound

    S_k = sum_{|alpha| = k} |f_alpha| <= (1 - |f_0|^2) C(d+k-2, k-1)^{1/2}

level by level, together with the l1 chain it implies at the radius
candidate from the series solver.  ``quadrature_cs_check`` replays the
Cauchy-Schwarz step behind the bound as an exactly quadratured integral over
the d-torus, using roots-of-unity tensor grids sized past the trigonometric
degree of the integrand.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np

from .poly_core import Alpha
from .radii_bounds import ka_lower_root
from .series_kernel import binom_sqrt_series

_cached_root = functools.lru_cache(maxsize=None)(ka_lower_root)

KMAX_CAP = 8
_LEVEL_COUNT_CAP = 120_000
_QUAD_POINT_CAP = 1 << 20
_SAMPLED_D_CAP = 6
_SAMPLED_N_CAP = 48


def multi_indices(d: int, k: int) -> Iterator[Alpha]:
    """All alpha >= 0 in d variables with |alpha| = k, lexicographic."""
    if d == 1:
        yield (k,)
        return
    for first in range(k, -1, -1):
        for rest in multi_indices(d - 1, k - first):
            yield (first,) + rest


def word_to_alpha(letters: Sequence[int], d: int) -> Alpha:
    """Letter counts of a word over the alphabet {0..d-1}."""
    alpha = [0] * d
    for w in letters:
        if not (0 <= w < d):
            raise ValueError(f"letter {w} outside 0..{d - 1}")
        alpha[w] += 1
    return tuple(alpha)


class Colligation:
    """Validated isometric colligation with a block partition.

    ``block_dims`` lists the d internal block sizes (zero allowed); block j
    occupies the consecutive index range starting at sum(block_dims[:j]).
    Construction verifies V* V = I to 1e-10 and the derived coefficient
    inequality |B| |C| <= 1 - |A|^2 + 1e-10.
    """

    __slots__ = ("d", "A", "B", "C", "D", "block_dims", "n", "blkmap", "masks")

    def __init__(
        self,
        d: int,
        A: complex,
        B: np.ndarray,
        C: np.ndarray,
        D: np.ndarray,
        block_dims: Sequence[int],
    ):
        if d < 1:
            raise ValueError(f"need d >= 1, got {d}")
        dims = [int(x) for x in block_dims]
        if len(dims) != d or any(x < 0 for x in dims):
            raise ValueError(f"block_dims must be {d} nonnegative integers, got {dims}")
        n = sum(dims)
        if n < 1:
            raise ValueError("total internal dimension must be >= 1")
        B = np.array(B, dtype=complex).reshape(n)
        C = np.array(C, dtype=complex).reshape(n)
        D = np.array(D, dtype=complex)
        if D.shape != (n, n):
            raise ValueError(f"D has shape {D.shape}, expected ({n}, {n})")

        V = np.zeros((1 + n, 1 + n), dtype=complex)
        V[0, 0] = A
        V[0, 1:] = B
        V[1:, 0] = C
        V[1:, 1:] = D
        err = np.max(np.abs(V.conj().T @ V - np.eye(1 + n)))
        if err > 1e-10:
            raise ValueError(f"V*V deviates from the identity by {err}")
        slack = np.linalg.norm(B) * np.linalg.norm(C) - (1.0 - abs(A) ** 2)
        if slack > 1e-10:
            raise ValueError(f"|B||C| exceeds 1 - |A|^2 by {slack}")

        blkmap = np.zeros(n, dtype=int)
        masks = []
        start = 0
        for j, w in enumerate(dims):
            blkmap[start : start + w] = j
            mask = np.zeros(n)
            mask[start : start + w] = 1.0
            masks.append(mask)
            start += w
        for arr in (B, C, D, blkmap):
            arr.setflags(write=False)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "A", complex(A))
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "block_dims", tuple(dims))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "blkmap", blkmap)
        object.__setattr__(self, "masks", tuple(masks))

    def __setattr__(self, name, value):
        raise AttributeError("Colligation is immutable")

    def __repr__(self) -> str:
        return f"Colligation(d={self.d}, n={self.n}, |A|={abs(self.A):.4f})"


def random_colligation(seed: int, d: int, block_dims: Sequence[int]) -> Colligation:
    """Seeded sample: orthonormalize a complex Gaussian (1+n) x (1+n) matrix.

    The resulting V is unitary to roundoff, giving a generic member of the
    realization class with the requested block structure.  Sampling is
    limited to d <= 6 and n <= 48 so coefficient levels stay within the
    recursion budget.
    """
    dims = [int(x) for x in block_dims]
    n = sum(dims)
    if d > _SAMPLED_D_CAP:
        raise ValueError(f"sampled colligations support d <= {_SAMPLED_D_CAP}, got {d}")
    if n > _SAMPLED_N_CAP:
        raise ValueError(f"sampled colligations support n <= {_SAMPLED_N_CAP}, got {n}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((1 + n, 1 + n)) + 1j * rng.standard_normal((1 + n, 1 + n))
    q, r = np.linalg.qr(g)
    ph = np.diag(r).copy()
    ph /= np.abs(ph)
    V = q * ph
    return Colligation(d, V[0, 0], V[0, 1:], V[1:, 0], V[1:, 1:], dims)


def constant_colligation(d: int, block_dims: Sequence[int], value: complex = 1.0) -> Colligation:
    """The degenerate realization of the constant function f = value, |value| = 1."""
    if abs(abs(value) - 1.0) > 1e-12:
        raise ValueError(f"constant colligation needs a unimodular value, got {value}")
    n = sum(int(x) for x in block_dims)
    return Colligation(
        d, value, np.zeros(n), np.zeros(n), np.eye(n, dtype=complex), block_dims
    )


# -- coefficient extraction ------------------------------------------------


def _advance(
    col: Colligation, level: Dict[Alpha, np.ndarray]
) -> Dict[Alpha, np.ndarray]:
    """One homogeneous stage: v'_{beta + e_j} += P_j D v_beta."""
    out: Dict[Alpha, np.ndarray] = {}
    for beta, vec in level.items():
        dv = col.D @ vec
        for j in range(col.d):
            if col.block_dims[j] == 0:
                continue
            gamma = beta[:j] + (beta[j] + 1,) + beta[j + 1 :]
            masked = col.masks[j] * dv
            if gamma in out:
                out[gamma] = out[gamma] + masked
            else:
                out[gamma] = masked
    return out


def _first_level(col: Colligation) -> Dict[Alpha, np.ndarray]:
    out = {}
    for j in range(col.d):
        if col.block_dims[j] == 0:
            continue
        e = tuple(1 if t == j else 0 for t in range(col.d))
        out[e] = col.masks[j] * col.C
    return out


def _check_level_budget(d: int, k: int) -> None:
    if k > KMAX_CAP:
        raise ValueError(f"degree {k} exceeds the cap {KMAX_CAP}")
    if math.comb(d + k - 1, k) > _LEVEL_COUNT_CAP:
        raise ValueError(
            f"level {k} in {d} variables has {math.comb(d + k - 1, k)} indices, "
            f"cap is {_LEVEL_COUNT_CAP}"
        )


def level_coefficients(col: Colligation, k: int) -> Dict[Alpha, complex]:
    """All coefficients f_alpha with |alpha| = k via the stage recursion."""
    if k < 0:
        raise ValueError(f"need k >= 0, got {k}")
    if k == 0:
        return {tuple([0] * col.d): col.A}
    _check_level_budget(col.d, k)
    level = _first_level(col)
    for _ in range(k - 1):
        level = _advance(col, level)
    return {alpha: complex(col.B @ vec) for alpha, vec in level.items()}


def coefficient(col: Colligation, alpha: Sequence[int]) -> complex:
    """Single power-series coefficient f_alpha, pruned to the sublattice."""
    a = tuple(int(x) for x in alpha)
    if len(a) != col.d:
        raise ValueError(f"alpha has {len(a)} entries, expected {col.d}")
    if any(x < 0 for x in a):
        raise ValueError(f"alpha must be nonnegative, got {a}")
    k = sum(a)
    if k > KMAX_CAP:
        raise ValueError(f"degree {k} exceeds the cap {KMAX_CAP}")
    if k == 0:
        return col.A
    level = {e: v for e, v in _first_level(col).items() if all(x <= y for x, y in zip(e, a))}
    for _ in range(k - 1):
        level = _advance(col, level)
        level = {b: v for b, v in level.items() if all(x <= y for x, y in zip(b, a))}
    vec = level.get(a)
    if vec is None:
        return 0.0 + 0.0j
    return complex(col.B @ vec)


def sk_sum(col: Colligation, k: int) -> float:
    """S_k = sum of |f_alpha| over |alpha| = k (exact finite sum)."""
    return float(sum(abs(c) for c in level_coefficients(col, k).values()))


def sk_bound(col: Colligation, k: int) -> float:
    """(1 - |f_0|^2) C(d+k-2, k-1)^{1/2}, the level-k coefficient-sum bound."""
    if k < 1:
        raise ValueError(f"bound applies to k >= 1, got {k}")
    return (1.0 - abs(col.A) ** 2) * math.sqrt(math.comb(col.d + k - 2, k - 1))


# -- lemma verification ----------------------------------------------------


@dataclass(frozen=True)
class L1Chain:
    """Truncated l1 evaluation of the dilated series against its majorant."""

    r: float
    lhs: float
    rhs: float
    margin: float
    holds: bool


class LemmaReport:
    """Per-level records plus the l1 chain; iterates like the record list."""

    def __init__(self, records: List[dict], l1_chain: L1Chain):
        self.records = records
        self.l1_chain = l1_chain

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def all_hold(self) -> bool:
        return self.l1_chain.holds and all(rec["holds"] for rec in self.records)


def verify_lemma(col: Colligation, kmax: int, tol: float = 1e-8) -> LemmaReport:
    """Check S_k against its bound for k = 1..kmax and the implied l1 chain.

    Violations are reported as data (margin < -tol has holds=False); nothing
    raises.  The chain compares, at r = ka_lower_root(d),

        sum_{k<=kmax} S_k r^k + coefficient-bound tail
          <=  |f_0| + (1 - |f_0|^2) sum_{k>=1} r^k C(d+k-2, k-1)^{1/2},

    where the left tail reuses the per-level bound beyond kmax, so the check
    is conservative on the truncated side.
    """
    if kmax < 1:
        raise ValueError(f"need kmax >= 1, got {kmax}")
    _check_level_budget(col.d, kmax)
    a0 = abs(col.A)
    records = []
    level = _first_level(col)
    sks = []
    for k in range(1, kmax + 1):
        if k > 1:
            level = _advance(col, level)
        sk = float(sum(abs(complex(col.B @ vec)) for vec in level.values()))
        bound = sk_bound(col, k)
        margin = bound - sk
        sks.append(sk)
        records.append(
            {"k": k, "S_k": sk, "bound": bound, "margin": margin, "holds": margin >= -tol}
        )

    r = _cached_root(col.d)
    series = binom_sqrt_series(col.d, r)
    partial = sum(
        r**k * math.sqrt(math.comb(col.d + k - 2, k - 1)) for k in range(1, kmax + 1)
    )
    tail = (1.0 - a0**2) * (series.value + series.tail_bound - partial)
    lhs = a0 + sum(sk * r**k for sk, k in zip(sks, range(1, kmax + 1))) + max(tail, 0.0)
    rhs = a0 + (1.0 - a0**2) * series.value
    margin = rhs - lhs
    chain = L1Chain(r=r, lhs=lhs, rhs=rhs, margin=margin, holds=margin >= -tol)
    return LemmaReport(records, chain)


# -- quadrature replay of the Cauchy-Schwarz step --------------------------


@dataclass(frozen=True)
class QuadratureCheck:
    """Exactly quadratured ingredients of the level-k coefficient bound."""

    k: int
    s_k: float
    inner: complex
    identity_error: float
    u_l2: float
    v_l2: float
    v_l2_direct: float
    b_norm_sq: float
    cs_margin: float
    identity_holds: bool
    u_bound_holds: bool
    cs_holds: bool


def quadrature_cs_check(col: Colligation, k: int, tol: float = 1e-8) -> QuadratureCheck:
    """Replay S_k <= sqrt(int |u|^2) sqrt(int |v|^2) with exact quadrature.

    u(z) = B (P(z) D)^{k-1} and v(z) = sum_{|a| = k-1} conj(z)^a M_a C with
    M_a = sum_j mu_{a+e_j} P_j, mu the conjugate phases of the level-k
    coefficients.  On the tensor grid of (2k+1)-th roots of unity every
    integrand is a trigonometric polynomial of per-coordinate degree below
    the Nyquist limit, so the grid means are the exact torus integrals:
    the pairing integral recovers S_k, int |u|^2 <= |B|^2, and int |v|^2
    equals the direct sum of the |M_a C|^2.
    """
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    _check_level_budget(col.d, k)
    q = 2 * k + 1
    npts = q**col.d
    if npts > _QUAD_POINT_CAP:
        raise ValueError(f"grid needs {npts} points, cap is {_QUAD_POINT_CAP}")

    coeffs = level_coefficients(col, k)
    s_k = float(sum(abs(c) for c in coeffs.values()))
    mu = {
        alpha: (c.conjugate() / abs(c)) if abs(c) > 0.0 else 0.0
        for alpha, c in coeffs.items()
    }

    roots = np.exp(2j * np.pi * np.arange(q) / q)
    axes = np.meshgrid(*([roots] * col.d), indexing="ij")
    Z = np.stack([ax.reshape(-1) for ax in axes], axis=1)
    zb = Z[:, col.blkmap]

    u = np.broadcast_to(col.B, (npts, col.n)).copy()
    for _ in range(k - 1):
        u = (u * zb) @ col.D

    pc = [col.masks[j] * col.C for j in range(col.d)]
    Zc = Z.conj()
    pows = [
        [np.ones(npts, dtype=complex)] + [Zc[:, j] ** e for e in range(1, k)]
        for j in range(col.d)
    ]
    v = np.zeros((npts, col.n), dtype=complex)
    v_l2_direct = 0.0
    for a in multi_indices(col.d, k - 1):
        mac = np.zeros(col.n, dtype=complex)
        for j in range(col.d):
            e = a[:j] + (a[j] + 1,) + a[j + 1 :]
            m = mu.get(e, 0.0)
            if m != 0.0:
                mac += m * pc[j]
        v_l2_direct += float(np.vdot(mac, mac).real)
        w = np.ones(npts, dtype=complex)
        for j in range(col.d):
            if a[j]:
                w = w * pows[j][a[j]]
        v += w[:, None] * mac[None, :]

    inner = complex(np.mean(np.einsum("mi,mi->m", u, v)))
    u_l2 = float(np.mean(np.sum(np.abs(u) ** 2, axis=1)))
    v_l2 = float(np.mean(np.sum(np.abs(v) ** 2, axis=1)))
    b_norm_sq = float(np.vdot(col.B, col.B).real)
    cs = math.sqrt(max(u_l2, 0.0)) * math.sqrt(max(v_l2, 0.0))
    identity_error = abs(inner - s_k)
    return QuadratureCheck(
        k=k,
        s_k=s_k,
        inner=inner,
        identity_error=identity_error,
        u_l2=u_l2,
        v_l2=v_l2,
        v_l2_direct=v_l2_direct,
        b_norm_sq=b_norm_sq,
        cs_margin=cs - s_k,
        identity_holds=identity_error <= tol,
        u_bound_holds=u_l2 <= b_norm_sq + 1e-10,
        cs_holds=s_k <= cs + tol,
    )


# -- point evaluation and the membership probe -----------------------------


def transfer_eval(col: Colligation, z: Sequence[complex], regularize: float = 0.0) -> complex:
    """f(z) = A + B P(z) (I - D P(z))^{-1} C by a dense solve."""
    zz = np.asarray(z, dtype=complex)
    if zz.shape != (col.d,):
        raise ValueError(f"point has shape {zz.shape}, expected ({col.d},)")
    pz = zz[col.blkmap]
    M = (1.0 + regularize) * np.eye(col.n, dtype=complex) - col.D * pz[None, :]
    x = np.linalg.solve(M, col.C)
    return complex(col.A + col.B @ (pz * x))


@dataclass(frozen=True)
class ProbeResult:
    """Sampled sup of |f| over the closed polydisk."""

    max_modulus: float
    argmax: Tuple[complex, ...]
    samples: int
    regularized: int


def schur_membership_probe(col: Colligation, samples: int, seed: int) -> ProbeResult:
    """Max of |f| over seeded interior and boundary points (expect <= 1).

    Points alternate between uniform polydisk interior draws and torus
    boundary draws.  A solve whose value exceeds 1 + 1e-8 is retried with a
    small diagonal regularization (the only way the dense solve can misfire
    is near-singularity of I - D P(z), possible only at the boundary); the
    retry count is reported.
    """
    if samples < 1:
        raise ValueError(f"need samples >= 1, got {samples}")
    rng = np.random.default_rng(seed)
    best = -1.0
    best_z: Tuple[complex, ...] = tuple([0.0] * col.d)
    regularized = 0
    for s in range(samples):
        phases = np.exp(2j * np.pi * rng.uniform(0.0, 1.0, col.d))
        if s % 2 == 0:
            radii = np.sqrt(rng.uniform(0.0, 1.0, col.d))
        else:
            radii = np.ones(col.d)
        z = tuple(radii * phases)
        try:
            val = abs(transfer_eval(col, z))
        except np.linalg.LinAlgError:
            val = 1.0 + np.inf
        if val > 1.0 + 1e-8:
            val = abs(transfer_eval(col, z, regularize=1e-10))
            regularized += 1
        if val > best:
            best = val
            best_z = z
    return ProbeResult(
        max_modulus=best, argmax=best_z, samples=samples, regularized=regularized
    )
