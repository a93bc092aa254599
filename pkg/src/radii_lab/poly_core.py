"""Sparse multivariate polynomials on the unit polydisk.

Polynomials are stored as finite maps from exponent multi-indices (tuples of
nonnegative integers, one entry per variable) to complex coefficients.  The
module provides the coefficient l1 norm ``sum |f_alpha|``, the radial dilation
``f_r(z) = f(r z)``, homogeneous parts, torus sup-norm estimation, and the
single-function Bohr radius: the r solving ``l1_norm(dilate(f, r)) = 1``.

Sup norms over the torus are reported as certified LOWER bounds: the returned
value is |f| evaluated at an explicit point, first maximized over a product
grid of roots of unity and then improved by per-coordinate golden-section
phase refinement.  The cheap companion upper bound is always ``l1_norm(f)``.
Lower is the conservative direction everywhere this package divides by a sup
norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Sequence, Tuple

import numpy as np

from .series_kernel import solve_root

Alpha = Tuple[int, ...]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class BudgetError(RuntimeError):
    """Raised when a grid or search would exceed its configured budget."""


def index_abs(alpha: Alpha) -> int:
    """Total degree |alpha| of a multi-index."""
    return sum(alpha)


def index_le(beta: Alpha, alpha: Alpha) -> bool:
    """Componentwise partial order beta <= alpha."""
    if len(beta) != len(alpha):
        raise ValueError("multi-indices must have equal length")
    return all(b <= a for b, a in zip(beta, alpha))


def _check_alpha(alpha: Sequence[int], dim: int) -> Alpha:
    key = tuple(alpha)
    if len(key) != dim:
        raise ValueError(f"multi-index {key} has length {len(key)}, expected {dim}")
    for e in key:
        if not (isinstance(e, (int, np.integer)) and e >= 0):
            raise ValueError(f"multi-index {key} has a non-natural exponent")
    return tuple(int(e) for e in key)


class SparsePoly:
    """Immutable sparse polynomial in ``dim`` complex variables.

    ``coeffs`` maps exponent tuples to nonzero complex coefficients; zero
    coefficients are dropped at construction so equality of supports is
    meaningful.  Treat instances as immutable: every operation returns a new
    polynomial.
    """

    __slots__ = ("dim", "coeffs")

    def __init__(self, dim: int, coeffs: Mapping[Sequence[int], complex] | None = None):
        if not (isinstance(dim, (int, np.integer)) and dim >= 1):
            raise ValueError(f"dim must be an integer >= 1, got {dim!r}")
        clean: Dict[Alpha, complex] = {}
        for alpha, c in (coeffs or {}).items():
            key = _check_alpha(alpha, dim)
            cc = complex(c)
            if cc != 0:
                if key in clean:
                    raise ValueError(f"duplicate multi-index {key}")
                clean[key] = cc
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, name, value):
        raise AttributeError("SparsePoly is immutable")

    # -- basic structure ---------------------------------------------------

    @classmethod
    def constant(cls, dim: int, c: complex) -> "SparsePoly":
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def monomial(cls, dim: int, alpha: Sequence[int], c: complex = 1.0) -> "SparsePoly":
        return cls(dim, {tuple(alpha): c})

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.coeffs:
            return -1
        return max(index_abs(a) for a in self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def terms(self) -> Iterable[Tuple[Alpha, complex]]:
        return sorted(self.coeffs.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self.dim == other.dim and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        n = len(self.coeffs)
        return f"SparsePoly(dim={self.dim}, terms={n}, degree={self.degree()})"

    # -- arithmetic --------------------------------------------------------

    def _require_same_dim(self, other: "SparsePoly") -> None:
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "SparsePoly") -> "SparsePoly":
        if not isinstance(other, SparsePoly):
            return NotImplemented
        self._require_same_dim(other)
        out = dict(self.coeffs)
        for a, c in other.coeffs.items():
            out[a] = out.get(a, 0.0) + c
        return SparsePoly(self.dim, out)

    def __sub__(self, other: "SparsePoly") -> "SparsePoly":
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self + (-1.0) * other

    def __mul__(self, other):
        if isinstance(other, SparsePoly):
            self._require_same_dim(other)
            out: Dict[Alpha, complex] = {}
            for a, ca in self.coeffs.items():
                for b, cb in other.coeffs.items():
                    key = tuple(x + y for x, y in zip(a, b))
                    out[key] = out.get(key, 0.0) + ca * cb
            return SparsePoly(self.dim, out)
        if isinstance(other, (int, float, complex)):
            return SparsePoly(self.dim, {a: other * c for a, c in self.coeffs.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self) -> "SparsePoly":
        return (-1.0) * self

    # -- evaluation --------------------------------------------------------

    def evaluate(self, z: Sequence[complex]) -> complex:
        """Evaluate at a point of C^dim."""
        if len(z) != self.dim:
            raise ValueError(f"point has length {len(z)}, expected {self.dim}")
        zz = [complex(w) for w in z]
        total = 0j
        for alpha, c in self.coeffs.items():
            term = c
            for w, e in zip(zz, alpha):
                if e:
                    term *= w**e
            total += term
        return total


def l1_norm(f: SparsePoly) -> float:
    """Coefficient l1 norm: sum of |f_alpha| over the support."""
    return float(sum(abs(c) for c in f.coeffs.values()))


def dilate(f: SparsePoly, r: float) -> SparsePoly:
    """Radial dilation f_r(z) = f(r z); coefficient at alpha scales by r^|alpha|."""
    if r < 0:
        raise ValueError(f"dilation radius must be >= 0, got {r}")
    return SparsePoly(f.dim, {a: c * r ** index_abs(a) for a, c in f.coeffs.items()})


def homogeneous_part(f: SparsePoly, k: int) -> SparsePoly:
    """The degree-k homogeneous part of f (possibly zero)."""
    if not (isinstance(k, (int, np.integer)) and k >= 0):
        raise ValueError(f"degree must be an integer >= 0, got {k!r}")
    return SparsePoly(f.dim, {a: c for a, c in f.coeffs.items() if index_abs(a) == k})


def degree_profile(f: SparsePoly) -> Dict[int, float]:
    """Map degree k -> sum of |f_alpha| over |alpha| = k."""
    out: Dict[int, float] = {}
    for a, c in f.coeffs.items():
        k = index_abs(a)
        out[k] = out.get(k, 0.0) + abs(c)
    return out


def _grid_values(f: SparsePoly, grid: int) -> np.ndarray:
    """|f| on the product grid of grid-th roots of unity, shape (grid,)*dim.

    Each term contributes an outer product of per-coordinate phase vectors,
    so the cost is terms * grid^dim with no large intermediate per point.
    """
    shape = (grid,) * f.dim
    acc = np.zeros(shape, dtype=complex)
    base = np.exp(2j * np.pi * np.arange(grid) / grid)
    powers: Dict[int, np.ndarray] = {}
    for alpha, c in f.coeffs.items():
        vecs = []
        for e in alpha:
            if e not in powers:
                powers[e] = base**e
            vecs.append(powers[e])
        block = c
        for v in vecs:
            block = np.multiply.outer(block, v)
        acc += block
    return np.abs(acc)


def _golden_max(h, lo: float, hi: float, iters: int = 42) -> Tuple[float, float]:
    """Golden-section maximization of h on [lo, hi]; returns (argmax, max)."""
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = h(x1), h(x2)
    for _ in range(iters):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = h(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = h(x1)
    if f1 >= f2:
        return x1, f1
    return x2, f2


def sup_norm_torus(
    f: SparsePoly,
    grid_per_dim: int = 16,
    refine_steps: int = 3,
    budget: int = 2**22,
    starts: int = 4,
) -> float:
    """Certified lower estimate of sup |f| over the unit polydisk.

    For polynomials the sup over the closed polydisk is attained on the torus,
    so we maximize |f| over the product grid of ``grid_per_dim``-th roots of
    unity and then run ``refine_steps`` round-robin sweeps of per-coordinate
    golden-section phase refinement from the ``starts`` best grid points.  The
    result is |f| at an explicit evaluated point, hence never exceeds the true
    sup norm; ``l1_norm(f)`` is the matching crude upper bound.
    """
    if grid_per_dim < 8:
        raise ValueError(f"grid_per_dim must be >= 8, got {grid_per_dim}")
    if refine_steps < 0:
        raise ValueError(f"refine_steps must be >= 0, got {refine_steps}")
    if not f.coeffs:
        return 0.0
    if grid_per_dim**f.dim > budget:
        raise BudgetError(
            f"grid {grid_per_dim}^{f.dim} exceeds evaluation budget {budget}"
        )

    vals = _grid_values(f, grid_per_dim)
    flat = vals.reshape(-1)
    k = min(starts, flat.size)
    top = np.argpartition(flat, -k)[-k:]
    top = top[np.argsort(-flat[top])]  # deterministic best-first order

    step = 2.0 * np.pi / grid_per_dim
    best = float(flat[top[0]])

    def absf(theta: np.ndarray) -> float:
        return abs(f.evaluate(np.exp(1j * theta)))

    for idx in top:
        coords = np.unravel_index(int(idx), vals.shape)
        theta = np.array([c * step for c in coords], dtype=float)
        cur = float(flat[int(idx)])
        for _ in range(refine_steps):
            for j in range(f.dim):
                def h(t, j=j):
                    th = theta.copy()
                    th[j] = t
                    return absf(th)

                tj, val = _golden_max(h, theta[j] - step, theta[j] + step)
                if val >= cur:
                    theta[j] = tj
                    cur = val
        best = max(best, cur)
    return best


@dataclass(frozen=True)
class BohrRadiusEstimate:
    """Root of ``|f|_1 circ dilate = 1``; ``capped`` marks l1 <= 1 (radius 1)."""

    value: float
    capped: bool


def bohr_radius_estimate(f: SparsePoly, tol: float = 1e-10) -> BohrRadiusEstimate:
    """The unique r in (0, 1] with ``l1_norm(dilate(f, r)) = 1``, within tol.

    When ``l1_norm(f) <= 1`` there is no root below 1 and the estimate is
    capped at 1.  Constant polynomials of modulus <= 1 are capped as well
    (every dilation is the same function); constants of modulus > 1, or a
    constant term already of modulus >= 1 with more terms present, admit no
    root and raise ValueError.
    """
    if not (tol > 0):
        raise ValueError(f"tol must be positive, got {tol}")
    profile = degree_profile(f)
    total = sum(profile.values())
    if total <= 1.0:
        return BohrRadiusEstimate(1.0, True)
    if set(profile) <= {0}:
        raise ValueError(f"constant polynomial of modulus {total} > 1 has no Bohr radius")
    if profile.get(0, 0.0) >= 1.0:
        raise ValueError("constant term modulus >= 1 leaves no room for a root in (0, 1)")

    def g(r: float) -> float:
        return sum(s * r**k for k, s in profile.items())

    root = solve_root(g, 1.0, (0.0, 1.0), tol=tol)
    return BohrRadiusEstimate(float(root), False)


def mobius_truncation(a: float, degree: int) -> SparsePoly:
    """Degree-``degree`` truncation of the disk automorphism (a - z)/(1 - a z).

    The full function has the expansion ``a - (1-a^2) sum_{k>=1} a^(k-1) z^k``
    and sup norm exactly 1; truncating leaves a coefficient tail of l1 size
    ``(1+a) a^degree``.  Its one-variable Bohr radius solves
    ``a + (1-a^2) r / (1-a r) = 1``, i.e. r = 1/(1+2a).
    """
    if not (0.0 < a < 1.0):
        raise ValueError(f"need 0 < a < 1, got {a}")
    if degree < 1:
        raise ValueError(f"need degree >= 1, got {degree}")
    coeffs: Dict[Alpha, complex] = {(0,): a}
    for k in range(1, degree + 1):
        coeffs[(k,)] = -(1.0 - a * a) * a ** (k - 1)
    return SparsePoly(1, coeffs)


# -- interchange ----------------------------------------------------------


def poly_to_json(f: SparsePoly) -> dict:
    """Serializable form: {"dim": d, "terms": [{"alpha": [...], "re": x, "im": y}]}.

    Terms are sorted by multi-index so equal polynomials serialize identically.
    """
    terms = [
        {"alpha": list(a), "re": float(c.real), "im": float(c.imag)}
        for a, c in sorted(f.coeffs.items())
    ]
    return {"dim": f.dim, "terms": terms}


def poly_from_json(obj: Mapping) -> SparsePoly:
    """Parse the interchange form; duplicate multi-indices are rejected."""
    if not isinstance(obj, Mapping):
        raise ValueError("polynomial JSON must be an object")
    if "dim" not in obj or "terms" not in obj:
        raise ValueError('polynomial JSON needs "dim" and "terms" fields')
    dim = obj["dim"]
    if not (isinstance(dim, int) and dim >= 1):
        raise ValueError(f'"dim" must be an integer >= 1, got {dim!r}')
    terms = obj["terms"]
    if not isinstance(terms, (list, tuple)):
        raise ValueError('"terms" must be an array')
    coeffs: Dict[Alpha, complex] = {}
    for t in terms:
        if not isinstance(t, Mapping) or "alpha" not in t:
            raise ValueError(f'each term needs an "alpha" field, got {t!r}')
        key = _check_alpha(t["alpha"], dim)
        c = complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))
        if key in coeffs:
            raise ValueError(f"duplicate multi-index {key} in terms")
        if c != 0:
            coeffs[key] = c
    return SparsePoly(dim, coeffs)
