"""Structured m-stage polynomials with unimodular coefficients built from the
q x q character matrix A_q = (omega^{ij}), omega = exp(2 pi i / q).

The polynomial in d = q*m variables, grouped into m blocks of q,

    P(z) = e_1^t A_q D(z^(1)) A_q D(z^(2)) ... A_q D(z^(m)) 1,

with D(w) = diag(w_1, ..., w_q), expands into exactly q^m monomials
z^(1)_{i_1} ... z^(m)_{i_m} with coefficients
A_q[0, i_1] A_q[i_1, i_2] ... A_q[i_{m-1}, i_m], all of modulus one.  Its
l1 norm is q^m while its Agler norm is at most q^{(m+1)/2} (submultiplicative
bound through the structured product, using ||A_q|| = sqrt(q)).  The gap
q^{(m-1)/2} between the two norms drives the multi-variable Bohr radius
upper bounds of order sqrt(log d / d).

Variable flattening: z^(j)_i maps to flat index (j-1)*q + (i-1) in 0-based
coordinates, so block j occupies a contiguous slice.  ``block_evaluate``
computes P(T) through the same structured product on operator arguments,
avoiding the q^m term expansion.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .operator_lab import OperatorTuple
from .poly_core import SparsePoly

MAX_VARIABLES = 24


@dataclass(frozen=True)
class MQSpec:
    """Parameters (q, m): block size q >= 2 and stage count m >= 1."""

    q: int
    m: int

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"need q >= 2, got {self.q}")
        if self.m < 1:
            raise ValueError(f"need m >= 1, got {self.m}")

    @property
    def d(self) -> int:
        """Number of variables q*m."""
        return self.q * self.m

    @property
    def omega(self) -> complex:
        return cmath.exp(2j * cmath.pi / self.q)

    def matrix(self) -> np.ndarray:
        """A_q with entries omega^{ij}; satisfies A* A = q I, norm sqrt(q)."""
        q = self.q
        ij = np.outer(np.arange(q), np.arange(q)) % q
        return np.exp(2j * np.pi * ij / q)


def build_mq_poly(spec: MQSpec, var_cap: Optional[int] = None) -> SparsePoly:
    """Full q^m-term expansion of P as a SparsePoly in q*m variables.

    Coefficient of z^(1)_{i_1} ... z^(m)_{i_m} is omega raised to
    sum_{t=1}^{m-1} i_t i_{t+1} (with the leading row-0 factor equal to 1);
    exponents are reduced mod q before exponentiation to keep every
    coefficient unimodular to machine precision.
    """
    cap = MAX_VARIABLES if var_cap is None else var_cap
    if spec.d > cap:
        raise ValueError(f"q*m = {spec.d} exceeds the variable cap {cap}")
    q, m = spec.q, spec.m
    dim = spec.d
    coeffs = {}
    for word in itertools.product(range(q), repeat=m):
        phase = 0
        for t in range(m - 1):
            phase += word[t] * word[t + 1]
        alpha = [0] * dim
        for j, i in enumerate(word):
            alpha[j * q + i] = 1
        coeffs[tuple(alpha)] = cmath.exp(2j * cmath.pi * (phase % q) / q)
    return SparsePoly(dim, coeffs)


def mq_agler_upper(spec: MQSpec) -> float:
    """The certified Agler-norm bound q^{(m+1)/2}."""
    return float(spec.q) ** ((spec.m + 1) / 2.0)


def block_evaluate(spec: MQSpec, T: OperatorTuple) -> np.ndarray:
    """P(T) through the structured product, O(m q^2) block operations.

    The running state is a row of q blocks of size N x N, seeded with
    e_1^t (x) I; each stage applies A_q (x) I and then the block diagonal of
    the stage's operators T_{(j-1)q + i}.  Agrees with naive evaluation of
    the expanded polynomial but never materializes the q^m terms.
    """
    if T.d != spec.d:
        raise ValueError(f"tuple has {T.d} members, spec needs q*m = {spec.d}")
    T.require(norm_cap=1.0 + 1e-10, commute_tol=1e-10 * max(1.0, max(T.norms) ** 2))
    q, m, n = spec.q, spec.m, T.dim
    A = spec.matrix()
    v = np.zeros((q, n, n), dtype=complex)
    v[0] = np.eye(n)
    for stage in range(m):
        v = np.einsum("ikl,ij->jkl", v, A)
        for j in range(q):
            v[j] = v[j] @ T.mats[stage * q + j]
    return v.sum(axis=0)
