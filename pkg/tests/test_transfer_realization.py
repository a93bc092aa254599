"""Tests for transfer-function realizations and the coefficient-sum bound.

Oracles: direct word-by-word products for coefficients, torus quadrature of
f itself for Taylor consistency, and the closed |B||C| chain for S_1.
"""

import itertools
import math

import numpy as np
import pytest

from radii_lab.radii_bounds import ka_lower_root
from radii_lab.transfer_realization import (
    Colligation,
    LemmaReport,
    coefficient,
    constant_colligation,
    level_coefficients,
    multi_indices,
    quadrature_cs_check,
    random_colligation,
    schur_membership_probe,
    sk_bound,
    sk_sum,
    transfer_eval,
    verify_lemma,
    word_to_alpha,
)


def _word_oracle(col, alpha):
    # sum over words w with letter counts alpha of B P_{w1} D P_{w2} ... D P_{wk} C
    k = sum(alpha)
    if k == 0:
        return col.A
    total = 0.0 + 0.0j
    for word in itertools.product(range(col.d), repeat=k):
        counts = [0] * col.d
        for w in word:
            counts[w] += 1
        if tuple(counts) != tuple(alpha):
            continue
        row = col.B * col.masks[word[0]]
        for w in word[1:]:
            row = (row @ col.D) * col.masks[w]
        total += row @ col.C
    return total


# -- construction ----------------------------------------------------------


def test_colligation_validation():
    with pytest.raises(ValueError, match="identity"):
        Colligation(1, 0.5, [0.5], [0.5], [[0.5]], [1])
    with pytest.raises(ValueError, match="block_dims"):
        Colligation(2, 0.0, [1.0], [1.0], [[0.0]], [1])
    with pytest.raises(ValueError, match="shape"):
        Colligation(1, 0.0, [1.0], [1.0], [[0.0, 0.0]], [1])
    with pytest.raises(ValueError, match="d >= 1"):
        Colligation(0, 1.0, [], [], [[]], [])
    with pytest.raises(ValueError, match=">= 1"):
        Colligation(1, 1.0, [], [], np.zeros((0, 0)), [0])


def test_colligation_immutability():
    col = random_colligation(0, 2, [1, 1])
    with pytest.raises(AttributeError):
        col.A = 0.0
    with pytest.raises(ValueError):
        col.D[0, 0] = 1.0


def test_random_colligation_deterministic():
    a = random_colligation(42, 3, [2, 1, 1])
    b = random_colligation(42, 3, [2, 1, 1])
    assert a.A == b.A
    assert np.array_equal(a.D, b.D)
    assert a.block_dims == (2, 1, 1)


def test_random_colligation_is_isometry():
    col = random_colligation(7, 2, [3, 2])
    V = np.zeros((6, 6), dtype=complex)
    V[0, 0] = col.A
    V[0, 1:] = col.B
    V[1:, 0] = col.C
    V[1:, 1:] = col.D
    assert np.max(np.abs(V.conj().T @ V - np.eye(6))) < 1e-12
    # unitarity makes the coefficient inequality an equality
    bc = np.linalg.norm(col.B) * np.linalg.norm(col.C)
    assert bc == pytest.approx(1.0 - abs(col.A) ** 2, abs=1e-12)


def test_random_colligation_caps():
    with pytest.raises(ValueError, match="d <="):
        random_colligation(0, 7, [1] * 7)
    with pytest.raises(ValueError, match="n <="):
        random_colligation(0, 2, [30, 30])


def test_constant_colligation():
    col = constant_colligation(3, [1, 1, 1])
    assert coefficient(col, (0, 0, 0)) == 1.0
    for k in range(1, 4):
        assert sk_sum(col, k) == 0.0
    res = schur_membership_probe(col, 50, seed=3)
    assert res.max_modulus == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError, match="unimodular"):
        constant_colligation(1, [1], value=0.5)


# -- words and indices -----------------------------------------------------


def test_word_to_alpha():
    assert word_to_alpha((2, 1, 1, 0, 2, 1, 0), 3) == (2, 3, 2)
    with pytest.raises(ValueError, match="letter"):
        word_to_alpha((3,), 3)


def test_multi_indices_enumeration():
    for d, k in [(1, 4), (2, 3), (3, 4), (4, 2)]:
        idx = list(multi_indices(d, k))
        assert len(idx) == math.comb(d + k - 1, k)
        assert len(set(idx)) == len(idx)
        assert all(sum(a) == k and len(a) == d for a in idx)


# -- coefficients ----------------------------------------------------------


def test_coefficient_zero_index_is_A():
    col = random_colligation(1, 2, [2, 2])
    assert coefficient(col, (0, 0)) == col.A


def test_coefficient_first_order_closed_form():
    col = random_colligation(5, 3, [1, 2, 1])
    for j in range(3):
        e = tuple(1 if t == j else 0 for t in range(3))
        want = (col.B * col.masks[j]) @ col.C
        assert coefficient(col, e) == pytest.approx(want, abs=1e-13)


def test_coefficient_two_word_example():
    col = random_colligation(9, 2, [2, 1])
    w12 = (col.B * col.masks[0]) @ col.D @ (col.masks[1] * col.C)
    w21 = (col.B * col.masks[1]) @ col.D @ (col.masks[0] * col.C)
    assert coefficient(col, (1, 1)) == pytest.approx(w12 + w21, abs=1e-13)


def test_coefficient_matches_word_oracle():
    for d, dims in [(1, [3]), (2, [2, 1]), (3, [1, 1, 2])]:
        for seed in range(3):
            col = random_colligation(seed, d, dims)
            for k in range(0, 5):
                for alpha in multi_indices(d, k):
                    got = coefficient(col, alpha)
                    want = _word_oracle(col, alpha)
                    assert abs(got - want) < 1e-11, (d, seed, alpha)


def test_level_coefficients_consistent():
    col = random_colligation(11, 3, [1, 2, 1])
    level = level_coefficients(col, 3)
    assert len(level) == math.comb(3 + 3 - 1, 3)
    for alpha, c in level.items():
        assert c == pytest.approx(coefficient(col, alpha), abs=1e-13)


def test_coefficient_validation():
    col = random_colligation(0, 2, [1, 1])
    with pytest.raises(ValueError, match="entries"):
        coefficient(col, (1,))
    with pytest.raises(ValueError, match="nonnegative"):
        coefficient(col, (1, -1))
    with pytest.raises(ValueError, match="cap"):
        coefficient(col, (9, 0))


def test_taylor_consistency():
    # quadrature extraction of f's Taylor coefficients at radius 0.1
    col = random_colligation(13, 2, [2, 2])
    q, r = 8, 0.1
    roots = np.exp(2j * np.pi * np.arange(q) / q)
    vals = np.array(
        [
            [transfer_eval(col, (r * w1, r * w2)) for w2 in roots]
            for w1 in roots
        ]
    )
    for k in range(0, 4):
        for alpha in multi_indices(2, k):
            phase = np.outer(roots ** (-alpha[0]), roots ** (-alpha[1]))
            approx = (vals * phase).mean() / r**k
            assert abs(approx - coefficient(col, alpha)) < 1e-6, alpha


# -- the coefficient-sum bound ---------------------------------------------


def test_sk_sum_level_zero():
    col = random_colligation(17, 2, [1, 1])
    assert sk_sum(col, 0) == pytest.approx(abs(col.A), abs=1e-15)


def test_s1_chain():
    # S_1 <= |B||C| <= 1 - |A|^2
    for seed in range(5):
        col = random_colligation(seed, 3, [1, 1, 1])
        s1 = sk_sum(col, 1)
        bc = np.linalg.norm(col.B) * np.linalg.norm(col.C)
        assert s1 <= bc + 1e-10
        assert bc <= 1.0 - abs(col.A) ** 2 + 1e-10
        assert s1 <= sk_bound(col, 1) + 1e-10


def test_one_variable_coefficient_bound():
    for seed in range(5):
        col = random_colligation(seed, 1, [3])
        cap = 1.0 - abs(col.A) ** 2
        for k in range(1, 6):
            assert sk_sum(col, k) <= cap + 1e-10


def test_lemma_randomized():
    rng_seeds = range(30)
    for seed in rng_seeds:
        d = 2 + seed % 3
        dims = [1 + (seed + t) % 2 for t in range(d)]
        col = random_colligation(seed, d, dims)
        report = verify_lemma(col, kmax=5)
        assert len(report) == 5
        for rec in report:
            assert rec["holds"], (seed, rec)
            assert rec["margin"] >= -1e-8
        assert report.l1_chain.holds
        assert report.l1_chain.r == pytest.approx(ka_lower_root(d), abs=1e-12)
        assert report.all_hold()


def test_verify_lemma_validation():
    col = random_colligation(0, 2, [1, 1])
    with pytest.raises(ValueError, match="kmax"):
        verify_lemma(col, 0)
    with pytest.raises(ValueError, match="cap"):
        verify_lemma(col, 9)


def test_level_budget_cap():
    # a hand-built wide colligation exceeds the per-level index budget
    col = Colligation(40, 0.0, [1.0], [1.0], [[0.0]], [1] + [0] * 39)
    with pytest.raises(ValueError, match="indices"):
        sk_sum(col, 6)


# -- quadrature replay -----------------------------------------------------


@pytest.mark.parametrize("d,dims,k", [(2, [1, 1], 1), (2, [2, 1], 3), (3, [1, 1, 1], 2), (3, [2, 1, 1], 4)])
def test_quadrature_identity_and_cs(d, dims, k):
    for seed in range(3):
        col = random_colligation(seed, d, dims)
        chk = quadrature_cs_check(col, k)
        assert chk.identity_holds, (seed, chk.identity_error)
        assert chk.identity_error < 1e-10
        assert chk.u_bound_holds
        assert chk.cs_holds
        assert chk.v_l2 == pytest.approx(chk.v_l2_direct, abs=1e-10)
        assert chk.s_k <= sk_bound(col, k) + 1e-8


def test_quadrature_point_cap():
    col = random_colligation(0, 6, [1] * 6)
    with pytest.raises(ValueError, match="points"):
        quadrature_cs_check(col, 5)


def test_partial_isometry_of_phase_operators():
    col = random_colligation(21, 3, [2, 2, 1])
    rng = np.random.default_rng(22)
    for _ in range(10):
        mus = [
            0.0 if rng.uniform() < 0.3 else np.exp(2j * np.pi * rng.uniform())
            for _ in range(col.d)
        ]
        M = np.zeros((col.n, col.n), dtype=complex)
        for j, mu in enumerate(mus):
            M += mu * np.diag(col.masks[j])
        gram = M.conj().T @ M
        assert np.max(np.abs(gram @ gram - gram)) < 1e-12
        assert np.max(np.abs(gram - gram.conj().T)) < 1e-12


# -- point evaluation and probe --------------------------------------------


def test_transfer_eval_origin_and_shape():
    col = random_colligation(3, 2, [2, 1])
    assert transfer_eval(col, (0.0, 0.0)) == pytest.approx(col.A, abs=1e-14)
    assert abs(col.A) <= 1.0
    with pytest.raises(ValueError, match="shape"):
        transfer_eval(col, (0.0,))


def test_probe_schur_bound():
    for seed, d, dims in [(0, 1, [2]), (1, 2, [1, 2]), (2, 3, [1, 1, 1])]:
        col = random_colligation(seed, d, dims)
        res = schur_membership_probe(col, 600, seed=seed + 50)
        assert res.max_modulus <= 1.0 + 1e-8
        assert res.samples == 600
        assert len(res.argmax) == d


def test_probe_deterministic():
    col = random_colligation(5, 2, [1, 1])
    a = schur_membership_probe(col, 100, seed=9)
    b = schur_membership_probe(col, 100, seed=9)
    assert a.max_modulus == b.max_modulus
    assert a.argmax == b.argmax
    with pytest.raises(ValueError, match="samples"):
        schur_membership_probe(col, 0, seed=1)
