import math
import random

import numpy as np
import pytest

from hankelmatch.corpus import Alphabet, TargetFunction
from hankelmatch.hankel import Basis, SparseMatrix, build_block, full_basis, numeric_rank
from hankelmatch.matching import build_graph, hankel_fast_matching, matching_basis
from hankelmatch.spectral import (
    Factorization,
    RankDeficiencyError,
    randomized_svd,
    recover_wa,
    truncated_svd,
)
from hankelmatch.synth import all_words, exact_block_from_wa, exact_target_from_wa, random_wa

from conftest import GOLDEN_WORDS


def all_ones(n, m=None):
    m = n if m is None else m
    return SparseMatrix.from_entries(n, m, [(i, j, 1.0) for i in range(n) for j in range(m)])


def low_rank_matrix(rows, cols, rank, rng):
    A = rng.standard_normal((rows, rank))
    B = rng.standard_normal((rank, cols))
    dense = A @ B
    r, c = np.nonzero(dense)
    return SparseMatrix(rows, cols, r, c, dense[r, c])


class TestTruncatedSvd:
    def test_identity(self):
        M = SparseMatrix.from_entries(2, 2, [(0, 0, 1.0), (1, 1, 1.0)])
        fac = truncated_svd(M, 2)
        np.testing.assert_allclose(fac.singular_values, [1.0, 1.0])

    def test_all_ones_closed_form(self):
        fac = truncated_svd(all_ones(2), 1)
        np.testing.assert_allclose(fac.singular_values, [2.0])
        np.testing.assert_allclose(fac.F @ fac.B.T, np.ones((2, 2)), atol=1e-15)
        np.testing.assert_allclose(fac.B[:, 0], [1 / math.sqrt(2)] * 2)

    def test_golden_rank5_exact(self, golden_target):
        H = build_block(golden_target, full_basis(golden_target)).H
        fac = truncated_svd(H, 5)
        err = np.linalg.norm(H.to_dense() - fac.F @ fac.B.T) / np.linalg.norm(H.to_dense())
        assert err <= 1e-8

    def test_rank_out_of_range(self):
        M = all_ones(2)
        with pytest.raises(ValueError):
            truncated_svd(M, 0)
        with pytest.raises(ValueError):
            truncated_svd(M, 3)

    def test_singular_values_sorted_positive(self):
        rng = np.random.default_rng(4)
        M = low_rank_matrix(8, 6, 3, rng)
        fac = truncated_svd(M, 3)
        s = fac.singular_values
        assert np.all(np.diff(s) <= 0) and np.all(s > 0)

    def test_factor_invariants(self):
        rng = np.random.default_rng(5)
        M = low_rank_matrix(7, 9, 4, rng)
        fac = truncated_svd(M, 4)
        np.testing.assert_allclose(fac.F, fac.left_basis * fac.singular_values, atol=1e-12)
        np.testing.assert_allclose(fac.B.T @ fac.B, np.eye(4), atol=1e-8)


class TestRandomizedSvd:
    def test_rank1_big(self):
        H = all_ones(100)
        fac = randomized_svd(H, proj_dim=8, n=1, seed=0)
        assert abs(fac.singular_values[0] - 100.0) <= 1e-6
        err = np.linalg.norm(H.to_dense() - fac.F @ fac.B.T) / 100.0
        assert err <= 1e-6

    def test_matches_dense_on_exact_rank(self):
        rng = np.random.default_rng(9)
        for rank in (2, 4):
            M = low_rank_matrix(40, 30, rank, rng)
            dense = truncated_svd(M, rank)
            sketch = randomized_svd(M, proj_dim=rank + 10, n=rank, seed=3)
            np.testing.assert_allclose(sketch.singular_values, dense.singular_values, rtol=1e-6)

    def test_full_width_sketch_equals_dense(self):
        rng = np.random.default_rng(12)
        M = low_rank_matrix(6, 5, 5, rng)
        dense = truncated_svd(M, 3)
        sketch = randomized_svd(M, proj_dim=5, n=3, seed=11)
        np.testing.assert_allclose(sketch.singular_values, dense.singular_values, rtol=1e-9)
        np.testing.assert_allclose(sketch.B, dense.B, atol=1e-8)

    def test_seed_deterministic(self):
        M = all_ones(20, 15)
        a = randomized_svd(M, 6, 1, seed=42)
        b = randomized_svd(M, 6, 1, seed=42)
        np.testing.assert_array_equal(a.F, b.F)
        np.testing.assert_array_equal(a.B, b.B)

    def test_dimension_validation(self):
        M = all_ones(4)
        with pytest.raises(ValueError):
            randomized_svd(M, proj_dim=2, n=3, seed=0)
        with pytest.raises(ValueError):
            randomized_svd(M, proj_dim=5, n=1, seed=0)

    def test_never_exceeds_dense_singular_values(self):
        rng = np.random.default_rng(21)
        M = low_rank_matrix(30, 30, 6, rng)
        dense = truncated_svd(M, 6)
        sketch = randomized_svd(M, proj_dim=16, n=6, seed=2)
        assert np.all(sketch.singular_values <= dense.singular_values * (1 + 1e-6))


class TestRecoverWa:
    def test_constant_function_closed_form(self):
        # f == 1 over basis ({eps, a}, {eps, a}): H is all-ones, so
        # alpha0 = sqrt(2), alpha_inf = 1/sqrt(2), A_a = 1
        al = Alphabet("a")
        f = TargetFunction(al, {(): 1.0, (0,): 1.0, (0, 0): 1.0, (0, 0, 0): 1.0, (0, 0, 0, 0): 1.0})
        basis = Basis(((), (0,)), ((), (0,)))
        block = build_block(f, basis)
        wa = recover_wa(block, truncated_svd(block.H, 1))
        assert wa.n == 1
        np.testing.assert_allclose(wa.alpha0, [math.sqrt(2)])
        np.testing.assert_allclose(wa.alpha_inf, [1 / math.sqrt(2)])
        np.testing.assert_allclose(wa.transitions[0], [[1.0]])
        for k in range(5):
            assert abs(wa.evaluate((0,) * k) - 1.0) <= 1e-10

    def test_golden_matching_basis_recovery(self, golden_target):
        g = build_graph(golden_target)
        basis = matching_basis(g, hankel_fast_matching(g))
        block = build_block(golden_target, basis)
        wa = recover_wa(block, truncated_svd(block.H, 5))
        for w in GOLDEN_WORDS:
            assert abs(wa.evaluate(w) - 1.0) <= 1e-8
        for w in all_words(3, 3):
            if w not in golden_target.entries:
                assert abs(wa.evaluate(w)) <= 1e-8

    def test_ground_truth_wa_recovery(self):
        # support strings up to length 6 drive the basis selection; block
        # entries come from the automaton itself so nothing is truncated
        rng = np.random.default_rng(33)
        wa0 = random_wa(3, 2, rng)
        f = exact_target_from_wa(wa0, 6)
        g = build_graph(f)
        basis = matching_basis(g, hankel_fast_matching(g))
        block = exact_block_from_wa(wa0, basis)
        n = numeric_rank(block.H)
        assert n == 3
        wa = recover_wa(block, truncated_svd(block.H, n))
        for w in all_words(2, 4):
            assert abs(wa.evaluate(w) - f(w)) <= 1e-6

    def test_rank_overestimate_rejected(self):
        block = build_block(
            TargetFunction(Alphabet("a"), {(): 1.0, (0,): 1.0, (0, 0): 1.0}),
            Basis(((), (0,)), ((), (0,))),
        )
        fac = truncated_svd(block.H, 2)  # true rank is 1
        with pytest.raises(RankDeficiencyError):
            recover_wa(block, fac)

    def test_pseudo_inverse_identity(self):
        rng = np.random.default_rng(50)
        M = low_rank_matrix(9, 7, 4, rng)
        fac = truncated_svd(M, 4)
        F_pinv = fac.left_basis.T / fac.singular_values[:, None]
        np.testing.assert_allclose(F_pinv @ fac.F, np.eye(4), atol=1e-8)

    def test_dimension_mismatch_rejected(self, golden_target):
        block = build_block(golden_target, full_basis(golden_target))
        other = truncated_svd(all_ones(3), 1)
        with pytest.raises(ValueError, match="dimensions"):
            recover_wa(block, other)


class TestRecoveryExactness:
    def test_random_wa_with_full_rank_subblock(self):
        # whenever a sub-block keeps numeric rank n, the n-state recovery
        # reproduces the function on held-out strings
        rng = np.random.default_rng(60)
        done = 0
        for trial in range(12):
            states = int(rng.integers(2, 5))
            wa0 = random_wa(states, 2, rng)
            f = exact_target_from_wa(wa0, 5)
            g = build_graph(f)
            basis = matching_basis(g, hankel_fast_matching(g))
            block = exact_block_from_wa(wa0, basis)
            if numeric_rank(block.H) != states:
                continue
            wa = recover_wa(block, truncated_svd(block.H, states))
            for w in all_words(2, 4):
                assert abs(wa.evaluate(w) - f(w)) <= 1e-6
            done += 1
        assert done >= 6
