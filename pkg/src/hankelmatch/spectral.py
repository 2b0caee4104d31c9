"""Low-rank Hankel factorization and recovery of the automaton operators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hankel import DENSE_SVD_THRESHOLD, HankelBlock, SparseMatrix
from .wfa import WeightedAutomaton

# A factorization whose smallest retained singular value falls below this
# fraction of the largest is treated as rank-overestimated.
RANK_GUARD = 1e-12


class RankDeficiencyError(ValueError):
    """Requested rank exceeds the numerically usable rank of the block."""


@dataclass(frozen=True)
class Factorization:
    """Rank-n factorization H ~ F @ B.T with F = U diag(s), B = V."""

    F: np.ndarray
    B: np.ndarray
    singular_values: np.ndarray
    left_basis: np.ndarray  # U, orthonormal columns, kept for the pseudo-inverse

    @property
    def rank(self) -> int:
        return len(self.singular_values)


def _fix_signs(U, s, Vt):
    # Deterministic sign convention: the largest-magnitude entry of each
    # right-singular vector is made positive.
    for j in range(Vt.shape[0]):
        i = np.argmax(np.abs(Vt[j]))
        if Vt[j, i] < 0:
            Vt[j] = -Vt[j]
            U[:, j] = -U[:, j]
    return U, s, Vt


def _factorization(U, s, Vt, n):
    U, s, Vt = _fix_signs(U[:, :n].copy(), s[:n].copy(), Vt[:n].copy())
    return Factorization(F=U * s, B=Vt.T, singular_values=s, left_basis=U)


def truncated_svd(H: SparseMatrix, n: int) -> Factorization:
    """Best rank-n factorization of H by dense SVD.

    F @ B.T is the rank-n Frobenius-optimal approximation (up to the usual
    rotation ambiguity in degenerate spectra).
    """
    if not 1 <= n <= min(H.shape):
        raise ValueError(f"rank {n} out of range for shape {H.shape}")
    if min(H.shape) > DENSE_SVD_THRESHOLD:
        raise ValueError(
            f"matrix side {min(H.shape)} exceeds dense SVD threshold; use randomized_svd"
        )
    U, s, Vt = np.linalg.svd(H.to_dense(), full_matrices=False)
    return _factorization(U, s, Vt, n)


def randomized_svd(H: SparseMatrix, proj_dim: int, n: int, seed: int) -> Factorization:
    """Rank-n factorization via a Gaussian range sketch of width proj_dim.

    The Hankel is projected to proj_dim dimensions, the projection is
    orthonormalized, the small matrix is decomposed exactly, and the left
    factor is lifted back. Deterministic given the seed.
    """
    if not 1 <= n <= proj_dim <= min(H.shape):
        raise ValueError(f"need 1 <= n <= proj_dim <= min(shape), got n={n} proj_dim={proj_dim} shape={H.shape}")
    rng = np.random.default_rng(seed)
    omega = rng.standard_normal((H.cols, proj_dim))
    Y = H.dot_dense(omega)
    Q, _ = np.linalg.qr(Y)
    small = H.t_dot_dense(Q).T  # Q.T @ H, shape (proj_dim, cols)
    Us, s, Vt = np.linalg.svd(small, full_matrices=False)
    U = Q @ Us
    return _factorization(U, s, Vt, n)


def recover_wa(block: HankelBlock, fac: Factorization) -> WeightedAutomaton:
    """Recover the n-state automaton from a factorized Hankel block.

    alpha_0^T = h_S^T B, alpha_inf = F+ h_P, A_sigma = F+ H_sigma B, with
    F+ = diag(s)^-1 U^T (exact because U has orthonormal columns).
    """
    s = fac.singular_values
    if s[-1] < RANK_GUARD * s[0]:
        raise RankDeficiencyError(
            f"singular value {s[-1]:.3e} below {RANK_GUARD:.0e} * sigma_max; rank is overestimated"
        )
    if fac.F.shape[0] != len(block.h_P) or fac.B.shape[0] != len(block.h_S):
        raise ValueError("factorization dimensions do not match the block")
    F_pinv = fac.left_basis.T / s[:, None]
    alpha0 = fac.B.T @ block.h_S
    alpha_inf = F_pinv @ block.h_P
    k = len(block.alphabet)
    n = fac.rank
    transitions = np.zeros((k, n, n))
    for sigma in range(k):
        transitions[sigma] = F_pinv @ block.H_sigma[sigma].dot_dense(fac.B)
    return WeightedAutomaton(block.alphabet, alpha0, alpha_inf, transitions)
