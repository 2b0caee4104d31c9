"""Sparse Hankel blocks over a prefix/suffix basis, and numeric rank."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Alphabet, TargetFunction, Word, observed_prefixes_suffixes

# Matrices at or below this side length may be densified for SVD.
DENSE_SVD_THRESHOLD = 4096

# Default relative singular-value cutoff for numeric rank.
RANK_TOL = 1e-9


@dataclass(frozen=True)
class Basis:
    """An ordered block (prefixes, suffixes) indexing a Hankel sub-matrix."""

    prefixes: tuple[Word, ...]
    suffixes: tuple[Word, ...]

    def __post_init__(self):
        if not self.prefixes or not self.suffixes:
            raise ValueError("basis must have at least one prefix and one suffix")
        if len(set(self.prefixes)) != len(self.prefixes):
            raise ValueError("duplicate prefixes in basis")
        if len(set(self.suffixes)) != len(self.suffixes):
            raise ValueError("duplicate suffixes in basis")

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.prefixes), len(self.suffixes))


class SparseMatrix:
    """Triplet-format sparse matrix with canonical row-major entry order.

    No explicit zeros are stored, and there is at most one entry per
    (row, col) position. Entries are kept sorted by (row, col) so that
    equality and serialization are deterministic.
    """

    __slots__ = ("rows", "cols", "row_idx", "col_idx", "values")

    def __init__(self, rows, cols, row_idx, col_idx, values):
        row_idx = np.asarray(row_idx, dtype=np.int32)
        col_idx = np.asarray(col_idx, dtype=np.int32)
        values = np.asarray(values, dtype=np.float64)
        if not (len(row_idx) == len(col_idx) == len(values)):
            raise ValueError("triplet arrays must have equal length")
        keep = values != 0.0
        if not keep.all():
            row_idx, col_idx, values = row_idx[keep], col_idx[keep], values[keep]
        if len(row_idx):
            if row_idx.min() < 0 or row_idx.max() >= rows:
                raise ValueError("row index out of bounds")
            if col_idx.min() < 0 or col_idx.max() >= cols:
                raise ValueError("col index out of bounds")
            order = np.lexsort((col_idx, row_idx))
            row_idx, col_idx, values = row_idx[order], col_idx[order], values[order]
            flat = row_idx.astype(np.int64) * cols + col_idx
            if len(flat) > 1 and (np.diff(flat) == 0).any():
                raise ValueError("duplicate (row, col) entry")
        self.rows = int(rows)
        self.cols = int(cols)
        self.row_idx = row_idx
        self.col_idx = col_idx
        self.values = values

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries) -> "SparseMatrix":
        """Build from an iterable of (row, col, value) triplets."""
        ent = list(entries)
        if not ent:
            return cls(rows, cols, [], [], [])
        r, c, v = zip(*ent)
        return cls(rows, cols, r, c, v)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return len(self.values)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols))
        out[self.row_idx, self.col_idx] = self.values
        return out

    def dot_dense(self, B: np.ndarray) -> np.ndarray:
        """Compute self @ B for a dense matrix or vector B, keeping self sparse."""
        B = np.asarray(B, dtype=np.float64)
        if B.ndim == 1:
            return self.dot_dense(B[:, None])[:, 0]
        out = np.zeros((self.rows, B.shape[1]))
        np.add.at(out, self.row_idx, self.values[:, None] * B[self.col_idx])
        return out

    def t_dot_dense(self, B: np.ndarray) -> np.ndarray:
        """Compute self.T @ B for a dense matrix or vector B, keeping self sparse."""
        B = np.asarray(B, dtype=np.float64)
        if B.ndim == 1:
            return self.t_dot_dense(B[:, None])[:, 0]
        out = np.zeros((self.cols, B.shape[1]))
        np.add.at(out, self.col_idx, self.values[:, None] * B[self.row_idx])
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SparseMatrix)
            and self.shape == other.shape
            and np.array_equal(self.row_idx, other.row_idx)
            and np.array_equal(self.col_idx, other.col_idx)
            and np.array_equal(self.values, other.values)
        )

    def __repr__(self) -> str:
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={self.nnz})"


@dataclass(frozen=True)
class HankelBlock:
    """The Hankel artifacts over one basis: H, h_P, h_S and per-symbol H_sigma.

    H(p, s) = f(ps), h_P(p) = f(p), h_S(s) = f(s), H_sigma(p, s) = f(p sigma s).
    """

    alphabet: Alphabet
    basis: Basis
    H: SparseMatrix
    h_P: np.ndarray
    h_S: np.ndarray
    H_sigma: dict[int, SparseMatrix]


def full_basis(f: TargetFunction) -> Basis:
    """Basis of all observed prefixes and suffixes, canonically ordered."""
    if not f.entries:
        raise ValueError("target function has empty support")
    prefixes, suffixes = observed_prefixes_suffixes(f)
    return Basis(tuple(prefixes), tuple(suffixes))


def build_block(f: TargetFunction, basis: Basis) -> HankelBlock:
    """Populate all four Hankel artifacts for a basis.

    Runs over the support once per artifact, so cost is linear in the
    total length of support strings rather than in |P| * |S|.
    """
    k = len(f.alphabet)
    for seq in (*basis.prefixes, *basis.suffixes):
        if any(s < 0 or s >= k for s in seq):
            raise ValueError("alphabet mismatch: basis symbol id out of range")
    p_index = {p: i for i, p in enumerate(basis.prefixes)}
    s_index = {s: j for j, s in enumerate(basis.suffixes)}

    h_entries = []
    sig_entries: dict[int, list] = {sigma: [] for sigma in range(k)}
    for w, value in f.entries.items():
        for cut in range(len(w) + 1):
            i = p_index.get(w[:cut])
            if i is None:
                continue
            j = s_index.get(w[cut:])
            if j is not None:
                h_entries.append((i, j, value))
        for cut in range(len(w)):
            i = p_index.get(w[:cut])
            if i is None:
                continue
            j = s_index.get(w[cut + 1 :])
            if j is not None:
                sig_entries[w[cut]].append((i, j, value))

    np_, ns = basis.shape
    H = SparseMatrix.from_entries(np_, ns, h_entries)
    H_sigma = {sigma: SparseMatrix.from_entries(np_, ns, ent) for sigma, ent in sig_entries.items()}
    h_P = np.array([f(p) for p in basis.prefixes])
    h_S = np.array([f(s) for s in basis.suffixes])
    return HankelBlock(f.alphabet, basis, H, h_P, h_S, H_sigma)


def numeric_rank(M: SparseMatrix, tol: float = RANK_TOL, dense_threshold: int = DENSE_SVD_THRESHOLD) -> int:
    """Number of singular values above tol * sigma_max (0 for the zero matrix)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if M.nnz == 0:
        return 0
    if min(M.shape) > dense_threshold:
        raise ValueError(
            f"matrix side {min(M.shape)} exceeds dense SVD threshold {dense_threshold}; "
            "use the randomized factorization instead"
        )
    s = np.linalg.svd(M.to_dense(), compute_uv=False)
    smax = s[0]
    if smax == 0.0:
        return 0
    return int(np.sum(s > tol * smax))


def write_hankel(block: HankelBlock, fh) -> None:
    """Write the H matrix of a block in the line-oriented debug format.

    Layout: header "HANKEL v1 |P| |S| nnz", one "P id spelling" line per
    prefix, one "S id spelling" line per suffix, then "E p s value" lines
    with 17-significant-digit floats.
    """
    H = block.H
    fh.write(f"HANKEL v1 {H.rows} {H.cols} {H.nnz}\n")
    for i, p in enumerate(block.basis.prefixes):
        fh.write(f"P {i} {block.alphabet.render(p)}".rstrip() + "\n")
    for j, s in enumerate(block.basis.suffixes):
        fh.write(f"S {j} {block.alphabet.render(s)}".rstrip() + "\n")
    for r, c, v in zip(H.row_idx, H.col_idx, H.values):
        fh.write(f"E {r} {c} {v:.17g}\n")


def read_hankel(fh) -> tuple[list[str], list[str], SparseMatrix]:
    """Parse the debug format back into (prefix labels, suffix labels, H)."""
    header = fh.readline().split()
    if len(header) != 5 or header[0] != "HANKEL":
        raise ValueError(f"malformed Hankel header {header!r}")
    if header[1] != "v1":
        raise ValueError(f"unsupported Hankel version {header[1]!r}")
    n_p, n_s, nnz = int(header[2]), int(header[3]), int(header[4])
    prefixes = [""] * n_p
    suffixes = [""] * n_s
    entries = []
    for line in fh:
        parts = line.rstrip("\n").split(" ", 2)
        kind = parts[0]
        if kind == "P":
            prefixes[int(parts[1])] = parts[2] if len(parts) > 2 else ""
        elif kind == "S":
            suffixes[int(parts[1])] = parts[2] if len(parts) > 2 else ""
        elif kind == "E":
            _, r, c, v = line.split()
            entries.append((int(r), int(c), float(v)))
        else:
            raise ValueError(f"unexpected record {kind!r}")
    if len(entries) != nnz:
        raise ValueError(f"expected {nnz} entries, found {len(entries)}")
    return prefixes, suffixes, SparseMatrix.from_entries(n_p, n_s, entries)
