"""Prefix-suffix bipartite graph, maximum-matching engines, structural rank.

The graph of a sparse target function has one left vertex per distinct
prefix of the support, one right vertex per distinct suffix, and one edge
per cut of each support string. Construction interns prefixes and suffixes
incrementally through symbol-keyed tries, so no cut substrings are ever
materialized; vertex sequences are reconstructed lazily from parent chains.

Two interchangeable engines compute a maximum matching: the baseline
augmenting-path algorithm and a variant that additionally matches the
shifted cuts of every edge added by an augmentation. Both run on compiled
kernels when the extension is available, with a pure-Python fallback
selected at import.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .corpus import TargetFunction, Word, canonical_key
from .hankel import Basis, SparseMatrix
from . import _matching_py as _pure

try:
    from . import _matching_core as _native
except ImportError:
    _native = None


def native_available() -> bool:
    """True when the compiled matching kernels were built and imported."""
    return _native is not None


def _resolve_backend(backend: str):
    if backend == "auto":
        return _native if _native is not None else _pure
    if backend == "native":
        if _native is None:
            raise RuntimeError("compiled matching kernels are not available; rebuild the extension")
        return _native
    if backend == "pure":
        return _pure
    raise ValueError(f"unknown backend {backend!r}")


class PrefixSuffixGraph:
    """Bipartite sparsity pattern of a Hankel matrix, with edge provenance.

    Vertices are stored in canonical order (length descending, then
    lexicographic), so prefix id 0 is a longest prefix and the engines'
    start order follows from plain iteration. Edge ids are grouped by
    support string: the edges of string t occupy the contiguous id range
    [block_start, block_start + len(t)], one per cut position, which makes
    the shifted pairs of edge e exactly the ids [block_start(e), e).
    """

    def __init__(self, strings, num_prefixes, num_suffixes, adj_indptr, adj_indices, adj_edge,
                 edge_prefix, edge_suffix, edge_string, edge_block_start,
                 pref_parent, pref_sym, pnode_of_vid, suf_next, suf_sym, snode_of_vid,
                 prefix_lengths, suffix_lengths):
        self.strings = strings
        self.num_prefixes = num_prefixes
        self.num_suffixes = num_suffixes
        self.adj_indptr = adj_indptr
        self.adj_indices = adj_indices
        self.adj_edge = adj_edge
        self.edge_prefix = edge_prefix
        self.edge_suffix = edge_suffix
        self.edge_string = edge_string
        self.edge_block_start = edge_block_start
        self.prefix_lengths = prefix_lengths
        self.suffix_lengths = suffix_lengths
        self._pref_parent = pref_parent
        self._pref_sym = pref_sym
        self._pnode_of_vid = pnode_of_vid
        self._suf_next = suf_next
        self._suf_sym = suf_sym
        self._snode_of_vid = snode_of_vid
        self._csr_lists = None

    @property
    def num_edges(self) -> int:
        return len(self.edge_prefix)

    def prefix_sequence(self, vid: int) -> Word:
        node = self._pnode_of_vid[vid]
        syms = []
        while node != 0:
            syms.append(self._pref_sym[node])
            node = self._pref_parent[node]
        syms.reverse()
        return tuple(syms)

    def suffix_sequence(self, vid: int) -> Word:
        node = self._snode_of_vid[vid]
        syms = []
        while node != 0:
            syms.append(self._suf_sym[node])
            node = self._suf_next[node]
        return tuple(syms)

    @cached_property
    def prefixes(self) -> list[Word]:
        return [self.prefix_sequence(v) for v in range(self.num_prefixes)]

    @cached_property
    def suffixes(self) -> list[Word]:
        return [self.suffix_sequence(v) for v in range(self.num_suffixes)]

    def suffix_neighbors(self, prefix_vid: int) -> np.ndarray:
        """Suffix ids adjacent to a prefix, ascending."""
        lo, hi = self.adj_indptr[prefix_vid], self.adj_indptr[prefix_vid + 1]
        return self.adj_indices[lo:hi]

    def edge_origin(self, edge_id: int) -> tuple[int, int]:
        """(support string id, cut position) witnessing an edge."""
        start = int(self.edge_block_start[edge_id])
        return int(self.edge_string[edge_id]), edge_id - start

    def lists(self):
        # List forms of the CSR/edge arrays, cached for the pure backend.
        if self._csr_lists is None:
            self._csr_lists = (
                self.adj_indptr.tolist(),
                self.adj_indices.tolist(),
                self.adj_edge.tolist(),
                self.edge_prefix.tolist(),
                self.edge_suffix.tolist(),
                self.edge_block_start.tolist(),
            )
        return self._csr_lists

    def __repr__(self) -> str:
        return (
            f"PrefixSuffixGraph(|P|={self.num_prefixes}, |S|={self.num_suffixes}, "
            f"|E|={self.num_edges}, strings={len(self.strings)})"
        )


def _canonical_trie_order(parent, sym, levels, *, child_major: bool):
    """Per-level lexicographic ranks for trie nodes, then vids level-descending.

    child_major=False sorts level-d nodes by (parent rank, symbol), the lex
    order for prefixes extended on the right; child_major=True sorts by
    (symbol, tail rank), the lex order for suffixes extended on the left.
    """
    n = len(parent)
    parent = np.asarray(parent, dtype=np.int64)
    sym = np.asarray(sym, dtype=np.int64)
    levels = np.asarray(levels, dtype=np.int64)
    by_level = np.argsort(levels, kind="stable")
    bounds = np.searchsorted(levels[by_level], np.arange(levels.max() + 2))
    rank = np.empty(n, dtype=np.int64)
    ordered_levels = []
    for d in range(len(bounds) - 1):
        nodes = by_level[bounds[d] : bounds[d + 1]]
        if d == 0:
            order = nodes
        else:
            tail_rank = rank[parent[nodes]]
            s = sym[nodes]
            perm = np.lexsort((tail_rank, s) if child_major else (s, tail_rank))
            order = nodes[perm]
        rank[order] = np.arange(len(order))
        ordered_levels.append(order)
    vid_of_node = np.empty(n, dtype=np.int64)
    node_of_vid = np.empty(n, dtype=np.int64)
    pos = 0
    for order in reversed(ordered_levels):
        vid_of_node[order] = np.arange(pos, pos + len(order))
        node_of_vid[pos : pos + len(order)] = order
        pos += len(order)
    return vid_of_node, node_of_vid


def build_graph(f: TargetFunction) -> PrefixSuffixGraph:
    """Build the prefix-suffix graph of a target function's support."""
    if not f.entries:
        raise ValueError("target function has empty support")
    k = max(1, len(f.alphabet))
    strings = sorted(f.entries.keys(), key=canonical_key)
    lengths = np.fromiter((len(w) for w in strings), dtype=np.int64, count=len(strings))
    n_edges = int((lengths + 1).sum())

    # Tries keyed by packed (node, symbol) ints; node 0 is the empty sequence.
    pref_nodes: dict[int, int] = {}
    pref_parent = [0]
    pref_sym = [0]
    pref_level = [0]
    suf_nodes: dict[int, int] = {}
    suf_next = [0]
    suf_sym = [0]
    suf_level = [0]

    edge_pnode = np.empty(n_edges, dtype=np.int64)
    edge_snode = np.empty(n_edges, dtype=np.int64)
    pos = 0
    for w in strings:
        t = len(w)
        cur = 0
        edge_pnode[pos] = 0
        for c in range(t):
            key = cur * k + w[c]
            nid = pref_nodes.get(key)
            if nid is None:
                nid = len(pref_parent)
                pref_nodes[key] = nid
                pref_parent.append(cur)
                pref_sym.append(w[c])
                pref_level.append(pref_level[cur] + 1)
            cur = nid
            edge_pnode[pos + c + 1] = cur
        cur = 0
        edge_snode[pos + t] = 0
        for c in range(t - 1, -1, -1):
            key = cur * k + w[c]
            nid = suf_nodes.get(key)
            if nid is None:
                nid = len(suf_next)
                suf_nodes[key] = nid
                suf_next.append(cur)
                suf_sym.append(w[c])
                suf_level.append(suf_level[cur] + 1)
            cur = nid
            edge_snode[pos + c] = cur
        pos += t + 1

    p_vid_of_node, pnode_of_vid = _canonical_trie_order(pref_parent, pref_sym, pref_level, child_major=False)
    s_vid_of_node, snode_of_vid = _canonical_trie_order(suf_next, suf_sym, suf_level, child_major=True)

    edge_prefix = p_vid_of_node[edge_pnode].astype(np.int32)
    edge_suffix = s_vid_of_node[edge_snode].astype(np.int32)
    edge_string = np.repeat(np.arange(len(strings), dtype=np.int32), lengths + 1)
    starts = np.zeros(len(strings), dtype=np.int64)
    np.cumsum(lengths[:-1] + 1, out=starts[1:])
    edge_block_start = np.repeat(starts, lengths + 1).astype(np.int32)

    n_pref = len(pref_parent)
    n_suf = len(suf_next)
    perm = np.lexsort((edge_suffix, edge_prefix))
    adj_indices = np.ascontiguousarray(edge_suffix[perm])
    adj_edge = perm.astype(np.int32)
    indptr = np.zeros(n_pref + 1, dtype=np.int32)
    np.cumsum(np.bincount(edge_prefix, minlength=n_pref), out=indptr[1:])

    pref_level = np.asarray(pref_level, dtype=np.int64)
    suf_level = np.asarray(suf_level, dtype=np.int64)
    return PrefixSuffixGraph(
        strings=strings,
        num_prefixes=n_pref,
        num_suffixes=n_suf,
        adj_indptr=indptr,
        adj_indices=adj_indices,
        adj_edge=adj_edge,
        edge_prefix=edge_prefix,
        edge_suffix=edge_suffix,
        edge_string=edge_string,
        edge_block_start=edge_block_start,
        pref_parent=np.asarray(pref_parent, dtype=np.int64),
        pref_sym=np.asarray(pref_sym, dtype=np.int64),
        pnode_of_vid=pnode_of_vid,
        suf_next=np.asarray(suf_next, dtype=np.int64),
        suf_sym=np.asarray(suf_sym, dtype=np.int64),
        snode_of_vid=snode_of_vid,
        prefix_lengths=pref_level[pnode_of_vid],
        suffix_lengths=suf_level[snode_of_vid],
    )


@dataclass(frozen=True)
class Matching:
    """A set of non-intersecting edges as two mutually inverse id maps."""

    prefix_to_suffix: np.ndarray
    suffix_to_prefix: np.ndarray

    @property
    def cardinality(self) -> int:
        return int(np.count_nonzero(self.prefix_to_suffix >= 0))

    def pairs(self) -> list[tuple[int, int]]:
        return [(int(i), int(j)) for i, j in enumerate(self.prefix_to_suffix) if j >= 0]


def _new_match_arrays(n_rows, n_cols, initial):
    match_row = np.full(n_rows, -1, dtype=np.int32)
    match_col = np.full(n_cols, -1, dtype=np.int32)
    if initial:
        for i, j in initial:
            if match_row[i] >= 0 or match_col[j] >= 0:
                raise ValueError("initial matching reuses a vertex")
            match_row[i] = j
            match_col[j] = i
    return match_row, match_col


def augmenting_path_matching(g: PrefixSuffixGraph, backend: str = "auto") -> Matching:
    """Maximum matching by repeated depth-first augmenting-path search."""
    kern = _resolve_backend(backend)
    match_row, match_col = _new_match_arrays(g.num_prefixes, g.num_suffixes, None)
    if kern is _pure:
        indptr, indices, _, _, _, _ = g.lists()
        mr, mc = match_row.tolist(), match_col.tolist()
        kern.max_matching_baseline(indptr, indices, g.num_prefixes, g.num_suffixes, mr, mc)
        match_row = np.asarray(mr, dtype=np.int32)
        match_col = np.asarray(mc, dtype=np.int32)
    else:
        kern.max_matching_baseline(g.adj_indptr, g.adj_indices, g.num_prefixes, g.num_suffixes, match_row, match_col)
    return Matching(match_row, match_col)


def hankel_fast_matching(g: PrefixSuffixGraph, backend: str = "auto") -> Matching:
    """Maximum matching with the shifted-pair speedup.

    Same cardinality as :func:`augmenting_path_matching` on every input;
    the selected edge sets may differ.
    """
    kern = _resolve_backend(backend)
    match_row, match_col = _new_match_arrays(g.num_prefixes, g.num_suffixes, None)
    if kern is _pure:
        indptr, indices, adj_edge, edge_row, edge_col, block_start = g.lists()
        mr, mc = match_row.tolist(), match_col.tolist()
        kern.max_matching_fast(indptr, indices, adj_edge, edge_row, edge_col, block_start,
                               g.num_prefixes, g.num_suffixes, mr, mc)
        match_row = np.asarray(mr, dtype=np.int32)
        match_col = np.asarray(mc, dtype=np.int32)
    else:
        kern.max_matching_fast(g.adj_indptr, g.adj_indices, g.adj_edge, g.edge_prefix,
                               g.edge_suffix, g.edge_block_start,
                               g.num_prefixes, g.num_suffixes, match_row, match_col)
    return Matching(match_row, match_col)


def pattern_matching(indptr, indices, n_rows: int, n_cols: int, *, initial=None, backend: str = "auto") -> Matching:
    """Maximum matching of an arbitrary bipartite CSR pattern.

    `initial` optionally seeds the matching with (row, col) pairs before
    the augmenting-path sweep.
    """
    kern = _resolve_backend(backend)
    match_row, match_col = _new_match_arrays(n_rows, n_cols, initial)
    if kern is _pure:
        mr, mc = match_row.tolist(), match_col.tolist()
        kern.max_matching_baseline(list(indptr), list(indices), n_rows, n_cols, mr, mc)
        match_row = np.asarray(mr, dtype=np.int32)
        match_col = np.asarray(mc, dtype=np.int32)
    else:
        indptr = np.ascontiguousarray(indptr, dtype=np.int32)
        indices = np.ascontiguousarray(indices, dtype=np.int32)
        kern.max_matching_baseline(indptr, indices, n_rows, n_cols, match_row, match_col)
    return Matching(match_row, match_col)


def _pattern_csr(M: SparseMatrix):
    # Triplets are stored row-major with ascending cols, i.e. already CSR order.
    indptr = np.zeros(M.rows + 1, dtype=np.int32)
    np.cumsum(np.bincount(M.row_idx, minlength=M.rows), out=indptr[1:])
    return indptr, np.ascontiguousarray(M.col_idx)


def structural_rank(obj, backend: str = "auto") -> int:
    """Maximum matching cardinality of a sparsity pattern.

    Accepts a :class:`PrefixSuffixGraph` or any :class:`SparseMatrix`
    (only the nonzero pattern of the latter is used).
    """
    if isinstance(obj, PrefixSuffixGraph):
        return hankel_fast_matching(obj, backend=backend).cardinality
    if isinstance(obj, SparseMatrix):
        indptr, indices = _pattern_csr(obj)
        return pattern_matching(indptr, indices, obj.rows, obj.cols, backend=backend).cardinality
    raise TypeError(f"expected PrefixSuffixGraph or SparseMatrix, got {type(obj).__name__}")


def verify_matching(g: PrefixSuffixGraph, m: Matching) -> None:
    """Raise ValueError unless m is a consistent matching over g's edges."""
    if len(m.prefix_to_suffix) != g.num_prefixes or len(m.suffix_to_prefix) != g.num_suffixes:
        raise ValueError("matching dimensions do not fit the graph")
    for i, j in enumerate(m.prefix_to_suffix):
        if j < 0:
            continue
        if m.suffix_to_prefix[j] != i:
            raise ValueError(f"inconsistent matching at prefix {i}")
        neigh = g.suffix_neighbors(i)
        at = np.searchsorted(neigh, j)
        if at >= len(neigh) or neigh[at] != j:
            raise ValueError(f"matched pair ({i}, {j}) is not a graph edge")
    for j, i in enumerate(m.suffix_to_prefix):
        if i >= 0 and m.prefix_to_suffix[i] != j:
            raise ValueError(f"inconsistent matching at suffix {j}")


def matching_basis(g: PrefixSuffixGraph, m: Matching) -> Basis:
    """The basis of all matched prefixes and suffixes, canonically ordered."""
    verify_matching(g, m)
    p_ids = np.flatnonzero(m.prefix_to_suffix >= 0)
    s_ids = np.flatnonzero(m.suffix_to_prefix >= 0)
    prefixes = tuple(g.prefix_sequence(int(v)) for v in p_ids)
    suffixes = tuple(g.suffix_sequence(int(v)) for v in s_ids)
    return Basis(prefixes, suffixes)


def dump_graph(g: PrefixSuffixGraph, fh) -> None:
    """Write the edge list in the line-oriented debug format."""
    fh.write(f"GRAPH v1 {g.num_prefixes} {g.num_suffixes} {g.num_edges}\n")
    for e in range(g.num_edges):
        t, c = g.edge_origin(e)
        fh.write(f"E {g.edge_prefix[e]} {g.edge_suffix[e]} {t} {c}\n")
