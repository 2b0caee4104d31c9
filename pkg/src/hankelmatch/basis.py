"""Baseline basis-selection strategies: random cuts, length cap, high norm.

All strategies return sub-bases of the observed prefix/suffix sets in
canonical order, and all route through the prefix-suffix graph so that
selection never materializes more sequences than it keeps.
"""

from __future__ import annotations

import numpy as np

from .corpus import TargetFunction
from .hankel import Basis
from .matching import PrefixSuffixGraph, build_graph

# Stop sampling cuts after this many consecutive draws without growth.
SATURATION_FACTOR = 50


def _basis_from_vids(g: PrefixSuffixGraph, p_ids, s_ids) -> Basis:
    p_ids = np.sort(np.asarray(p_ids, dtype=np.int64))
    s_ids = np.sort(np.asarray(s_ids, dtype=np.int64))
    prefixes = tuple(g.prefix_sequence(int(v)) for v in p_ids)
    suffixes = tuple(g.suffix_sequence(int(v)) for v in s_ids)
    return Basis(prefixes, suffixes)


def random_cuts_basis(f: TargetFunction, k: int, seed: int, *, uniform: bool = False,
                      graph: PrefixSuffixGraph | None = None) -> Basis:
    """Grow a basis by sampling random cuts of support strings.

    Strings are drawn proportionally to |f| (or uniformly with
    ``uniform=True``), a cut position is drawn uniformly, and both sides of
    the cut are added. Sampling stops once the basis holds 2*k sequences or
    after 50*k consecutive draws that add nothing.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    g = graph if graph is not None else build_graph(f)
    rng = np.random.default_rng(seed)
    if uniform:
        weights = None
    else:
        w = np.abs(np.array([f.entries[s] for s in g.strings]))
        weights = w / w.sum()
    lengths = np.fromiter((len(s) for s in g.strings), dtype=np.int64, count=len(g.strings))
    first_edge = np.zeros(len(g.strings), dtype=np.int64)
    np.cumsum(lengths[:-1] + 1, out=first_edge[1:])

    p_ids: set[int] = set()
    s_ids: set[int] = set()
    stale = 0
    limit = SATURATION_FACTOR * k
    while len(p_ids) + len(s_ids) < 2 * k and stale < limit:
        t = int(rng.choice(len(g.strings), p=weights))
        cut = int(rng.integers(0, lengths[t] + 1))
        e = int(first_edge[t]) + cut
        before = len(p_ids) + len(s_ids)
        p_ids.add(int(g.edge_prefix[e]))
        s_ids.add(int(g.edge_suffix[e]))
        stale = stale + 1 if len(p_ids) + len(s_ids) == before else 0
    return _basis_from_vids(g, list(p_ids), list(s_ids))


def length_basis(f: TargetFunction, max_len: int, *, graph: PrefixSuffixGraph | None = None) -> Basis:
    """All observed prefixes and suffixes of length at most ``max_len``."""
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    g = graph if graph is not None else build_graph(f)
    p_ids = np.flatnonzero(g.prefix_lengths <= max_len)
    s_ids = np.flatnonzero(g.suffix_lengths <= max_len)
    return _basis_from_vids(g, p_ids, s_ids)


def high_norm_basis(f: TargetFunction, k: int, *, graph: PrefixSuffixGraph | None = None) -> Basis:
    """Top-k rows and columns of the full Hankel by Euclidean norm.

    Scores accumulate over nonzeros only (the dense Hankel is never
    built); ties break toward canonical order.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    g = graph if graph is not None else build_graph(f)
    values = np.array([f.entries[s] for s in g.strings])
    edge_sq = values[g.edge_string] ** 2
    row_sq = np.zeros(g.num_prefixes)
    col_sq = np.zeros(g.num_suffixes)
    np.add.at(row_sq, g.edge_prefix, edge_sq)
    np.add.at(col_sq, g.edge_suffix, edge_sq)
    # Stable sort on descending score keeps ascending vid (canonical) on ties.
    p_top = np.argsort(-row_sq, kind="stable")[: min(k, g.num_prefixes)]
    s_top = np.argsort(-col_sq, kind="stable")[: min(k, g.num_suffixes)]
    return _basis_from_vids(g, p_top, s_top)
