# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled maximum-matching kernels.

Hot twin of ``_matching_py``; same entry points, same traversal order,
bit-identical results. Inputs are int32 CSR adjacency plus edge arrays;
match arrays are mutated in place and may be pre-seeded (-1 = unmatched).
"""

from libc.stdint cimport int32_t
from libc.stdlib cimport free, malloc


cdef struct Scratch:
    int32_t *visited
    int32_t *stack_row
    int32_t *stack_col
    int32_t *stack_pos
    int32_t *stack_edge


cdef int _alloc_scratch(Scratch *s, int n_rows, int n_cols) except -1:
    s.visited = <int32_t *> malloc(n_cols * sizeof(int32_t))
    s.stack_row = <int32_t *> malloc((n_rows + 1) * sizeof(int32_t))
    s.stack_col = <int32_t *> malloc((n_rows + 1) * sizeof(int32_t))
    s.stack_pos = <int32_t *> malloc((n_rows + 1) * sizeof(int32_t))
    s.stack_edge = <int32_t *> malloc((n_rows + 1) * sizeof(int32_t))
    if (s.visited == NULL or s.stack_row == NULL or s.stack_col == NULL
            or s.stack_pos == NULL or s.stack_edge == NULL):
        _free_scratch(s)
        raise MemoryError()
    cdef int i
    for i in range(n_cols):
        s.visited[i] = 0
    return 0


cdef void _free_scratch(Scratch *s) noexcept:
    free(s.visited)
    free(s.stack_row)
    free(s.stack_col)
    free(s.stack_pos)
    free(s.stack_edge)


cdef inline int _augment(int start, const int32_t[::1] indptr, const int32_t[::1] indices,
                         const int32_t[::1] adj_edge, bint track_edges,
                         int32_t[::1] match_row, int32_t[::1] match_col,
                         Scratch *s, int32_t stamp) noexcept:
    cdef int depth = 0
    cdef int u, v, w, i
    cdef int32_t pos, hi
    cdef bint moved
    s.stack_row[0] = start
    s.stack_pos[0] = indptr[start]
    while depth >= 0:
        u = s.stack_row[depth]
        pos = s.stack_pos[depth]
        hi = indptr[u + 1]
        moved = False
        while pos < hi:
            v = indices[pos]
            pos += 1
            if s.visited[v] != stamp:
                s.visited[v] = stamp
                s.stack_pos[depth] = pos
                s.stack_col[depth] = v
                if track_edges:
                    s.stack_edge[depth] = adj_edge[pos - 1]
                w = match_col[v]
                if w < 0:
                    for i in range(depth + 1):
                        match_col[s.stack_col[i]] = s.stack_row[i]
                        match_row[s.stack_row[i]] = s.stack_col[i]
                    return depth
                depth += 1
                s.stack_row[depth] = w
                s.stack_pos[depth] = indptr[w]
                moved = True
                break
        if not moved:
            depth -= 1
    return -1


def max_matching_baseline(const int32_t[::1] indptr, const int32_t[::1] indices,
                          int n_rows, int n_cols,
                          int32_t[::1] match_row, int32_t[::1] match_col):
    """Augmenting-path maximum matching, one DFS per unmatched row."""
    cdef Scratch s
    cdef int start, cardinality = 0
    cdef int32_t stamp = 0
    _alloc_scratch(&s, n_rows, n_cols)
    try:
        for start in range(n_rows):
            if match_row[start] >= 0:
                cardinality += 1
        for start in range(n_rows):
            if match_row[start] >= 0:
                continue
            stamp += 1
            if _augment(start, indptr, indices, indptr, False, match_row, match_col, &s, stamp) >= 0:
                cardinality += 1
    finally:
        _free_scratch(&s)
    return cardinality


def max_matching_fast(const int32_t[::1] indptr, const int32_t[::1] indices,
                      const int32_t[::1] adj_edge, const int32_t[::1] edge_row,
                      const int32_t[::1] edge_col, const int32_t[::1] edge_block_start,
                      int n_rows, int n_cols,
                      int32_t[::1] match_row, int32_t[::1] match_col):
    """Augmenting-path matching with greedy shifted-pair propagation."""
    cdef Scratch s
    cdef int start, depth, i, r2, c2, cardinality = 0
    cdef int32_t e, e2
    cdef int32_t stamp = 0
    _alloc_scratch(&s, n_rows, n_cols)
    try:
        for start in range(n_rows):
            if match_row[start] >= 0:
                cardinality += 1
        for start in range(n_rows):
            if match_row[start] >= 0:
                continue
            stamp += 1
            depth = _augment(start, indptr, indices, adj_edge, True, match_row, match_col, &s, stamp)
            if depth < 0:
                continue
            cardinality += 1
            for i in range(depth + 1):
                e = s.stack_edge[i]
                for e2 in range(edge_block_start[e], e):
                    r2 = edge_row[e2]
                    if match_row[r2] >= 0:
                        continue
                    c2 = edge_col[e2]
                    if match_col[c2] >= 0:
                        continue
                    match_row[r2] = c2
                    match_col[c2] = r2
                    cardinality += 1
    finally:
        _free_scratch(&s)
    return cardinality
