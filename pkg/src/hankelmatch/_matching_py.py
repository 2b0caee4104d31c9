"""Pure-Python maximum-matching kernels.

Fallback twin of the compiled extension ``_matching_core``; both expose the
same two entry points with identical traversal order, so results are
bit-identical across backends. Inputs are plain lists of ints (CSR adjacency
plus edge arrays); match arrays are mutated in place and may be pre-seeded
with an initial matching (-1 means unmatched).
"""


def _augment(start, indptr, indices, adj_edge, match_row, match_col, visited, stamp, stack_row, stack_col, stack_pos, stack_edge):
    # Iterative depth-first search for an augmenting path from `start`.
    # Suffix vertices carry version stamps instead of a cleared visited set.
    depth = 0
    stack_row[0] = start
    stack_pos[0] = indptr[start]
    while depth >= 0:
        u = stack_row[depth]
        pos = stack_pos[depth]
        hi = indptr[u + 1]
        moved = False
        while pos < hi:
            v = indices[pos]
            pos += 1
            if visited[v] != stamp:
                visited[v] = stamp
                stack_pos[depth] = pos
                stack_col[depth] = v
                if stack_edge is not None:
                    stack_edge[depth] = adj_edge[pos - 1]
                w = match_col[v]
                if w < 0:
                    # Free suffix reached: flip the alternating path.
                    for i in range(depth + 1):
                        match_col[stack_col[i]] = stack_row[i]
                        match_row[stack_row[i]] = stack_col[i]
                    return depth
                depth += 1
                stack_row[depth] = w
                stack_pos[depth] = indptr[w]
                moved = True
                break
        if not moved:
            depth -= 1
    return -1


def max_matching_baseline(indptr, indices, n_rows, n_cols, match_row, match_col):
    """Augmenting-path maximum matching, one DFS per unmatched row.

    Rows are visited in index order (the caller stores them longest first).
    Returns the final cardinality.
    """
    visited = [0] * n_cols
    stack_row = [0] * (n_rows + 1)
    stack_col = [0] * (n_rows + 1)
    stack_pos = [0] * (n_rows + 1)
    cardinality = sum(1 for m in match_row if m >= 0)
    stamp = 0
    for start in range(n_rows):
        if match_row[start] >= 0:
            continue
        stamp += 1
        if _augment(start, indptr, indices, None, match_row, match_col, visited, stamp, stack_row, stack_col, stack_pos, None) >= 0:
            cardinality += 1
    return cardinality


def max_matching_fast(indptr, indices, adj_edge, edge_row, edge_col, edge_block_start, n_rows, n_cols, match_row, match_col):
    """Augmenting-path matching with greedy shifted-pair propagation.

    After each successful augmentation, every edge (p, s) added to the
    matching is a cut of one support string; the earlier cuts of that same
    string are its shifted pairs and are guaranteed edges, so any of them
    whose endpoints are both still free is matched outright. Propagation is
    a single pass over the added edges (newly propagated pairs do not
    recurse).
    """
    visited = [0] * n_cols
    stack_row = [0] * (n_rows + 1)
    stack_col = [0] * (n_rows + 1)
    stack_pos = [0] * (n_rows + 1)
    stack_edge = [0] * (n_rows + 1)
    cardinality = sum(1 for m in match_row if m >= 0)
    stamp = 0
    for start in range(n_rows):
        if match_row[start] >= 0:
            continue
        stamp += 1
        depth = _augment(start, indptr, indices, adj_edge, match_row, match_col, visited, stamp, stack_row, stack_col, stack_pos, stack_edge)
        if depth < 0:
            continue
        cardinality += 1
        for i in range(depth + 1):
            e = stack_edge[i]
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
    return cardinality
