"""Pure-Python graph kernels, used when the compiled extension is absent.

Every function here has the same signature and output as its counterpart
in ``_kernels.pyx``. Inputs are int64 numpy arrays; CSR adjacency lists are
assumed free of duplicate entries.
"""

import numpy as np


def component_labels(n, src, dst):
    """Label each of ``n`` nodes with the smallest index in its component."""
    parent = list(range(n))
    size = [1] * n
    low = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in zip(src.tolist(), dst.tolist()):
        a, b = find(a), find(b)
        if a == b:
            continue
        if size[a] < size[b]:
            a, b = b, a
        parent[b] = a
        size[a] += size[b]
        low[a] = min(low[a], low[b])
    return np.array([low[find(i)] for i in range(n)], dtype=np.int64)


def cooccurrence(fwd_indptr, fwd_indices, rev_indptr, rev_indices, anchor):
    """Count, for every column c, the dependents shared by ``anchor`` and c."""
    n = len(rev_indptr) - 1
    counts = [0] * n
    fp = fwd_indptr.tolist()
    for d in rev_indices[rev_indptr[anchor]:rev_indptr[anchor + 1]].tolist():
        for c in fwd_indices[fp[d]:fp[d + 1]].tolist():
            counts[c] += 1
    counts[anchor] = 0
    return np.array(counts, dtype=np.int64)


def pair_matrix(fwd_indptr, fwd_indices, rows, member_pos, m):
    """Symmetric m x m co-dependency counts among member columns."""
    mat = [[0] * m for _ in range(m)]
    fp = fwd_indptr.tolist()
    pos_of = member_pos.tolist()
    for d in rows.tolist():
        hits = [pos_of[c] for c in fwd_indices[fp[d]:fp[d + 1]].tolist() if pos_of[c] >= 0]
        for i, a in enumerate(hits):
            for b in hits[i + 1:]:
                mat[a][b] += 1
                mat[b][a] += 1
    return np.array(mat, dtype=np.int64).reshape(m, m)
