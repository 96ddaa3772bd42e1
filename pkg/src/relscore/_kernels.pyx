# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same contracts as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef enum:
    FACT = 0
    LEAF = 0
    FACT_LCA = 1
    ACTION_LCA = 2


def preorder(const int[:] child_start, const int[:] n_children):
    cdef Py_ssize_t n = child_start.shape[0]
    tin_a = np.zeros(n, dtype=np.int64)
    tout_a = np.zeros(n, dtype=np.int64)
    if n == 0:
        return tin_a, tout_a
    cdef long long[:] tin = tin_a
    cdef long long[:] tout = tout_a
    stack_a = np.empty(2 * n + 2, dtype=np.int64)
    cdef long long[:] stack = stack_a
    cdef Py_ssize_t sp = 0
    cdef long long t = 0, item, node, s, c
    stack[sp] = 0
    sp += 1
    while sp > 0:
        sp -= 1
        item = stack[sp]
        if item < 0:
            tout[-item - 1] = t
            continue
        node = item
        tin[node] = t
        t += 1
        stack[sp] = -node - 1
        sp += 1
        s = child_start[node]
        if s >= 0:
            c = s + n_children[node] - 1
            while c >= s:
                stack[sp] = c
                sp += 1
                c -= 1
    return tin_a, tout_a


cdef inline int _lca(int u, int v, const int[:] parent, const int[:] depth) nogil:
    while depth[u] > depth[v]:
        u = parent[u]
    while depth[v] > depth[u]:
        v = parent[v]
    while u != v:
        u = parent[u]
        v = parent[v]
    return u


cdef inline void _emit(int node, int parent_node, Py_ssize_t m, int[:] vt_node, int[:] vt_parent,
                       signed char[:] vt_kind, int[:] pos, unsigned char[:] is_leaf,
                       const signed char[:] kind) nogil:
    pos[node] = <int>m
    vt_node[m] = node
    vt_parent[m] = parent_node
    if is_leaf[node]:
        vt_kind[m] = LEAF
    elif kind[node] == FACT:
        vt_kind[m] = FACT_LCA
    else:
        vt_kind[m] = ACTION_LCA


def build_virtual(const int[:] order, const long long[:] seg_bounds,
                  const int[:] parent, const int[:] depth, const signed char[:] kind):
    cdef Py_ssize_t n_nodes = parent.shape[0]
    cdef Py_ssize_t n_order = order.shape[0]
    cdef Py_ssize_t n_seg = seg_bounds.shape[0] - 1
    cap = 2 * n_order + 1
    vt_node_a = np.empty(cap, dtype=np.int32)
    vt_parent_a = np.empty(cap, dtype=np.int32)
    vt_kind_a = np.empty(cap, dtype=np.int8)
    seg_end_a = np.empty(max(n_seg, 0), dtype=np.int64)
    cdef int[:] vt_node = vt_node_a
    cdef int[:] vt_parent = vt_parent_a
    cdef signed char[:] vt_kind = vt_kind_a
    cdef long long[:] seg_end = seg_end_a
    # pos[node]: emitted index within current segment, -1 otherwise
    pos_a = np.full(n_nodes, -1, dtype=np.int32)
    leaf_a = np.zeros(n_nodes, dtype=np.uint8)
    stack_a = np.empty(n_order + 2, dtype=np.int32)
    cdef int[:] pos = pos_a
    cdef unsigned char[:] is_leaf = leaf_a
    cdef int[:] stack = stack_a
    cdef Py_ssize_t m = 0, s, a, b, i, sp, first
    cdef int v, w, top
    for s in range(n_seg):
        a = seg_bounds[s]
        b = seg_bounds[s + 1]
        first = m
        for i in range(a, b):
            is_leaf[order[i]] = 1
        sp = 0
        stack[sp] = order[a]
        sp += 1
        for i in range(a + 1, b):
            v = order[i]
            w = _lca(v, stack[sp - 1], parent, depth)
            if w != stack[sp - 1]:
                while sp >= 2 and depth[stack[sp - 2]] >= depth[w]:
                    sp -= 1
                    top = stack[sp]
                    _emit(top, stack[sp - 1], m, vt_node, vt_parent, vt_kind, pos, is_leaf, kind)
                    m += 1
                if stack[sp - 1] != w:
                    sp -= 1
                    top = stack[sp]
                    _emit(top, w, m, vt_node, vt_parent, vt_kind, pos, is_leaf, kind)
                    m += 1
                    stack[sp] = w
                    sp += 1
            stack[sp] = v
            sp += 1
        while sp >= 2:
            sp -= 1
            top = stack[sp]
            _emit(top, stack[sp - 1], m, vt_node, vt_parent, vt_kind, pos, is_leaf, kind)
            m += 1
        _emit(stack[0], -1, m, vt_node, vt_parent, vt_kind, pos, is_leaf, kind)
        m += 1
        # parent node ids -> indices; every parent is emitted within the segment
        for i in range(first, m):
            if vt_parent[i] >= 0:
                vt_parent[i] = pos[vt_parent[i]]
        for i in range(first, m):
            pos[vt_node[i]] = -1
        for i in range(a, b):
            is_leaf[order[i]] = 0
        seg_end[s] = m
    return vt_node_a[:m].copy(), vt_parent_a[:m].copy(), vt_kind_a[:m].copy(), seg_end_a


def evaluate(const int[:] parent, const signed char[:] kind, const int[:] label,
             const double[:] xi, const unsigned char[:] in_state,
             const int[:] vt_node, const int[:] vt_parent, const signed char[:] vt_kind,
             const long long[:] seg_end):
    cdef Py_ssize_t n = parent.shape[0]
    cdef Py_ssize_t m = vt_node.shape[0]
    cdef Py_ssize_t n_seg = seg_end.shape[0]
    alive_a = np.empty(n, dtype=np.uint8)
    acc_a = np.empty(m, dtype=np.float64)
    mass_a = np.empty(m, dtype=np.float64)
    out_a = np.empty(n_seg, dtype=np.float64)
    cdef unsigned char[:] alive = alive_a
    cdef double[:] acc = acc_a
    cdef double[:] mass = mass_a
    cdef double[:] out = out_a
    cdef Py_ssize_t i
    cdef int p, node
    cdef signed char k
    cdef double v
    with nogil:
        if n > 0:
            alive[0] = 1
        for i in range(1, n):
            p = parent[i]
            alive[i] = alive[p] and not (kind[p] == FACT and in_state[label[p]])
        for i in range(m):
            acc[i] = 1.0 if vt_kind[i] == ACTION_LCA else 0.0
        for i in range(m):
            k = vt_kind[i]
            node = vt_node[i]
            if k == LEAF:
                v = xi[node] if alive[node] else 0.0
            elif k == FACT_LCA:
                v = acc[i]
            else:
                v = xi[node] * (1.0 - acc[i])
            mass[i] = v
            p = vt_parent[i]
            if p >= 0:
                if vt_kind[p] == ACTION_LCA:
                    acc[p] *= 1.0 - v / xi[vt_node[p]]
                else:
                    acc[p] += v
        for i in range(n_seg):
            v = mass[seg_end[i] - 1]
            if v < 0.0:
                v = 0.0
            elif v > 1.0:
                v = 1.0
            out[i] = v
    return out_a
