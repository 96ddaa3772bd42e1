"""Pure-Python kernels; reference semantics for ``_kernels.pyx``.

Arrays come in as numpy arrays and results go out as numpy arrays so both
implementations share one calling convention.

Virtual-tree encoding (one segment per fact label, nodes in post-order):

    vt_node[i]    arena id of virtual node i
    vt_parent[i]  index of its virtual parent, -1 for the segment top
    vt_kind[i]    0 = an occurrence of the label (leaf)
                  1 = fact node where occurrences diverge (sum of masses)
                  2 = action node where occurrences diverge (noisy-or)
    seg_end[s]    one past the last index of segment s; its top is seg_end[s] - 1
"""
from __future__ import annotations

import numpy as np

FACT = 0

LEAF, FACT_LCA, ACTION_LCA = 0, 1, 2


def preorder(child_start, n_children):
    """Preorder rank ``tin`` and subtree end ``tout`` for every node."""
    cs = child_start.tolist()
    nc = n_children.tolist()
    n = len(cs)
    tin = [0] * n
    tout = [0] * n
    if n == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    t = 0
    stack = [(0, False)]
    while stack:
        node, done = stack.pop()
        if done:
            tout[node] = t
            continue
        tin[node] = t
        t += 1
        stack.append((node, True))
        s = cs[node]
        if s >= 0:
            for c in range(s + nc[node] - 1, s - 1, -1):
                stack.append((c, False))
    return np.asarray(tin, np.int64), np.asarray(tout, np.int64)


def _lca(u, v, parent, depth):
    while depth[u] > depth[v]:
        u = parent[u]
    while depth[v] > depth[u]:
        v = parent[v]
    while u != v:
        u = parent[u]
        v = parent[v]
    return u


def build_virtual(order, seg_bounds, parent, depth, kind):
    """Virtual trees of every label segment.

    ``order`` lists fact-node ids grouped by label and sorted by preorder rank
    within a group; ``seg_bounds`` has len(segments) + 1 offsets into it.
    Each group is scanned once, comparing adjacent occurrences to find where
    their root paths diverge; the stack discipline emits nodes in post-order.
    """
    order = order.tolist()
    bounds = seg_bounds.tolist()
    par = parent.tolist()
    dep = depth.tolist()
    knd = kind.tolist()
    vt_node: list[int] = []
    vt_parent_node: list[int] = []
    vt_kind: list[int] = []
    seg_end: list[int] = []
    for s in range(len(bounds) - 1):
        a, b = bounds[s], bounds[s + 1]
        seg_first = len(vt_node)
        emitted: dict[int, int] = {}
        links: list[tuple[int, int]] = []  # (child node, parent node)

        def emit(node, is_leaf):
            emitted[node] = len(vt_node)
            vt_node.append(node)
            vt_kind.append(LEAF if is_leaf else (FACT_LCA if knd[node] == FACT else ACTION_LCA))
            vt_parent_node.append(-1)

        leaves = set(order[a:b])
        stack = [order[a]]
        for v in order[a + 1:b]:
            w = _lca(v, stack[-1], par, dep)
            if w != stack[-1]:
                while len(stack) >= 2 and dep[stack[-2]] >= dep[w]:
                    top = stack.pop()
                    emit(top, top in leaves)
                    links.append((top, stack[-1]))
                if stack[-1] != w:
                    top = stack.pop()
                    emit(top, top in leaves)
                    links.append((top, w))
                    stack.append(w)
            stack.append(v)
        while len(stack) >= 2:
            top = stack.pop()
            emit(top, top in leaves)
            links.append((top, stack[-1]))
        emit(stack[0], stack[0] in leaves)
        for child, p in links:
            vt_parent_node[emitted[child]] = p
        for i in range(seg_first, len(vt_node)):
            p = vt_parent_node[i]
            vt_parent_node[i] = emitted[p] if p >= 0 else -1
        seg_end.append(len(vt_node))
    return (
        np.asarray(vt_node, np.int32),
        np.asarray(vt_parent_node, np.int32),
        np.asarray(vt_kind, np.int8),
        np.asarray(seg_end, np.int64),
    )


def evaluate(parent, kind, label, xi, in_state, vt_node, vt_parent, vt_kind, seg_end):
    """Relevance of every segment's label in the tree truncated at ``in_state``.

    A node is cut when a strict ancestor fact node has its label set in
    ``in_state``. Leaves contribute their xi when not cut; a fact divergence
    point adds up its children's masses; an action divergence point combines
    its children as ``xi(a) * (1 - prod(1 - mass / xi(a)))``.
    """
    par = parent.tolist()
    knd = kind.tolist()
    lab = label.tolist()
    xs = xi.tolist()
    st = in_state.tolist()
    n = len(par)
    alive = [True] * n
    for i in range(1, n):
        p = par[i]
        alive[i] = alive[p] and not (knd[p] == FACT and st[lab[p]])
    vn = vt_node.tolist()
    vp = vt_parent.tolist()
    vk = vt_kind.tolist()
    m = len(vn)
    acc = [1.0 if k == ACTION_LCA else 0.0 for k in vk]
    mass = [0.0] * m
    for i in range(m):
        k = vk[i]
        node = vn[i]
        if k == LEAF:
            v = xs[node] if alive[node] else 0.0
        elif k == FACT_LCA:
            v = acc[i]
        else:
            v = xs[node] * (1.0 - acc[i])
        mass[i] = v
        p = vp[i]
        if p >= 0:
            if vk[p] == ACTION_LCA:
                acc[p] *= 1.0 - v / xs[vn[p]]
            else:
                acc[p] += v
    out = np.empty(len(seg_end), np.float64)
    for s, e in enumerate(seg_end.tolist()):
        out[s] = min(1.0, max(0.0, mass[e - 1]))
    return out
