"""Relevance scores from a (partially) explored backtracking tree.

For a fact ``l`` the occurrences ``L(l)`` are sorted by their root paths; the
points where adjacent paths diverge are the lowest common ancestors of the
occurrences. Together with the occurrences they form a small "virtual tree"
per fact, which is all that is needed to evaluate

    Xi(l) = sum_{fLCAs} xi(n) + sum_{aLCAs} xi(a) * Xi(l, a)
    Xi(l, a) = 1 - prod_{c in children(a)} (1 - Xi(l, c))

bottom-up. The virtual trees are built once per tree; a state only changes
which occurrences survive truncation, so per-state evaluation is a single
linear pass (see ``kernels``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels as _kernels
from .pddl.task import State, mask_of
from .tree import FACT, PartialTree

_LEAF, _FACT_LCA, _ACTION_LCA = 0, 1, 2


def round_half_up(x: float) -> int:
    # the epsilon absorbs summation error on exact halves
    return int(math.floor(x + 0.5 + 1e-9))


def state_vector(state: State, n_facts: int) -> np.ndarray:
    """uint8 membership vector of length ``n_facts`` for a bitset state."""
    nbytes = max(1, (n_facts + 7) // 8)
    raw = np.frombuffer(state.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n_facts]


@dataclass(frozen=True)
class LcaIndex:
    """Per-fact decomposition used by the relevance computation."""

    fact: int
    nodes: tuple[int, ...]  # L(l) in path order
    signatures: tuple[tuple[int, ...], ...]  # root-to-node label sequences
    alcas: frozenset  # action nodes where occurrences diverge
    flcas: frozenset  # occurrences not below any aLCA
    vt_node: tuple[int, ...]  # virtual tree, post-order
    vt_parent: tuple[int, ...]
    vt_kind: tuple[int, ...]


class RelevanceTable:
    """Global and state-aware relevance for every fact of a tree's task."""

    def __init__(self, tree: PartialTree, backend: Optional[str] = None):
        self.tree = tree
        self.task = tree.task
        self.n_facts = len(self.task.facts)
        k = _kernels.get(backend) if backend else _kernels.get()
        self.backend = backend or _kernels.BACKEND
        self._k = k
        arr = tree.arrays()
        self._parent = arr["parent"]
        self._kind = arr["kind"]
        self._label = arr["label"]
        self._xi = arr["xi"]
        self.tin, self.tout = k.preorder(arr["child_start"], arr["n_children"])

        fact_ids = np.nonzero(self._kind == FACT)[0].astype(np.int32)
        labels = self._label[fact_ids]
        perm = np.lexsort((self.tin[fact_ids], labels))
        order = fact_ids[perm]
        sorted_labels = labels[perm]
        if len(order):
            starts = np.flatnonzero(np.r_[True, sorted_labels[1:] != sorted_labels[:-1]])
        else:
            starts = np.zeros(0, dtype=np.int64)
        self.seg_fact = sorted_labels[starts].astype(np.int64)
        self._seg_bounds = np.r_[starts, len(order)].astype(np.int64)
        self._order = order
        (self.vt_node, self.vt_parent, self.vt_kind, self.seg_end) = k.build_virtual(
            order, self._seg_bounds, self._parent, arr["depth"], self._kind
        )
        self._seg_of_fact = {int(f): s for s, f in enumerate(self.seg_fact.tolist())}
        goal = self.task.original_goal
        self._goal_mask = mask_of(goal)
        self.xi_global = self.scores(0)

    # ------------------------------------------------------------ scoring

    def scores(self, state: State = 0) -> np.ndarray:
        """Xi_sigma(l) for every fact id (zeros for facts absent from the tree)."""
        vec = state_vector(state, self.n_facts)
        seg = self._k.evaluate(
            self._parent, self._kind, self._label, self._xi, vec,
            self.vt_node, self.vt_parent, self.vt_kind, self.seg_end,
        )
        out = np.zeros(self.n_facts, dtype=np.float64)
        out[self.seg_fact] = seg
        return out

    def raw_h(self, state: State) -> float:
        """Unrounded sum of Xi_sigma(l) over facts not true in ``state``."""
        if state & self._goal_mask == self._goal_mask:
            return 0.0
        sc = self.scores(state)
        vec = state_vector(state, self.n_facts)
        return float(sc[vec == 0].sum())

    def h(self, state: State) -> int:
        return round_half_up(self.raw_h(state))

    def xi(self, fact) -> float:
        return float(self.xi_global[self._fid(fact)])

    def xi_sigma(self, fact, state: State) -> float:
        return float(self.scores(state)[self._fid(fact)])

    def _fid(self, fact) -> int:
        if isinstance(fact, (int, np.integer)):
            return int(fact)
        return self.task.fact_id(fact)

    # ---------------------------------------------------------- inspection

    def entry(self, fact) -> LcaIndex:
        fid = self._fid(fact)
        s = self._seg_of_fact.get(fid)
        if s is None:
            return LcaIndex(fid, (), (), frozenset(), frozenset(), (), (), ())
        a, b = int(self._seg_bounds[s]), int(self._seg_bounds[s + 1])
        nodes = tuple(int(x) for x in self._order[a:b])
        lo = int(self.seg_end[s - 1]) if s > 0 else 0
        hi = int(self.seg_end[s])
        vn = tuple(int(x) for x in self.vt_node[lo:hi])
        vp = tuple(int(x) - lo if x >= 0 else -1 for x in self.vt_parent[lo:hi])
        vk = tuple(int(x) for x in self.vt_kind[lo:hi])
        alcas = frozenset(vn[i] for i in range(len(vn)) if vk[i] == _ACTION_LCA)
        flcas = set()
        for i in range(len(vn)):
            if vk[i] != _LEAF:
                continue
            p = vp[i]
            under_action = False
            while p >= 0:
                if vk[p] == _ACTION_LCA:
                    under_action = True
                    break
                p = vp[p]
            if not under_action:
                flcas.add(vn[i])
        sigs = tuple(path_signature(self.tree, n) for n in nodes)
        return LcaIndex(fid, nodes, sigs, alcas, frozenset(flcas), vn, vp, vk)

    def decomposition(self, fact) -> dict:
        """Xi(l) split into its fLCA and top-level aLCA terms (for auditing)."""
        e = self.entry(fact)
        xi = self.tree.xi
        terms = {"fact": str(self.task.facts[e.fact]), "xi": self.xi(e.fact), "flcas": [], "alcas": []}
        for n in sorted(e.flcas):
            terms["flcas"].append({"node": n, "xi": xi[n]})
        top_alcas = []
        for i, n in enumerate(e.vt_node):
            if e.vt_kind[i] != _ACTION_LCA:
                continue
            p = e.vt_parent[i]
            nested = False
            while p >= 0:
                if e.vt_kind[p] == _ACTION_LCA:
                    nested = True
                    break
                p = e.vt_parent[p]
            if not nested:
                top_alcas.append(n)
        for n in sorted(top_alcas):
            terms["alcas"].append({
                "node": n,
                "label": self.tree.label_str(n),
                "xi": xi[n],
                "local": local_relevance(self.tree, e.fact, n),
            })
        return terms

    def dump(self) -> str:
        """Deterministic text table: ``fact_id xi fact``, one line per fact."""
        lines = ["# relscore relevance v1: fact_id xi fact"]
        for fid in range(self.n_facts):
            lines.append(f"{fid} {float(self.xi_global[fid])!r} {self.task.facts[fid]}")
        return "\n".join(lines) + "\n"


def path_signature(tree: PartialTree, node: int) -> tuple[int, ...]:
    """Root-to-node label sequence (kinds alternate with depth, root first)."""
    label = tree.label
    return tuple(label[n] for n in reversed(tree.path(node)))


def local_relevance(tree: PartialTree, fact: int, node: int) -> float:
    """Xi(l, n) by the direct recursion over the subtree of ``node``."""
    kind, label = tree.kind, tree.label
    memo: dict[int, float] = {}
    for n in reversed(tree.descendants(node)):
        if kind[n] == FACT and label[n] == fact:
            memo[n] = 1.0
            continue
        ch = tree.children(n)
        if not ch:
            memo[n] = 0.0
        elif kind[n] == FACT:
            memo[n] = sum(memo[c] for c in ch) / len(ch)
        else:
            p = 1.0
            for c in ch:
                p *= 1.0 - memo[c]
            memo[n] = 1.0 - p
    return memo[node]


# ------------------------------------------------------------------ API


def build_lca_index(tree: PartialTree, fact) -> LcaIndex:
    return RelevanceTable(tree).entry(fact)


def xi_of_label(tree: PartialTree, table: Optional[RelevanceTable], fact) -> float:
    table = table if table is not None else RelevanceTable(tree)
    return table.xi(fact)


@dataclass(frozen=True)
class TruncatedView:
    """The tree with descendants of state-true fact nodes cut away."""

    tree: PartialTree
    state: State
    alive: np.ndarray  # bool per node

    def nodes(self) -> set[int]:
        return set(np.flatnonzero(self.alive).tolist())

    def is_leaf(self, node: int) -> bool:
        t = self.tree
        if t.kind[node] == FACT and (self.state >> t.label[node]) & 1:
            return True
        ch = t.children(node)
        return not ch


def truncate_view(tree: PartialTree, state: State) -> TruncatedView:
    arr = tree.arrays()
    n = len(tree)
    vec = state_vector(state, len(tree.task.facts))
    parent, kind, label = arr["parent"], arr["kind"], arr["label"]
    alive = np.ones(n, dtype=bool)
    is_fact = kind == FACT
    cut = np.zeros(n, dtype=bool)
    cut[is_fact] = vec[label[is_fact]] == 1
    for i in range(1, n):
        p = parent[i]
        alive[i] = alive[p] and not cut[p]
    return TruncatedView(tree, state, alive)


def h_relevance(tree: PartialTree, table: Optional[RelevanceTable], state: State) -> int:
    table = table if table is not None else RelevanceTable(tree)
    return table.h(state)


class RelevanceHeuristic:
    """Search-time wrapper: ``h(state)`` with a per-state cache."""

    name = "relevance"

    def __init__(self, table: RelevanceTable):
        self.table = table
        self._cache: dict[int, int] = {}
        self.evaluations = 0

    def initial_data(self, state: State):
        return None

    def child_data(self, parent_data, state: State):
        return None

    def __call__(self, state: State, data=None) -> int:
        h = self._cache.get(state)
        if h is None:
            self.evaluations += 1
            h = self.table.h(state)
            self._cache[state] = h
        return h


__all__ = [
    "LcaIndex", "RelevanceTable", "RelevanceHeuristic", "TruncatedView",
    "build_lca_index", "xi_of_label", "truncate_view", "h_relevance",
    "local_relevance", "path_signature", "round_half_up", "state_vector",
]
