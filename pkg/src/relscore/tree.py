"""Lazily grown backtracking tree over a relaxed, goal-compiled task.

Nodes live in an append-only arena of parallel lists indexed by node id.
The root is the ``achieveGoal`` action node; fact nodes have their achievers
as children and action nodes their positive preconditions. An achiever is
excluded below fact node ``f`` when one of its preconditions already labels
a fact node on ``path(f)``.

All children of a node are created in one go, so the choice probability
``xi`` of every node is exact the moment it exists:

    xi(root) = 1
    xi(fact)   = xi(parent)
    xi(action) = xi(parent) / len(children(parent))

Children of a node occupy a contiguous id range and are ordered by ascending
label id, which makes preorder rank equal to lexicographic order of
root-to-node label sequences.
"""
from __future__ import annotations

from typing import Iterator, Optional

import numpy as np

from .pddl.task import Task
from .sumtree import SumTree

FACT, ACTION, ROOT = 0, 1, 2
KIND_NAMES = {FACT: "fact", ACTION: "action", ROOT: "root"}


class TreeError(ValueError):
    pass


class PartialTree:
    def __init__(self, task: Task):
        if not (task.relaxed and task.goal_compiled):
            raise TreeError("the backtracking tree needs a relaxed, goal-compiled task")
        self.task = task
        self.kind: list[int] = []
        self.label: list[int] = []
        self.parent: list[int] = []
        self.xi: list[float] = []
        self.depth: list[int] = []
        # -1 while unenumerated
        self.child_start: list[int] = []
        self.n_children: list[int] = []
        self.fact_nodes: dict[int, list[int]] = {}
        self.action_nodes: dict[int, list[int]] = {}
        self.frontier: set[int] = set()
        self.frontier_weights = SumTree()
        self.xi_total = 0.0
        self._pre_masks = [a.pre_pos_mask for a in task.actions]
        self._pre_sorted = [tuple(sorted(a.pre_pos)) for a in task.actions]
        self._achievers = task.achievers
        self._frozen = None
        self.meta: dict = {}

    def __len__(self) -> int:
        return len(self.kind)

    # ---------------------------------------------------------------- growth

    def _new_node(self, kind: int, label: int, parent: int, xi: float) -> int:
        nid = len(self.kind)
        self.kind.append(kind)
        self.label.append(label)
        self.parent.append(parent)
        self.xi.append(xi)
        self.depth.append(0 if parent < 0 else self.depth[parent] + 1)
        self.child_start.append(-1)
        self.n_children.append(0)
        index = self.fact_nodes if kind == FACT else self.action_nodes
        index.setdefault(label, []).append(nid)
        self.frontier.add(nid)
        self.frontier_weights[nid] = xi
        self.xi_total += xi
        self._frozen = None
        return nid

    def path_fact_mask(self, node: int) -> int:
        """Bitset of fact labels on ``path(node)``."""
        m = 0
        kind, label, parent = self.kind, self.label, self.parent
        n = node
        while n >= 0:
            if kind[n] == FACT:
                m |= 1 << label[n]
            n = parent[n]
        return m

    def enumerate_children(self, node: int) -> range:
        """Create every child of ``node``; returns the new id range."""
        if self.child_start[node] != -1:
            raise TreeError(f"children of node {node} already enumerated")
        k = self.kind[node]
        if k == FACT:
            blocked = self.path_fact_mask(node)
            masks = self._pre_masks
            kids = [a for a in self._achievers[self.label[node]] if not masks[a] & blocked]
            ckind = ACTION
            cxi = self.xi[node] / len(kids) if kids else 0.0
        else:
            kids = self._pre_sorted[self.label[node]]
            ckind = FACT
            cxi = self.xi[node]
        start = len(self.kind)
        self.child_start[node] = start
        self.n_children[node] = len(kids)
        self.frontier.discard(node)
        self.frontier_weights[node] = 0.0
        for lab in kids:
            self._new_node(ckind, lab, node, cxi)
        self._frozen = None
        return range(start, start + len(kids))

    # ------------------------------------------------------------- queries

    def is_enumerated(self, node: int) -> bool:
        return self.child_start[node] != -1

    def children(self, node: int) -> Optional[range]:
        s = self.child_start[node]
        if s == -1:
            return None
        return range(s, s + self.n_children[node])

    def path(self, node: int) -> list[int]:
        out = []
        while node >= 0:
            out.append(node)
            node = self.parent[node]
        return out

    def descendants(self, node: int) -> list[int]:
        """``node`` and every node below it, in preorder."""
        out = []
        stack = [node]
        while stack:
            n = stack.pop()
            out.append(n)
            ch = self.children(n)
            if ch:
                stack.extend(reversed(ch))
        return out

    def nodes_with_label(self, label: int, kind: int = FACT) -> list[int]:
        """L(l): nodes carrying ``label`` (fact labels by default)."""
        index = self.fact_nodes if kind == FACT else self.action_nodes
        return list(index.get(label, ()))

    def frontier_xi(self) -> float:
        return self.frontier_weights.total()

    def is_exhausted(self) -> bool:
        return not self.frontier

    def label_str(self, node: int) -> str:
        if self.kind[node] == FACT:
            return str(self.task.facts[self.label[node]])
        return str(self.task.actions[self.label[node]])

    def iter_nodes(self) -> Iterator[int]:
        return iter(range(len(self.kind)))

    # ------------------------------------------------------------- arrays

    def arrays(self) -> dict:
        """numpy views of the arena, cached until the tree grows."""
        if self._frozen is None:
            self._frozen = {
                "kind": np.asarray(self.kind, dtype=np.int8),
                "label": np.asarray(self.label, dtype=np.int32),
                "parent": np.asarray(self.parent, dtype=np.int32),
                "xi": np.asarray(self.xi, dtype=np.float64),
                "depth": np.asarray(self.depth, dtype=np.int32),
                "child_start": np.asarray(self.child_start, dtype=np.int32),
                "n_children": np.asarray(self.n_children, dtype=np.int32),
            }
        return self._frozen

    def preorder(self) -> list[int]:
        """Node ids in preorder with children visited in id order."""
        return self.descendants(0) if self.kind else []

    # --------------------------------------------------------------- export

    def dump(self) -> str:
        """Text dump: one node per line, ``id kind parent xi label``.

        ``kind`` is ``root``, ``fact`` or ``action``, suffixed with ``*`` while
        the node is unenumerated (on the frontier); ``parent`` is -1 for the
        root; ``xi`` is written with ``repr`` so it round-trips exactly.
        """
        lines = ["# relscore tree v1: id kind parent xi label"]
        for n in range(len(self.kind)):
            k = KIND_NAMES[self.kind[n]]
            if self.child_start[n] == -1:
                k += "*"
            lines.append(f"{n} {k} {self.parent[n]} {self.xi[n]!r} {self.label_str(n)}")
        return "\n".join(lines) + "\n"


def init_tree(task: Task) -> PartialTree:
    """Root ``achieveGoal`` node with the goal facts already enumerated."""
    tree = PartialTree(task)
    root = tree._new_node(ROOT, task.goal_action_id, -1, 1.0)
    tree.enumerate_children(root)
    return tree


def enumerate_children(tree: PartialTree, node: int) -> list[int]:
    return list(tree.enumerate_children(node))


def path(tree: PartialTree, node: int) -> list[int]:
    return tree.path(node)


def load_dump(text: str) -> list[tuple]:
    """Parse a dump back into ``(id, kind, parent, xi, label, enumerated)`` rows."""
    rows = []
    for line in text.splitlines():
        if not line or line.startswith("#"):
            continue
        nid, kind, parent, xi, label = line.split(" ", 4)
        enumerated = not kind.endswith("*")
        rows.append((int(nid), kind.rstrip("*"), int(parent), float(xi), label, enumerated))
    return rows
