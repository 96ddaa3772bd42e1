"""Independent checks of relevance scores on small, fully explored trees.

Three routes, none of which uses lowest common ancestors:

* ``sample_subtree`` / ``estimate_relevance``: Monte-Carlo simulation of the
  non-deterministic agent (pick one achiever per fact uniformly, require
  every precondition of a picked action).
* ``enumerate_relevance``: exact joint-outcome enumeration. Each node yields
  the distribution over *sets of fact labels* its sampled subtree contains;
  fact nodes mix their children uniformly, action nodes take the product.
* ``recursive_relevance``: the plain fact-mean / action-noisy-or recursion,
  in exact rationals.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .pddl.task import State
from .rng import Rng
from .tree import FACT, PartialTree

MAX_CHOICE_POINTS = 20


class OracleLimitError(RuntimeError):
    pass


@dataclass(frozen=True)
class SampledSubtree:
    nodes: tuple[int, ...]
    seed: int

    def labels(self, tree: PartialTree) -> set[int]:
        kind, label = tree.kind, tree.label
        return {label[n] for n in self.nodes if kind[n] == FACT}


def _truncated(tree: PartialTree, node: int, state: State) -> bool:
    return tree.kind[node] == FACT and state and (state >> tree.label[node]) & 1


def _require_full(tree: PartialTree) -> None:
    if tree.frontier:
        raise OracleLimitError("oracle needs a fully explored tree")


def sample_subtree(tree: PartialTree, rng: Rng, state: State = 0) -> SampledSubtree:
    """One draw of the agent's partial plan, walking the tree with a stack.

    Fact nodes with no children (unachievable, or cut by ``state``) are kept
    as leaves and the walk continues.
    """
    _require_full(tree)
    kind, cs, nc = tree.kind, tree.child_start, tree.n_children
    out = [0]
    stack = [0]
    while stack:
        n = stack.pop()
        k = nc[n]
        if k == 0 or (state and _truncated(tree, n, state)):
            continue
        s = cs[n]
        if kind[n] == FACT:
            m = s + rng.below(k)
            stack.append(m)
            out.append(m)
        else:
            for m in range(s, s + k):
                stack.append(m)
                out.append(m)
    return SampledSubtree(tuple(out), rng.seed)


def _sample_labels(tree: PartialTree, rng: Rng, state: State) -> set[int]:
    kind, label, cs, nc = tree.kind, tree.label, tree.child_start, tree.n_children
    seen = set()
    stack = [0]
    below = rng.below
    while stack:
        n = stack.pop()
        if kind[n] == FACT:
            lab = label[n]
            seen.add(lab)
            k = nc[n]
            if k == 0 or (state >> lab) & 1:
                continue
            stack.append(cs[n] + below(k))
        else:
            s = cs[n]
            stack.extend(range(s, s + nc[n]))
    return seen


def estimate_all(tree: PartialTree, n_samples: int, rng: Rng, state: State = 0) -> dict[int, float]:
    """Empirical relevance of every fact label over ``n_samples`` draws."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    _require_full(tree)
    counts: Counter = Counter()
    for _ in range(n_samples):
        counts.update(_sample_labels(tree, rng, state))
    return {f: c / n_samples for f, c in counts.items()}


def estimate_relevance(tree: PartialTree, fact, n_samples: int, rng: Rng, state: State = 0) -> float:
    fid = fact if isinstance(fact, int) else tree.task.fact_id(fact)
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    _require_full(tree)
    hits = 0
    for _ in range(n_samples):
        if fid in _sample_labels(tree, rng, state):
            hits += 1
    return hits / n_samples


def subtree_frequencies(tree: PartialTree, n_samples: int, rng: Rng) -> Counter:
    """How often each distinct sampled subtree (as a node set) came up."""
    c: Counter = Counter()
    for _ in range(n_samples):
        c[frozenset(sample_subtree(tree, rng).nodes)] += 1
    return c


def choice_points(tree: PartialTree, state: State = 0) -> int:
    return sum(
        1 for n in range(len(tree))
        if tree.kind[n] == FACT and tree.n_children[n] >= 2 and not _truncated(tree, n, state)
    )


def _check_size(tree: PartialTree, state: State, limit: int) -> None:
    _require_full(tree)
    cp = choice_points(tree, state)
    if cp > limit:
        raise OracleLimitError(
            f"{cp} choice points exceed the exact-enumeration limit of {limit}; "
            "use estimate_relevance (Monte-Carlo) instead"
        )


def subtree_distribution(tree: PartialTree, state: State = 0,
                         limit: int = MAX_CHOICE_POINTS) -> dict[frozenset, Fraction]:
    """Exact distribution over the fact-label sets of sampled subtrees."""
    _check_size(tree, state, limit)
    kind, label = tree.kind, tree.label
    dist: dict[int, dict[frozenset, Fraction]] = {}
    for n in reversed(tree.preorder()):
        ch = tree.children(n)
        if kind[n] == FACT:
            own = frozenset((label[n],))
            if not ch or _truncated(tree, n, state):
                dist[n] = {own: Fraction(1)}
                continue
            w = Fraction(1, len(ch))
            d: dict[frozenset, Fraction] = {}
            for c in ch:
                for s, p in dist.pop(c).items():
                    key = s | own
                    d[key] = d.get(key, Fraction(0)) + p * w
            dist[n] = d
        else:
            d = {frozenset(): Fraction(1)}
            for c in ch or ():
                nd: dict[frozenset, Fraction] = {}
                for s1, p1 in d.items():
                    for s2, p2 in dist[c].items():
                        key = s1 | s2
                        nd[key] = nd.get(key, Fraction(0)) + p1 * p2
                d = nd
                del dist[c]
            dist[n] = d
    return dist[0]


def enumerate_all(tree: PartialTree, state: State = 0, limit: int = MAX_CHOICE_POINTS) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for s, p in subtree_distribution(tree, state, limit).items():
        for f in s:
            out[f] = out.get(f, Fraction(0)) + p
    return out


def enumerate_relevance(tree: PartialTree, fact, state: State = 0,
                        limit: int = MAX_CHOICE_POINTS) -> Fraction:
    fid = fact if isinstance(fact, int) else tree.task.fact_id(fact)
    return enumerate_all(tree, state, limit).get(fid, Fraction(0))


def recursive_relevance(tree: PartialTree, fact, state: State = 0,
                        node: Optional[int] = None) -> Fraction:
    """Exact Xi(l, node) by the direct mean / noisy-or recursion."""
    fid = fact if isinstance(fact, int) else tree.task.fact_id(fact)
    kind, label = tree.kind, tree.label
    start = 0 if node is None else node
    memo: dict[int, Fraction] = {}
    for n in reversed(tree.descendants(start)):
        if kind[n] == FACT and label[n] == fid:
            memo[n] = Fraction(1)
            continue
        ch = tree.children(n)
        if not ch or _truncated(tree, n, state):
            memo[n] = Fraction(0)
        elif kind[n] == FACT:
            memo[n] = sum((memo[c] for c in ch), Fraction(0)) / len(ch)
        else:
            p = Fraction(1)
            for c in ch:
                p *= 1 - memo[c]
            memo[n] = 1 - p
    return memo[start]
