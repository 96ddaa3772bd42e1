"""Partial exploration of the backtracking tree by xi-weighted depth-first dives."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

from .pddl.task import Task
from .rng import Rng
from .tree import PartialTree, init_tree

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExploreConfig:
    rho: float = 0.2
    min_nodes: int = 100_000
    max_nodes: int = 2_000_000
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.rho <= 1.0:
            raise ValueError(f"rho must be in (0, 1], got {self.rho}")
        if self.min_nodes > self.max_nodes:
            raise ValueError("min_nodes must not exceed max_nodes")


def sumxi(tree: PartialTree, nodes: Iterable[int]) -> float:
    xi = tree.xi
    return sum(xi[n] for n in nodes)


def choose(tree: PartialTree, options: Sequence[int], rng: Rng) -> int:
    """Draw one option with probability proportional to its xi."""
    if not options:
        raise ValueError("choose() needs at least one option")
    if len(options) == 1:
        return options[0]
    xi = tree.xi
    total = 0.0
    for n in options:
        total += xi[n]
    u = rng.uniform() * total
    acc = 0.0
    for n in options:
        acc += xi[n]
        if u < acc:
            return n
    return options[-1]


class Explorer:
    """Stateful exploration so callers can step one dive at a time."""

    def __init__(self, task: Task, cfg: ExploreConfig = ExploreConfig()):
        self.cfg = cfg
        self.tree = init_tree(task)
        self.rng = Rng(cfg.seed)
        self.dives = 0
        self.capped = False

    def ratio(self) -> float:
        t = self.tree
        return t.frontier_xi() / t.xi_total if t.xi_total > 0 else 0.0

    def should_continue(self) -> bool:
        t = self.tree
        if not t.frontier:
            return False
        if len(t) >= self.cfg.max_nodes:
            if not self.capped:
                log.warning("exploration stopped at max_nodes=%d (ratio %.3f)", self.cfg.max_nodes, self.ratio())
            self.capped = True
            return False
        return len(t) < self.cfg.min_nodes or self.ratio() > self.cfg.rho

    def dive(self) -> int:
        """One dive; returns the number of nodes added."""
        t = self.tree
        before = len(t)
        w = t.frontier_weights
        n = w.find(self.rng.uniform() * w.total())
        cap = self.cfg.max_nodes
        while True:
            kids = t.enumerate_children(n)
            if not kids or len(t) >= cap:
                break
            # siblings share one xi, so the proportional draw is uniform
            n = kids[self.rng.below(len(kids))]
        self.dives += 1
        return len(t) - before

    def run(self) -> PartialTree:
        while self.should_continue():
            self.dive()
        t = self.tree
        t.meta = {
            "dives": self.dives,
            "nodes": len(t),
            "ratio": self.ratio(),
            "capped": self.capped,
            "exhausted": not t.frontier,
            "seed": self.cfg.seed,
            "rho": self.cfg.rho,
        }
        log.info("explored %d nodes in %d dives (ratio %.4f)", len(t), self.dives, self.ratio())
        return t


def explore(task: Task, cfg: ExploreConfig = ExploreConfig()) -> PartialTree:
    return Explorer(task, cfg).run()


def explore_fully(task: Task, max_nodes: int = 200_000, seed: int = 0) -> PartialTree:
    """Explore until the frontier is empty; raises if ``max_nodes`` is hit."""
    ex = Explorer(task, ExploreConfig(rho=1.0, min_nodes=max_nodes, max_nodes=max_nodes, seed=seed))
    tree = ex.run()
    if tree.frontier:
        raise RuntimeError(f"tree has more than {max_nodes} nodes; not fully explorable")
    return tree
