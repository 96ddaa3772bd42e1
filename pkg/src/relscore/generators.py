"""Small synthetic tasks for tests, oracles and benchmarks."""
from __future__ import annotations

import random

from .pddl.task import Task, make_task


def chain_task(k: int) -> Task:
    """g <- f_{k-1} <- ... <- f_0, each fact with exactly one achiever."""
    facts = [f"(f{i})" for i in range(k)] + ["(g)"]
    acts = [("mk-f0", [], ["(f0)"])]
    for i in range(1, k):
        acts.append((f"mk-f{i}", [f"(f{i - 1})"], [f"(f{i})"]))
    acts.append(("mk-g", [f"(f{k - 1})"] if k else [], ["(g)"]))
    return make_task(facts, acts, [], ["(g)"], name=f"chain-{k}")


def diamond_task() -> Task:
    """Two equally likely ways to g, one through p and one through q."""
    facts = ["(g)", "(p)", "(q)"]
    acts = [
        ("via-p", ["(p)"], ["(g)"]),
        ("via-q", ["(q)"], ["(g)"]),
        ("mk-p", [], ["(p)"]),
        ("mk-q", [], ["(q)"]),
    ]
    return make_task(facts, acts, [], ["(g)"], name="diamond")


def example_task() -> Task:
    facts = ["(g)", "(p1)", "(p2)"]
    acts = [
        ("a1", ["(p1)"], ["(g)"]),
        ("a2", ["(p1)", "(p2)"], ["(g)"]),
        ("a3", ["(p1)", "(p2)"], ["(g)"]),
        ("make-p1", [], ["(p1)"]),
        ("make-p2", [], ["(p2)"]),
    ]
    return make_task(facts, acts, [], ["(g)"], name="example")


def random_task(seed: int, n_facts: int = 7, n_actions: int = 9, n_init: int = 1,
                n_goal: int = 2, max_pre: int = 2, max_add: int = 2,
                deletes: bool = True) -> Task:
    """Random STRIPS task; may be unsolvable and may contain cycles."""
    r = random.Random(seed)
    facts = [f"(f{i})" for i in range(n_facts)]
    ids = list(range(n_facts))
    acts = []
    for j in range(n_actions):
        pre = r.sample(ids, r.randint(0, max_pre))
        add = r.sample([i for i in ids if i not in pre] or ids, r.randint(1, max_add))
        dele = []
        if deletes and r.random() < 0.4:
            dele = r.sample([i for i in ids if i not in add], 1)
        acts.append((f"a{j}", pre, (), add, dele))
    init = r.sample(ids, n_init)
    goal = r.sample([i for i in ids if i not in init], n_goal)
    return make_task(facts, acts, init, goal, name=f"random-{seed}")


def layered_task(seed: int, layers: int = 3, width: int = 3, per_fact: int = 2,
                 max_pre: int = 2, n_goal: int = 2) -> Task:
    """Acyclic task: layer-0 facts form I, layer-k achievers need layer-(k-1) facts.

    Every leaf of the backtracking tree is an initial fact, so every sampled
    subtree is a relaxed plan.
    """
    r = random.Random(seed)
    names = [[f"(l{k}-{i})" for i in range(width)] for k in range(layers + 1)]
    facts = [f for layer in names for f in layer]
    acts = []
    for k in range(1, layers + 1):
        for i, f in enumerate(names[k]):
            for j in range(r.randint(1, per_fact)):
                pre = r.sample(names[k - 1], r.randint(1, min(max_pre, width)))
                acts.append((f"mk-{k}-{i}-{j}", pre, [f]))
    goal = r.sample(names[layers], min(n_goal, width))
    return make_task(facts, acts, names[0], goal, name=f"layered-{seed}")
