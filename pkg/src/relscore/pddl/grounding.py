"""Instantiate action schemas over type-compatible object tuples."""
from __future__ import annotations

from itertools import product
from math import prod

from .parser import ROOT_TYPE, DomainAst, Literal, PDDLError, ProblemAst, _is_subtype, check_problem
from .task import Fact, GroundAction, Task

DEFAULT_ACTION_CAP = 5_000_000


class GroundingError(PDDLError):
    def __init__(self, message: str, count: int = 0):
        super().__init__(message)
        self.count = count


def objects_by_type(domain: DomainAst, objects: dict[str, str]) -> dict[str, list[str]]:
    """Map every declared type to the sorted objects that are instances of it."""
    out: dict[str, list[str]] = {ROOT_TYPE: sorted(objects)}
    for t in domain.types:
        out[t] = sorted(o for o, ot in objects.items() if _is_subtype(domain.types, ot, t))
    return out


def _bind(lit: Literal, binding: dict) -> tuple[str, ...]:
    return tuple(binding.get(a, a) for a in lit.args)


def ground(domain: DomainAst, problem: ProblemAst, max_actions: int = DEFAULT_ACTION_CAP) -> Task:
    """Ground ``problem`` over ``domain`` into a Task.

    Every schema is instantiated over all type-compatible parameter tuples;
    tuples violating an equality constraint, or whose positive and negative
    preconditions contradict, are dropped. Fact and action order is the
    lexicographic order of their names, so equal inputs give identical tasks.
    Raises GroundingError with the tuple count if it would exceed
    ``max_actions``.
    """
    objects = check_problem(domain, problem)
    by_type = objects_by_type(domain, objects)

    total = 0
    for schema in domain.actions:
        total += prod(len(by_type[p.type]) for p in schema.params)
    if total > max_actions:
        raise GroundingError(
            f"grounding would create {total} actions (cap {max_actions})", count=total
        )

    raw: list[tuple] = []
    for schema in domain.actions:
        names = [p.name for p in schema.params]
        eq = [l for l in schema.precondition if l.predicate == "="]
        pre = [l for l in schema.precondition if l.predicate != "="]
        for combo in product(*(by_type[p.type] for p in schema.params)):
            binding = dict(zip(names, combo))
            ok = True
            for l in eq:
                a, b = _bind(l, binding)
                if (a == b) != l.positive:
                    ok = False
                    break
            if not ok:
                continue
            pp = {Fact(l.predicate, _bind(l, binding)) for l in pre if l.positive}
            pn = {Fact(l.predicate, _bind(l, binding)) for l in pre if not l.positive}
            if pp & pn:
                continue
            ep = {Fact(l.predicate, _bind(l, binding)) for l in schema.effect if l.positive}
            en = {Fact(l.predicate, _bind(l, binding)) for l in schema.effect if not l.positive}
            # add-after-delete: an atom both added and deleted ends up true
            en -= ep
            raw.append((schema.name, tuple(combo), pp, pn, ep, en))

    init = {Fact(l.predicate, l.args) for l in problem.init}
    goal = {Fact(l.predicate, l.args) for l in problem.goal}
    universe = set(init) | goal
    for _, _, pp, pn, ep, en in raw:
        universe |= pp | pn | ep | en
    facts = tuple(sorted(universe))
    idx = {f: i for i, f in enumerate(facts)}

    def ids(s):
        return frozenset(idx[f] for f in s)

    raw.sort(key=lambda r: (r[0], r[1]))
    actions = tuple(GroundAction(n, args, ids(pp), ids(pn), ids(ep), ids(en)) for n, args, pp, pn, ep, en in raw)
    return Task(facts, actions, ids(init), ids(goal), name=problem.name)


def count_type_valid_tuples(domain: DomainAst, problem: ProblemAst) -> int:
    """Number of parameter tuples grounding would consider (before filtering)."""
    objects = check_problem(domain, problem)
    by_type = objects_by_type(domain, objects)
    return sum(prod(len(by_type[p.type]) for p in s.params) for s in domain.actions)
