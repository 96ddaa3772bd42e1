"""Grounded STRIPS tasks and the transformations used by the heuristics.

Facts are interned to dense integer ids; a state is a Python ``int`` used as
a bitset over those ids (bit ``i`` set iff fact ``i`` is true).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

State = int

SUCCESS = "success"
ACHIEVE_GOAL = "achieveGoal"


class Fact(NamedTuple):
    predicate: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        return "(" + " ".join((self.predicate,) + self.args) + ")"


def parse_fact(text: str) -> Fact:
    """Parse ``"(on a b)"`` or ``"on a b"`` into a Fact."""
    parts = text.strip().strip("()").lower().split()
    if not parts:
        raise ValueError(f"empty fact {text!r}")
    return Fact(parts[0], tuple(parts[1:]))


def mask_of(ids: Iterable[int]) -> int:
    m = 0
    for i in ids:
        m |= 1 << i
    return m


def bits(mask: int) -> list[int]:
    """Ascending ids of the set bits of ``mask``."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@dataclass(frozen=True, eq=False)
class GroundAction:
    name: str
    args: tuple[str, ...]
    pre_pos: frozenset
    pre_neg: frozenset
    eff_pos: frozenset
    eff_neg: frozenset
    pre_pos_mask: int = field(init=False, repr=False)
    pre_neg_mask: int = field(init=False, repr=False)
    eff_pos_mask: int = field(init=False, repr=False)
    eff_neg_mask: int = field(init=False, repr=False)

    def __post_init__(self):
        if self.pre_pos & self.pre_neg:
            raise ValueError(f"{self}: contradictory preconditions")
        if self.eff_pos & self.eff_neg:
            raise ValueError(f"{self}: fact both added and deleted")
        object.__setattr__(self, "pre_pos_mask", mask_of(self.pre_pos))
        object.__setattr__(self, "pre_neg_mask", mask_of(self.pre_neg))
        object.__setattr__(self, "eff_pos_mask", mask_of(self.eff_pos))
        object.__setattr__(self, "eff_neg_mask", mask_of(self.eff_neg))

    @property
    def cost(self) -> int:
        return 1

    def _key(self):
        return (self.name, self.args, self.pre_pos, self.pre_neg, self.eff_pos, self.eff_neg)

    def __eq__(self, other):
        return isinstance(other, GroundAction) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __str__(self) -> str:
        return "(" + " ".join((self.name,) + self.args) + ")"


@dataclass(frozen=True, eq=False)
class Task:
    facts: tuple[Fact, ...]
    actions: tuple[GroundAction, ...]
    init: frozenset
    goal: frozenset
    relaxed: bool = False
    goal_compiled: bool = False
    name: str = ""

    def __post_init__(self):
        n = len(self.facts)
        for i in self.init | self.goal:
            if not 0 <= i < n:
                raise ValueError(f"fact id {i} outside the fact universe")

    def __eq__(self, other):
        if not isinstance(other, Task):
            return NotImplemented
        return (
            self.facts == other.facts
            and self.actions == other.actions
            and self.init == other.init
            and self.goal == other.goal
            and self.relaxed == other.relaxed
            and self.goal_compiled == other.goal_compiled
        )

    def __hash__(self):
        return hash((self.facts, self.init, self.goal, len(self.actions)))

    @cached_property
    def fact_index(self) -> dict:
        return {f: i for i, f in enumerate(self.facts)}

    @cached_property
    def init_state(self) -> State:
        return mask_of(self.init)

    @cached_property
    def goal_mask(self) -> int:
        return mask_of(self.goal)

    @cached_property
    def achievers(self) -> tuple[tuple[int, ...], ...]:
        """Per fact id, ascending ids of actions adding it."""
        out: list[list[int]] = [[] for _ in self.facts]
        for ai, a in enumerate(self.actions):
            for f in a.eff_pos:
                out[f].append(ai)
        return tuple(tuple(x) for x in out)

    @property
    def goal_action_id(self) -> int:
        if not self.goal_compiled:
            raise ValueError("task is not goal-compiled")
        return len(self.actions) - 1

    @property
    def original_goal(self) -> frozenset:
        """The goal before ``achieveGoal`` compilation."""
        if self.goal_compiled:
            return self.actions[self.goal_action_id].pre_pos
        return self.goal

    def fact_id(self, fact) -> int:
        if isinstance(fact, str):
            fact = parse_fact(fact)
        return self.fact_index[fact]

    def state(self, facts: Iterable) -> State:
        ids = []
        for f in facts:
            ids.append(f if isinstance(f, int) else self.fact_id(f))
        return mask_of(ids)

    def facts_of(self, s: State) -> list[Fact]:
        return [self.facts[i] for i in bits(s)]

    def is_goal(self, s: State) -> bool:
        return s & self.goal_mask == self.goal_mask

    def summary(self) -> str:
        return f"|F|={len(self.facts)} |A|={len(self.actions)} |I|={len(self.init)} |G|={len(self.goal)}"


# --------------------------------------------------------------------------
# semantics


def applicable(a: GroundAction, s: State) -> bool:
    return (s & a.pre_pos_mask) == a.pre_pos_mask and not (s & a.pre_neg_mask)


class InapplicableActionError(ValueError):
    pass


def apply(a: GroundAction, s: State) -> State:
    if not applicable(a, s):
        raise InapplicableActionError(f"{a} is not applicable")
    return (s & ~a.eff_neg_mask) | a.eff_pos_mask


def apply_sequence(actions: Sequence[GroundAction], s: State) -> State:
    for a in actions:
        s = apply(a, s)
    return s


def is_plan(task: Task, plan: Sequence[GroundAction]) -> bool:
    s = task.init_state
    for a in plan:
        if not applicable(a, s):
            return False
        s = (s & ~a.eff_neg_mask) | a.eff_pos_mask
    return task.is_goal(s)


# --------------------------------------------------------------------------
# transformations


def delete_relax(task: Task) -> Task:
    """Drop negative preconditions and delete effects of every action."""
    if task.relaxed:
        return task
    empty = frozenset()
    acts = tuple(
        GroundAction(a.name, a.args, a.pre_pos, empty, a.eff_pos, empty) for a in task.actions
    )
    return replace(task, actions=acts, relaxed=True)


class GoalCompilationError(ValueError):
    pass


def add_goal_action(task: Task) -> Task:
    """Add ``success`` and the ``achieveGoal`` action; the goal becomes {success}."""
    if task.goal_compiled:
        raise GoalCompilationError("task is already goal-compiled")
    success = Fact(SUCCESS)
    if success in task.fact_index:
        raise GoalCompilationError(f"fact {success} already exists in the task")
    sid = len(task.facts)
    goal_act = GroundAction(ACHIEVE_GOAL, (), task.goal, frozenset(), frozenset({sid}), frozenset())
    return replace(
        task,
        facts=task.facts + (success,),
        actions=task.actions + (goal_act,),
        goal=frozenset({sid}),
        goal_compiled=True,
    )


def relaxed_reachable(task: Task, init: Iterable[int] | None = None,
                      banned_actions: frozenset = frozenset()) -> tuple[set, set]:
    """Facts and actions reachable from ``init`` ignoring delete effects."""
    reached = set(task.init if init is None else init)
    missing = [len(a.pre_pos) for a in task.actions]
    by_pre: list[list[int]] = [[] for _ in task.facts]
    for ai, a in enumerate(task.actions):
        for f in a.pre_pos:
            by_pre[f].append(ai)
    queue = list(reached)
    fired: set[int] = set()
    for ai, a in enumerate(task.actions):
        if missing[ai] == 0 and ai not in banned_actions:
            fired.add(ai)
            for f in a.eff_pos:
                if f not in reached:
                    reached.add(f)
                    queue.append(f)
    while queue:
        f = queue.pop()
        for ai in by_pre[f]:
            missing[ai] -= 1
            if missing[ai] == 0 and ai not in banned_actions:
                fired.add(ai)
                for g in task.actions[ai].eff_pos:
                    if g not in reached:
                        reached.add(g)
                        queue.append(g)
    return reached, fired


def prune_unreachable(task: Task) -> Task:
    """Remove actions not reachable from the initial state under delete relaxation.

    Facts are restricted to those still mentioned by an action, the initial
    state or the goal; relative order of the surviving facts and actions is kept.
    """
    _, fired = relaxed_reachable(task)
    keep = [a for ai, a in enumerate(task.actions) if ai in fired]
    used = set(task.init) | set(task.goal)
    for a in keep:
        used |= a.pre_pos | a.pre_neg | a.eff_pos | a.eff_neg
    order = sorted(used)
    remap = {old: new for new, old in enumerate(order)}

    def rm(s):
        return frozenset(remap[i] for i in s)

    acts = tuple(
        GroundAction(a.name, a.args, rm(a.pre_pos), rm(a.pre_neg), rm(a.eff_pos), rm(a.eff_neg))
        for a in keep
    )
    return replace(
        task,
        facts=tuple(task.facts[i] for i in order),
        actions=acts,
        init=rm(task.init),
        goal=rm(task.goal),
    )


def make_task(facts: Sequence, actions: Sequence[tuple], init: Iterable, goal: Iterable,
              name: str = "") -> Task:
    """Build a Task from plain data; handy for tests and generators.

    ``actions`` items are ``(name, pre_pos, eff_pos)`` or
    ``(name, pre_pos, pre_neg, eff_pos, eff_neg)`` with facts given by name
    (strings) or id.
    """
    fl = [f if isinstance(f, Fact) else parse_fact(f) for f in facts]
    idx = {f: i for i, f in enumerate(fl)}

    def ids(xs):
        out = set()
        for x in xs:
            if isinstance(x, int):
                out.add(x)
            else:
                out.add(idx[x if isinstance(x, Fact) else parse_fact(x)])
        return frozenset(out)

    acts = []
    for spec in actions:
        if len(spec) == 3:
            nm, pp, ep = spec
            pn, en = (), ()
        else:
            nm, pp, pn, ep, en = spec
        acts.append(GroundAction(nm, (), ids(pp), ids(pn), ids(ep), ids(en)))
    return Task(tuple(fl), tuple(acts), ids(init), ids(goal), name=name)
