"""Weighted A* over the original task with pluggable heuristics.

Heuristic interface (duck-typed):

    name: str
    initial_data(state) -> data          path data for the root
    child_data(parent_data, state) -> data
    __call__(state, data) -> int | None  None marks a dead end

Open list entries are ordered by ``(g + w*h, h, insertion sequence)``;
successors are generated in ascending action id. A state already seen is
re-opened only when reached with strictly smaller g. An expansion is the pop
of a non-goal, non-stale node.
"""
from __future__ import annotations

import heapq
import resource
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .pddl.task import GroundAction, State, Task, applicable

SOLVED = "solved"
UNSOLVABLE = "unsolvable"
OUT_OF_TIME = "out_of_time"
OUT_OF_MEMORY = "out_of_memory"

MEM_CHECK_EVERY = 1000


@dataclass(frozen=True)
class SearchLimits:
    time_limit: float = 300.0  # seconds
    mem_limit_mb: float = 8192.0

    def __post_init__(self):
        if self.time_limit <= 0 or self.mem_limit_mb <= 0:
            raise ValueError("limits must be positive")


@dataclass
class PlanResult:
    status: str
    plan: list = field(default_factory=list)
    search_time: float = 0.0
    expansions: int = 0
    generated: int = 0
    evaluations: int = 0
    plan_length: int = 0
    peak_memory: int = 0  # bytes
    seed: int = 0

    @property
    def solved(self) -> bool:
        return self.status == SOLVED

    def plan_text(self) -> str:
        return "".join(format_action(a) + "\n" for a in self.plan)


def format_action(a: GroundAction) -> str:
    return "(" + " ".join((a.name,) + tuple(a.args)) + ")"


def peak_rss_bytes() -> int:
    # ru_maxrss is in KiB on Linux
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024


class ZeroHeuristic:
    name = "zero"

    def initial_data(self, state):
        return None

    def child_data(self, parent_data, state):
        return None

    def __call__(self, state, data=None) -> int:
        return 0


class BlindHeuristic(ZeroHeuristic):
    """0 on goal states, 1 elsewhere."""

    name = "blind"

    def __init__(self, task: Task):
        self.goal_mask = task.goal_mask

    def __call__(self, state, data=None) -> int:
        return 0 if state & self.goal_mask == self.goal_mask else 1


class SuccessorGenerator:
    """Actions bucketed by their lowest-id precondition."""

    def __init__(self, task: Task):
        self.actions = task.actions
        self.no_pre: list[int] = []
        self.by_fact: dict[int, list[int]] = {}
        for ai, a in enumerate(task.actions):
            if a.pre_pos:
                self.by_fact.setdefault(min(a.pre_pos), []).append(ai)
            else:
                self.no_pre.append(ai)
        self._pre = [a.pre_pos_mask for a in task.actions]
        self._neg = [a.pre_neg_mask for a in task.actions]
        self._keys = sorted(self.by_fact)

    def applicable(self, s: State) -> list[int]:
        pre, neg = self._pre, self._neg
        out = [ai for ai in self.no_pre if not s & neg[ai]]
        by_fact = self.by_fact
        for f in self._keys:
            if (s >> f) & 1:
                for ai in by_fact[f]:
                    if s & pre[ai] == pre[ai] and not s & neg[ai]:
                        out.append(ai)
        out.sort()
        return out


def weighted_astar(task: Task, heuristic, weight: int = 10,
                   limits: SearchLimits = SearchLimits(), seed: int = 0) -> PlanResult:
    if weight < 1 or int(weight) != weight:
        raise ValueError("weight must be a positive integer")
    weight = int(weight)
    start = time.perf_counter()
    deadline = start + limits.time_limit
    mem_cap = limits.mem_limit_mb * 1024 * 1024
    succ = SuccessorGenerator(task)
    actions = task.actions
    goal_mask = task.goal_mask

    states: list[State] = []
    parents: list[int] = []
    via: list[int] = []
    gs: list[int] = []
    datas: list = []
    best_g: dict[State, int] = {}
    open_list: list[tuple] = []
    seq = 0
    evaluations = 0

    def result(status: str, node: int = -1, expansions: int = 0, generated: int = 0) -> PlanResult:
        plan = []
        while node > 0:
            plan.append(actions[via[node]])
            node = parents[node]
        plan.reverse()
        return PlanResult(
            status, plan, time.perf_counter() - start, expansions, generated,
            evaluations, len(plan), peak_rss_bytes(), seed,
        )

    s0 = task.init_state
    d0 = heuristic.initial_data(s0)
    h0 = heuristic(s0, d0)
    evaluations += 1
    states.append(s0)
    parents.append(-1)
    via.append(-1)
    gs.append(0)
    datas.append(d0)
    best_g[s0] = 0
    if h0 is None:
        return result(UNSOLVABLE)
    heapq.heappush(open_list, (weight * h0, h0, seq, 0))
    seq += 1
    expansions = 0
    generated = 1

    while open_list:
        _, _, _, node = heapq.heappop(open_list)
        s = states[node]
        g = gs[node]
        if best_g[s] < g:
            continue
        if s & goal_mask == goal_mask:
            return result(SOLVED, node, expansions, generated)
        expansions += 1
        if time.perf_counter() > deadline:
            return result(OUT_OF_TIME, -1, expansions, generated)
        if expansions % MEM_CHECK_EVERY == 0 and peak_rss_bytes() > mem_cap:
            return result(OUT_OF_MEMORY, -1, expansions, generated)
        pdata = datas[node]
        g2 = g + 1
        for ai in succ.applicable(s):
            a = actions[ai]
            t = (s & ~a.eff_neg_mask) | a.eff_pos_mask
            old = best_g.get(t)
            if old is not None and old <= g2:
                continue
            data = heuristic.child_data(pdata, t)
            h = heuristic(t, data)
            evaluations += 1
            generated += 1
            best_g[t] = g2
            if h is None:
                continue
            nid = len(states)
            states.append(t)
            parents.append(node)
            via.append(ai)
            gs.append(g2)
            datas.append(data)
            heapq.heappush(open_list, (g2 + weight * h, h, seq, nid))
            seq += 1
    return result(UNSOLVABLE, -1, expansions, generated)


def validate_plan(task: Task, plan: Sequence[GroundAction]) -> bool:
    """True iff ``plan`` is applicable from I under full semantics and reaches G."""
    s = task.init_state
    for a in plan:
        if not applicable(a, s):
            return False
        s = (s & ~a.eff_neg_mask) | a.eff_pos_mask
    return task.is_goal(s)


def bfs_plan_length(task: Task, max_states: int = 1_000_000) -> Optional[int]:
    """Shortest plan length by breadth-first search, None if unsolvable."""
    from collections import deque

    succ = SuccessorGenerator(task)
    s0 = task.init_state
    if task.is_goal(s0):
        return 0
    dist = {s0: 0}
    q = deque([s0])
    while q:
        s = q.popleft()
        for ai in succ.applicable(s):
            a = task.actions[ai]
            t = (s & ~a.eff_neg_mask) | a.eff_pos_mask
            if t in dist:
                continue
            dist[t] = dist[s] + 1
            if task.is_goal(t):
                return dist[t]
            if len(dist) > max_states:
                raise RuntimeError("state space too large for BFS")
            q.append(t)
    return None


def parse_plan(task: Task, text: str) -> list[GroundAction]:
    """Read a plan file (one ``(name args...)`` per line, ``;`` comments)."""
    index = {format_action(a): a for a in task.actions}
    plan = []
    for raw in text.splitlines():
        line = raw.split(";", 1)[0].strip().lower()
        if not line:
            continue
        key = "(" + " ".join(line.strip("()").split()) + ")"
        if key not in index:
            raise ValueError(f"unknown action {line}")
        plan.append(index[key])
    return plan
