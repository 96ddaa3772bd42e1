"""Delete-relaxation fact landmarks and the landmark-count heuristic.

A fact ``l`` is a landmark when the relaxed task cannot reach ``success``
once every achiever of ``l`` is removed (facts of I are landmarks trivially).
Every landmark appears in every relaxed plan, so the candidates are the
facts of one relaxed plan; each candidate costs one reachability pass.
"""
from __future__ import annotations

from dataclasses import dataclass

from .pddl.task import SUCCESS, Fact, State, Task, add_goal_action, delete_relax, mask_of, relaxed_reachable


@dataclass(frozen=True)
class LandmarkSet:
    landmarks: frozenset  # fact ids
    trivial: frozenset  # landmarks in I, the goal, or ``success``
    nontrivial: frozenset
    solvable: bool = True

    def names(self, task: Task, which: str = "landmarks") -> list[str]:
        return sorted(str(task.facts[i]) for i in getattr(self, which))


def _prepare(task: Task) -> Task:
    if not task.relaxed:
        task = delete_relax(task)
    if not task.goal_compiled:
        task = add_goal_action(task)
    return task


def relaxed_plan_facts(task: Task) -> set[int]:
    """Facts true at some point of one relaxed plan (cheapest achievers by layer, ties by id).

    Covers preconditions and every effect of the chosen actions, so side-effect
    landmarks are candidates too. Empty when the goal is relaxed-unreachable.
    """
    level = {f: 0 for f in task.init}
    missing = [len(a.pre_pos) for a in task.actions]
    by_pre: list[list[int]] = [[] for _ in task.facts]
    for ai, a in enumerate(task.actions):
        for f in a.pre_pos:
            by_pre[f].append(ai)
    act_level: dict[int, int] = {}
    layer = [ai for ai in range(len(task.actions)) if missing[ai] == 0]
    for f in task.init:
        for ai in by_pre[f]:
            missing[ai] -= 1
            if missing[ai] == 0:
                layer.append(ai)
    k = 0
    while layer:
        nxt_facts = []
        for ai in layer:
            act_level.setdefault(ai, k)
            for f in task.actions[ai].eff_pos:
                if f not in level:
                    level[f] = k + 1
                    nxt_facts.append(f)
        layer = []
        for f in nxt_facts:
            for ai in by_pre[f]:
                missing[ai] -= 1
                if missing[ai] == 0:
                    layer.append(ai)
        k += 1
    if not all(g in level for g in task.goal):
        return set()
    used = set()
    made: set[int] = set(task.init)
    agenda = list(task.goal)
    achievers = task.achievers
    while agenda:
        f = agenda.pop()
        if f in used:
            continue
        used.add(f)
        if level[f] == 0:
            continue
        best = min(
            (ai for ai in achievers[f] if act_level.get(ai, 1 << 30) < level[f]),
            key=lambda ai: (act_level[ai], ai),
        )
        agenda.extend(task.actions[best].pre_pos)
        made |= task.actions[best].eff_pos
    return used | made


def is_landmark(task: Task, fact: int) -> bool:
    """Achiever-deletion test on a relaxed, goal-compiled task."""
    if fact in task.init:
        return True
    reached, _ = relaxed_reachable(task, banned_actions=frozenset(task.achievers[fact]))
    return not task.goal <= reached


def extract_landmarks(task: Task) -> LandmarkSet:
    t = _prepare(task)
    n = len(t.facts)
    candidates = relaxed_plan_facts(t)
    if not candidates:
        # relaxed-unsolvable: every fact is vacuously a landmark
        lms = frozenset(range(n))
        solvable = False
    else:
        lms = frozenset(f for f in candidates if is_landmark(t, f)) | t.init
        solvable = True
    trivial_pool = set(t.init) | set(t.original_goal) | set(t.goal)
    trivial = frozenset(lms & trivial_pool)
    return LandmarkSet(lms, trivial, lms - trivial, solvable)


class LandmarkCountHeuristic:
    """Counts landmarks not yet accepted on the path, plus goal landmarks lost again.

    Path data is the accepted bitset: the parent's accepted set joined with
    the landmarks true in the new state. ``success`` is left out since the
    searched task never contains it.
    """

    name = "lmcount"

    def __init__(self, task: Task, lms: LandmarkSet):
        self.task = task
        self.lms = lms
        ids = [f for f in lms.landmarks if f < len(task.facts) and task.facts[f] != Fact(SUCCESS)]
        self.lm_mask = mask_of(ids)
        self.goal_mask = task.goal_mask
        self.goal_lm_mask = self.lm_mask & self.goal_mask
        self.evaluations = 0

    def initial_data(self, state: State) -> int:
        return state & self.lm_mask

    def child_data(self, parent_data: int, state: State) -> int:
        return parent_data | (state & self.lm_mask)

    def __call__(self, state: State, data: int) -> int:
        self.evaluations += 1
        if state & self.goal_mask == self.goal_mask:
            return 0
        unaccepted = self.lm_mask & ~data
        required_again = self.goal_lm_mask & data & ~state
        return unaccepted.bit_count() + required_again.bit_count()


def h_landmark_count(lms: LandmarkSet, mask: int, state: State, task: Task) -> int:
    return LandmarkCountHeuristic(task, lms)(state, mask)


def landmark_report(task: Task, lms: LandmarkSet) -> str:
    lines = [f"landmarks: {len(lms.landmarks)} (trivial {len(lms.trivial)}, nontrivial {len(lms.nontrivial)})"]
    if not lms.solvable:
        lines.append("goal is unreachable under delete relaxation")
    for tag, group in (("trivial", lms.trivial), ("nontrivial", lms.nontrivial)):
        for f in sorted(group):
            lines.append(f"{tag} {task.facts[f]}")
    return "\n".join(lines)


__all__ = [
    "LandmarkSet", "LandmarkCountHeuristic", "extract_landmarks", "h_landmark_count",
    "is_landmark", "landmark_report", "relaxed_plan_facts",
]
