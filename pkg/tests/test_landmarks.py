import pytest

from relscore import toys
from relscore.generators import chain_task, diamond_task, random_task
from relscore.landmarks import (
    LandmarkCountHeuristic,
    extract_landmarks,
    h_landmark_count,
    is_landmark,
    relaxed_plan_facts,
)
from relscore.pddl import ground, heuristic_task, parse_domain, parse_problem
from relscore.pddl.task import relaxed_reachable
from relscore.pddl.task import apply
from relscore.search import SearchLimits, weighted_astar


def brute_force_landmarks(task):
    """Per-fact achiever deletion over every fact of the compiled task."""
    t = heuristic_task(task)
    reached, _ = relaxed_reachable(t)
    if not t.goal <= reached:
        return set(range(len(t.facts)))
    out = set(t.init)
    for f in range(len(t.facts)):
        r, _ = relaxed_reachable(t, banned_actions=frozenset(t.achievers[f]))
        if not t.goal <= r:
            out.add(f)
    return out


def test_chain_all_landmarks():
    task = chain_task(5)
    lms = extract_landmarks(task)
    assert {str(task.facts[i]) for i in lms.nontrivial} == {f"(f{i})" for i in range(5)}
    assert task.fact_id("(g)") in lms.trivial


def test_diamond_has_no_nontrivial():
    assert extract_landmarks(diamond_task()).nontrivial == frozenset()


def test_partition_and_goal_inclusion():
    for seed in range(30):
        task = random_task(seed)
        lms = extract_landmarks(task)
        assert lms.trivial | lms.nontrivial == lms.landmarks
        assert not lms.trivial & lms.nontrivial
        assert task.goal <= lms.landmarks
        assert task.init <= lms.trivial


def test_blocksworld_three_blocks_brute_force():
    dom = parse_domain(toys.BLOCKSWORLD)
    for seed in range(8):
        task = ground(dom, parse_problem(toys.blocksworld_problem(3, seed)))
        assert set(extract_landmarks(task).landmarks) == brute_force_landmarks(task)


@pytest.mark.parametrize("seed", range(40))
def test_random_tasks_brute_force(seed):
    task = random_task(seed, n_facts=8, n_actions=12)
    assert set(extract_landmarks(task).landmarks) == brute_force_landmarks(task)


def test_every_landmark_passes_deletion_test():
    task = ground(parse_domain(toys.LOGISTICS), parse_problem(toys.logistics_problem(2, 2, 2, 1, 3)))
    t = heuristic_task(task)
    lms = extract_landmarks(task)
    assert lms.nontrivial
    assert all(is_landmark(t, f) for f in lms.landmarks)


def test_relaxed_plan_facts_cover_goal():
    t = heuristic_task(chain_task(3))
    used = relaxed_plan_facts(t)
    assert t.goal <= used


def test_unsolvable_marks_all():
    from relscore.pddl import make_task

    task = make_task(["(a)", "(g)"], [("x", ["(a)"], ["(g)"])], [], ["(g)"])
    lms = extract_landmarks(task)
    assert not lms.solvable


def test_count_at_init_and_goal():
    task = chain_task(4)
    lms = extract_landmarks(task)
    h = LandmarkCountHeuristic(task, lms)
    s0 = task.init_state
    assert h(s0, h.initial_data(s0)) == 4 + 1
    goal = task.state(["(g)"])
    assert h(goal, h.initial_data(goal)) == 0
    assert h_landmark_count(lms, h.initial_data(s0), s0, task) == 5


def test_accepted_mask_monotone_and_required_again():
    task = ground(parse_domain(toys.BLOCKSWORLD), parse_problem(toys.blocksworld_problem(4, 2)))
    lms = extract_landmarks(task)
    h = LandmarkCountHeuristic(task, lms)
    res = weighted_astar(task, h, 1, SearchLimits(time_limit=30))
    assert res.solved
    s = task.init_state
    data = h.initial_data(s)
    prev_h = h(s, data)
    for a in res.plan:
        s = apply(a, s)
        new = h.child_data(data, s)
        assert new & data == data
        val = h(s, new)
        readded = (h.goal_lm_mask & new & ~s).bit_count() - (h.goal_lm_mask & data & ~s).bit_count()
        assert val <= prev_h + max(readded, 0)
        data, prev_h = new, val
    assert prev_h == 0
