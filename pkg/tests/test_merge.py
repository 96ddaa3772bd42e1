import json

import pytest

from relscore import toys
from relscore.landmarks import extract_landmarks
from relscore.merge import (
    WINNING,
    MergeError,
    bridge_name,
    generate_merged_suite,
    merge,
    prefix_rename,
    strip_plan,
    write_merged,
)
from relscore.pddl import ground, parse_domain, parse_problem, prune_unreachable
from relscore.search import BlindHeuristic, ZeroHeuristic, parse_plan, validate_plan, weighted_astar

STUCK_DOMAIN = """
(define (domain stuck)
  (:predicates (on ?x) (key))
  (:action flip :parameters (?x) :precondition (key) :effect (on ?x)))
"""
STUCK_PROBLEM = "(define (problem s1) (:domain stuck) (:objects a) (:init) (:goal (on a)))"


def _pair(name, *args):
    gen = {
        "blocksworld": toys.blocksworld_problem,
        "gripper": toys.gripper_problem,
        "logistics": toys.logistics_problem,
        "ferry": toys.ferry_problem,
    }[name]
    return parse_domain(toys.DOMAINS[name]), parse_problem(gen(*args))


def _ground(spec):
    return ground(parse_domain(spec.domain_text()), parse_problem(spec.problem_text()))


def test_prefix_everything():
    dom, prob = _pair("gripper", 2)
    d, p = prefix_rename(dom, prob, "p1")
    assert all(t.startswith("p1-") for t in d.types)
    assert all(x.name.startswith("p1-") for x in d.predicates)
    assert all(a.name.startswith("p1-") for a in d.actions)
    assert all(o.name.startswith("p1-") for o in p.objects)
    assert all(lit.predicate.startswith("p1-") for lit in p.init + p.goal)
    # variables keep their names
    assert all(v.name.startswith("?") for a in d.actions for v in a.params)


def test_untyped_gets_label_type():
    dom, prob = _pair("blocksworld", 3, 0)
    d, p = prefix_rename(dom, prob, "p2")
    assert d.types == {"p2": "object"}
    assert ":typing" in d.requirements
    assert {o.type for o in p.objects} == {"p2"}


@pytest.mark.parametrize("name,args", [("blocksworld", (3, 1)), ("gripper", (2,)), ("ferry", (3, 2, 0)),
                                       ("logistics", (2, 2, 2, 1, 0))])
def test_renaming_is_isomorphic(name, args):
    dom, prob = _pair(name, *args)
    d, p = prefix_rename(dom, prob, "p1")
    a = ground(dom, prob)
    b = ground(d, p)
    strip = lambda s: s.replace("p1-", "")
    assert sorted(str(f) for f in a.facts) == sorted(strip(str(f)) for f in b.facts)
    assert sorted(f"{x.name} {x.args}" for x in a.actions) == sorted(strip(f"{x.name} {x.args}") for x in b.actions)


def test_label_validation():
    dom, prob = _pair("gripper", 2)
    with pytest.raises(MergeError):
        merge(dom, prob, dom, prob, labels=("p1", "p1"))
    with pytest.raises(MergeError):
        merge(dom, prob, dom, prob, labels=("P1", "p2"))
    with pytest.raises(MergeError):
        merge(dom, prob, dom, prob, labels=("mrg", "p2"))


def test_self_merge_and_structure():
    dom, prob = _pair("gripper", 2)
    spec = merge(dom, prob, dom, prob)
    task = _ground(spec)
    names = {a.name for a in task.actions}
    assert {bridge_name("p1"), bridge_name("p2")} <= names
    assert [str(task.facts[g]) for g in task.goal] == [f"({WINNING})"]
    # no action touches facts from both copies
    for a in task.actions:
        touched = {str(task.facts[f]).strip("()").split()[0] for f in a.pre_pos | a.eff_pos | a.eff_neg}
        prefixes = {t.split("-")[0] for t in touched if t != WINNING}
        assert len(prefixes) <= 1


def test_merged_tasks_have_no_nontrivial_landmarks():
    for (n1, a1), (n2, a2) in [(("blocksworld", (3, 0)), ("gripper", (2,))),
                               (("logistics", (2, 2, 2, 1, 1)), ("logistics", (2, 2, 3, 1, 2))),
                               (("ferry", (3, 2, 0)), ("blocksworld", (4, 2)))]:
        spec = merge(*_pair(n1, *a1), *_pair(n2, *a2))
        lms = extract_landmarks(prune_unreachable(_ground(spec)))
        assert lms.solvable and lms.nontrivial == frozenset()


@pytest.mark.parametrize("h", ["zero", "blind"])
def test_stripped_plan_solves_source(h):
    d1, p1 = _pair("blocksworld", 3, 2)
    d2, p2 = _pair("ferry", 3, 2, 1)
    spec = merge(d1, p1, d2, p2)
    task = _ground(spec)
    heur = ZeroHeuristic() if h == "zero" else BlindHeuristic(task)
    res = weighted_astar(task, heur, 1)
    assert res.solved and validate_plan(task, res.plan)
    label, lines = strip_plan(res.plan_text().splitlines(), spec.labels)
    src = ground(d1, p1) if label == "p1" else ground(d2, p2)
    assert validate_plan(src, parse_plan(src, "\n".join(lines)))


def test_strip_plan_requires_bridge():
    with pytest.raises(MergeError):
        strip_plan(["(p1-pick a)"], ("p1", "p2"))
    assert strip_plan(["(p2-move p2-a)", "(p1-x p1-b)", f"({bridge_name('p2')})"], ("p1", "p2")) == ("p2", ["(move a)"])


def test_solvable_iff_one_source_solvable():
    stuck = parse_domain(STUCK_DOMAIN), parse_problem(STUCK_PROBLEM)
    good = _pair("gripper", 1)
    for a, b, solvable in [(stuck, good, True), (good, stuck, True), (stuck, stuck, False)]:
        task = _ground(merge(*a, *b))
        res = weighted_astar(task, ZeroHeuristic(), 1)
        assert res.solved == solvable


def test_write_and_suite(tmp_path):
    spec = merge(*_pair("gripper", 1), *_pair("blocksworld", 3, 0))
    dpath, ppath, mpath = write_merged(spec, tmp_path)
    assert parse_domain(dpath.read_text()).name == spec.domain.name
    assert json.loads(mpath.read_text())["goal"] == WINNING
    pool = []
    for i in range(4):
        d = tmp_path / f"d{i}.pddl"
        p = tmp_path / f"p{i}.pddl"
        d.write_text(toys.BLOCKSWORLD)
        p.write_text(toys.blocksworld_problem(3, i))
        pool.append((d, p))
    out = tmp_path / "suite"
    a = generate_merged_suite(pool, 5, 7, out)
    b = generate_merged_suite(pool, 5, 7, tmp_path / "suite2")
    assert [x["sources"] for x in a] == [x["sources"] for x in b]
    pairs = {frozenset(map(tuple, x["sources"])) for x in a}
    assert len(pairs) == 5
    with pytest.raises(MergeError):
        generate_merged_suite(pool, 7, 7, tmp_path / "s3")
