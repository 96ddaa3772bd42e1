import itertools

import pytest
from hypothesis import given, settings, strategies as st

from relscore import toys
from relscore.generators import random_task
from relscore.pddl import (
    ACHIEVE_GOAL,
    GoalCompilationError,
    GroundingError,
    InapplicableActionError,
    PDDLSemanticError,
    PDDLSyntaxError,
    UnsupportedConstructError,
    UnsupportedRequirementError,
    add_goal_action,
    apply,
    apply_sequence,
    applicable,
    delete_relax,
    domain_to_pddl,
    ground,
    is_plan,
    load_task,
    make_task,
    parse_domain,
    parse_problem,
    problem_to_pddl,
    prune_unreachable,
)
from relscore.pddl.grounding import count_type_valid_tuples
from relscore.search import SuccessorGenerator, bfs_plan_length

from conftest import SUITES


def _ground(dom_text, prob_text):
    return ground(parse_domain(dom_text), parse_problem(prob_text))


# ---------------------------------------------------------------- parsing


def test_parse_untyped_blocksworld():
    dom = parse_domain(toys.BLOCKSWORLD)
    assert dom.name == "blocksworld"
    assert not dom.typed
    assert [a.name for a in dom.actions] == ["pick-up", "put-down", "stack", "unstack"]
    stack = dom.actions[2]
    assert [p.name for p in stack.params] == ["?x", "?y"]
    assert any(not lit.positive for lit in stack.effect)


def test_parse_typed_hierarchy():
    dom = parse_domain(toys.LOGISTICS)
    assert dom.typed
    assert dom.types["truck"] == "vehicle"
    assert dom.types["vehicle"] == "physobj"
    assert dom.types["airport"] == "location"


def test_symbols_are_lowercased():
    dom = parse_domain("(define (domain D) (:predicates (P ?X)) (:action A :parameters (?X) :precondition (P ?X) :effect (not (P ?X))))")
    assert dom.name == "d"
    assert dom.predicates[0].name == "p"
    assert dom.actions[0].params[0].name == "?x"


def test_at_is_an_ordinary_predicate():
    dom = parse_domain(toys.GRIPPER)
    assert dom.predicate("at") is not None


@pytest.mark.parametrize("req", [":adl", ":conditional-effects", ":fluents", ":durative-actions", ":disjunctive-preconditions"])
def test_unsupported_requirement(req):
    with pytest.raises(UnsupportedRequirementError):
        parse_domain(f"(define (domain d) (:requirements {req}) (:predicates (p)))")


@pytest.mark.parametrize("pre", [
    "(or (p) (q))",
    "(forall (?x) (p))",
    "(exists (?x) (p))",
    "(imply (p) (q))",
    "(at start (p))",
    "(over all (p))",
])
def test_unsupported_preconditions(pre):
    text = f"(define (domain d) (:predicates (p) (q)) (:action a :parameters () :precondition {pre} :effect (q)))"
    with pytest.raises(UnsupportedConstructError):
        parse_domain(text)


def test_conditional_effect_rejected():
    text = "(define (domain d) (:predicates (p) (q)) (:action a :parameters () :precondition (p) :effect (when (p) (q))))"
    with pytest.raises(UnsupportedConstructError):
        parse_domain(text)


def test_functions_and_metric_rejected():
    with pytest.raises(UnsupportedConstructError):
        parse_domain("(define (domain d) (:predicates (p)) (:functions (cost)))")
    with pytest.raises(UnsupportedConstructError):
        parse_problem("(define (problem x) (:domain d) (:init) (:goal (p)) (:metric minimize (total-cost)))")


def test_negative_goal_rejected():
    with pytest.raises(UnsupportedConstructError):
        parse_problem("(define (problem x) (:domain d) (:init) (:goal (not (p))))")


def test_syntax_error_position():
    with pytest.raises(PDDLSyntaxError) as ei:
        parse_domain("(define (domain d)\n  (:predicates (p))\n  (:action a :parameters ()")
    assert ei.value.line >= 1


def test_unbalanced_close():
    with pytest.raises(PDDLSyntaxError):
        parse_problem("(define (problem x) (:domain d) (:init) (:goal (p))))")


def test_non_ascii_rejected(tmp_path):
    p = tmp_path / "d.pddl"
    p.write_bytes("(define (domain d) (:predicates (café)))".encode("utf-8"))
    from relscore.pddl import parse_domain_file

    with pytest.raises(PDDLSyntaxError):
        parse_domain_file(p)


def test_undeclared_object_in_goal():
    dom = parse_domain(toys.BLOCKSWORLD)
    prob = parse_problem("(define (problem x) (:domain blocksworld) (:objects a) (:init (clear a)) (:goal (on a zz)))")
    with pytest.raises(PDDLSemanticError, match="undeclared object 'zz' in goal"):
        ground(dom, prob)


def test_undeclared_predicate_in_action():
    with pytest.raises(PDDLSemanticError):
        parse_domain("(define (domain d) (:predicates (p)) (:action a :parameters () :precondition (q) :effect (p)))")


def test_type_mismatch_in_init():
    dom = parse_domain(toys.GRIPPER)
    prob = parse_problem("(define (problem x) (:domain gripper) (:objects r - room b - ball) (:init (at-robby b)) (:goal (at b r)))")
    with pytest.raises(PDDLSemanticError):
        ground(dom, prob)


def test_writer_round_trip():
    for text in toys.DOMAINS.values():
        dom = parse_domain(text)
        assert parse_domain(domain_to_pddl(dom)) == dom
    prob = parse_problem(toys.logistics_problem(2, 2, 2, 1, 0))
    assert parse_problem(problem_to_pddl(prob)) == prob


# --------------------------------------------------------------- grounding


def test_grounding_all_type_valid_tuples():
    dom = parse_domain(toys.GRIPPER)
    prob = parse_problem(toys.gripper_problem(2))
    task = ground(dom, prob)
    # move: 2x2 rooms; pick/drop: 2 balls x 2 rooms x 2 grippers each
    assert len(task.actions) == 4 + 8 + 8
    assert count_type_valid_tuples(dom, prob) == len(task.actions)


def test_equality_filters_tuples():
    task = _ground(toys.FERRY, toys.ferry_problem(3, 1, 0))
    sails = [a for a in task.actions if a.name == "sail"]
    assert len(sails) == 4 * 4 - 4  # untyped: every pair of the 4 objects except x = x
    assert all(a.args[0] != a.args[1] for a in sails)


def test_grounding_is_deterministic():
    a = _ground(toys.LOGISTICS, toys.logistics_problem(2, 2, 3, 1, 5))
    b = _ground(toys.LOGISTICS, toys.logistics_problem(2, 2, 3, 1, 5))
    assert a == b
    assert a.facts == b.facts
    assert [(x.name, x.args) for x in a.actions] == [(x.name, x.args) for x in b.actions]


def test_grounding_cap():
    dom = parse_domain(toys.BLOCKSWORLD)
    prob = parse_problem(toys.blocksworld_problem(6, 0))
    with pytest.raises(GroundingError):
        ground(dom, prob, max_actions=10)


def test_add_after_delete():
    dom = parse_domain("(define (domain d) (:predicates (p)) (:action a :parameters () :precondition () :effect (and (not (p)) (p))))")
    prob = parse_problem("(define (problem x) (:domain d) (:init) (:goal (p)))")
    task = ground(dom, prob)
    a = task.actions[0]
    assert a.eff_pos and not a.eff_neg


def test_load_task_prunes(tmp_path):
    d = SUITES / "standard" / "ferry"
    full = load_task(d / "domain.pddl", d / "ferry-3-3-0.pddl", prune=False)
    pruned = load_task(d / "domain.pddl", d / "ferry-3-3-0.pddl")
    assert len(pruned.actions) < len(full.actions)
    assert bfs_plan_length(full) == bfs_plan_length(pruned)


# --------------------------------------------------------------- semantics


def _tiny():
    return make_task(
        ["(a)", "(b)", "(c)"],
        [("x", ["(a)"], [], ["(b)"], ["(a)"]), ("y", ["(b)"], ["(a)"], ["(c)"], [])],
        ["(a)"], ["(c)"],
    )


def test_apply_and_plan():
    t = _tiny()
    s = t.init_state
    x, y = t.actions
    assert applicable(x, s) and not applicable(y, s)
    s2 = apply(x, s)
    assert t.facts_of(s2) == [t.facts[1]]
    with pytest.raises(InapplicableActionError):
        apply(y, s)
    assert t.is_goal(apply_sequence([x, y], s))
    assert is_plan(t, [x, y])
    assert not is_plan(t, [y])


def test_goal_compilation():
    t = add_goal_action(delete_relax(_tiny()))
    assert t.goal_compiled and t.relaxed
    assert t.actions[-1].name == ACHIEVE_GOAL
    assert t.original_goal == frozenset({2})
    with pytest.raises(GoalCompilationError):
        add_goal_action(t)
    assert delete_relax(t) is t


def test_goal_compilation_soundness_exhaustive():
    for seed in range(30):
        t = random_task(seed, n_facts=5, n_actions=5)
        c = add_goal_action(t)
        ach = c.actions[-1]
        for k in range(4):
            for plan in itertools.product(t.actions, repeat=k):
                assert is_plan(t, plan) == is_plan(c, list(plan) + [ach])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_relaxation_monotone(seed):
    t = delete_relax(random_task(seed, n_facts=8, n_actions=10))
    for s in range(0, 1 << 8, 7):
        for a in t.actions:
            if applicable(a, s):
                assert apply(a, s) & s == s


def test_solvability_preserved_under_relaxation():
    for seed in range(40):
        t = random_task(seed, n_facts=6, n_actions=7)
        r = delete_relax(t)
        succ = SuccessorGenerator(t)
        # every plan prefix found by BFS in the original task stays applicable in the relaxed one
        frontier = [(t.init_state, t.init_state, [])]
        seen = {t.init_state}
        while frontier:
            s, rs, plan = frontier.pop()
            if t.is_goal(s):
                assert is_plan(r, plan)
            for ai in succ.applicable(s):
                a = t.actions[ai]
                s2 = apply(a, s)
                if s2 in seen:
                    continue
                seen.add(s2)
                rs2 = apply(r.actions[ai], rs)
                frontier.append((s2, rs2, plan + [r.actions[ai]]))


def test_prune_unreachable_keeps_plans():
    for seed in range(40):
        t = random_task(seed)
        assert bfs_plan_length(t) == bfs_plan_length(prune_unreachable(t))


def test_untyped_object_in_typed_domain_gets_root_type():
    prob = parse_problem(
        "(define (problem x) (:domain gripper) (:objects r1 r2 - room b1 - ball left - gripper extra)"
        " (:init (at-robby r1) (free left) (at b1 r1)) (:goal (at b1 r2)))"
    )
    assert dict((o.name, o.type) for o in prob.objects)["extra"] == "object"
    task = ground(parse_domain(toys.GRIPPER), prob)
    assert not any("extra" in a.args for a in task.actions)
