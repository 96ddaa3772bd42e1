"""PDDL front-end: parsing, grounding and task transformations."""
from .grounding import GroundingError, ground
from .parser import (
    DomainAst,
    PDDLError,
    PDDLSemanticError,
    PDDLSyntaxError,
    ProblemAst,
    UnsupportedConstructError,
    UnsupportedRequirementError,
    parse_domain,
    parse_domain_file,
    parse_problem,
    parse_problem_file,
)
from .task import (
    ACHIEVE_GOAL,
    SUCCESS,
    Fact,
    GoalCompilationError,
    GroundAction,
    InapplicableActionError,
    State,
    Task,
    add_goal_action,
    applicable,
    apply,
    apply_sequence,
    delete_relax,
    is_plan,
    make_task,
    prune_unreachable,
)
from .writer import domain_to_pddl, problem_to_pddl


def load_task(domain_path, problem_path, prune: bool = True) -> Task:
    """Parse and ground a domain/problem pair; optionally drop unreachable actions."""
    task = ground(parse_domain_file(domain_path), parse_problem_file(problem_path))
    return prune_unreachable(task) if prune else task


def heuristic_task(task: Task) -> Task:
    """Delete-relaxed, goal-compiled version of ``task`` used by the heuristics."""
    return add_goal_action(delete_relax(task))


__all__ = [name for name in dir() if not name.startswith("_")]
