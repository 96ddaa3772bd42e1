"""Serialise domain/problem ASTs back to PDDL text."""
from __future__ import annotations

from itertools import groupby

from .parser import ROOT_TYPE, DomainAst, Literal, ProblemAst, TypedName


def _typed(names, typed: bool) -> str:
    if not typed:
        return " ".join(n.name for n in names)
    parts = []
    for ty, grp in groupby(names, key=lambda n: n.type):
        parts.append(" ".join(n.name for n in grp) + f" - {ty}")
    return " ".join(parts)


def _lit(lit: Literal) -> str:
    atom = "(" + " ".join((lit.predicate,) + lit.args) + ")"
    return atom if lit.positive else f"(not {atom})"


def _conj(lits, indent: str) -> str:
    if not lits:
        return "()"
    if len(lits) == 1:
        return _lit(lits[0])
    inner = ("\n" + indent + "     ").join(_lit(x) for x in lits)
    return f"(and {inner})"


def domain_to_pddl(dom: DomainAst) -> str:
    typed = dom.typed
    out = [f"(define (domain {dom.name})"]
    if dom.requirements:
        out.append("  (:requirements " + " ".join(dom.requirements) + ")")
    if dom.types:
        tl = [TypedName(t, p) for t, p in dom.types.items()]
        out.append("  (:types " + _typed(tl, True) + ")")
    if dom.constants:
        out.append("  (:constants " + _typed(dom.constants, typed) + ")")
    out.append("  (:predicates")
    for p in dom.predicates:
        params = _typed(p.params, typed)
        out.append(f"    ({p.name}{' ' + params if params else ''})")
    out.append("  )")
    for a in dom.actions:
        out.append(f"  (:action {a.name}")
        out.append(f"    :parameters ({_typed(a.params, typed)})")
        out.append(f"    :precondition {_conj(a.precondition, '    ')}")
        out.append(f"    :effect {_conj(a.effect, '    ')})")
    out.append(")")
    return "\n".join(out) + "\n"


def problem_to_pddl(prob: ProblemAst, typed: bool = True) -> str:
    out = [f"(define (problem {prob.name})", f"  (:domain {prob.domain_name})"]
    if prob.objects:
        out.append("  (:objects " + _typed(prob.objects, typed) + ")")
    out.append("  (:init")
    for lit in prob.init:
        out.append("    " + _lit(lit))
    out.append("  )")
    out.append(f"  (:goal {_conj(prob.goal, '  ')})")
    out.append(")")
    return "\n".join(out) + "\n"


__all__ = ["domain_to_pddl", "problem_to_pddl", "ROOT_TYPE"]
