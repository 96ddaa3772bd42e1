"""Landmark-free problems from two independent tasks.

Both sources are renamed at the AST level with a unique label prefix, put
side by side, and joined by two bridge actions ``mrg-achieve-<label>`` whose
precondition is that source's goal and whose effect is ``(mrg-winning)``.
The merged goal is ``(mrg-winning)`` alone, so no fact outside I and the goal
is needed by every plan.
"""
from __future__ import annotations

import itertools
import json
import random
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .pddl.parser import (
    ROOT_TYPE,
    ActionSchema,
    DomainAst,
    Literal,
    PredicateDecl,
    ProblemAst,
    TypedName,
    parse_domain,
    parse_domain_file,
    parse_problem,
    parse_problem_file,
)
from .pddl.writer import domain_to_pddl, problem_to_pddl

RESERVED = "mrg-"
WINNING = RESERVED + "winning"
_LABEL_RE = re.compile(r"^[a-z][a-z0-9_]*$")


class MergeError(ValueError):
    pass


@dataclass(frozen=True)
class MergedSpec:
    sources: tuple  # ((domain path, problem path), ...) as strings, may be empty
    labels: tuple[str, str]
    domain: DomainAst
    problem: ProblemAst
    seed: Optional[int] = None
    meta: dict = field(default_factory=dict, compare=False)

    def domain_text(self) -> str:
        return domain_to_pddl(self.domain)

    def problem_text(self) -> str:
        return problem_to_pddl(self.problem)

    def manifest(self) -> dict:
        return {
            "sources": [list(s) for s in self.sources],
            "labels": list(self.labels),
            "seed": self.seed,
            "bridges": [bridge_name(lbl) for lbl in self.labels],
            "goal": WINNING,
            **self.meta,
        }


def bridge_name(label: str) -> str:
    return f"{RESERVED}achieve-{label}"


def _check_label(label: str) -> None:
    if not _LABEL_RE.match(label) or label.startswith(RESERVED.rstrip("-")):
        raise MergeError(f"invalid label {label!r}: use a lower-case identifier such as 'p1'")


def prefix_rename(domain: DomainAst, problem: ProblemAst, label: str) -> tuple[DomainAst, ProblemAst]:
    """Prefix every type, constant, predicate, action and object with ``label-``.

    An untyped source gets the single type ``label`` for all its objects,
    constants and parameters.
    """
    _check_label(label)
    pre = label + "-"
    typed = domain.typed

    def ty(t: str) -> str:
        if not typed:
            return label
        return t if t == ROOT_TYPE else pre + t

    def tn(x: TypedName, is_var: bool = False) -> TypedName:
        return TypedName(x.name if is_var else pre + x.name, ty(x.type))

    def term(a: str) -> str:
        return a if a.startswith("?") else pre + a

    def lit(x: Literal) -> Literal:
        p = x.predicate if x.predicate == "=" else pre + x.predicate
        return Literal(p, tuple(term(a) for a in x.args), x.positive)

    if typed:
        types = {pre + t: (p if p == ROOT_TYPE else pre + p) for t, p in domain.types.items()}
    else:
        types = {label: ROOT_TYPE}
    reqs = tuple(domain.requirements)
    if ":typing" not in reqs:
        reqs = reqs + (":typing",)
    dom = DomainAst(
        name=pre + domain.name,
        requirements=reqs,
        types=types,
        constants=tuple(tn(c) for c in domain.constants),
        predicates=tuple(
            PredicateDecl(pre + p.name, tuple(tn(v, True) for v in p.params)) for p in domain.predicates
        ),
        actions=tuple(
            ActionSchema(
                pre + a.name,
                tuple(tn(v, True) for v in a.params),
                tuple(lit(x) for x in a.precondition),
                tuple(lit(x) for x in a.effect),
                a.line,
            )
            for a in domain.actions
        ),
    )
    prob = ProblemAst(
        name=pre + problem.name,
        domain_name=dom.name,
        objects=tuple(tn(o) for o in problem.objects),
        init=tuple(lit(x) for x in problem.init),
        goal=tuple(lit(x) for x in problem.goal),
    )
    return dom, prob


def _union_names(what: str, a: Iterable[str], b: Iterable[str]) -> None:
    clash = set(a) & set(b)
    if clash:
        raise MergeError(f"{what} names collide after prefixing: {sorted(clash)}")


def merge(dom1: DomainAst, prob1: ProblemAst, dom2: DomainAst, prob2: ProblemAst,
          labels: Sequence[str] = ("p1", "p2"), sources: tuple = (),
          seed: Optional[int] = None) -> MergedSpec:
    if len(labels) != 2 or labels[0] == labels[1]:
        raise MergeError("need two distinct labels")
    if any(a.startswith(b + "-") or b.startswith(a + "-") for a, b in [labels]):
        raise MergeError(f"labels {labels[0]!r} and {labels[1]!r} are prefixes of each other")
    d1, p1 = prefix_rename(dom1, prob1, labels[0])
    d2, p2 = prefix_rename(dom2, prob2, labels[1])
    _union_names("type", d1.types, d2.types)
    _union_names("predicate", (p.name for p in d1.predicates), (p.name for p in d2.predicates))
    _union_names("action", (a.name for a in d1.actions), (a.name for a in d2.actions))
    objs1 = {o.name for o in d1.constants} | {o.name for o in p1.objects}
    objs2 = {o.name for o in d2.constants} | {o.name for o in p2.objects}
    _union_names("object", objs1, objs2)

    # bridge actions are parameterless, so goal objects must be domain constants
    goal_objs = {a for x in p1.goal + p2.goal for a in x.args}
    moved = tuple(o for o in p1.objects + p2.objects if o.name in goal_objs)
    objects = tuple(o for o in p1.objects + p2.objects if o.name not in goal_objs)

    bridges = tuple(
        ActionSchema(bridge_name(lbl), (), tuple(p.goal), (Literal(WINNING, ()),))
        for lbl, p in zip(labels, (p1, p2))
    )
    reqs = []
    for r in d1.requirements + d2.requirements:
        if r not in reqs:
            reqs.append(r)
    dom = DomainAst(
        name=f"{RESERVED}{labels[0]}-{labels[1]}",
        requirements=tuple(reqs),
        types={**d1.types, **d2.types},
        constants=d1.constants + d2.constants + moved,
        predicates=d1.predicates + d2.predicates + (PredicateDecl(WINNING, ()),),
        actions=d1.actions + d2.actions + bridges,
    )
    prob = ProblemAst(
        name=f"{RESERVED}{p1.name}-{p2.name}",
        domain_name=dom.name,
        objects=objects,
        init=p1.init + p2.init,
        goal=(Literal(WINNING, ()),),
    )
    # round trip guards against serialisation drift
    parse_domain(domain_to_pddl(dom))
    parse_problem(problem_to_pddl(prob))
    return MergedSpec(tuple(tuple(str(x) for x in s) for s in sources), tuple(labels), dom, prob, seed)


def merge_files(domain1, problem1, domain2, problem2, labels: Sequence[str] = ("p1", "p2"),
                seed: Optional[int] = None) -> MergedSpec:
    return merge(
        parse_domain_file(domain1), parse_problem_file(problem1),
        parse_domain_file(domain2), parse_problem_file(problem2),
        labels, sources=((domain1, problem1), (domain2, problem2)), seed=seed,
    )


def write_merged(spec: MergedSpec, out_dir, stem: str = "merged") -> tuple[Path, Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dpath = out / f"{stem}-domain.pddl"
    ppath = out / f"{stem}-problem.pddl"
    mpath = out / f"{stem}-manifest.json"
    dpath.write_text(spec.domain_text())
    ppath.write_text(spec.problem_text())
    mpath.write_text(json.dumps(spec.manifest(), indent=2, sort_keys=True) + "\n")
    return dpath, ppath, mpath


def strip_plan(plan_lines: Sequence[str], labels: Sequence[str]) -> tuple[str, list[str]]:
    """Map a merged plan back onto the source whose bridge action fired.

    Returns ``(label, source plan lines)``; actions of the other copy are
    dropped (they cannot affect the chosen copy).
    """
    steps = [" ".join(x.strip().strip("()").split()) for x in plan_lines if x.strip()]
    chosen = None
    for s in steps:
        for lbl in labels:
            if s == bridge_name(lbl):
                chosen = lbl
                break
        if chosen:
            break
    if chosen is None:
        raise MergeError("plan contains no bridge action")
    pre = chosen + "-"
    out = []
    for s in steps:
        if s.startswith(RESERVED):
            break
        parts = s.split()
        if not parts[0].startswith(pre):
            continue
        out.append("(" + " ".join(p.removeprefix(pre) for p in parts) + ")")
    return chosen, out


def generate_merged_suite(pool: Sequence[tuple], n_pairs: int, seed: int, out_dir,
                          labels: Sequence[str] = ("p1", "p2"), relative_to=None) -> list[dict]:
    """Merge ``n_pairs`` distinct random source pairs from ``pool`` into ``out_dir``.

    Writes ``pair-NN-domain.pddl`` / ``pair-NN.pddl`` plus ``manifest.json``;
    source paths in the manifest are made relative to ``relative_to`` if given.
    """
    combos = list(itertools.combinations(range(len(pool)), 2))
    if n_pairs > len(combos):
        raise MergeError(f"a pool of {len(pool)} problems gives only {len(combos)} distinct pairs")
    r = random.Random(seed)
    r.shuffle(combos)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for k, (i, j) in enumerate(combos[:n_pairs]):
        if r.random() < 0.5:
            i, j = j, i
        spec = merge_files(*pool[i], *pool[j], labels=labels, seed=seed)
        stem = f"pair-{k:02d}"
        (out / f"{stem}-domain.pddl").write_text(spec.domain_text())
        (out / f"{stem}.pddl").write_text(spec.problem_text())
        entry = {"problem": stem, **spec.manifest()}
        if relative_to is not None:
            entry["sources"] = [[str(Path(x).resolve().relative_to(Path(relative_to).resolve())) for x in src]
                                for src in entry["sources"]]
        entries.append(entry)
    (out / "manifest.json").write_text(json.dumps({"seed": seed, "pairs": entries}, indent=2) + "\n")
    return entries


__all__ = [
    "MergedSpec", "MergeError", "WINNING", "bridge_name", "generate_merged_suite", "merge",
    "merge_files", "prefix_rename", "strip_plan", "write_merged",
]
