"""S-expression reader and STRIPS-subset PDDL parser.

Supported requirements: ``:strips``, ``:typing``, ``:negative-preconditions``
and ``:equality``. Everything else is rejected with an error that names the
offending construct and its location; nothing is silently dropped.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Union

SUPPORTED_REQUIREMENTS = frozenset(
    {":strips", ":typing", ":negative-preconditions", ":equality"}
)
ROOT_TYPE = "object"


class PDDLError(Exception):
    """Base class for all front-end errors."""


class PDDLSyntaxError(PDDLError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class UnsupportedRequirementError(PDDLError):
    def __init__(self, flag: str, line: int = 0, col: int = 0):
        super().__init__(f"line {line}, col {col}: unsupported requirement {flag}")
        self.flag = flag


class UnsupportedConstructError(PDDLError):
    def __init__(self, construct: str, line: int = 0, col: int = 0):
        super().__init__(f"line {line}, col {col}: unsupported construct {construct!r}")
        self.construct = construct


class PDDLSemanticError(PDDLError):
    pass


# --------------------------------------------------------------------------
# s-expressions


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    col: int


@dataclass
class SList:
    items: list
    line: int
    col: int

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def __iter__(self):
        return iter(self.items)


SExpr = Union[Token, SList]


def _tokens(text: str) -> Iterator[Token]:
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch in "()":
            yield Token(ch, line, col)
            i += 1
            col += 1
            continue
        if ord(ch) > 127:
            raise PDDLSyntaxError(f"non-ASCII character {ch!r}", line, col)
        j = i
        while j < n and not text[j].isspace() and text[j] not in "();":
            if ord(text[j]) > 127:
                raise PDDLSyntaxError(f"non-ASCII character {text[j]!r}", line, col + j - i)
            j += 1
        yield Token(text[i:j].lower(), line, col)
        col += j - i
        i = j


def read_sexpr(text: str) -> SList:
    """Read exactly one top-level parenthesised expression."""
    stack: list[SList] = []
    top: Optional[SList] = None
    for tok in _tokens(text):
        if top is not None:
            raise PDDLSyntaxError(f"unexpected {tok.text!r} after end of definition", tok.line, tok.col)
        if tok.text == "(":
            stack.append(SList([], tok.line, tok.col))
        elif tok.text == ")":
            if not stack:
                raise PDDLSyntaxError("unbalanced ')'", tok.line, tok.col)
            done = stack.pop()
            if stack:
                stack[-1].items.append(done)
            else:
                top = done
        else:
            if not stack:
                raise PDDLSyntaxError(f"expected '(' but found {tok.text!r}", tok.line, tok.col)
            stack[-1].items.append(tok)
    if stack:
        raise PDDLSyntaxError("expected ')' before end of input", stack[-1].line, stack[-1].col)
    if top is None:
        raise PDDLSyntaxError("expected '(' but input is empty", 1, 1)
    return top


# --------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class TypedName:
    name: str
    type: str = ROOT_TYPE


@dataclass(frozen=True)
class Literal:
    """A (possibly negated) atom; ``predicate == "="`` encodes equality."""

    predicate: str
    args: tuple[str, ...]
    positive: bool = True

    def negate(self) -> "Literal":
        return Literal(self.predicate, self.args, not self.positive)


@dataclass(frozen=True)
class PredicateDecl:
    name: str
    params: tuple[TypedName, ...]


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: tuple[TypedName, ...]
    precondition: tuple[Literal, ...]
    effect: tuple[Literal, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class DomainAst:
    name: str
    requirements: tuple[str, ...]
    types: dict  # type name -> parent type name
    constants: tuple[TypedName, ...]
    predicates: tuple[PredicateDecl, ...]
    actions: tuple[ActionSchema, ...]

    @property
    def typed(self) -> bool:
        return ":typing" in self.requirements or len(self.types) > 0

    def predicate(self, name: str) -> Optional[PredicateDecl]:
        for p in self.predicates:
            if p.name == name:
                return p
        return None


@dataclass(frozen=True)
class ProblemAst:
    name: str
    domain_name: str
    objects: tuple[TypedName, ...]
    init: tuple[Literal, ...]
    goal: tuple[Literal, ...]


# --------------------------------------------------------------------------
# helpers


def _tok(x: SExpr, what: str) -> Token:
    if not isinstance(x, Token):
        raise PDDLSyntaxError(f"expected {what} but found a list", x.line, x.col)
    return x


def _lst(x: SExpr, what: str) -> SList:
    if not isinstance(x, SList):
        raise PDDLSyntaxError(f"expected {what} but found {x.text!r}", x.line, x.col)
    return x


def _expect_head(x: SList, head: str) -> None:
    if not x.items or not isinstance(x.items[0], Token) or x.items[0].text != head:
        raise PDDLSyntaxError(f"expected '{head}'", x.line, x.col)


def _typed_list(items: Sequence[SExpr], variables: bool, default: str = ROOT_TYPE) -> list[TypedName]:
    out: list[TypedName] = []
    pending: list[Token] = []
    i = 0
    while i < len(items):
        t = _tok(items[i], "a name")
        if t.text == "-":
            if i + 1 >= len(items):
                raise PDDLSyntaxError("expected a type after '-'", t.line, t.col)
            ty = items[i + 1]
            if isinstance(ty, SList):
                raise UnsupportedConstructError("either", ty.line, ty.col)
            if not pending:
                raise PDDLSyntaxError("type annotation without names", t.line, t.col)
            out.extend(TypedName(p.text, ty.text) for p in pending)
            pending = []
            i += 2
            continue
        if variables and not t.text.startswith("?"):
            raise PDDLSyntaxError(f"expected a variable but found {t.text!r}", t.line, t.col)
        pending.append(t)
        i += 1
    out.extend(TypedName(p.text, default) for p in pending)
    return out


def _atom(x: SList) -> Literal:
    if not x.items:
        raise PDDLSyntaxError("expected an atom but found '()'", x.line, x.col)
    head = _tok(x.items[0], "a predicate name")
    args = tuple(_tok(a, "a term").text for a in x.items[1:])
    return Literal(head.text, args, True)


_UNSUPPORTED_HEADS = {
    "or", "imply", "exists", "forall", "when", "increase", "decrease",
    "assign", "scale-up", "scale-down", "preference",
}


def _is_timed(x: SList) -> bool:
    """``(at start ...)``, ``(at 10 ...)``, ``(over all ...)``; plain ``at`` is a predicate."""
    items = x.items
    if len(items) < 2 or not isinstance(items[0], Token) or not isinstance(items[1], Token):
        return False
    head, nxt = items[0].text, items[1].text
    if head == "at":
        return nxt in ("start", "end") or nxt.replace(".", "", 1).isdigit()
    return head == "over" and nxt == "all"


def _literal(x: SExpr) -> Literal:
    x = _lst(x, "a literal")
    if x.items and isinstance(x.items[0], Token):
        head = x.items[0].text
        if head in _UNSUPPORTED_HEADS or _is_timed(x):
            raise UnsupportedConstructError(head, x.line, x.col)
        if head == "not":
            if len(x.items) != 2:
                raise PDDLSyntaxError("expected exactly one argument to 'not'", x.line, x.col)
            inner = _lst(x.items[1], "an atom")
            if inner.items and isinstance(inner.items[0], Token):
                if inner.items[0].text in ("and", "not") or inner.items[0].text in _UNSUPPORTED_HEADS:
                    raise UnsupportedConstructError(f"not {inner.items[0].text}", inner.line, inner.col)
            return _atom(inner).negate()
    return _atom(x)


def _conjunction(x: SExpr) -> list[Literal]:
    x = _lst(x, "a formula")
    if not x.items:
        return []
    if isinstance(x.items[0], Token) and x.items[0].text == "and":
        out = []
        for item in x.items[1:]:
            out.extend(_conjunction(item))
        return out
    return [_literal(x)]


def _check_requirements(reqs: SList) -> list[str]:
    out = []
    for r in reqs.items[1:]:
        t = _tok(r, "a requirement flag")
        if t.text not in SUPPORTED_REQUIREMENTS:
            raise UnsupportedRequirementError(t.text, t.line, t.col)
        out.append(t.text)
    return out


# --------------------------------------------------------------------------
# domain


def parse_domain(text: str) -> DomainAst:
    top = read_sexpr(text)
    _expect_head(top, "define")
    if len(top) < 2:
        raise PDDLSyntaxError("expected '(domain <name>)'", top.line, top.col)
    hdr = _lst(top[1], "'(domain <name>)'")
    _expect_head(hdr, "domain")
    if len(hdr) != 2:
        raise PDDLSyntaxError("expected '(domain <name>)'", hdr.line, hdr.col)
    name = _tok(hdr[1], "a domain name").text

    requirements: list[str] = []
    types: dict[str, str] = {}
    constants: list[TypedName] = []
    predicates: list[PredicateDecl] = []
    actions: list[ActionSchema] = []

    for sec in top.items[2:]:
        sec = _lst(sec, "a domain section")
        key = _tok(sec[0], "a section keyword")
        k = key.text
        if k == ":requirements":
            requirements.extend(_check_requirements(sec))
        elif k == ":types":
            for tn in _typed_list(sec.items[1:], variables=False):
                if tn.name == ROOT_TYPE:
                    continue
                types[tn.name] = tn.type
            for parent in list(types.values()):
                if parent != ROOT_TYPE and parent not in types:
                    types[parent] = ROOT_TYPE
        elif k == ":constants":
            constants.extend(_typed_list(sec.items[1:], variables=False))
        elif k == ":predicates":
            for p in sec.items[1:]:
                p = _lst(p, "a predicate declaration")
                pname = _tok(p[0], "a predicate name").text
                params = tuple(_typed_list(p.items[1:], variables=True))
                predicates.append(PredicateDecl(pname, params))
        elif k == ":action":
            actions.append(_parse_action(sec))
        elif k in (":functions", ":derived", ":durative-action", ":axiom", ":constraints"):
            raise UnsupportedConstructError(k, key.line, key.col)
        else:
            raise PDDLSyntaxError(f"unknown domain section {k!r}", key.line, key.col)

    dom = DomainAst(
        name=name,
        requirements=tuple(requirements),
        types=types,
        constants=tuple(constants),
        predicates=tuple(predicates),
        actions=tuple(actions),
    )
    _check_domain(dom)
    return dom


def _parse_action(sec: SList) -> ActionSchema:
    if len(sec) < 2:
        raise PDDLSyntaxError("expected an action name", sec.line, sec.col)
    name = _tok(sec[1], "an action name").text
    params: list[TypedName] = []
    pre: list[Literal] = []
    eff: list[Literal] = []
    i = 2
    while i < len(sec):
        key = _tok(sec[i], "':parameters', ':precondition' or ':effect'")
        if i + 1 >= len(sec):
            raise PDDLSyntaxError(f"expected a value after {key.text}", key.line, key.col)
        val = sec[i + 1]
        if key.text == ":parameters":
            params = _typed_list(_lst(val, "a parameter list").items, variables=True)
        elif key.text == ":precondition":
            pre = _conjunction(val)
        elif key.text == ":effect":
            eff = _conjunction(val)
            for lit in eff:
                if lit.predicate == "=":
                    raise UnsupportedConstructError("equality in effect", val.line, val.col)
        else:
            raise PDDLSyntaxError(f"unexpected {key.text!r} in action {name}", key.line, key.col)
        i += 2
    return ActionSchema(name, tuple(params), tuple(pre), tuple(eff), sec.line)


def _is_subtype(types: dict, sub: str, sup: str) -> bool:
    seen = set()
    while sub not in seen:
        if sub == sup:
            return True
        seen.add(sub)
        if sub == ROOT_TYPE:
            return sup == ROOT_TYPE
        sub = types.get(sub, ROOT_TYPE)
    return False


def _check_type(dom: DomainAst, t: str, where: str) -> None:
    if t != ROOT_TYPE and t not in dom.types:
        raise PDDLSemanticError(f"undeclared type {t!r} in {where}")


def _check_domain(dom: DomainAst) -> None:
    reqs = set(dom.requirements)
    if dom.types and ":typing" not in reqs and reqs:
        raise PDDLSemanticError("types declared without the :typing requirement")
    preds = {}
    for p in dom.predicates:
        if p.name in preds:
            raise PDDLSemanticError(f"duplicate predicate {p.name!r}")
        preds[p.name] = p
        for v in p.params:
            _check_type(dom, v.type, f"predicate {p.name}")
    consts = {c.name: c.type for c in dom.constants}
    for c in dom.constants:
        _check_type(dom, c.type, f"constant {c.name}")
    names = set()
    for a in dom.actions:
        if a.name in names:
            raise PDDLSemanticError(f"duplicate action {a.name!r}")
        names.add(a.name)
        scope = {}
        for v in a.params:
            _check_type(dom, v.type, f"action {a.name}")
            scope[v.name] = v.type
        for lit in a.precondition + a.effect:
            if lit.predicate == "=":
                if ":equality" not in reqs:
                    raise PDDLSemanticError(f"equality used in action {a.name} without :equality")
                if len(lit.args) != 2:
                    raise PDDLSemanticError(f"equality with {len(lit.args)} arguments in action {a.name}")
            else:
                decl = preds.get(lit.predicate)
                if decl is None:
                    raise PDDLSemanticError(f"undeclared predicate {lit.predicate!r} in action {a.name}")
                if len(decl.params) != len(lit.args):
                    raise PDDLSemanticError(
                        f"predicate {lit.predicate!r} expects {len(decl.params)} arguments, "
                        f"got {len(lit.args)} in action {a.name}"
                    )
            for arg in lit.args:
                if arg.startswith("?"):
                    if arg not in scope:
                        raise PDDLSemanticError(f"unbound variable {arg} in action {a.name}")
                elif arg not in consts:
                    raise PDDLSemanticError(f"undeclared constant {arg!r} in action {a.name}")
        for lit in a.precondition:
            if not lit.positive and lit.predicate != "=" and reqs and ":negative-preconditions" not in reqs:
                raise PDDLSemanticError(
                    f"negative precondition in action {a.name} without :negative-preconditions"
                )


# --------------------------------------------------------------------------
# problem


def parse_problem(text: str) -> ProblemAst:
    top = read_sexpr(text)
    _expect_head(top, "define")
    if len(top) < 2:
        raise PDDLSyntaxError("expected '(problem <name>)'", top.line, top.col)
    hdr = _lst(top[1], "'(problem <name>)'")
    _expect_head(hdr, "problem")
    name = _tok(hdr[1], "a problem name").text
    domain_name = ""
    objects: list[TypedName] = []
    init: list[Literal] = []
    goal: list[Literal] = []
    for sec in top.items[2:]:
        sec = _lst(sec, "a problem section")
        key = _tok(sec[0], "a section keyword")
        k = key.text
        if k == ":domain":
            domain_name = _tok(sec[1], "a domain name").text
        elif k == ":requirements":
            _check_requirements(sec)
        elif k == ":objects":
            objects.extend(_typed_list(sec.items[1:], variables=False))
        elif k == ":init":
            for item in sec.items[1:]:
                item = _lst(item, "an initial atom")
                if item.items and isinstance(item.items[0], Token) and (
                    item.items[0].text in ("=", "not") or _is_timed(item)
                ):
                    raise UnsupportedConstructError(item.items[0].text + " in :init", item.line, item.col)
                init.append(_atom(item))
        elif k == ":goal":
            if len(sec) != 2:
                raise PDDLSyntaxError("expected exactly one goal formula", sec.line, sec.col)
            goal = _conjunction(sec[1])
            for lit in goal:
                if not lit.positive or lit.predicate == "=":
                    raise UnsupportedConstructError("negative or equality goal", sec.line, sec.col)
        elif k in (":metric", ":constraints", ":length"):
            raise UnsupportedConstructError(k, key.line, key.col)
        else:
            raise PDDLSyntaxError(f"unknown problem section {k!r}", key.line, key.col)
    if not domain_name:
        raise PDDLSyntaxError("expected '(:domain <name>)'", top.line, top.col)
    return ProblemAst(name, domain_name, tuple(objects), tuple(init), tuple(goal))


def check_problem(dom: DomainAst, prob: ProblemAst) -> dict[str, str]:
    """Validate ``prob`` against ``dom``; returns the object -> type map."""
    if prob.domain_name != dom.name:
        raise PDDLSemanticError(
            f"problem refers to domain {prob.domain_name!r} but domain is {dom.name!r}"
        )
    objs: dict[str, str] = {c.name: c.type for c in dom.constants}
    for o in prob.objects:
        if o.name in objs and objs[o.name] != o.type:
            raise PDDLSemanticError(f"object {o.name!r} declared twice with different types")
        _check_type(dom, o.type, f"object {o.name}")
        objs[o.name] = o.type
    preds = {p.name: p for p in dom.predicates}
    for section, lits in (("init", prob.init), ("goal", prob.goal)):
        for lit in lits:
            decl = preds.get(lit.predicate)
            if decl is None:
                raise PDDLSemanticError(f"undeclared predicate {lit.predicate!r} in {section}")
            if len(decl.params) != len(lit.args):
                raise PDDLSemanticError(f"arity mismatch for {lit.predicate!r} in {section}")
            for arg, param in zip(lit.args, decl.params):
                if arg not in objs:
                    raise PDDLSemanticError(f"undeclared object {arg!r} in {section}")
                if not _is_subtype(dom.types, objs[arg], param.type):
                    raise PDDLSemanticError(
                        f"object {arg!r} of type {objs[arg]!r} does not match {param.type!r} "
                        f"in {lit.predicate} ({section})"
                    )
    return objs


def _read_ascii(path) -> str:
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        return raw.decode("ascii")
    except UnicodeDecodeError as exc:
        line = raw[: exc.start].count(b"\n") + 1
        raise PDDLSyntaxError(f"non-ASCII byte in {path}", line, 0) from None


def parse_domain_file(path) -> DomainAst:
    return parse_domain(_read_ascii(path))


def parse_problem_file(path) -> ProblemAst:
    return parse_problem(_read_ascii(path))
