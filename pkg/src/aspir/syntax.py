"""Symbolic core: terms, atoms, body literals, rules, and programs.

Everything here is immutable and hashable, so values can be shared freely
across threads and used as dict keys / set members.  Predicates and
function symbols deliberately share one namespace; the occurrence position
disambiguates, which lets a ground atom double as a term.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union

from .errors import ProgramError

AUX_PREFIX = "__"

_NUMERAL = re.compile(r"-?[0-9]+\Z")
_PLAIN_NAME = re.compile(r"[a-z_][A-Za-z0-9_]*\Z")


def _is_numeral(text: str) -> bool:
    return bool(_NUMERAL.match(text))


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self) -> str:
        return render_term(self)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Func:
    name: str
    args: tuple

    def __str__(self) -> str:
        return render_term(self)


Term = Union[Const, Var, Func]


def render_term(t: Term) -> str:
    if isinstance(t, Const):
        if _is_numeral(t.name) or _PLAIN_NAME.match(t.name):
            return t.name
        return '"' + t.name.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(t, Var):
        return t.name
    return f"{t.name}({','.join(render_term(a) for a in t.args)})"


def term_is_ground(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    if isinstance(t, Func):
        return all(term_is_ground(a) for a in t.args)
    return True


def term_vars(t: Term) -> Iterator[str]:
    if isinstance(t, Var):
        yield t.name
    elif isinstance(t, Func):
        for a in t.args:
            yield from term_vars(a)


def substitute_term(t: Term, theta: dict) -> Term:
    if isinstance(t, Var):
        return theta.get(t.name, t)
    if isinstance(t, Func):
        return Func(t.name, tuple(substitute_term(a, theta) for a in t.args))
    return t


def constant_key(t: Term):
    """Total order on ground terms: numerals first (numerically), then by
    rendered text.  Used for builtin comparisons."""
    if isinstance(t, Const) and _is_numeral(t.name):
        return (0, int(t.name), "")
    return (1, 0, render_term(t))


def term_sort_key(t: Term):
    """Structural order used wherever determinism matters (guess policy,
    rendering of sets)."""
    if isinstance(t, Const):
        if _is_numeral(t.name):
            return (0, "", int(t.name), ())
        return (1, t.name, 0, ())
    if isinstance(t, Var):
        return (2, t.name, 0, ())
    return (3, t.name, 0, tuple(term_sort_key(a) for a in t.args))


# ---------------------------------------------------------------------------
# atoms


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()

    def __str__(self) -> str:
        return render_atom(self)

    @property
    def is_aux(self) -> bool:
        return self.pred.startswith(AUX_PREFIX)


def render_atom(a: Atom) -> str:
    if not a.args:
        return a.pred
    return f"{a.pred}({','.join(render_term(t) for t in a.args)})"


def atom_is_ground(a: Atom) -> bool:
    return all(term_is_ground(t) for t in a.args)


def atom_vars(a: Atom) -> Iterator[str]:
    for t in a.args:
        yield from term_vars(t)


def substitute_atom(a: Atom, theta: dict) -> Atom:
    if not a.args:
        return a
    return Atom(a.pred, tuple(substitute_term(t, theta) for t in a.args))


def atom_sort_key(a: Atom):
    return (a.pred, len(a.args), tuple(term_sort_key(t) for t in a.args))


def atom_to_term(a: Atom) -> Term:
    """View a ground atom as a term (function symbol = predicate)."""
    if not a.args:
        return Const(a.pred)
    return Func(a.pred, a.args)


def term_to_atom(t: Term) -> Atom:
    if isinstance(t, Const):
        return Atom(t.name)
    if isinstance(t, Func):
        return Atom(t.name, t.args)
    raise ProgramError(f"variable term {t} cannot be read as an atom")


def match_term(pattern: Term, value: Term, theta: dict) -> Optional[dict]:
    """One-way matching of `pattern` against a ground `value`; extends and
    returns a copy of `theta`, or None on clash."""
    if isinstance(pattern, Var):
        bound = theta.get(pattern.name)
        if bound is None:
            out = dict(theta)
            out[pattern.name] = value
            return out
        return theta if bound == value else None
    if isinstance(pattern, Const):
        return theta if pattern == value else None
    if isinstance(value, Func) and pattern.name == value.name and len(pattern.args) == len(value.args):
        for p, v in zip(pattern.args, value.args):
            theta = match_term(p, v, theta)
            if theta is None:
                return None
        return theta
    return None


def match_atom(pattern: Atom, value: Atom, theta: dict) -> Optional[dict]:
    if pattern.pred != value.pred or len(pattern.args) != len(value.args):
        return None
    for p, v in zip(pattern.args, value.args):
        theta = match_term(p, v, theta)
        if theta is None:
            return None
    return theta


# ---------------------------------------------------------------------------
# body literals


@dataclass(frozen=True)
class OrdLit:
    atom: Atom
    negated: bool = False

    def __str__(self) -> str:
        return ("not " if self.negated else "") + render_atom(self.atom)


@dataclass(frozen=True)
class ExtLit:
    """External atom &name[inputs](outputs); inputs are predicate symbols."""

    name: str
    inputs: tuple  # tuple[str, ...]
    outputs: tuple  # tuple[Term, ...]
    negated: bool = False

    def __str__(self) -> str:
        body = f"&{self.name}[{','.join(self.inputs)}]({','.join(render_term(t) for t in self.outputs)})"
        return ("not " if self.negated else "") + body


@dataclass(frozen=True)
class BuiltinLit:
    lhs: Term
    op: str  # one of = != < <= > >=
    rhs: Term
    negated: bool = False

    def __str__(self) -> str:
        body = f"{render_term(self.lhs)} {self.op} {render_term(self.rhs)}"
        return ("not " if self.negated else "") + body


@dataclass(frozen=True)
class CondLit:
    """Conditional literal COND(template : condition); positive polarity only.

    Satisfied iff the template holds for every ground instance of the
    condition atom; expanded away before solving.
    """

    template: OrdLit
    condition: Atom

    def __str__(self) -> str:
        return f"COND({self.template} : {render_atom(self.condition)})"


@dataclass(frozen=True)
class QueryLit:
    """Query atom over a subprogram, written &query_c["path"; p1,p2](lits)."""

    mode: str  # "brave" | "cautious"
    path: str
    inputs: tuple  # tuple[str, ...] input predicate symbols
    query: tuple  # tuple[OrdLit, ...] ground signed atoms
    negated: bool = False
    subprogram: Optional["Program"] = field(default=None, compare=False)

    def __str__(self) -> str:
        tag = "b" if self.mode == "brave" else "c"
        ins = ("; " + ",".join(self.inputs)) if self.inputs else ""
        q = ", ".join(str(l) for l in self.query)
        return ("not " if self.negated else "") + f'&query_{tag}["{self.path}"{ins}]({q})'


BodyLit = Union[OrdLit, ExtLit, BuiltinLit, CondLit, QueryLit]


def lit_vars(lit: BodyLit) -> Iterator[str]:
    if isinstance(lit, OrdLit):
        yield from atom_vars(lit.atom)
    elif isinstance(lit, ExtLit):
        for t in lit.outputs:
            yield from term_vars(t)
    elif isinstance(lit, BuiltinLit):
        yield from term_vars(lit.lhs)
        yield from term_vars(lit.rhs)
    elif isinstance(lit, CondLit):
        yield from atom_vars(lit.template.atom)
        yield from atom_vars(lit.condition)
    elif isinstance(lit, QueryLit):
        return


def substitute_lit(lit: BodyLit, theta: dict) -> BodyLit:
    if isinstance(lit, OrdLit):
        return OrdLit(substitute_atom(lit.atom, theta), lit.negated)
    if isinstance(lit, ExtLit):
        return ExtLit(lit.name, lit.inputs, tuple(substitute_term(t, theta) for t in lit.outputs), lit.negated)
    if isinstance(lit, BuiltinLit):
        return BuiltinLit(substitute_term(lit.lhs, theta), lit.op, substitute_term(lit.rhs, theta), lit.negated)
    if isinstance(lit, CondLit):
        return CondLit(
            OrdLit(substitute_atom(lit.template.atom, theta), lit.template.negated),
            substitute_atom(lit.condition, theta),
        )
    return lit


def eval_builtin(lit: BuiltinLit) -> bool:
    if not (term_is_ground(lit.lhs) and term_is_ground(lit.rhs)):
        raise ProgramError(f"builtin {lit} is not ground")
    a, b = constant_key(lit.lhs), constant_key(lit.rhs)
    op = lit.op
    if op == "=":
        value = a == b
    elif op == "!=":
        value = a != b
    elif op == "<":
        value = a < b
    elif op == "<=":
        value = a <= b
    elif op == ">":
        value = a > b
    elif op == ">=":
        value = a >= b
    else:
        raise ProgramError(f"unknown builtin operator {op!r}")
    return not value if lit.negated else value


# ---------------------------------------------------------------------------
# rules and programs


@dataclass(frozen=True)
class Rule:
    head: tuple = ()  # tuple[Atom, ...]
    body: tuple = ()  # tuple[BodyLit, ...]

    def __str__(self) -> str:
        return render_rule(self)

    @property
    def is_constraint(self) -> bool:
        return not self.head

    @property
    def is_fact(self) -> bool:
        return len(self.head) == 1 and not self.body

    @property
    def is_normal(self) -> bool:
        return len(self.head) == 1


def rule_vars(r: Rule) -> set:
    out = set()
    for a in r.head:
        out.update(atom_vars(a))
    for lit in r.body:
        out.update(lit_vars(lit))
    return out


def rule_is_ground(r: Rule) -> bool:
    return not rule_vars(r)


def substitute_rule(r: Rule, theta: dict) -> Rule:
    return Rule(
        tuple(substitute_atom(a, theta) for a in r.head),
        tuple(substitute_lit(l, theta) for l in r.body),
    )


def positive_body_atoms(r: Rule) -> Iterator[Atom]:
    for lit in r.body:
        if isinstance(lit, OrdLit) and not lit.negated:
            yield lit.atom


def negative_body_atoms(r: Rule) -> Iterator[Atom]:
    for lit in r.body:
        if isinstance(lit, OrdLit) and lit.negated:
            yield lit.atom


def render_rule(r: Rule) -> str:
    head = " v ".join(render_atom(a) for a in r.head)
    if not r.body:
        return f"{head}."
    body = ", ".join(str(l) for l in r.body)
    if not head:
        return f":- {body}."
    return f"{head} :- {body}."


@dataclass(frozen=True)
class Program:
    rules: tuple = ()  # tuple[Rule, ...]
    unit_markers: tuple = ()  # indices into rules where a new unit starts

    def __str__(self) -> str:
        return render_program(self)

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)


def program(rules: Iterable[Rule], unit_markers: Iterable[int] = ()) -> Program:
    return Program(tuple(rules), tuple(unit_markers))


def render_program(p: Program) -> str:
    lines = []
    markers = set(p.unit_markers)
    for i, r in enumerate(p.rules):
        if i in markers and i > 0:
            lines.append("#split.")
        lines.append(render_rule(r))
    return "\n".join(lines) + ("\n" if lines else "")


def program_is_ground(p: Program) -> bool:
    return all(rule_is_ground(r) for r in p.rules)


def program_is_ordinary(p: Program) -> bool:
    return all(isinstance(l, (OrdLit, BuiltinLit)) for r in p.rules for l in r.body)


def program_is_normal(p: Program) -> bool:
    return all(len(r.head) <= 1 for r in p.rules)


def head_atoms(p: Program) -> set:
    return {a for r in p.rules for a in r.head}


def head_preds(p: Program) -> set:
    return {a.pred for r in p.rules for a in r.head}


def external_lits(p: Program) -> Iterator[ExtLit]:
    for r in p.rules:
        for lit in r.body:
            if isinstance(lit, ExtLit):
                yield lit


def query_lits(p: Program) -> Iterator[QueryLit]:
    for r in p.rules:
        for lit in r.body:
            if isinstance(lit, QueryLit):
                yield lit


def atoms_of(p: Program) -> set:
    """All ordinary atoms occurring in heads or bodies of a ground program,
    auxiliary atoms included."""
    out = set()
    for r in p.rules:
        for a in r.head:
            if not atom_is_ground(a):
                raise ProgramError(f"atoms_of requires a ground program; found {a}")
            out.add(a)
        for lit in r.body:
            if isinstance(lit, OrdLit):
                if not atom_is_ground(lit.atom):
                    raise ProgramError(f"atoms_of requires a ground program; found {lit.atom}")
                out.add(lit.atom)
            elif isinstance(lit, CondLit):
                for a in (lit.template.atom, lit.condition):
                    if not atom_is_ground(a):
                        raise ProgramError(f"atoms_of requires a ground program; found {a}")
                    out.add(a)
            elif isinstance(lit, ExtLit) and not all(term_is_ground(t) for t in lit.outputs):
                raise ProgramError(f"atoms_of requires a ground program; found {lit}")
    return out


def _collect_constants(t: Term, out: set) -> None:
    if isinstance(t, Const):
        out.add(t)
    elif isinstance(t, Func):
        for a in t.args:
            _collect_constants(a, out)


def herbrand_universe(p: Program) -> set:
    """All constants occurring in the program (inside function terms too)."""
    out: set = set()
    for r in p.rules:
        for a in r.head:
            for t in a.args:
                _collect_constants(t, out)
        for lit in r.body:
            if isinstance(lit, OrdLit):
                for t in lit.atom.args:
                    _collect_constants(t, out)
            elif isinstance(lit, BuiltinLit):
                _collect_constants(lit.lhs, out)
                _collect_constants(lit.rhs, out)
            elif isinstance(lit, ExtLit):
                for t in lit.outputs:
                    _collect_constants(t, out)
            elif isinstance(lit, CondLit):
                for t in lit.template.atom.args + lit.condition.args:
                    _collect_constants(t, out)
    return out


def function_symbols(p: Program) -> set:
    """(name, arity) pairs of function symbols occurring in the program."""
    out: set = set()

    def walk(t: Term) -> None:
        if isinstance(t, Func):
            out.add((t.name, len(t.args)))
            for a in t.args:
                walk(a)

    for r in p.rules:
        for a in r.head:
            for t in a.args:
                walk(t)
        for lit in r.body:
            if isinstance(lit, OrdLit):
                for t in lit.atom.args:
                    walk(t)
            elif isinstance(lit, CondLit):
                for t in lit.template.atom.args + lit.condition.args:
                    walk(t)
    return out


def normalize_constraints(p: Program) -> Program:
    """Replace every constraint `:- B` by `f :- B, not f` with a fresh atom.

    Fresh atoms are named ``__c<k>`` by textual order and are auxiliary, so
    they are excluded from answer-set projection.  Existing ``__c<k>`` names
    are skipped to keep re-normalization collision-free.
    """
    taken = set()
    for r in p.rules:
        for a in r.head:
            taken.add(a.pred)
    k = 0
    out = []
    for r in p.rules:
        if r.is_constraint:
            k += 1
            while f"{AUX_PREFIX}c{k}" in taken:
                k += 1
            fresh = Atom(f"{AUX_PREFIX}c{k}")
            out.append(Rule((fresh,), r.body + (OrdLit(fresh, negated=True),)))
        else:
            out.append(r)
    return Program(tuple(out), p.unit_markers)


def project_interpretation(interp: frozenset, keep=None) -> frozenset:
    """Drop auxiliary atoms; optionally restrict to an explicit atom set."""
    if keep is not None:
        return frozenset(a for a in interp if a in keep)
    return frozenset(a for a in interp if not a.is_aux)


def format_interpretation(interp: Iterable[Atom]) -> str:
    atoms = sorted(interp, key=atom_sort_key)
    return "{" + ", ".join(render_atom(a) for a in atoms) + "}"
