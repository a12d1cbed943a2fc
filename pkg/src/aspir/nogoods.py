"""Translate a ground program into the solver's initial nogood set.

A signed literal is a plain tuple ``(sign, atom)`` with ``sign=True`` for
"atom is true"; a nogood is a frozenset of signed literals that no solution
may contain entirely.  Body auxiliary atoms are keyed by the body's
canonical literal set so identical bodies share one auxiliary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import ProgramError
from .syntax import (
    AUX_PREFIX,
    Atom,
    BuiltinLit,
    Const,
    OrdLit,
    Program,
    Rule,
    atom_sort_key,
    eval_builtin,
    render_atom,
)

Lit = tuple  # (sign: bool, atom: Atom)
Nogood = frozenset


def tlit(atom: Atom) -> Lit:
    return (True, atom)


def flit(atom: Atom) -> Lit:
    return (False, atom)


def negate(lit: Lit) -> Lit:
    return (not lit[0], lit[1])


def render_lit(lit: Lit) -> str:
    return ("T " if lit[0] else "F ") + render_atom(lit[1])


def render_nogood(ng: Iterable[Lit]) -> str:
    lits = sorted(ng, key=lambda l: (atom_sort_key(l[1]), l[0]))
    return "{" + ", ".join(render_lit(l) for l in lits) + "}"


def _rule_body_lits(rule: Rule) -> list:
    lits = []
    for lit in rule.body:
        if isinstance(lit, OrdLit):
            lits.append((not lit.negated, lit.atom))
        elif isinstance(lit, BuiltinLit):
            # ground builtins are evaluated away: a false one makes the body
            # unsatisfiable, a true one is dropped
            if not eval_builtin(lit):
                return None
        else:
            raise ProgramError(f"cannot compile body literal {lit}; rewrite it first")
    return lits


@dataclass
class CompiledProgram:
    """Nogood form of a ground program plus bookkeeping for the solver."""

    nogoods: list = field(default_factory=list)
    atoms: set = field(default_factory=set)  # full universe incl. auxiliaries
    body_aux: dict = field(default_factory=dict)  # canonical body -> aux atom
    program_atoms: set = field(default_factory=set)  # universe minus body aux
    rule_aux: dict = field(default_factory=dict)  # rule -> body aux (or None)

    def add(self, nogood: Iterable[Lit]) -> None:
        self.nogoods.append(frozenset(nogood))


def _body_aux_atoms(program: Program, comp: CompiledProgram) -> None:
    """Assign one deterministic auxiliary atom per distinct nonempty body."""
    keys = {}
    for rule in program.rules:
        lits = _rule_body_lits(rule)
        if lits:
            keys[frozenset(lits)] = None
    ordered = sorted(keys, key=lambda k: sorted((atom_sort_key(a), s) for s, a in k))
    for idx, key in enumerate(ordered):
        comp.body_aux[key] = Atom(f"{AUX_PREFIX}b{idx}")


def compile_program(
    program: Program, facts: frozenset = frozenset(), extra_atoms: frozenset = frozenset()
) -> CompiledProgram:
    """Build the full initial nogood set for `program` with input `facts`.

    Requires a ground program whose constraints are normalized and whose
    external/query/conditional literals were rewritten away.  Disjunctive
    heads are accepted; each disjunctive rule contributes one clause nogood
    over its head atoms (shifted-program completion), which keeps all answer
    sets among the solutions; spurious candidates are culled by the
    reduct-minimality check.

    Input facts are assumption units: a nogood ``{F a}`` per fact and
    ``{T a}`` per undefined non-fact atom, so every level-0 assignment has a
    unit reason available for conflict resolution.
    """
    comp = CompiledProgram()
    _body_aux_atoms(program, comp)

    defining: dict = {}
    for rule in program.rules:
        if not rule.head:
            raise ProgramError("constraints must be normalized before compiling")
        for h in rule.head:
            comp.program_atoms.add(h)
        for lit in rule.body:
            if isinstance(lit, OrdLit):
                comp.program_atoms.add(lit.atom)
        body = _rule_body_lits(rule)
        if body is None:
            comp.rule_aux[rule] = None
            continue  # body contains a false builtin: rule can never fire
        if not body:
            comp.rule_aux[rule] = None
            comp.add([flit(h) for h in rule.head])
            for h in rule.head:
                defining.setdefault(h, []).append(None)  # always-satisfied body
            continue
        key = frozenset(body)
        beta = comp.body_aux[key]
        comp.rule_aux[rule] = beta
        for h in rule.head:
            defining.setdefault(h, []).append(beta)
        # beta <=> conjunction of body literals
        comp.add([flit(beta)] + body)
        for lit in body:
            comp.add([tlit(beta), negate(lit)])
        # body satisfied -> some head atom true
        comp.add([tlit(beta)] + [flit(h) for h in rule.head])

    overlap = facts & set(defining)
    if overlap:
        raise ProgramError(f"input facts intersect rule heads: {sorted(map(render_atom, overlap))}")

    comp.program_atoms.update(facts)
    comp.program_atoms.update(extra_atoms)
    comp.atoms = set(comp.program_atoms) | set(comp.body_aux.values())

    seen_beta_sets = set()
    for atom in sorted(comp.program_atoms, key=atom_sort_key):
        if atom in facts:
            comp.add([flit(atom)])
            continue
        betas = defining.get(atom, [])
        if any(b is None for b in betas):
            continue  # a fact rule supports it unconditionally
        comp.add([tlit(atom)] + [flit(b) for b in betas])
    del seen_beta_sets
    return comp


def clark_completion(program: Program) -> set:
    """Completion nogoods (body equivalences, head support, atom support)
    for a ground normalized program."""
    return set(compile_program(program).nogoods)


def singleton_loop_nogoods(program: Program) -> set:
    """Just the per-atom support family: an atom that is true needs some
    defining rule with a satisfied body."""
    comp = CompiledProgram()
    _body_aux_atoms(program, comp)
    defining: dict = {}
    atoms = set()
    for rule in program.rules:
        body = _rule_body_lits(rule)
        for h in rule.head:
            atoms.add(h)
            defining.setdefault(h, []).append(None if not body else comp.body_aux[frozenset(body)])
        for lit in rule.body:
            if isinstance(lit, OrdLit):
                atoms.add(lit.atom)
    out = set()
    for atom in sorted(atoms, key=atom_sort_key):
        betas = defining.get(atom, [])
        if any(b is None for b in betas):
            continue
        out.add(frozenset([tlit(atom)] + [flit(b) for b in betas]))
    return out
