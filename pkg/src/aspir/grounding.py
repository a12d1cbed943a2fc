"""Ground program construction.

Two routes:

* `ground_naive` substitutes every variable by every given constant, the
  textbook instantiation used by the reference oracle and by tests.
* `pog` produces a partially-optimized grounding for a fixed set of input
  facts: instances are built by matching positive bodies against a
  derivability over-approximation (facts plus heads of surviving
  instances), so a ground instance is dropped exactly when some positive
  ordinary body atom is underivable.  Optimization never rewrites within a
  rule and never adds rules; constraints are kept even when their ground
  positive atoms are underivable, since input facts may still arm them.

Conditional literals are expanded against the extension of their condition
predicate, computed from the same derivability fixpoint (exact whenever the
condition predicates are defined by facts or positively-guarded rules).
"""

from __future__ import annotations

from typing import Callable, Iterable, Optional

from .errors import ProgramError
from .externals import Registry
from .limits import DEFAULT_LIMITS, Limits
from .syntax import (
    Atom,
    BuiltinLit,
    CondLit,
    ExtLit,
    OrdLit,
    Program,
    Rule,
    atom_is_ground,
    eval_builtin,
    match_atom,
    match_term,
    program,
    render_rule,
    rule_is_ground,
    rule_vars,
    substitute_atom,
    substitute_lit,
    substitute_rule,
    term_is_ground,
)


def _finalize_instance(rule: Rule) -> Optional[Rule]:
    """Evaluate ground builtins of a fully substituted rule; None if some
    builtin is false, otherwise the rule without its builtin literals."""
    body = []
    for lit in rule.body:
        if isinstance(lit, BuiltinLit):
            if not eval_builtin(lit):
                return None
        else:
            body.append(lit)
    return Rule(rule.head, tuple(body))


def ground_naive(p: Program, constants: Iterable, registry: Optional[Registry] = None) -> Program:
    """Instantiate every rule under every variable-to-constant substitution.

    `constants` may contain arbitrary ground terms.  Ground builtins filter
    instances; conditional literals are not supported on this route.
    """
    consts = sorted(set(constants), key=str)
    out = []
    seen = set()
    for rule in p.rules:
        for lit in rule.body:
            if isinstance(lit, CondLit):
                raise ProgramError("naive grounding does not expand conditional literals")
        varnames = sorted(rule_vars(rule))
        if varnames and not consts:
            raise ProgramError(f"rule `{render_rule(rule)}` has variables but no constants were given")
        def emit(theta: dict, remaining: list) -> None:
            if not remaining:
                inst = _finalize_instance(substitute_rule(rule, theta))
                if inst is not None and inst not in seen:
                    seen.add(inst)
                    out.append(inst)
                return
            v, rest = remaining[0], remaining[1:]
            for c in consts:
                theta[v] = c
                emit(theta, rest)
            del theta[v]

        emit({}, varnames)
    return program(out)


def expand_conditional(rule: Rule, extension_of: dict) -> Rule:
    """Replace each conditional literal by the conjunction of its template
    over every ground instance of the condition; an empty extension removes
    the literal (vacuously satisfied).

    `extension_of` maps condition predicates to their sets of ground atoms;
    a missing predicate is an error.
    """
    body = []
    for lit in rule.body:
        if not isinstance(lit, CondLit):
            body.append(lit)
            continue
        if lit.condition.pred not in extension_of:
            raise ProgramError(f"no extension supplied for condition predicate {lit.condition.pred!r}")
        conjuncts = []
        for ground_cond in sorted(extension_of[lit.condition.pred], key=str):
            theta = match_atom(lit.condition, ground_cond, {})
            if theta is None:
                continue
            instantiated = OrdLit(substitute_atom(lit.template.atom, theta), lit.template.negated)
            if not atom_is_ground(instantiated.atom):
                raise ProgramError(f"conditional template {instantiated} not ground after expansion")
            if instantiated not in conjuncts:
                conjuncts.append(instantiated)
        body.extend(conjuncts)
    return Rule(rule.head, tuple(dict.fromkeys(body)))


class _Derivation:
    """Derivability over-approximation: facts plus heads of instances whose
    positive ordinary bodies are derivable (negation ignored, disjunctive
    heads all counted)."""

    def __init__(self):
        self.by_pred: dict = {}
        self.atoms: set = set()

    def add(self, atom: Atom) -> bool:
        if atom in self.atoms:
            return False
        self.atoms.add(atom)
        self.by_pred.setdefault(atom.pred, []).append(atom)
        return True

    def candidates(self, pred: str) -> list:
        return self.by_pred.get(pred, [])


def _match_positive(
    rule: Rule,
    derived: _Derivation,
    require_derivable: bool,
    outputs_for: Optional[Callable],
):
    """Yield substitutions grounding the rule's positive body.

    Positive ordinary atoms bind variables by matching derived atoms; for
    constraints (``require_derivable=False``) an already-ground atom is
    accepted without a derivability check.  Positive external literals bind
    their output variables from the registry's known-true outputs.
    """
    positive = [l.atom for l in rule.body if isinstance(l, OrdLit) and not l.negated]
    ext_pos = [l for l in rule.body if isinstance(l, ExtLit) and not l.negated and l.outputs]

    def walk(theta: dict, pending: list):
        if not pending:
            yield from walk_ext(theta, ext_pos)
            return
        # prefer atoms that are already fully bound
        idx = next(
            (i for i, a in enumerate(pending) if atom_is_ground(substitute_atom(a, theta))),
            0,
        )
        atom = substitute_atom(pending[idx], theta)
        rest = pending[:idx] + pending[idx + 1 :]
        if atom_is_ground(atom):
            if atom in derived.atoms or not require_derivable:
                yield from walk(theta, rest)
            return
        for cand in derived.candidates(atom.pred):
            theta2 = match_atom(atom, cand, theta)
            if theta2 is not None:
                yield from walk(theta2, rest)

    def walk_ext(theta: dict, pending: list):
        if not pending:
            yield theta
            return
        lit, rest = pending[0], pending[1:]
        outputs = [tuple(o) for o in (outputs_for(lit) if outputs_for else ())]
        bound = tuple(substitute_lit(lit, theta).outputs)
        if all(term_is_ground(t) for t in bound):
            yield from walk_ext(theta, rest)
            return
        for out in sorted(outputs, key=str):
            if len(out) != len(bound):
                continue
            theta2 = theta
            for pat, val in zip(bound, out):
                theta2 = match_term(pat, val, theta2)
                if theta2 is None:
                    break
            if theta2 is not None:
                yield from walk_ext(theta2, rest)

    yield from walk({}, positive)


def pog(
    p: Program,
    facts: Iterable = (),
    constants: Iterable = (),
    registry: Optional[Registry] = None,
    limits: Limits = DEFAULT_LIMITS,
    external_outputs: Optional[dict] = None,
) -> Program:
    """Partially-optimized grounding of `p` with input `facts`.

    The result is a subset of the naive grounding of `p` plus `facts`
    (fact rules included) with the same answer sets.  `external_outputs`
    optionally maps ``(name, inputs)`` to an explicit output-tuple set,
    overriding registry evaluation under the current over-approximation
    (used by the monolithic input-enumeration mode).
    """
    del constants  # instantiation is match-driven; kept for signature parity
    derived = _Derivation()
    fact_atoms = sorted(set(facts), key=str)
    for a in fact_atoms:
        if not atom_is_ground(a):
            raise ProgramError(f"input fact {a} is not ground")
        derived.add(a)

    def outputs_for(lit: ExtLit):
        if external_outputs is not None and (lit.name, lit.inputs) in external_outputs:
            return external_outputs[(lit.name, lit.inputs)]
        if registry is None:
            raise ProgramError(f"no registry to ground external {lit}")
        decl = registry.get(lit.name)
        from .externals import extensions_for

        return decl.possible_outputs(extensions_for(lit.inputs, frozenset(derived.atoms)))

    instances: dict = {}
    changed = True
    while changed:
        changed = False
        for rule in p.rules:
            require = not rule.is_constraint
            for theta in _match_positive(rule, derived, require, outputs_for):
                inst = substitute_rule(rule, theta)
                if not rule_is_ground(Rule(inst.head, tuple(l for l in inst.body if not isinstance(l, CondLit)))):
                    continue  # locally-unbound external outputs etc.
                key = inst
                if key in instances:
                    continue
                checked = _finalize_instance(
                    Rule(inst.head, tuple(l for l in inst.body if not isinstance(l, CondLit)))
                )
                if checked is None:
                    instances[key] = None  # builtin-false: remember, emit nothing
                    continue
                conditionals = tuple(l for l in inst.body if isinstance(l, CondLit))
                instances[key] = Rule(checked.head, checked.body + conditionals)
                limits.require("ground_instances", len(instances))
                changed = True
                for h in inst.head:
                    derived.add(h)

    extension_by_pred: dict = {}
    for a in derived.atoms:
        extension_by_pred.setdefault(a.pred, set()).add(a)

    out = [Rule((a,), ()) for a in fact_atoms]
    for inst in instances.values():
        if inst is None:
            continue
        if any(isinstance(l, CondLit) for l in inst.body):
            needed = {l.condition.pred for l in inst.body if isinstance(l, CondLit)}
            for predname in needed:
                extension_by_pred.setdefault(predname, set())
            inst = expand_conditional(inst, extension_by_pred)
        out.append(inst)
    out.sort(key=render_rule)
    return program(out)


def condition_extensions(p: Program, facts: Iterable = (), registry=None) -> dict:
    """Extension map (pred -> ground atoms) from the derivability fixpoint;
    exact for predicates defined by facts or positively-guarded rules."""
    derived = _Derivation()
    for a in facts:
        derived.add(a)
    changed = True
    while changed:
        changed = False
        for rule in p.rules:
            for theta in _match_positive(rule, derived, not rule.is_constraint, None):
                inst = substitute_rule(rule, theta)
                for h in inst.head:
                    if atom_is_ground(h) and derived.add(h):
                        changed = True
    out: dict = {}
    for a in derived.atoms:
        out.setdefault(a.pred, set()).add(a)
    return out
