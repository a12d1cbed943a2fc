"""Brute-force reference semantics: the trusted test oracle.

Deliberately naive; every enumeration is bounded by explicit limits and
bails out with `LimitError` rather than truncating.  Interpretations are
frozensets of true atoms (everything else is false).
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Iterator, Optional

from .errors import ProgramError
from .externals import Registry, evaluate_external
from .limits import DEFAULT_LIMITS, Limits
from .reasons import InconsistencyReason, reason
from .syntax import (
    Atom,
    BuiltinLit,
    ExtLit,
    OrdLit,
    Program,
    Rule,
    atom_sort_key,
    atoms_of,
    eval_builtin,
    head_atoms,
    program_is_ground,
    program_is_normal,
    program_is_ordinary,
    program,
)

Interpretation = frozenset


def facts_program(fact_atoms: Iterable[Atom]) -> Program:
    return program(Rule((a,), ()) for a in sorted(fact_atoms, key=atom_sort_key))


def with_facts(p: Program, fact_atoms: Iterable[Atom]) -> Program:
    extra = tuple(Rule((a,), ()) for a in sorted(fact_atoms, key=atom_sort_key))
    return Program(p.rules + extra, p.unit_markers)


def satisfies(lit, interp: Interpretation, registry: Optional[Registry] = None) -> bool:
    if isinstance(lit, OrdLit):
        value = lit.atom in interp
    elif isinstance(lit, BuiltinLit):
        return eval_builtin(lit)  # negation already folded in
    elif isinstance(lit, ExtLit):
        if registry is None:
            raise ProgramError(f"no oracle registry supplied for {lit}")
        value = evaluate_external(registry.get(lit.name), interp, lit.inputs, lit.outputs)
    else:
        raise ProgramError(f"cannot evaluate body literal {lit}")
    return not value if getattr(lit, "negated", False) else value


def body_satisfied(rule: Rule, interp: Interpretation, registry=None) -> bool:
    return all(satisfies(l, interp, registry) for l in rule.body)


def rule_satisfied(rule: Rule, interp: Interpretation, registry=None) -> bool:
    if any(h in interp for h in rule.head):
        return True
    return not body_satisfied(rule, interp, registry)


def is_model(p: Program, interp: Interpretation, registry=None) -> bool:
    return all(rule_satisfied(r, interp, registry) for r in p.rules)


# ---------------------------------------------------------------------------
# reducts and the consequence operator


def gl_reduct(p: Program, interp: Interpretation) -> Program:
    """Keep rules with no true default-negated atom, stripped of their
    negative bodies; requires a ground ordinary normalized program."""
    out = []
    for r in p.rules:
        positive = []
        keep = True
        for lit in r.body:
            if isinstance(lit, OrdLit):
                if lit.negated:
                    if lit.atom in interp:
                        keep = False
                        break
                else:
                    positive.append(lit)
            elif isinstance(lit, BuiltinLit):
                if not eval_builtin(lit):
                    keep = False
                    break
            else:
                raise ProgramError(f"reduct over non-ordinary body literal {lit}")
        if keep:
            out.append(Rule(r.head, tuple(positive)))
    return program(out)


def flp_reduct(p: Program, interp: Interpretation, registry=None) -> Program:
    """Keep exactly the rules whose entire body is satisfied."""
    return program(r for r in p.rules if body_satisfied(r, interp, registry))


def tp_lfp(p: Program) -> Interpretation:
    """Least model of a positive ground normal program by fixpoint
    iteration from the empty set."""
    for r in p.rules:
        if len(r.head) != 1:
            raise ProgramError("consequence operator needs normal rules")
        for lit in r.body:
            if not isinstance(lit, (OrdLit, BuiltinLit)) or getattr(lit, "negated", False):
                raise ProgramError(f"consequence operator needs a positive program; found {lit}")
    derived: set = set()
    changed = True
    while changed:
        changed = False
        for r in p.rules:
            if r.head[0] in derived:
                continue
            ok = True
            for lit in r.body:
                if isinstance(lit, BuiltinLit):
                    ok = eval_builtin(lit)
                else:
                    ok = lit.atom in derived
                if not ok:
                    break
            if ok:
                derived.add(r.head[0])
                changed = True
    return frozenset(derived)


# ---------------------------------------------------------------------------
# answer sets by exhaustive enumeration


def _universe(p: Program) -> list:
    return sorted(atoms_of(p), key=atom_sort_key)


def _subsets(atoms: list) -> Iterator[frozenset]:
    n = len(atoms)
    for mask in range(1 << n):
        yield frozenset(atoms[i] for i in range(n) if mask >> i & 1)


def has_smaller_model(p: Program, interp: Interpretation, registry=None) -> bool:
    """Is there a model of the satisfied-body reduct that is a proper subset
    of `interp` on true atoms (false atoms stay false)?"""
    reduct = flp_reduct(p, interp, registry)
    true_atoms = sorted(interp, key=atom_sort_key)
    for k in range(len(true_atoms)):
        for kept in combinations(true_atoms, k):
            if is_model(reduct, frozenset(kept), registry):
                return True
    return False


def _is_answer_set_gl(p: Program, interp: Interpretation) -> bool:
    """GL-based test for ordinary normal programs; constraints are checked
    natively (the fixpoint runs over the proper rules of the reduct)."""
    reduct = gl_reduct(p, interp)
    proper = program(r for r in reduct.rules if r.head)
    if interp != tp_lfp(proper):
        return False
    return all(rule_satisfied(r, interp) for r in reduct.rules if not r.head)


def is_answer_set(p: Program, interp: Interpretation, registry=None) -> bool:
    if program_is_ordinary(p) and program_is_normal(p):
        return _is_answer_set_gl(p, interp)
    return is_model(p, interp, registry) and not has_smaller_model(p, interp, registry)


def answer_sets_bruteforce(
    p: Program, registry=None, limits: Limits = DEFAULT_LIMITS
) -> frozenset:
    """All answer sets, by checking every complete assignment."""
    if not program_is_ground(p):
        raise ProgramError("the reference enumerator needs a ground program")
    atoms = _universe(p)
    limits.require("oracle_atoms", len(atoms))
    normal_ordinary = program_is_ordinary(p) and program_is_normal(p)
    out = []
    for interp in _subsets(atoms):
        if normal_ordinary:
            if _is_answer_set_gl(p, interp):
                out.append(interp)
        elif is_model(p, interp, registry) and not has_smaller_model(p, interp, registry):
            out.append(interp)
    return frozenset(out)


def is_consistent(p: Program, registry=None, limits: Limits = DEFAULT_LIMITS) -> bool:
    """Early-exit consistency check (any answer set at all?)."""
    if not program_is_ground(p):
        raise ProgramError("the reference enumerator needs a ground program")
    atoms = _universe(p)
    limits.require("oracle_atoms", len(atoms))
    normal_ordinary = program_is_ordinary(p) and program_is_normal(p)
    for interp in _subsets(atoms):
        if normal_ordinary:
            if _is_answer_set_gl(p, interp):
                return True
        elif is_model(p, interp, registry) and not has_smaller_model(p, interp, registry):
            return True
    return False


# ---------------------------------------------------------------------------
# inconsistency reasons by definition


def _check_domain(p: Program, domain: Iterable[Atom]) -> list:
    domain = sorted(set(domain), key=atom_sort_key)
    clash = set(domain) & head_atoms(p)
    if clash:
        raise ProgramError(f"input domain intersects rule heads: {sorted(map(str, clash))}")
    return domain


def instance_consistency_map(p: Program, domain, registry=None, limits=DEFAULT_LIMITS) -> dict:
    """fact-set -> is `p` plus those facts consistent, for every subset."""
    domain = _check_domain(p, domain)
    limits.require("ir_domain", len(domain))
    out = {}
    for fact_set in _subsets(domain):
        out[fact_set] = is_consistent(with_facts(p, fact_set), registry, limits)
    return out


def is_inconsistency_reason(
    p: Program, domain, candidate: InconsistencyReason, registry=None, limits=DEFAULT_LIMITS
) -> bool:
    """Definition-level check: every compatible fact set is inconsistent."""
    domain = _check_domain(p, domain)
    free = [a for a in domain if a not in candidate.r_plus and a not in candidate.r_minus]
    if not (candidate.r_plus <= set(domain) and candidate.r_minus <= set(domain)):
        raise ProgramError("reason mentions atoms outside the domain")
    for extra in _subsets(free):
        fact_set = frozenset(candidate.r_plus) | extra
        if is_consistent(with_facts(p, fact_set), registry, limits):
            return False
    return True


def irs_bruteforce(p: Program, domain, registry=None, limits=DEFAULT_LIMITS) -> frozenset:
    """All inconsistency reasons over `domain`, by Definition."""
    domain = _check_domain(p, domain)
    limits.require("ir_domain", len(domain))
    consistent = instance_consistency_map(p, domain, registry, limits)
    out = []
    # status per atom: + / - / free, i.e. 3^(|domain|) candidates
    def assign(idx: int, r_plus: set, r_minus: set) -> None:
        if idx == len(domain):
            cand = reason(r_plus, r_minus)
            if all(not consistent[f] for f in consistent if cand.covers(f)):
                out.append(cand)
            return
        a = domain[idx]
        assign(idx + 1, r_plus | {a}, r_minus)
        assign(idx + 1, r_plus, r_minus | {a})
        assign(idx + 1, r_plus, r_minus)

    assign(0, set(), set())
    return frozenset(out)


def is_minimal_ir(
    p: Program, domain, candidate: InconsistencyReason, registry=None, limits=DEFAULT_LIMITS
) -> bool:
    """Subset-minimality; checking one-element shrinks suffices because the
    covered instance sets only grow when a reason shrinks."""
    if not is_inconsistency_reason(p, domain, candidate, registry, limits):
        raise ProgramError(f"{candidate} is not an inconsistency reason")
    for a in candidate.r_plus:
        if is_inconsistency_reason(p, domain, reason(candidate.r_plus - {a}, candidate.r_minus), registry, limits):
            return False
    for a in candidate.r_minus:
        if is_inconsistency_reason(p, domain, reason(candidate.r_plus, candidate.r_minus - {a}), registry, limits):
            return False
    return True


# ---------------------------------------------------------------------------
# unfounded sets


def is_unfounded_set(u, p: Program, interp: Interpretation, registry=None) -> bool:
    """Unfounded-set test: every rule whose head meets `u` is disarmed by
    one of the three conditions (false body literal; body literal false
    after removing `u`; satisfied head atom outside `u`)."""
    u = frozenset(u)
    without = interp - u
    for r in p.rules:
        if not (set(r.head) & u):
            continue
        if any(not satisfies(l, interp, registry) for l in r.body):
            continue
        if any(not satisfies(l, without, registry) for l in r.body):
            continue
        if any(h in interp for h in r.head if h not in u):
            continue
        return False
    return True


def check_ir_via_ufs(
    p: Program, domain, candidate: InconsistencyReason, registry=None, limits=DEFAULT_LIMITS
) -> bool:
    """Model/unfounded-set characterization of reasons: every classical
    model either misses part of `r_plus` or supports a nonempty unfounded
    set that avoids the still-allowed domain atoms."""
    domain = _check_domain(p, domain)
    atoms = sorted(atoms_of(p) | set(domain), key=atom_sort_key)
    limits.require("oracle_atoms", len(atoms))
    allowed = set(domain) - candidate.r_minus
    ufs_pool = [a for a in atoms_of(p) if a not in allowed]
    for interp in _subsets(atoms):
        if not is_model(p, interp, registry):
            continue
        if not (candidate.r_plus <= interp):
            continue
        found = False
        for u in _subsets(ufs_pool):
            if u and (u & interp) and is_unfounded_set(u, p, interp, registry):
                found = True
                break
        if not found:
            return False
    return True
