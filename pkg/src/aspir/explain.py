"""Extracting inconsistency reasons from level-zero conflicts.

When the solver hits a conflict with every implicated literal at decision
level zero, the violated nogood is resolved backwards along the trail until
only literals over the input domain remain; the true ones form the
must-be-present side of the reason, the false ones the must-be-absent side.

For non-ground programs the grounding may have optimized away rules that
other inputs would revive.  Every atom that could gain such hidden support
gets a companion rule `a :- prime(a)`; a reason that never mentions a
primed atom survives the lifting back to the original program, anything
else is reported as not liftable (sound, not complete).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .errors import ProgramError
from .externals import Registry
from .grounding import ground_naive, pog
from .limits import DEFAULT_LIMITS, Limits
from .nogoods import negate
from .oracle import is_inconsistency_reason
from .reasons import InconsistencyReason, reason
from .solver import AnswerSet, HandlerResult, solve
from .syntax import (
    Atom,
    OrdLit,
    Program,
    Rule,
    atom_sort_key,
    atom_to_term,
    atoms_of,
    head_atoms,
    normalize_constraints,
    program,
)

PRIME_PRED = "prime"


def prime_atom(a: Atom) -> Atom:
    return Atom(PRIME_PRED, (atom_to_term(a),))


def is_prime(a: Atom) -> bool:
    return a.pred == PRIME_PRED


@dataclass(frozen=True)
class NotLiftable:
    """The extracted reason leans on a primed atom, so it explains only the
    optimized grounding at hand, not the original program."""

    ground_reason: InconsistencyReason


def analyze_inconsistency(domain, nogoods, trail) -> InconsistencyReason:
    """Resolve the violated nogood backwards until only domain literals
    remain; requires the trail to be entirely at decision level zero."""
    domain = frozenset(domain)
    delta = trail.conflict
    if delta is None:
        delta = next((ng for ng in nogoods if all(l[1] in trail and trail.literal_of(l[1]) == l for l in ng)), None)
    if delta is None:
        raise ProgramError("no violated nogood on the trail")
    delta = set(delta)
    while True:
        outside = [l for l in delta if l[1] not in domain]
        if not outside:
            break
        # most recently assigned first, so the implicants precede it
        lit = max(outside, key=lambda l: trail.position(l[1]))
        epsilon = trail.reason_for(lit[1])
        if epsilon is None:
            raise ProgramError(f"literal {lit} has no implicant; trail corrupt")
        delta.discard(lit)
        delta |= set(epsilon) - {negate(lit)}
    return reason(
        frozenset(l[1] for l in delta if l[0]),
        frozenset(l[1] for l in delta if not l[0]),
    )


def h_analyze(domain):
    """Inconsistency handler computing a reason over `domain`."""

    def handler(nogoods, trail):
        return analyze_inconsistency(domain, nogoods, trail)

    return handler


def _check_analysis_inputs(p: Program, facts, domain) -> None:
    facts, domain = frozenset(facts), frozenset(domain)
    clash = domain & head_atoms(p)
    if clash:
        raise ProgramError(f"domain intersects rule heads: {sorted(map(str, clash))}")
    if not facts <= domain:
        raise ProgramError("input facts must come from the domain")


def analyze_with_solver(
    p: Program,
    facts=frozenset(),
    domain=frozenset(),
    registry: Optional[Registry] = None,
    limits: Limits = DEFAULT_LIMITS,
) -> Union[AnswerSet, HandlerResult]:
    """Solve `p` plus `facts`; on inconsistency return a reason over
    `domain` wrapped in a HandlerResult."""
    _check_analysis_inputs(p, facts, domain)
    return solve(
        p,
        frozenset(facts),
        handler=h_analyze(frozenset(domain)),
        registry=registry,
        limits=limits,
        extra_atoms=frozenset(domain),
    )


def analyze_nonground(
    p: Program,
    facts=frozenset(),
    domain=frozenset(),
    constants: Iterable = (),
    registry: Optional[Registry] = None,
    limits: Limits = DEFAULT_LIMITS,
):
    """Reason extraction through a partially-optimized grounding.

    Returns an AnswerSet when consistent, an InconsistencyReason valid for
    the original program, or NotLiftable when the extracted reason touches
    a primed atom.
    """
    facts, domain = frozenset(facts), frozenset(domain)
    _check_analysis_inputs(p, facts, domain)
    for a in atoms_of_safe(p):
        if is_prime(a):
            raise ProgramError(f"predicate {PRIME_PRED!r} is reserved for the lifting rules")
    ground = pog(p, facts=facts, registry=registry, limits=limits)
    fact_rules = {Rule((a,), ()) for a in facts}
    part = program(r for r in ground.rules if r not in fact_rules)
    # atoms that may gain support from instances this grounding dropped:
    # heads of naive instances absent from the optimized grounding
    from .syntax import herbrand_universe

    universe = herbrand_universe(p) | set(constants)
    naive = ground_naive(p, universe, registry) if universe else program(p.rules)
    kept = set(part.rules)
    targets = {h for r in naive.rules if r not in kept for h in r.head} - domain
    primed = [
        Rule((a,), (OrdLit(prime_atom(a)),)) for a in sorted(targets, key=atom_sort_key)
    ]
    combined = normalize_constraints(program(list(part.rules) + primed))
    full_domain = domain | {prime_atom(a) for a in sorted(targets, key=atom_sort_key)}
    outcome = solve(
        combined,
        facts,
        handler=h_analyze(full_domain),
        registry=registry,
        limits=limits,
        extra_atoms=domain,
    )
    if isinstance(outcome, AnswerSet):
        return outcome
    found: InconsistencyReason = outcome.value
    if any(is_prime(a) for a in found.r_plus | found.r_minus):
        return NotLiftable(found)
    return found


def atoms_of_safe(p: Program):
    """Predicate scan that tolerates non-ground programs."""
    out = set()
    for r in p.rules:
        out.update(r.head)
        for lit in r.body:
            if isinstance(lit, OrdLit):
                out.add(lit.atom)
    return out


def minimize_reason(
    p: Program,
    domain,
    found: InconsistencyReason,
    registry: Optional[Registry] = None,
    limits: Limits = DEFAULT_LIMITS,
) -> InconsistencyReason:
    """Greedy one-atom shrinking, each step validated by the brute-force
    check; the result is subset-minimal."""
    current = found
    changed = True
    while changed:
        changed = False
        for a in sorted(current.r_plus, key=atom_sort_key):
            cand = reason(current.r_plus - {a}, current.r_minus)
            if is_inconsistency_reason(p, domain, cand, registry, limits):
                current, changed = cand, True
                break
        if changed:
            continue
        for a in sorted(current.r_minus, key=atom_sort_key):
            cand = reason(current.r_plus, current.r_minus - {a})
            if is_inconsistency_reason(p, domain, cand, registry, limits):
                current, changed = cand, True
                break
    return current
