import pytest

from aspir.errors import ProgramError
from aspir.explain import (
    NotLiftable,
    analyze_nonground,
    analyze_with_solver,
    minimize_reason,
)
from aspir.externals import default_registry
from aspir.oracle import (
    instance_consistency_map,
    is_inconsistency_reason,
    is_minimal_ir,
)
from aspir.parser import parse_program
from aspir.reasons import reason, reason_constraint, render_reason
from aspir.rng import SplitMix64
from aspir.solver import AnswerSet, HandlerResult
from aspir.syntax import Atom, Const, normalize_constraints

from helpers import random_instance_with_domain

REG = default_registry()


def atoms(*names):
    return frozenset(Atom(n) for n in names)


def test_reason_from_constraint_pair():
    p = normalize_constraints(parse_program(":- a, not c. d :- b."))
    out = analyze_with_solver(p, facts=atoms("a"), domain=atoms("a", "b", "c"))
    assert isinstance(out, HandlerResult)
    assert out.value == reason(atoms("a"), atoms("c"))


def test_reason_single_fact():
    p = normalize_constraints(parse_program(":- x."))
    out = analyze_with_solver(p, facts=atoms("x"), domain=atoms("x"))
    assert out.value == reason(atoms("x"), frozenset())


def test_reason_missing_fact():
    p = normalize_constraints(parse_program(":- not x."))
    out = analyze_with_solver(p, facts=frozenset(), domain=atoms("x"))
    assert out.value == reason(frozenset(), atoms("x"))


def test_consistent_instance_returns_answer_set():
    p = normalize_constraints(parse_program("y :- x."))
    out = analyze_with_solver(p, facts=atoms("x"), domain=atoms("x"))
    assert isinstance(out, AnswerSet)
    assert out.interpretation == atoms("x", "y")


def test_domain_head_clash_rejected():
    p = parse_program("x.")
    with pytest.raises(ProgramError):
        analyze_with_solver(p, facts=frozenset(), domain=atoms("x"))


def test_extracted_reasons_sound_on_randoms():
    checked = 0
    for seed in range(120):
        p, domain, facts = random_instance_with_domain(
            SplitMix64.keyed("ir-sound", seed), max_atoms=5, max_rules=5, max_domain=4
        )
        p = normalize_constraints(p)
        out = analyze_with_solver(p, facts=facts, domain=domain)
        if isinstance(out, AnswerSet):
            continue
        checked += 1
        assert is_inconsistency_reason(p, domain, out.value)
    assert checked >= 20  # the generator must produce inconsistent instances


EX_LIFT = "q(X) :- p(X). :- not q(1). :- a."


def test_nonground_lifting_blocked_branch():
    p = parse_program(EX_LIFT)
    domain = {Atom("a"), Atom("p", (Const("1"),))}
    out = analyze_nonground(p, facts=frozenset(), domain=domain, constants={Const("1")})
    assert isinstance(out, NotLiftable)


def test_nonground_lifting_consistent_branch():
    p = parse_program(EX_LIFT)
    domain = {Atom("a"), Atom("p", (Const("1"),))}
    out = analyze_nonground(
        p, facts=frozenset([Atom("p", (Const("1"),))]), domain=domain, constants={Const("1")}
    )
    assert isinstance(out, AnswerSet)


def test_oracle_reason_for_lifting_fixture():
    # the brute-force reference confirms (absent a, absent p(1)) explains it
    from aspir.grounding import ground_naive

    p = parse_program(EX_LIFT)
    domain = {Atom("a"), Atom("p", (Const("1"),))}
    g = ground_naive(p, {Const("1")})
    assert is_inconsistency_reason(g, domain, reason(frozenset(), domain))


def test_ground_program_lifting_equals_direct_analysis():
    p = parse_program(":- a, not c. d :- b.")
    domain = atoms("a", "b", "c")
    direct = analyze_with_solver(normalize_constraints(p), facts=atoms("a"), domain=domain)
    lifted = analyze_nonground(p, facts=atoms("a"), domain=domain)
    assert lifted == direct.value


def test_lifted_reasons_hold_for_original_program():
    from aspir.grounding import ground_naive
    from aspir.syntax import herbrand_universe

    lifted, not_liftable = 0, 0
    for seed in range(50):
        rng = SplitMix64.keyed("lift", seed)
        consts = [Const(c) for c in ("c1", "c2")]
        d_atoms = [Atom("extra", (c,)) for c in consts]
        lines = ["p(X) :- d(X), extra(X).", "d(c1)."]
        if rng.chance(0.5):
            lines.append("q(X) :- d(X), not p(X).")
        if rng.chance(0.7):
            lines.append(":- p(c1).")
        if rng.chance(0.5):
            lines.append(":- extra(c2), not p(c2).")
        p = parse_program("\n".join(lines))
        facts = frozenset(a for a in d_atoms if rng.chance(0.5))
        out = analyze_nonground(p, facts=facts, domain=frozenset(d_atoms), constants=consts)
        if isinstance(out, AnswerSet):
            continue
        if isinstance(out, NotLiftable):
            not_liftable += 1
            continue
        lifted += 1
        g = ground_naive(p, herbrand_universe(p) | set(consts))
        assert is_inconsistency_reason(g, frozenset(d_atoms), out)
    assert lifted >= 1


def test_minimize_reason():
    p = parse_program(":- a. :- b.")
    domain = atoms("a", "b")
    big = reason(atoms("a", "b"), frozenset())
    small = minimize_reason(p, domain, big)
    assert small in {reason(atoms("a"), frozenset()), reason(atoms("b"), frozenset())}
    assert is_minimal_ir(p, domain, small)


def test_reason_constraint_blocks_covered_instances():
    r = reason(atoms("a"), atoms("c"))
    c = reason_constraint(r)
    assert str(c) == ":- a, not c."
    assert render_reason(r) == "IR: +{a} -{c}"
