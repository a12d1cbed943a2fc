import pytest

from aspir.errors import ProgramError
from aspir.externals import default_registry
from aspir.oracle import (
    answer_sets_bruteforce,
    check_ir_via_ufs,
    flp_reduct,
    gl_reduct,
    irs_bruteforce,
    is_answer_set,
    is_consistent,
    is_inconsistency_reason,
    is_minimal_ir,
    is_unfounded_set,
    tp_lfp,
    with_facts,
)
from aspir.parser import parse_program
from aspir.reasons import reason
from aspir.rng import SplitMix64
from aspir.syntax import Atom, atoms_of, normalize_constraints, program_is_normal

from helpers import random_ground_normal, random_instance_with_domain

REG = default_registry()


def atoms(*names):
    return frozenset(Atom(n) for n in names)


def test_gl_reduct():
    p = parse_program("a :- not b.")
    assert gl_reduct(p, frozenset()) == parse_program("a.")
    assert gl_reduct(p, atoms("b")) == parse_program("")
    p2 = parse_program("p :- q, not r. q.")
    assert gl_reduct(p2, atoms("p", "q")) == parse_program("p :- q. q.")


def test_flp_reduct():
    p = parse_program("p :- &id[p]().")
    assert flp_reduct(p, frozenset(), REG) == parse_program("")
    p2 = parse_program("a :- not b.")
    assert flp_reduct(p2, frozenset()) == p2
    p3 = parse_program("a :- b.")
    assert flp_reduct(p3, atoms("a")) == parse_program("")


def test_tp_lfp():
    assert tp_lfp(parse_program("a. b :- a.")) == atoms("a", "b")
    assert tp_lfp(parse_program("")) == frozenset()
    assert tp_lfp(parse_program("a :- b. b :- a.")) == frozenset()


def test_answer_sets_external_loop():
    p = parse_program("p :- &id[p]().")
    assert answer_sets_bruteforce(p, REG) == {frozenset()}


def test_answer_sets_even_loop():
    p = parse_program("a :- not b. b :- not a.")
    assert answer_sets_bruteforce(p) == {atoms("a"), atoms("b")}


SATURATION_3COL = """
r(X) v g(X) v b(X) :- node(X).
sat :- r(X), r(Y), edge(X,Y).
sat :- g(X), g(Y), edge(X,Y).
sat :- b(X), b(Y), edge(X,Y).
r(X) :- node(X), sat.
g(X) :- node(X), sat.
b(X) :- node(X), sat.
"""


def test_answer_sets_saturation_self_loop():
    from aspir.grounding import ground_naive
    from aspir.syntax import herbrand_universe

    text = SATURATION_3COL + "node(a). edge(a,a)."
    p = parse_program(text)
    ground = ground_naive(p, herbrand_universe(p))
    result = answer_sets_bruteforce(ground)
    assert result == {frozenset(atoms_of(ground))}


def test_gl_flp_agreement_on_random_programs():
    for seed in range(60):
        p = random_ground_normal(SplitMix64.keyed("glflp", seed), max_atoms=5, max_rules=6)
        p = normalize_constraints(p)
        assert program_is_normal(p)
        universe = sorted(atoms_of(p), key=str)
        for mask in range(1 << len(universe)):
            interp = frozenset(a for i, a in enumerate(universe) if mask >> i & 1)
            via_gl = interp == tp_lfp(gl_reduct(p, interp))
            via_flp = is_answer_set_flp(p, interp)
            assert via_gl == via_flp


def is_answer_set_flp(p, interp):
    from aspir.oracle import has_smaller_model, is_model

    return is_model(p, interp) and not has_smaller_model(p, interp)


def test_irs_contains_expected_reason():
    p = parse_program(":- a, not c. d :- b.")
    domain = atoms("a", "b", "c")
    result = irs_bruteforce(p, domain)
    assert reason([Atom("a")], [Atom("c")]) in result


def test_irs_two_constraints_full_set():
    p = parse_program(":- a. :- b.")
    domain = atoms("a", "b")
    a, b = Atom("a"), Atom("b")
    expected = {
        reason([a], []),
        reason([b], []),
        reason([a, b], []),
        reason([a], [b]),
        reason([b], [a]),
    }
    assert irs_bruteforce(p, domain) == expected


def test_is_minimal_ir():
    p = parse_program(":- a. :- b.")
    domain = atoms("a", "b")
    assert is_minimal_ir(p, domain, reason([Atom("a")], []))
    assert not is_minimal_ir(p, domain, reason([Atom("a"), Atom("b")], []))
    with pytest.raises(ProgramError):
        is_minimal_ir(p, domain, reason([], []))


def test_empty_reason_minimal_for_unconditionally_inconsistent():
    p = parse_program(":- not x.")
    domain = atoms("y")
    assert is_inconsistency_reason(p, domain, reason([], []))
    assert is_minimal_ir(p, domain, reason([], []))


def test_reason_existence_when_some_instance_inconsistent():
    # whenever some fact set breaks the program, (F, D \ F) is a reason
    for seed in range(40):
        p, domain, _ = random_instance_with_domain(SplitMix64.keyed("exist", seed))
        found_inconsistent = None
        for mask in range(1 << len(domain)):
            fact_set = frozenset(a for i, a in enumerate(domain) if mask >> i & 1)
            if not is_consistent(with_facts(p, fact_set)):
                found_inconsistent = fact_set
                break
        reasons = irs_bruteforce(p, domain)
        if found_inconsistent is not None:
            assert reasons
            assert reason(found_inconsistent, set(domain) - found_inconsistent) in reasons


def test_unfounded_set_examples():
    assert is_unfounded_set(atoms("a"), parse_program("a :- a."), atoms("a"))
    assert not is_unfounded_set(atoms("a"), parse_program("a."), atoms("a"))
    assert not is_unfounded_set(atoms("p"), parse_program("p :- q. q."), atoms("p", "q"))


def test_check_ir_via_ufs_examples():
    p = parse_program(":- a, not c. d :- b.")
    assert check_ir_via_ufs(p, atoms("a", "b", "c"), reason([Atom("a")], [Atom("c")]))
    p2 = parse_program(":- a. :- b.")
    assert check_ir_via_ufs(p2, atoms("a", "b"), reason([Atom("a")], [Atom("b")]))
    consistent = parse_program("a.")
    assert not check_ir_via_ufs(consistent, frozenset(), reason([], []))


def test_ufs_characterization_matches_definition():
    for seed in range(50):
        p, domain, _ = random_instance_with_domain(
            SplitMix64.keyed("ufs", seed), max_atoms=3, max_rules=4, max_domain=3
        )
        rng = SplitMix64.keyed("ufs-pick", seed)
        r_plus = frozenset(a for a in domain if rng.chance(0.3))
        r_minus = frozenset(a for a in domain if a not in r_plus and rng.chance(0.3))
        cand = reason(r_plus, r_minus)
        assert check_ir_via_ufs(p, domain, cand) == is_inconsistency_reason(p, domain, cand)


def test_model_condition_implies_reason():
    # one-way soundness: if every classical model breaks r_plus or meets
    # r_minus, the pair is a reason (converse not asserted)
    from aspir.oracle import is_model, _subsets, _universe

    for seed in range(40):
        p, domain, _ = random_instance_with_domain(
            SplitMix64.keyed("simple", seed), max_atoms=3, max_rules=4, max_domain=3
        )
        rng = SplitMix64.keyed("simple-pick", seed)
        r_plus = frozenset(a for a in domain if rng.chance(0.3))
        r_minus = frozenset(a for a in domain if a not in r_plus and rng.chance(0.3))
        universe = _universe(p)
        holds = all(
            (not r_plus <= m) or (r_minus & m)
            for m in _subsets(universe)
            if is_model(p, m)
        )
        if holds:
            assert is_inconsistency_reason(p, domain, reason(r_plus, r_minus))
