import pytest

from aspir.errors import ProgramError
from aspir.grounding import condition_extensions, expand_conditional, ground_naive, pog
from aspir.oracle import answer_sets_bruteforce, with_facts
from aspir.parser import parse_program
from aspir.syntax import (
    Atom,
    Const,
    Func,
    OrdLit,
    herbrand_universe,
    normalize_constraints,
    project_interpretation,
)
from aspir.rng import SplitMix64

from helpers import random_instance_with_domain


def test_ground_naive_single_substitution():
    p = parse_program("q(X) :- p(X).")
    assert ground_naive(p, {Const("1")}) == parse_program("q(1) :- p(1).")


def test_ground_naive_two_constants():
    p = parse_program("q(X) :- p(X).")
    g = ground_naive(p, {Const("a"), Const("b")})
    assert set(g.rules) == set(parse_program("q(a) :- p(a). q(b) :- p(b).").rules)


def test_ground_naive_builtin_filter():
    p = parse_program("s :- i(X), i(Y), X != Y.")
    assert ground_naive(p, {Const("a")}) == parse_program("")
    g = ground_naive(p, {Const("a"), Const("b")})
    assert len(g.rules) == 2  # (a,b) and (b,a); equal pairs filtered


def test_ground_naive_requires_constants():
    with pytest.raises(ProgramError):
        ground_naive(parse_program("q(X) :- p(X)."), set())


EX_OPTIMIZED = "q(X) :- p(X). :- not q(1). :- a."


def test_pog_keeps_constraints_drops_underivable_rules():
    p = parse_program(EX_OPTIMIZED)
    g = pog(p, facts=())
    assert set(g.rules) == set(parse_program(":- not q(1). :- a.").rules)


def test_pog_fact_keeps_instance():
    p = parse_program("q(X) :- p(X).")
    g = pog(p, facts={Atom("p", (Const("1"),))})
    assert set(g.rules) == set(parse_program("p(1). q(1) :- p(1).").rules)


@pytest.mark.parametrize("facts", [(), ("p(1)",), ("a",), ("a", "p(1)")])
def test_pog_preserves_answer_sets(facts):
    p = parse_program(EX_OPTIMIZED)
    fact_atoms = {parse_program(f + ".").rules[0].head[0] for f in facts}
    g = normalize_constraints(pog(p, facts=fact_atoms))
    reference = normalize_constraints(
        with_facts(ground_naive(p, herbrand_universe(p)), fact_atoms)
    )
    left = {project_interpretation(i) for i in answer_sets_bruteforce(g)}
    right = {project_interpretation(i) for i in answer_sets_bruteforce(reference)}
    assert left == right


def test_pog_subset_of_naive_grounding():
    p = parse_program("q(X) :- p(X). p(1). r(X) :- q(X), not s(X).")
    g = pog(p)
    naive = set(ground_naive(p, herbrand_universe(p)).rules)
    assert all(r in naive for r in g.rules)


def test_pog_preserves_answer_sets_random():
    for seed in range(25):
        p, domain, facts = random_instance_with_domain(
            SplitMix64.keyed("pogrand", seed), max_atoms=5, max_rules=5, max_domain=3
        )
        g = normalize_constraints(pog(p, facts=facts))
        reference = normalize_constraints(with_facts(p, facts))
        left = {project_interpretation(i) for i in answer_sets_bruteforce(g)}
        right = {project_interpretation(i) for i in answer_sets_bruteforce(reference)}
        assert left == right


def cond_rule():
    return parse_program("inReduct(R) :- rule(R), COND(false(X) : bodyN(R,X)).").rules[0]


def ground_cond_rule():
    p = parse_program("inReduct(r1) :- rule(r1), COND(false(X) : bodyN(r1,X)).")
    return p.rules[0]


def test_expand_conditional_single_instance():
    ext = {"bodyN": {Atom("bodyN", (Const("r1"), Func("p", (Const("1"),))))}}
    r = expand_conditional(ground_cond_rule(), ext)
    assert OrdLit(Atom("false", (Func("p", (Const("1"),)),))) in r.body
    assert all(l.atom.pred != "bodyN" or True for l in r.body)


def test_expand_conditional_empty_extension():
    r = expand_conditional(ground_cond_rule(), {"bodyN": set()})
    assert r == parse_program("inReduct(r1) :- rule(r1).").rules[0]


def test_expand_conditional_two_instances():
    ext = {
        "bodyN": {
            Atom("bodyN", (Const("r1"), Const("p"))),
            Atom("bodyN", (Const("r1"), Const("q"))),
        }
    }
    r = expand_conditional(ground_cond_rule(), ext)
    false_lits = [l for l in r.body if l.atom.pred == "false"]
    assert len(false_lits) == 2


def test_expand_conditional_missing_extension():
    with pytest.raises(ProgramError):
        expand_conditional(ground_cond_rule(), {})


def test_condition_extensions_fixpoint():
    p = parse_program("head(f, d(a)). head(r1(X), q(X)) :- head(R, d(X)).")
    ext = condition_extensions(p)
    assert Atom("head", (Const("f"), Func("d", (Const("a"),)))) in ext["head"]
    assert Atom("head", (Func("r1", (Const("a"),)), Func("q", (Const("a"),)))) in ext["head"]
