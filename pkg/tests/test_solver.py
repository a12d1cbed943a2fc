import pytest

from aspir.externals import default_registry
from aspir.nogoods import flit, tlit
from aspir.oracle import answer_sets_bruteforce, is_answer_set, with_facts
from aspir.parser import parse_program
from aspir.rng import SplitMix64
from aspir.solver import (
    AnswerSet,
    HandlerResult,
    TrailEntry,
    analyze_conflict,
    enumerate_answer_sets,
    h_bottom,
    propagate,
    rewrite_guessing_program,
    solve,
    solve_disjunctive,
)
from aspir.syntax import (
    Atom,
    Const,
    atoms_of,
    normalize_constraints,
    project_interpretation,
)

from helpers import random_ground_normal

REG = default_registry()


def a(name):
    return Atom(name)


def atoms(*names):
    return frozenset(Atom(n) for n in names)


# ------------------------------------------------------------- rewrite step


def test_rewrite_guessing_program():
    p = parse_program("p :- q, &neg[p]().")
    hat, occ = rewrite_guessing_program(p)
    assert len(occ) == 1
    repl = occ[0].replacement
    texts = {str(r) for r in hat.rules}
    assert f"p :- q, {repl}." in texts
    assert any(":- not" in t and "__ne_neg" in t for t in texts) or len(hat.rules) == 3


def test_rewrite_ordinary_program_unchanged():
    p = parse_program("x :- y, not z.")
    hat, occ = rewrite_guessing_program(p)
    assert hat.rules == p.rules and occ == []


def test_rewrite_two_externals_two_guesses():
    p = parse_program("x :- &id[y](). w :- &neg[y]().")
    hat, occ = rewrite_guessing_program(p)
    assert len(occ) == 2
    assert len(hat.rules) == 2 + 4


# --------------------------------------------------------------- propagate


def test_propagate_unit_rule():
    ng = frozenset([tlit(a("a")), flit(a("b"))])
    trail = [TrailEntry((True, a("a")), 1, None)]
    out, conflict = propagate([ng], trail)
    assert conflict is None
    assert out[-1] == TrailEntry((True, a("b")), 1, ng)


def test_propagate_conflict():
    ng = frozenset([tlit(a("a"))])
    trail = [TrailEntry((True, a("a")), 0, None)]
    _, conflict = propagate([ng], trail)
    assert conflict == ng


def test_propagate_fixpoint_no_change():
    trail = [TrailEntry((True, a("a")), 0, None)]
    out, conflict = propagate([frozenset([tlit(a("x")), tlit(a("y"))])], trail)
    assert conflict is None and out == trail


# ------------------------------------------------------- conflict analysis


def test_analyze_conflict_one_resolution_step():
    # the four-nogood chain: T a@1 guessed, F b@1 via d1, T c@1 via d2,
    # T d@2 guessed, T e@2 via d3; d4 violated by T d and T e
    d1 = frozenset([tlit(a("a")), tlit(a("b"))])
    d2 = frozenset([tlit(a("a")), flit(a("b")), flit(a("c"))])
    d3 = frozenset([tlit(a("c")), tlit(a("d")), flit(a("e"))])
    d4 = frozenset([tlit(a("d")), tlit(a("e"))])
    trail = [
        TrailEntry((True, a("a")), 1, None),
        TrailEntry((False, a("b")), 1, d1),
        TrailEntry((True, a("c")), 1, d2),
        TrailEntry((True, a("d")), 2, None),
        TrailEntry((True, a("e")), 2, d3),
    ]
    learned, backjump = analyze_conflict(d4, trail)
    assert learned == frozenset([tlit(a("c")), tlit(a("d"))])
    assert backjump == 1


def test_analyze_conflict_already_uip():
    d = frozenset([tlit(a("x")), tlit(a("y"))])
    trail = [
        TrailEntry((True, a("x")), 0, frozenset([flit(a("x"))])),
        TrailEntry((True, a("y")), 1, None),
    ]
    learned, backjump = analyze_conflict(d, trail)
    assert learned == d
    assert backjump == 0


def test_learned_nogood_is_resolvent():
    d1 = frozenset([tlit(a("a")), flit(a("b"))])
    d3 = frozenset([tlit(a("b")), flit(a("c"))])
    d2 = frozenset([tlit(a("b")), tlit(a("c"))])
    trail = [
        TrailEntry((True, a("a")), 1, None),
        TrailEntry((True, a("b")), 1, d1),
        TrailEntry((True, a("c")), 1, d3),
    ]
    learned, backjump = analyze_conflict(d2, trail)
    # one resolution of d2 with d3 on c reaches the first UIP b
    assert learned == frozenset([tlit(a("b"))])
    assert backjump == 0


# ------------------------------------------------------------------- solve


def test_solve_external_loop():
    p = parse_program("p :- &id[p]().")
    out = solve(p, registry=REG)
    assert out == AnswerSet(frozenset())


def test_solve_even_loop_deterministic():
    p = parse_program("a :- not b. b :- not a.")
    out = solve(p)
    assert isinstance(out, AnswerSet)
    assert out.interpretation in {atoms("a"), atoms("b")}
    assert out.interpretation == atoms("a")  # pinned by the F-first policy


def test_solve_fact_conflict_calls_handler():
    p = normalize_constraints(parse_program(":- x."))
    out = solve(p, facts=atoms("x"))
    assert out == HandlerResult(None)


def test_solve_agrees_with_oracle_on_randoms():
    for seed in range(150):
        rng = SplitMix64.keyed("solve-rand", seed)
        p = normalize_constraints(random_ground_normal(rng, 5, 7, externals=True))
        expected = answer_sets_bruteforce(p, REG)
        got = solve(p, registry=REG)
        if expected:
            assert isinstance(got, AnswerSet)
            assert got.interpretation in expected
        else:
            assert got == HandlerResult(None)


def test_enumerate_matches_oracle():
    for seed in range(80):
        rng = SplitMix64.keyed("enum-rand", seed)
        p = normalize_constraints(random_ground_normal(rng, 5, 6))
        expected = answer_sets_bruteforce(p)
        got, leftover = enumerate_answer_sets(p)
        assert got == expected
        assert (leftover is None) == bool(expected)


def test_unfounded_loop_rejected():
    p = parse_program("a :- a.")
    out = solve(p)
    assert out == AnswerSet(frozenset())


def test_solve_with_facts():
    p = parse_program("y :- x, not z.")
    out = solve(p, facts=atoms("x"))
    assert out == AnswerSet(atoms("x", "y"))


# -------------------------------------------------------------- disjunctive


def test_disjunctive_fact():
    p = parse_program("a v b.")
    assert solve_disjunctive(p) == {atoms("a"), atoms("b")}


def test_disjunctive_saturation_self_loop():
    from aspir.grounding import ground_naive
    from aspir.syntax import herbrand_universe
    from tests_fixture_3col import SATURATION_3COL  # noqa

    text = SATURATION_3COL + "node(a). edge(a,a)."
    p = parse_program(text)
    g = ground_naive(p, herbrand_universe(p))
    got = solve_disjunctive(g)
    assert got == answer_sets_bruteforce(g)
    assert len(got) == 1  # only the saturated interpretation


def test_disjunctive_saturation_colorable():
    from aspir.grounding import ground_naive
    from aspir.syntax import herbrand_universe
    from tests_fixture_3col import SATURATION_3COL  # noqa

    text = SATURATION_3COL + "node(a). node(b). edge(a,b)."
    p = parse_program(text)
    g = ground_naive(p, herbrand_universe(p))
    got = solve_disjunctive(g)
    assert got == answer_sets_bruteforce(g)
    # proper 2-node colorings: 3 colors for a, 2 remaining for b
    assert len(got) == 6


def test_disjunctive_matches_oracle_on_randoms():
    from aspir.syntax import OrdLit, Rule, program

    for seed in range(40):
        rng = SplitMix64.keyed("disj", seed)
        base = random_ground_normal(rng, 4, 4)
        extra = []
        pool = [Atom(c) for c in "abcd"]
        for _ in range(rng.randint(1, 2)):
            heads = tuple(rng.sample(pool, 2))
            body = tuple(
                OrdLit(x, negated=rng.chance(0.5)) for x in rng.sample(pool, rng.randint(0, 1))
            )
            extra.append(Rule(heads, body))
        p = normalize_constraints(program(list(base.rules) + extra))
        assert solve_disjunctive(p) == answer_sets_bruteforce(p)
