"""Meta-programs deciding inconsistency of a normal subprogram.

The static part guesses an answer-set candidate of the encoded program,
simulates the least model of its reduct by guessing a derivation order, and
derives `noAS` whenever the candidate fails; a saturation part then floods
the guess, so the flooded interpretation is an answer set exactly when
every candidate fails.  Consequences:

* the combined program always has answer sets;
* it has exactly one answer set containing `noAS` iff the encoded program
  is inconsistent;
* otherwise the `true/1` projections of its answer sets are exactly the
  encoded program's answer sets.

On top of this live brave/cautious query rewriting (a query atom becomes a
`noAS` literal of a namespaced copy) and the reason-enumeration program
whose answer sets decode to all inconsistency reasons over a domain.
"""

from __future__ import annotations

from typing import Iterable, Optional

from .errors import ProgramError
from .grounding import ground_naive, pog
from .limits import DEFAULT_LIMITS, Limits
from .oracle import answer_sets_bruteforce, is_consistent, with_facts
from .parser import parse_program
from .reasons import InconsistencyReason, reason
from .solver import solve_disjunctive
from .syntax import (
    AUX_PREFIX,
    Atom,
    BuiltinLit,
    CondLit,
    Const,
    Func,
    OrdLit,
    Program,
    QueryLit,
    Rule,
    Var,
    atom_sort_key,
    atom_to_term,
    atoms_of,
    herbrand_universe,
    normalize_constraints,
    program,
    program_is_ground,
    program_is_normal,
    term_to_atom,
)

NO_AS = Atom("noAS")

# The static checker.  `derivationSeq(a,b)` reads "a is derived before b";
# the rule deriving lexicographically-smallest-first prunes permutations of
# the guessed order.  A rule whose head recurs in its own positive body can
# never fire first, which the strict order cannot express for the
# head-equals-body-atom case, hence the dedicated notApp rule.
_META_TEXT = """
atom(X) :- head(R,X).
atom(X) :- bodyP(R,X).
atom(X) :- bodyN(R,X).
rule(R) :- head(R,X).
rule(R) :- bodyP(R,X).
rule(R) :- bodyN(R,X).

true(X) v false(X) :- atom(X).

inReduct(R) :- rule(R), COND(false(X) : bodyN(R,X)).
outReduct(R) :- rule(R), bodyN(R,X), true(X).

derivationSeq(X,Y) v derivationSeq(Y,X) :- true(X), true(Y), X != Y.
derivationSeq(X,Z) :- derivationSeq(X,Y), derivationSeq(Y,Z).
derivationSeq(X1,X2) :- head(R,X1), COND(derivationSeq(Y,X1) : bodyP(R,Y)), atom(X2), COND(derivationSeq(Y,X2) : bodyP(R,Y)), X2 > X1.

notApp(R) :- outReduct(R).
notApp(R) :- inReduct(R), bodyP(R,X), false(X).
notApp(R) :- head(R,X1), bodyP(R,X2), derivationSeq(X1,X2).
notApp(R) :- head(R,X), bodyP(R,X).

noAS :- true(X), COND(notApp(R) : head(R,X)).
noAS :- inReduct(R), head(R,X), false(X), COND(true(Y) : bodyP(R,Y)).

true(X) :- atom(X), noAS.
false(X) :- atom(X), noAS.
derivationSeq(X,Y) :- atom(X), atom(Y), noAS.
inReduct(R) :- rule(R), noAS.
outReduct(R) :- rule(R), noAS.
"""


def build_M() -> Program:
    return parse_program(_META_TEXT)


def _require_normal_ordinary(p: Program, where: str) -> None:
    for r in p.rules:
        if len(r.head) != 1:
            raise ProgramError(f"{where} needs a normalized normal program")
        for lit in r.body:
            if not isinstance(lit, OrdLit):
                raise ProgramError(f"{where} cannot encode body literal {lit}")


def _rule_const(k: int) -> Const:
    return Const(f"r{k}")


def encode_ground(p: Program) -> Program:
    """Facts head/2, bodyP/2, bodyN/2 describing a ground normal program;
    rule constants are numbered in textual order and the encoded atoms
    appear as function terms."""
    if not program_is_ground(p):
        raise ProgramError("ground encoding needs a ground program")
    _require_normal_ordinary(p, "ground encoding")
    facts = []
    for k, r in enumerate(p.rules, start=1):
        rc = _rule_const(k)
        facts.append(Rule((Atom("head", (rc, atom_to_term(r.head[0]))),), ()))
        for lit in r.body:
            pred = "bodyN" if lit.negated else "bodyP"
            facts.append(Rule((Atom(pred, (rc, atom_to_term(lit.atom))),), ()))
    return program(facts)


def _fresh_guard_vars(rule: Rule, count: int) -> list:
    taken = set()
    for a in rule.head:
        taken.update(v for v in _vars_of_atom(a))
    for lit in rule.body:
        taken.update(_vars_of_atom(lit.atom))
    out = []
    i = 1
    while len(out) < count:
        name = f"Rg{i}"
        if name not in taken:
            out.append(Var(name))
        i += 1
    return out


def _vars_of_atom(a: Atom):
    from .syntax import atom_vars

    return set(atom_vars(a))


def encode_nonground(p: Program) -> Program:
    """Rules deriving head/2, bodyP/2, bodyN/2 for every instance of a
    (possibly non-ground) normal program.  Atoms appear as function terms;
    each rule gets the identifier `rk(vars)`; one domain guard
    `head(Rg, d)` per positive body atom keeps the encoding safe and
    instantiates it with all derivable ground instances."""
    _require_normal_ordinary(p, "non-ground encoding")
    rules = []
    for k, r in enumerate(p.rules, start=1):
        from .syntax import rule_vars

        rvars = sorted(rule_vars(r))
        rc = Func(f"r{k}", tuple(Var(v) for v in rvars)) if rvars else _rule_const(k)
        positive = [lit.atom for lit in r.body if not lit.negated]
        guards = tuple(
            OrdLit(Atom("head", (g, atom_to_term(d))))
            for g, d in zip(_fresh_guard_vars(r, len(positive)), positive)
        )
        rules.append(Rule((Atom("head", (rc, atom_to_term(r.head[0]))),), guards))
        for lit in r.body:
            pred = "bodyN" if lit.negated else "bodyP"
            rules.append(Rule((Atom(pred, (rc, atom_to_term(lit.atom))),), guards))
    return program(rules)


def encode(p: Program, style: str = "auto") -> Program:
    if style == "ground" or (style == "auto" and program_is_ground(p)):
        return encode_ground(p)
    return encode_nonground(p)


def ground_meta(meta: Program, limits: Limits = DEFAULT_LIMITS) -> Program:
    """Instantiate a meta-program: match-driven grounding with conditional
    expansion against the derivability fixpoint."""
    return pog(meta, facts=(), registry=None, limits=limits)


def meta_program(p: Program, style: str = "auto") -> Program:
    base = normalize_constraints(p)
    return program(list(build_M().rules) + list(encode(base, style).rules))


def meta_answer_sets(p: Program, style: str = "auto", limits: Limits = DEFAULT_LIMITS):
    """Answer sets of the inconsistency-checking meta-program."""
    ground = ground_meta(meta_program(p, style), limits)
    return solve_disjunctive(
        normalize_constraints(ground), limits=limits, projection_preds={"true", "noAS"}
    )


def decode_true_projection(meta_as: frozenset) -> frozenset:
    return frozenset(term_to_atom(a.args[0]) for a in meta_as if a.pred == "true")


def check_inconsistency_meta(
    p: Program, style: str = "auto", limits: Limits = DEFAULT_LIMITS
) -> bool:
    """True iff the meta-program reports the encoded program inconsistent
    (some, equivalently the unique, answer set contains `noAS`)."""
    return any(NO_AS in a for a in meta_answer_sets(p, style, limits))


# ---------------------------------------------------------------------------
# query atoms


def _namespace(prefix: str, p: Program) -> Program:
    def rename_atom(a: Atom) -> Atom:
        return Atom(prefix + a.pred, a.args)

    out = []
    for r in p.rules:
        head = tuple(rename_atom(a) for a in r.head)
        body = []
        for lit in r.body:
            if isinstance(lit, OrdLit):
                body.append(OrdLit(rename_atom(lit.atom), lit.negated))
            elif isinstance(lit, CondLit):
                body.append(
                    CondLit(
                        OrdLit(rename_atom(lit.template.atom), lit.template.negated),
                        rename_atom(lit.condition),
                    )
                )
            elif isinstance(lit, BuiltinLit):
                body.append(lit)
            else:
                raise ProgramError(f"cannot namespace body literal {lit}")
        out.append(Rule(head, tuple(body)))
    return program(out)


def _query_tag(k: int) -> str:
    return f"{AUX_PREFIX}q{k}_"


def _query_constraints(lit: QueryLit) -> list:
    if lit.mode == "cautious":
        return [Rule((), tuple(lit.query))]
    # brave: one constraint per negated query literal
    return [Rule((), (OrdLit(l.atom, not l.negated),)) for l in lit.query]


def _check_inputs_fact_defined(p: Program, inputs: tuple) -> None:
    for pred in inputs:
        for r in p.rules:
            for h in r.head:
                if h.pred == pred and not r.is_fact:
                    raise ProgramError(
                        f"query input predicate {pred!r} must be defined by facts"
                    )


def _subprogram_of(lit: QueryLit, loader) -> Program:
    if lit.subprogram is not None:
        return lit.subprogram
    if loader is not None:
        return loader(lit.path)
    raise ProgramError(f"subprogram {lit.path!r} was not resolved at parse time")


def rewrite_queries(p: Program, loader=None) -> Program:
    """Eliminate query atoms: each becomes the `noAS` literal of its own
    namespaced inconsistency check, with bridging rules feeding the calling
    program's input-predicate atoms into the copy as facts."""
    queries: dict = {}
    replaced = []
    for r in p.rules:
        body = []
        for lit in r.body:
            if not isinstance(lit, QueryLit):
                body.append(lit)
                continue
            key = (lit.mode, lit.path, lit.inputs, lit.query)
            if key not in queries:
                queries[key] = (len(queries) + 1, lit)
            k, _ = queries[key]
            no_as = Atom(_query_tag(k) + "noAS")
            if lit.mode == "cautious":
                body.append(OrdLit(no_as, lit.negated))
            else:
                # brave: not noAS; double negation cancels under `not`
                body.append(OrdLit(no_as, not lit.negated))
        replaced.append(Rule(r.head, tuple(body)))

    out = list(replaced)
    for (mode, path, inputs, query), (k, lit) in sorted(queries.items(), key=lambda kv: kv[1][0]):
        sub = _subprogram_of(lit, loader)
        if not program_is_normal(sub):
            raise ProgramError(f"query subprogram {path!r} must be normal")
        if any(isinstance(l, QueryLit) for r in sub.rules for l in r.body):
            raise ProgramError("nested query atoms are not supported")
        _check_inputs_fact_defined(p, inputs)
        s_ext = program(list(sub.rules) + _query_constraints(lit))
        if any(isinstance(l, BuiltinLit) for r in s_ext.rules for l in r.body):
            consts = herbrand_universe(s_ext) | herbrand_universe(p)
            s_ext = ground_naive(s_ext, consts)
        s_norm = normalize_constraints(s_ext)
        copy = program(list(build_M().rules) + list(encode_nonground(s_norm).rules))
        out.extend(_namespace(_query_tag(k), copy).rules)
        for pred in inputs:
            arity = _input_arity(p, sub, pred)
            pvars = tuple(Var(f"X{i}") for i in range(1, arity + 1))
            patom = Atom(pred, pvars)
            idterm = Func(f"rin_{pred}", pvars) if pvars else Const(f"rin_{pred}")
            head = Atom(_query_tag(k) + "head", (idterm, atom_to_term(patom)))
            out.append(Rule((head,), (OrdLit(patom),)))
    return program(out)


def _input_arity(p: Program, sub: Program, pred: str) -> int:
    for q in (p, sub):
        for r in q.rules:
            for a in r.head:
                if a.pred == pred:
                    return len(a.args)
            for lit in r.body:
                if isinstance(lit, OrdLit) and lit.atom.pred == pred:
                    return len(lit.atom.args)
    raise ProgramError(f"query input predicate {pred!r} does not occur anywhere")


def answer_sets_with_queries(p: Program, loader=None, limits: Limits = DEFAULT_LIMITS):
    """Answer sets of a program with query atoms, projected to its own
    (non-auxiliary) atoms."""
    rewritten = rewrite_queries(p, loader)
    ground = ground_meta(rewritten, limits)
    original = {a.pred for r in p.rules for a in r.head}
    original |= {
        l.atom.pred for r in p.rules for l in r.body if isinstance(l, OrdLit)
    }
    sets = solve_disjunctive(
        normalize_constraints(ground), limits=limits, projection_preds=original
    )
    return frozenset(frozenset(a for a in s if a.pred in original) for s in sets)


def query_entails(
    s: Program, mode: str, input_facts=frozenset(), query=(), limits: Limits = DEFAULT_LIMITS
) -> bool:
    """Direct query semantics, used as the test oracle: brave entailment is
    consistency of the program plus the negated-query constraints, cautious
    entailment is inconsistency of the program plus the query constraint."""
    lits = tuple(query)
    if mode == "brave":
        extra = [Rule((), (OrdLit(l.atom, not l.negated),)) for l in lits]
    elif mode == "cautious":
        extra = [Rule((), lits)]
    else:
        raise ProgramError(f"unknown query mode {mode!r}")
    full = with_facts(program(list(s.rules) + extra), input_facts)
    if not program_is_ground(full):
        full = ground_naive(full, herbrand_universe(full))
    full = normalize_constraints(full)
    consistent = is_consistent(full, limits=limits)
    return consistent if mode == "brave" else not consistent


# ---------------------------------------------------------------------------
# enumerating inconsistency reasons


def _status_atoms(a: Atom):
    t = atom_to_term(a)
    return (
        Atom("reasonIn", (t,)),
        Atom("reasonOut", (t,)),
        Atom("reasonFree", (t,)),
        Atom("absent", (t,)),
    )


def tau(domain, p: Program) -> Program:
    """Reason-enumeration program: guess a candidate pair plus a compatible
    fact set, re-derive the fact-set guess under saturation, and keep only
    candidates for which every compatible fact set makes the encoded
    program inconsistent."""
    if not (program_is_ground(p) and program_is_normal(p)):
        raise ProgramError("reason enumeration needs a ground normal program")
    domain = sorted(set(domain), key=atom_sort_key)
    clash = set(domain) & {a for r in p.rules for a in r.head}
    if clash:
        raise ProgramError(f"domain intersects rule heads: {sorted(map(str, clash))}")
    base = normalize_constraints(p)
    rules = list(build_M().rules) + list(encode_ground(base).rules)
    for a in domain:
        t = atom_to_term(a)
        r_in, r_out, r_free, absent = _status_atoms(a)
        true_a = Atom("true", (t,))
        rules.append(Rule((r_in, r_out, r_free), ()))
        rules.append(Rule((a,), (OrdLit(r_in),)))
        rules.append(Rule((), (OrdLit(a), OrdLit(r_out))))
        rules.append(Rule((a, absent), (OrdLit(r_free),)))
        # presence of the guessed fact feeds the encoded program
        rules.append(Rule((Atom("head", (Func("rf", (t,)), t)),), (OrdLit(a),)))
        # a candidate set may not claim an unsupportable atom true
        rules.append(Rule((NO_AS,), (OrdLit(true_a), OrdLit(absent))))
        rules.append(Rule((NO_AS,), (OrdLit(true_a), OrdLit(r_out))))
        # the fact-set guess saturates with everything else
        rules.append(Rule((a,), (OrdLit(r_free), OrdLit(NO_AS))))
        rules.append(Rule((absent,), (OrdLit(r_free), OrdLit(NO_AS))))
    rules.append(Rule((), (OrdLit(NO_AS, negated=True),)))
    return program(rules)


def enumerate_irs_tau(
    p: Program, domain, limits: Limits = DEFAULT_LIMITS
) -> frozenset:
    """All inconsistency reasons over `domain`, decoded from the answer
    sets of the enumeration program."""
    t = tau(domain, p)
    ground = ground_meta(normalize_constraints(t), limits)
    sets = solve_disjunctive(
        normalize_constraints(ground),
        limits=limits,
        projection_preds={"reasonIn", "reasonOut"},
    )
    out = set()
    for s in sets:
        r_plus = frozenset(term_to_atom(a.args[0]) for a in s if a.pred == "reasonIn")
        r_minus = frozenset(term_to_atom(a.args[0]) for a in s if a.pred == "reasonOut")
        out.add(reason(r_plus, r_minus))
    return frozenset(out)
