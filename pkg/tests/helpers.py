"""Shared test fixtures: deterministic random program generators."""

from aspir.parser import parse_program
from aspir.rng import SplitMix64
from aspir.syntax import Atom, OrdLit, ExtLit, Program, Rule, program


ATOM_POOL = [Atom(n) for n in "abcdefgh"]


def random_ground_normal(rng: SplitMix64, max_atoms=6, max_rules=8, externals=False) -> Program:
    """Ground normal program over 0-ary atoms, optionally with id/neg
    external body literals."""
    n_atoms = rng.randint(1, max_atoms)
    atoms = ATOM_POOL[:n_atoms]
    rules = []
    for _ in range(rng.randint(1, max_rules)):
        head = rng.choice(atoms)
        body = []
        for a in rng.sample(atoms, rng.randint(0, min(3, n_atoms))):
            body.append(OrdLit(a, negated=rng.chance(0.5)))
        if externals and rng.chance(0.25):
            name = "id" if rng.chance(0.5) else "neg"
            body.append(ExtLit(name, (rng.choice(atoms).pred,), (), negated=rng.chance(0.3)))
        rules.append(Rule((head,), tuple(body)))
    # sprinkle constraints to get a healthy share of inconsistent programs
    if rng.chance(0.5):
        body = tuple(OrdLit(a, negated=rng.chance(0.4)) for a in rng.sample(atoms, rng.randint(1, 2)))
        rules.append(Rule((), body))
    return program(rules)


def random_instance_with_domain(rng: SplitMix64, max_atoms=6, max_rules=6, max_domain=4):
    """(program, domain, fact set) with the domain disjoint from rule heads."""
    n_dom = rng.randint(1, max_domain)
    domain = [Atom(f"d{i}") for i in range(1, n_dom + 1)]
    n_atoms = rng.randint(1, max_atoms)
    atoms = ATOM_POOL[:n_atoms]
    rules = []
    for _ in range(rng.randint(1, max_rules)):
        head = rng.choice(atoms)
        body = []
        pool = atoms + domain
        for a in rng.sample(pool, rng.randint(0, 3)):
            body.append(OrdLit(a, negated=rng.chance(0.4)))
        rules.append(Rule((head,), tuple(body)))
    for _ in range(rng.randint(1, 3)):
        pool = atoms + domain
        body = tuple(OrdLit(a, negated=rng.chance(0.4)) for a in rng.sample(pool, rng.randint(1, 3)))
        if body:
            rules.append(Rule((), body))
    facts = frozenset(a for a in domain if rng.chance(0.5))
    return program(rules), domain, facts


def random_safe_nonground(rng: SplitMix64, max_vars=2, max_consts=3) -> Program:
    """Safe non-ground normal program: facts over d/1, rules with variables
    guarded by positive d/p/q atoms."""
    consts = ["c1", "c2", "c3"][: rng.randint(1, max_consts)]
    lines = [f"d({c})." for c in rng.sample(consts, rng.randint(1, len(consts)))]
    heads = ["p", "q", "r"]
    var_names = ["X", "Y"][:max_vars]
    for _ in range(rng.randint(1, 4)):
        v = rng.choice(var_names)
        head = rng.choice(heads)
        body = [f"d({v})"]
        for other in rng.sample(heads, rng.randint(0, 2)):
            neg = "not " if rng.chance(0.5) else ""
            if other != head or neg:
                body.append(f"{neg}{other}({v})")
        lines.append(f"{head}({v}) :- {', '.join(body)}.")
    if rng.chance(0.6):
        v = rng.choice(var_names)
        target = rng.choice(heads)
        neg = "not " if rng.chance(0.5) else ""
        lines.append(f":- d({v}), {neg}{target}({v}).")
    return parse_program("\n".join(lines))
