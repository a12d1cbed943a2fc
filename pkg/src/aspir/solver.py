"""Conflict-driven nogood learning over a trail.

The search keeps an ordered assignment of signed literals, each tagged with
its decision level and the nogood that implied it (guesses carry none); the
implication graph lives implicitly in that order.  On a conflict whose
literals sit above level zero, first-UIP resolution learns a new nogood and
the solver backjumps; a conflict entirely at level zero means the instance
is inconsistent and control passes to a pluggable handler, which is how
inconsistency analysis hooks in.

External atoms are compiled away into replacement atoms plus a guess; a
complete assignment is accepted only if every guess matches its oracle and
the projected interpretation is a subset-minimal model of its
satisfied-body reduct.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Optional

from .errors import ProgramError
from .externals import Registry, evaluate_external, learn_io_nogood, relevant_input_atoms
from .limits import DEFAULT_LIMITS, Limits
from .nogoods import compile_program, negate
from .oracle import body_satisfied, is_model
from .syntax import (
    AUX_PREFIX,
    Atom,
    BuiltinLit,
    ExtLit,
    OrdLit,
    Program,
    Rule,
    atom_sort_key,
    program,
    program_is_ground,
    program_is_ordinary,
    render_atom,
)

GUESS = None  # reason tag for decisions


@dataclass(frozen=True)
class AnswerSet:
    interpretation: frozenset


@dataclass(frozen=True)
class HandlerResult:
    value: object


def h_bottom(nogoods, trail):
    """Answer-set computation handler: inconsistency yields a bare marker."""
    return None


@dataclass(frozen=True)
class TrailEntry:
    literal: tuple  # (sign, Atom)
    level: int
    reason: Optional[frozenset]  # implying nogood, GUESS for decisions


class TrailView:
    """Snapshot handed to inconsistency handlers: assignment order, levels,
    implying nogoods, and the nogood found violated."""

    def __init__(self, entries, conflict):
        self.entries = list(entries)
        self.conflict = conflict
        self._pos = {e.literal[1]: i for i, e in enumerate(self.entries)}

    def position(self, atom: Atom) -> int:
        return self._pos[atom]

    def reason_for(self, atom: Atom):
        return self.entries[self._pos[atom]].reason

    def literal_of(self, atom: Atom):
        return self.entries[self._pos[atom]].literal

    def __contains__(self, atom: Atom) -> bool:
        return atom in self._pos


@dataclass(frozen=True)
class ExtOccurrence:
    name: str
    inputs: tuple
    outputs: tuple
    replacement: Atom


def _replacement_pred(name: str, inputs: tuple, negative: bool = False) -> str:
    tag = "ne" if negative else "e"
    return f"{AUX_PREFIX}{tag}_{name}__{'_'.join(inputs)}"


def rewrite_guessing_program(p: Program):
    """Replace each ground external atom by an ordinary replacement atom and
    add a shifted guess for its value.  Returns the rewritten program and
    the occurrence list."""
    occurrences = {}
    rules = []
    for rule in p.rules:
        body = []
        for lit in rule.body:
            if isinstance(lit, ExtLit):
                repl = Atom(_replacement_pred(lit.name, lit.inputs), lit.outputs)
                occurrences[repl] = ExtOccurrence(lit.name, lit.inputs, lit.outputs, repl)
                body.append(OrdLit(repl, lit.negated))
            else:
                body.append(lit)
        rules.append(Rule(rule.head, tuple(body)))
    for repl, occ in sorted(occurrences.items(), key=lambda kv: atom_sort_key(kv[0])):
        nrepl = Atom(_replacement_pred(occ.name, occ.inputs, negative=True), occ.outputs)
        rules.append(Rule((repl,), (OrdLit(nrepl, negated=True),)))
        rules.append(Rule((nrepl,), (OrdLit(repl, negated=True),)))
    return program(rules, p.unit_markers), list(occurrences.values())


def atoms_of_original(p: Program) -> set:
    """Ordinary atoms of a ground program that may still carry externals."""
    out = set()
    for r in p.rules:
        out.update(r.head)
        for lit in r.body:
            if isinstance(lit, OrdLit):
                out.add(lit.atom)
    return out


class Solver:
    """One CDNL search instance; single-threaded, not shareable mid-solve."""

    def __init__(
        self,
        p: Program,
        facts=frozenset(),
        registry: Optional[Registry] = None,
        limits: Limits = DEFAULT_LIMITS,
        extra_atoms=frozenset(),
        theory_propagation: bool = True,
        projection_preds=None,
    ):
        if not program_is_ground(p):
            raise ProgramError("the solver needs a ground program")
        for r in p.rules:
            if not r.head:
                raise ProgramError("normalize constraints before solving")
        self.registry = registry
        self.limits = limits
        self.theory_propagation = theory_propagation
        self.original = p
        self.facts = frozenset(facts)
        self.hat, self.occurrences = rewrite_guessing_program(p)
        if self.occurrences and registry is None:
            raise ProgramError("program has external atoms but no registry was given")
        # for tight normal programs the completion is exact: propagation-
        # complete assignments are answer sets and the minimality check can
        # be skipped (external guesses are still verified)
        self._tight = all(len(r.head) == 1 for r in p.rules) and _is_tight(self.hat)
        comp = compile_program(self.hat, self.facts, frozenset(extra_atoms))
        self.program_atoms = frozenset(atoms_of_original(p) | self.facts | frozenset(extra_atoms))
        # reduct-minimality runs over the original rules plus the input facts
        self.flp_program = program(
            list(p.rules) + [Rule((a,), ()) for a in sorted(self.facts, key=atom_sort_key)]
        )
        self.flp_ordinary = program_is_ordinary(p)

        self._atoms = sorted(comp.atoms, key=atom_sort_key)
        self._id = {a: i for i, a in enumerate(self._atoms)}
        n = len(self._atoms)
        self._value = [None] * n
        self._level = [0] * n
        self._reason = [None] * n  # index into self._nogoods
        self._pos = [-1] * n
        self._trail = []
        self._qhead = 0
        self._dl = 0
        self._nogoods = []  # frozensets of (sign, Atom)
        self._codes = []  # parallel: sorted lit codes
        self._wpair = []  # parallel: mutable two-code watch list (None=unit)
        self._watch = {}
        self._index = {}  # nogood -> index
        self._pending_conflict = None
        self._steps = 0
        self.stats = {"conflicts": 0, "guesses": 0, "theory_calls": 0}
        # guess policy: lexicographically smallest unassigned atom, F first;
        # program atoms come before body auxiliaries, whose values follow
        # from the equivalences by propagation anyway
        self._guess_order = [
            self._id[a]
            for a in self._atoms
            if a in self.program_atoms or a.pred.startswith(f"{AUX_PREFIX}e_")
            or a.pred.startswith(f"{AUX_PREFIX}ne_")
        ] + [
            self._id[a]
            for a in self._atoms
            if not (
                a in self.program_atoms
                or a.pred.startswith(f"{AUX_PREFIX}e_")
                or a.pred.startswith(f"{AUX_PREFIX}ne_")
            )
        ]
        self._ext_groups = {}
        for occ in self.occurrences:
            self._ext_groups.setdefault((occ.name, occ.inputs), {})[occ.outputs] = occ.replacement
        # enumeration granularity: with projection predicates set, an
        # accepted answer set blocks every assignment sharing its projection
        self._projection_ids = None
        if projection_preds is not None:
            self._projection_ids = [
                i for i, a in enumerate(self._atoms) if a.pred in set(projection_preds)
            ]
        for ng in comp.nogoods:
            self._add_nogood(ng)

    # ----------------------------------------------------------------- core

    def _code(self, lit) -> int:
        return self._id[lit[1]] * 2 + (1 if lit[0] else 0)

    def _lit(self, code: int):
        return (bool(code & 1), self._atoms[code // 2])

    def _matched(self, code: int) -> bool:
        return self._value[code // 2] is (True if code & 1 else False)

    def _mismatched(self, code: int) -> bool:
        v = self._value[code // 2]
        return v is not None and v is not (True if code & 1 else False)

    def _register_atom(self, atom: Atom) -> None:
        self._id[atom] = len(self._atoms)
        self._atoms.append(atom)
        self._value.append(None)
        self._level.append(0)
        self._reason.append(None)
        self._pos.append(-1)

    def _add_nogood(self, ng: frozenset) -> bool:
        """Register a nogood (False if already present).  A nogood violated
        or unit under the current assignment takes effect immediately."""
        if ng in self._index:
            return False
        for lit in ng:
            if lit[1] not in self._id:
                self._register_atom(lit[1])
        idx = len(self._nogoods)
        self._index[ng] = idx
        self._nogoods.append(ng)
        codes = sorted(self._code(l) for l in ng)
        self._codes.append(codes)
        if len(codes) == 1:
            self._wpair.append(None)
        else:
            free = [c for c in codes if not self._matched(c)]
            rest = [c for c in codes if c not in free]
            pair = (free + rest)[:2]
            self._wpair.append(pair)
            for c in pair:
                self._watch.setdefault(c, []).append(idx)
        self._activate(idx)
        return True

    def _activate(self, idx: int) -> None:
        """Apply a (possibly re-seen) nogood to the current assignment."""
        codes = self._codes[idx]
        free = [c for c in codes if not self._matched(c)]
        if not free:
            if self._pending_conflict is None:
                self._pending_conflict = idx
        elif len(free) == 1 and not self._mismatched(free[0]):
            self._assert_from(idx, free[0])

    def _assert_from(self, idx: int, last_code: int) -> None:
        level = max((self._level[c // 2] for c in self._codes[idx] if c != last_code), default=0)
        self._assign(negate(self._lit(last_code)), level, idx)

    def _assign(self, lit, level: int, reason_idx) -> None:
        aid = self._id[lit[1]]
        if self._value[aid] is not None:
            if self._value[aid] is not lit[0]:
                raise ProgramError("internal: conflicting assignment")
            return
        self._value[aid] = lit[0]
        self._level[aid] = level
        self._reason[aid] = reason_idx
        self._pos[aid] = len(self._trail)
        self._trail.append(aid)

    def _propagate(self) -> Optional[int]:
        """Exhaustive unit propagation; returns a violated nogood index."""
        if self._pending_conflict is not None:
            idx, self._pending_conflict = self._pending_conflict, None
            return idx
        while self._qhead < len(self._trail):
            aid = self._trail[self._qhead]
            self._qhead += 1
            code = aid * 2 + (1 if self._value[aid] else 0)
            watching = self._watch.get(code)
            if not watching:
                continue
            kept = []
            conflict = None
            i = 0
            while i < len(watching):
                idx = watching[i]
                i += 1
                pair = self._wpair[idx]
                if pair is None or code not in pair:
                    continue  # stale entry from an earlier watch move
                other = pair[0] if pair[1] == code else pair[1]
                moved = False
                for cand in self._codes[idx]:
                    if cand != other and cand != code and not self._matched(cand):
                        pair[pair.index(code)] = cand
                        self._watch.setdefault(cand, []).append(idx)
                        moved = True
                        break
                if moved:
                    continue
                kept.append(idx)
                if self._mismatched(other):
                    continue  # dormant: `other` guards the nogood
                if self._matched(other):
                    conflict = idx
                    break
                self._assert_from(idx, other)
            if conflict is not None:
                kept.extend(watching[i:])
                self._watch[code] = kept
                return conflict
            self._watch[code] = kept
        return None

    def _backjump(self, level: int) -> None:
        kept = []
        requeue_from = len(self._trail)
        for pos, aid in enumerate(self._trail):
            if self._level[aid] > level:
                self._value[aid] = None
                self._reason[aid] = None
                self._pos[aid] = -1
                if pos < requeue_from:
                    requeue_from = pos
            else:
                kept.append(aid)
        self._trail = kept
        for pos, aid in enumerate(self._trail):
            self._pos[aid] = pos
        self._qhead = min(requeue_from, len(self._trail))
        self._dl = level

    def _conflict_level(self, idx: int) -> int:
        return max((self._level[c // 2] for c in self._codes[idx]), default=0)

    def _analyze(self, idx: int):
        """First-UIP resolution; returns (learned nogood, backjump level)."""
        delta = set(self._codes[idx])
        clevel = self._conflict_level(idx)
        while True:
            at_level = [c for c in delta if self._level[c // 2] == clevel]
            if len(at_level) <= 1:
                break
            code = max(at_level, key=lambda c: self._pos[c // 2])
            reason_idx = self._reason[code // 2]
            if reason_idx is None:
                raise ProgramError("internal: resolving a decision literal")
            delta.discard(code)
            delta |= set(self._codes[reason_idx]) - {code ^ 1}
        rest = [self._level[c // 2] for c in delta if self._level[c // 2] != clevel]
        backjump = max(rest, default=0)
        return frozenset(self._lit(c) for c in delta), backjump

    # ------------------------------------------------------------ candidate

    def _complete(self) -> bool:
        return all(v is not None for v in self._value)

    def _interpretation(self) -> frozenset:
        return frozenset(
            a for a, v in zip(self._atoms, self._value) if v and a in self.program_atoms
        )

    def _full_assignment_nogood(self) -> frozenset:
        return frozenset((bool(v), a) for a, v in zip(self._atoms, self._value))

    def _check_candidate(self) -> Optional[str]:
        """None if the total assignment is an answer set; else the failure."""
        interp = self._interpretation()
        for occ in self.occurrences:
            guessed = self._value[self._id[occ.replacement]]
            decl = self.registry.get(occ.name)
            actual = evaluate_external(decl, interp, occ.inputs, occ.outputs)
            if bool(guessed) != actual:
                return f"external guess {render_atom(occ.replacement)} differs from oracle"
        if not self._tight and self._has_smaller_model(interp):
            return "not minimal wrt. the reduct"
        return None

    def _has_smaller_model(self, interp: frozenset) -> bool:
        reduct = [r for r in self.flp_program.rules if body_satisfied(r, interp, self.registry)]
        if self.flp_ordinary:
            if len(interp) > 48:
                return _smaller_model_cdcl(reduct, interp, self.limits)
            return _smaller_model_dpll(reduct, interp)
        # with externals, re-evaluate oracles per smaller candidate; atoms
        # pinned by fact rules never drop out
        fixed = {r.head[0] for r in reduct if len(r.head) == 1 and not r.body}
        floating = sorted(interp - fixed, key=atom_sort_key)
        self.limits.require("flp_subsets", 1 << len(floating))
        reduct_p = program(reduct)
        for k in range(len(floating)):
            for kept in combinations(floating, k):
                candidate = frozenset(kept) | fixed
                if is_model(reduct_p, candidate, self.registry):
                    return True
        return False

    # --------------------------------------------------------------- theory

    def _theory_step(self) -> bool:
        """One oracle-evaluation pass under the partial assignment; true if
        new nogoods were added."""
        if not self.theory_propagation or not self._ext_groups:
            return False
        added = False
        interp = frozenset(
            a for a, v in zip(self._atoms, self._value) if v and a in self.program_atoms
        )
        for (name, inputs), repls in sorted(self._ext_groups.items()):
            relevant = relevant_input_atoms(inputs, self.program_atoms)
            if any(self._value[self._id[a]] is None for a in relevant):
                continue
            decl = self.registry.get(name)
            self.stats["theory_calls"] += 1
            for ng in learn_io_nogood(decl, interp, inputs, repls, self.program_atoms):
                if self._add_nogood(ng):
                    added = True
        return added

    # ----------------------------------------------------------------- main

    def _guess(self) -> None:
        for aid in self._guess_order:
            if self._value[aid] is None:
                self._dl += 1
                self.stats["guesses"] += 1
                self._assign((False, self._atoms[aid]), self._dl, GUESS)
                return
        raise ProgramError("internal: guess on a complete assignment")

    def _handler_view(self, conflict_idx: int) -> TrailView:
        entries = []
        for aid in self._trail:
            reason_idx = self._reason[aid]
            entries.append(
                TrailEntry(
                    (bool(self._value[aid]), self._atoms[aid]),
                    self._level[aid],
                    None if reason_idx is None else self._nogoods[reason_idx],
                )
            )
        return TrailView(entries, self._nogoods[conflict_idx])

    def run(self, handler: Callable, on_answer: Callable):
        """Drive the search.  `on_answer(interp)` runs per answer set and
        returns True to keep enumerating.  Returns a HandlerResult when the
        instance is inconsistent (no answer set at all), else None."""
        found_any = False
        while True:
            conflict = self._propagate()
            if conflict is not None:
                self._steps += 1
                self.stats["conflicts"] += 1
                self.limits.require("solver_steps", self._steps)
                if self._conflict_level(conflict) == 0:
                    self._backjump(0)
                    if found_any:
                        return None  # enumeration exhausted
                    return HandlerResult(handler(list(self._nogoods), self._handler_view(conflict)))
                learned, backjump = self._analyze(conflict)
                self._backjump(backjump)
                if not self._add_nogood(learned):
                    self._activate(self._index[learned])
                continue
            if self._complete():
                failure = self._check_candidate()
                if failure is None:
                    found_any = True
                    if not on_answer(self._interpretation()):
                        return None
                    if self._projection_ids is not None:
                        blocking = frozenset(
                            (bool(self._value[i]), self._atoms[i]) for i in self._projection_ids
                        )
                        if not self._add_nogood(blocking):
                            raise ProgramError("internal: projection revisited")
                        continue
                if not self._add_nogood(self._full_assignment_nogood()):
                    raise ProgramError("internal: total assignment revisited")
                continue
            if self._theory_step():
                continue
            self._steps += 1
            self.limits.require("solver_steps", self._steps)
            self._guess()


def _is_tight(p: Program) -> bool:
    """No cycle in the positive atom dependency graph."""
    deps: dict = {}
    for r in p.rules:
        pos = [l.atom for l in r.body if isinstance(l, OrdLit) and not l.negated]
        for h in r.head:
            deps.setdefault(h, set()).update(pos)
    color: dict = {}  # 1 = on stack, 2 = done

    for start in deps:
        if color.get(start):
            continue
        stack = [(start, iter(deps.get(start, ())))]
        color[start] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                c = color.get(nxt)
                if c == 1:
                    return False
                if c is None:
                    color[nxt] = 1
                    stack.append((nxt, iter(deps.get(nxt, ()))))
                    advanced = True
                    break
            if not advanced:
                color[node] = 2
                stack.pop()
    return True


# ---------------------------------------------------------------------------
# reduct-minimality search for ordinary programs (no oracles to re-evaluate,
# so the check compiles to clauses over the candidate's true atoms)


def _reduct_clauses(reduct_rules, interp: frozenset):
    """Clauses over the true atoms: each reduct rule keeps a true head atom
    or drops a positive body atom; one global clause drops something."""
    atoms = sorted(interp, key=atom_sort_key)
    index = {a: i for i, a in enumerate(atoms)}
    clauses = []
    for r in reduct_rules:
        clause = set()
        for h in r.head:
            if h in interp:
                clause.add(index[h] * 2 + 1)
        for lit in r.body:
            if isinstance(lit, OrdLit) and not lit.negated:
                clause.add(index[lit.atom] * 2)
            # negated body atoms are false in interp and stay false; ground
            # builtins were true (the rule is in the reduct)
        clauses.append(sorted(clause))
    clauses.append(sorted(index[a] * 2 for a in atoms))
    return atoms, clauses


def _smaller_model_cdcl(reduct_rules, interp: frozenset, limits: Limits) -> bool:
    """Conflict-driven search for a proper reduct sub-model: each true atom
    becomes an even-loop choice, each clause a constraint; the resulting
    program is tight, so the recursion bottoms out."""
    atoms, clauses = _reduct_clauses(reduct_rules, interp)
    if not atoms:
        return False
    name = {a: Atom(f"{AUX_PREFIX}sm{i}") for i, a in enumerate(atoms)}
    off = {a: Atom(f"{AUX_PREFIX}smn{i}") for i, a in enumerate(atoms)}
    rules = []
    for a in atoms:
        rules.append(Rule((name[a],), (OrdLit(off[a], negated=True),)))
        rules.append(Rule((off[a],), (OrdLit(name[a], negated=True),)))
    for k, clause in enumerate(clauses):
        if not clause:
            return False
        # violated iff every literal of the clause is falsified
        body = tuple(
            OrdLit(name[atoms[c // 2]], negated=bool(c & 1)) for c in sorted(clause)
        )
        rules.append(Rule((Atom(f"{AUX_PREFIX}smc{k}"),), body + (OrdLit(Atom(f"{AUX_PREFIX}smc{k}"), True),)))
    outcome = solve(program(rules), limits=limits, theory_propagation=False)
    return isinstance(outcome, AnswerSet)


def _smaller_model_dpll(reduct_rules, interp: frozenset) -> bool:
    if not interp:
        return False
    _, clauses = _reduct_clauses(reduct_rules, interp)
    return _dpll_sat(clauses)


def _dpll_sat(clauses) -> bool:
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 100_000))
    clauses = [list(dict.fromkeys(c)) for c in clauses]
    if any(not c for c in clauses):
        return False

    def simplify(cls, lit):
        out = []
        for c in cls:
            if lit in c:
                continue
            if lit ^ 1 in c:
                c2 = [x for x in c if x != lit ^ 1]
                if not c2:
                    return None
                out.append(c2)
            else:
                out.append(c)
        return out

    def rec(cls):
        while True:
            unit = next((c[0] for c in cls if len(c) == 1), None)
            if unit is None:
                break
            cls = simplify(cls, unit)
            if cls is None:
                return False
        if not cls:
            return True
        v = cls[0][0]
        for lit in (v, v ^ 1):
            s = simplify(cls, lit)
            if s is not None and rec(s):
                return True
        return False

    return rec(clauses)


# ---------------------------------------------------------------------------
# public operations


def solve(
    p: Program,
    facts=frozenset(),
    handler: Callable = h_bottom,
    registry: Optional[Registry] = None,
    limits: Limits = DEFAULT_LIMITS,
    extra_atoms=frozenset(),
    theory_propagation: bool = True,
):
    """First answer set of `p` plus `facts`, or the handler's verdict."""
    solver = Solver(p, facts, registry, limits, extra_atoms, theory_propagation)
    box = []

    def take(interp):
        box.append(interp)
        return False

    outcome = solver.run(handler, take)
    if box:
        return AnswerSet(box[0])
    if not isinstance(outcome, HandlerResult):
        raise ProgramError("internal: inconsistent run without handler result")
    return outcome


def enumerate_answer_sets(
    p: Program,
    facts=frozenset(),
    handler: Callable = h_bottom,
    registry: Optional[Registry] = None,
    limits: Limits = DEFAULT_LIMITS,
    extra_atoms=frozenset(),
    theory_propagation: bool = True,
    solver_out: Optional[list] = None,
    projection_preds=None,
):
    """(answer sets, handler result).  The handler fires only when the
    instance has no answer set at all; later level-0 conflicts just mean the
    enumeration is done."""
    solver = Solver(
        p, facts, registry, limits, extra_atoms, theory_propagation, projection_preds
    )
    if solver_out is not None:
        solver_out.append(solver)
    found = set()

    def take(interp):
        found.add(interp)
        return True

    outcome = solver.run(handler, take)
    if found:
        return frozenset(found), None
    return frozenset(), outcome


def solve_disjunctive(
    p: Program, registry=None, limits: Limits = DEFAULT_LIMITS, projection_preds=None
) -> frozenset:
    """All answer sets of a ground (possibly disjunctive) normalized
    program, projected to its own atoms."""
    sets, _ = enumerate_answer_sets(
        p, frozenset(), h_bottom, registry, limits, projection_preds=projection_preds
    )
    return sets


# ---------------------------------------------------------------------------
# reference versions of the two inner solver steps, small enough to read off
# and used directly by unit tests


def propagate(nogoods, trail):
    """Pure unit propagation: `trail` is a list of TrailEntry; returns the
    extended trail and the first violated nogood (or None).  Implied
    literals land at the maximum decision level of their implicants."""
    entries = list(trail)
    assigned = {e.literal[1]: e.literal[0] for e in entries}
    levels = {e.literal[1]: e.level for e in entries}
    changed = True
    while changed:
        changed = False
        for ng in nogoods:
            unassigned = [l for l in ng if l[1] not in assigned]
            matched = [l for l in ng if assigned.get(l[1]) is l[0]]
            if not unassigned and len(matched) == len(ng):
                return entries, ng
            if len(unassigned) == 1 and len(matched) == len(ng) - 1:
                lit = negate(unassigned[0])
                level = max((levels[l[1]] for l in matched), default=0)
                entries.append(TrailEntry(lit, level, ng))
                assigned[lit[1]] = lit[0]
                levels[lit[1]] = level
                changed = True
    return entries, None


def analyze_conflict(conflict: frozenset, trail):
    """Pure first-UIP resolution; `trail` is a list of TrailEntry.  Returns
    (learned nogood, backjump level)."""
    pos = {e.literal[1]: i for i, e in enumerate(trail)}
    level = {e.literal[1]: e.level for e in trail}
    reason = {e.literal[1]: e.reason for e in trail}
    delta = set(conflict)
    clevel = max(level[l[1]] for l in delta)
    while True:
        at_level = [l for l in delta if level[l[1]] == clevel]
        if len(at_level) <= 1:
            break
        lit = max(at_level, key=lambda l: pos[l[1]])
        r = reason[lit[1]]
        if r is None:
            raise ProgramError("internal: resolving a decision literal")
        delta.discard(lit)
        delta |= set(r) - {negate(lit)}
    rest = [level[l[1]] for l in delta if level[l[1]] != clevel]
    return frozenset(delta), max(rest, default=0)
