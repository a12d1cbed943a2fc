"""Inconsistency reasons: disjoint atom pairs over an input domain."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ProgramError
from .syntax import Atom, OrdLit, Rule, atom_sort_key, render_atom


@dataclass(frozen=True)
class InconsistencyReason:
    """Pair (must-be-present, must-be-absent) of input atoms: adding any
    fact set containing all of `r_plus` and none of `r_minus` leaves the
    program without answer sets."""

    r_plus: frozenset
    r_minus: frozenset

    def __post_init__(self):
        if self.r_plus & self.r_minus:
            raise ProgramError("reason sets must be disjoint")

    def __str__(self) -> str:
        return render_reason(self)

    def covers(self, fact_set: frozenset) -> bool:
        """Does this reason apply to the instance `fact_set`?"""
        return self.r_plus <= fact_set and not (self.r_minus & fact_set)


def reason(r_plus, r_minus) -> InconsistencyReason:
    return InconsistencyReason(frozenset(r_plus), frozenset(r_minus))


def render_reason(r: InconsistencyReason) -> str:
    plus = ", ".join(render_atom(a) for a in sorted(r.r_plus, key=atom_sort_key))
    minus = ", ".join(render_atom(a) for a in sorted(r.r_minus, key=atom_sort_key))
    return f"IR: +{{{plus}}} -{{{minus}}}"


def reason_constraint(r: InconsistencyReason) -> Rule:
    """The constraint `:- R+, not R-` blocking exactly the instances this
    reason covers; adding it never removes answer sets."""
    body = [OrdLit(a) for a in sorted(r.r_plus, key=atom_sort_key)]
    body += [OrdLit(a, negated=True) for a in sorted(r.r_minus, key=atom_sort_key)]
    return Rule((), tuple(body))
