"""Registry and evaluation of external-atom oracle functions.

An oracle is a total Boolean function of the input predicates' extensions
under a complete assignment and one candidate output tuple.  The registry
ships three built-ins and can load table-driven oracles from JSON:

    {"<canonical input atoms>": [[out1, ...], ...], ...}

where the key is the comma-joined, sorted rendering of all true input
atoms ("" for the empty extension) and each value lists the output tuples
that are true under that input; missing keys mean no outputs (the function
stays total).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .errors import ExternalError
from .nogoods import flit, tlit
from .syntax import Atom, Const, atom_sort_key, render_atom

# extensions: tuple of frozensets of argument tuples, one per input predicate
Evaluator = Callable[[tuple, tuple], bool]
OutputsFn = Callable[[tuple], frozenset]


@dataclass(frozen=True)
class ExternalDecl:
    name: str
    input_arity: int
    output_arity: int
    monotone: tuple  # per-input boolean, declared and never inferred
    evaluator: Evaluator
    outputs_fn: Optional[OutputsFn] = None  # known-true output tuples
    # optional declared dependency structure: (inputs, output) -> the input
    # atoms the oracle value for that output depends on; None means "the
    # whole input extension".  Like monotonicity this is declared, never
    # inferred, and it keeps learned nogoods small.
    dependencies: Optional[Callable[[tuple, tuple], Optional[list]]] = None

    def possible_outputs(self, extensions: tuple) -> frozenset:
        if self.output_arity == 0:
            return frozenset([()] if self.evaluator(extensions, ()) else [])
        if self.outputs_fn is None:
            raise ExternalError(f"external &{self.name} cannot enumerate outputs")
        return self.outputs_fn(extensions)

    def deps_for(self, inputs: tuple, output: tuple) -> Optional[list]:
        if self.dependencies is None:
            return None
        return self.dependencies(inputs, output)


class Registry:
    def __init__(self):
        self._decls = {}

    def register(self, decl: ExternalDecl) -> None:
        self._decls[decl.name] = decl

    def get(self, name: str) -> ExternalDecl:
        decl = self._decls.get(name)
        if decl is None:
            raise ExternalError(f"unknown external &{name}")
        return decl

    def __contains__(self, name: str) -> bool:
        return name in self._decls


def extension_of(pred: str, interpretation: frozenset) -> frozenset:
    """Argument tuples of the true atoms over `pred`."""
    return frozenset(a.args for a in interpretation if a.pred == pred)


def extensions_for(inputs: tuple, interpretation: frozenset) -> tuple:
    return tuple(extension_of(p, interpretation) for p in inputs)


def evaluate_external(
    decl: ExternalDecl, interpretation: frozenset, inputs: tuple, output: tuple
) -> bool:
    """Truth of the ground external atom under a complete assignment, given
    as the set of true atoms."""
    if len(inputs) != decl.input_arity:
        raise ExternalError(f"&{decl.name} expects {decl.input_arity} inputs, got {len(inputs)}")
    if len(output) != decl.output_arity:
        raise ExternalError(f"&{decl.name} expects {decl.output_arity} outputs, got {len(output)}")
    return decl.evaluator(extensions_for(inputs, interpretation), output)


def relevant_input_atoms(inputs: tuple, universe: Iterable[Atom]) -> list:
    return sorted((a for a in universe if a.pred in set(inputs)), key=atom_sort_key)


def learn_io_nogood(
    decl: ExternalDecl,
    interpretation: frozenset,
    inputs: tuple,
    replacement_atoms: dict,
    universe: Iterable[Atom],
) -> list:
    """Input-output relation nogoods for one oracle evaluation.

    For every known ground replacement atom (keyed by output tuple) the
    returned nogood forbids the current truth values of the input atoms the
    oracle depends on together with the wrong truth value of the
    replacement atom, so any assignment violating one of them fails the
    compatibility check.
    """
    universe = set(universe)
    all_inputs = relevant_input_atoms(inputs, universe)
    out = []
    for output, repl in sorted(replacement_atoms.items(), key=lambda kv: atom_sort_key(kv[1])):
        deps = decl.deps_for(inputs, output)
        if deps is None:
            relevant = all_inputs
        else:
            # dependency atoms outside the universe are constantly false and
            # constrain nothing
            relevant = sorted((a for a in deps if a in universe), key=atom_sort_key)
        base = [tlit(a) if a in interpretation else flit(a) for a in relevant]
        value = decl.evaluator(extensions_for(inputs, interpretation), output)
        out.append(frozenset(base + [(not value, repl)]))
    return out


# ---------------------------------------------------------------------------
# built-in externals


def _nonempty(extensions: tuple, output: tuple) -> bool:
    return len(extensions[0]) > 0


def _empty(extensions: tuple, output: tuple) -> bool:
    return len(extensions[0]) == 0


def _diff_eval(extensions: tuple, output: tuple) -> bool:
    return output in (extensions[0] - extensions[1])


def _diff_outputs(extensions: tuple) -> frozenset:
    return frozenset(extensions[0] - extensions[1])


def _diff_deps(inputs: tuple, output: tuple) -> list:
    # membership of one tuple in a set difference depends only on the two
    # atoms carrying exactly that tuple
    return [Atom(inputs[0], output), Atom(inputs[1], output)]


def default_registry() -> Registry:
    reg = Registry()
    reg.register(ExternalDecl("id", 1, 0, (True,), _nonempty))
    reg.register(ExternalDecl("neg", 1, 0, (False,), _empty))
    reg.register(ExternalDecl("diff", 2, 1, (True, False), _diff_eval, _diff_outputs, _diff_deps))
    return reg


# ---------------------------------------------------------------------------
# table-driven externals


def table_key(inputs: tuple, extensions: tuple) -> str:
    atoms = []
    for pred, ext in zip(inputs, extensions):
        for args in ext:
            atoms.append(Atom(pred, args))
    return ",".join(render_atom(a) for a in sorted(atoms, key=atom_sort_key))


def _as_tuple(row) -> tuple:
    return tuple(Const(str(v)) for v in row)


class TableExternal:
    """Oracle defined by an explicit input-extension -> output-tuples map."""

    def __init__(self, name: str, inputs: tuple, table: dict):
        self.name = name
        self.inputs = inputs
        self.table = table  # canonical key -> frozenset of output tuples

    def evaluator(self, extensions: tuple, output: tuple) -> bool:
        return output in self.table.get(table_key(self.inputs, extensions), frozenset())

    def outputs_fn(self, extensions: tuple) -> frozenset:
        return self.table.get(table_key(self.inputs, extensions), frozenset())


def table_decl(
    name: str, input_preds: tuple, output_arity: int, table: dict, monotone=None, deps=None
) -> ExternalDecl:
    """Build a declaration from a mapping of canonical keys to output rows.

    `input_preds` fixes the key layout (tables are written for one concrete
    input list); `table` values may be lists of rows or frozensets of
    tuples.  `deps` optionally maps the comma-joined output key to the list
    of input atoms (``[pred, arg1, ...]``) that output depends on.
    """
    canon = {}
    for key, rows in table.items():
        canon[key] = frozenset(_as_tuple(r) if not isinstance(r, tuple) else r for r in rows)
    ext = TableExternal(name, tuple(input_preds), canon)
    flags = tuple(monotone) if monotone is not None else tuple(False for _ in input_preds)
    dep_fn = None
    if deps is not None:
        dep_map = {
            key: [Atom(row[0], tuple(Const(str(v)) for v in row[1:])) for row in rows]
            for key, rows in deps.items()
        }

        def dep_fn(inputs: tuple, output: tuple):
            key = ",".join(t.name for t in output)
            return dep_map.get(key)

    return ExternalDecl(
        name, len(input_preds), output_arity, flags, ext.evaluator, ext.outputs_fn, dep_fn
    )


def load_tables(path_or_obj, registry: Registry) -> None:
    """Register table externals from a JSON file or an already-parsed dict.

    Layout: {"name": {"inputs": [...], "output_arity": n,
                      "monotone": [...]?, "table": {key: [[...], ...]}}}
    """
    if isinstance(path_or_obj, str):
        with open(path_or_obj, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    else:
        obj = path_or_obj
    if not isinstance(obj, dict):
        raise ExternalError("table file must be a JSON object")
    for name, spec in obj.items():
        try:
            registry.register(
                table_decl(
                    name,
                    tuple(spec["inputs"]),
                    int(spec["output_arity"]),
                    spec.get("table", {}),
                    spec.get("monotone"),
                    spec.get("deps"),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ExternalError(f"bad table entry for &{name}: {exc}") from exc
