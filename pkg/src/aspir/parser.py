"""Parser and serializer for the textual dialect.

Grammar sketch (UTF-8, newline-insensitive, comments start with `%`):

    program  := (rule | directive)*
    directive:= "#split."
    rule     := head? (":-" bodylist)? "."
    head     := atom ("v" atom)*                  # "|" also accepted
    bodylist := bodylit ("," bodylit)*
    bodylit  := "not"? (atom | external | builtin | query | cond)
    external := "&" name "[" name ("," name)* "]" ("(" terms? ")")?
    query    := "&query_c" | "&query_b", then ["path" (";" names)?](lits)
    builtin  := term OP term         OP in  =  !=  <  <=  >  >=
    cond     := "COND(" bodylit ":" atom ")"

Facts end with `.`; `#split.` on its own line marks a unit boundary.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import ParseError
from .syntax import (
    Atom,
    BuiltinLit,
    CondLit,
    Const,
    ExtLit,
    Func,
    OrdLit,
    Program,
    QueryLit,
    Rule,
    Var,
    atom_is_ground,
    atom_vars,
    lit_vars,
    render_program,
    term_vars,
)

_OPS = ("!=", "<=", ">=", "<", ">", "=")


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass
class _Token:
    kind: str  # IDENT VAR NUM STR PUNCT EOF
    value: str
    span: SourceSpan


def _tokenize(text: str, filename: str):
    tokens = []
    line, col = 1, 1
    i, n = 0, len(text)

    def span() -> SourceSpan:
        return SourceSpan(filename, line, col)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if i < n and text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = text[i]
        if c in " \t\r\n":
            advance(1)
            continue
        if c == "%":
            while i < n and text[i] != "\n":
                advance(1)
            continue
        start = span()
        if c == '"':
            j = i + 1
            buf = []
            while j < n and text[j] != '"':
                if text[j] == "\\" and j + 1 < n:
                    buf.append(text[j + 1])
                    j += 2
                else:
                    buf.append(text[j])
                    j += 1
            if j >= n:
                raise ParseError("unterminated string", start)
            tokens.append(_Token("STR", "".join(buf), start))
            advance(j + 1 - i)
            continue
        if c.isdigit() or (c == "-" and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("NUM", text[i:j], start))
            advance(j - i)
            continue
        if c.isalpha() or c == "_":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "VAR" if word[0].isupper() else "IDENT"
            tokens.append(_Token(kind, word, start))
            advance(j - i)
            continue
        if text.startswith(":-", i):
            tokens.append(_Token("PUNCT", ":-", start))
            advance(2)
            continue
        two = text[i : i + 2]
        if two in ("!=", "<=", ">="):
            tokens.append(_Token("PUNCT", two, start))
            advance(2)
            continue
        if c in "()[],.;:&#|<>=":
            tokens.append(_Token("PUNCT", c, start))
            advance(1)
            continue
        raise ParseError(f"unexpected character {c!r}", start)
    tokens.append(_Token("EOF", "", SourceSpan(filename, line, col)))
    return tokens


class _Parser:
    def __init__(self, tokens, filename: str, loader: Optional[Callable[[str], "Program"]]):
        self.tokens = tokens
        self.pos = 0
        self.filename = filename
        self.loader = loader
        self.pred_arity: dict = {}
        self.func_arity: dict = {}

    # -- token helpers ----------------------------------------------------

    def peek(self, ahead: int = 0) -> _Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> _Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, value: str) -> _Token:
        tok = self.peek()
        if tok.kind == "PUNCT" and tok.value == value:
            return self.next()
        raise ParseError(f"found {tok.value!r}", tok.span, expected=(repr(value),))

    def at_punct(self, *values: str) -> bool:
        tok = self.peek()
        return tok.kind == "PUNCT" and tok.value in values

    # -- grammar ----------------------------------------------------------

    def parse_program(self) -> Program:
        rules = []
        markers = []
        while self.peek().kind != "EOF":
            if self.at_punct("#"):
                self.next()
                tok = self.next()
                if tok.kind != "IDENT" or tok.value != "split":
                    raise ParseError(f"unknown directive #{tok.value}", tok.span, expected=("split",))
                self.expect(".")
                markers.append(len(rules))
                continue
            rules.append(self.parse_rule())
        for r in rules:
            self.check_safety(r)
        return Program(tuple(rules), tuple(m for m in markers if 0 < m < len(rules)))

    def parse_rule(self) -> Rule:
        head = []
        span = self.peek().span
        if not self.at_punct(":-"):
            head.append(self.parse_atom())
            while True:
                tok = self.peek()
                if tok.kind == "IDENT" and tok.value == "v":
                    self.next()
                    head.append(self.parse_atom())
                elif self.at_punct("|"):
                    self.next()
                    head.append(self.parse_atom())
                else:
                    break
        body = []
        if self.at_punct(":-"):
            self.next()
            body.append(self.parse_body_literal())
            while self.at_punct(","):
                self.next()
                body.append(self.parse_body_literal())
        elif not head:
            tok = self.peek()
            raise ParseError("empty rule", span if tok.kind == "EOF" else tok.span, expected=("atom", "':-'"))
        self.expect(".")
        return Rule(tuple(head), tuple(body))

    def parse_body_literal(self):
        negated = False
        tok = self.peek()
        if tok.kind == "IDENT" and tok.value == "not":
            self.next()
            negated = True
        tok = self.peek()
        if tok.kind == "VAR" and tok.value == "COND":
            if negated:
                raise ParseError("conditional literals occur only positively", tok.span)
            return self.parse_conditional()
        if self.at_punct("&"):
            return self.parse_external_or_query(negated)
        # atom or builtin: builtins start with a term followed by an operator
        if tok.kind in ("NUM", "STR", "VAR") or self._looks_like_builtin():
            lhs = self.parse_term()
            op = self.parse_op()
            rhs = self.parse_term()
            return BuiltinLit(lhs, op, rhs, negated)
        atom = self.parse_atom()
        if self._at_op():
            # e.g. `c < d`: the atom re-reads as a constant term
            if atom.args:
                raise ParseError("function term on builtin left-hand side must not take this form", tok.span)
            op = self.parse_op()
            rhs = self.parse_term()
            return BuiltinLit(Const(atom.pred), op, rhs, negated)
        return OrdLit(atom, negated)

    def _at_op(self) -> bool:
        tok = self.peek()
        return tok.kind == "PUNCT" and tok.value in _OPS

    def _looks_like_builtin(self) -> bool:
        # IDENT immediately followed by an operator
        tok, nxt = self.peek(), self.peek(1)
        return tok.kind == "IDENT" and nxt.kind == "PUNCT" and nxt.value in _OPS

    def parse_op(self) -> str:
        tok = self.next()
        if tok.kind == "PUNCT" and tok.value in _OPS:
            return tok.value
        raise ParseError(f"found {tok.value!r}", tok.span, expected=_OPS)

    def parse_conditional(self) -> CondLit:
        self.next()  # COND
        self.expect("(")
        template_negated = False
        tok = self.peek()
        if tok.kind == "IDENT" and tok.value == "not":
            self.next()
            template_negated = True
        template = self.parse_atom()
        self.expect(":")
        condition = self.parse_atom()
        self.expect(")")
        return CondLit(OrdLit(template, template_negated), condition)

    def parse_external_or_query(self, negated: bool):
        amp = self.expect("&")
        name_tok = self.next()
        if name_tok.kind != "IDENT":
            raise ParseError(f"found {name_tok.value!r}", name_tok.span, expected=("external name",))
        name = name_tok.value
        if name in ("query_c", "query_b"):
            return self.parse_query(name, negated, amp.span)
        self.expect("[")
        inputs = []
        if not self.at_punct("]"):
            inputs.append(self.parse_input_symbol())
            while self.at_punct(","):
                self.next()
                inputs.append(self.parse_input_symbol())
        self.expect("]")
        outputs = []
        if self.at_punct("("):
            self.next()
            if not self.at_punct(")"):
                outputs.append(self.parse_term())
                while self.at_punct(","):
                    self.next()
                    outputs.append(self.parse_term())
            self.expect(")")
        return ExtLit(name, tuple(inputs), tuple(outputs), negated)

    def parse_input_symbol(self) -> str:
        tok = self.next()
        if tok.kind == "IDENT":
            return tok.value
        raise ParseError(f"found {tok.value!r}", tok.span, expected=("predicate symbol",))

    def parse_query(self, name: str, negated: bool, span: SourceSpan) -> QueryLit:
        mode = "cautious" if name == "query_c" else "brave"
        self.expect("[")
        path_tok = self.next()
        if path_tok.kind != "STR":
            raise ParseError(f"found {path_tok.value!r}", path_tok.span, expected=("quoted subprogram path",))
        inputs = []
        if self.at_punct(";"):
            self.next()
            inputs.append(self.parse_input_symbol())
            while self.at_punct(","):
                self.next()
                inputs.append(self.parse_input_symbol())
        self.expect("]")
        self.expect("(")
        query = []
        if not self.at_punct(")"):
            query.append(self.parse_query_literal())
            while self.at_punct(","):
                self.next()
                query.append(self.parse_query_literal())
        self.expect(")")
        sub = self.loader(path_tok.value) if self.loader is not None else None
        return QueryLit(mode, path_tok.value, tuple(inputs), tuple(query), negated, sub)

    def parse_query_literal(self) -> OrdLit:
        negated = False
        tok = self.peek()
        if tok.kind == "IDENT" and tok.value == "not":
            self.next()
            negated = True
        span = self.peek().span
        atom = self.parse_atom()
        if not atom_is_ground(atom):
            raise ParseError(f"query literal {atom} is not ground", span)
        return OrdLit(atom, negated)

    def parse_atom(self) -> Atom:
        tok = self.next()
        if tok.kind != "IDENT":
            raise ParseError(f"found {tok.value!r}", tok.span, expected=("predicate symbol",))
        args = []
        if self.at_punct("("):
            self.next()
            if not self.at_punct(")"):
                args.append(self.parse_term())
                while self.at_punct(","):
                    self.next()
                    args.append(self.parse_term())
            self.expect(")")
        self._check_arity(self.pred_arity, tok.value, len(args), tok.span, "predicate")
        return Atom(tok.value, tuple(args))

    def parse_term(self):
        tok = self.next()
        if tok.kind == "NUM":
            return Const(tok.value)
        if tok.kind == "STR":
            return Const(tok.value)
        if tok.kind == "VAR":
            return Var(tok.value)
        if tok.kind == "IDENT":
            if self.at_punct("("):
                self.next()
                args = []
                if not self.at_punct(")"):
                    args.append(self.parse_term())
                    while self.at_punct(","):
                        self.next()
                        args.append(self.parse_term())
                self.expect(")")
                self._check_arity(self.func_arity, tok.value, len(args), tok.span, "function symbol")
                return Func(tok.value, tuple(args))
            return Const(tok.value)
        raise ParseError(f"found {tok.value!r}", tok.span, expected=("term",))

    def _check_arity(self, table: dict, name: str, arity: int, span: SourceSpan, what: str) -> None:
        seen = table.get(name)
        if seen is None:
            table[name] = arity
        elif seen != arity:
            raise ParseError(f"{what} {name!r} used with arity {arity}, previously {seen}", span)

    # -- safety -----------------------------------------------------------

    def check_safety(self, rule: Rule) -> None:
        bound = set()
        for lit in rule.body:
            if isinstance(lit, OrdLit) and not lit.negated:
                bound.update(atom_vars(lit.atom))
            elif isinstance(lit, ExtLit) and not lit.negated:
                for t in lit.outputs:
                    bound.update(term_vars(t))
        for a in rule.head:
            self._require_bound(atom_vars(a), bound, rule, "head")
        for lit in rule.body:
            if isinstance(lit, OrdLit) and lit.negated:
                self._require_bound(atom_vars(lit.atom), bound, rule, "negated literal")
            elif isinstance(lit, BuiltinLit):
                self._require_bound(lit_vars(lit), bound, rule, "builtin")
            elif isinstance(lit, CondLit):
                local = set(atom_vars(lit.condition)) | bound
                self._require_bound(atom_vars(lit.template.atom), local, rule, "conditional template")

    def _require_bound(self, varnames, bound, rule: Rule, where: str) -> None:
        for v in varnames:
            if v not in bound:
                raise ParseError(
                    f"unsafe variable {v} in {where} of rule `{rule}`"
                    " (must occur in a positive body atom or external output)"
                )


def file_loader(base_dir: str, limit: int = 32):
    """Loader resolving subprogram paths relative to `base_dir`."""

    def load(path: str) -> Program:
        full = path if os.path.isabs(path) else os.path.join(base_dir, path)
        with open(full, "r", encoding="utf-8") as fh:
            return parse_program(fh.read(), filename=full, loader=file_loader(os.path.dirname(full)))

    return load


def parse_program(text: str, filename: str = "<string>", loader=None) -> Program:
    """Parse program text into a Program; errors carry file:line:column."""
    return _Parser(_tokenize(text, filename), filename, loader).parse_program()


def render(p: Program) -> str:
    """Serialize a program; `parse_program(render(p))` is structurally `p`."""
    return render_program(p)
