"""Model formula language.

Supported syntax::

    y ~ a + b + a:b + (1 + a | g) + (1 | h)

``a*b`` expands to ``a + b + a:b``; ``:`` binds tighter than ``*``.
The intercept is always present; ``0`` and ``-1`` are rejected. Random
terms are parenthesized ``slopes | grouping`` groups whose slope part may
only contain ``1`` and plain identifiers.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from .errors import FormulaError

_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z.][A-Za-z0-9._]*)|(?P<num>\d+(?:\.\d*)?)|(?P<op>\|\||[~+\-:*()|/]))")


@dataclass(frozen=True, order=True)
class Term:
    """Product of variables; the empty product is the intercept."""

    variables: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(sorted(set(self.variables))))

    @property
    def is_intercept(self) -> bool:
        return not self.variables

    @property
    def order(self) -> int:
        return len(self.variables)

    def label(self) -> str:
        return ":".join(self.variables) if self.variables else "1"


INTERCEPT = Term()


@dataclass(frozen=True)
class RandomSpec:
    slope_terms: tuple[Term, ...]
    grouping: str

    @property
    def slope_variables(self) -> tuple[str, ...]:
        return tuple(v for t in self.slope_terms for v in t.variables)

    def format(self) -> str:
        return f"({' + '.join(t.label() for t in self.slope_terms)} | {self.grouping})"


@dataclass(frozen=True)
class FormulaAst:
    response: str | None
    fixed_terms: tuple[Term, ...]
    random_specs: tuple[RandomSpec, ...] = ()

    @property
    def variables(self) -> list[str]:
        """Every variable the formula references, response first, no repeats."""
        names = [self.response] if self.response else []
        for t in self.fixed_terms:
            names.extend(t.variables)
        for r in self.random_specs:
            names.extend(r.slope_variables)
            names.append(r.grouping)
        return list(dict.fromkeys(names))

    def __str__(self) -> str:
        return format_formula(self)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []  # (kind, value, byte offset)
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m:
                start = len(text) - len(text[pos:].lstrip())
                raise FormulaError(f"unexpected character {text[start]!r}", self._offset(start))
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), self._offset(m.start(kind))))
            pos = m.end()
        self.tokens.append(("end", "", self._offset(len(text))))
        self.i = 0

    def _offset(self, char_index: int) -> int:
        return len(self.text[:char_index].encode("utf-8"))

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise FormulaError(message, tok[2])

    def expect(self, kind, value=None):
        tok = self.next()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of formula"
            raise FormulaError(f"expected {want!r}, found {got!r}", tok[2])
        return tok

    def check_unsupported(self, tok):
        if tok[0] == "num" and tok[1] != "1":
            if tok[1] in ("0", "0."):
                self.fail("intercept suppression ('0') is not supported", tok)
            self.fail(f"unexpected number {tok[1]!r}", tok)
        if tok[1] == "-":
            self.fail("term removal with '-' is not supported", tok)
        if tok[1] in ("||", "/"):
            self.fail(f"unsupported syntax {tok[1]!r} in random term", tok)

    def parse(self) -> FormulaAst:
        response = None
        if self.peek()[1] != "~":
            response = self.expect("ident")[1]
        self.expect("op", "~")
        if self.peek()[0] == "end":
            self.fail("empty right-hand side")
        fixed: list[Term] = []
        randoms: list[RandomSpec] = []
        while True:
            tok = self.peek()
            self.check_unsupported(tok)
            if tok[1] == "(":
                self.next()
                randoms.append(self.parse_random(tok))
            elif tok[0] == "num":
                self.next()
                fixed.append(INTERCEPT)
            elif tok[0] == "ident":
                fixed.extend(self.parse_product())
            else:
                self.fail(f"expected a term, found {tok[1] or 'end of formula'!r}")
            tok = self.peek()
            if tok[0] == "end":
                break
            self.check_unsupported(tok)
            if tok[1] == ")":
                self.fail("unbalanced ')'")
            self.expect("op", "+")

        terms = list(dict.fromkeys([INTERCEPT] + fixed))
        terms.sort(key=lambda t: t.order)
        randoms = list(dict.fromkeys(randoms))
        if response is not None:
            for t in terms:
                if response in t.variables:
                    raise FormulaError(f"response {response!r} also appears as a predictor")
        return FormulaAst(response, tuple(terms), tuple(randoms))

    def parse_colon(self) -> list[str]:
        names = [self.expect("ident")[1]]
        while self.peek()[1] == ":":
            self.next()
            names.append(self.expect("ident")[1])
        return names

    def parse_product(self) -> list[Term]:
        factors = [self.parse_colon()]
        while self.peek()[1] == "*":
            self.next()
            factors.append(self.parse_colon())
        out = []
        for k in range(1, len(factors) + 1):
            for combo in itertools.combinations(factors, k):
                out.append(Term(tuple(v for f in combo for v in f)))
        return out

    def parse_random(self, open_tok) -> RandomSpec:
        slopes = [INTERCEPT]
        while True:
            tok = self.next()
            self.check_unsupported(tok)
            if tok[0] == "num":
                pass
            elif tok[0] == "ident":
                slopes.append(Term((tok[1],)))
            elif tok[0] == "end":
                raise FormulaError("unbalanced '('", open_tok[2])
            else:
                raise FormulaError(f"expected '1' or a variable in random term, found {tok[1]!r}", tok[2])
            tok = self.peek()
            self.check_unsupported(tok)
            if tok[1] == "+":
                self.next()
                continue
            if tok[1] == "|":
                self.next()
                break
            if tok[1] in (":", "*"):
                self.fail("interactions are not supported inside random terms")
            if tok[0] == "end":
                raise FormulaError("unbalanced '('", open_tok[2])
            self.fail("missing '|' and grouping variable in random term")
        tok = self.peek()
        if tok[0] != "ident":
            self.fail("missing grouping variable after '|'")
        grouping = self.next()[1]
        tok = self.peek()
        self.check_unsupported(tok)
        if tok[0] == "end":
            raise FormulaError("unbalanced '('", open_tok[2])
        self.expect("op", ")")
        slopes = tuple(dict.fromkeys(slopes))
        if any(grouping in t.variables for t in slopes):
            raise FormulaError(f"grouping variable {grouping!r} also used as a random slope", open_tok[2])
        return RandomSpec(slopes, grouping)


def parse_formula(text: str) -> FormulaAst:
    """Parse ``text`` into a normalized :class:`FormulaAst`.

    Terms are deduplicated, the intercept comes first, and terms are
    stably ordered by interaction order so that interactions follow their
    constituents.

    Raises
    ------
    FormulaError
        With the byte offset of the offending token.
    """
    return _Parser(text).parse()


def format_formula(ast: FormulaAst) -> str:
    parts = [t.label() for t in ast.fixed_terms if not t.is_intercept]
    if not parts:
        parts = ["1"]
    parts.extend(r.format() for r in ast.random_specs)
    lhs = f"{ast.response} ~ " if ast.response else "~ "
    return lhs + " + ".join(parts)
