"""Model formula mini-language.

Grammar (whitespace is insignificant)::

    formula := "~" term ("+" term)*
    term    := "1" | ident | ident ":" ident | "P(" ident "," integer ")"

The intercept is always part of the model; writing ``1`` is accepted and has
no further effect. ``x1:x2`` is the interaction of two factors and ``P(x1, 2)``
the quadratic effect of ``x1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .basis import BasisSpec
from .errors import ConfigError, FormulaSyntaxError


@dataclass(frozen=True)
class Main:
    factor: str

    def render(self):
        return self.factor


@dataclass(frozen=True)
class Interaction:
    left: str
    right: str

    def render(self):
        return f"{self.left}:{self.right}"


@dataclass(frozen=True)
class Polynomial:
    factor: str
    degree: int

    def render(self):
        return f"P({self.factor}, {self.degree})"


@dataclass(frozen=True)
class FormulaAst:
    terms: tuple
    include_intercept: bool = True

    def render(self):
        if not self.terms:
            return "~ 1"
        return "~ " + " + ".join(t.render() for t in self.terms)

    def __str__(self):
        return self.render()


_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z_.][A-Za-z0-9_.]*)|(?P<int>\d+)|(?P<op>[~+:(),]))")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            bad = len(text) - len(text[pos:].lstrip())
            raise FormulaSyntaxError(f"unexpected character {text[bad]!r}", text, bad)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind, value=None):
        tok = self.tokens[self.i]
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            got = tok[1] or "end of formula"
            raise FormulaSyntaxError(f"expected {want!r} but found {got!r}", self.text, tok[2])
        self.i += 1
        return tok

    def term(self):
        kind, value, pos = self.peek()
        if kind == "int":
            self.i += 1
            if value != "1":
                raise FormulaSyntaxError(f"only the constant 1 is allowed as a term, got {value}", self.text, pos)
            return None
        name = self.take("ident")[1]
        if name == "P" and self.peek()[:2] == ("op", "("):
            self.take("op", "(")
            factor = self.take("ident")[1]
            self.take("op", ",")
            _, deg, deg_pos = self.take("int")
            self.take("op", ")")
            if int(deg) < 2:
                raise FormulaSyntaxError(f"P() degree must be at least 2, got {deg}", self.text, deg_pos)
            return Polynomial(factor, int(deg))
        if self.peek()[:2] == ("op", ":"):
            self.take("op", ":")
            other_pos = self.peek()[2]
            other = self.take("ident")[1]
            if other == name:
                raise FormulaSyntaxError(
                    f"interaction of {name} with itself; use P({name}, 2)", self.text, other_pos)
            return Interaction(name, other)
        return Main(name)

    def formula(self):
        self.take("op", "~")
        terms = []
        seen = set()
        while True:
            pos = self.peek()[2]
            term = self.term()
            if term is not None:
                key = frozenset((term.left, term.right)) if isinstance(term, Interaction) else term
                if key in seen:
                    raise FormulaSyntaxError(f"duplicate term {term.render()!r}", self.text, pos)
                seen.add(key)
                terms.append(term)
            if self.peek()[0] == "end":
                break
            self.take("op", "+")
        return FormulaAst(tuple(terms))


def parse_formula(text):
    """Parse a formula string such as ``"~ x1 + x2 + x1:x2"``."""
    if not isinstance(text, str):
        raise FormulaSyntaxError(f"formula must be a string, got {type(text).__name__}")
    return _Parser(text).formula()


@dataclass(frozen=True)
class Term:
    """One column block of the model matrix.

    ``kind`` is ``intercept``, ``main``, ``interaction`` or ``polynomial``;
    ``factors`` holds factor indices (repeated for polynomials).
    """

    kind: str
    factors: tuple
    param: BasisSpec
    label: str

    @property
    def n_params(self):
        return self.param.dimension


@dataclass(frozen=True)
class TermList:
    terms: tuple
    factor_names: tuple

    @property
    def n_terms(self):
        return len(self.terms)

    @property
    def sizes(self):
        return tuple(t.n_params for t in self.terms)

    @property
    def n_params(self):
        return sum(self.sizes)

    @property
    def offsets(self):
        out, acc = [], 0
        for size in self.sizes:
            out.append(acc)
            acc += size
        return tuple(out)


def _as_param_spec(entry, tbounds):
    if isinstance(entry, BasisSpec):
        if entry.tbounds != tuple(float(v) for v in tbounds):
            raise ConfigError("parameter basis time bounds differ from the factor time bounds")
        return entry
    family, degree, *rest = entry
    knots = rest[0] if rest else ()
    return BasisSpec(family, degree, tuple(knots or ()), tbounds)


def expand_terms(ast, factor_specs, param_specs):
    """Bind every formula term to its parameter basis.

    ``factor_specs`` maps factor names to their ``BasisSpec`` in declaration
    order. ``param_specs`` has one entry per non-intercept term, each either a
    ``BasisSpec`` or a ``(family, degree, knots)`` tuple. The intercept always
    comes first with a constant parameter basis.
    """
    names = tuple(factor_specs)
    if not names:
        raise ConfigError("at least one factor is required")
    specs = list(factor_specs.values())
    tbounds = specs[0].tbounds
    for name, s in factor_specs.items():
        if s.tbounds != tbounds:
            raise ConfigError(f"factor {name} has time bounds {s.tbounds}, expected {tbounds}")
    param_specs = list(param_specs)
    if len(param_specs) != len(ast.terms):
        raise ConfigError(
            f"the formula has {len(ast.terms)} non-intercept terms but {len(param_specs)} "
            "parameter bases were given (pars/db/knotsb need one entry per term)")

    index = {n: i for i, n in enumerate(names)}

    def resolve(name):
        if name not in index:
            raise ConfigError(f"unknown factor {name!r} in formula; factors are {list(names)}")
        return index[name]

    terms = [Term("intercept", (), BasisSpec.constant(tbounds), "(Intercept)")]
    seen = set()
    for t, entry in zip(ast.terms, param_specs):
        param = _as_param_spec(entry, tbounds)
        if isinstance(t, Main):
            factors = (resolve(t.factor),)
            kind = "main"
        elif isinstance(t, Interaction):
            factors = tuple(sorted((resolve(t.left), resolve(t.right))))
            kind = "interaction"
        else:
            factors = (resolve(t.factor),) * t.degree
            kind = "polynomial"
        if (kind, factors) in seen:
            raise ConfigError(f"duplicate term {t.render()!r}")
        seen.add((kind, factors))
        if kind == "interaction":
            label = f"{names[factors[0]]}:{names[factors[1]]}"
        else:
            label = t.render()
        terms.append(Term(kind, factors, param, label))
    return TermList(tuple(terms), names)
