"""Linear-logic formula syntax: tree, parser, printer, normal forms.

Surface grammar (ASCII, with the usual Unicode symbols accepted as aliases):

    atom      ::=  [a-z][a-z0-9_]*          (except the keywords top, bot)
    constant  ::=  1 | 0 | top | bot
    postfix   ::=  e^                       dual, tightest
    prefix    ::=  !e | ?e
    binary    ::=  e * e                    tensor, left-assoc
                |  e & e                    with, left-assoc
                |  e + e                    plus, left-assoc
                |  e @ e                    par, left-assoc
                |  e -o e                   lolli, right-assoc, loosest

Binary operators are listed from tightest to loosest.  Unicode aliases:
⊗ ⅋ ⊕ ⊸ ⊤ ⊥ for * @ + -o top bot.  Whitespace is
insignificant.  render() emits canonical ASCII with minimal parentheses and
parse(render(f)) reproduces f exactly.
"""

from __future__ import annotations

from dataclasses import dataclass


class Formula:
    """Base class for formula nodes.  Instances are immutable and hashable."""

    __slots__ = ()


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class One(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Zero(Formula):
    pass


@dataclass(frozen=True)
class Dual(Formula):
    body: Formula


@dataclass(frozen=True)
class Bang(Formula):
    body: Formula


@dataclass(frozen=True)
class Quest(Formula):
    body: Formula


@dataclass(frozen=True)
class Tensor(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Par(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class With(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Plus(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Lolli(Formula):
    left: Formula
    right: Formula


class ParseError(ValueError):
    """Raised on malformed formula text, with the offending position."""


# ---------------------------------------------------------------- tokenizer

_UNICODE_ALIASES = {
    "⊗": "*",   # tensor
    "⅋": "@",   # par
    "⊕": "+",   # plus
    "⊸": "-o",  # lolli
    "⊤": "top",
    "⊥": "bot",
}

_SYMBOLS = ("*", "&", "+", "@", "^", "!", "?", "(", ")")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    """Return (kind, value, position) triples.  kind is 'atom', 'const' or 'op'."""
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _UNICODE_ALIASES:
            alias = _UNICODE_ALIASES[ch]
            kind = "const" if alias in ("top", "bot") else "op"
            tokens.append((kind, alias, i))
            i += 1
            continue
        if text.startswith("-o", i):
            tokens.append(("op", "-o", i))
            i += 2
            continue
        if ch in _SYMBOLS:
            tokens.append(("op", ch, i))
            i += 1
            continue
        if ch in "10":
            tokens.append(("const", ch, i))
            i += 1
            continue
        if ch.isalpha() and ch.islower():
            j = i + 1
            while j < n and (text[j].islower() or text[j].isdigit() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "const" if word in ("top", "bot") else "atom"
            tokens.append((kind, word, i))
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r} at position {i}")
    return tokens


# ------------------------------------------------------------------- parser

_CONSTS = {"1": One(), "0": Zero(), "top": Top(), "bot": Bot()}

# binary operators, loosest first; lolli alone is right-associative
_BINARY_LEVELS: list[tuple[str, type]] = [
    ("-o", Lolli),
    ("@", Par),
    ("+", Plus),
    ("&", With),
    ("*", Tensor),
]


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input")
        self.pos += 1
        return tok

    def expect(self, value: str) -> None:
        tok = self.take()
        if tok[1] != value:
            raise ParseError(f"expected {value!r} at position {tok[2]}, got {tok[1]!r}")

    def parse(self) -> Formula:
        f = self.binary(0)
        tok = self.peek()
        if tok is not None:
            raise ParseError(f"trailing input at position {tok[2]}: {tok[1]!r}")
        return f

    def binary(self, level: int) -> Formula:
        if level >= len(_BINARY_LEVELS):
            return self.prefix()
        op, node = _BINARY_LEVELS[level]
        if op == "-o":
            left = self.binary(level + 1)
            tok = self.peek()
            if tok is not None and tok[1] == "-o":
                self.take()
                return node(left, self.binary(level))
            return left
        f = self.binary(level + 1)
        while True:
            tok = self.peek()
            if tok is None or tok[1] != op:
                return f
            self.take()
            f = node(f, self.binary(level + 1))

    def prefix(self) -> Formula:
        tok = self.peek()
        if tok is not None and tok[1] in ("!", "?"):
            self.take()
            body = self.prefix()
            return Bang(body) if tok[1] == "!" else Quest(body)
        return self.postfix()

    def postfix(self) -> Formula:
        f = self.primary()
        while True:
            tok = self.peek()
            if tok is None or tok[1] != "^":
                return f
            self.take()
            f = Dual(f)

    def primary(self) -> Formula:
        kind, value, pos = self.take()
        if kind == "atom":
            return Atom(value)
        if kind == "const":
            return _CONSTS[value]
        if value == "(":
            f = self.binary(0)
            self.expect(")")
            return f
        raise ParseError(f"unexpected {value!r} at position {pos}")


def parse(text: str) -> Formula:
    return _Parser(text).parse()


# ------------------------------------------------------------------ printer

# precedence levels for parenthesization; larger binds tighter
_PREC = {
    Lolli: 1,
    Par: 2,
    Plus: 3,
    With: 4,
    Tensor: 5,
    Bang: 6,
    Quest: 6,
    Dual: 7,
}
_ATOMIC = 8

_BINARY_TEXT = {Tensor: "*", Par: "@", With: "&", Plus: "+", Lolli: "-o"}
_CONST_TEXT = {One: "1", Zero: "0", Top: "top", Bot: "bot"}


def _prec(f: Formula) -> int:
    return _PREC.get(type(f), _ATOMIC)


def render(f: Formula) -> str:
    """Canonical ASCII text with the fewest parentheses the grammar allows."""
    if isinstance(f, Atom):
        return f.name
    if type(f) in _CONST_TEXT:
        return _CONST_TEXT[type(f)]
    if isinstance(f, Dual):
        inner = render(f.body)
        if _prec(f.body) < _PREC[Dual]:
            inner = f"({inner})"
        return inner + "^"
    if isinstance(f, (Bang, Quest)):
        inner = render(f.body)
        if _prec(f.body) < _PREC[Bang]:
            inner = f"({inner})"
        return ("!" if isinstance(f, Bang) else "?") + inner
    op = _BINARY_TEXT[type(f)]
    prec = _prec(f)
    # left-associative operators keep an equal-precedence left child bare;
    # lolli is the mirror image
    if isinstance(f, Lolli):
        lneed, rneed = _prec(f.left) <= prec, _prec(f.right) < prec
    else:
        lneed, rneed = _prec(f.left) < prec, _prec(f.right) <= prec
    left = f"({render(f.left)})" if lneed else render(f.left)
    right = f"({render(f.right)})" if rneed else render(f.right)
    return f"{left} {op} {right}"


# -------------------------------------------------------------- normal form

def normalize(f: Formula) -> Formula:
    """Negation normal form: duals pushed to atoms, lolli expanded, doubles cancelled."""
    if isinstance(f, (Atom, One, Bot, Top, Zero)):
        return f
    if isinstance(f, Dual):
        return dualize(f.body)
    if isinstance(f, Bang):
        return Bang(normalize(f.body))
    if isinstance(f, Quest):
        return Quest(normalize(f.body))
    if isinstance(f, Lolli):
        return Par(dualize(f.left), normalize(f.right))
    node = type(f)
    return node(normalize(f.left), normalize(f.right))


def dualize(f: Formula) -> Formula:
    """De Morgan dual, already in negation normal form."""
    if isinstance(f, Atom):
        return Dual(f)
    if isinstance(f, Dual):
        return normalize(f.body)
    if isinstance(f, One):
        return Bot()
    if isinstance(f, Bot):
        return One()
    if isinstance(f, Top):
        return Zero()
    if isinstance(f, Zero):
        return Top()
    if isinstance(f, Bang):
        return Quest(dualize(f.body))
    if isinstance(f, Quest):
        return Bang(dualize(f.body))
    if isinstance(f, Tensor):
        return Par(dualize(f.left), dualize(f.right))
    if isinstance(f, Par):
        return Tensor(dualize(f.left), dualize(f.right))
    if isinstance(f, With):
        return Plus(dualize(f.left), dualize(f.right))
    if isinstance(f, Plus):
        return With(dualize(f.left), dualize(f.right))
    if isinstance(f, Lolli):
        return Tensor(normalize(f.left), dualize(f.right))
    raise TypeError(f"not a formula: {f!r}")


def atom_names(f: Formula) -> set[str]:
    if isinstance(f, Atom):
        return {f.name}
    if isinstance(f, (One, Bot, Top, Zero)):
        return set()
    if isinstance(f, (Dual, Bang, Quest)):
        return atom_names(f.body)
    return atom_names(f.left) | atom_names(f.right)


def node_count(f: Formula) -> int:
    if isinstance(f, (Atom, One, Bot, Top, Zero)):
        return 1
    if isinstance(f, (Dual, Bang, Quest)):
        return 1 + node_count(f.body)
    return 1 + node_count(f.left) + node_count(f.right)


def connective_count(f: Formula) -> int:
    """Number of connective nodes; atoms and constants count zero."""
    if isinstance(f, (Atom, One, Bot, Top, Zero)):
        return 0
    if isinstance(f, (Dual, Bang, Quest)):
        return 1 + connective_count(f.body)
    return 1 + connective_count(f.left) + connective_count(f.right)


# ----------------------------------------------------------------- sequents

@dataclass(frozen=True)
class Sequent:
    """A one-sided sequent: a multiset of formulas, stored in canonical order.

    The canonical order sorts by rendered text, which makes structurally
    equal multisets compare equal regardless of how they were listed.
    """

    formulas: tuple[Formula, ...]

    def __init__(self, formulas) -> None:
        ordered = tuple(sorted(formulas, key=render))
        object.__setattr__(self, "formulas", ordered)

    def __str__(self) -> str:
        return "|- " + ", ".join(render(f) for f in self.formulas)

    def without(self, index: int) -> "Sequent":
        return Sequent(self.formulas[:index] + self.formulas[index + 1:])

    def with_added(self, *extra: Formula) -> "Sequent":
        return Sequent(self.formulas + tuple(extra))


def sequent_to_formula(seq: Sequent) -> Formula:
    """Par-fold of the sequent in canonical order; the empty sequent gives bot."""
    if not seq.formulas:
        return Bot()
    f = seq.formulas[0]
    for g in seq.formulas[1:]:
        f = Par(f, g)
    return f


def two_sided_to_one_sided(antecedents, succedents) -> Sequent:
    """Translate Gamma |- Delta to |- Gamma^, Delta with duals in normal form."""
    return Sequent([dualize(f) for f in antecedents]
                   + [normalize(f) for f in succedents])


def parse_sequent(text: str) -> Sequent:
    """Parse 'A, B |- C, D' or one-sided 'A, B'; '|-' may be written '⊢'."""
    text = text.replace("⊢", "|-")
    if "|-" in text:
        left, _, right = text.partition("|-")
        ante = [parse(p) for p in _split_commas(left)]
        succ = [parse(p) for p in _split_commas(right)]
        return two_sided_to_one_sided(ante, succ)
    return Sequent([normalize(parse(p)) for p in _split_commas(text)])


def _split_commas(text: str) -> list[str]:
    parts = [p.strip() for p in text.split(",")]
    return [p for p in parts if p]
