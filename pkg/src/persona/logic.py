"""Propositional language, formula parsing, and model enumeration.

A world is a total truth assignment encoded as an integer bit pattern:
the first atom of the language occupies the highest bit, so for the
language [a, b] world 3 (0b11) assigns a=true, b=true and world 2
(0b10) assigns a=true, b=false.  All semantic operations enumerate the
full 2^n world space, which is capped (default 20 atoms).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

import numpy as np

DEFAULT_MAX_ATOMS = 20

_ATOM_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_RESERVED = ("true", "false")


class LanguageError(ValueError):
    """Invalid language definition (bad atom names, duplicates, too large)."""


class FormulaSyntaxError(ValueError):
    """Concrete-syntax error; carries the 0-based offset into the input."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownAtomError(ValueError):
    """An atom that is not part of the language; carries the atom name."""

    def __init__(self, atom: str):
        super().__init__(f"unknown atom: {atom!r}")
        self.atom = atom


@dataclass(frozen=True)
class Language:
    """Ordered atom table fixing the world-index semantics."""

    atoms: tuple[str, ...]
    max_atoms: int = field(default=DEFAULT_MAX_ATOMS, compare=False, repr=False)

    def __post_init__(self):
        atoms = tuple(self.atoms)
        object.__setattr__(self, "atoms", atoms)
        seen = set()
        for name in atoms:
            if not name or not _ATOM_RE.fullmatch(name):
                raise LanguageError(f"invalid atom name: {name!r}")
            if name in _RESERVED:
                raise LanguageError(f"atom name {name!r} is reserved")
            if name in seen:
                raise LanguageError(f"duplicate atom: {name!r}")
            seen.add(name)
        if len(atoms) > self.max_atoms:
            raise LanguageError(
                f"{len(atoms)} atoms exceeds the cap of {self.max_atoms}"
            )

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @property
    def world_count(self) -> int:
        return 1 << len(self.atoms)

    def bit(self, atom: str) -> int:
        """Bit position of ``atom``: first atom in order is the highest bit."""
        try:
            i = self.atoms.index(atom)
        except ValueError:
            raise UnknownAtomError(atom) from None
        return len(self.atoms) - 1 - i

    def world(self, index: int) -> "World":
        return World(self, index)

    def worlds(self) -> Iterator["World"]:
        for i in range(self.world_count):
            yield World(self, i)


@dataclass(frozen=True)
class World:
    """One total truth assignment; ``index`` is the value of its bit pattern."""

    language: Language
    index: int

    def __post_init__(self):
        if not 0 <= self.index < self.language.world_count:
            raise ValueError(f"world index {self.index} out of range")

    def value(self, atom: str) -> bool:
        return bool((self.index >> self.language.bit(atom)) & 1)

    def assignment(self) -> dict[str, bool]:
        return {a: self.value(a) for a in self.language.atoms}


# --- formula AST -----------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Not:
    operand: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


Formula = Union[Const, Atom, Not, And, Or, Implies, Iff]

TRUE = Const(True)
FALSE = Const(False)


def atoms_of(f: Formula) -> frozenset[str]:
    if isinstance(f, Atom):
        return frozenset((f.name,))
    if isinstance(f, Const):
        return frozenset()
    if isinstance(f, Not):
        return atoms_of(f.operand)
    return atoms_of(f.left) | atoms_of(f.right)


# --- concrete syntax -------------------------------------------------------
#
# Precedence (tightest first): ! > & > | > -> > <->.  Implication is
# right-associative; the other binary operators associate to the left.

_TOKENS = [
    ("IFF", "<->"),
    ("IMPLIES", "->"),
    ("NOT", "!"),
    ("NOT", "~"),
    ("AND", "&"),
    ("OR", "|"),
    ("LPAREN", "("),
    ("RPAREN", ")"),
]


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        for kind, lit in _TOKENS:
            if text.startswith(lit, i):
                out.append((kind, lit, i))
                i += len(lit)
                break
        else:
            m = _ATOM_RE.match(text, i)
            if not m:
                raise FormulaSyntaxError(f"unexpected character {ch!r}", i)
            word = m.group(0)
            kind = "CONST" if word in _RESERVED else "ATOM"
            out.append((kind, word, i))
            i = m.end()
    out.append(("END", "", n))
    return out


class _Parser:
    def __init__(self, tokens: list[tuple[str, str, int]], lang: Language):
        self.tokens = tokens
        self.lang = lang
        self.pos = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def parse(self) -> Formula:
        f = self.iff()
        kind, value, at = self.peek()
        if kind != "END":
            raise FormulaSyntaxError(f"unexpected {value!r}", at)
        return f

    def iff(self) -> Formula:
        left = self.implies()
        while self.peek()[0] == "IFF":
            self.take()
            left = Iff(left, self.implies())
        return left

    def implies(self) -> Formula:
        left = self.disjunction()
        if self.peek()[0] == "IMPLIES":
            self.take()
            return Implies(left, self.implies())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.peek()[0] == "OR":
            self.take()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.peek()[0] == "AND":
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        kind, _, _ = self.peek()
        if kind == "NOT":
            self.take()
            return Not(self.unary())
        return self.primary()

    def primary(self) -> Formula:
        kind, value, at = self.take()
        if kind == "CONST":
            return Const(value == "true")
        if kind == "ATOM":
            if value not in self.lang.atoms:
                raise UnknownAtomError(value)
            return Atom(value)
        if kind == "LPAREN":
            f = self.iff()
            kind, _, at = self.take()
            if kind != "RPAREN":
                raise FormulaSyntaxError("expected ')'", at)
            return f
        if kind == "END":
            raise FormulaSyntaxError("unexpected end of input", at)
        raise FormulaSyntaxError(f"unexpected {value!r}", at)


def parse_formula(text: str, lang: Language) -> Formula:
    """Parse concrete syntax into an AST over ``lang``."""
    if not text.strip():
        raise FormulaSyntaxError("empty formula", 0)
    return _Parser(_tokenize(text), lang).parse()


_LEVEL = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5, Atom: 6, Const: 6}


def format_formula(f: Formula) -> str:
    """Render with minimal parentheses; reparsing yields an identical tree."""

    def go(node: Formula, need: int) -> str:
        level = _LEVEL[type(node)]
        if isinstance(node, Const):
            text = "true" if node.value else "false"
        elif isinstance(node, Atom):
            text = node.name
        elif isinstance(node, Not):
            text = "!" + go(node.operand, 5)
        elif isinstance(node, And):
            text = f"{go(node.left, 4)} & {go(node.right, 5)}"
        elif isinstance(node, Or):
            text = f"{go(node.left, 3)} | {go(node.right, 4)}"
        elif isinstance(node, Implies):
            # right-associative: the left operand needs tighter binding
            text = f"{go(node.left, 3)} -> {go(node.right, 2)}"
        else:
            text = f"{go(node.left, 1)} <-> {go(node.right, 2)}"
        return f"({text})" if level < need else text

    return go(f, 1)


# --- semantics -------------------------------------------------------------

def eval_world(f: Formula, w: World) -> bool:
    """Classical truth value of ``f`` at a single world."""
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Atom):
        return w.value(f.name)
    if isinstance(f, Not):
        return not eval_world(f.operand, w)
    if isinstance(f, And):
        return eval_world(f.left, w) and eval_world(f.right, w)
    if isinstance(f, Or):
        return eval_world(f.left, w) or eval_world(f.right, w)
    if isinstance(f, Implies):
        return (not eval_world(f.left, w)) or eval_world(f.right, w)
    if isinstance(f, Iff):
        return eval_world(f.left, w) == eval_world(f.right, w)
    raise TypeError(f"not a formula: {f!r}")


def truth_table(f: Formula, lang: Language) -> np.ndarray:
    """Boolean satisfaction vector over all worlds, indexed by world index."""
    size = lang.world_count
    if isinstance(f, Const):
        return np.full(size, f.value, dtype=bool)
    if isinstance(f, Atom):
        bit = lang.bit(f.name)
        return ((np.arange(size) >> bit) & 1).astype(bool)
    if isinstance(f, Not):
        return ~truth_table(f.operand, lang)
    if isinstance(f, And):
        return truth_table(f.left, lang) & truth_table(f.right, lang)
    if isinstance(f, Or):
        return truth_table(f.left, lang) | truth_table(f.right, lang)
    if isinstance(f, Implies):
        return ~truth_table(f.left, lang) | truth_table(f.right, lang)
    if isinstance(f, Iff):
        return truth_table(f.left, lang) == truth_table(f.right, lang)
    raise TypeError(f"not a formula: {f!r}")


def conjunction(formulas: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is ``true``."""
    result: Formula | None = None
    for f in formulas:
        result = f if result is None else And(result, f)
    return TRUE if result is None else result


def conjunction_table(formulas: Iterable[Formula], lang: Language) -> np.ndarray:
    table = np.ones(lang.world_count, dtype=bool)
    for f in formulas:
        table &= truth_table(f, lang)
    return table


def models_of(f: Formula, lang: Language) -> tuple[World, ...]:
    """All satisfying worlds, in ascending index order."""
    table = truth_table(f, lang)
    return tuple(World(lang, int(i)) for i in np.flatnonzero(table))


def entails(premises: Iterable[Formula], f: Formula, lang: Language) -> bool:
    """True iff every world satisfying all premises satisfies ``f``."""
    table = conjunction_table(premises, lang)
    return bool(np.all(~table | truth_table(f, lang)))


def is_consistent(premises: Iterable[Formula], lang: Language) -> bool:
    """True iff some world satisfies all premises."""
    return bool(conjunction_table(premises, lang).any())
