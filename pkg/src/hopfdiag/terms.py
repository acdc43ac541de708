"""Morphism terms over a generator signature.

A term is built from identities, generators, composition and the monoidal
product.  Objects are bare naturals: ``n`` stands for the n-fold tensor power
of the single generating object, ``0`` for the monoidal unit.

Text syntax::

    term := prod ( "." prod )*      composition, right to left: f . g = f o g
    prod := atom ( "*" atom )*      monoidal product
    atom := "id" "[" NAT "]" | IDENT | IDENT "[" NAT "]" | "(" term ")"
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Union

__all__ = [
    "GenSym", "Id", "Gen", "Comp", "Tensor", "Term", "Signature",
    "TermError", "UnknownGenerator", "CompositionMismatch", "ParseError",
    "typecheck", "arity", "parse", "print_term", "pretty", "compose", "tensor",
    "braiding_family", "subterms", "generators",
]


@dataclass(frozen=True)
class GenSym:
    name: str
    dom: int
    cod: int
    kind: str = "gen"  # "gen" or "macro"

    def __post_init__(self):
        if self.dom < 0 or self.cod < 0:
            raise ValueError(f"negative arity for {self.name}")

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Id:
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("id[n] needs n >= 0")


@dataclass(frozen=True)
class Gen:
    sym: GenSym


@dataclass(frozen=True)
class Comp:
    after: "Term"
    before: "Term"


@dataclass(frozen=True)
class Tensor:
    left: "Term"
    right: "Term"


Term = Union[Id, Gen, Comp, Tensor]


class TermError(Exception):
    pass


class UnknownGenerator(TermError):
    def __init__(self, name: str):
        super().__init__(f"unknown generator {name!r}")
        self.name = name


class CompositionMismatch(TermError):
    def __init__(self, expected: int, found: int, path: tuple[str, ...] = ()):
        where = "/".join(path) or "<root>"
        super().__init__(
            f"composition mismatch at {where}: expected {expected} wires, found {found}")
        self.expected = expected
        self.found = found
        self.path = path


class ParseError(TermError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{msg} at line {line}, column {col}")
        self.line = line
        self.col = col


class Signature:
    """Generator table, optionally with macro names and indexed families.

    ``indexed`` maps a family name (e.g. ``alpha``) to a function from the
    index to the GenSym of that member.
    """

    def __init__(self, gens: Iterable[GenSym] = (),
                 indexed: dict[str, Callable[[int], GenSym]] | None = None):
        self._syms: dict[str, GenSym] = {}
        for g in gens:
            if g.name in self._syms and self._syms[g.name] != g:
                raise ValueError(f"duplicate generator {g.name}")
            self._syms[g.name] = g
        self._indexed = dict(indexed or {})

    def lookup(self, name: str, index: int | None = None) -> GenSym:
        if index is None:
            try:
                return self._syms[name]
            except KeyError:
                raise UnknownGenerator(name) from None
        if name not in self._indexed:
            raise UnknownGenerator(f"{name}[{index}]")
        return self._indexed[name](index)

    def resolve(self, full_name: str) -> GenSym:
        m = re.fullmatch(r"([A-Za-z_]\w*)\[(\d+)\]", full_name)
        if m:
            return self.lookup(m.group(1), int(m.group(2)))
        return self.lookup(full_name)

    def __contains__(self, sym: GenSym) -> bool:
        try:
            return self.resolve(sym.name) == sym
        except UnknownGenerator:
            return False

    def extend(self, gens: Iterable[GenSym] = (),
               indexed: dict[str, Callable[[int], GenSym]] | None = None) -> "Signature":
        out = Signature(list(self._syms.values()) + list(gens), {**self._indexed, **(indexed or {})})
        return out

    @property
    def generators(self) -> list[GenSym]:
        return [g for g in self._syms.values() if g.kind == "gen"]

    @property
    def macros(self) -> list[GenSym]:
        return [g for g in self._syms.values() if g.kind == "macro"]

    def __len__(self):
        return len(self.generators)

    def __iter__(self) -> Iterator[GenSym]:
        return iter(self.generators)


# -- typing -----------------------------------------------------------------

def typecheck(t: Term, sig: Signature | None = None, _path: tuple[str, ...] = ()) -> tuple[int, int]:
    """Return ``(dom, cod)`` of ``t``; raise on unknown generators or bad composites."""
    if isinstance(t, Id):
        return t.n, t.n
    if isinstance(t, Gen):
        if sig is not None and t.sym not in sig:
            raise UnknownGenerator(t.sym.name)
        return t.sym.dom, t.sym.cod
    if isinstance(t, Comp):
        d1, c1 = typecheck(t.after, sig, _path + ("after",))
        d2, c2 = typecheck(t.before, sig, _path + ("before",))
        if d1 != c2:
            raise CompositionMismatch(d1, c2, _path)
        return d2, c1
    if isinstance(t, Tensor):
        d1, c1 = typecheck(t.left, sig, _path + ("left",))
        d2, c2 = typecheck(t.right, sig, _path + ("right",))
        return d1 + d2, c1 + c2
    raise TypeError(f"not a term: {t!r}")


def arity(t: Term) -> tuple[int, int]:
    return typecheck(t)


def compose(*terms: Term) -> Term:
    """``compose(f, g, h)`` is ``f . g . h`` (h applied first)."""
    if not terms:
        raise ValueError("compose needs at least one term")
    out = terms[-1]
    for t in reversed(terms[:-1]):
        out = Comp(t, out)
    return out


def tensor(*terms: Term) -> Term:
    if not terms:
        return Id(0)
    out = terms[0]
    for t in terms[1:]:
        out = Tensor(out, t)
    return out


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, Comp):
        yield from subterms(t.after)
        yield from subterms(t.before)
    elif isinstance(t, Tensor):
        yield from subterms(t.left)
        yield from subterms(t.right)


def generators(t: Term) -> set[GenSym]:
    return {s.sym for s in subterms(t) if isinstance(s, Gen)}


def braiding_family(m: int, n: int, sig: Signature | None = None, *,
                    inverse: bool = False) -> Term:
    """Block braiding moving the first ``m`` strands past the last ``n``.

    Built from the elementary crossing ``br`` (``br_inv`` when ``inverse``)
    as gamma_{m,n} = (gamma_{1,n} * id[m-1]) . (id[1] * gamma_{m-1,n}).
    """
    if m < 0 or n < 0:
        raise ValueError("braiding_family needs m, n >= 0")
    name = "br_inv" if inverse else "br"
    cross = Gen(sig.lookup(name) if sig is not None else GenSym(name, 2, 2))
    if m == 0 or n == 0:
        return Id(m + n)

    def one_past(k: int) -> Term:
        # strand 0 moves to position k
        steps = [_pad(cross, i, k - 1 - i) for i in range(k)]
        return compose(*reversed(steps))

    if m == 1:
        return one_past(n)
    return Comp(_pad(one_past(n), 0, m - 1),
                _pad(braiding_family(m - 1, n, sig, inverse=inverse), 1, 0))


def _pad(t: Term, left: int, right: int) -> Term:
    if left:
        t = Tensor(Id(left), t)
    if right:
        t = Tensor(t, Id(right))
    return t


# -- text -------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z_]\w*)|(?P<nat>\d+)|(?P<op>[.*()\[\]]))")


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


@dataclass
class _Parser:
    src: str
    sig: Signature | None
    toks: list[_Tok] = field(default_factory=list)
    i: int = 0

    def where(self, pos: int) -> tuple[int, int]:
        line = self.src.count("\n", 0, pos) + 1
        col = pos - (self.src.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def fail(self, msg: str, pos: int | None = None):
        if pos is None:
            pos = self.toks[self.i].pos if self.i < len(self.toks) else len(self.src)
        raise ParseError(msg, *self.where(pos))

    def tokenize(self):
        pos = 0
        src = self.src.rstrip()
        while pos < len(src):
            m = _TOKEN.match(src, pos)
            if not m or m.end() == pos:
                self.fail(f"unexpected character {src[pos]!r}", pos)
            kind = m.lastgroup
            self.toks.append(_Tok(kind, m.group(kind), m.start(kind)))
            pos = m.end()

    def peek(self, text: str | None = None) -> bool:
        if self.i >= len(self.toks):
            return False
        return text is None or self.toks[self.i].text == text

    def expect(self, text: str) -> _Tok:
        if not self.peek(text):
            found = self.toks[self.i].text if self.i < len(self.toks) else "end of input"
            self.fail(f"expected {text!r}, found {found!r}")
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def term(self) -> Term:
        parts = [self.prod()]
        while self.peek("."):
            self.i += 1
            parts.append(self.prod())
        return compose(*parts)

    def prod(self) -> Term:
        parts = [self.atom()]
        while self.peek("*"):
            self.i += 1
            parts.append(self.atom())
        return tensor(*parts)

    def nat_index(self) -> int:
        self.expect("[")
        if self.i >= len(self.toks) or self.toks[self.i].kind != "nat":
            self.fail("expected a natural number")
        n = int(self.toks[self.i].text)
        self.i += 1
        self.expect("]")
        return n

    def atom(self) -> Term:
        if self.i >= len(self.toks):
            self.fail("unexpected end of input")
        tok = self.toks[self.i]
        if tok.text == "(":
            self.i += 1
            t = self.term()
            self.expect(")")
            return t
        if tok.kind != "ident":
            self.fail(f"unexpected {tok.text!r}")
        self.i += 1
        index = self.nat_index() if self.peek("[") else None
        if tok.text == "id":
            if index is None:
                self.fail("id needs an arity, e.g. id[1]", tok.pos)
            return Id(index)
        if self.sig is None:
            raise UnknownGenerator(tok.text)
        try:
            return Gen(self.sig.lookup(tok.text, index))
        except UnknownGenerator as e:
            line, col = self.where(tok.pos)
            raise UnknownGenerator(f"{e.name} (line {line}, column {col})") from None


def parse(src: str, sig: Signature | None = None) -> Term:
    p = _Parser(src, sig)
    p.tokenize()
    if not p.toks:
        p.fail("empty term", 0)
    t = p.term()
    if p.i != len(p.toks):
        p.fail(f"unexpected {p.toks[p.i].text!r}")
    return t


def print_term(t: Term) -> str:
    """Fully parenthesized text form; ``parse(print_term(t))`` rebuilds ``t``."""
    if isinstance(t, Id):
        return f"id[{t.n}]"
    if isinstance(t, Gen):
        return t.sym.name
    if isinstance(t, Comp):
        return f"({print_term(t.after)} . {print_term(t.before)})"
    return f"({print_term(t.left)} * {print_term(t.right)})"


def pretty(t: Term) -> str:
    """Text form with only the parentheses the grammar needs."""
    def comp_parts(x):
        if isinstance(x, Comp):
            return comp_parts(x.after) + comp_parts(x.before)
        return [x]

    def tens_parts(x):
        if isinstance(x, Tensor):
            return tens_parts(x.left) + tens_parts(x.right)
        return [x]

    def go(x, ctx):
        if isinstance(x, Id):
            return f"id[{x.n}]"
        if isinstance(x, Gen):
            return x.sym.name
        if isinstance(x, Comp):
            s = " . ".join(go(p, "comp") for p in comp_parts(x))
            return s if ctx == "top" else f"({s})"
        s = " * ".join(go(p, "tens") for p in tens_parts(x))
        return f"({s})" if ctx == "tens" else s

    return go(t, "top")
