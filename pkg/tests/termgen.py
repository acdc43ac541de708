"""Random well-typed terms and structural-law rewrites for property tests."""
from __future__ import annotations

import random

from hopfdiag.terms import Comp, Gen, GenSym, Id, Tensor, Term, typecheck

TOY = [
    GenSym("mul", 2, 1), GenSym("cop", 1, 2), GenSym("unit", 0, 1), GenSym("cou", 1, 0),
    GenSym("ant", 1, 1), GenSym("br", 2, 2), GenSym("cpr", 0, 2), GenSym("pr", 2, 0),
    GenSym("s", 0, 0),
]


def random_term(rng: random.Random, gens=TOY, depth: int = 4) -> Term:
    if depth <= 0 or rng.random() < 0.2:
        if rng.random() < 0.15:
            return Id(rng.randint(0, 2))
        return Gen(rng.choice(gens))
    if rng.random() < 0.5:
        return Tensor(random_term(rng, gens, depth - 1), random_term(rng, gens, depth - 1))
    before = random_term(rng, gens, depth - 1)
    _, cod = typecheck(before)
    after = random_term_with_dom(rng, gens, cod, depth - 1)
    return Comp(after, before)


def random_term_with_dom(rng: random.Random, gens, dom: int, depth: int) -> Term:
    """A random term whose domain is ``dom``: a tensor of pieces eating the wires."""
    parts = []
    left = dom
    while left > 0:
        fitting = [g for g in gens if 0 < g.dom <= left]
        r = rng.random()
        if r < 0.25:
            k = rng.randint(1, left)
            parts.append(Id(k))
            left -= k
        elif r < 0.35:
            parts.append(Gen(rng.choice([g for g in gens if g.dom == 0])))
        else:
            g = rng.choice(fitting)
            piece: Term = Gen(g)
            if depth > 0 and rng.random() < 0.3:
                piece = Comp(random_term_with_dom(rng, gens, g.cod, depth - 1), piece)
            parts.append(piece)
            left -= g.dom
    if not parts or rng.random() < 0.2:
        parts.insert(rng.randint(0, len(parts)), Gen(rng.choice([g for g in gens if g.dom == 0])))
    out = parts[0]
    for p in parts[1:]:
        out = Tensor(out, p)
    return out


def _rewrites(t: Term, rng: random.Random) -> list[Term]:
    """All one-step structural rewrites at the root."""
    d, c = typecheck(t)
    out: list[Term] = [Comp(Id(c), t), Comp(t, Id(d)), Tensor(t, Id(0)), Tensor(Id(0), t)]
    if isinstance(t, Id) and t.n >= 1:
        k = rng.randint(0, t.n)
        out.append(Tensor(Id(k), Id(t.n - k)))
    if isinstance(t, Comp):
        a, b = t.after, t.before
        if isinstance(a, Comp):
            out.append(Comp(a.after, Comp(a.before, b)))
        if isinstance(b, Comp):
            out.append(Comp(Comp(a, b.after), b.before))
        if isinstance(a, Id):
            out.append(b)
        if isinstance(b, Id):
            out.append(a)
        if isinstance(a, Tensor) and isinstance(b, Tensor):
            if typecheck(a.left)[0] == typecheck(b.left)[1]:
                out.append(Tensor(Comp(a.left, b.left), Comp(a.right, b.right)))
    if isinstance(t, Tensor):
        f, g = t.left, t.right
        fd, fc = typecheck(f)
        gd, gc = typecheck(g)
        if isinstance(f, Tensor):
            out.append(Tensor(f.left, Tensor(f.right, g)))
        if isinstance(g, Tensor):
            out.append(Tensor(Tensor(f, g.left), g.right))
        if isinstance(f, Id) and f.n == 0:
            out.append(g)
        if isinstance(g, Id) and g.n == 0:
            out.append(f)
        if isinstance(f, Id) and isinstance(g, Id):
            out.append(Id(f.n + g.n))
        # interchange, both ways round
        out.append(Comp(Tensor(f, Id(gc)), Tensor(Id(fd), g)))
        out.append(Comp(Tensor(Id(fc), g), Tensor(f, Id(gd))))
    return out


def _children(t: Term):
    if isinstance(t, Comp):
        return [("after", t.after), ("before", t.before)]
    if isinstance(t, Tensor):
        return [("left", t.left), ("right", t.right)]
    return []


def _rebuild(t: Term, slot: str, new: Term) -> Term:
    if isinstance(t, Comp):
        return Comp(new, t.before) if slot == "after" else Comp(t.after, new)
    return Tensor(new, t.right) if slot == "left" else Tensor(t.left, new)


def structural_step(t: Term, rng: random.Random) -> Term:
    """Apply one random structural rewrite at a random position."""
    kids = _children(t)
    if kids and rng.random() < 0.6:
        slot, kid = rng.choice(kids)
        return _rebuild(t, slot, structural_step(kid, rng))
    return rng.choice(_rewrites(t, rng))


def scramble(t: Term, rng: random.Random, steps: int = 12) -> Term:
    for _ in range(steps):
        t = structural_step(t, rng)
    return t
