"""Canonical layered string diagrams.

A diagram is stored as a sequence of *slices* ``(offset, generator)``: one
box per slice, ``offset`` counting the wires left of the box in the current
frontier.  Interchange, associativity and unit laws all reduce to
re-orderings of slices, so canonicalization picks one representative per
class:

* connected components that touch neither boundary (closed scalars) are
  split off, normalized on their own and sorted; in a braided category a
  scalar may be moved anywhere, so they are stacked on the far left;
* the rest is closed off with a bottom bar, a top bar and two wall wires,
  which makes it connected; the leftmost-exchange normal form of a
  connected planar diagram is unique, so it is used as the representative;
* the result is re-scheduled greedily into layers (every box in the
  earliest layer reachable by legal exchanges), which is the stored form.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .terms import Comp, Gen, GenSym, Id, Tensor, Term, compose, tensor, typecheck

__all__ = [
    "Wire", "Box", "WIRE", "Diagram", "Slice", "canonicalize", "slices_of",
    "DiagramError", "wiring", "normalize_slices",
]

Slice = tuple[int, GenSym]


class DiagramError(Exception):
    pass


@dataclass(frozen=True)
class Wire:
    def __repr__(self):
        return "Wire"


@dataclass(frozen=True)
class Box:
    sym: GenSym

    def __repr__(self):
        return f"Box({self.sym.name})"


WIRE = Wire()


def slices_of(t: Term) -> list[Slice]:
    """Slice sequence of a term, bottom to top, read off its syntax tree."""
    if isinstance(t, Id):
        return []
    if isinstance(t, Gen):
        return [(0, t.sym)]
    if isinstance(t, Comp):
        return slices_of(t.before) + slices_of(t.after)
    if isinstance(t, Tensor):
        _, cod_left = typecheck(t.left)
        return slices_of(t.left) + [(o + cod_left, g) for o, g in slices_of(t.right)]
    raise TypeError(f"not a term: {t!r}")


def check_slices(dom: int, slices: Sequence[Slice]) -> int:
    width = dom
    for o, g in slices:
        if o < 0 or o + g.dom > width:
            raise DiagramError(f"slice ({o}, {g.name}) does not fit width {width}")
        width += g.cod - g.dom
    return width


# -- wiring -----------------------------------------------------------------

@dataclass
class Wiring:
    """Port-level graph of a slice sequence.

    Wires ``0..dom-1`` are the inputs.  ``src[w]`` is ``None`` for an input,
    else ``(box, port)``; ``tgt[w]`` is ``None`` for an output wire.
    """
    dom: int
    ins: list[list[int]]
    outs: list[list[int]]
    src: list[tuple[int, int] | None]
    tgt: list[tuple[int, int] | None]
    outputs: list[int]


def wiring(dom: int, slices: Sequence[Slice]) -> Wiring:
    frontier = list(range(dom))
    src: list = [None] * dom
    tgt: list = [None] * dom
    ins, outs = [], []
    for i, (o, g) in enumerate(slices):
        consumed = frontier[o:o + g.dom]
        if len(consumed) != g.dom:
            raise DiagramError(f"slice ({o}, {g.name}) does not fit")
        for p, w in enumerate(consumed):
            tgt[w] = (i, p)
        made = []
        for p in range(g.cod):
            made.append(len(src))
            src.append((i, p))
            tgt.append(None)
        frontier[o:o + g.dom] = made
        ins.append(consumed)
        outs.append(made)
    return Wiring(dom, ins, outs, src, tgt, frontier)


def _components(dom: int, slices: Sequence[Slice]):
    """Connected components of boxes, with a flag for touching the boundary."""
    wr = wiring(dom, slices)
    n = len(slices)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    touches = [False] * n
    for w in range(len(wr.src)):
        s, t = wr.src[w], wr.tgt[w]
        if s is not None and t is not None:
            a, b = find(s[0]), find(t[0])
            if a != b:
                parent[a] = b
        if s is None and t is not None:
            touches[t[0]] = True
        if t is None and s is not None:
            touches[s[0]] = True
    comps: dict[int, list[int]] = {}
    for i in range(n):
        comps.setdefault(find(i), []).append(i)
    result = []
    for members in comps.values():
        result.append((members, any(touches[i] for i in members)))
    result.sort(key=lambda c: c[0][0])
    return result


def restrict(dom: int, slices: Sequence[Slice], keep: set[int], keep_inputs: bool):
    """Sub-sequence of ``slices`` on the boxes ``keep``, with offsets recomputed.

    ``keep`` must be a union of connected components.
    """
    frontier = [keep_inputs] * dom
    out = []
    for i, (o, g) in enumerate(slices):
        mine = i in keep
        if mine:
            out.append((sum(frontier[:o]), g))
        frontier[o:o + g.dom] = [mine] * g.cod
    return (dom if keep_inputs else 0), out


# -- exchange ---------------------------------------------------------------

def swap_back(first: Slice, second: Slice) -> tuple[Slice, Slice] | None:
    """Move ``second`` below ``first`` if they are independent.

    Returns the new ``(second', first')`` pair, or ``None``.  When both
    sides are free (a zero-input box next to a zero-output box) the box is
    kept on the left.
    """
    o1, b1 = first
    o2, b2 = second
    if o2 + b2.dom <= o1:
        return (o2, b2), (o1 - b2.dom + b2.cod, b1)
    if o2 >= o1 + b1.cod:
        return (o2 - b1.cod + b1.dom, b2), (o1, b1)
    return None


def _left_normal(slices: list[Slice]) -> list[Slice]:
    s = list(slices)
    n = len(s)
    budget = 4 * n ** 3 + 100
    changed = True
    while changed:
        changed = False
        for i in range(n - 1):
            (o1, b1), (o2, b2) = s[i], s[i + 1]
            if o2 + b2.dom <= o1:
                s[i] = (o2, b2)
                s[i + 1] = (o1 - b2.dom + b2.cod, b1)
                changed = True
                budget -= 1
                if budget < 0:
                    raise DiagramError("exchange normalization did not terminate")
    return s


def _slice_key(slices: Sequence[Slice]):
    return tuple((o, g.name, g.dom, g.cod) for o, g in slices)


def normalize_slices(dom: int, slices: Sequence[Slice]) -> list[Slice]:
    """Canonical slice order (see module docstring)."""
    cod = check_slices(dom, slices)
    if not slices:
        return []
    comps = _components(dom, slices)
    floating, main = [], set()
    for members, touches in comps:
        if touches:
            main.update(members)
        else:
            _, sub = restrict(dom, slices, set(members), keep_inputs=False)
            floating.append(_left_normal(sub))
    floating.sort(key=_slice_key)
    out = [s for comp in floating for s in comp]
    if main:
        _, sub = restrict(dom, slices, main, keep_inputs=True)
        bottom = GenSym("<bottom>", 0, dom + 2, "bar")
        top = GenSym("<top>", cod + 2, 0, "bar")
        closed = [(0, bottom)] + [(o + 1, g) for o, g in sub] + [(0, top)]
        closed = _left_normal(closed)
        if closed[0][1] is not bottom or closed[-1][1] is not top:
            raise DiagramError("boundary bars moved during normalization")
        out.extend((o - 1, g) for o, g in closed[1:-1])
    return out


def _schedule(dom: int, slices: Sequence[Slice]) -> list[tuple]:
    """Greedy earliest-layer scheduling of a canonical slice sequence."""
    remaining = list(slices)
    width = dom
    layers = []
    while remaining:
        group: list[Slice] = []
        rest: list[Slice] = []
        for s in remaining:
            cur, moved, ok = s, list(rest), True
            for j in range(len(rest) - 1, -1, -1):
                sw = swap_back(moved[j], cur)
                if sw is None:
                    ok = False
                    break
                cur, moved[j] = sw
            if ok:
                probe = cur
                for g in reversed(group):
                    sw = swap_back(g, probe)
                    if sw is None:
                        ok = False
                        break
                    probe = sw[0]
            if ok:
                group.append(cur)
                rest = moved
            else:
                rest.append(s)
        cells, width = _layer_cells(width, group)
        layers.append(cells)
        remaining = rest
    return layers


def _layer_cells(width: int, group: Sequence[Slice]):
    items: list = [None] * width  # None = untouched input wire, else GenSym
    for o, g in group:
        spans, pos = [], 0
        for idx, it in enumerate(items):
            size = 1 if it is None else it.cod
            spans.append((pos, pos + size, idx))
            pos += size
        if g.dom:
            idxs = [idx for a, b, idx in spans if a >= o and b <= o + g.dom and b > a]
            if (len(idxs) != g.dom or idxs[-1] - idxs[0] + 1 != g.dom
                    or any(items[i] is not None for i in idxs)):
                raise DiagramError("layer group is not independent")
            items[idxs[0]:idxs[-1] + 1] = [g]
        else:
            at = 0
            if o > 0:
                at = next(idx for a, b, idx in spans if a <= o - 1 < b) + 1
            items.insert(at, g)
    cells = tuple(WIRE if it is None else Box(it) for it in items)
    new_width = sum(1 if it is None else it.cod for it in items)
    return cells, new_width


# -- the value type -----------------------------------------------------------

class Diagram:
    """Canonical layered diagram; equality is structural on the layers."""

    def __init__(self, dom: int, cod: int, layers: Iterable[Iterable]):
        self.dom = dom
        self.cod = cod
        self.layers = tuple(tuple(layer) for layer in layers)
        self._hash = hash((dom, cod, self.layers))

    @classmethod
    def from_slices(cls, dom: int, slices: Sequence[Slice]) -> "Diagram":
        cod = check_slices(dom, slices)
        canon = normalize_slices(dom, slices)
        return cls(dom, cod, _schedule(dom, canon))

    def __eq__(self, other):
        return (isinstance(other, Diagram) and self._hash == other._hash
                and self.dom == other.dom and self.cod == other.cod
                and self.layers == other.layers)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Diagram({self.dom}->{self.cod}: {self.to_text()})"

    @cached_property
    def slices(self) -> tuple[Slice, ...]:
        out = []
        for layer in self.layers:
            pos = 0
            for cell in layer:
                if isinstance(cell, Box):
                    out.append((pos, cell.sym))
                    pos += cell.sym.cod
                else:
                    pos += 1
        return tuple(out)

    @cached_property
    def anchors(self) -> tuple[tuple[int, int], ...]:
        """``(layer, input offset)`` of every box, in slice order."""
        out = []
        for li, layer in enumerate(self.layers):
            x = 0
            for cell in layer:
                if isinstance(cell, Box):
                    out.append((li, x))
                    x += cell.sym.dom
                else:
                    x += 1
        return tuple(out)

    @cached_property
    def layer_starts(self) -> tuple[int, ...]:
        """Slice index of the first box of each layer, plus the total count."""
        out, n = [], 0
        for layer in self.layers:
            out.append(n)
            n += sum(isinstance(c, Box) for c in layer)
        out.append(n)
        return tuple(out)

    def frontier_width(self, layer: int) -> int:
        """Number of wires entering ``layer`` (``len(layers)`` gives ``cod``)."""
        if layer >= len(self.layers):
            return self.cod
        return sum(1 if isinstance(c, Wire) else c.sym.dom for c in self.layers[layer])

    @property
    def size(self) -> int:
        return len(self.slices)

    @property
    def boxes(self) -> list[GenSym]:
        return [g for _, g in self.slices]

    @cached_property
    def wiring(self) -> Wiring:
        return wiring(self.dom, self.slices)

    def to_term(self) -> Term:
        if not self.layers:
            return Id(self.dom)
        rows = []
        for layer in self.layers:
            parts, run = [], 0
            for cell in layer:
                if isinstance(cell, Wire):
                    run += 1
                    continue
                if run:
                    parts.append(Id(run))
                    run = 0
                parts.append(Gen(cell.sym))
            if run:
                parts.append(Id(run))
            rows.append(tensor(*parts) if parts else Id(0))
        return compose(*reversed(rows))

    def to_text(self) -> str:
        from .terms import pretty
        return pretty(self.to_term())


def canonicalize(t: Term) -> Diagram:
    """Canonical diagram of a (macro-free) term."""
    dom, cod = typecheck(t)
    return Diagram.from_slices(dom, slices_of(t))
