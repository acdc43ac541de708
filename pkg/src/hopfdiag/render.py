"""Text and SVG pictures of canonical diagrams.

Layers are drawn bottom to top (the first layer applied sits lowest).
Braidings are drawn as crossings: for ``br`` the strand from the lower
left passes over, for ``br_inv`` it passes under.
"""
from __future__ import annotations

from xml.sax.saxutils import escape

from .diagram import Diagram, Wire

__all__ = ["render_text", "render_svg", "CROSSINGS"]

# generator name -> True when the strand from the lower left goes over
CROSSINGS = {"br": True, "br_inv": False}

UNIT = 40  # svg pixels per column and per layer


def _is_crossing(cell) -> bool:
    return not isinstance(cell, Wire) and cell.sym.name in CROSSINGS and cell.sym.dom == 2


def _cell_width(cell) -> int:
    if isinstance(cell, Wire):
        return 1
    return max(cell.sym.dom, cell.sym.cod, 1)


def _text_cell(cell) -> str:
    w = 6 * _cell_width(cell)
    if isinstance(cell, Wire):
        return "|".center(w)
    if _is_crossing(cell):
        return ("X+" if CROSSINGS[cell.sym.name] else "X-").center(w)
    return f"[{cell.sym.name}]".center(w)


def render_text(d: Diagram) -> str:
    """One row per layer, top layer first; wires as ``|``, crossings as ``X+`` / ``X-``."""
    if not d.layers:
        return ("|".center(6) * d.dom).rstrip() + "\n" if d.dom else "(empty)\n"
    rows = ["".join(_text_cell(c) for c in layer).rstrip() for layer in reversed(d.layers)]
    return "\n".join(rows) + "\n"


def _layer_geometry(layer):
    """Per cell: (cell, left column, width); plus input and output x positions."""
    col = 0
    cells, xin, xout = [], [], []
    for cell in layer:
        w = _cell_width(cell)
        cells.append((cell, col, w))
        if isinstance(cell, Wire):
            xin.append(col + 0.5)
            xout.append(col + 0.5)
        else:
            xin += [col + w * (k + 0.5) / cell.sym.dom for k in range(cell.sym.dom)]
            xout += [col + w * (k + 0.5) / cell.sym.cod for k in range(cell.sym.cod)]
        col += w
    return cells, xin, xout, col


def render_svg(d: Diagram) -> str:
    """A standalone SVG document of the layered diagram."""
    geo = [_layer_geometry(layer) for layer in d.layers]
    ncols = max([g[3] for g in geo] + [d.dom, d.cod, 1])
    n = len(geo)
    # each layer gets a box band (height UNIT) and a routing band below it (height UNIT/2)
    band = UNIT * 1.5
    height = n * band + UNIT
    width = ncols * UNIT + UNIT
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
           f'viewBox="0 0 {width:.0f} {height:.0f}">',
           '<g stroke="black" stroke-width="2" fill="none" font-family="monospace" font-size="12">']

    def X(c):
        return UNIT / 2 + c * UNIT

    def Y(level):  # level 0 is the bottom edge of the picture
        return height - UNIT / 2 - level

    def line(x1, y1, x2, y2, extra=""):
        out.append(f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}"{extra}/>')

    prev = [i + 0.5 for i in range(d.dom)]
    for i, (cells, xin, xout, _) in enumerate(geo):
        base = i * band
        lo, hi = base + UNIT / 2, base + band
        for a, b in zip(prev, xin):  # routing from the previous frontier
            line(X(a), Y(base), X(b), Y(lo))
        for cell, col, w in cells:
            if isinstance(cell, Wire):
                line(X(col + 0.5), Y(lo), X(col + 0.5), Y(hi))
            elif _is_crossing(cell):
                ax, bx = X(col + 0.5), X(col + 1.5)
                over_lr = CROSSINGS[cell.sym.name]
                # the over strand is drawn whole; the under strand gets a gap
                o = (ax, Y(lo), bx, Y(hi)) if over_lr else (bx, Y(lo), ax, Y(hi))
                u = (bx, Y(lo), ax, Y(hi)) if over_lr else (ax, Y(lo), bx, Y(hi))
                line(*o)
                mx, my = (u[0] + u[2]) / 2, (u[1] + u[3]) / 2
                gap = 0.22
                line(u[0], u[1], mx + (u[0] - mx) * gap, my + (u[1] - my) * gap)
                line(mx + (u[2] - mx) * gap, my + (u[3] - my) * gap, u[2], u[3])
            else:
                k_in, k_out = cell.sym.dom, cell.sym.cod
                bx0, bx1 = X(col) + 4, X(col + w) - 4
                by0, by1 = Y(lo + UNIT * 0.3), Y(hi - UNIT * 0.3)
                for k in range(k_in):
                    x = X(col + w * (k + 0.5) / k_in)
                    line(x, Y(lo), x, by0)
                for k in range(k_out):
                    x = X(col + w * (k + 0.5) / k_out)
                    line(x, by1, x, Y(hi))
                out.append(f'<rect x="{bx0:.1f}" y="{by1:.1f}" width="{bx1 - bx0:.1f}" '
                           f'height="{by0 - by1:.1f}" fill="white"/>')
                out.append(f'<text x="{(bx0 + bx1) / 2:.1f}" y="{(by0 + by1) / 2 + 4:.1f}" '
                           f'text-anchor="middle" stroke="none" fill="black">'
                           f'{escape(cell.sym.name)}</text>')
        prev = xout
    top = n * band
    for a, b in zip(prev, [i + 0.5 for i in range(d.cod)]):
        line(X(a), Y(top), X(b), Y(top + UNIT / 2))
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
