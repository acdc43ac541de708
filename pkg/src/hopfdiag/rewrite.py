"""Matching, rule application, proof scripts and bounded equality search.

Matching works on the port graph of the host: a candidate image of the
pattern's boxes is grown along wires, checked for convexity, then the host
slices are stably reordered (by legal exchanges only) into
``before | matched | after``.  The matched block, read in a window of the
frontier, must canonicalize to the pattern itself.  Patterns with no boxes
(``id[n]``) match at every layer cut and frontier offset.

Positions are written ``LAYER:OFFSET``: the first layer touched by the match
and the input offset of its leftmost matched box in that layer.  When two
matches share an anchor the later ones get a ``/j`` suffix.
"""
from __future__ import annotations

import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .diagram import Diagram, DiagramError, check_slices, swap_back
from .terms import Comp, Id, Tensor, Term, TermError, pretty, typecheck
from .theories import (
    DERIVED, RECONSTRUCTED, RewriteRule, Theory, TheoryError, build_alpha, load_theory,
)

__all__ = [
    "Position", "StalePosition", "find_matches", "apply_rule", "rewrites",
    "Step", "ProofScript", "Verdict", "check_proof", "SearchBudget", "NotFound",
    "search_equal", "q14_tactic", "resolve_position", "ScriptFormatError",
    "guided_proof", "label_positions",
]

log = logging.getLogger(__name__)


class StalePosition(Exception):
    pass


class ScriptFormatError(Exception):
    pass


@dataclass(frozen=True, order=True)
class Position:
    anchor: tuple[int, int]
    cells: tuple[int, ...]  # host slice indices; empty for an insertion
    window: int             # frontier offset of the pattern's left edge

    def __str__(self):
        return f"{self.anchor[0]}:{self.anchor[1]}"


# -- matching -------------------------------------------------------------------

def _descendants(host: Diagram) -> list[int]:
    """Bitmask of strict descendants of every host box."""
    wr = host.wiring
    n = len(host.slices)
    succ = [0] * n
    for i in range(n):
        for w in wr.outs[i]:
            t = wr.tgt[w]
            if t is not None:
                succ[i] |= 1 << t[0]
    desc = [0] * n
    for i in range(n - 1, -1, -1):
        m = succ[i]
        s = succ[i]
        while s:
            low = s & -s
            j = low.bit_length() - 1
            m |= desc[j]
            s ^= low
        desc[i] = m
    return desc


def _pattern_components(pat: Diagram) -> list[list[int]]:
    wr = pat.wiring
    n = len(pat.slices)
    seen = [False] * n
    comps = []
    for start in range(n):
        if seen[start]:
            continue
        order, stack = [], [start]
        seen[start] = True
        while stack:
            i = stack.pop(0)
            order.append(i)
            for w in wr.ins[i] + wr.outs[i]:
                for end in (wr.src[w], wr.tgt[w]):
                    if end is not None and not seen[end[0]]:
                        seen[end[0]] = True
                        stack.append(end[0])
        comps.append(order)
    return comps


def _grow(host: Diagram, pat: Diagram, comp: list[int], root: int) -> dict[int, int] | None:
    """Extend ``comp[0] -> root`` along wires; None on a clash."""
    hw, pw = host.wiring, pat.wiring
    hs, ps = host.slices, pat.slices
    f = {comp[0]: root}
    if hs[root][1] != ps[comp[0]][1]:
        return None
    queue = [comp[0]]
    while queue:
        i = queue.pop(0)
        hi = f[i]
        for side in ("ins", "outs"):
            pwires = getattr(pw, side)[i]
            hwires = getattr(hw, side)[hi]
            for p_wire, h_wire in zip(pwires, hwires):
                p_end = pw.src[p_wire] if side == "ins" else pw.tgt[p_wire]
                if p_end is None:
                    continue
                h_end = hw.src[h_wire] if side == "ins" else hw.tgt[h_wire]
                if h_end is None or h_end[1] != p_end[1]:
                    return None
                j, hj = p_end[0], h_end[0]
                if j in f:
                    if f[j] != hj:
                        return None
                    continue
                if hs[hj][1] != ps[j][1]:
                    return None
                f[j] = hj
                queue.append(j)
    if len(set(f.values())) != len(f):
        return None
    return f


def _split(host: Diagram, cells: frozenset[int], desc: list[int]):
    """Reorder host slices as before|cells|after, or None if not convex.

    Boxes that cannot be exchanged past the match (a wire dependency, or a
    zero-width box sitting between the outputs of a later box) are promoted
    to the after group together with their descendants.
    """
    mask = 0
    for c in cells:
        mask |= 1 << c
    after = 0
    for c in cells:
        after |= desc[c]
    after &= ~mask
    slices = host.slices
    n = len(slices)
    while True:
        a = after
        while a:
            low = a & -a
            if desc[low.bit_length() - 1] & mask:
                return None
            a ^= low
        keyed = [(1 if (mask >> i) & 1 else (2 if (after >> i) & 1 else 0), i, s)
                 for i, s in enumerate(slices)]
        promote = None
        for end in range(n - 1, 0, -1):
            swapped = False
            for i in range(end):
                if keyed[i][0] > keyed[i + 1][0]:
                    sw = swap_back(keyed[i][2], keyed[i + 1][2])
                    if sw is None:
                        promote = keyed[i + 1][1]
                        break
                    keyed[i], keyed[i + 1] = ((keyed[i + 1][0], keyed[i + 1][1], sw[0]),
                                              (keyed[i][0], keyed[i][1], sw[1]))
                    swapped = True
            if promote is not None or not swapped:
                break
        if promote is None:
            break
        if (mask >> promote) & 1:
            return None
        after |= (1 << promote) | desc[promote]
        after &= ~mask
    before = [s for k, _, s in keyed if k == 0]
    block = [s for k, _, s in keyed if k == 1]
    rest = [s for k, _, s in keyed if k == 2]
    return before, block, rest


def _windows(host_dom: int, before, block, pat: Diagram) -> list[int]:
    width = check_slices(host_dom, before)
    out = []
    for k in range(0, width - pat.dom + 1):
        shifted = [(o - k, g) for o, g in block]
        if any(o < 0 for o, _ in shifted):
            break
        try:
            check_slices(pat.dom, shifted)
        except DiagramError:
            continue
        if Diagram.from_slices(pat.dom, shifted) == pat:
            out.append(k)
    return out


def _insertions(host: Diagram, pat: Diagram) -> list[Position]:
    out = []
    n = pat.dom
    for cut in range(len(host.layers) + 1):
        width = host.frontier_width(cut) if host.layers else host.dom
        for x in range(0, width - n + 1):
            out.append(Position((cut, x), (), x))
    return out


def find_matches(host: Diagram, pat: Diagram) -> list[Position]:
    """All convex occurrences of ``pat`` in ``host``, sorted by anchor."""
    if pat.size == 0:
        return _insertions(host, pat)
    have = Counter(g for _, g in host.slices)
    need = Counter(g for _, g in pat.slices)
    if any(have[g] < c for g, c in need.items()):
        return []
    comps = _pattern_components(pat)
    per_comp = []
    for comp in comps:
        found = []
        for root in range(len(host.slices)):
            f = _grow(host, pat, comp, root)
            if f is not None:
                found.append(frozenset(f.values()))
        if not found:
            return []
        per_comp.append(sorted(set(found), key=sorted))
    images: set[frozenset[int]] = set()

    def combine(i, acc):
        if i == len(per_comp):
            images.add(acc)
            return
        for img in per_comp[i]:
            if not (img & acc):
                combine(i + 1, acc | img)

    combine(0, frozenset())
    desc = _descendants(host)
    anchors = host.anchors
    out = []
    for cells in images:
        split = _split(host, cells, desc)
        if split is None:
            continue
        before, block, _ = split
        for k in _windows(host.dom, before, block, pat):
            first = min(anchors[c] for c in cells)
            out.append(Position(first, tuple(sorted(cells)), k))
    out.sort()
    return out


def _replace(host: Diagram, pos: Position, pat: Diagram, repl: Diagram) -> Diagram:
    if not pos.cells:
        cut = pos.anchor[0]
        start = host.layer_starts[cut] if cut < len(host.layers) else len(host.slices)
        slices = (list(host.slices[:start]) + [(o + pos.window, g) for o, g in repl.slices]
                  + list(host.slices[start:]))
        return Diagram.from_slices(host.dom, slices)
    split = _split(host, frozenset(pos.cells), _descendants(host))
    if split is None:
        raise StalePosition(f"position {pos} is not convex in this diagram")
    before, _, after = split
    slices = before + [(o + pos.window, g) for o, g in repl.slices] + after
    return Diagram.from_slices(host.dom, slices)


def apply_rule(host: Diagram, rule: RewriteRule, direction: str, pos: Position) -> Diagram:
    """Replace the occurrence of one side of ``rule`` at ``pos`` by the other."""
    pat, repl = rule.sides(direction)
    if pos not in find_matches(host, pat):
        raise StalePosition(f"{rule.name} {direction} does not match at {pos}")
    return _replace(host, pos, pat, repl)


def rewrites(host: Diagram, rule: RewriteRule, direction: str, insertions: bool = True):
    """Yield ``(position, result)`` for every match of one side of ``rule``."""
    pat, repl = rule.sides(direction)
    if pat.size == 0 and not insertions:
        return
    for pos in find_matches(host, pat):
        yield pos, _replace(host, pos, pat, repl)


def label_positions(matches: Sequence[Position]) -> list[str]:
    """Text labels ``L:X`` (``L:X/j`` for repeated anchors) in match order."""
    seen: Counter = Counter()
    out = []
    for p in matches:
        j = seen[p.anchor]
        seen[p.anchor] += 1
        out.append(str(p) if j == 0 else f"{p}/{j}")
    return out


def resolve_position(host: Diagram, pat: Diagram, label: str) -> Position:
    m = re.fullmatch(r"(\d+):(\d+)(?:/(\d+))?", label.strip())
    if not m:
        raise ScriptFormatError(f"bad position {label!r}; expected LAYER:OFFSET")
    anchor = (int(m.group(1)), int(m.group(2)))
    j = int(m.group(3) or 0)
    same = [p for p in find_matches(host, pat) if p.anchor == anchor]
    if j >= len(same):
        raise StalePosition(f"no match at {label}")
    return same[j]


# -- proof scripts -----------------------------------------------------------------

DIRS = ("fwd", "bwd")


@dataclass(frozen=True)
class Step:
    rule: str
    direction: str
    position: str

    def __str__(self):
        return f"{self.rule} {self.direction} {self.position}"


@dataclass
class ProofScript:
    theory: str
    start: str
    goal: str
    steps: list[Step] = field(default_factory=list)
    comments: list[str] = field(default_factory=list)

    def to_text(self) -> str:
        lines = [f"# {c}" for c in self.comments]
        lines += [f"theory: {self.theory}", f"start: {self.start}", f"goal: {self.goal}"]
        lines += [str(s) for s in self.steps]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ProofScript":
        header: dict[str, str] = {}
        steps, comments = [], []
        for no, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                comments.append(line[1:].strip())
                continue
            m = re.match(r"(theory|start|goal)\s*:\s*(.*)", line)
            if m:
                if m.group(1) in header:
                    raise ScriptFormatError(f"line {no}: duplicate {m.group(1)} header")
                header[m.group(1)] = m.group(2).strip()
                continue
            parts = line.split("#", 1)[0].split()
            if len(parts) != 3 or parts[1] not in DIRS:
                raise ScriptFormatError(f"line {no}: expected 'RULE fwd|bwd LAYER:OFFSET'")
            if not re.fullmatch(r"\d+:\d+(/\d+)?", parts[2]):
                raise ScriptFormatError(f"line {no}: bad position {parts[2]!r}")
            steps.append(Step(*parts))
        missing = [k for k in ("theory", "start", "goal") if k not in header]
        if missing:
            raise ScriptFormatError(f"missing header(s): {', '.join(missing)}")
        return cls(header["theory"], header["start"], header["goal"], steps, comments)

    @classmethod
    def load(cls, path: str | Path) -> "ProofScript":
        return cls.from_text(Path(path).read_text())

    def save(self, path: str | Path):
        Path(path).write_text(self.to_text())

    @property
    def rules_used(self) -> list[str]:
        return [s.rule for s in self.steps]


@dataclass
class Verdict:
    accepted: bool
    step: int | None = None      # 1-based index of the failing step
    reason: str = ""
    state: Diagram | None = None
    trace: list = field(default_factory=list)

    def __bool__(self):
        return self.accepted

    def __str__(self):
        if self.accepted:
            return "Accepted"
        where = f"step {self.step}" if self.step else "final state"
        return f"Rejected({where}: {self.reason})"


def _rule_usable(rule: RewriteRule, th: Theory) -> str | None:
    if rule.status != RECONSTRUCTED:
        return None
    from .models import oracle_record
    rec = oracle_record(rule, th.name)
    if not rec.ok:
        return f"reconstructed rule {rule.name} has no oracle validation ({rec})"
    return None


def check_proof(p: ProofScript, th: Theory | None = None) -> Verdict:
    """Replay ``p``; accepted iff every step applies and the goal is reached."""
    if th is None:
        th = load_theory(p.theory, with_lemmas=True)
    try:
        state = th.diagram(p.start)
        goal = th.diagram(p.goal)
    except TermError as e:
        return Verdict(False, None, f"bad endpoint: {e}")
    if (state.dom, state.cod) != (goal.dom, goal.cod):
        return Verdict(False, None, "start and goal have different arities", state)
    trace = [state]
    for i, step in enumerate(p.steps, 1):
        try:
            rule = th.rule(step.rule)
        except TheoryError as e:
            return Verdict(False, i, str(e), state, trace)
        problem = _rule_usable(rule, th)
        if problem:
            return Verdict(False, i, problem, state, trace)
        pat, _ = rule.sides(step.direction)
        try:
            pos = resolve_position(state, pat, step.position)
        except (StalePosition, ScriptFormatError) as e:
            return Verdict(False, i, f"{step.rule} {step.direction}: {e}", state, trace)
        state = apply_rule(state, rule, step.direction, pos)
        trace.append(state)
    if state != goal:
        return Verdict(False, None, f"ends at {state.to_text()}, not the goal", state, trace)
    return Verdict(True, trace=trace, state=state)


# -- search ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SearchBudget:
    max_steps: int = 6          # per side
    max_frontier: int = 2000
    max_size: int = 24          # boxes
    insertions: bool = False    # expand box-free sides (id[n] -> ...) too

    def __post_init__(self):
        if min(self.max_steps, self.max_frontier, self.max_size) <= 0:
            raise ValueError("search budget values must be positive")


@dataclass
class NotFound:
    explored: int
    depth: tuple[int, int]

    def __bool__(self):
        return False

    def __str__(self):
        return (f"NotFoundWithinBudget(explored {self.explored} diagrams, "
                f"depths {self.depth[0]}+{self.depth[1]})")


def _expand(state: Diagram, rules: Sequence[RewriteRule], budget: SearchBudget,
            th: Theory, usable: dict):
    out = []
    for rule in rules:
        if rule.name not in usable:
            usable[rule.name] = _rule_usable(rule, th) is None
        if not usable[rule.name]:
            continue
        for d in DIRS:
            pat, _ = rule.sides(d)
            if pat.size > state.size:
                continue
            for pos, new in rewrites(state, rule, d, budget.insertions):
                if new.size <= budget.max_size:
                    out.append((new.size, rule.name, d, pos.anchor, pos.cells, pos.window,
                                new, rule, pos))
    out.sort(key=lambda x: x[:6])
    return out


def _invert(child: Diagram, parent: Diagram, rule: RewriteRule, direction: str) -> Step:
    """A step taking ``child`` back to ``parent`` with the same rule."""
    back = "bwd" if direction == "fwd" else "fwd"
    pat, _ = rule.sides(back)
    matches = find_matches(child, pat)
    labels = label_positions(matches)
    for pos, label in zip(matches, labels):
        if apply_rule(child, rule, back, pos) == parent:
            return Step(rule.name, back, label)
    raise RuntimeError(f"cannot invert step {rule.name} {direction}")


def _label(state: Diagram, rule: RewriteRule, direction: str, pos: Position) -> str:
    pat, _ = rule.sides(direction)
    matches = find_matches(state, pat)
    return label_positions(matches)[matches.index(pos)]


def search_equal(a: str | Term, b: str | Term, th: Theory,
                 budget: SearchBudget = SearchBudget(),
                 rules: Iterable[str] | None = None) -> ProofScript | NotFound:
    """Bidirectional breadth-first search for a rewrite path from a to b."""
    ta, tb = th.term(a), th.term(b)
    if typecheck(ta) != typecheck(tb):
        raise TermError(f"arity mismatch: {typecheck(ta)} vs {typecheck(tb)}")
    sa = a if isinstance(a, str) else pretty(a)
    sb = b if isinstance(b, str) else pretty(b)
    allowed = th.rules if rules is None else [th.rule(n) for n in rules]
    da, db = th.diagram(ta), th.diagram(tb)
    if da == db:
        return ProofScript(th.name, sa, sb, [])
    # parent[side][diagram] = (previous diagram, rule, direction, position) or None
    parents: list[dict] = [{da: None}, {db: None}]
    frontiers = [[da], [db]]
    depth = [0, 0]
    usable: dict = {}

    def finish(meet: Diagram) -> ProofScript:
        chain = []
        cur = meet
        while parents[0][cur] is not None:
            prev, rule, d, pos = parents[0][cur]
            chain.append(Step(rule.name, d, _label(prev, rule, d, pos)))
            cur = prev
        chain.reverse()
        cur = meet
        while parents[1][cur] is not None:
            prev, rule, d, pos = parents[1][cur]
            chain.append(_invert(cur, prev, rule, d))
            cur = prev
        return ProofScript(th.name, sa, sb, chain)

    while True:
        side = 0 if depth[0] <= depth[1] else 1
        if depth[side] >= budget.max_steps:
            side = 1 - side
        if depth[side] >= budget.max_steps or not frontiers[side]:
            other = 1 - side
            if depth[other] >= budget.max_steps or not frontiers[other]:
                return NotFound(len(parents[0]) + len(parents[1]), tuple(depth))
            side = other
        nxt = []
        for state in frontiers[side]:
            for item in _expand(state, allowed, budget, th, usable):
                new, rule, pos = item[6], item[7], item[8]
                d = item[2]
                if new in parents[side]:
                    continue
                parents[side][new] = (state, rule, d, pos)
                if new in parents[1 - side]:
                    return finish(new)
                nxt.append(new)
                if len(nxt) >= budget.max_frontier:
                    break
            if len(nxt) >= budget.max_frontier:
                break
        frontiers[side] = nxt
        depth[side] += 1
        log.debug("search depth %s frontier %d", depth, len(nxt))


# -- adjoint intertwining --------------------------------------------------------------

def q14_tactic(F: str | Term, n: int | None = None, th: Theory | None = None) -> RewriteRule:
    """Instance ``F . alpha[n] = alpha[m] . (id[1] * F)`` for ``F : n -> m``."""
    th = th or load_theory("HR")
    t = th.term(F) if isinstance(F, str) else th.term(F)
    dom, cod = typecheck(t)
    if n is not None and n != dom:
        raise TermError(f"arity mismatch: F has domain {dom}, not {n}")
    lhs = Comp(t, build_alpha(dom))
    rhs = Comp(build_alpha(cod), Tensor(Id(1), t))
    label = F if isinstance(F, str) else pretty(F)
    return RewriteRule(f"q14[{label}]", lhs, rhs, DERIVED, frozenset({"theorem", "adjoint"}),
                       "HR", f"{label} . alpha[{dom}] = alpha[{cod}] . (id[1] * {label})")


def guided_proof(th: Theory, start: str, goal: str, moves: Sequence[tuple[str, str]],
                 insertions: bool = True) -> ProofScript | None:
    """Find positions for a fixed sequence of ``(rule, direction)`` moves.

    Depth-first over the matches of each move; returns the first script
    whose replay ends at ``goal``.
    """
    target = th.diagram(goal)
    begin = th.diagram(start)

    def go(state: Diagram, i: int, acc: list[Step], seen: set):
        if i == len(moves):
            return acc if state == target else None
        name, d = moves[i]
        rule = th.rule(name)
        pat, _ = rule.sides(d)
        matches = find_matches(state, pat)
        if pat.size == 0 and not insertions:
            return None
        for pos, label in zip(matches, label_positions(matches)):
            new = _replace(state, pos, pat, rule.sides(d)[1])
            key = (new, i)
            if key in seen:
                continue
            seen.add(key)
            found = go(new, i + 1, acc + [Step(name, d, label)], seen)
            if found is not None:
                return found
        return None

    steps = go(begin, 0, [], set())
    if steps is None:
        return None
    return ProofScript(th.name, start, goal, steps)
