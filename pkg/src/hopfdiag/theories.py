"""Theory presentations loaded from rule files.

A rule file is line based::

    theory NAME                      optional; names the theory
    include FILE                     splice another rule file (same directory)
    gen NAME DOM COD                 generator
    macro NAME : TERM                named composite, expanded before matching
    rule NAME [tags] : TERM = TERM   equation, usable in both directions
    naturality [tags] : G1 G2 ...    slide rules of each generator past br/br_inv
    drop NAME                        remove a previously defined rule
    slot NAME                        named rule with no reading (placeholder)
    # comment

A trailing backslash continues a line.  Tags are free words; ``axiom``,
``derived`` and ``reconstructed`` set the status, ``proof=NAME`` points at a
proof script in the corpus.  The indexed family ``alpha[n]`` (adjoint
morphisms) is available in every theory that has the Hopf generators.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable

from .diagram import Diagram, canonicalize
from .terms import (
    Comp, Gen, GenSym, Id, Signature, Tensor, Term, TermError, braiding_family,
    compose, parse, pretty, tensor, typecheck,
)

__all__ = [
    "Theory", "RewriteRule", "TheoryError", "load_theory", "expand_macros",
    "build_alpha", "alpha_sym", "register_derived", "data_dir", "THEORY_NAMES",
    "AXIOM", "DERIVED", "RECONSTRUCTED",
]

AXIOM, DERIVED, RECONSTRUCTED = "axiom", "derived", "reconstructed"

DATA_ENV = "HOPFDIAG_DATA"

THEORY_FILES = {
    "HR": ["hr.rules"],
    "HBB": ["hbb.rules"],
    "HBB-ALT": ["hbb_alt.rules"],
    "ALGBAR": ["algbar.rules"],
}
THEORY_NAMES = tuple(THEORY_FILES)


class TheoryError(TermError):
    pass


@dataclass(frozen=True)
class RewriteRule:
    name: str
    lhs_term: Term
    rhs_term: Term
    status: str
    tags: frozenset = frozenset()
    theory: str = ""
    source: str = ""
    proof: str | None = None
    note: str = ""

    @property
    def lhs(self) -> Diagram:
        return _canon(self.lhs_term)

    @property
    def rhs(self) -> Diagram:
        return _canon(self.rhs_term)

    @property
    def arity(self) -> tuple[int, int]:
        return typecheck(self.lhs_term)

    def sides(self, direction: str) -> tuple[Diagram, Diagram]:
        """``(pattern, replacement)`` for direction ``fwd`` or ``bwd``."""
        if direction == "fwd":
            return self.lhs, self.rhs
        if direction == "bwd":
            return self.rhs, self.lhs
        raise ValueError(f"direction must be fwd or bwd, not {direction!r}")

    def __str__(self):
        return f"{self.name}: {pretty(self.lhs_term)} = {pretty(self.rhs_term)}"


@lru_cache(maxsize=4096)
def _canon(t: Term) -> Diagram:
    return canonicalize(t)


# -- adjoint morphisms --------------------------------------------------------

def alpha_sym(n: int) -> GenSym:
    if n < 0:
        raise ValueError("alpha[n] needs n >= 0")
    return GenSym(f"alpha[{n}]", n + 1, n, "macro")


_HOPF = {
    "cop": GenSym("cop", 1, 2), "cou": GenSym("cou", 1, 0), "mul": GenSym("mul", 2, 1),
    "ant": GenSym("ant", 1, 1), "br": GenSym("br", 2, 2),
}


@lru_cache(maxsize=None)
def build_alpha(n: int) -> Term:
    """Macro-free adjoint morphism alpha_n : 1+n -> n.

    alpha_0 is the counit, alpha_1 = m . (m * S) . (id * br) . (cop * id) and
    alpha_{n+1} = (alpha_n * alpha_1) . (id * gamma_{1,n} * id) . (cop * id[n+1]).
    """
    if n < 0:
        raise ValueError("alpha[n] needs n >= 0")
    g = {k: Gen(v) for k, v in _HOPF.items()}
    if n == 0:
        return g["cou"]
    a1 = compose(g["mul"], tensor(g["mul"], g["ant"]), tensor(Id(1), g["br"]),
                 tensor(g["cop"], Id(1)))
    if n == 1:
        return a1
    prev = build_alpha(n - 1)
    return compose(
        tensor(prev, a1),
        tensor(Id(1), braiding_family(1, n - 1), Id(1)),
        tensor(g["cop"], Id(n)),
    )


# -- theory -------------------------------------------------------------------

@dataclass(frozen=True)
class Theory:
    name: str
    generators: tuple[GenSym, ...]
    rules: tuple[RewriteRule, ...]
    macros: dict = field(default_factory=dict)  # name -> macro-free Term
    slots: tuple[str, ...] = ()
    sources: tuple[str, ...] = ()

    def __hash__(self):
        return hash((self.name, self.generators, self.rules))

    def __eq__(self, other):
        return (isinstance(other, Theory) and self.name == other.name
                and self.generators == other.generators and self.rules == other.rules)

    @property
    def signature(self) -> Signature:
        syms = list(self.generators)
        syms += [GenSym(k, *typecheck(v), "macro") for k, v in self.macros.items()]
        indexed = {"alpha": alpha_sym} if self.has_hopf else {}
        return Signature(syms, indexed)

    @property
    def has_hopf(self) -> bool:
        names = {g.name for g in self.generators}
        return all(k in names for k in _HOPF)

    def rule(self, name: str) -> RewriteRule:
        for r in self.rules:
            if r.name == name:
                return r
        if name in self.slots:
            raise TheoryError(f"rule {name} is an empty slot in {self.name}")
        raise TheoryError(f"no rule {name!r} in theory {self.name}")

    def __contains__(self, name: str) -> bool:
        return any(r.name == name for r in self.rules)

    def parse(self, src: str) -> Term:
        """Parse over the signature; the result may still contain macros."""
        t = parse(src, self.signature)
        typecheck(t)
        return t

    def term(self, src: str | Term) -> Term:
        """Parse (if needed) and expand macros."""
        t = self.parse(src) if isinstance(src, str) else src
        return expand_macros(t, self)

    def diagram(self, src: str | Term) -> Diagram:
        return _canon(self.term(src))

    def with_rule(self, rule: RewriteRule) -> "Theory":
        kept = tuple(r for r in self.rules if r.name != rule.name)
        return replace(self, rules=kept + (rule,))

    def without(self, *names: str) -> "Theory":
        return replace(self, rules=tuple(r for r in self.rules if r.name not in names))

    def renamed(self, name: str) -> "Theory":
        return replace(self, name=name)


def expand_macros(t: Term, th: Theory | None = None) -> Term:
    """Replace macro symbols (including ``alpha[n]``) by their bodies."""
    if isinstance(t, Id):
        return t
    if isinstance(t, Gen):
        if t.sym.kind != "macro":
            return t
        m = re.fullmatch(r"alpha\[(\d+)\]", t.sym.name)
        if m:
            return build_alpha(int(m.group(1)))
        if th is None or t.sym.name not in th.macros:
            raise TheoryError(f"unknown macro {t.sym.name!r}")
        return th.macros[t.sym.name]
    if isinstance(t, Comp):
        return Comp(expand_macros(t.after, th), expand_macros(t.before, th))
    return Tensor(expand_macros(t.left, th), expand_macros(t.right, th))


# -- rule files ---------------------------------------------------------------

def data_dir() -> Path:
    override = os.environ.get(DATA_ENV)
    if override:
        return Path(override)
    return Path(str(resources.files("hopfdiag") / "data"))


_LINE = re.compile(r"(?P<kw>\w+)\s*(?P<rest>.*)")
_RULE = re.compile(r"(?P<name>[\w']+)\s*(?:\[(?P<tags>[^\]]*)\])?\s*:\s*(?P<body>.+)")


@dataclass
class _Builder:
    name: str | None = None
    gens: dict = field(default_factory=dict)
    macros: dict = field(default_factory=dict)
    rules: dict = field(default_factory=dict)
    slots: list = field(default_factory=list)
    sources: list = field(default_factory=list)
    seen: set = field(default_factory=set)

    def signature(self) -> Signature:
        syms = list(self.gens.values())
        syms += [GenSym(k, *typecheck(v), "macro") for k, v in self.macros.items()]
        names = set(self.gens)
        indexed = {"alpha": alpha_sym} if all(k in names for k in _HOPF) else {}
        return Signature(syms, indexed)

    def expand(self, t: Term) -> Term:
        tmp = Theory("tmp", tuple(self.gens.values()), (), dict(self.macros))
        return expand_macros(t, tmp)


def _logical_lines(text: str):
    buf, start = "", None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if start is None:
            start = no
        if line.endswith("\\"):
            buf += line[:-1] + " "
            continue
        buf += line
        if buf.strip():
            yield start, buf.strip()
        buf, start = "", None
    if buf.strip():
        yield start, buf.strip()


def _status(tags: set[str]) -> str:
    for s in (AXIOM, DERIVED, RECONSTRUCTED):
        if s in tags:
            return s
    return AXIOM


def _read_file(b: _Builder, path: Path):
    path = Path(path)
    key = str(path.resolve())
    if key in b.seen:
        return
    b.seen.add(key)
    b.sources.append(path.name)
    text = path.read_text()
    local_tag = None
    for no, line in _logical_lines(text):
        where = f"{path.name}:{no}"
        m = _LINE.match(line)
        if not m:
            raise TheoryError(f"{where}: cannot read {line!r}")
        kw, rest = m.group("kw"), m.group("rest").strip()
        try:
            if kw == "theory":
                if b.name is None:
                    b.name = rest
                local_tag = rest
            elif kw == "include":
                fname = rest if rest.endswith(".rules") else rest + ".rules"
                target = path.parent / fname
                if not target.exists():  # user files may include the built-in ones
                    target = data_dir() / fname
                _read_file(b, target)
            elif kw == "gen":
                name, dom, cod = rest.split()
                sym = GenSym(name, int(dom), int(cod))
                if name in b.gens and b.gens[name] != sym:
                    raise TheoryError(f"generator {name} redeclared with another arity")
                b.gens[name] = sym
            elif kw == "macro":
                name, body = (s.strip() for s in rest.split(":", 1))
                b.macros[name] = b.expand(parse(body, b.signature()))
                typecheck(b.macros[name])
            elif kw == "rule":
                rule = _read_rule(b, rest, local_tag or "", where)
                b.rules[rule.name] = rule
            elif kw == "naturality":
                for rule in _naturality(b, rest, local_tag or ""):
                    b.rules[rule.name] = rule
            elif kw == "drop":
                if rest not in b.rules:
                    raise TheoryError(f"cannot drop unknown rule {rest}")
                del b.rules[rest]
            elif kw == "slot":
                b.slots.append(rest)
            else:
                raise TheoryError(f"unknown directive {kw!r}")
        except TheoryError as e:
            if str(e).startswith(where):
                raise
            raise TheoryError(f"{where}: {e}") from None
        except TermError as e:
            raise TheoryError(f"{where}: {e}") from None
        except ValueError as e:
            raise TheoryError(f"{where}: malformed {kw} line ({e})") from None


def _read_rule(b: _Builder, rest: str, theory_tag: str, where: str) -> RewriteRule:
    m = _RULE.fullmatch(rest)
    if not m:
        raise TheoryError("expected 'rule NAME [tags] : TERM = TERM'")
    name = m.group("name")
    tags = set((m.group("tags") or "").replace(",", " ").split())
    body = m.group("body")
    if body.count("=") != 1:
        raise TheoryError(f"rule {name}: expected exactly one '='")
    lsrc, rsrc = (s.strip() for s in body.split("="))
    sig = b.signature()
    lhs = b.expand(parse(lsrc, sig))
    rhs = b.expand(parse(rsrc, sig))
    la, ra = typecheck(lhs), typecheck(rhs)
    if la != ra:
        raise TheoryError(f"rule {name}: arity mismatch, lhs {la[0]}->{la[1]} "
                          f"but rhs {ra[0]}->{ra[1]}")
    proof = next((t.split("=", 1)[1] for t in tags if t.startswith("proof=")), None)
    return RewriteRule(name, lhs, rhs, _status(tags), frozenset(tags), theory_tag,
                       f"{lsrc} = {rsrc}", proof)


def _naturality(b: _Builder, rest: str, theory_tag: str) -> list[RewriteRule]:
    """Slide rules ``g`` past a crossing, on either side, for both crossings.

    nat_G_X_l:  X_{cod,1} . (G * id) = (id * G) . X_{dom,1}
    nat_G_X_r:  X_{1,cod} . (id * G) = (G * id) . X_{1,dom}
    where X is br (``o``) or br_inv (``u``).
    """
    m = re.fullmatch(r"(?:\[(?P<tags>[^\]]*)\])?\s*:\s*(?P<names>.+)", rest)
    if not m:
        raise TheoryError("expected 'naturality [tags] : GEN ...'")
    tags = set((m.group("tags") or "").replace(",", " ").split())
    sig = b.signature()
    out = []
    for gname in m.group("names").split():
        g = sig.lookup(gname)
        for cross, inv in (("o", False), ("u", True)):
            G = Gen(g)
            lhs_l = Comp(braiding_family(g.cod, 1, inverse=inv), Tensor(G, Id(1)))
            rhs_l = Comp(Tensor(Id(1), G), braiding_family(g.dom, 1, inverse=inv))
            lhs_r = Comp(braiding_family(1, g.cod, inverse=inv), Tensor(Id(1), G))
            rhs_r = Comp(Tensor(G, Id(1)), braiding_family(1, g.dom, inverse=inv))
            for side, lhs, rhs in (("l", lhs_l, rhs_l), ("r", lhs_r, rhs_r)):
                name = f"nat_{gname}_{cross}{side}"
                out.append(RewriteRule(name, lhs, rhs, _status(tags), frozenset(tags | {"nat"}),
                                       theory_tag, f"{pretty(lhs)} = {pretty(rhs)}"))
    return out


def load_rule_files(paths: Iterable[Path | str], name: str | None = None) -> Theory:
    b = _Builder()
    for p in paths:
        _read_file(b, Path(p))
    th_name = name or b.name or "custom"
    for r in b.rules.values():
        typecheck(r.lhs_term)
    return Theory(th_name, tuple(b.gens.values()), tuple(b.rules.values()), dict(b.macros),
                  tuple(b.slots), tuple(b.sources))


@lru_cache(maxsize=32)
def _load_cached(name: str, extra: tuple[str, ...], root: str) -> Theory:
    base = Path(root)
    files = [base / f for f in THEORY_FILES[name]] + [Path(p) for p in extra]
    return load_rule_files(files, name)


def load_theory(name: str, extra_files: Iterable[Path | str] = (),
                with_lemmas: bool = False) -> Theory:
    """Built-in theory ``HR``, ``HBB``, ``HBB-ALT`` or ``ALGBAR``, merged with
    user rule files (later definitions of a rule name win)."""
    key = name.upper().replace("_", "-")
    if key not in THEORY_FILES:
        raise TheoryError(f"unknown theory {name!r}; choose from {', '.join(THEORY_NAMES)}")
    extra = [str(Path(p).resolve()) for p in extra_files]
    if with_lemmas and key != "ALGBAR":
        extra = [str(data_dir() / "lemmas.rules"), str(data_dir() / "adjoint.rules")] + extra
    return _load_cached(key, tuple(extra), str(data_dir()))


def register_derived(th: Theory, rule: RewriteRule, evidence, models=None) -> Theory:
    """Return ``th`` extended by ``rule`` once ``evidence`` validates it.

    ``evidence`` is a proof script (checked with the rule's sides as its
    endpoints; the rule then becomes Derived) or the string ``"oracle"``
    (the rule must hold in every compatible model; it is then recorded as
    Reconstructed with the model list as note).
    """
    from . import models as _models
    from . import rewrite as _rewrite

    la, ra = typecheck(rule.lhs_term), typecheck(rule.rhs_term)
    if la != ra:
        raise TheoryError(f"rule {rule.name}: arity mismatch {la} vs {ra}")
    if isinstance(evidence, _rewrite.ProofScript):
        if (th.diagram(evidence.start) != rule.lhs or th.diagram(evidence.goal) != rule.rhs):
            raise TheoryError(f"proof endpoints do not match rule {rule.name}")
        verdict = _rewrite.check_proof(evidence, th)
        if not verdict.accepted:
            raise TheoryError(f"proof of {rule.name} rejected: {verdict}")
        new = replace(rule, status=DERIVED, note=f"checked script, {len(evidence.steps)} steps")
        return th.with_rule(new)
    if evidence == "oracle":
        record = _models.oracle_record(rule, th.name, models)
        if not record.ok:
            raise TheoryError(f"oracle rejects {rule.name}: {record}")
        new = replace(rule, status=RECONSTRUCTED if rule.status != DERIVED else DERIVED,
                      note=str(record))
        return th.with_rule(new)
    raise TheoryError("evidence must be a ProofScript or 'oracle'")
