"""Exact finite-dimensional Hopf algebra models and the evaluation oracle.

A model interprets every generator of HR by an integer (or Fraction) matrix
of shape ``d**cod x d**dom``.  Evaluation runs slice by slice over a state
tensor; int64 arithmetic is used while it is safe and the state switches to
Python integers on overflow, so results are always exact.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .diagram import Diagram, slices_of
from .terms import Term, typecheck
from .theories import RewriteRule, expand_macros, load_theory

__all__ = [
    "GroupTable", "HopfModel", "ModelError", "group_algebra", "function_algebra",
    "evaluate", "check_rule_in_model", "Holds", "Fails", "builtin_group",
    "model_by_name", "shipped_models", "oracle_record", "OracleRecord", "BUILTIN_GROUPS",
    "check_equal", "compare",
]


class ModelError(Exception):
    pass


# -- groups ---------------------------------------------------------------------

@dataclass(frozen=True)
class GroupTable:
    name: str
    table: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.table)
        if n == 0 or any(len(row) != n for row in self.table):
            raise ModelError("multiplication table must be square and non-empty")
        if any(not 0 <= x < n for row in self.table for x in row):
            raise ModelError("table entries must be element indices 0..n-1")
        for a, b, c in itertools.product(range(n), repeat=3):
            if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                raise ModelError(f"not associative at ({a}, {b}, {c})")
        e = self.identity  # raises when there is none
        for g in range(n):
            if e not in self.table[g]:
                raise ModelError(f"element {g} has no inverse")

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def identity(self) -> int:
        n = self.order
        for e in range(n):
            if all(self.table[e][g] == g == self.table[g][e] for g in range(n)):
                return e
        raise ModelError("no identity element")

    @property
    def inverse(self) -> tuple[int, ...]:
        e = self.identity
        return tuple(self.table[g].index(e) for g in range(self.order))

    def mul(self, g: int, h: int) -> int:
        return self.table[g][h]

    @property
    def abelian(self) -> bool:
        n = self.order
        return all(self.table[a][b] == self.table[b][a] for a in range(n) for b in range(n))

    @classmethod
    def from_text(cls, text: str, name: str = "custom") -> "GroupTable":
        rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        try:
            n = int(rows[0][0])
            table = tuple(tuple(int(x) for x in r) for r in rows[1:])
        except (IndexError, ValueError):
            raise ModelError("group file: first line n, then n rows of n indices") from None
        if len(table) != n:
            raise ModelError(f"group file declares order {n} but has {len(table)} rows")
        return cls(name, table)

    @classmethod
    def from_file(cls, path: str | Path) -> "GroupTable":
        p = Path(path)
        return cls.from_text(p.read_text(), p.stem)

    @classmethod
    def cyclic(cls, n: int) -> "GroupTable":
        return cls(f"z{n}", tuple(tuple((a + b) % n for b in range(n)) for a in range(n)))

    @classmethod
    def symmetric3(cls) -> "GroupTable":
        perms = sorted(itertools.permutations(range(3)))
        idx = {p: i for i, p in enumerate(perms)}
        # (p q)(x) = p(q(x))
        table = tuple(tuple(idx[tuple(p[q[x]] for x in range(3))] for q in perms) for p in perms)
        return cls("s3", table)


def builtin_group(name: str) -> GroupTable:
    key = name.lower()
    if key in ("trivial", "1", "z1"):
        return GroupTable("trivial", ((0,),))
    if key == "z2":
        return GroupTable.cyclic(2)
    if key == "z3":
        return GroupTable.cyclic(3)
    if key == "s3":
        return GroupTable.symmetric3()
    raise ModelError(f"unknown group {name!r}; built-ins are trivial, z2, z3, s3")


BUILTIN_GROUPS = ("trivial", "z2", "z3", "s3")


# -- models -----------------------------------------------------------------------

HR_GENERATORS = {
    "cop": (1, 2), "cou": (1, 0), "mul": (2, 1), "unit": (0, 1), "ant": (1, 1),
    "ant_inv": (1, 1), "br": (2, 2), "br_inv": (2, 2), "intg": (0, 1), "cointg": (1, 0),
    "rib": (1, 1), "rib_inv": (1, 1), "cpr": (0, 2),
}


def _exact(a) -> np.ndarray:
    arr = np.asarray(a, dtype=object)
    if all(isinstance(x, (int, np.integer)) or (isinstance(x, Fraction) and x.denominator == 1)
           for x in arr.flat):
        return np.array([int(x) for x in arr.flat], dtype=np.int64).reshape(arr.shape)
    return np.array([Fraction(x) for x in arr.flat], dtype=object).reshape(arr.shape)


@dataclass(eq=False)
class HopfModel:
    """Structure maps of a finite-dimensional Hopf algebra with ribbon data.

    ``tags`` lists the theories whose rules the model satisfies (HOPF, HR,
    HBB, HBB-ALT); ``fails`` names rules known to fail although their theory
    is tagged.
    """
    name: str
    dim: int
    maps: dict
    tags: frozenset = frozenset({"HOPF", "HR"})
    fails: frozenset = frozenset()
    basis: tuple = ()
    symmetric: bool = True
    _sparse: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        d = self.dim
        self.maps = {k: _exact(v) for k, v in self.maps.items()}
        for g, (dom, cod) in HR_GENERATORS.items():
            if g not in self.maps:
                raise ModelError(f"model {self.name} lacks {g}")
        for g, m in self.maps.items():
            dom, cod = HR_GENERATORS.get(g, (None, None))
            if dom is not None and m.shape != (d ** cod, d ** dom):
                raise ModelError(f"{g}: shape {m.shape}, expected {(d ** cod, d ** dom)}")
        if self.symmetric:
            br = self.maps["br"]
            if not np.array_equal(br.dot(br), np.eye(d * d, dtype=np.int64)):
                raise ModelError("braid does not square to the identity")

    def __repr__(self):
        return f"HopfModel({self.name}, dim={self.dim})"

    def matrix(self, name: str) -> np.ndarray:
        try:
            return self.maps[name]
        except KeyError:
            raise ModelError(f"generator {name!r} is not interpreted by model {self.name}") from None

    def sparse(self, name: str):
        if name not in self._sparse:
            m = self.matrix(name)
            rows, cols = np.nonzero(m != 0)
            if m.dtype == object:
                self._sparse[name] = None
            else:
                self._sparse[name] = (rows.astype(np.intp), cols.astype(np.intp),
                                      np.ascontiguousarray(m[rows, cols], dtype=np.int64))
        return self._sparse[name]

    def compatible(self, rule: RewriteRule) -> bool:
        if rule.theory not in self.tags or rule.name in self.fails:
            return False
        # lemmas and theorem-backed rules may depend on any axiom
        return not (self.fails and rule.tags & {"lemma", "theorem"})

    def verify(self, theories: Iterable[str] = ("HR",)) -> list[tuple[str, "Fails"]]:
        """Failures among the rules of ``theories`` this model claims to satisfy."""
        bad = []
        for tname in theories:
            for rule in load_theory(tname).rules:
                if self.compatible(rule):
                    res = check_rule_in_model(rule, self)
                    if not res:
                        bad.append((rule.name, res))
        return bad


def _perm_matrix(images: Sequence[int], n: int) -> np.ndarray:
    m = np.zeros((n, n), dtype=np.int64)
    for src, dst in enumerate(images):
        m[dst, src] = 1
    return m


def _swap(d: int) -> np.ndarray:
    m = np.zeros((d * d, d * d), dtype=np.int64)
    for a in range(d):
        for b in range(d):
            m[b * d + a, a * d + b] = 1
    return m


@lru_cache(maxsize=None)
def group_algebra(G: GroupTable, check: bool = True) -> HopfModel:
    """k[G] with v = id, trivial copairing, L = sum of g, l = coefficient of e."""
    n, e, inv = G.order, G.identity, G.inverse
    mul = np.zeros((n, n * n), dtype=np.int64)
    cop = np.zeros((n * n, n), dtype=np.int64)
    for g in range(n):
        cop[g * n + g, g] = 1
        for h in range(n):
            mul[G.mul(g, h), g * n + h] = 1
    unit = np.zeros((n, 1), dtype=np.int64)
    unit[e, 0] = 1
    cointg = np.zeros((1, n), dtype=np.int64)
    cointg[0, e] = 1
    ant = _perm_matrix(inv, n)
    eye = np.eye(n, dtype=np.int64)
    maps = {
        "mul": mul, "cop": cop, "unit": unit, "cou": np.ones((1, n), dtype=np.int64),
        "ant": ant, "ant_inv": ant, "rib": eye, "rib_inv": eye,
        "br": _swap(n), "br_inv": _swap(n), "cpr": np.kron(unit, unit),
        "intg": np.ones((n, 1), dtype=np.int64), "cointg": cointg,
    }
    tags = {"HOPF", "HR", "HBB-ALT"}
    if n == 1:
        tags.add("HBB")
    model = HopfModel(f"k[{G.name}]", n, maps, frozenset(tags), basis=tuple(range(n)))
    if check:
        _admit(model)
    return model


@lru_cache(maxsize=None)
def function_algebra(G: GroupTable, check: bool = True) -> HopfModel:
    """k^G (functions on G) with v = id and trivial copairing; not
    cocommutative when G is nonabelian, so (r8) fails there."""
    n, e, inv = G.order, G.identity, G.inverse
    mul = np.zeros((n, n * n), dtype=np.int64)
    cop = np.zeros((n * n, n), dtype=np.int64)
    for g in range(n):
        mul[g, g * n + g] = 1
        for h in range(n):
            # delta_g -> sum_h delta_h (x) delta_{h^-1 g}
            cop[h * n + G.mul(inv[h], g), g] = 1
    cou = np.zeros((1, n), dtype=np.int64)
    cou[0, e] = 1
    ones = np.ones((n, 1), dtype=np.int64)
    intg = np.zeros((n, 1), dtype=np.int64)
    intg[e, 0] = 1
    ant = _perm_matrix(inv, n)
    eye = np.eye(n, dtype=np.int64)
    maps = {
        "mul": mul, "cop": cop, "unit": ones, "cou": cou, "ant": ant, "ant_inv": ant,
        "rib": eye, "rib_inv": eye, "br": _swap(n), "br_inv": _swap(n),
        "cpr": np.kron(ones, ones), "intg": intg, "cointg": np.ones((1, n), dtype=np.int64),
    }
    fails = frozenset() if G.abelian else frozenset({"r8"})
    tags = {"HOPF", "HR"} | ({"HBB-ALT"} if G.abelian else set())
    model = HopfModel(f"k^{G.name}", n, maps, frozenset(tags), fails, basis=tuple(range(n)))
    if check:
        _admit(model)
    return model


def _admit(model: HopfModel):
    bad = model.verify(["HR"])
    if bad:
        names = ", ".join(name for name, _ in bad)
        raise ModelError(f"{model.name} violates rules it claims: {names}")


def model_by_name(name: str) -> HopfModel:
    """``trivial|z2|z3|s3`` (group algebras), ``fun-G`` (function algebras) or a group file."""
    key = name.lower()
    if key.startswith("fun-"):
        rest = name[4:]
        G = builtin_group(rest) if rest.lower() in BUILTIN_GROUPS else GroupTable.from_file(rest)
        return function_algebra(G)
    if key in BUILTIN_GROUPS or key in ("1", "z1"):
        return group_algebra(builtin_group(key))
    p = Path(name)
    if p.exists():
        return group_algebra(GroupTable.from_file(p))
    raise ModelError(f"unknown model {name!r}; use trivial, z2, z3, s3, fun-s3, fun-z3 or a group file")


def shipped_models() -> list[HopfModel]:
    out = [group_algebra(builtin_group(g)) for g in BUILTIN_GROUPS]
    out += [function_algebra(builtin_group("z3")), function_algebra(builtin_group("s3"))]
    return out


# -- evaluation -------------------------------------------------------------------

def _slices(x: Term | Diagram):
    if isinstance(x, Diagram):
        return x.dom, x.cod, list(x.slices)
    t = expand_macros(x)
    dom, cod = typecheck(t)
    return dom, cod, slices_of(t)


def evaluate(x: Term | Diagram, M: HopfModel) -> np.ndarray:
    """Exact matrix of shape ``(d**cod, d**dom)``."""
    d = M.dim
    dom, cod, slices = _slices(x)
    C = d ** dom
    state = np.eye(C, dtype=np.int64).reshape(-1)
    width = dom
    exact_obj = False
    for o, g in slices:
        A = d ** o
        K = d ** g.dom
        R = d ** (width - o - g.dom) * C
        I = d ** g.cod
        sp = M.sparse(g.name)
        if not exact_obj and sp is not None:
            try:
                state = kernels.contract(state, A, K, R, *sp, I)
            except OverflowError:
                exact_obj = True
        if exact_obj or sp is None:
            exact_obj = True
            state = kernels.contract_object(state, A, K, R, M.matrix(g.name), I)
        width += g.cod - g.dom
    out = np.asarray(state).reshape(d ** width, C)
    return out


# -- rule checks -------------------------------------------------------------------

@dataclass(frozen=True)
class Holds:
    rule: str
    model: str

    def __bool__(self):
        return True

    def __str__(self):
        return " ".join(x for x in ("HOLDS", self.rule, "in", self.model) if x)


@dataclass(frozen=True)
class Fails:
    rule: str
    model: str
    witness: int            # max absolute entry difference
    entry: tuple[int, int]  # (row, column) where it occurs
    shape: tuple[int, int]

    def __bool__(self):
        return False

    def __str__(self):
        head = " ".join(x for x in ("FAILS", self.rule, "in", self.model) if x)
        return (f"{head}: max |lhs-rhs| = {self.witness} "
                f"at entry {self.entry} of a {self.shape[0]}x{self.shape[1]} matrix")


def compare(a: np.ndarray, b: np.ndarray, rule: str, model: str) -> Holds | Fails:
    if a.shape != b.shape:
        raise ModelError(f"shape mismatch {a.shape} vs {b.shape}")
    diff = np.asarray(a, dtype=object) - np.asarray(b, dtype=object)
    absd = np.abs(diff)
    if not absd.any():
        return Holds(rule, model)
    flat = int(np.argmax(absd.reshape(-1)))
    entry = divmod(flat, a.shape[1])
    return Fails(rule, model, absd.reshape(-1)[flat], entry, a.shape)


def check_rule_in_model(rule: RewriteRule, M: HopfModel) -> Holds | Fails:
    return compare(evaluate(rule.lhs_term, M), evaluate(rule.rhs_term, M), rule.name, M.name)


def check_equal(a: Term | Diagram, b: Term | Diagram, M: HopfModel, label: str = "") -> Holds | Fails:
    return compare(evaluate(a, M), evaluate(b, M), label, M.name)


# -- oracle records -------------------------------------------------------------------

@dataclass(frozen=True)
class OracleRecord:
    rule: str
    results: tuple = ()

    @property
    def ok(self) -> bool:
        return bool(self.results) and all(self.results)

    def __str__(self):
        if not self.results:
            return f"{self.rule}: no compatible model"
        verdict = "oracle-equal" if self.ok else "oracle-separated"
        return f"{self.rule}: {verdict} in {', '.join(r.model for r in self.results)}"


_ORACLE_CACHE: dict = {}


def _uses_pairing(rule: RewriteRule) -> bool:
    from .terms import generators
    names = {g.name for g in generators(rule.lhs_term) | generators(rule.rhs_term)}
    return "pr" in names


def oracle_record(rule: RewriteRule, theory: str = "",
                  models: Sequence[HopfModel] | None = None) -> OracleRecord:
    """Evaluate a rule in every compatible shipped model.

    ALGBAR rules are translated along Gamma first; pairing-involving ones
    are only checked in the trivial model (no shipped k[G] has a
    nondegenerate copairing).
    """
    key = (rule.name, rule.source, rule.lhs_term, rule.theory,
           tuple(m.name for m in models) if models else None)
    if key in _ORACLE_CACHE:
        return _ORACLE_CACHE[key]
    pool = list(models) if models else shipped_models()
    results = []
    if rule.theory == "ALGBAR":
        from .gamma import gamma_translate
        lhs, rhs = gamma_translate(rule.lhs_term), gamma_translate(rule.rhs_term)
        for M in pool:
            if _uses_pairing(rule) and M.dim != 1:
                continue
            if "HBB" in M.tags or (M.tags >= {"HR"} and not M.fails):
                results.append(check_equal(lhs, rhs, M, rule.name))
    else:
        for M in pool:
            if M.compatible(rule):
                results.append(check_rule_in_model(rule, M))
    rec = OracleRecord(rule.name, tuple(results))
    _ORACLE_CACHE[key] = rec
    return rec
