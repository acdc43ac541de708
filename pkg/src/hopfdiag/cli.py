"""Command-line front end.

Exit codes: 0 success, 1 semantic failure (rejected proof, search miss,
unequal matrices, failing suite), 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .diagram import Diagram
from .models import ModelError, evaluate, model_by_name, shipped_models, check_rule_in_model
from .render import render_svg, render_text
from .rewrite import NotFound, ProofScript, ScriptFormatError, SearchBudget, check_proof, search_equal
from .terms import ParseError, TermError, generators, pretty
from .theories import Theory, TheoryError, load_rule_files, load_theory

log = logging.getLogger("hopfdiag")

GRAMMAR = """\
term grammar:
  term := prod ( "." prod )*        composition, f . g applies g first
  prod := atom ( "*" atom )*        monoidal product
  atom := "id" "[" NAT "]" | IDENT | IDENT "[" NAT "]" | "(" term ")"
generators: cop cou mul unit ant ant_inv br br_inv intg cointg rib rib_inv cpr
            (ALGBAR: wp wm cpr pr; macros: mu rho_l rho_r alpha[n] pr)"""

SCRIPT_GRAMMAR = """\
proof script format:
  theory: HR|HBB|HBB-ALT|ALGBAR
  start: TERM
  goal: TERM
  RULE fwd|bwd L:X[/j]              one step per line, '#' starts a comment"""

KNOWN_TAGS = {"HOPF", "HR", "HBB", "HBB-ALT", "ALGBAR"}

THEORIES = {"hr": "HR", "hbb": "HBB", "hbb-alt": "HBB-ALT", "algbar": "ALGBAR"}


class UsageError(Exception):
    def __init__(self, msg: str, excerpt: str = GRAMMAR):
        super().__init__(msg)
        self.excerpt = excerpt


def _theory(args) -> Theory:
    return load_theory(THEORIES[args.theory], getattr(args, "rules", None) or (),
                       with_lemmas=True)


def _term(th: Theory, src: str):
    try:
        return th.term(src)
    except (ParseError, TermError) as e:
        raise UsageError(f"cannot read term {src!r}: {e}") from None


def _model(name: str):
    try:
        return model_by_name(name)
    except (ModelError, OSError, ValueError) as e:
        raise UsageError(f"bad model {name!r}: {e}",
                         "models: trivial | z2 | z3 | s3 | fun-G for a built-in group G | "
                         "FILE with a group table") from None


def _emit(args, text: str, data) -> None:
    if args.json:
        sys.stdout.write(json.dumps(data, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# -- commands ------------------------------------------------------------------------

def cmd_check(args) -> int:
    """Load a rule file, type-check every rule, optionally test it in the models."""
    path = Path(args.file)
    if not path.exists():
        raise UsageError(f"no such file: {path}", "usage: hopfdiag check RULEFILE")
    if args.theory:
        # a fragment on top of a built-in theory: report only what the file adds
        base = load_theory(THEORIES[args.theory])
        th = load_theory(THEORIES[args.theory], [path])
        rules = [r for r in th.rules if r.name not in base or base.rule(r.name) != r]
    else:
        th = load_rule_files([path])
        rules = list(th.rules)
    rows, bad = [], 0
    for r in rules:
        entry = {"rule": r.name, "arity": list(r.arity), "status": r.status}
        if args.oracle:
            pool = [M for M in shipped_models() if M.compatible(r)]
            if r.theory not in KNOWN_TAGS:  # user theory: try every model with the generators
                pool = [M for M in shipped_models()
                        if all(g.name in M.maps for g in generators(r.lhs_term) | generators(r.rhs_term))]
            res = [check_rule_in_model(r, M) for M in pool]
            entry["oracle"] = [str(x) for x in res]
            bad += not all(res)
        rows.append(entry)
    lines = [f"{th.name}: {len(rules)} rules checked, {len(th.generators)} generators, all well-typed"]
    for e in rows:
        lines.append(f"  {e['rule']}: {e['arity'][0]} -> {e['arity'][1]} [{e['status']}]")
        for o in e.get("oracle", []):
            lines.append(f"      {o}")
    _emit(args, "\n".join(lines), {"theory": th.name, "rules": rows})
    return 1 if bad else 0


def cmd_normalize(args) -> int:
    th = _theory(args)
    d = th.diagram(_term(th, args.term))
    _emit(args, d.to_text(), {"term": d.to_text(), "dom": d.dom, "cod": d.cod,
                              "layers": [[repr(c) for c in layer] for layer in d.layers]})
    return 0


def _budget(args) -> SearchBudget:
    return SearchBudget(max_steps=args.max_steps, max_size=args.max_size,
                        max_frontier=args.max_frontier, insertions=args.insertions)


def cmd_eq(args) -> int:
    th = _theory(args)
    a, b = _term(th, args.a), _term(th, args.b)
    if args.translate:
        if th.name != "ALGBAR":
            raise UsageError("--translate needs --theory algbar", "usage: hopfdiag eq A B "
                             "--theory algbar --translate")
        from .gamma import _hbb, _mechanized, gamma_translate
        a, b = gamma_translate(a), gamma_translate(b)
        th = _mechanized(_hbb())
    try:
        res = search_equal(a, b, th, _budget(args))
    except TermError as e:
        raise UsageError(str(e)) from None
    if isinstance(res, NotFound):
        _emit(args, f"NOT FOUND: {res}", {"found": False, "explored": res.explored,
                                          "depth": list(res.depth)})
        return 1
    _emit(args, res.to_text(), {"found": True, "script": res.to_text(),
                                "steps": len(res.steps)})
    return 0


def cmd_prove(args) -> int:
    try:
        p = ProofScript.load(args.file)
    except FileNotFoundError:
        raise UsageError(f"no such file: {args.file}", SCRIPT_GRAMMAR) from None
    except (ScriptFormatError, ParseError) as e:
        raise UsageError(f"malformed script {args.file}: {e}", SCRIPT_GRAMMAR) from None
    th = load_theory(p.theory, args.rules or (), with_lemmas=True)
    v = check_proof(p, th)
    _emit(args, str(v), {"accepted": v.accepted, "step": v.step, "reason": v.reason,
                         "steps": len(p.steps)})
    return 0 if v else 1


def cmd_eval(args) -> int:
    th = _theory(args)
    t = _term(th, args.term)
    if th.name == "ALGBAR":
        from .gamma import gamma_translate
        t = gamma_translate(t)
    M = _model(args.model)
    m = evaluate(t, M)
    rows = [[int(x) for x in row] for row in np.asarray(m)]
    if m.shape == (1, 1):
        text = f"[{rows[0][0]}]"
    else:
        width = max(len(str(x)) for row in rows for x in row)
        text = "\n".join("[" + " ".join(str(x).rjust(width) for x in row) + "]" for row in rows)
    _emit(args, f"{M.name}: {m.shape[0]}x{m.shape[1]}\n{text}",
          {"model": M.name, "shape": list(m.shape), "matrix": rows})
    return 0


def cmd_suite(args) -> int:
    from .suites import run_suite
    models = [_model(n) for n in args.model] if args.model else None
    if models and args.name not in ("axioms", "independence", "adjoint"):
        raise UsageError(f"suite {args.name} does not take --model",
                         "usage: hopfdiag suite axioms|independence|adjoint --model NAME")
    rep = run_suite(args.name, models)
    sys.stdout.write(rep.to_json(args.timings) if args.json else rep.to_text(args.timings))
    return 0 if rep.ok else 1


def cmd_translate(args) -> int:
    from .gamma import gamma_translate
    alg = load_theory("ALGBAR")
    t = _term(alg, args.term)
    out = pretty(gamma_translate(t, keep_pairing=args.keep_pairing))
    _emit(args, out, {"source": pretty(t), "image": out})
    return 0


def cmd_render(args) -> int:
    th = _theory(args)
    d: Diagram = th.diagram(_term(th, args.term))
    text = render_svg(d) if args.format == "svg" else render_text(d)
    if args.output:
        Path(args.output).write_text(text)
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(text)
    return 0


# -- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hopfdiag",
                                 description="String-diagram rewriting for ribbon Hopf algebra theories.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, theory=True):
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if theory:
            p.add_argument("--theory", choices=sorted(THEORIES), default="hr")
            p.add_argument("--rules", action="append", metavar="FILE",
                           help="extra rule file merged into the theory")

    p = sub.add_parser("check", help="load and type-check a rule file")
    p.add_argument("file")
    p.add_argument("--oracle", action="store_true", help="also evaluate every rule in the models")
    p.add_argument("--theory", choices=sorted(THEORIES),
                   help="read the file on top of this built-in theory")
    common(p, theory=False)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("normalize", help="print the canonical form of a term")
    p.add_argument("term")
    common(p)
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("eq", help="search for a rewrite proof of A = B")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--max-steps", type=int, default=6, help="BFS depth per side")
    p.add_argument("--max-size", type=int, default=24, help="largest diagram kept")
    p.add_argument("--max-frontier", type=int, default=2000)
    p.add_argument("--insertions", action="store_true",
                   help="allow rules with a box-free side to insert boxes")
    p.add_argument("--translate", action="store_true",
                   help="with --theory algbar: translate both sides and search in HBB")
    common(p)
    p.set_defaults(func=cmd_eq)

    p = sub.add_parser("prove", help="check a proof script")
    p.add_argument("file")
    p.add_argument("--rules", action="append", metavar="FILE")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("eval", help="evaluate a term in a finite model")
    p.add_argument("term")
    p.add_argument("--model", default="trivial", help="trivial|z2|z3|s3|fun-s3|FILE")
    common(p)
    p.set_defaults(func=cmd_eval)

    from .suites import SUITES
    p = sub.add_parser("suite", help="run a validation suite")
    p.add_argument("name", choices=SUITES)
    p.add_argument("--model", action="append", help="model to use (repeatable)")
    p.add_argument("--timings", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("translate", help="image of an ALGBAR term in HBB")
    p.add_argument("term")
    p.add_argument("--keep-pairing", action="store_true", help="keep pr as a macro symbol")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("render", help="draw the canonical diagram of a term")
    p.add_argument("term")
    p.add_argument("--format", choices=("text", "svg"), default="text")
    p.add_argument("-o", "--output", help="write to this file instead of stdout")
    common(p)
    p.set_defaults(func=cmd_render)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        print(e.excerpt, file=sys.stderr)
        return 2
    except TheoryError as e:
        print(f"error: {e}", file=sys.stderr)
        print("rule file lines: theory NAME | include NAME | gen NAME DOM COD | "
              "macro NAME : TERM | rule NAME [tags] : TERM = TERM", file=sys.stderr)
        return 2
    except (ParseError, TermError) as e:
        print(f"error: {e}", file=sys.stderr)
        print(GRAMMAR, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
