"""The shipped proof corpus: listing, checking and re-validation."""
from __future__ import annotations

from pathlib import Path

from .reports import FAILED, PROVED, Item, timed
from .rewrite import ProofScript, SearchBudget, check_proof, search_equal
from .theories import DERIVED, RewriteRule, Theory, data_dir, load_theory

__all__ = ["corpus_paths", "load_corpus", "check_corpus", "revalidate", "theory_for"]


def corpus_paths() -> list[Path]:
    return sorted((data_dir() / "corpus").glob("*.proof"))


def load_corpus() -> dict[str, ProofScript]:
    return {p.stem: ProofScript.load(p) for p in corpus_paths()}


def theory_for(script: ProofScript) -> Theory:
    return load_theory(script.theory, with_lemmas=True)


def check_corpus() -> dict[str, object]:
    """Verdict of every corpus script under its own theory."""
    return {name: check_proof(p, theory_for(p)) for name, p in load_corpus().items()}


def _theorem_backed(th: Theory) -> Theory:
    """HBB-ALT plus r8 and r9 as theorem-backed rules (equivalence result)."""
    hbb = load_theory("HBB")
    for name in ("r8", "r9"):
        r = hbb.rule(name)
        th = th.with_rule(RewriteRule(name, r.lhs_term, r.rhs_term, DERIVED,
                                      frozenset({"theorem", "alt"}), "HBB-ALT", r.source))
    return th


def revalidate(theory: str, budget: SearchBudget) -> list[Item]:
    """Re-check every corpus script with its rules taken from ``theory``.

    Order of attempts: replay as written, re-search within ``budget``, then
    replay with r8/r9 supplied as theorem-backed rules.  Derived rules of the
    corpus are made available once their own script re-validates.
    """
    strict = load_theory(theory)
    weak = _theorem_backed(strict)
    scripts = load_corpus()
    items = []
    # scripts proving derived rules first, so later scripts can use them
    rule_scripts = {r.proof: r for r in load_theory("HBB", with_lemmas=True).rules if r.proof}
    order = sorted(scripts, key=lambda n: (n not in rule_scripts, n))
    for name in order:
        p = scripts[name]
        with timed() as clock:
            level, detail = None, ""
            if check_proof(p, strict):
                level, detail = "replay", f"replays as written ({len(p.steps)} steps)"
            else:
                res = search_equal(p.start, p.goal, strict, budget)
                if res and check_proof(res, strict):
                    level, detail = "re-search", f"re-search found {len(res.steps)} steps"
                elif check_proof(p, weak):
                    level = "theorem-backed"
                    detail = (f"not re-validated within budget {budget.max_steps}; replays "
                              "only with r8/r9 as theorem-backed rules")
                else:
                    detail = "does not re-validate"
        if name in rule_scripts and level:
            weak = weak.with_rule(rule_scripts[name])
            if level != "theorem-backed":
                strict = strict.with_rule(rule_scripts[name])
        status = PROVED if level in ("replay", "re-search") else FAILED
        items.append(Item(f"corpus {name}", status, detail, elapsed=clock.elapsed))
    return items
