from __future__ import annotations

import pytest

from hopfdiag.corpus import check_corpus, load_corpus, theory_for
from hopfdiag.models import check_equal, shipped_models
from hopfdiag.rewrite import check_proof
from hopfdiag.theories import DERIVED, load_theory

CORPUS = load_corpus()


def test_corpus_not_empty():
    assert {"h5l", "p2", "p2p", "gamma_h3"} <= set(CORPUS)


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_script_accepted(name):
    p = CORPUS[name]
    v = check_proof(p, theory_for(p))
    assert v, f"{name}: {v}"


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_checker_soundness(name):
    """An accepted script never joins two terms the models tell apart."""
    p = CORPUS[name]
    th = theory_for(p)
    a, b = th.term(p.start), th.term(p.goal)
    used = [th.rule(s.rule) for s in p.steps]
    for M in shipped_models():
        if all(M.compatible(r) for r in used):
            assert check_equal(a, b, M, name)


def _derived_rules():
    th = load_theory("HBB", with_lemmas=True)
    return {r.name: r for r in th.rules if r.proof}


def test_derived_rules_have_scripts():
    th = load_theory("HBB", with_lemmas=True)
    for name, r in _derived_rules().items():
        assert r.status == DERIVED
        p = CORPUS[r.proof]
        assert {th.diagram(p.start), th.diagram(p.goal)} == {r.lhs, r.rhs}, name


def test_no_circular_proofs():
    rules = _derived_rules()
    deps = {name: {s.rule for s in CORPUS[r.proof].steps} & set(rules) for name, r in rules.items()}
    for name, d in deps.items():
        assert name not in d, f"{name} is used in its own proof"
    # topological order exists
    done: set[str] = set()
    pending = dict(deps)
    while pending:
        ready = [n for n, d in pending.items() if d <= done]
        assert ready, f"cycle among {sorted(pending)}"
        for n in ready:
            done.add(n)
            del pending[n]


def test_check_corpus_summary():
    verdicts = check_corpus()
    assert set(verdicts) == set(CORPUS) and all(verdicts.values())


def test_h5_script_uses_r8():
    steps = {s.rule for s in CORPUS["h5l"].steps}
    assert "r8" in steps
