from __future__ import annotations

import pytest

from hopfdiag.rewrite import ProofScript
from hopfdiag.terms import pretty, typecheck
from hopfdiag.theories import (
    AXIOM, DERIVED, RECONSTRUCTED, RewriteRule, TheoryError, build_alpha, expand_macros,
    load_rule_files, load_theory, register_derived,
)


@pytest.fixture(scope="module")
def hr():
    return load_theory("HR")


def test_hr_signature(hr):
    arity = {g.name: (g.dom, g.cod) for g in hr.generators}
    assert arity == {
        "cop": (1, 2), "cou": (1, 0), "mul": (2, 1), "unit": (0, 1), "ant": (1, 1),
        "ant_inv": (1, 1), "br": (2, 2), "br_inv": (2, 2), "intg": (0, 1), "cointg": (1, 0),
        "rib": (1, 1), "rib_inv": (1, 1), "cpr": (0, 2),
    }


def test_hr_rule_groups(hr):
    names = {r.name for r in hr.rules}
    for group in (["a1", "a2", "a2p", "a3", "a4", "a4p", "a5", "a6", "a7", "a8"],
                  ["s1", "s1p", "s2", "s2p"], ["i1", "i2", "i3", "i4", "i5"],
                  ["r1", "r2", "r3", "r4", "r5", "r5p", "r6", "r7", "r7p", "r8", "r9"],
                  ["p2", "p2p", "b1", "b2", "yb"]):
        assert set(group) <= names
    assert any(n.startswith("nat_") for n in names)


def test_hbb_extends_hr(hr):
    hbb = load_theory("HBB")
    assert hbb.generators == hr.generators
    assert set(hr.rules) <= set(hbb.rules)
    extra = {r.name: r for r in hbb.rules if r not in hr.rules}
    assert {"d", "n"} <= set(extra)
    assert extra["d"].status == AXIOM and extra["n"].status == AXIOM
    assert all(r.status == RECONSTRUCTED for k, r in extra.items() if k not in ("d", "n"))


def test_hbb_alt_swaps_axioms():
    alt = load_theory("HBB-ALT")
    names = {r.name for r in alt.rules}
    assert "r8" not in names and "r9" not in names
    assert {"q", "h10", "d", "n"} <= names
    assert alt.generators == load_theory("HBB").generators


def test_algbar_signature():
    alg = load_theory("ALGBAR")
    names = {g.name for g in alg.generators}
    assert not names & {"intg", "cointg", "rib", "rib_inv"}
    assert {"wp", "wm", "cpr", "pr"} <= names
    assert {f"h{i}" for i in range(1, 13)} <= {r.name for r in alg.rules}


@pytest.mark.parametrize("name", ["HR", "HBB", "HBB-ALT", "ALGBAR"])
def test_every_rule_well_typed(name):
    th = load_theory(name, with_lemmas=True)
    for r in th.rules:
        assert typecheck(r.lhs_term) == typecheck(r.rhs_term), r.name
        assert (r.lhs.dom, r.lhs.cod) == (r.rhs.dom, r.rhs.cod)


def test_alias_coherence():
    hbb = load_theory("HBB")
    assert hbb.rule("d").arity == (0, 1)
    assert hbb.rule("n").arity == (0, 0)


def test_r9_typing(hr):
    assert hr.rule("r9").arity == (2, 2)


def test_macro_expansion(hr):
    mu = expand_macros(hr.parse("mu"), hr)
    assert pretty(mu) == pretty(hr.parse("(mul * mul) . (id[1] * cpr * id[1])"))
    assert typecheck(mu) == (2, 2)
    assert typecheck(expand_macros(hr.parse("rho_l"), hr)) == (1, 2)
    assert typecheck(expand_macros(hr.parse("rho_r"), hr)) == (1, 2)
    assert expand_macros(hr.parse("alpha[0]"), hr) == hr.parse("cou")


def test_alpha():
    hr = load_theory("HR")
    assert build_alpha(1) == hr.parse("mul . (mul * ant) . (id[1] * br) . (cop * id[1])")
    assert pretty(build_alpha(0)) == "cou"
    for n in range(5):
        assert typecheck(build_alpha(n)) == (n + 1, n)


def test_bidirectional_sides(hr):
    r = hr.rule("a2")
    assert r.sides("fwd") == (r.lhs, r.rhs)
    assert r.sides("bwd") == (r.rhs, r.lhs)


def test_user_rule_file_error(tmp_path):
    f = tmp_path / "bad.rules"
    f.write_text("theory T\ninclude core\n# comment\nrule broken : mul = cop\n")
    with pytest.raises(TheoryError) as e:
        load_rule_files([f])
    msg = str(e.value)
    assert "bad.rules:4" in msg and "broken" in msg and "arity mismatch" in msg


def test_user_rule_file_merges(tmp_path):
    f = tmp_path / "extra.rules"
    f.write_text("rule twice [reconstructed] : ant . ant = \\\n    id[1]\n")
    th = load_theory("HR", [f])
    assert th.rule("twice").status == RECONSTRUCTED
    assert th.rule("twice").arity == (1, 1)


def test_unknown_theory():
    with pytest.raises(TheoryError):
        load_theory("XYZ")


def test_data_dir_override(tmp_path, monkeypatch):
    import shutil
    from hopfdiag.theories import data_dir
    shutil.copytree(data_dir(), tmp_path / "data")
    with open(tmp_path / "data" / "hr.rules", "a") as fh:
        fh.write("rule marker [reconstructed] : rib . rib_inv . rib = rib\n")
    monkeypatch.setenv("HOPFDIAG_DATA", str(tmp_path / "data"))
    assert "marker" in load_theory("HR")
    monkeypatch.delenv("HOPFDIAG_DATA")
    assert "marker" not in load_theory("HR")


def test_slots():
    th = load_theory("HR", with_lemmas=True)
    assert {"q7p", "q8"} <= set(th.slots)


def test_register_derived_with_script(hr):
    rule = RewriteRule("cu", hr.parse("(cou * id[1]) . cop"), hr.parse("id[1]"), AXIOM)
    script = ProofScript.from_text("theory: HR\nstart: (cou * id[1]) . cop\ngoal: id[1]\na2 fwd 0:0\n")
    th = register_derived(hr, rule, script)
    assert th.rule("cu").status == DERIVED
    assert "cu" not in hr


def test_register_derived_rejects_bad_script(hr):
    rule = RewriteRule("cu", hr.parse("(cou * id[1]) . cop"), hr.parse("id[1]"), AXIOM)
    script = ProofScript.from_text("theory: HR\nstart: (cou * id[1]) . cop\ngoal: id[1]\na2p fwd 0:0\n")
    with pytest.raises(TheoryError):
        register_derived(hr, rule, script)


def test_register_derived_oracle(hr):
    good = RewriteRule("sq", hr.parse("ant . ant"), hr.parse("id[1]"), RECONSTRUCTED, theory="HR")
    th = register_derived(hr, good, "oracle")
    assert th.rule("sq").status == RECONSTRUCTED and "k[s3]" in th.rule("sq").note
    bad = RewriteRule("nope", hr.parse("ant"), hr.parse("id[1]"), RECONSTRUCTED, theory="HR")
    with pytest.raises(TheoryError):
        register_derived(hr, bad, "oracle")


def test_register_derived_ill_typed(hr):
    bad = RewriteRule("x", hr.parse("mul"), hr.parse("cop"), RECONSTRUCTED)
    with pytest.raises(TheoryError):
        register_derived(hr, bad, "oracle")
