from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest

from hopfdiag.models import (
    GroupTable, HopfModel, ModelError, builtin_group, check_rule_in_model, evaluate,
    function_algebra, group_algebra, model_by_name, oracle_record, shipped_models,
)
from hopfdiag.terms import Comp, Tensor, braiding_family, typecheck
from hopfdiag.theories import data_dir, load_theory
from termgen import random_term_with_dom


@pytest.fixture(scope="module")
def hr():
    return load_theory("HR")


@pytest.fixture(scope="module")
def s3():
    return group_algebra(builtin_group("s3"))


@pytest.fixture(scope="module")
def fun_s3():
    return function_algebra(builtin_group("s3"), check=False)


def test_group_tables():
    assert builtin_group("s3").order == 6 and not builtin_group("s3").abelian
    assert builtin_group("z3").abelian
    G = builtin_group("s3")
    for g in range(6):
        assert G.mul(g, G.inverse[g]) == G.identity


@pytest.mark.parametrize("table", [
    ((0, 1), (1, 1)),            # no inverse for 1
    ((0, 1, 2), (1, 2, 0)),      # not square
    ((0, 2), (1, 0)),            # entry out of range
])
def test_bad_tables(table):
    with pytest.raises(ModelError):
        GroupTable("bad", table)


def test_identity_need_not_be_zero():
    assert GroupTable("swap", ((1, 0), (0, 1))).identity == 1


def test_non_associative():
    # a Latin square with identity 0 that is not a group
    t = ((0, 1, 2, 3, 4), (1, 0, 3, 4, 2), (2, 4, 0, 1, 3), (3, 2, 4, 0, 1), (4, 3, 1, 2, 0))
    with pytest.raises(ModelError, match="associative"):
        GroupTable("loop", t)


def test_group_file():
    G = GroupTable.from_file(data_dir() / "groups" / "klein4.txt")
    assert G.order == 4 and G.abelian and G.inverse == (0, 1, 2, 3)
    M = model_by_name(str(data_dir() / "groups" / "klein4.txt"))
    assert M.dim == 4
    with pytest.raises(ModelError):
        GroupTable.from_text("3\n0 1 2\n1 2 0\n")


def test_model_by_name():
    assert model_by_name("z2").name == "k[z2]"
    assert model_by_name("fun-s3").name == "k^s3"
    with pytest.raises(ModelError):
        model_by_name("nope")


def test_trivial_model_everything_holds():
    M = group_algebra(builtin_group("trivial"))
    assert M.dim == 1
    for name in ("HR", "HBB"):
        for r in load_theory(name).rules:
            assert check_rule_in_model(r, M), r.name


def test_z2_integral(hr):
    M = group_algebra(builtin_group("z2"))
    assert evaluate(hr.term("cointg . intg"), M).tolist() == [[1]]
    assert evaluate(hr.term("intg"), M).reshape(-1).tolist() == [1, 1]


def test_d_fails_in_z2():
    M = group_algebra(builtin_group("z2"))
    res = check_rule_in_model(load_theory("HBB").rule("d"), M)
    assert not res and res.witness == 1


@pytest.mark.parametrize("g", ["trivial", "z2", "z3", "s3"])
def test_group_algebras_satisfy_hr(g, hr):
    M = group_algebra(builtin_group(g))
    for r in hr.rules:
        assert check_rule_in_model(r, M), r.name


def test_function_algebra_r8(hr, fun_s3):
    res = check_rule_in_model(hr.rule("r8"), fun_s3)
    assert not res and res.witness > 0 and res.shape == (36, 6)
    assert check_rule_in_model(hr.rule("r9"), fun_s3)
    fun_z3 = function_algebra(builtin_group("z3"))
    assert check_rule_in_model(hr.rule("r8"), fun_z3)


def test_function_algebra_all_but_r8(hr, fun_s3):
    failing = [r.name for r in hr.rules if not check_rule_in_model(r, fun_s3)]
    assert failing == ["r8"]


def test_evaluate_examples(hr, s3):
    z2 = group_algebra(builtin_group("z2"))
    assert evaluate(hr.term("cou . unit"), s3).tolist() == [[1]]
    assert np.array_equal(evaluate(hr.term("(cou * id[1]) . cop"), z2), np.eye(2, dtype=np.int64))
    v = evaluate(hr.term("cpr"), s3)
    e = np.zeros(6, dtype=np.int64)
    e[builtin_group("s3").identity] = 1
    assert v.shape == (36, 1) and np.array_equal(v.reshape(-1), np.kron(e, e))


def test_i1_holds_in_s3(hr, s3):
    assert check_rule_in_model(hr.rule("i1"), s3)


def _pair(rng, gens, dom):
    return random_term_with_dom(rng, gens, dom, 2)


def test_functoriality(hr):
    gens = list(hr.generators)
    models = [group_algebra(builtin_group("z2")), function_algebra(builtin_group("z3"))]
    rng = random.Random(99)
    for i in range(500):
        M = models[i % 2]
        g = _pair(rng, gens, rng.randint(0, 2))
        _, c = typecheck(g)
        if c > 4:
            continue
        f = random_term_with_dom(rng, gens, c, 1) if c else _pair(rng, gens, 0)
        if typecheck(f)[0] != c or typecheck(f)[1] > 4:
            continue
        assert np.array_equal(evaluate(Comp(f, g), M), evaluate(f, M) @ evaluate(g, M))
        h = _pair(rng, gens, rng.randint(0, 1))
        if typecheck(Tensor(g, h))[1] <= 5:
            assert np.array_equal(evaluate(Tensor(g, h), M),
                                  np.kron(evaluate(g, M), evaluate(h, M)))


@pytest.mark.parametrize("m,n", [(1, 2), (2, 1), (2, 2), (1, 3)])
def test_braiding_family_is_block_permutation(m, n):
    M = group_algebra(builtin_group("z2"))
    d = M.dim
    got = evaluate(braiding_family(m, n), M)
    want = np.zeros_like(got)
    for src in range(d ** (m + n)):
        digits = np.unravel_index(src, (d,) * (m + n))
        moved = digits[m:] + digits[:m]
        want[np.ravel_multi_index(moved, (d,) * (m + n)), src] = 1
    assert np.array_equal(got, want)


def test_overflow_falls_back_to_exact(hr):
    big = 2 ** 40
    base = group_algebra(builtin_group("z2"))
    maps = dict(base.maps)
    maps["rib"] = maps["rib"] * big
    # 2**120 does not fit in int64: evaluation must switch to exact objects
    M = HopfModel("big", 2, maps)
    out = evaluate(hr.term("rib . rib . rib"), M)
    assert out.dtype == object
    assert out[0, 0] == big ** 3


def test_rational_entries():
    base = group_algebra(builtin_group("z2"))
    maps = dict(base.maps)
    maps["rib"] = np.array([[Fraction(1, 2), 0], [0, Fraction(1, 2)]], dtype=object)
    M = HopfModel("half", 2, maps)
    out = evaluate(load_theory("HR").term("rib . rib"), M)
    assert out[0, 0] == Fraction(1, 4)


def test_shape_mismatch_rejected():
    base = group_algebra(builtin_group("z2"))
    maps = dict(base.maps)
    maps["cop"] = np.eye(2, dtype=np.int64)
    with pytest.raises(ModelError):
        HopfModel("broken", 2, maps)


def test_model_tags():
    fs3 = function_algebra(builtin_group("s3"), check=False)
    hr = load_theory("HR", with_lemmas=True)
    assert not fs3.compatible(hr.rule("r8"))
    assert not fs3.compatible(hr.rule("q"))      # lemmas may rest on r8
    assert fs3.compatible(hr.rule("r9"))
    assert group_algebra(builtin_group("s3")).compatible(hr.rule("q"))


def test_oracle_record(hr):
    rec = oracle_record(hr.rule("r7p"), "HR")
    assert rec.ok and len(rec.results) == len(shipped_models())
    alg = load_theory("ALGBAR")
    rec = oracle_record(alg.rule("h11"), "ALGBAR")
    assert rec.ok and [r.model for r in rec.results] == ["k[trivial]"]
