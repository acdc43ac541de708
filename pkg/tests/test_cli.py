from __future__ import annotations

import json
import subprocess
import sys


from hopfdiag.cli import main
from hopfdiag.theories import data_dir


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_counit_unit(capsys):
    code, out, _ = run(capsys, "eval", "cou . unit", "--model", "z2")
    assert code == 0 and out.splitlines()[-1] == "[1]"


def test_eval_json(capsys):
    code, out, _ = run(capsys, "eval", "(cou * id[1]) . cop", "--model", "z2", "--json")
    assert json.loads(out)["matrix"] == [[1, 0], [0, 1]]


def test_eval_algbar_translates(capsys):
    code, out, _ = run(capsys, "eval", "mul . (wp * wm)", "--theory", "algbar", "--model", "s3", "--json")
    data = json.loads(out)
    assert code == 0 and data["shape"] == [6, 1]


def test_eq_algbar(capsys):
    code, out, _ = run(capsys, "eq", "mul . (wp * wm)", "unit", "--theory", "algbar")
    assert code == 0 and "h2 fwd" in out


def test_eq_algbar_translated(capsys):
    code, out, _ = run(capsys, "eq", "mul . (wp * wm)", "unit", "--theory", "algbar", "--translate",
                       "--max-steps", "4")
    assert code == 0 and out.startswith("theory: HBB")


def test_eq_not_found(capsys):
    code, out, _ = run(capsys, "eq", "cop", "br . cop", "--max-steps", "2")
    assert code == 1 and out.startswith("NOT FOUND")


def test_eq_arity_mismatch_is_usage_error(capsys):
    code, _, err = run(capsys, "eq", "cop", "mul")
    assert code == 2 and "term grammar" in err


def test_usage_error_shows_grammar(capsys):
    code, _, err = run(capsys, "normalize", "mul .")
    assert code == 2 and 'term := prod ( "." prod )*' in err


def test_normalize(capsys):
    code, out, _ = run(capsys, "normalize", "(mul * id[1]) . (id[2] * ant)")
    code2, out2, _ = run(capsys, "normalize", "mul * ant")
    assert code == code2 == 0 and out == out2


def test_prove_accept_and_reject(capsys, tmp_path):
    good = data_dir() / "corpus" / "gamma_h3.proof"
    code, out, _ = run(capsys, "prove", str(good))
    assert code == 0 and out.strip() == "Accepted"
    bad = tmp_path / "bad.proof"
    lines = good.read_text().splitlines()
    bad.write_text("\n".join(lines[:-2] + [lines[-1], lines[-2]]) + "\n")
    code, out, _ = run(capsys, "prove", str(bad))
    assert code == 1 and out.startswith("Rejected(step 1")


def test_prove_malformed(capsys, tmp_path):
    f = tmp_path / "m.proof"
    f.write_text("theory: HR\nstart: cop\n")
    code, _, err = run(capsys, "prove", str(f))
    assert code == 2 and "proof script format" in err
    code, _, _ = run(capsys, "prove", str(tmp_path / "missing.proof"))
    assert code == 2


def test_check_rule_file(capsys, tmp_path):
    f = tmp_path / "wrong.rules"
    f.write_text("theory X\ninclude core\nrule wrong : ant = id[1]\n")
    code, _, _ = run(capsys, "check", str(f))
    assert code == 0
    code, out, _ = run(capsys, "check", str(f), "--oracle")
    assert code == 1 and "FAILS wrong in k[s3]" in out
    f.write_text("theory X\ninclude core\nrule bad : mul = cop\n")
    code, _, err = run(capsys, "check", str(f))
    assert code == 2 and "arity mismatch" in err


def test_check_fragment(capsys):
    code, out, _ = run(capsys, "check", str(data_dir() / "adjoint.rules"), "--theory", "hr", "--oracle")
    assert code == 0 and "4 rules checked" in out


def test_bad_model(capsys):
    code, _, err = run(capsys, "eval", "cop", "--model", "q8")
    assert code == 2 and "models:" in err


def test_translate(capsys):
    code, out, _ = run(capsys, "translate", "wp")
    assert code == 0 and out.strip() == "rib_inv . unit"


def test_render(capsys, tmp_path):
    code, out, _ = run(capsys, "render", "br . br")
    assert code == 0 and out.count("X+") == 2
    target = tmp_path / "d.svg"
    code, _, _ = run(capsys, "render", "cop", "--format", "svg", "-o", str(target))
    assert code == 0 and target.read_text().startswith("<svg")


def test_suite_independence(capsys):
    code, out, _ = run(capsys, "suite", "independence")
    assert code == 0
    assert "r8" in out and "FAILS" in out


def test_suite_json_matches_text(capsys):
    code, text, _ = run(capsys, "suite", "adjoint")
    code2, js, _ = run(capsys, "suite", "adjoint", "--json")
    items = json.loads(js)["items"]
    assert code == code2 == 0
    for it in items:
        assert it["name"] in text and it["status"] in text


def test_suite_byte_stable(capsys):
    _, a, _ = run(capsys, "suite", "axioms", "--model", "z2")
    _, b, _ = run(capsys, "suite", "axioms", "--model", "z2")
    assert a == b


def test_suite_model_rejected(capsys):
    code, _, _ = run(capsys, "suite", "gamma", "--model", "z2")
    assert code == 2


def test_argparse_usage_exit():
    out = subprocess.run([sys.executable, "-m", "hopfdiag.cli", "frobnicate"], capture_output=True, text=True)
    assert out.returncode == 2


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "hopfdiag.cli", "eval", "cou . unit"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.splitlines()[-1] == "[1]"
