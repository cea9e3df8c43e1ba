import io
import json
import subprocess
import sys

import numpy as np
import pytest

from qeq.cli import main
from qeq.linalg import matrix_from_json, matrix_to_json


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    text = out.getvalue()
    assert text.rstrip().splitlines()[-1].startswith("RESULT: ")
    return code, text


def result(text):
    return text.rstrip().splitlines()[-1][len("RESULT: ") :]


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return write


def test_typecheck(files):
    f = files("t.qe", "((q qubit) (r qubit))\n(uapp (prim CNOT) (pair (var q) (var r)))")
    code, text = run("typecheck", f)
    assert code == 0 and result(text) == "well-typed"
    assert "type: (tensor (lower bool) (lower bool))" in text


def test_typecheck_errors(files):
    code, text = run("typecheck", files("dup.qe", "((q qubit))\n(pair (var q) (var q))"))
    assert code == 2 and result(text) == "ill-typed DuplicateUse"
    code, text = run("typecheck", files("unused.qe", "((q qubit))\n(put bool false)"))
    assert code == 2 and result(text) == "ill-typed UnusedVar"


def test_parse_error_has_location(files):
    code, text = run("typecheck", files("bad.qe", "((q qubit))\n(pair (var q)\n   (frob))"))
    assert code == 2 and result(text) == "error"
    assert "bad.qe:3:4:" in text


def test_missing_file():
    code, text = run("typecheck", "/nonexistent/file.qe")
    assert code == 2 and result(text) == "error"


def test_equiv_beta_let(files):
    a = files("a.qe", "((q qubit))\n(let x (uapp (prim H) (var q)) (pair (var x) (put bool true)))")
    b = files("b.qe", "((q qubit))\n(pair (uapp (prim H) (var q)) (put bool true))")
    code, text = run("equiv", a, b)
    assert code == 0 and result(text) == "equal"


def test_equiv_counterexample(files):
    a = files("a.qe", "((q qubit))\n(var q)")
    b = files("b.qe", "((q qubit))\n(letbang (var q) ((false (put bool false)) (true (put bool true))))")
    code, text = run("equiv", a, b)
    assert code == 1 and result(text) == "not-equal"
    assert "max deviation 1.000e+00" in text and "input E_01" in text


def test_equiv_context_mismatch(files):
    a = files("a.qe", "((q qubit))\n(var q)")
    b = files("b.qe", "((r qubit))\n(var r)")
    code, text = run("equiv", a, b)
    assert code == 2


def test_eval(files):
    f = files("h.qe", "((q qubit))\n(letbang (var q) ((false (put bool false)) (true (put bool true))))")
    plus = files("plus.json", matrix_to_json(np.full((2, 2), 0.5)))
    code, text = run("eval", f, plus)
    assert code == 0 and result(text) == "evaluated"
    line = next(ln for ln in text.splitlines() if ln.startswith("{"))
    assert np.allclose(matrix_from_json(line), np.diag([0.5, 0.5]))


def test_eval_validation(files):
    f = files("q.qe", "((q qubit))\n(var q)")
    bad = files("bad.json", matrix_to_json(np.diag([1.5, -0.5])))
    code, text = run("eval", f, bad)
    assert code == 2 and "not a density matrix" in text
    wrong = files("big.json", matrix_to_json(np.eye(4) / 4))
    code, text = run("eval", f, wrong)
    assert code == 2 and "dimension" in text
    junk = files("junk.json", json.dumps({"rows": 1}))
    code, _ = run("eval", f, junk)
    assert code == 2


def test_prove(files):
    a = files("a.qe", "((q qubit))\n(let x (var q) (uapp (prim H) (var x)))")
    b = files("b.qe", "((q qubit))\n(uapp (prim H) (var q))")
    code, text = run("prove", a, b, "--depth", "2")
    assert code == 0 and result(text) == "proved in 1 steps"
    assert "β-LET" in text


def test_prove_not_found(files):
    a = files("a.qe", "((q qubit))\n(var q)")
    b = files("b.qe", "((q qubit))\n(letbang (var q) ((false (put bool false)) (true (put bool true))))")
    code, text = run("prove", a, b, "--depth", "2")
    assert code == 1 and result(text) == "not-found"


def test_normalize_type():
    code, text = run("normalize-type", "(tensor (tvar X) (oplus (tvar Y) (lower bool)))")
    assert code == 0
    assert "witness:" in text


def test_decide_equiv():
    code, text = run("decide-equiv", "(oplus (tvar X) (tvar X))", "(tensor (lower bool) (tvar X))")
    assert code == 0 and result(text) == "equivalent"
    code, text = run("decide-equiv", "(tensor (tvar X) (tvar X))", "(tvar X)")
    assert code == 1 and result(text) == "not-equivalent"
    code, text = run("decide-equiv", "(tensor (tvar X)", "(tvar X)")
    assert code == 2 and "<argument>:1:1" in text


def test_translate(files):
    f = files("h.qe", "((q qubit))\n(uapp (prim H) (var q))")
    code, text = run("translate", "to-alg", f)
    assert code == 0 and "(ustep (prim H) q" in text
    alg = files("h.alg", "((q qubit))\n(ustep (prim H) q q (apply k q))")
    code, text = run("translate", "to-qexp", alg)
    assert code == 0 and "type: (lower bool)" in text
    sums = files("s.qe", "((q qubit))\n(inj 1 (var q) (oplus qubit qubit))")
    code, _ = run("translate", "to-alg", sums)
    assert code == 2


def test_axioms_check_staton():
    code, text = run("axioms-check", "staton", "--seed", "7", "--count", "50")
    assert code == 0 and result(text) == "pass"


def test_axioms_check_reproducible():
    _, t1 = run("axioms-check", "fig2-beta", "--seed", "3", "--count", "5")
    _, t2 = run("axioms-check", "fig2-beta", "--seed", "3", "--count", "5")
    # the header carries the elapsed time; everything else must match
    assert t1.splitlines()[1:] == t2.splitlines()[1:]
    assert "4 checked" not in t1 and "5 checked" in t1


def test_axioms_check_unknown_suite():
    code, text = run("axioms-check", "nope")
    assert code == 2 and "unknown suite" in text


def test_module_entry_point(files):
    f = files("t.qe", "((q qubit))\n(var q)")
    proc = subprocess.run([sys.executable, "-m", "qeq", "typecheck", f], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.rstrip().endswith("RESULT: well-typed")
