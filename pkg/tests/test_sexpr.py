import pytest

from qeq.algebraic import Apply, Meas, New, UStep
from qeq.generate import TermGen, random_alg_term, random_closed_type, random_context, random_equiv, random_open_type, rng_for
from qeq.qtypes import BOOL, QUBIT, UNIT, Fin, Lower, Oplus, Prod, Sum, Tensor, TVar
from qeq.sexpr import (
    SExprError,
    parse_alg,
    parse_context,
    parse_equiv,
    parse_fintype,
    parse_term,
    parse_type,
    show_alg,
    show_equiv,
    show_term,
    show_type,
)
from qeq.syntax import Case, Inj, LetBang, Pair, Put, UApp, Var, alpha_eq, prim


def test_type_literals():
    assert parse_type("qubit") == QUBIT
    assert parse_type("(tensor qubit (lower unit))") == Tensor(QUBIT, Lower(UNIT))
    assert parse_type("(oplus (tvar X) (lower (fin 3)))") == Oplus(TVar("X"), Lower(Fin(3)))
    assert parse_fintype("(sum bool (prod unit (fin 2)))") == Sum(BOOL, Prod(UNIT, Fin(2)))


def test_term_literals():
    assert parse_term("(var q)") == Var("q")
    assert parse_term("(put bool true)") == Put(BOOL, 1)
    assert parse_term("(uapp (prim H) (var q))") == UApp(prim("H"), Var("q"))
    e = parse_term("(letbang (var q) ((false (var r)) (true (uapp (prim X) (var r)))))")
    assert e == LetBang(Var("q"), (Var("r"), UApp(prim("X"), Var("r"))))
    e = parse_term("(case (var s) (a (inj 2 (var a) (oplus qubit qubit))) (b (inj 1 (var b) (oplus qubit qubit))))")
    s = Oplus(QUBIT, QUBIT)
    assert e == Case(Var("s"), "a", Inj(2, Var("a"), s), "b", Inj(1, Var("b"), s))
    assert parse_term("; comment\n(pair (put unit tt) (put (fin 3) 2))") == Pair(Put(UNIT, 0), Put(Fin(3), 2))


def test_context_and_alg_literals():
    assert parse_context("((q qubit) (p (tensor qubit qubit)))") == {"q": QUBIT, "p": Tensor(QUBIT, QUBIT)}
    t = parse_alg("(new a (ustep (prim H) a a (meas a (apply k b) (apply k b))))")
    assert t == New("a", UStep(prim("H"), "a", "a", Meas("a", Apply("k", "b"), Apply("k", "b"))))


@pytest.mark.parametrize(
    "text,line,col",
    [
        ("(var q", 1, 1),
        ("(pair (var a)\n  (var b)))", 2, 11),
        ("(put bool maybe)", 1, 11),
        ("(frob x)", 1, 1),
        ("\n\n   (letbang (var q) ((false (var r))))", 3, 21),
    ],
)
def test_errors_carry_positions(text, line, col):
    with pytest.raises(SExprError) as err:
        parse_term(text)
    assert (err.value.line, err.value.col) == (line, col)
    assert str(err.value).startswith(f"{line}:{col}:")


def test_thousand_term_roundtrips():
    for seed in range(1000):
        rng = rng_for(seed)
        ctx = random_context(rng, int(rng.integers(0, 4)))
        tau = random_closed_type(rng)
        e = TermGen(rng).term(ctx, tau, int(rng.integers(0, 5)))
        text = show_term(e)
        back = parse_term(text)
        assert alpha_eq(back, e), text
        assert show_term(back) == text


def test_type_and_equiv_roundtrips():
    for seed in range(300):
        rng = rng_for(seed)
        t = random_open_type(rng)
        assert parse_type(show_type(t)) == t
        f = random_equiv(rng, t)
        g = parse_equiv(show_equiv(f))
        assert g.src == f.src and g.dst == f.dst
        assert show_equiv(g) == show_equiv(f)


def test_alg_roundtrips():
    for seed in range(300):
        rng = rng_for(seed)
        delta = {f"w{j}": QUBIT for j in range(int(rng.integers(0, 3)))}
        t = random_alg_term(rng, "k", delta)
        text = show_alg(t)
        assert show_alg(parse_alg(text)) == text
