import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import names, random_term, rebind
from oracles import alpha_equal, free_names
from qeq.generate import TermGen, random_closed_type, random_unitary, rng_for
from qeq.qtypes import BOOL, QUBIT, UNIT, Lower, Oplus, Tensor, dim
from qeq.semantics import denote_unitary
from qeq.syntax import (
    Case,
    Inj,
    Let,
    LetBang,
    LetPair,
    Pair,
    Put,
    UCompose,
    Var,
    alpha_eq,
    force,
    free_vars,
    meas_fn,
    prim,
    subst,
    suspend,
)

SUM = Oplus(QUBIT, QUBIT)


# --- frozen examples -------------------------------------------------------


def test_free_vars_examples():
    assert free_vars(Var("x")) == {"x"}
    assert free_vars(Put(BOOL, 1)) == frozenset()
    assert free_vars(LetPair("x1", "x2", Var("y"), Pair(Var("x1"), Var("x2")))) == {"y"}


def test_alpha_eq_examples():
    assert alpha_eq(Let("x", Put(BOOL, 0), Var("x")), Let("y", Put(BOOL, 0), Var("y")))
    assert not alpha_eq(Var("x"), Var("y"))
    e = Var("e")
    a = Case(e, "x", Inj(1, Var("x"), SUM), "y", Inj(2, Var("y"), SUM))
    b = Case(e, "z", Inj(1, Var("z"), SUM), "z", Inj(2, Var("z"), SUM))
    assert alpha_eq(a, b) and alpha_equal(a, b)


def test_subst_examples():
    assert subst(Var("x"), {"x": Put(BOOL, 1)}) == Put(BOOL, 1)
    got = subst(Let("x", Var("y"), Var("x")), {"y": Put(UNIT, 0)})
    assert got == Let("x", Put(UNIT, 0), Var("x"))
    # the binder must move out of the way of the incoming free x
    e = Let("x", Put(BOOL, 0), Pair(Var("x"), Var("z")))
    got = subst(e, {"z": Var("x")})
    assert isinstance(got, Let) and got.x != "x"
    assert alpha_equal(got, Let("w", Put(BOOL, 0), Pair(Var("w"), Var("x"))))


def test_force_suspend():
    e = Pair(Var("a"), Var("b"))
    assert force(suspend("x", Tensor(QUBIT, QUBIT), Var("x")), e) == e
    swap = suspend("p", Tensor(QUBIT, QUBIT), LetPair("x", "y", Var("p"), Pair(Var("y"), Var("x"))))
    assert force(swap, Var("q")) == LetPair("x", "y", Var("q"), Pair(Var("y"), Var("x")))
    assert force(meas_fn(), Var("q")) == LetBang(Var("q"), (Put(BOOL, 0), Put(BOOL, 1)))


def test_unitary_types():
    u = UCompose(prim("H"), prim("X"))
    assert u.src == QUBIT and u.dst == QUBIT
    with pytest.raises(Exception):
        UCompose(prim("CNOT"), prim("H"))


# --- properties ------------------------------------------------------------


@given(st.integers(0, 10**6))
def test_alpha_eq_is_an_equivalence(seed):
    _, _, e = random_term(seed)
    e1, e2 = rebind(e, names("p")), rebind(e, names("q"))
    assert alpha_eq(e, e)
    assert alpha_eq(e, e1) and alpha_eq(e1, e)
    assert alpha_eq(e1, e2) and alpha_eq(e, e2)
    assert alpha_equal(e1, e2)


@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_alpha_eq_agrees_with_de_bruijn(s1, s2):
    _, _, a = random_term(s1)
    _, _, b = random_term(s2)
    assert alpha_eq(a, b) == alpha_equal(a, b)


@given(st.integers(0, 10**6))
def test_subst_empty_is_identity(seed):
    _, _, e = random_term(seed)
    assert alpha_eq(subst(e, {}), e)


@given(st.integers(0, 10**6))
def test_free_vars_of_subst(seed):
    ctx, _, e = random_term(seed, n=3)
    rng = rng_for(seed + 1)
    if not ctx:
        return
    x = sorted(ctx)[int(rng.integers(len(ctx)))]
    u_ctx = {"u0": QUBIT, "x": QUBIT}  # deliberately reuse a binder-like name
    u = TermGen(rng).term(u_ctx, ctx[x], 2)
    got = subst(e, {x: u})
    expect = (free_vars(e) - {x}) | free_vars(u)
    assert free_vars(got) == expect
    assert free_names(got) == set(expect)


@given(st.integers(0, 10**6))
def test_unitaries_are_square(seed):
    rng = rng_for(seed)
    sigma = random_closed_type(rng)
    u = random_unitary(rng, sigma, 3)
    assert dim(u.src) == dim(u.dst)
    m = denote_unitary(u)
    assert np.allclose(m.conj().T @ m, np.eye(dim(sigma)))


def test_lower_dim_zero_unitary():
    u = random_unitary(rng_for(0), Lower(UNIT))
    assert denote_unitary(u).shape == (1, 1)
