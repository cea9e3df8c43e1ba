import itertools
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from oracles import natural_bijection_exists, same_cardinality_polynomial, shape_counter
from qeq.generate import random_assignment, random_equiv, random_open_type, rng_for
from qeq.opentype import (
    BInl,
    BInr,
    BLeaf,
    BPair,
    BVar,
    apply_equiv,
    apply_inverse,
    assignments,
    decide_equiv,
    distr_equiv,
    enumerate_basis,
    equiv_basis_bijection,
    gamma,
    index_of,
    normalize_type,
    partial_init,
    partial_match,
    shape_profile,
    wire_shapes,
)
from qeq.qtypes import BOOL, UNIT, VOID, Fin, Lower, Oplus, Tensor, TVar, basis
from qeq.syntax import Distr, LetBang, LetPair, Pair, Put, SwapOplus, SwapTensor, Var, NameSupply
from qeq.typecheck import infer_type

X, Y = TVar("X"), TVar("Y")
B = Lower(BOOL)
M = {"X": Fin(3), "Y": BOOL}


def test_enumeration_order():
    vals = enumerate_basis(Tensor(X, B), M)
    assert vals[:3] == [BPair(BVar(0), BLeaf(0)), BPair(BVar(0), BLeaf(1)), BPair(BVar(1), BLeaf(0))]
    assert [index_of(Tensor(X, B), M, v) for v in vals] == list(range(6))
    sums = enumerate_basis(Oplus(B, X), M)
    assert sums == [BInl(BLeaf(0)), BInl(BLeaf(1)), BInr(BVar(0)), BInr(BVar(1)), BInr(BVar(2))]


# bijections induced by single generators, written out by hand
def test_swap_tensor_bijection():
    perm = equiv_basis_bijection(SwapTensor(X, B), M)
    # (x, b) at 2x + b goes to (b, x) at 3b + x
    assert perm == [3 * b + x for x in range(3) for b in range(2)]


def test_swap_oplus_bijection():
    perm = equiv_basis_bijection(SwapOplus(X, B), M)
    assert perm == [2, 3, 4, 0, 1]


def test_distr_bijection():
    a, b, c = Lower(Fin(2)), B, Lower(UNIT)
    perm = equiv_basis_bijection(Distr(a, b, c), {})
    # source index: i*3 + (s) with s in {inl 0, inl 1, inr 0}; target: inl (i, s) at 2i+s, inr (i, 0) at 4+i
    expect = []
    for i in range(2):
        for s in range(3):
            expect.append(2 * i + s if s < 2 else 4 + i)
    assert perm == expect


def test_distr_equiv_direction():
    f = distr_equiv(X)
    assert f.src == Tensor(B, X) and f.dst == Oplus(X, X)
    assert apply_equiv(f, BPair(BLeaf(1), BVar("v"))) == BInr(BVar("v"))
    assert apply_equiv(f, BPair(BLeaf(0), BVar("v"))) == BInl(BVar("v"))


def test_gamma_and_partial_init():
    sigma = Tensor(X, Tensor(B, Y))
    b = BPair(BVar("u"), BPair(BLeaf(1), BVar("w")))
    assert gamma(sigma, b, M) == {"u": Lower(Fin(3)), "w": Lower(BOOL)}
    e = partial_init(sigma, b, M)
    assert e == Pair(Var("u"), Pair(Put(BOOL, 1), Var("w")))
    assert infer_type(gamma(sigma, b, M), e) == Tensor(Lower(Fin(3)), Tensor(B, B))


def test_partial_init_of_sum():
    sigma = Oplus(X, B)
    e = partial_init(sigma, BInr(BLeaf(0)), M)
    assert infer_type({}, e) == Oplus(Lower(Fin(3)), B)


def test_partial_match():
    e = partial_match(B, Var("q"), lambda b: Put(UNIT, 0), {})
    assert e == LetBang(Var("q"), (Put(UNIT, 0), Put(UNIT, 0)))
    sigma = Tensor(X, B)
    got = partial_match(sigma, Var("p"), lambda b: partial_init(sigma, b, M), M, NameSupply(stem="m"))
    assert isinstance(got, LetPair)
    assert infer_type({"p": Tensor(Lower(Fin(3)), B)}, got) == Tensor(Lower(Fin(3)), B)


def test_normal_forms():
    nf, w = normalize_type(Tensor(X, Oplus(Y, B)))
    assert w.src == Tensor(X, Oplus(Y, B))
    assert nf.canonical() == ((("X",), 2), (("X", "Y"), 1))
    nf, _ = normalize_type(Tensor(Lower(VOID), X))
    assert nf.canonical() == ()
    nf, _ = normalize_type(Oplus(X, X))
    assert nf.canonical() == ((("X",), 2),)


@pytest.mark.parametrize(
    "s,t,expect",
    [
        (Tensor(X, Y), Tensor(Y, X), True),
        (Oplus(X, X), Tensor(B, X), True),
        (Tensor(Lower(VOID), X), Lower(VOID), True),
        (Oplus(X, Lower(VOID)), X, True),
        (Tensor(Lower(UNIT), X), X, True),
        (Lower(Fin(6)), Tensor(B, Lower(Fin(3))), True),
        (Tensor(X, Oplus(Y, B)), Oplus(Tensor(X, Y), Oplus(X, X)), True),
        (Tensor(X, X), X, False),
        (Oplus(X, Y), Oplus(X, X), False),
        (Lower(Fin(3)), B, False),
        (X, Lower(UNIT), False),
    ],
)
def test_decide_equiv_examples(s, t, expect):
    w = decide_equiv(s, t)
    assert (w is not None) == expect
    if w is not None:
        assert w.src == s and w.dst == t
        for m in assignments(["X", "Y"], [VOID, UNIT, BOOL, Fin(3)]):
            perm = equiv_basis_bijection(w, m)
            assert sorted(perm) == list(range(basis(s, m).card))


# --- properties ------------------------------------------------------------


def supply():
    return (f"w{k}" for k in itertools.count()).__next__


@given(st.integers(0, 10**6))
def test_normal_witness_is_a_natural_bijection(seed):
    rng = rng_for(seed)
    sigma = random_open_type(rng)
    nf, w = normalize_type(sigma)
    assert w.src == sigma
    for _ in range(3):
        m = random_assignment(rng, ["X", "Y"])
        perm = equiv_basis_bijection(w, m)
        assert sorted(perm) == list(range(basis(sigma, m).card))
    assert natural_bijection_exists(sigma, w.dst)
    # canonical form lists the shapes with their multiplicities
    assert Counter(dict(nf.canonical())) == Counter({k: n for k, n in shape_counter(sigma).items() if n})


@given(st.integers(0, 10**6))
def test_random_equivs_preserve_wires(seed):
    rng = rng_for(seed)
    sigma = random_open_type(rng)
    f = random_equiv(rng, sigma)
    for b in wire_shapes(sigma, supply()):
        image = apply_equiv(f, b)
        assert gamma(f.dst, image, M) == gamma(sigma, b, M)
        assert apply_inverse(f, image) == b
    assert shape_profile(sigma) == shape_profile(f.dst)
    assert decide_equiv(sigma, f.dst) is not None


@given(st.integers(0, 10**6))
def test_decide_equiv_agrees_with_oracles(seed):
    rng = rng_for(seed)
    sigma = random_open_type(rng)
    tau = random_equiv(rng, sigma).dst if rng.random() < 0.5 else random_open_type(rng)
    w = decide_equiv(sigma, tau)
    assert (w is not None) == natural_bijection_exists(sigma, tau)
    assert (w is not None) == same_cardinality_polynomial(sigma, tau, ["X", "Y"])
    if w is not None:
        assert w.src == sigma and w.dst == tau
        m = random_assignment(rng, ["X", "Y"])
        assert sorted(equiv_basis_bijection(w, m)) == list(range(basis(sigma, m).card))
