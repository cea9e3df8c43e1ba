import numpy as np
from hypothesis import given, strategies as st

from helpers import names, random_term, rebind
from oracles import kron_by_index
from qeq.generate import TermGen, random_closed_type, random_context, random_unitary, rng_for
from qeq.linalg import choi_matrix, min_eigenvalue, superop_compose, superop_difference, superop_identity, trace_form
from qeq.qtypes import BOOL, QUBIT, UNIT, VOID, Bool, Fin, Lower, Oplus, Tensor
from qeq.semantics import (
    canonical_order,
    context_permutation,
    delta,
    denote,
    denote_unitary,
    distr_matrix,
    equiv_check,
    equiv_report,
    injection,
)
from qeq.syntax import Case, Inj, Let, LetBang, LetPair, Pair, Put, UApp, Var, meas, prim, subst

Q = QUBIT
QQ = Tensor(Q, Q)
x, y, q = Var("x"), Var("y"), Var("q")
PLUS = np.full((2, 2), 0.5)


def test_delta():
    assert np.array_equal(delta(BOOL, 1), np.diag([0, 1]))
    assert np.array_equal(delta(Fin(3), 0), np.diag([1, 0, 0]))
    assert delta(UNIT, 0).shape == (1, 1)


def test_distr_matrix_examples():
    # elements of a1 + a2 come first from a1, so the map is the identity on indices
    assert np.array_equal(distr_matrix(BOOL, UNIT, 2), np.eye(6))
    assert np.array_equal(distr_matrix(VOID, BOOL, 3), np.eye(6))
    p = distr_matrix(Fin(2), Fin(3), 2)
    assert np.allclose(p @ p.T, np.eye(10))


def test_injection():
    assert np.array_equal(injection(1, 2, 1), [[1], [0], [0]])
    assert np.array_equal(injection(1, 2, 2), [[0, 0], [1, 0], [0, 1]])


def test_denote_examples():
    assert np.allclose(denote({"q": Q}, meas(q))(PLUS), np.diag([0.5, 0.5]))
    assert np.allclose(denote({}, Put(BOOL, 1))(np.eye(1)), delta(BOOL, 1))
    assert np.allclose(denote({"q": Q}, UApp(prim("H"), q))(PLUS), np.diag([1, 0]))
    # CNOT on |1>|0>
    rho = kron_by_index(delta(Bool(), 1), delta(Bool(), 0))
    out = denote({"x": Q, "y": Q}, UApp(prim("CNOT"), Pair(x, y)))(rho)
    assert np.allclose(out, kron_by_index(delta(Bool(), 1), delta(Bool(), 1)))
    # the pattern swap is the swap unitary
    f = denote({"p": QQ}, LetPair("a", "b", Var("p"), Pair(Var("b"), Var("a"))))
    g = denote({"p": QQ}, UApp(prim("SWAP"), Var("p")))
    assert superop_difference(f, g)[0] < 1e-12


def test_case_and_inj():
    s = Oplus(Q, Lower(UNIT))
    f = denote({"x": Q}, Inj(1, x, s))
    assert f.dst_dim == 3
    assert np.allclose(f(PLUS)[:2, :2], PLUS) and np.allclose(f(PLUS)[2], 0)
    swap = Case(Var("s"), "a", Inj(2, Var("a"), Oplus(Lower(UNIT), Q)), "b", Inj(1, Var("b"), Oplus(Lower(UNIT), Q)))
    g = denote({"s": s}, swap)
    rho = np.zeros((3, 3))
    rho[2, 2] = 1
    assert np.allclose(g(rho), np.diag([1, 0, 0]))
    # coherences between the summands are destroyed by the case split
    rho = np.full((3, 3), 1 / 3)
    out = g(rho)
    assert np.allclose(out[0, 1:], 0)


def test_void_measurement():
    f = denote({"v": Lower(VOID), "y": Q}, LetBang(Var("v"), (), Q))
    assert f.src_dim == 0 and f.dst_dim == 2


def test_measurement_counterexample():
    rep = equiv_report(q, meas(q), {"q": Q})
    assert not rep.equal
    assert rep.deviation == 1.0
    assert rep.index[:2] in {(0, 1), (1, 0)}
    assert "E_01" in rep.dump() or "E_10" in rep.dump()


def test_context_permutation():
    order = canonical_order({"x": Q, "y": Lower(UNIT), "z": Lower(Fin(3))})
    back = tuple(reversed(order))
    p = context_permutation(order, back)
    r = superop_compose(context_permutation(back, order), p)
    assert np.allclose(choi_matrix(r), choi_matrix(superop_identity(6)))
    rho = kron_by_index(delta(BOOL, 1), kron_by_index(np.eye(1), delta(Fin(3), 2)))
    assert np.allclose(p(rho), kron_by_index(delta(Fin(3), 2), delta(BOOL, 1)))


@given(st.integers(0, 10**6))
def test_layout_is_a_permutation(seed):
    ctx, tau, e = random_term(seed, n=3)
    order = canonical_order(ctx)
    rev = tuple(reversed(order))
    lhs = denote(rev, e, tau)
    rhs = superop_compose(denote(order, e, tau), context_permutation(rev, order))
    assert superop_difference(lhs, rhs)[0] < 1e-9


@given(st.integers(0, 10**6))
def test_trace_preserving_and_cp(seed):
    ctx, tau, e = random_term(seed, n=3)
    f = denote(ctx, e, tau)
    if f.src_dim == 0:
        return
    assert np.allclose(trace_form(f), np.eye(f.src_dim), atol=1e-9)
    assert min_eigenvalue(choi_matrix(f)) >= -1e-9


@given(st.integers(0, 10**6))
def test_substitution_is_composition(seed):
    ctx, tau, e = random_term(seed, n=2)
    if not ctx:
        return
    rng = rng_for(seed + 3)
    xname = sorted(ctx)[0]
    u_ctx = random_context(rng, 2, prefix="u", max_dim=4)
    u = TermGen(rng, max_dim=16).term(u_ctx, ctx[xname], 2)
    rest = {k: t for k, t in ctx.items() if k != xname}
    full = {**rest, **u_ctx}
    assert equiv_check(subst(e, {xname: u}), Let(xname, u, e), full)


@given(st.integers(0, 10**6))
def test_alpha_invariant(seed):
    ctx, _, e = random_term(seed, n=3)
    assert equiv_check(e, rebind(e, names("fresh_b")), ctx)


@given(st.integers(0, 10**6))
def test_unitary_denotation_is_unitary(seed):
    rng = rng_for(seed)
    u = random_unitary(rng, random_closed_type(rng), 3)
    m = denote_unitary(u)
    assert np.allclose(m @ m.conj().T, np.eye(m.shape[0]))
    f = denote({"x": u.src}, UApp(u, x))
    rho = np.eye(m.shape[0]) / m.shape[0]
    assert np.allclose(f(rho), m @ rho @ m.conj().T)
