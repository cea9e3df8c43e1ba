import pytest
from hypothesis import given, strategies as st

from helpers import names, random_term, rebind
from qeq.generate import TermGen, random_closed_type, random_context, rng_for
from qeq.qtypes import BOOL, QUBIT, UNIT, VOID, Lower, Oplus, Tensor
from qeq.syntax import Case, Inj, Let, LetBang, LetPair, Pair, Put, UApp, Var, free_vars, meas, prim, subst
from qeq.typecheck import (
    ErrorKind,
    TypeCheckError,
    absorbs,
    infer,
    infer_type,
    split_context,
    well_typed,
)

Q = QUBIT
QQ = Tensor(Q, Q)
SUM = Oplus(Q, Q)
x, y, z, s, p, a, b = (Var(n) for n in "xyzspab")
H, CNOT, SWAP = prim("H"), prim("CNOT"), prim("SWAP")
ZERO, ONE = Put(BOOL, 0), Put(BOOL, 1)

D, U, O = ErrorKind.DuplicateUse, ErrorKind.UnusedVar, ErrorKind.ContextOverlap

NEGATIVE = [
    # variable needed on both sides of a split
    ("pair-same", {"x": Q}, Pair(x, x), D),
    ("cnot-same", {"x": Q}, UApp(CNOT, Pair(x, x)), D),
    ("letbang-scrutinee-in-branch", {"x": Q}, LetBang(x, (x, x)), D),
    ("let-reuses-bound", {"x": Q}, Let("y", x, Pair(x, y)), D),
    ("case-reuses-scrutinee", {"s": SUM}, Case(s, "a", Pair(a, s), "b", Pair(b, s)), D),
    ("letpair-reuses-scrutinee", {"p": QQ}, LetPair("a", "b", p, Pair(Pair(a, b), p)), D),
    ("nested-pair", {"x": Q, "y": Q}, Pair(Pair(x, y), x), D),
    ("h-then-reuse", {"x": Q}, Let("z", UApp(H, x), Pair(z, x)), D),
    # variable discarded without measurement
    ("put-drops", {"x": Q}, ZERO, U),
    ("letpair-drops-component", {"p": QQ}, LetPair("a", "b", p, a), U),
    ("letbang-branch-drops", {"x": Q, "y": Q}, LetBang(x, (y, ONE)), U),
    ("var-drops", {"x": Q, "y": Q}, x, U),
    ("let-drops-bound", {"x": Q}, Let("y", x, ZERO), U),
    ("case-branch-drops", {"s": SUM}, Case(s, "a", ZERO, "b", meas(b)), U),
    ("unitary-drops", {"x": Q, "y": Q}, UApp(H, x), U),
    # binder collides with a name already in the same context
    ("letpair-twice", {"p": QQ}, LetPair("a", "a", p, a), O),
    ("letpair-twice-pair", {"p": QQ}, LetPair("a", "a", p, Pair(a, a)), O),
    ("case-left-binder", {"s": SUM, "y": Q}, Case(s, "y", Pair(y, ZERO), "b", Pair(b, y)), O),
    ("case-right-binder", {"s": SUM, "y": Q}, Case(s, "a", Pair(a, y), "y", Pair(y, ZERO)), O),
    (
        "case-measured-binder",
        {"s": SUM, "y": Q},
        Case(s, "y", LetBang(y, (ZERO, ONE)), "b", LetBang(b, (y, y))),
        O,
    ),
]

V = Lower(VOID)
POSITIVE = [
    ("identity", {"x": Q}, x, Q),
    ("hadamard", {"x": Q}, UApp(H, x), Q),
    ("cnot", {"x": Q, "y": Q}, UApp(CNOT, Pair(x, y)), QQ),
    ("swap-unitary", {"x": Q, "y": Q}, UApp(SWAP, Pair(x, y)), QQ),
    ("swap-pattern", {"p": QQ}, LetPair("a", "b", p, Pair(b, a)), QQ),
    ("measure", {"x": Q}, meas(x), Q),
    ("put", {}, ZERO, Q),
    ("unit", {}, Put(UNIT, 0), Lower(UNIT)),
    ("pair-of-puts", {}, Pair(ZERO, ONE), QQ),
    ("let", {"x": Q}, Let("y", UApp(H, x), y), Q),
    ("case-inj", {"s": SUM}, Case(s, "a", Inj(2, a, SUM), "b", Inj(1, b, SUM)), SUM),
    ("inj-annotated", {"x": Q}, Inj(1, x, Oplus(Q, Lower(UNIT))), Oplus(Q, Lower(UNIT))),
    ("controlled", {"x": Q, "y": Q}, LetBang(x, (y, UApp(H, y))), Q),
    ("discard-then-keep", {"x": Q, "y": Q}, LetBang(x, (y, y)), Q),
    ("case-with-context", {"s": SUM, "y": Q}, Case(s, "a", LetBang(a, (y, y)), "b", LetBang(b, (y, y))), Q),
    ("shadow-after-use", {"x": Q}, Let("x", UApp(H, x), x), Q),
    ("void-measurement", {"v": V}, LetBang(Var("v"), (), Q), Q),
    ("void-absorbs", {"v": V, "y": Q, "z": QQ}, LetBang(Var("v"), (), Q), Q),
    ("absorbs-in-pair", {"v": V, "y": Q}, Pair(LetBang(Var("v"), (), Q), ZERO), QQ),
    ("nested", {"x": Q, "y": Q}, LetPair("a", "b", UApp(CNOT, Pair(UApp(H, x), y)), Pair(meas(a), b)), QQ),
]


@pytest.mark.parametrize("name,ctx,e,kind", NEGATIVE, ids=[n[0] for n in NEGATIVE])
def test_negative_corpus(name, ctx, e, kind):
    with pytest.raises(TypeCheckError) as err:
        infer_type(ctx, e)
    assert err.value.kind is kind
    assert infer(ctx, e).kind is kind


@pytest.mark.parametrize("name,ctx,e,tau", POSITIVE, ids=[n[0] for n in POSITIVE])
def test_positive_corpus(name, ctx, e, tau):
    assert infer_type(ctx, e) == tau
    assert well_typed(ctx, e, tau)


def test_corpus_sizes():
    assert len(NEGATIVE) == 20 and len(POSITIVE) == 20
    assert {k for *_, k in NEGATIVE} == {D, U, O}


def test_other_error_kinds():
    assert infer({}, x).kind is ErrorKind.UnboundVar
    assert infer({"x": QQ}, UApp(H, x)).kind is ErrorKind.TypeMismatch
    assert infer({"x": Q}, LetBang(x, (ZERO,))).kind is ErrorKind.BranchMismatch
    assert infer({"x": Q}, LetBang(x, (ZERO, Put(UNIT, 0)))).kind is ErrorKind.BranchMismatch
    assert infer({"x": Q}, Inj(1, x)).kind is ErrorKind.TypeMismatch
    assert infer({"v": V}, LetBang(Var("v"), ())).kind is ErrorKind.TypeMismatch


def test_split_context():
    ctx = {"x": Q, "y": QQ, "z": Q}
    assert split_context(ctx, {"x", "z"}, {"y"}) == ({"x": Q, "z": Q}, {"y": QQ})
    assert split_context(ctx, set(), ctx) == ({}, ctx)
    cases = [(({"x"}, {"x", "y", "z"}), O), (({"x"}, {"y"}), U), (({"x", "w"}, {"y", "z"}), ErrorKind.UnboundVar)]
    for (l, r), kind in cases:
        with pytest.raises(TypeCheckError) as err:
            split_context(ctx, l, r)
        assert err.value.kind is kind


def test_absorbs():
    void = LetBang(Var("v"), (), Q)
    assert absorbs(void)
    assert absorbs(Pair(void, ZERO)) and absorbs(UApp(H, void))
    assert not absorbs(Case(s, "a", void, "b", b))
    assert absorbs(Case(s, "a", void, "b", LetBang(b, (void, void))))
    assert not absorbs(meas(x)) and not absorbs(Pair(x, y))


# --- properties ------------------------------------------------------------


@given(st.integers(0, 10**6))
def test_generated_terms_typecheck(seed):
    ctx, tau, e = random_term(seed, n=3)
    assert infer_type(ctx, e) == tau


@given(st.integers(0, 10**6))
def test_weakening_fails(seed):
    ctx, _, e = random_term(seed, n=3)
    if absorbs(e):
        return
    r = infer({**ctx, "fresh_w": Q}, e)
    assert r.kind is ErrorKind.UnusedVar


@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_absorbing_terms_accept_weakening(seed, seed2):
    ctx, tau, e = random_term(seed, n=2)
    void = LetBang(Var("v"), (), tau)
    extra = random_context(rng_for(seed2), 2, prefix="w")
    assert infer_type({**ctx, "v": V, **extra}, Pair(e, void)) == Tensor(tau, tau)


@given(st.integers(0, 10**6))
def test_substitution_preserves_types(seed):
    ctx, tau, e = random_term(seed, n=3)
    if not ctx:
        return
    rng = rng_for(seed + 7)
    xname = sorted(ctx)[int(rng.integers(len(ctx)))]
    sigma = ctx[xname]
    u_ctx = random_context(rng, 2, prefix="u")
    u = TermGen(rng).term(u_ctx, sigma, 2)
    rest = {k: t for k, t in ctx.items() if k != xname}
    got = subst(e, {xname: u})
    assert infer_type({**rest, **u_ctx}, got) == tau


@given(st.integers(0, 10**6))
def test_alpha_invariance(seed):
    ctx, tau, e = random_term(seed, n=3)
    assert infer_type(ctx, rebind(e, names("fresh_b"))) == tau


@given(st.integers(0, 10**6))
def test_free_vars_are_the_context(seed):
    rng = rng_for(seed)
    ctx = random_context(rng, 3)
    tau = random_closed_type(rng)
    e = TermGen(rng).term(ctx, tau, 3)
    if not absorbs(e):
        assert set(free_vars(e)) == set(ctx)
