from hypothesis import given, strategies as st

from qeq.generate import (
    ctx_dim,
    generate_term,
    inhabitant,
    random_context,
    random_equiv,
    random_open_type,
    rng_for,
)
from qeq.qtypes import BOOL, QUBIT, UNIT, VOID, Lower, Oplus, Tensor, is_binary
from qeq.syntax import Put
from qeq.typecheck import infer_type

TYPES = [QUBIT, Tensor(QUBIT, QUBIT), Oplus(QUBIT, Lower(UNIT)), Lower(BOOL)]


def test_depth_zero_closed_is_a_put():
    ctx, e = generate_term(0, 0, 0, QUBIT)
    assert ctx == {} and isinstance(e, Put)


def test_deterministic():
    assert generate_term(42, 2, 3, QUBIT) == generate_term(42, 2, 3, QUBIT)
    outs = {generate_term(s, 2, 3, QUBIT)[1] for s in range(20)}
    assert len(outs) > 1


def test_inhabitant():
    rng = rng_for(0)
    assert inhabitant(rng, Lower(VOID)) is None
    e = inhabitant(rng, Oplus(Lower(VOID), QUBIT))
    assert infer_type({}, e) == Oplus(Lower(VOID), QUBIT)


@given(st.integers(0, 10**6), st.integers(0, 3), st.integers(0, 4), st.sampled_from(TYPES))
def test_generated_terms_typecheck(seed, n, depth, tau):
    ctx, e = generate_term(seed, n, depth, tau)
    assert infer_type(ctx, e) == tau


@given(st.integers(0, 10**6), st.integers(0, 4))
def test_binary_contexts(seed, n):
    ctx = random_context(rng_for(seed), n, binary=True, max_dim=4)
    assert all(is_binary(t) for t in ctx.values())
    assert ctx_dim(ctx) <= 4


@given(st.integers(0, 10**6))
def test_random_equiv_starts_at_its_type(seed):
    rng = rng_for(seed)
    t = random_open_type(rng)
    assert random_equiv(rng, t).src == t
