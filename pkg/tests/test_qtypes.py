import pytest
from hypothesis import given, strategies as st

from qeq.generate import random_assignment, random_open_type, rng_for
from qeq.qtypes import BOOL, QUBIT, UNIT, VOID, Fin, Lower, Oplus, Prod, Sum, Tensor, TVar, basis, dim, instantiate


@pytest.mark.parametrize(
    "alpha, n",
    [(VOID, 0), (UNIT, 1), (BOOL, 2), (Fin(5), 5), (Sum(BOOL, Fin(3)), 5), (Prod(BOOL, Fin(3)), 6), (Prod(VOID, BOOL), 0)],
)
def test_cardinality(alpha, n):
    assert alpha.card == n


def test_enumeration_order():
    s = Sum(BOOL, Fin(3))
    assert [s.inl(0), s.inl(1), s.inr(0), s.inr(2)] == [0, 1, 2, 4]
    assert s.split(3) == (1, 1) and s.split(1) == (0, 1)
    p = Prod(Fin(3), BOOL)
    # left-major: (i, j) -> i * |right| + j
    assert [p.pair(i, j) for i in range(3) for j in range(2)] == list(range(6))
    assert p.unpair(5) == (2, 1)


def test_dimensions():
    assert dim(Lower(VOID)) == 0
    assert dim(QUBIT) == 2
    assert dim(Tensor(QUBIT, Oplus(QUBIT, Lower(UNIT)))) == 6


def test_basis_examples():
    assert basis(QUBIT, {}) == BOOL
    assert basis(Tensor(TVar("X"), TVar("Y")), {"X": BOOL, "Y": UNIT}) == Prod(BOOL, UNIT)
    b = basis(Oplus(TVar("X"), Lower(VOID)), {"X": BOOL})
    assert b == Sum(BOOL, VOID) and b.card == 2


@given(st.integers(0, 10**6))
def test_basis_is_multiplicative_and_additive(seed):
    rng = rng_for(seed)
    s, t = random_open_type(rng, ("X", "Y")), random_open_type(rng, ("X", "Y"))
    m = random_assignment(rng, ("X", "Y"))
    assert basis(Tensor(s, t), m).card == basis(s, m).card * basis(t, m).card
    assert basis(Oplus(s, t), m).card == basis(s, m).card + basis(t, m).card
    assert dim(instantiate(s, m)) == basis(s, m).card
