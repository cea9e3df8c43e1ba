"""Density-matrix semantics of quantum expressions.

A context is laid out as the tensor product of its variables' spaces in a
chosen wire order (lexicographic by default).  Every subterm is compiled
against the sub-order of its own free variables; splitting a context is a
reindexing of the transfer table.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    Superoperator,
    adjoint,
    direct_sum,
    kron,
    superop_compose,
    superop_conjugation,
    superop_difference,
    superop_identity,
    superop_precompose_permutation,
    superop_prepare,
    superop_sum,
    superop_tensor,
    superop_zero,
)
from .opentype import equiv_basis_bijection
from .qtypes import FinType, Lower, Oplus, QType, Sum, Tensor, dim
from .syntax import (
    Case,
    FromEquiv,
    Inj,
    Let,
    LetBang,
    LetPair,
    Pair,
    Primitive,
    Put,
    QExp,
    UAdjoint,
    UApp,
    UCompose,
    UDirectSum,
    UId,
    UnitaryExpr,
    UTensor,
    Var,
    free_vars,
)
from .typecheck import ErrorKind, TypeCheckError, infer_type, leftovers_first

WireOrder = tuple[tuple[str, QType], ...]


def canonical_order(ctx: Mapping[str, QType]) -> WireOrder:
    return tuple(sorted(ctx.items()))


def order_dim(order: WireOrder) -> int:
    out = 1
    for _, t in order:
        out *= dim(t)
    return out

# ---------------------------------------------------------------------------
# Unitaries and building blocks

def permutation_matrix(perm: Sequence[int]) -> np.ndarray:
    """Matrix sending basis vector ``i`` to basis vector ``perm[i]``."""
    n = len(perm)
    p = np.zeros((n, n), dtype=complex)
    for i, j in enumerate(perm):
        p[j, i] = 1
    return p


def denote_unitary(u: UnitaryExpr) -> np.ndarray:
    if isinstance(u, UId):
        return np.eye(dim(u.sigma), dtype=complex)
    if isinstance(u, UCompose):
        return denote_unitary(u.v) @ denote_unitary(u.u)
    if isinstance(u, UAdjoint):
        return adjoint(denote_unitary(u.u))
    if isinstance(u, UTensor):
        return kron(denote_unitary(u.u), denote_unitary(u.v))
    if isinstance(u, UDirectSum):
        return direct_sum(denote_unitary(u.u), denote_unitary(u.v))
    if isinstance(u, Primitive):
        return u.matrix
    if isinstance(u, FromEquiv):
        return permutation_matrix(equiv_basis_bijection(u.f, u.m))
    raise TypeError(f"not a unitary expression: {u!r}")


def delta(alpha: FinType, a: int) -> np.ndarray:
    """The classical state ``|a⟩⟨a|`` on ``Lower alpha``."""
    if not 0 <= a < alpha.card:
        raise IndexError(f"element {a} out of range for {alpha}")
    d = np.zeros((alpha.card, alpha.card), dtype=complex)
    d[a, a] = 1
    return d


def distr_matrix(a1: FinType, a2: FinType, beta: int) -> np.ndarray:
    """Permutation realizing ``(a1 + a2) × β ≅ (a1 × β) + (a2 × β)`` on indices."""
    src = Sum(a1, a2)
    perm = []
    for k in range(src.card * beta):
        s, j = divmod(k, beta)
        side, i = src.split(s)
        perm.append(i * beta + j if side == 0 else a1.card * beta + i * beta + j)
    return permutation_matrix(perm)


def injection(d1: int, d2: int, i: int) -> np.ndarray:
    """Isometry of summand ``i`` (1 or 2) into a ``d1 + d2``-dimensional sum."""
    if i == 1:
        return np.vstack([np.eye(d1), np.zeros((d2, d1))]).astype(complex)
    return np.vstack([np.zeros((d1, d2)), np.eye(d2)]).astype(complex)


def _reorder_perm(src: WireOrder, dst: WireOrder) -> list[int]:
    """``perm[k]`` = index in layout ``dst`` of basis vector ``k`` of layout ``src``."""
    if sorted(src) != sorted(dst):
        raise ValueError("wire orders do not contain the same typed wires")
    dims = [dim(t) for _, t in src]
    pos = {name: k for k, (name, _) in enumerate(src)}
    dst_idx = [pos[name] for name, _ in dst]
    dst_dims = [dims[k] for k in dst_idx]
    total = order_dim(src)
    if not dims:
        return [0]
    if total == 0:
        return []
    digits = np.array(np.unravel_index(np.arange(total), dims))
    return [int(x) for x in np.ravel_multi_index(tuple(digits[dst_idx]), dst_dims)]


def context_permutation(src: WireOrder, dst: WireOrder) -> Superoperator:
    """Relabel the tensor factors of ``src`` into the order ``dst``."""
    n = order_dim(tuple(dst))
    return superop_precompose_permutation(superop_identity(n), _reorder_perm(tuple(src), tuple(dst)))

# ---------------------------------------------------------------------------
# Expressions

def _split(order: WireOrder, fv1: frozenset[str], whole: QExp) -> tuple[WireOrder, WireOrder, list[int]]:
    """Wires of the first part, the rest, and the permutation; leftovers follow the typing split."""
    if leftovers_first(whole):
        fv2 = free_vars(whole) - fv1
        fv1 = frozenset(x for x, _ in order if x not in fv2)
    o1 = tuple((x, t) for x, t in order if x in fv1)
    o2 = tuple((x, t) for x, t in order if x not in fv1)
    return o1, o2, _reorder_perm(order, o1 + o2)


def _with_id(f: Superoperator, rest: WireOrder) -> Superoperator:
    return superop_tensor(f, superop_identity(order_dim(rest)))


def _den(order: WireOrder, e: QExp, expected: QType | None) -> tuple[Superoperator, QType]:
    if isinstance(e, Var):
        t = dict(order)[e.x]
        return superop_identity(dim(t)), t

    if isinstance(e, Put):
        return superop_prepare(delta(e.alpha, e.a)), Lower(e.alpha)

    if isinstance(e, Pair):
        o1, o2, perm = _split(order, free_vars(e.e1), e)
        el = er = None
        if isinstance(expected, Tensor):
            el, er = expected.l, expected.r
        f1, t1 = _den(o1, e.e1, el)
        f2, t2 = _den(o2, e.e2, er)
        return superop_precompose_permutation(superop_tensor(f1, f2), perm), Tensor(t1, t2)

    if isinstance(e, Let):
        o1, o2, perm = _split(order, free_vars(e.e), e)
        f, sigma = _den(o1, e.e, None)
        g, tau = _den(((e.x, sigma),) + o2, e.body, expected)
        return superop_compose(g, superop_precompose_permutation(_with_id(f, o2), perm)), tau

    if isinstance(e, LetPair):
        o1, o2, perm = _split(order, free_vars(e.e), e)
        f, sigma = _den(o1, e.e, None)
        assert isinstance(sigma, Tensor)
        g, tau = _den(((e.x1, sigma.l), (e.x2, sigma.r)) + o2, e.body, expected)
        return superop_compose(g, superop_precompose_permutation(_with_id(f, o2), perm)), tau

    if isinstance(e, Inj):
        ty = e.ty if e.ty is not None else expected
        assert isinstance(ty, Oplus)
        f, _ = _den(order, e.e, ty.l if e.i == 1 else ty.r)
        iota = injection(dim(ty.l), dim(ty.r), e.i)
        return superop_compose(superop_conjugation(iota), f), ty

    if isinstance(e, Case):
        o1, o2, perm = _split(order, free_vars(e.e), e)
        f, sigma = _den(o1, e.e, None)
        assert isinstance(sigma, Oplus)
        pre = superop_precompose_permutation(_with_id(f, o2), perm)
        d1, d2 = dim(sigma.l), dim(sigma.r)
        rest = np.eye(order_dim(o2))
        g1, t1 = _den(((e.x1, sigma.l),) + o2, e.e1, expected)
        g2, _ = _den(((e.x2, sigma.r),) + o2, e.e2, t1)
        parts = []
        for g, i in ((g1, 1), (g2, 2)):
            proj = superop_conjugation(kron(adjoint(injection(d1, d2, i)), rest))
            parts.append(superop_compose(g, superop_compose(proj, pre)))
        return superop_sum(parts), t1

    if isinstance(e, LetBang):
        o1, o2, perm = _split(order, free_vars(e.e), e)
        f, sigma = _den(o1, e.e, None)
        pre = superop_precompose_permutation(_with_id(f, o2), perm)
        n = sigma.base.card  # type: ignore[attr-defined]
        rest = np.eye(order_dim(o2))
        if not e.branches:
            tau = e.ty if e.ty is not None else expected
            assert tau is not None
            return superop_zero(order_dim(order), dim(tau)), tau
        parts = []
        tau = e.ty if e.ty is not None else expected
        for a, br in enumerate(e.branches):
            g, t = _den(o2, br, tau)
            tau = t
            bra = np.zeros((1, n), dtype=complex)
            bra[0, a] = 1
            proj = superop_conjugation(kron(bra, rest))
            parts.append(superop_compose(g, superop_compose(proj, pre)))
        assert tau is not None
        return superop_sum(parts), tau

    if isinstance(e, UApp):
        f, _ = _den(order, e.e, e.u.src)
        return superop_compose(superop_conjugation(denote_unitary(e.u)), f), e.u.dst

    raise TypeError(f"not an expression: {e!r}")


def denote(order: WireOrder | Mapping[str, QType], e: QExp, tau: QType | None = None) -> Superoperator:
    """Superoperator from ``Density Γ`` (laid out by ``order``) to ``Density τ``.

    Ill-typed input raises :class:`TypeCheckError` before anything is computed.
    """
    if isinstance(order, Mapping):
        order = canonical_order(order)
    order = tuple(order)
    got = infer_type(dict(order), e, tau)
    if tau is not None and got != tau:
        raise TypeCheckError(ErrorKind.TypeMismatch, f"term has type {got}, expected {tau}")
    f, _ = _den(order, e, got)
    return f


@dataclass(frozen=True)
class EquivReport:
    equal: bool
    deviation: float
    index: tuple[int, int, int, int] | None
    left: Superoperator
    right: Superoperator

    def dump(self) -> str:
        if self.index is None:
            return f"max deviation {self.deviation:.3e}"
        i, j, a, b = self.index
        lv = self.left.images[self.index]
        rv = self.right.images[self.index]
        return (
            f"max deviation {self.deviation:.3e} on input E_{i}{j}, output entry ({a},{b}): "
            f"left {lv:.6g} vs right {rv:.6g}"
        )


def equiv_report(e1: QExp, e2: QExp, ctx: Mapping[str, QType], tol: float = DEFAULT_TOL) -> EquivReport:
    order = canonical_order(ctx)
    t1 = infer_type(dict(ctx), e1)
    t2 = infer_type(dict(ctx), e2, t1)
    if t1 != t2:
        raise TypeCheckError(ErrorKind.TypeMismatch, f"terms have types {t1} and {t2}")
    f1 = denote(order, e1, t1)
    f2 = denote(order, e2, t1)
    dev, idx = superop_difference(f1, f2)
    return EquivReport(dev <= tol, dev, idx, f1, f2)


def equiv_check(e1: QExp, e2: QExp, ctx: Mapping[str, QType], tol: float = DEFAULT_TOL) -> bool:
    return equiv_report(e1, e2, ctx, tol).equal
