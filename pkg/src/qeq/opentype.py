"""Open quantum types: bases, elaborations, normal forms and equivalence.

A basis value of an open type is a tree: ``BLeaf(i)`` under ``Lower``,
``BVar(token)`` under a type variable, ``BPair`` under ``⊗`` and
``BInl``/``BInr`` under ``⊕``.  Under a type assignment the variable tokens
are element indices of the assigned finite type; in *wire mode* they are
variable names.  Equivalence generators act on these trees without ever
looking inside a ``BVar`` token, so every bijection computed here is natural
in the assignment by construction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Hashable, Iterator, Mapping, Sequence

from .qtypes import (
    UNIT,
    VOID,
    FinType,
    Fin,
    Lower,
    Oplus,
    Prod,
    QType,
    Sum,
    Tensor,
    TVar,
    basis,
    instantiate,
)
from .syntax import (
    AssocOplus,
    AssocTensor,
    Case,
    CongOplus,
    CongTensor,
    Distr,
    Inj,
    LetBang,
    LetPair,
    LowerIso,
    LowerOplus,
    LowerTensor,
    LUnitOplus,
    LUnitTensor,
    LZero,
    NameSupply,
    Pair,
    Put,
    QExp,
    Refl,
    SwapOplus,
    SwapTensor,
    Symm,
    Trans,
    UnitaryEquiv,
    Var,
    subst,
    trans,
)


class BasisValue:
    pass


@dataclass(frozen=True)
class BLeaf(BasisValue):
    index: int


@dataclass(frozen=True)
class BVar(BasisValue):
    token: Hashable


@dataclass(frozen=True)
class BPair(BasisValue):
    fst: BasisValue
    snd: BasisValue


@dataclass(frozen=True)
class BInl(BasisValue):
    v: BasisValue


@dataclass(frozen=True)
class BInr(BasisValue):
    v: BasisValue


def enumerate_basis(sigma: QType, m: Mapping[str, FinType]) -> list[BasisValue]:
    """All basis values of ``sigma`` under ``m`` in canonical index order."""
    if isinstance(sigma, TVar):
        return [BVar(i) for i in range(basis(sigma, m).card)]
    if isinstance(sigma, Lower):
        return [BLeaf(i) for i in range(sigma.base.card)]
    if isinstance(sigma, Tensor):
        return [BPair(a, b) for a in enumerate_basis(sigma.l, m) for b in enumerate_basis(sigma.r, m)]
    if isinstance(sigma, Oplus):
        return [BInl(a) for a in enumerate_basis(sigma.l, m)] + [BInr(b) for b in enumerate_basis(sigma.r, m)]
    raise TypeError(sigma)


def index_of(sigma: QType, m: Mapping[str, FinType], b: BasisValue) -> int:
    if isinstance(sigma, TVar) and isinstance(b, BVar):
        card = basis(sigma, m).card
        if not (isinstance(b.token, int) and 0 <= b.token < card):
            raise ValueError(f"token {b.token!r} is not an element of {basis(sigma, m)}")
        return b.token
    if isinstance(sigma, Lower) and isinstance(b, BLeaf):
        if not 0 <= b.index < sigma.base.card:
            raise ValueError(f"index {b.index} out of range for {sigma.base}")
        return b.index
    if isinstance(sigma, Tensor) and isinstance(b, BPair):
        return index_of(sigma.l, m, b.fst) * basis(sigma.r, m).card + index_of(sigma.r, m, b.snd)
    if isinstance(sigma, Oplus) and isinstance(b, BInl):
        return index_of(sigma.l, m, b.v)
    if isinstance(sigma, Oplus) and isinstance(b, BInr):
        return basis(sigma.l, m).card + index_of(sigma.r, m, b.v)
    raise ValueError(f"basis value {b} does not match type {sigma}")


def wire_shapes(sigma: QType, supply: Callable[[], str]) -> list[BasisValue]:
    """Wire-mode basis: Lower leaves enumerated, each variable leaf a fresh wire name."""
    if isinstance(sigma, TVar):
        return [BVar(supply())]
    if isinstance(sigma, Lower):
        return [BLeaf(i) for i in range(sigma.base.card)]
    if isinstance(sigma, Tensor):
        return [BPair(a, b) for a in wire_shapes(sigma.l, supply) for b in wire_shapes(sigma.r, supply)]
    if isinstance(sigma, Oplus):
        return [BInl(a) for a in wire_shapes(sigma.l, supply)] + [BInr(b) for b in wire_shapes(sigma.r, supply)]
    raise TypeError(sigma)


def var_leaves(b: BasisValue) -> list[Hashable]:
    if isinstance(b, BVar):
        return [b.token]
    if isinstance(b, BLeaf):
        return []
    if isinstance(b, BPair):
        return var_leaves(b.fst) + var_leaves(b.snd)
    if isinstance(b, (BInl, BInr)):
        return var_leaves(b.v)
    raise TypeError(b)


def map_tokens(b: BasisValue, fn: Callable[[Hashable], Hashable]) -> BasisValue:
    if isinstance(b, BVar):
        return BVar(fn(b.token))
    if isinstance(b, BLeaf):
        return b
    if isinstance(b, BPair):
        return BPair(map_tokens(b.fst, fn), map_tokens(b.snd, fn))
    if isinstance(b, BInl):
        return BInl(map_tokens(b.v, fn))
    if isinstance(b, BInr):
        return BInr(map_tokens(b.v, fn))
    raise TypeError(b)


# ---------------------------------------------------------------------------
# Generator actions


class ShapeError(ValueError):
    pass


def _want(b: BasisValue, cls: type) -> BasisValue:
    if not isinstance(b, cls):
        raise ShapeError(f"expected {cls.__name__}, got {b}")
    return b


def apply_equiv(f: UnitaryEquiv, b: BasisValue) -> BasisValue:
    """Image of a basis value of ``f.src`` under the bijection of ``f``."""
    if isinstance(f, Refl):
        return b
    if isinstance(f, Symm):
        return apply_inverse(f.f, b)
    if isinstance(f, Trans):
        return apply_equiv(f.g, apply_equiv(f.f, b))
    if isinstance(f, CongTensor):
        p = _want(b, BPair)
        return BPair(apply_equiv(f.f, p.fst), apply_equiv(f.g, p.snd))  # type: ignore[attr-defined]
    if isinstance(f, CongOplus):
        if isinstance(b, BInl):
            return BInl(apply_equiv(f.f, b.v))
        return BInr(apply_equiv(f.g, _want(b, BInr).v))  # type: ignore[attr-defined]
    if isinstance(f, SwapTensor):
        p = _want(b, BPair)
        return BPair(p.snd, p.fst)  # type: ignore[attr-defined]
    if isinstance(f, SwapOplus):
        if isinstance(b, BInl):
            return BInr(b.v)
        return BInl(_want(b, BInr).v)  # type: ignore[attr-defined]
    if isinstance(f, AssocTensor):
        p = _want(b, BPair)
        q = _want(p.snd, BPair)  # type: ignore[attr-defined]
        return BPair(BPair(p.fst, q.fst), q.snd)  # type: ignore[attr-defined]
    if isinstance(f, AssocOplus):
        if isinstance(b, BInl):
            return BInl(BInl(b.v))
        inner = _want(b, BInr).v  # type: ignore[attr-defined]
        if isinstance(inner, BInl):
            return BInl(BInr(inner.v))
        return BInr(_want(inner, BInr).v)  # type: ignore[attr-defined]
    if isinstance(f, Distr):
        p = _want(b, BPair)
        if isinstance(p.snd, BInl):  # type: ignore[attr-defined]
            return BInl(BPair(p.fst, p.snd.v))  # type: ignore[attr-defined]
        return BInr(BPair(p.fst, _want(p.snd, BInr).v))  # type: ignore[attr-defined]
    if isinstance(f, LowerTensor):
        p = _want(b, BPair)
        i = _want(p.fst, BLeaf).index  # type: ignore[attr-defined]
        j = _want(p.snd, BLeaf).index  # type: ignore[attr-defined]
        return BLeaf(Prod(f.a1, f.a2).pair(i, j))
    if isinstance(f, LowerOplus):
        if isinstance(b, BInl):
            return BLeaf(_want(b.v, BLeaf).index)  # type: ignore[attr-defined]
        return BLeaf(f.a1.card + _want(_want(b, BInr).v, BLeaf).index)  # type: ignore[attr-defined]
    if isinstance(f, LUnitTensor):
        p = _want(b, BPair)
        return p.snd  # type: ignore[attr-defined]
    if isinstance(f, LUnitOplus):
        if isinstance(b, BInl):
            raise ShapeError("no basis value lives in Lower Void")
        return _want(b, BInr).v  # type: ignore[attr-defined]
    if isinstance(f, LZero):
        raise ShapeError("no basis value lives in Lower Void ⊗ σ")
    if isinstance(f, LowerIso):
        return BLeaf(f.image(_want(b, BLeaf).index))  # type: ignore[attr-defined]
    raise TypeError(f)


def apply_inverse(f: UnitaryEquiv, b: BasisValue) -> BasisValue:
    """Preimage of a basis value of ``f.dst``."""
    if isinstance(f, Refl):
        return b
    if isinstance(f, Symm):
        return apply_equiv(f.f, b)
    if isinstance(f, Trans):
        return apply_inverse(f.f, apply_inverse(f.g, b))
    if isinstance(f, CongTensor):
        p = _want(b, BPair)
        return BPair(apply_inverse(f.f, p.fst), apply_inverse(f.g, p.snd))  # type: ignore[attr-defined]
    if isinstance(f, CongOplus):
        if isinstance(b, BInl):
            return BInl(apply_inverse(f.f, b.v))
        return BInr(apply_inverse(f.g, _want(b, BInr).v))  # type: ignore[attr-defined]
    if isinstance(f, (SwapTensor, SwapOplus)):
        return apply_equiv(f, b)
    if isinstance(f, AssocTensor):
        p = _want(b, BPair)
        q = _want(p.fst, BPair)  # type: ignore[attr-defined]
        return BPair(q.fst, BPair(q.snd, p.snd))  # type: ignore[attr-defined]
    if isinstance(f, AssocOplus):
        if isinstance(b, BInr):
            return BInr(BInr(b.v))
        inner = _want(b, BInl).v  # type: ignore[attr-defined]
        if isinstance(inner, BInl):
            return BInl(inner.v)
        return BInr(BInl(_want(inner, BInr).v))  # type: ignore[attr-defined]
    if isinstance(f, Distr):
        if isinstance(b, BInl):
            p = _want(b.v, BPair)
            return BPair(p.fst, BInl(p.snd))  # type: ignore[attr-defined]
        p = _want(_want(b, BInr).v, BPair)  # type: ignore[attr-defined]
        return BPair(p.fst, BInr(p.snd))  # type: ignore[attr-defined]
    if isinstance(f, LowerTensor):
        i, j = Prod(f.a1, f.a2).unpair(_want(b, BLeaf).index)  # type: ignore[attr-defined]
        return BPair(BLeaf(i), BLeaf(j))
    if isinstance(f, LowerOplus):
        k = _want(b, BLeaf).index  # type: ignore[attr-defined]
        side, inner = Sum(f.a1, f.a2).split(k)
        return BInl(BLeaf(inner)) if side == 0 else BInr(BLeaf(inner))
    if isinstance(f, LUnitTensor):
        return BPair(BLeaf(0), b)
    if isinstance(f, LUnitOplus):
        return BInr(b)
    if isinstance(f, LZero):
        raise ShapeError("no basis value lives in Lower Void")
    if isinstance(f, LowerIso):
        return BLeaf(f.preimage(_want(b, BLeaf).index))  # type: ignore[attr-defined]
    raise TypeError(f)


def equiv_basis_bijection(f: UnitaryEquiv, m: Mapping[str, FinType]) -> list[int]:
    """``perm[i]`` = index in ``basis(f.dst, m)`` of the image of element ``i`` of ``basis(f.src, m)``.

    Raises ``ValueError`` if the result is not a bijection.
    """
    src_vals = enumerate_basis(f.src, m)
    dst_card = basis(f.dst, m).card
    perm = [index_of(f.dst, m, apply_equiv(f, b)) for b in src_vals]
    if len(perm) != dst_card or sorted(perm) != list(range(dst_card)):
        raise ValueError(f"generator tree does not induce a bijection under {dict(m)}")
    return perm


def check_endpoints(f: UnitaryEquiv) -> None:
    """Validate every ``Trans`` junction (constructors already do; this re-walks trees built elsewhere)."""
    if isinstance(f, Trans):
        if f.f.dst != f.g.src:
            raise TypeError(f"endpoint mismatch {f.f.dst} vs {f.g.src}")
        check_endpoints(f.f)
        check_endpoints(f.g)
    elif isinstance(f, (CongTensor, CongOplus)):
        check_endpoints(f.f)
        check_endpoints(f.g)
    elif isinstance(f, Symm):
        check_endpoints(f.f)


# ---------------------------------------------------------------------------
# Elaborations


def point_type(sigma: QType, m: Mapping[str, FinType]) -> QType:
    """The closed quantum type whose basis is ``[sigma]^m``."""
    return instantiate(sigma, m)


def gamma(sigma: QType, b: BasisValue, m: Mapping[str, FinType]) -> dict[str, QType]:
    """Typed wires carried by a wire-mode basis value."""
    if isinstance(sigma, TVar):
        if not isinstance(b, BVar):
            raise ShapeError(f"{b} does not match {sigma}")
        return {str(b.token): Lower(basis(sigma, m))}
    if isinstance(sigma, Lower):
        if not isinstance(b, BLeaf) or not 0 <= b.index < sigma.base.card:
            raise ShapeError(f"{b} does not match {sigma}")
        return {}
    if isinstance(sigma, Tensor):
        p = _want(b, BPair)
        g1 = gamma(sigma.l, p.fst, m)  # type: ignore[attr-defined]
        g2 = gamma(sigma.r, p.snd, m)  # type: ignore[attr-defined]
        if set(g1) & set(g2):
            raise ShapeError("wire names repeated in basis value")
        return {**g1, **g2}
    if isinstance(sigma, Oplus):
        if isinstance(b, BInl):
            return gamma(sigma.l, b.v, m)
        return gamma(sigma.r, _want(b, BInr).v, m)  # type: ignore[attr-defined]
    raise TypeError(sigma)


def partial_init(sigma: QType, b: BasisValue, m: Mapping[str, FinType]) -> QExp:
    if isinstance(sigma, TVar):
        return Var(str(_want(b, BVar).token))  # type: ignore[attr-defined]
    if isinstance(sigma, Lower):
        return Put(sigma.base, _want(b, BLeaf).index)  # type: ignore[attr-defined]
    if isinstance(sigma, Tensor):
        p = _want(b, BPair)
        return Pair(partial_init(sigma.l, p.fst, m), partial_init(sigma.r, p.snd, m))  # type: ignore[attr-defined]
    if isinstance(sigma, Oplus):
        ty = point_type(sigma, m)
        if isinstance(b, BInl):
            return Inj(1, partial_init(sigma.l, b.v, m), ty)  # type: ignore[arg-type]
        return Inj(2, partial_init(sigma.r, _want(b, BInr).v, m), ty)  # type: ignore[arg-type, attr-defined]
    raise TypeError(sigma)


Branches = Callable[[BasisValue], QExp]


def partial_match(
    sigma: QType,
    e: QExp,
    branches: Branches,
    m: Mapping[str, FinType],
    supply: Callable[[str], str] | None = None,
    result_type: QType | None = None,
) -> QExp:
    """Case tree over the basis of ``sigma`` scrutinizing ``e``.

    ``branches`` receives wire-mode basis values whose variable leaves are
    fresh names drawn from ``supply``.  ``result_type`` is only needed when a
    ``Lower Void`` factor produces an empty measurement.
    """
    if supply is None:
        supply = NameSupply(stem="m")
    return _match(sigma, e, branches, m, supply, result_type)


def _match(sigma, e, bs, m, supply, rt) -> QExp:  # type: ignore[no-untyped-def]
    if isinstance(sigma, TVar):
        x = supply("x")
        return subst(bs(BVar(x)), {x: e})
    if isinstance(sigma, Lower):
        return LetBang(e, tuple(bs(BLeaf(i)) for i in range(sigma.base.card)), rt if sigma.base.card == 0 else None)
    if isinstance(sigma, Tensor):
        x1, x2 = supply("x"), supply("x")
        inner = _match(
            sigma.l,
            Var(x1),
            lambda b1: _match(sigma.r, Var(x2), lambda b2: bs(BPair(b1, b2)), m, supply, rt),
            m,
            supply,
            rt,
        )
        return LetPair(x1, x2, e, inner)
    if isinstance(sigma, Oplus):
        x1, x2 = supply("x"), supply("x")
        left = _match(sigma.l, Var(x1), lambda b: bs(BInl(b)), m, supply, rt)
        right = _match(sigma.r, Var(x2), lambda b: bs(BInr(b)), m, supply, rt)
        return Case(e, x1, left, x2, right)
    raise TypeError(sigma)


# ---------------------------------------------------------------------------
# Recognizing elaborations (used by the rewrite rules)


def unify_init(sigma: QType, t: QExp, holes: dict[str, QExp], supply: Callable[[str], str]) -> BasisValue | None:
    """Read ``t`` as ``partial_init(sigma, b)`` with arbitrary terms at variable leaves.

    Each variable leaf gets a fresh token name; ``holes`` records the term
    found there.
    """
    if isinstance(sigma, TVar):
        name = supply("h")
        holes[name] = t
        return BVar(name)
    if isinstance(sigma, Lower):
        if isinstance(t, Put) and t.alpha == sigma.base:
            return BLeaf(t.a)
        return None
    if isinstance(sigma, Tensor):
        if not isinstance(t, Pair):
            return None
        a = unify_init(sigma.l, t.e1, holes, supply)
        if a is None:
            return None
        b = unify_init(sigma.r, t.e2, holes, supply)
        return None if b is None else BPair(a, b)
    if isinstance(sigma, Oplus):
        if not isinstance(t, Inj):
            return None
        v = unify_init(sigma.l if t.i == 1 else sigma.r, t.e, holes, supply)
        if v is None:
            return None
        return BInl(v) if t.i == 1 else BInr(v)
    return None


def unify_match(sigma: QType, t: QExp) -> tuple[QExp, list[tuple[BasisValue, QExp]]] | None:
    """Read ``t`` as ``partial_match(sigma, s, bs)``; return ``s`` and the branch table.

    Keys of the table are wire-mode basis values whose variable leaves are the
    binder names used in ``t``.  A bare type variable at the root has no
    syntax of its own and is not recognized.
    """
    if isinstance(sigma, Lower):
        if isinstance(t, LetBang) and len(t.branches) == sigma.base.card:
            return t.e, [(BLeaf(i), br) for i, br in enumerate(t.branches)]
        return None
    if isinstance(sigma, Tensor):
        if not isinstance(t, LetPair):
            return None
        out: list[tuple[BasisValue, QExp]] = []
        firsts = _unify_at(sigma.l, t.x1, t.body)
        if firsts is None:
            return None
        for b1, rest in firsts:
            seconds = _unify_at(sigma.r, t.x2, rest)
            if seconds is None:
                return None
            out.extend((BPair(b1, b2), body) for b2, body in seconds)
        return t.e, out
    if isinstance(sigma, Oplus):
        if not isinstance(t, Case):
            return None
        left = _unify_at(sigma.l, t.x1, t.e1)
        right = _unify_at(sigma.r, t.x2, t.e2)
        if left is None or right is None:
            return None
        return t.e, [(BInl(b), body) for b, body in left] + [(BInr(b), body) for b, body in right]
    return None


def _unify_at(sigma: QType, x: str, t: QExp) -> list[tuple[BasisValue, QExp]] | None:
    if isinstance(sigma, TVar):
        return [(BVar(x), t)]
    r = unify_match(sigma, t)
    if r is None or r[0] != Var(x):
        return None
    return r[1]


def match_key(key: BasisValue, value: BasisValue) -> dict[Hashable, Hashable] | None:
    """Unify two wire-mode values of the same type: returns the token renaming key → value."""
    if isinstance(key, BVar) and isinstance(value, BVar):
        return {key.token: value.token}
    if isinstance(key, BLeaf) and isinstance(value, BLeaf):
        return {} if key.index == value.index else None
    if isinstance(key, BPair) and isinstance(value, BPair):
        a = match_key(key.fst, value.fst)
        b = match_key(key.snd, value.snd)
        if a is None or b is None:
            return None
        return {**a, **b}
    if isinstance(key, BInl) and isinstance(value, BInl):
        return match_key(key.v, value.v)
    if isinstance(key, BInr) and isinstance(value, BInr):
        return match_key(key.v, value.v)
    return None


# ---------------------------------------------------------------------------
# Normal forms


@dataclass(frozen=True)
class Clause:
    """``Lower card ⊗ X1 ⊗ ... ⊗ Xn``."""

    card: FinType
    vars: tuple[str, ...]

    @property
    def key(self) -> tuple[str, ...]:
        return tuple(sorted(self.vars))


@dataclass(frozen=True)
class NormalForm:
    clauses: tuple[Clause, ...]

    def canonical(self) -> tuple[tuple[tuple[str, ...], int], ...]:
        """Per variable multiset, the total cardinality (zero totals dropped), sorted."""
        totals: dict[tuple[str, ...], int] = {}
        for c in self.clauses:
            totals[c.key] = totals.get(c.key, 0) + c.card.card
        return tuple(sorted((k, n) for k, n in totals.items() if n))


def clause_type(c: Clause) -> QType:
    out: QType = Lower(c.card)
    if c.vars:
        rest: QType = TVar(c.vars[-1])
        for v in reversed(c.vars[:-1]):
            rest = Tensor(TVar(v), rest)
        out = Tensor(out, rest)
    return out


def _clauses_of(t: QType) -> list[Clause]:
    """Leaves of a ⊕-tree of clause types."""
    if isinstance(t, Oplus):
        return _clauses_of(t.l) + _clauses_of(t.r)
    return [_parse_clause(t)]


def _parse_clause(t: QType) -> Clause:
    if isinstance(t, Lower):
        return Clause(t.base, ())
    if isinstance(t, Tensor) and isinstance(t.l, Lower):
        vs: list[str] = []
        r = t.r
        while isinstance(r, Tensor):
            if not isinstance(r.l, TVar):
                raise ValueError(f"not a clause: {t}")
            vs.append(r.l.name)
            r = r.r
        if not isinstance(r, TVar):
            raise ValueError(f"not a clause: {t}")
        vs.append(r.name)
        return Clause(t.l.base, tuple(vs))
    raise ValueError(f"not a clause: {t}")


def _right_distr(a: QType, b: QType, c: QType) -> UnitaryEquiv:
    """``(a ⊕ b) ⊗ c ≃ (a ⊗ c) ⊕ (b ⊗ c)``."""
    return trans(
        SwapTensor(Oplus(a, b), c),
        Distr(c, a, b),
        CongOplus(SwapTensor(c, a), SwapTensor(c, b)),
    )


def _vars_type(vs: Sequence[str]) -> QType:
    out: QType = TVar(vs[-1])
    for v in reversed(vs[:-1]):
        out = Tensor(TVar(v), out)
    return out


def _append_vars(xs: Sequence[str], ys: Sequence[str]) -> UnitaryEquiv:
    """``Xs ⊗ Ys ≃ flat(Xs ++ Ys)`` for right-nested variable tensors."""
    xt, yt = _vars_type(xs), _vars_type(ys)
    if len(xs) == 1:
        return Refl(Tensor(xt, yt))
    head, rest = TVar(xs[0]), _vars_type(xs[1:])
    # (X1 ⊗ R) ⊗ Y ≃ X1 ⊗ (R ⊗ Y) ≃ X1 ⊗ flat(R ++ Y)
    return trans(Symm(AssocTensor(head, rest, yt)), CongTensor(Refl(head), _append_vars(xs[1:], ys)))


def _clause_product(c1: Clause, c2: Clause) -> UnitaryEquiv:
    """``clause(c1) ⊗ clause(c2) ≃ clause(c1 · c2)``."""
    la, lb = Lower(c1.card), Lower(c2.card)
    lt = LowerTensor(c1.card, c2.card)
    if not c1.vars and not c2.vars:
        return lt
    if not c1.vars:
        ys = _vars_type(c2.vars)
        return trans(AssocTensor(la, lb, ys), CongTensor(lt, Refl(ys)))
    xs = _vars_type(c1.vars)
    if not c2.vars:
        return trans(
            Symm(AssocTensor(la, xs, lb)),
            CongTensor(Refl(la), SwapTensor(xs, lb)),
            AssocTensor(la, lb, xs),
            CongTensor(lt, Refl(xs)),
        )
    ys = _vars_type(c2.vars)
    inner = trans(
        AssocTensor(xs, lb, ys),
        CongTensor(SwapTensor(xs, lb), Refl(ys)),
        Symm(AssocTensor(lb, xs, ys)),
    )
    return trans(
        Symm(AssocTensor(la, xs, Tensor(lb, ys))),
        CongTensor(Refl(la), inner),
        AssocTensor(la, lb, Tensor(xs, ys)),
        CongTensor(lt, _append_vars(c1.vars, c2.vars)),
    )


def _distribute(a: QType, b: QType) -> UnitaryEquiv:
    """``a ⊗ b ≃ ⊕-tree of clause products`` for ⊕-trees of clauses ``a`` and ``b``."""
    if isinstance(a, Oplus):
        step = _right_distr(a.l, a.r, b)
        return trans(step, CongOplus(_distribute(a.l, b), _distribute(a.r, b)))
    if isinstance(b, Oplus):
        step = Distr(a, b.l, b.r)
        return trans(step, CongOplus(_distribute(a, b.l), _distribute(a, b.r)))
    return _clause_product(_parse_clause(a), _parse_clause(b))


def _normal_witness(sigma: QType) -> UnitaryEquiv:
    if isinstance(sigma, TVar):
        return Symm(LUnitTensor(sigma))
    if isinstance(sigma, Lower):
        return Refl(sigma)
    if isinstance(sigma, Oplus):
        return CongOplus(_normal_witness(sigma.l), _normal_witness(sigma.r))
    if isinstance(sigma, Tensor):
        wl, wr = _normal_witness(sigma.l), _normal_witness(sigma.r)
        return trans(CongTensor(wl, wr), _distribute(wl.dst, wr.dst))
    raise TypeError(sigma)


def normalize_type(sigma: QType) -> tuple[NormalForm, UnitaryEquiv]:
    """Normal form of ``sigma`` and a derivation ``sigma ≃ N``.

    ``N`` is a ⊕-tree whose leaves are the clauses, in order.
    """
    w = _normal_witness(sigma)
    return NormalForm(tuple(_clauses_of(w.dst))), w


# --- from a normal form to a canonical one ---------------------------------


def _rightnest_sum(t: QType) -> UnitaryEquiv:
    """Reassociate a ⊕-tree to the right: ``c1 ⊕ (c2 ⊕ (... ⊕ cn))``."""
    if not isinstance(t, Oplus):
        return Refl(t)
    if isinstance(t.l, Oplus):
        a, b, c = t.l.l, t.l.r, t.r
        step = Symm(AssocOplus(a, b, c))
        return trans(step, _rightnest_sum(step.dst))
    w = _rightnest_sum(t.r)
    return CongOplus(Refl(t.l), w)


def _at_sum_index(items: list[QType], k: int, w: UnitaryEquiv) -> UnitaryEquiv:
    """Apply ``w`` to item ``k`` of a right-nested sum (last item has no ⊕)."""
    if len(items) == 1:
        return w
    if k == 0:
        return CongOplus(w, Refl(_sum_of(items[1:])))
    return CongOplus(Refl(items[0]), _at_sum_index(items[1:], k - 1, w))


def _sum_of(items: list[QType]) -> QType:
    out = items[-1]
    for t in reversed(items[:-1]):
        out = Oplus(t, out)
    return out


def _swap_adjacent_sum(items: list[QType], k: int) -> UnitaryEquiv:
    """Swap items ``k`` and ``k+1`` of a right-nested sum."""
    a, b = items[k], items[k + 1]
    if k + 2 == len(items):
        local: UnitaryEquiv = SwapOplus(a, b)
    else:
        r = _sum_of(items[k + 2:])
        local = trans(AssocOplus(a, b, r), CongOplus(SwapOplus(a, b), Refl(r)), Symm(AssocOplus(b, a, r)))
    return _at_sum_index_tail(items, k, local)


def _at_sum_index_tail(items: list[QType], k: int, w: UnitaryEquiv) -> UnitaryEquiv:
    """Apply ``w`` to the suffix of a right-nested sum starting at item ``k``."""
    if k == 0:
        return w
    return CongOplus(Refl(items[0]), _at_sum_index_tail(items[1:], k - 1, w))


def _swap_adjacent_vars(c: Clause, k: int) -> UnitaryEquiv:
    """Swap variables ``k`` and ``k+1`` inside ``Lower a ⊗ (X1 ⊗ ...)``."""
    vs = list(c.vars)
    a, b = TVar(vs[k]), TVar(vs[k + 1])
    if k + 2 == len(vs):
        local: UnitaryEquiv = SwapTensor(a, b)
    else:
        r = _vars_type(vs[k + 2:])
        local = trans(AssocTensor(a, b, r), CongTensor(SwapTensor(a, b), Refl(r)), Symm(AssocTensor(b, a, r)))
    w = local
    for j in range(k - 1, -1, -1):
        w = CongTensor(Refl(TVar(vs[j])), w)
    return CongTensor(Refl(Lower(c.card)), w)


def _sort_clause_vars(c: Clause) -> tuple[UnitaryEquiv, Clause]:
    vs = list(c.vars)
    w: UnitaryEquiv = Refl(clause_type(c))
    cur = c
    for i in range(len(vs)):
        for k in range(len(vs) - 1 - i):
            if vs[k] > vs[k + 1]:
                w = trans(w, _swap_adjacent_vars(cur, k))
                vs[k], vs[k + 1] = vs[k + 1], vs[k]
                cur = Clause(c.card, tuple(vs))
    return w, cur


def _to_fin(c: Clause) -> tuple[UnitaryEquiv, Clause]:
    target = Fin(c.card.card)
    new = Clause(target, c.vars)
    if c.card == target:
        return Refl(clause_type(c)), new
    iso = LowerIso(c.card, target)
    if not c.vars:
        return iso, new
    return CongTensor(iso, Refl(_vars_type(c.vars))), new


def _merge_pair(c1: Clause, c2: Clause) -> tuple[UnitaryEquiv, Clause]:
    """``clause(c1) ⊕ clause(c2) ≃ clause(merged)`` for clauses with identical variable lists."""
    total = Fin(c1.card.card + c2.card.card)
    lo = LowerOplus(c1.card, c2.card)
    to_fin = LowerIso(Sum(c1.card, c2.card), total)
    merged = Clause(total, c1.vars)
    if not c1.vars:
        return trans(lo, to_fin), merged
    v = _vars_type(c1.vars)
    a, b = Lower(c1.card), Lower(c2.card)
    w = trans(
        CongOplus(SwapTensor(a, v), SwapTensor(b, v)),
        Symm(Distr(v, a, b)),
        CongTensor(Refl(v), trans(lo, to_fin)),
        SwapTensor(v, Lower(total)),
    )
    return w, merged


def _drop_void(items: list[Clause], k: int) -> UnitaryEquiv:
    """Remove the zero-cardinality clause ``k`` (already ``Lower Void``-based) from a right-nested sum."""
    types = [clause_type(c) for c in items]
    c = items[k]
    w: UnitaryEquiv = Refl(types[k])
    if c.vars:
        w = LZero(_vars_type(c.vars))
    # Bring the void clause to the front of its suffix, then absorb it.
    if k == len(items) - 1:
        prev = types[k - 1]
        local = trans(CongOplus(Refl(prev), w), SwapOplus(prev, Lower(VOID)), LUnitOplus(prev))
        return _at_sum_index_tail(types, k - 1, local)
    rest = _sum_of(types[k + 1:])
    local = trans(CongOplus(w, Refl(rest)), LUnitOplus(rest))
    return _at_sum_index_tail(types, k, local)


def canonicalize(sigma: QType) -> tuple[UnitaryEquiv, QType]:
    """A derivation ``sigma ≃ C`` with ``C`` canonical: equivalent types share ``C``."""
    _, w = normalize_type(sigma)
    w = trans(w, _rightnest_sum(w.dst))
    clauses = _clauses_of(w.dst)

    def items_types() -> list[QType]:
        return [clause_type(c) for c in clauses]

    # sort variables inside each clause, then convert every cardinality to Fin
    for k in range(len(clauses)):
        ws, c = _sort_clause_vars(clauses[k])
        wf, c = _to_fin(c)
        local = trans(ws, wf)
        if not isinstance(local, Refl):
            w = trans(w, _at_sum_index(items_types(), k, local))
        clauses[k] = c
    # sort clauses by variable list
    n = len(clauses)
    for i in range(n):
        for k in range(n - 1 - i):
            if clauses[k].vars > clauses[k + 1].vars:
                w = trans(w, _swap_adjacent_sum(items_types(), k))
                clauses[k], clauses[k + 1] = clauses[k + 1], clauses[k]
    # merge neighbours with identical variable lists
    k = 0
    while k < len(clauses) - 1:
        if clauses[k].vars == clauses[k + 1].vars:
            mw, merged = _merge_pair(clauses[k], clauses[k + 1])
            types = items_types()
            if k + 2 == len(clauses):
                local = mw
            else:
                r = _sum_of(types[k + 2:])
                local = trans(AssocOplus(types[k], types[k + 1], r), CongOplus(mw, Refl(r)))
            w = trans(w, _at_sum_index_tail(types, k, local))
            clauses[k: k + 2] = [merged]
        else:
            k += 1
    # drop empty clauses (keep one if everything is empty)
    k = 0
    while k < len(clauses):
        if clauses[k].card.card == 0 and len(clauses) > 1:
            c = clauses[k]
            if c.card != VOID:
                iso = LowerIso(c.card, VOID)
                local = iso if not c.vars else CongTensor(iso, Refl(_vars_type(c.vars)))
                w = trans(w, _at_sum_index(items_types(), k, local))
                clauses[k] = Clause(VOID, c.vars)
            w = trans(w, _drop_void(clauses, k))
            del clauses[k]
        else:
            k += 1
    if len(clauses) == 1 and clauses[0].card.card == 0:
        c = clauses[0]
        if c.vars:
            w = trans(w, CongTensor(LowerIso(c.card, VOID), Refl(_vars_type(c.vars))), LZero(_vars_type(c.vars)))
        elif c.card != VOID:
            w = trans(w, LowerIso(c.card, VOID))
        clauses = [Clause(VOID, ())]
    return w, w.dst


def decide_equiv(sigma: QType, tau: QType) -> UnitaryEquiv | None:
    """A derivation ``sigma ≃ tau`` if one exists, else ``None``."""
    ws, cs = canonicalize(sigma)
    wt, ct = canonicalize(tau)
    if cs != ct:
        return None
    return trans(ws, Symm(wt))


# ---------------------------------------------------------------------------
# Helpers shared by tests and the CLI


def assignments(names: Sequence[str], choices: Sequence[FinType]) -> Iterator[dict[str, FinType]]:
    for combo in itertools.product(choices, repeat=len(names)):
        yield dict(zip(names, combo))


def shape_profile(sigma: QType) -> dict[tuple[str, ...], int]:
    """Number of wire-mode basis shapes per sorted multiset of variables.

    A natural family of bijections ``sigma ⇌ tau`` exists exactly when the
    two profiles agree, since a parametric bijection must send each shape to
    a shape carrying the same variables.
    """
    shapes = _shapes(sigma)
    out: dict[tuple[str, ...], int] = {}
    for vs in shapes:
        key = tuple(sorted(vs))
        out[key] = out.get(key, 0) + 1
    return out


def _shapes(sigma: QType) -> list[list[str]]:
    if isinstance(sigma, TVar):
        return [[sigma.name]]
    if isinstance(sigma, Lower):
        return [[] for _ in range(sigma.base.card)]
    if isinstance(sigma, Tensor):
        return [a + b for a in _shapes(sigma.l) for b in _shapes(sigma.r)]
    if isinstance(sigma, Oplus):
        return _shapes(sigma.l) + _shapes(sigma.r)
    raise TypeError(sigma)


def distr_equiv(x: QType = TVar("X")) -> UnitaryEquiv:
    """``Lower Bool ⊗ x ≃ x ⊕ x``, sending ``(b, v)`` to ``inr v`` if ``b`` else ``inl v``."""
    from .qtypes import BOOL

    lu = Lower(UNIT)
    two = Sum(UNIT, UNIT)
    drop_unit = trans(SwapTensor(x, lu), LUnitTensor(x))
    return trans(
        CongTensor(LowerIso(BOOL, two), Refl(x)),
        CongTensor(Symm(LowerOplus(UNIT, UNIT)), Refl(x)),
        SwapTensor(Oplus(lu, lu), x),
        Distr(x, lu, lu),
        CongOplus(drop_unit, drop_unit),
    )
