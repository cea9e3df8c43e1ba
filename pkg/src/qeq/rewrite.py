"""Executable equational theory.

Each rule is a pair of functions acting on a single node of a term: the
forward function returns the rewrites of that node, the optional backward
function returns terms that rewrite *to* it.  ``apply_rule`` locates the node
by path, supplies its typing site (in-scope variables and type) and checks
that the rewrite preserves the type.

``prove_equiv`` runs a breadth-first search from both endpoints at once,
identifying terms up to renaming of bound variables.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .opentype import (
    BasisValue,
    apply_equiv,
    distr_equiv,
    match_key,
    partial_init,
    partial_match,
    unify_init,
    unify_match,
)
from .qtypes import BOOL, QUBIT, UNIT, Lower, Oplus, QType, Tensor, TypeAssignment, TVar, dim
from .semantics import equiv_check
from .syntax import (
    Case,
    FromEquiv,
    Inj,
    Let,
    LetBang,
    LetPair,
    LowerIso,
    NameSupply,
    Pair,
    Path,
    Primitive,
    Put,
    QExp,
    SwapTensor,
    Symm,
    UAdjoint,
    UApp,
    UCompose,
    UDirectSum,
    UId,
    UnitaryEquiv,
    UnitaryExpr,
    UTensor,
    Var,
    all_names,
    alpha_eq,
    binders_of_child,
    canonical,
    children,
    free_vars,
    fresh,
    positions,
    prim,
    rename,
    replace_at,
    size,
    subst,
    subterm,
    with_children,
)
from .typecheck import ErrorKind, TypeCheckError, infer_type

log = logging.getLogger(__name__)

FORWARD = "forward"
BACKWARD = "backward"


# ---------------------------------------------------------------------------
# Typing sites


@dataclass(frozen=True)
class Site:
    """Variables in scope at a node and the node's type."""

    scope: Mapping[str, QType]
    type: QType

    def context_of(self, e: QExp) -> dict[str, QType]:
        return {x: self.scope[x] for x in free_vars(e)}


def annotate(ctx: Mapping[str, QType], e: QExp) -> dict[Path, Site]:
    """Typing site of every position of a well-typed term."""
    out: dict[Path, Site] = {}

    def go(scope: dict[str, QType], t: QExp, expected: QType | None, path: Path) -> QType:
        if isinstance(t, Var):
            ty = scope[t.x]
        elif isinstance(t, Put):
            ty = Lower(t.alpha)
        elif isinstance(t, Pair):
            el = er = None
            if isinstance(expected, Tensor):
                el, er = expected.l, expected.r
            ty = Tensor(go(scope, t.e1, el, path + (0,)), go(scope, t.e2, er, path + (1,)))
        elif isinstance(t, Let):
            s = go(scope, t.e, None, path + (0,))
            ty = go({**scope, t.x: s}, t.body, expected, path + (1,))
        elif isinstance(t, LetPair):
            s = go(scope, t.e, None, path + (0,))
            assert isinstance(s, Tensor)
            ty = go({**scope, t.x1: s.l, t.x2: s.r}, t.body, expected, path + (1,))
        elif isinstance(t, Inj):
            ty = t.ty if t.ty is not None else expected  # type: ignore[assignment]
            assert isinstance(ty, Oplus)
            go(scope, t.e, ty.l if t.i == 1 else ty.r, path + (0,))
        elif isinstance(t, Case):
            s = go(scope, t.e, None, path + (0,))
            assert isinstance(s, Oplus)
            ty = go({**scope, t.x1: s.l}, t.e1, expected, path + (1,))
            go({**scope, t.x2: s.r}, t.e2, ty, path + (2,))
        elif isinstance(t, LetBang):
            go(scope, t.e, None, path + (0,))
            want = t.ty if t.ty is not None else expected
            for k, b in enumerate(t.branches):
                got = go(scope, b, want, path + (1 + k,))
                want = want if want is not None else got
            assert want is not None
            ty = want
        elif isinstance(t, UApp):
            go(scope, t.e, t.u.src, path + (0,))
            ty = t.u.dst
        else:
            raise TypeError(t)
        out[path] = Site(scope, ty)
        return ty

    go(dict(ctx), e, None, ())
    return out


# ---------------------------------------------------------------------------
# Rules

Rewriter = Callable[[QExp, Site, set[str]], list[QExp]]


@dataclass(frozen=True)
class RewriteRule:
    name: str
    family: str
    lhs: str
    rhs: str
    forward: Rewriter = field(repr=False, compare=False)
    backward: Rewriter | None = field(default=None, repr=False, compare=False)
    search_backward: bool = False
    """Whether the search may use ``backward`` (only for non-expanding inverses)."""


def _supply(avoid: set[str], stem: str) -> Callable[[str], str]:
    ns = NameSupply(avoid, stem=stem)
    return ns


# --- beta ------------------------------------------------------------------


def _beta_let(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if isinstance(n, Let):
        return [subst(n.body, {n.x: n.e})]
    return []


def _beta_tensor(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if isinstance(n, LetPair) and isinstance(n.e, Pair) and n.x1 != n.x2:
        return [subst(n.body, {n.x1: n.e.e1, n.x2: n.e.e2})]
    return []


def _beta_oplus(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if isinstance(n, Case) and isinstance(n.e, Inj):
        if n.e.i == 1:
            return [subst(n.e1, {n.x1: n.e.e})]
        return [subst(n.e2, {n.x2: n.e.e})]
    return []


def _beta_lower(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if isinstance(n, LetBang) and isinstance(n.e, Put):
        return [n.branches[n.e.a]]
    return []


# --- eta -------------------------------------------------------------------


def _eta_tensor(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if (
        isinstance(n, LetPair)
        and n.x1 != n.x2
        and n.body == Pair(Var(n.x1), Var(n.x2))
    ):
        return [n.e]
    return []


def _eta_tensor_back(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if not isinstance(s.type, Tensor):
        return []
    a = fresh("p", avoid)
    b = fresh("p", avoid | {a})
    return [LetPair(a, b, n, Pair(Var(a), Var(b)))]


def _empty(t: QType) -> bool:
    try:
        return dim(t) == 0
    except TypeError:
        return False


def discard_order(ctx: Mapping[str, QType]) -> list[str]:
    """Discard order, innermost first: empty-typed variables, then the rest by descending name."""
    names = sorted(ctx, reverse=True)
    return [x for x in names if _empty(ctx[x])] + [x for x in names if not _empty(ctx[x])]


def discard(x: str, sigma: QType, k: QExp, avoid: set[str], result: QType = Lower(UNIT)) -> QExp:
    """Consume variable ``x : sigma`` by measurement, then continue as ``k``."""
    if isinstance(sigma, Lower):
        n = sigma.base.card
        return LetBang(Var(x), (k,) * n, result if n == 0 else None)
    if isinstance(sigma, Tensor):
        a = fresh(x + "_l", avoid)
        b = fresh(x + "_r", avoid | {a})
        first, second = ((a, sigma.l), (b, sigma.r)) if _empty(sigma.l) else ((b, sigma.r), (a, sigma.l))
        # an empty measurement drops its continuation, so it goes innermost
        inner = discard(*second, discard(*first, k, avoid | {a, b}, result), avoid | {a, b}, result)
        return LetPair(a, b, Var(x), inner)
    if isinstance(sigma, Oplus):
        a = fresh(x + "_l", avoid)
        b = fresh(x + "_r", avoid | {a})
        return Case(
            Var(x),
            a,
            discard(a, sigma.l, k, avoid | {a, b}, result),
            b,
            discard(b, sigma.r, k, avoid | {a, b}, result),
        )
    raise TypeError(f"cannot discard a variable of open type {sigma}")


def unit_canon(ctx: Mapping[str, QType], avoid: Iterable[str] = ()) -> QExp:
    """Canonical term of type ``Lower ()`` in ``ctx``: discard every variable in name order, then ``put ()``."""
    names = set(avoid) | set(ctx)
    out: QExp = Put(UNIT, 0)
    for x in discard_order(ctx):
        out = discard(x, ctx[x], out, names)
    return out


def _eta_unit(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if s.type != Lower(UNIT) or isinstance(n, Var):
        return []
    c = unit_canon(s.context_of(n), avoid)
    if alpha_eq(c, n):
        return []
    return [c]


# --- commuting conversions --------------------------------------------------


def _branch_position(n: QExp, i: int) -> bool:
    return (isinstance(n, Case) and i in (1, 2)) or (isinstance(n, LetBang) and i >= 1)


def _lift(kind: type) -> Rewriter:
    """Move an elimination form of class ``kind`` out of a non-branch child of ``n``."""

    def rw(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
        out: list[QExp] = []
        cs = children(n)
        for i, c in enumerate(cs):
            if not isinstance(c, kind) or _branch_position(n, i):
                continue
            bound_here = set(binders_of_child(n, i))
            if free_vars(c.e) & bound_here:  # type: ignore[attr-defined]
                continue
            names = avoid | all_names(n)

            def plug(body: QExp) -> QExp:
                new_cs = list(cs)
                new_cs[i] = body
                return with_children(n, new_cs)

            if isinstance(c, Let):
                y = fresh(c.x, names)
                out.append(Let(y, c.e, plug(rename(c.body, {c.x: y}))))
            elif isinstance(c, LetPair):
                y1 = fresh(c.x1, names)
                y2 = fresh(c.x2, names | {y1})
                out.append(LetPair(y1, y2, c.e, plug(rename(c.body, {c.x1: y1, c.x2: y2}))))
            elif isinstance(c, Case):
                y1 = fresh(c.x1, names)
                y2 = fresh(c.x2, names | {y1})
                out.append(
                    Case(c.e, y1, plug(rename(c.e1, {c.x1: y1})), y2, plug(rename(c.e2, {c.x2: y2})))
                )
            elif isinstance(c, LetBang):
                out.append(LetBang(c.e, tuple(plug(b) for b in c.branches), None if c.branches else s.type))
        return out

    return rw


def _discard_collapse(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if (
        isinstance(n, LetBang)
        and len(n.branches) == 1
        and isinstance(n.e, LetBang)
        and n.e.branches
        and all(b == Put(UNIT, 0) for b in n.e.branches)
    ):
        return [LetBang(n.e.e, (n.branches[0],) * len(n.e.branches))]
    return []


def _discard_factor(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if isinstance(n, LetBang) and len(n.branches) >= 2 and all(alpha_eq(b, n.branches[0]) for b in n.branches):
        inner = LetBang(n.e, (Put(UNIT, 0),) * len(n.branches))
        return [LetBang(inner, (n.branches[0],))]
    return []


# --- structural ---------------------------------------------------------------


def _u_tensor_intro(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if isinstance(n, UApp) and isinstance(n.u, UTensor) and isinstance(n.e, Pair):
        return [Pair(UApp(n.u.u, n.e.e1), UApp(n.u.v, n.e.e2))]
    return []


def _u_tensor_intro_back(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if isinstance(n, Pair) and isinstance(n.e1, UApp) and isinstance(n.e2, UApp):
        return [UApp(UTensor(n.e1.u, n.e2.u), Pair(n.e1.e, n.e2.e))]
    return []


def _u_tensor_elim(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if isinstance(n, LetPair) and isinstance(n.e, UApp) and isinstance(n.e.u, UTensor) and n.x1 != n.x2:
        names = avoid | all_names(n)
        y1 = fresh(n.x1, names)
        y2 = fresh(n.x2, names | {y1})
        body = subst(n.body, {n.x1: UApp(n.e.u.u, Var(y1)), n.x2: UApp(n.e.u.v, Var(y2))})
        return [LetPair(y1, y2, n.e.e, body)]
    return []


def _u_tensor_comm(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if isinstance(n, UApp) and isinstance(n.e, LetPair):
        lp = n.e
        return [LetPair(lp.x1, lp.x2, lp.e, UApp(n.u, lp.body))]
    return []


def _u_tensor_comm_back(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if isinstance(n, LetPair) and isinstance(n.body, UApp):
        return [UApp(n.body.u, LetPair(n.x1, n.x2, n.e, n.body.e))]
    return []


def _u_oplus_intro(i: int) -> Rewriter:
    def rw(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
        if isinstance(n, UApp) and isinstance(n.u, UDirectSum) and isinstance(n.e, Inj) and n.e.i == i:
            u = n.u.u if i == 1 else n.u.v
            return [Inj(i, UApp(u, n.e.e), Oplus(n.u.u.dst, n.u.v.dst))]
        return []

    return rw


def _u_oplus_elim(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if isinstance(n, Case) and isinstance(n.e, UApp) and isinstance(n.e.u, UDirectSum):
        names = avoid | all_names(n)
        y1 = fresh(n.x1, names)
        y2 = fresh(n.x2, names | {y1})
        u1, u2 = n.e.u.u, n.e.u.v
        return [
            Case(
                n.e.e,
                y1,
                subst(n.e1, {n.x1: UApp(u1, Var(y1))}),
                y2,
                subst(n.e2, {n.x2: UApp(u2, Var(y2))}),
            )
        ]
    return []


def _u_oplus_comm(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if isinstance(n, UApp) and isinstance(n.e, Case):
        c = n.e
        return [Case(c.e, c.x1, UApp(n.u, c.e1), c.x2, UApp(n.u, c.e2))]
    return []


def _u_oplus_comm_back(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if isinstance(n, Case) and isinstance(n.e1, UApp) and isinstance(n.e2, UApp) and n.e1.u == n.e2.u:
        return [UApp(n.e1.u, Case(n.e, n.x1, n.e1.e, n.x2, n.e2.e))]
    return []


def _u_lower_comm(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if isinstance(n, UApp) and isinstance(n.e, LetBang):
        lb = n.e
        return [LetBang(lb.e, tuple(UApp(n.u, b) for b in lb.branches), None if lb.branches else n.u.dst)]
    return []


def _u_lower_comm_back(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if (
        isinstance(n, LetBang)
        and n.branches
        and all(isinstance(b, UApp) and b.u == n.branches[0].u for b in n.branches)  # type: ignore[attr-defined]
    ):
        u = n.branches[0].u  # type: ignore[attr-defined]
        return [UApp(u, LetBang(n.e, tuple(b.e for b in n.branches)))]  # type: ignore[attr-defined]
    return []


def _u_lower_elim(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if not (isinstance(n, LetBang) and isinstance(n.e, UApp) and isinstance(n.e.u.src, Lower)):
        return []
    bs = n.branches
    if bs and not all(alpha_eq(b, bs[0]) for b in bs):
        return []
    k = n.e.u.src.base.card
    if bs:
        return [LetBang(n.e.e, (bs[0],) * k, s.type if k == 0 else None)]
    # an empty family can only be rebuilt when the source is empty too
    return [LetBang(n.e.e, (), s.type)] if k == 0 else []


# --- groupoid -----------------------------------------------------------------


def _u_compose(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if isinstance(n, UApp) and isinstance(n.e, UApp):
        return [UApp(UCompose(n.u, n.e.u), n.e.e)]
    return []


def _u_compose_back(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if isinstance(n, UApp) and isinstance(n.u, UCompose):
        return [UApp(n.u.v, UApp(n.u.u, n.e))]
    return []


def _u_id(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if isinstance(n, UApp) and isinstance(n.u, UId):
        return [n.e]
    return []


def _u_id_back(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    return [UApp(UId(s.type), n)]


def _u_dagger(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if isinstance(n, UApp) and isinstance(n.u, UAdjoint) and isinstance(n.e, UApp) and n.e.u == n.u.u:
        return [n.e.e]
    return []


# --- unfolding of named gates -------------------------------------------------


def distr_unitary(beta=BOOL) -> FromEquiv:  # type: ignore[no-untyped-def]
    """``Qubit ⊗ Lower β → Lower β ⊕ Lower β``, ``(b, x) ↦ if b then inr x else inl x``."""
    return FromEquiv(distr_equiv(TVar("X")), TypeAssignment.of(X=beta))


def gate_expansion(name: str) -> UnitaryExpr:
    """A unitary expression with the same matrix as the named gate, built from equivalences."""
    if name == "X":
        return FromEquiv(LowerIso(BOOL, BOOL, (1, 0)))
    if name == "SWAP":
        return FromEquiv(SwapTensor(TVar("X"), TVar("Y")), TypeAssignment.of(X=BOOL, Y=BOOL))
    if name == "CNOT":
        d = distr_unitary(BOOL)
        return UCompose(UAdjoint(d), UCompose(UDirectSum(UId(QUBIT), prim("X")), d))
    raise KeyError(name)


UNFOLDABLE = ("X", "SWAP", "CNOT")


def _is_named(u: UnitaryExpr, name: str) -> bool:
    if not (isinstance(u, Primitive) and u.name == name):
        return False
    ref = prim(name)
    return u.src == ref.src and np.allclose(u.matrix, ref.matrix)


def _u_matrix(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if isinstance(n, UApp):
        for name in UNFOLDABLE:
            if _is_named(n.u, name):
                return [UApp(gate_expansion(name), n.e)]
    return []


def _u_matrix_back(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if isinstance(n, UApp):
        for name in UNFOLDABLE:
            if n.u == gate_expansion(name):
                return [UApp(prim(name), n.e)]
    return []


# --- partial initialization and measurement ----------------------------------


def _as_equiv(u: UnitaryExpr) -> tuple[UnitaryEquiv, TypeAssignment] | None:
    if isinstance(u, FromEquiv):
        return u.f, u.m
    if isinstance(u, UAdjoint) and isinstance(u.u, FromEquiv):
        return Symm(u.u.f), u.u.m
    return None


def _axiom20_intro(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if not isinstance(n, UApp):
        return []
    fm = _as_equiv(n.u)
    if fm is None:
        return []
    f, m = fm
    supply = _supply(avoid | all_names(n), "h")
    holes: dict[str, QExp] = {}
    b = unify_init(f.src, n.e, holes, supply)
    if b is None:
        return []
    try:
        image = apply_equiv(f, b)
    except ValueError:
        return []
    return [subst(partial_init(f.dst, image, m), holes)]


def _axiom20_elim(n: QExp, s: Site, avoid: set[str]) -> list[QExp]:
    if not isinstance(n, (LetPair, Case, LetBang)):
        return []
    scrut = n.e
    if not isinstance(scrut, UApp):
        return []
    fm = _as_equiv(scrut.u)
    if fm is None:
        return []
    f, m = fm
    parsed = unify_match(f.dst, n)
    if parsed is None or parsed[0] != scrut:
        return []
    table = parsed[1]
    supply = _supply(avoid | all_names(n), "w")

    def branch(b: BasisValue) -> QExp:
        target = apply_equiv(f, b)
        for key, body in table:
            r = match_key(key, target)
            if r is not None:
                return rename(body, {str(k): str(v) for k, v in r.items()})
        raise ValueError(f"no branch for {target}")

    try:
        return [partial_match(f.src, scrut.e, branch, m, supply, s.type)]
    except ValueError:
        return []


# ---------------------------------------------------------------------------
# Catalog


def rule_catalog() -> tuple[RewriteRule, ...]:
    R = RewriteRule
    return (
        R("β-LET", "beta", "let x := e in e'", "e'{e/x}", _beta_let),
        R("β-⊗", "beta", "let (x1, x2) := (e1, e2) in e'", "e'{e1/x1, e2/x2}", _beta_tensor),
        R("β-⊕", "beta", "case ιi e of (ι1 x1 → e1 | ι2 x2 → e2)", "ei{e/xi}", _beta_oplus),
        R("β-LOWER", "beta", "put a >! f", "f a", _beta_lower),
        R("η-⊗", "eta", "let (x1, x2) := e in (x1, x2)", "e", _eta_tensor, _eta_tensor_back),
        R("η-()", "eta", "e : Lower ()", "discard Γ in put ()", _eta_unit),
        R("CC-LET", "cc", "e0{let y := e in e'/x}", "let y := e in e0{e'/x}", _lift(Let)),
        R("CC-⊗", "cc", "e0{let (y1, y2) := e in e'/x}", "let (y1, y2) := e in e0{e'/x}", _lift(LetPair)),
        R(
            "CC-⊕",
            "cc",
            "e0{case e of (ι1 y1 → e1 | ι2 y2 → e2)/x}",
            "case e of (ι1 y1 → e0{e1/x} | ι2 y2 → e0{e2/x})",
            _lift(Case),
        ),
        R("CC-LOWER", "cc", "e0{e >! f/x}", "e >! λa. e0{f a/x}", _lift(LetBang)),
        R(
            "U-⊗-INTRO",
            "structural",
            "(U1 ⊗ U2) # (e1, e2)",
            "(U1 # e1, U2 # e2)",
            _u_tensor_intro,
            _u_tensor_intro_back,
            True,
        ),
        R(
            "U-⊗-ELIM",
            "structural",
            "let (x1, x2) := (U1 ⊗ U2) # e in e'",
            "let (y1, y2) := e in e'{U1 # y1/x1, U2 # y2/x2}",
            _u_tensor_elim,
        ),
        R(
            "U-⊗-COMM",
            "structural",
            "U # (let (x1, x2) := e in e')",
            "let (x1, x2) := e in U # e'",
            _u_tensor_comm,
            _u_tensor_comm_back,
            True,
        ),
        R("U-⊕-INTRO₁", "structural", "(U1 ⊕ U2) # (ι1 e)", "ι1 (U1 # e)", _u_oplus_intro(1)),
        R("U-⊕-INTRO₂", "structural", "(U1 ⊕ U2) # (ι2 e)", "ι2 (U2 # e)", _u_oplus_intro(2)),
        R(
            "U-⊕-ELIM",
            "structural",
            "case (U1 ⊕ U2) # e of (ι1 x1 → e1 | ι2 x2 → e2)",
            "case e of (ι1 y1 → e1{U1 # y1/x1} | ι2 y2 → e2{U2 # y2/x2})",
            _u_oplus_elim,
        ),
        R(
            "U-⊕-COMM",
            "structural",
            "U # (case e of (ι1 x1 → e1 | ι2 x2 → e2))",
            "case e of (ι1 x1 → U # e1 | ι2 x2 → U # e2)",
            _u_oplus_comm,
            _u_oplus_comm_back,
            True,
        ),
        R(
            "U-LOWER-COMM",
            "structural",
            "U # (e >! f)",
            "e >! λx. U # (f x)",
            _u_lower_comm,
            _u_lower_comm_back,
            True,
        ),
        R("U-LOWER-ELIM", "structural", "U # e >! λ_. e'", "e >! λ_. e'", _u_lower_elim),
        R("U-COMPOSE", "groupoid", "U # (V # e)", "(U ∘ V) # e", _u_compose, _u_compose_back, True),
        R("U-I", "groupoid", "I # e", "e", _u_id, _u_id_back),
        R("U-†", "groupoid", "U† # U # e", "e", _u_dagger),
        R("AXIOM20-INTRO", "axiom20", "[f]^m # init_σ b", "init_τ (f b)", _axiom20_intro),
        R("AXIOM20-ELIM", "axiom20", "match_τ ([f]^m # e) with bs", "match_σ e with bs ∘ f", _axiom20_elim),
        R("U-MATRIX", "helper", "G # e  (G ∈ X, SWAP, CNOT)", "G' # e  (G' built from equivalences)", _u_matrix, _u_matrix_back, True),
        R(
            "CC-LOWER-DISCARD",
            "helper",
            "(e >! λ_. put ()) >! λ_. e'",
            "e >! λ_. e'",
            _discard_collapse,
            _discard_factor,
            True,
        ),
    )


def rule_by_name(name: str) -> RewriteRule:
    for r in rule_catalog():
        if r.name == name:
            return r
    raise KeyError(name)


# ---------------------------------------------------------------------------
# Application


class RuleError(RuntimeError):
    """A rule produced an ill-typed term: a bug in the rule, never a user error."""


def _names(ctx: Mapping[str, QType], e: QExp) -> set[str]:
    return set(ctx) | all_names(e)


def rewrites_at(
    rule: RewriteRule,
    e: QExp,
    pos: Path,
    direction: str = FORWARD,
    ctx: Mapping[str, QType] | None = None,
    sites: Mapping[Path, Site] | None = None,
) -> list[QExp]:
    """All results of applying ``rule`` at ``pos`` (whole terms)."""
    ctx = {} if ctx is None else ctx
    try:
        node = subterm(e, pos)
    except IndexError:
        return []
    if sites is None:
        sites = annotate(ctx, e)
    site = sites[pos]
    fn = rule.forward if direction == FORWARD else rule.backward
    if fn is None:
        return []
    return [replace_at(e, pos, r) for r in fn(node, site, _names(ctx, e))]


def apply_rule(
    rule: RewriteRule | str,
    e: QExp,
    pos: Path = (),
    direction: str = FORWARD,
    ctx: Mapping[str, QType] | None = None,
) -> QExp | None:
    """Apply ``rule`` at ``pos``; ``None`` if it does not match there.

    The result is type-checked against the input; a mismatch raises
    :class:`RuleError`.
    """
    if isinstance(rule, str):
        rule = rule_by_name(rule)
    ctx = {} if ctx is None else dict(ctx)
    tau = infer_type(ctx, e)
    results = rewrites_at(rule, e, pos, direction, ctx)
    if not results:
        return None
    out = results[0]
    try:
        got = infer_type(ctx, out, tau)
    except TypeCheckError as err:
        raise RuleError(f"{rule.name} produced an ill-typed term: {err}") from err
    if got != tau:
        raise RuleError(f"{rule.name} changed the type from {tau} to {got}")
    return out


# ---------------------------------------------------------------------------
# Derivations


@dataclass(frozen=True)
class Step:
    rule: str
    path: Path
    direction: str
    result: QExp


@dataclass(frozen=True)
class Derivation:
    start: QExp
    steps: tuple[Step, ...]

    @property
    def end(self) -> QExp:
        return self.steps[-1].result if self.steps else self.start

    def __len__(self) -> int:
        return len(self.steps)

    def replay(self, ctx: Mapping[str, QType]) -> bool:
        """Re-check every step; each must be a genuine rule application up to renaming."""
        cur = self.start
        for st in self.steps:
            if not step_valid(rule_by_name(st.rule), cur, st, ctx):
                return False
            cur = st.result
        return True

    def format(self, printer: Callable[[QExp], str] = str) -> str:
        lines = [f"0. {printer(self.start)}"]
        for k, st in enumerate(self.steps, start=1):
            where = "root" if not st.path else ".".join(map(str, st.path))
            lines.append(f"{k}. [{st.rule} {st.direction} at {where}] {printer(st.result)}")
        return "\n".join(lines)


def step_valid(rule: RewriteRule, cur: QExp, st: Step, ctx: Mapping[str, QType]) -> bool:
    fwd = rewrites_at(rule, cur, st.path, st.direction, ctx)
    if any(alpha_eq(r, st.result) for r in fwd):
        return True
    if st.direction == BACKWARD:
        back = rewrites_at(rule, st.result, st.path, FORWARD, ctx)
        return any(alpha_eq(r, cur) for r in back)
    back = rewrites_at(rule, st.result, st.path, BACKWARD, ctx)
    return any(alpha_eq(r, cur) for r in back)


def _flip(direction: str) -> str:
    return BACKWARD if direction == FORWARD else FORWARD


class SearchLimit(Exception):
    pass


def neighbours(
    e: QExp,
    ctx: Mapping[str, QType],
    rules: Sequence[RewriteRule],
    size_cap: int = 200,
) -> list[tuple[str, Path, str, QExp]]:
    sites = annotate(ctx, e)
    avoid = _names(ctx, e)
    out = []
    for path, node in positions(e):
        site = sites[path]
        for r in rules:
            moves = [(FORWARD, r.forward)]
            if r.search_backward and r.backward is not None:
                moves.append((BACKWARD, r.backward))
            for d, fn in moves:
                for res in fn(node, site, avoid):
                    whole = replace_at(e, path, res)
                    if size(whole) <= size_cap:
                        out.append((r.name, path, d, whole))
    return out


def prove_equiv(
    e1: QExp,
    e2: QExp,
    ctx: Mapping[str, QType],
    depth: int = 8,
    rules: Sequence[RewriteRule] | None = None,
    exclude: Iterable[str] = (),
    frontier_cap: int = 100_000,
    size_cap: int = 200,
    referee: bool = True,
) -> Derivation | None:
    """Search for a derivation ``e1 ≈ e2`` of at most ``depth`` steps.

    ``None`` means the bounded search found nothing.  Every returned
    derivation has been replayed and, with ``referee``, each intermediate term
    has been compared semantically with ``e1``.
    """
    ctx = dict(ctx)
    tau = infer_type(ctx, e1)
    tau2 = infer_type(ctx, e2, tau)
    if tau != tau2:
        raise TypeCheckError(ErrorKind.TypeMismatch, f"terms have types {tau} and {tau2}")
    skip = set(exclude)
    rules = [r for r in (rules if rules is not None else rule_catalog()) if r.name not in skip]

    k1, k2 = canonical(e1), canonical(e2)
    if k1 == k2:
        return Derivation(e1, ())
    parents: list[dict[QExp, tuple[QExp, Step] | None]] = [{k1: None}, {k2: None}]
    terms: list[dict[QExp, QExp]] = [{k1: e1}, {k2: e2}]
    frontier: list[list[QExp]] = [[k1], [k2]]
    # Rules without a searchable inverse make the graph directed, so each side
    # may need the whole budget on its own; a meet is accepted only if the
    # combined length fits.
    dist: list[dict[QExp, int]] = [{k1: 0}, {k2: 0}]
    depths = [0, 0]
    meet: QExp | None = None
    while meet is None:
        live = [s for s in (0, 1) if frontier[s] and depths[s] < depth]
        if not live:
            return None
        side = min(live, key=lambda s: (len(frontier[s]), s))
        other = 1 - side
        new: list[QExp] = []
        for key in frontier[side]:
            for rule, path, d, res in neighbours(terms[side][key], ctx, rules, size_cap):
                rk = canonical(res)
                if rk in parents[side]:
                    continue
                parents[side][rk] = (key, Step(rule, path, d, res))
                terms[side][rk] = res
                dist[side][rk] = depths[side] + 1
                if rk in dist[other] and dist[side][rk] + dist[other][rk] <= depth:
                    meet = rk
                    break
                new.append(rk)
                if len(dist[0]) + len(dist[1]) > frontier_cap:
                    log.info("search stopped at the frontier cap (%d terms)", frontier_cap)
                    return None
            if meet is not None:
                break
        frontier[side] = new
        depths[side] += 1
        log.debug("side %d depth %d frontier %d", side, depths[side], len(new))
    if meet is None:
        return None

    left: list[Step] = []
    k = meet
    while parents[0][k] is not None:
        prev, st = parents[0][k]  # type: ignore[misc]
        left.append(st)
        k = prev
    left.reverse()
    right: list[Step] = []
    k = meet
    while parents[1][k] is not None:
        prev, st = parents[1][k]  # type: ignore[misc]
        right.append(Step(st.rule, st.path, _flip(st.direction), terms[1][prev]))
        k = prev
    deriv = Derivation(e1, tuple(left + right))
    if not deriv.replay(ctx):
        raise RuleError("derivation failed to replay")
    if referee:
        for st in deriv.steps:
            if not equiv_check(e1, st.result, ctx):
                raise RuleError(f"semantic referee rejected a step of {st.rule}")
    return deriv


# ---------------------------------------------------------------------------
# Derived equations


@dataclass(frozen=True)
class DerivedRule:
    name: str
    lhs: QExp
    rhs: QExp
    ctx: Mapping[str, QType]
    depth: int
    exclude: tuple[str, ...] = ()
    note: str = ""

    def as_triple(self) -> tuple[str, QExp, QExp]:
        return self.name, self.lhs, self.rhs


def derived_rule_suite() -> tuple[DerivedRule, ...]:
    q, r, p = Var("q"), Var("r"), Var("p")
    H, S, T, X = prim("H"), prim("S"), prim("T"), prim("X")
    qq = Tensor(QUBIT, QUBIT)
    d = distr_unitary(BOOL)
    sum_ty = Oplus(QUBIT, QUBIT)
    e1, e2 = Var("r"), UApp(H, Var("q"))
    cnot = prim("CNOT")
    out = [
        DerivedRule("U-COMPOSE", UApp(H, UApp(S, q)), UApp(UCompose(H, S), q), {"q": QUBIT}, 1),
        DerivedRule("U-I", UApp(UId(QUBIT), UApp(H, q)), UApp(H, q), {"q": QUBIT}, 1),
        DerivedRule("U-†", UApp(UAdjoint(T), UApp(T, q)), q, {"q": QUBIT}, 1),
        DerivedRule(
            "DISCARD-AFTER-UNITARY",
            LetBang(UApp(H, q), (r, r)),
            LetBang(q, (r, r)),
            {"q": QUBIT, "r": QUBIT},
            4,
            exclude=("U-LOWER-ELIM",),
            note="measuring U # e and ignoring the outcome, via η-()",
        ),
        DerivedRule("X-INTRO-false", UApp(X, Put(BOOL, 0)), Put(BOOL, 1), {}, 2),
        DerivedRule("X-INTRO-true", UApp(X, Put(BOOL, 1)), Put(BOOL, 0), {}, 2),
        DerivedRule(
            "X-ELIM",
            LetBang(UApp(X, q), (r, UApp(H, r))),
            LetBang(q, (UApp(H, r), r)),
            {"q": QUBIT, "r": QUBIT},
            2,
        ),
        DerivedRule(
            "SWAP-INTRO",
            UApp(prim("SWAP"), Pair(e1, e2)),
            Pair(e2, e1),
            {"q": QUBIT, "r": QUBIT},
            2,
        ),
        DerivedRule(
            "SWAP-ELIM",
            LetPair("y", "x", UApp(prim("SWAP"), p), Pair(Var("x"), UApp(H, Var("y")))),
            LetPair("x", "y", p, Pair(Var("x"), UApp(H, Var("y")))),
            {"p": qq},
            2,
        ),
        DerivedRule("DISTR-INTRO-false", UApp(d, Pair(Put(BOOL, 0), q)), Inj(1, q, sum_ty), {"q": QUBIT}, 1),
        DerivedRule("DISTR-INTRO-true", UApp(d, Pair(Put(BOOL, 1), q)), Inj(2, q, sum_ty), {"q": QUBIT}, 1),
        DerivedRule(
            "DISTR-ELIM",
            Case(UApp(d, p), "z1", UApp(H, Var("z1")), "z2", UApp(S, Var("z2"))),
            LetPair("b", "y", p, LetBang(Var("b"), (UApp(H, Var("y")), UApp(S, Var("y"))))),
            {"p": qq},
            1,
        ),
        DerivedRule(
            "CNOT-INTRO-false",
            UApp(cnot, Pair(Put(BOOL, 0), UApp(H, q))),
            Pair(Put(BOOL, 0), UApp(H, q)),
            {"q": QUBIT},
            7,
        ),
        DerivedRule(
            "CNOT-INTRO-true",
            UApp(cnot, Pair(Put(BOOL, 1), UApp(H, q))),
            Pair(Put(BOOL, 1), UApp(X, UApp(H, q))),
            {"q": QUBIT},
            6,
        ),
        DerivedRule(
            "CNOT-ELIM",
            LetPair("c", "y", UApp(cnot, p), LetBang(Var("c"), (UApp(H, Var("y")), UApp(H, Var("y"))))),
            LetPair("c", "y", p, LetBang(Var("c"), (UApp(H, Var("y")), UApp(H, UApp(X, Var("y")))))),
            {"p": qq},
            7,
        ),
    ]
    return tuple(out)
