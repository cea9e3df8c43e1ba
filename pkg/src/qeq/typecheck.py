"""Linear type checking.

Every variable of the context must be consumed exactly once.  Contexts are
split between subterms according to their free variables, so inference is
syntax directed.  ``infer_type`` raises :class:`TypeCheckError`; ``infer`` wraps the
outcome in a :class:`TypingResult`.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass
from typing import Iterable, Mapping

from .qtypes import Lower, Oplus, QType, Tensor
from .syntax import (
    Case,
    Inj,
    Let,
    LetBang,
    LetPair,
    Pair,
    Put,
    QExp,
    UApp,
    Var,
    free_vars,
)

Ctx = Mapping[str, QType]


class ErrorKind(enum.Enum):
    UnboundVar = "UnboundVar"
    DuplicateUse = "DuplicateUse"
    UnusedVar = "UnusedVar"
    TypeMismatch = "TypeMismatch"
    ContextOverlap = "ContextOverlap"
    BranchMismatch = "BranchMismatch"


class TypeCheckError(Exception):
    def __init__(self, kind: ErrorKind, detail: str) -> None:
        super().__init__(f"{kind.value}: {detail}")
        self.kind = kind
        self.detail = detail


@dataclass(frozen=True)
class TypingResult:
    type: QType | None = None
    kind: ErrorKind | None = None
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.kind is None


def merge(g1: Ctx, g2: Ctx) -> dict[str, QType]:
    overlap = set(g1) & set(g2)
    if overlap:
        raise TypeCheckError(ErrorKind.ContextOverlap, f"variables {sorted(overlap)} on both sides")
    out = dict(g1)
    out.update(g2)
    return out


def split_context(ctx: Ctx, fv1: Iterable[str], fv2: Iterable[str]) -> tuple[dict[str, QType], dict[str, QType]]:
    """Restrict ``ctx`` to two disjoint variable sets covering its domain."""
    s1, s2 = set(fv1), set(fv2)
    both = s1 & s2
    if both:
        raise TypeCheckError(ErrorKind.ContextOverlap, f"{sorted(both)} required on both sides of a split")
    missing = (s1 | s2) - set(ctx)
    if missing:
        raise TypeCheckError(ErrorKind.UnboundVar, f"{sorted(missing)} not in context")
    unused = set(ctx) - (s1 | s2)
    if unused:
        raise TypeCheckError(ErrorKind.UnusedVar, f"{sorted(unused)} never used")
    return {x: ctx[x] for x in ctx if x in s1}, {x: ctx[x] for x in ctx if x in s2}


@functools.lru_cache(maxsize=65536)
def absorbs(e: QExp) -> bool:
    """Whether ``e`` can consume variables it never mentions.

    A measurement with no branches (of a ``Lower Void`` value) constrains
    nothing about the context of its missing branches; any term all of whose
    paths end in one inherits that slack.
    """
    if isinstance(e, (Var, Put)):
        return False
    if isinstance(e, Pair):
        return absorbs(e.e1) or absorbs(e.e2)
    if isinstance(e, (Let, LetPair)):
        return absorbs(e.e) or absorbs(e.body)
    if isinstance(e, (Inj, UApp)):
        return absorbs(e.e)
    if isinstance(e, Case):
        return absorbs(e.e) or (absorbs(e.e1) and absorbs(e.e2))
    if isinstance(e, LetBang):
        return not e.branches or absorbs(e.e) or all(absorbs(b) for b in e.branches)
    raise TypeError(f"not an expression: {e!r}")


def branches_absorb(e: Case | LetBang) -> bool:
    if isinstance(e, Case):
        return absorbs(e.e1) and absorbs(e.e2)
    return all(absorbs(b) for b in e.branches)


def split_absorb(e: QExp) -> tuple[bool, bool]:
    """Absorption of the two sides a compound term splits its context into."""
    if isinstance(e, Pair):
        return absorbs(e.e1), absorbs(e.e2)
    if isinstance(e, (Let, LetPair)):
        return absorbs(e.e), absorbs(e.body)
    if isinstance(e, (Case, LetBang)):
        return absorbs(e.e), branches_absorb(e)
    raise TypeError(e)


def leftovers_first(e: QExp) -> bool:
    """Unmentioned variables go to the second side of a split unless only the first absorbs."""
    a1, a2 = split_absorb(e)
    return a1 and not a2


def _split(
    ctx: Ctx, fv1: frozenset[str], fv2: frozenset[str], whole: QExp | None = None
) -> tuple[dict[str, QType], dict[str, QType]]:
    """Split for ``infer``: an overlap here means a variable used twice."""
    both = fv1 & fv2
    if both:
        raise TypeCheckError(ErrorKind.DuplicateUse, f"{sorted(both)} used more than once")
    missing = sorted((fv1 | fv2) - set(ctx))
    if missing:
        raise TypeCheckError(ErrorKind.UnboundVar, f"{missing[0]} is not bound")
    unused = frozenset(ctx) - (fv1 | fv2)
    if unused and whole is not None:
        a1, a2 = split_absorb(whole)
        if a2:
            fv2 = fv2 | unused
        elif a1:
            fv1 = fv1 | unused
    unused = frozenset(ctx) - (fv1 | fv2)
    if unused:
        raise TypeCheckError(ErrorKind.UnusedVar, f"{sorted(unused)[0]} is never used")
    return {x: ctx[x] for x in ctx if x in fv1}, {x: ctx[x] for x in ctx if x in fv2}


def _extend(ctx: Ctx, x: str, t: QType) -> dict[str, QType]:
    if x in ctx:
        raise TypeCheckError(ErrorKind.ContextOverlap, f"binder {x} shadows a variable of the same context")
    out = dict(ctx)
    out[x] = t
    return out


def infer_type(ctx: Ctx, e: QExp, expected: QType | None = None) -> QType:
    """Type of ``e`` under ``ctx``; ``expected`` only serves unannotated injections."""
    if isinstance(e, Var):
        if e.x not in ctx:
            raise TypeCheckError(ErrorKind.UnboundVar, f"{e.x} is not bound")
        extra = sorted(set(ctx) - {e.x})
        if extra:
            raise TypeCheckError(ErrorKind.UnusedVar, f"{extra[0]} is never used")
        return ctx[e.x]

    if isinstance(e, Put):
        if ctx:
            raise TypeCheckError(ErrorKind.UnusedVar, f"{sorted(ctx)[0]} is never used")
        return Lower(e.alpha)

    if isinstance(e, Pair):
        c1, c2 = _split(ctx, free_vars(e.e1), free_vars(e.e2), e)
        el = er = None
        if isinstance(expected, Tensor):
            el, er = expected.l, expected.r
        return Tensor(infer_type(c1, e.e1, el), infer_type(c2, e.e2, er))

    if isinstance(e, Let):
        c1, c2 = _split(ctx, free_vars(e.e), free_vars(e.body) - {e.x}, e)
        sigma = infer_type(c1, e.e)
        return infer_type(_extend(c2, e.x, sigma), e.body, expected)

    if isinstance(e, LetPair):
        if e.x1 == e.x2:
            raise TypeCheckError(ErrorKind.ContextOverlap, f"pattern binds {e.x1} twice")
        c1, c2 = _split(ctx, free_vars(e.e), free_vars(e.body) - {e.x1, e.x2}, e)
        sigma = infer_type(c1, e.e)
        if not isinstance(sigma, Tensor):
            raise TypeCheckError(ErrorKind.TypeMismatch, f"pair pattern on non-tensor type {sigma}")
        body_ctx = _extend(_extend(c2, e.x1, sigma.l), e.x2, sigma.r)
        return infer_type(body_ctx, e.body, expected)

    if isinstance(e, Inj):
        ty = e.ty if e.ty is not None else expected
        if ty is None:
            raise TypeCheckError(ErrorKind.TypeMismatch, "injection without a sum-type annotation")
        if not isinstance(ty, Oplus):
            raise TypeCheckError(ErrorKind.TypeMismatch, f"injection into non-sum type {ty}")
        part = ty.l if e.i == 1 else ty.r
        got = infer_type(ctx, e.e, part)
        if got != part:
            raise TypeCheckError(ErrorKind.TypeMismatch, f"injection {e.i} expects {part}, got {got}")
        return ty

    if isinstance(e, Case):
        fv_branches = (free_vars(e.e1) - {e.x1}) | (free_vars(e.e2) - {e.x2})
        c1, c2 = _split(ctx, free_vars(e.e), fv_branches, e)
        sigma = infer_type(c1, e.e)
        if not isinstance(sigma, Oplus):
            raise TypeCheckError(ErrorKind.TypeMismatch, f"case on non-sum type {sigma}")
        t1 = infer_type(_extend(c2, e.x1, sigma.l), e.e1, expected)
        t2 = infer_type(_extend(c2, e.x2, sigma.r), e.e2, t1)
        if t1 != t2:
            raise TypeCheckError(ErrorKind.BranchMismatch, f"case branches have types {t1} and {t2}")
        return t1

    if isinstance(e, LetBang):
        fv_branches: frozenset[str] = frozenset().union(*(free_vars(b) for b in e.branches))
        c1, c2 = _split(ctx, free_vars(e.e), fv_branches, e)
        sigma = infer_type(c1, e.e)
        if not isinstance(sigma, Lower):
            raise TypeCheckError(ErrorKind.TypeMismatch, f"measurement of non-classical type {sigma}")
        if len(e.branches) != sigma.base.card:
            raise TypeCheckError(
                ErrorKind.BranchMismatch,
                f"{len(e.branches)} branches for {sigma.base} with {sigma.base.card} elements",
            )
        if not e.branches:
            t = e.ty if e.ty is not None else expected
            if t is None:
                raise TypeCheckError(ErrorKind.TypeMismatch, "empty branch family without a result type")
            return t
        t0 = infer_type(c2, e.branches[0], e.ty if e.ty is not None else expected)
        for k, b in enumerate(e.branches[1:], start=1):
            tk = infer_type(c2, b, t0)
            if tk != t0:
                raise TypeCheckError(ErrorKind.BranchMismatch, f"branch {k} has type {tk}, branch 0 has {t0}")
        if e.ty is not None and e.ty != t0:
            raise TypeCheckError(ErrorKind.TypeMismatch, f"annotation {e.ty} but branches have {t0}")
        return t0

    if isinstance(e, UApp):
        src = e.u.src
        got = infer_type(ctx, e.e, src)
        if got != src:
            raise TypeCheckError(ErrorKind.TypeMismatch, f"unitary expects {src}, argument has {got}")
        return e.u.dst

    raise TypeError(f"not an expression: {e!r}")


def infer(ctx: Ctx, e: QExp) -> TypingResult:
    try:
        return TypingResult(type=infer_type(ctx, e))
    except TypeCheckError as err:
        return TypingResult(kind=err.kind, detail=err.detail)


check = infer


def well_typed(ctx: Ctx, e: QExp, tau: QType | None = None) -> bool:
    r = infer(ctx, e)
    return r.ok and (tau is None or r.type == tau)
