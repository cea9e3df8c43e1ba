"""Random well-typed objects for property tests and sweeps."""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from .algebraic import AlgTerm, Apply, Meas, New, Split, UStep
from .qtypes import (
    BOOL,
    QUBIT,
    UNIT,
    VOID,
    Fin,
    FinType,
    Lower,
    Oplus,
    Prod,
    QType,
    Sum,
    Tensor,
    TVar,
    TypeAssignment,
    basis,
    dim,
)
from .syntax import (
    AssocOplus,
    AssocTensor,
    Case,
    CongOplus,
    CongTensor,
    Distr,
    Inj,
    Let,
    LetBang,
    LetPair,
    LowerIso,
    LowerOplus,
    LowerTensor,
    LUnitOplus,
    LUnitTensor,
    LZero,
    Pair,
    Put,
    QExp,
    Refl,
    SwapOplus,
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
    named_unitary,
    prim,
    trans,
)

Rng = np.random.Generator


def rng_for(seed: int | None) -> Rng:
    return np.random.default_rng(seed)


def haar_unitary(rng: Rng, n: int) -> np.ndarray:
    """Haar-random ``n x n`` unitary (QR of a complex Gaussian, phases fixed)."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def _choice(rng: Rng, items: Sequence):  # type: ignore[no-untyped-def]
    return items[int(rng.integers(len(items)))]


# ---------------------------------------------------------------------------
# Types

GENERAL_POOL: tuple[QType, ...] = (
    QUBIT,
    Lower(UNIT),
    Lower(Fin(3)),
    Tensor(QUBIT, QUBIT),
    Oplus(QUBIT, Lower(UNIT)),
    Oplus(Lower(UNIT), Lower(UNIT)),
)
BINARY_POOL: tuple[QType, ...] = (QUBIT, Tensor(QUBIT, QUBIT))


def random_fintype(rng: Rng, max_card: int = 4, allow_void: bool = False) -> FinType:
    opts: list[FinType] = [UNIT, BOOL, Fin(3)]
    if max_card >= 4:
        opts += [Sum(UNIT, BOOL), Prod(BOOL, BOOL)]
    if allow_void:
        opts.append(VOID)
    opts = [a for a in opts if a.card <= max_card]
    return _choice(rng, opts)


def random_closed_type(rng: Rng, max_dim: int = 4, binary: bool = False, depth: int = 2) -> QType:
    for _ in range(100):
        t = _closed(rng, depth, binary)
        if 0 < dim(t) <= max_dim:
            return t
    return QUBIT


def _closed(rng: Rng, depth: int, binary: bool) -> QType:
    k = int(rng.integers(3 if depth > 0 else 1))
    if k == 0:
        return QUBIT if binary else Lower(random_fintype(rng, 3))
    if k == 1 or binary:
        return Tensor(_closed(rng, depth - 1, binary), _closed(rng, depth - 1, binary))
    return Oplus(_closed(rng, depth - 1, binary), _closed(rng, depth - 1, binary))


def random_open_type(
    rng: Rng, names: Sequence[str] = ("X", "Y"), depth: int = 3, max_card: int = 6, allow_void: bool = True
) -> QType:
    """Open type whose basis has at most ``max_card`` elements when every variable is ``Bool``."""
    m = {x: BOOL for x in names}
    for _ in range(200):
        t = _open(rng, names, depth, allow_void)
        if basis(t, m).card <= max_card:
            return t
    return TVar(names[0])


def _open(rng: Rng, names: Sequence[str], depth: int, allow_void: bool) -> QType:
    k = int(rng.integers(4 if depth > 0 else 2))
    if k == 0:
        return TVar(_choice(rng, list(names)))
    if k == 1:
        opts = [UNIT, BOOL, Fin(3)] + ([VOID] if allow_void else [])
        return Lower(_choice(rng, opts))
    a = _open(rng, names, depth - 1, allow_void)
    b = _open(rng, names, depth - 1, allow_void)
    return Tensor(a, b) if k == 2 else Oplus(a, b)


def random_assignment(rng: Rng, names: Sequence[str], max_card: int = 3) -> TypeAssignment:
    choices = [a for a in (UNIT, BOOL, Fin(3), VOID) if a.card <= max_card]
    return TypeAssignment.of({x: _choice(rng, choices) for x in names})


def type_vars(t: QType) -> set[str]:
    if isinstance(t, TVar):
        return {t.name}
    if isinstance(t, (Tensor, Oplus)):
        return type_vars(t.l) | type_vars(t.r)
    return set()


# ---------------------------------------------------------------------------
# Equivalence witnesses


def _local_generators(rng: Rng, t: QType) -> list[UnitaryEquiv]:
    out: list[UnitaryEquiv] = []
    if isinstance(t, Tensor):
        a, b = t.l, t.r
        out.append(SwapTensor(a, b))
        if isinstance(b, Tensor):
            out.append(AssocTensor(a, b.l, b.r))
        if isinstance(a, Tensor):
            out.append(Symm(AssocTensor(a.l, a.r, b)))
        if isinstance(b, Oplus):
            out.append(Distr(a, b.l, b.r))
        if isinstance(a, Lower) and isinstance(b, Lower):
            out.append(LowerTensor(a.base, b.base))
        if a == Lower(UNIT):
            out.append(LUnitTensor(b))
        if a == Lower(VOID):
            out.append(LZero(b))
    if isinstance(t, Oplus):
        a, b = t.l, t.r
        out.append(SwapOplus(a, b))
        if isinstance(b, Oplus):
            out.append(AssocOplus(a, b.l, b.r))
        if isinstance(a, Oplus):
            out.append(Symm(AssocOplus(a.l, a.r, b)))
        if isinstance(a, Tensor) and isinstance(b, Tensor) and a.l == b.l:
            out.append(Symm(Distr(a.l, a.r, b.r)))
        if isinstance(a, Lower) and isinstance(b, Lower):
            out.append(LowerOplus(a.base, b.base))
        if a == Lower(VOID):
            out.append(LUnitOplus(b))
    if isinstance(t, Lower):
        n = t.base.card
        perm = tuple(int(i) for i in rng.permutation(n))
        out.append(LowerIso(t.base, Fin(n) if n != 2 else BOOL, perm))
        if isinstance(t.base, Prod):
            out.append(Symm(LowerTensor(t.base.left, t.base.right)))
        if isinstance(t.base, Sum):
            out.append(Symm(LowerOplus(t.base.left, t.base.right)))
    return out


def _type_positions(t: QType, path: tuple[int, ...] = ()) -> list[tuple[tuple[int, ...], QType]]:
    out = [(path, t)]
    if isinstance(t, (Tensor, Oplus)):
        out += _type_positions(t.l, path + (0,))
        out += _type_positions(t.r, path + (1,))
    return out


def _lift(t: QType, path: tuple[int, ...], g: UnitaryEquiv) -> UnitaryEquiv:
    if not path:
        return g
    assert isinstance(t, (Tensor, Oplus))
    cong = CongTensor if isinstance(t, Tensor) else CongOplus
    if path[0] == 0:
        return cong(_lift(t.l, path[1:], g), Refl(t.r))
    return cong(Refl(t.l), _lift(t.r, path[1:], g))


def random_equiv(rng: Rng, sigma: QType, n_generators: int = 6, grow: float = 0.1) -> UnitaryEquiv:
    """A chain of at most ``n_generators`` generator steps starting at ``sigma``."""
    steps: list[UnitaryEquiv] = []
    cur = sigma
    for _ in range(int(rng.integers(1, n_generators + 1))):
        cands = []
        for path, sub in _type_positions(cur):
            for g in _local_generators(rng, sub):
                cands.append((path, g))
        if rng.random() < grow or not cands:
            path, sub = _choice(rng, _type_positions(cur))
            cands = [(path, Symm(LUnitTensor(sub)))]
        path, g = _choice(rng, cands)
        step = _lift(cur, path, g)
        steps.append(step)
        cur = step.dst
    return trans(*steps) if steps else Refl(sigma)


# ---------------------------------------------------------------------------
# Unitaries


def random_unitary(rng: Rng, sigma: QType, depth: int = 2) -> UnitaryExpr:
    """Random unitary expression on ``sigma`` (endomorphism)."""
    k = int(rng.integers(6 if depth > 0 else 1))
    if k == 0 or (k in (1, 2) and not isinstance(sigma, (Tensor, Oplus))):
        if sigma == QUBIT and rng.random() < 0.3:
            return prim(_choice(rng, ["X", "Y", "Z", "H", "S", "T"]))
        return named_unitary(haar_unitary(rng, dim(sigma)), sigma)
    if k == 1 and isinstance(sigma, Tensor):
        return UTensor(random_unitary(rng, sigma.l, depth - 1), random_unitary(rng, sigma.r, depth - 1))
    if k == 1 and isinstance(sigma, Oplus):
        return UDirectSum(random_unitary(rng, sigma.l, depth - 1), random_unitary(rng, sigma.r, depth - 1))
    if k == 2:
        return UCompose(random_unitary(rng, sigma, depth - 1), random_unitary(rng, sigma, depth - 1))
    if k == 3:
        return UAdjoint(random_unitary(rng, sigma, depth - 1))
    if k == 4:
        return UId(sigma)
    return named_unitary(haar_unitary(rng, dim(sigma)), sigma)


# ---------------------------------------------------------------------------
# Terms


def ctx_dim(ctx: Mapping[str, QType]) -> int:
    out = 1
    for t in ctx.values():
        out *= dim(t)
    return out


def inhabitant(rng: Rng, tau: QType) -> QExp | None:
    """A closed term of type ``tau`` (``None`` if the basis is empty)."""
    if isinstance(tau, Lower):
        n = tau.base.card
        return Put(tau.base, int(rng.integers(n))) if n else None
    if isinstance(tau, Tensor):
        a, b = inhabitant(rng, tau.l), inhabitant(rng, tau.r)
        return None if a is None or b is None else Pair(a, b)
    if isinstance(tau, Oplus):
        sides = [1, 2] if rng.random() < 0.5 else [2, 1]
        for i in sides:
            v = inhabitant(rng, tau.l if i == 1 else tau.r)
            if v is not None:
                return Inj(i, v, tau)
        return None
    raise TypeError(tau)


class TermGen:
    """Type-directed generator of linear terms.

    Every context variable is used exactly once; leftovers are measured and
    discarded.  ``max_dim`` bounds the dimension of every intermediate
    context so that the semantics stays cheap.
    """

    def __init__(self, rng: Rng, binary: bool = False, max_dim: int = 16, structured: float = 0.5) -> None:
        self.rng = rng
        self.binary = binary
        self.max_dim = max_dim
        self.structured = structured
        self.counter = 0

    @property
    def pool(self) -> tuple[QType, ...]:
        return BINARY_POOL if self.binary else GENERAL_POOL

    def fresh(self, stem: str = "v") -> str:
        self.counter += 1
        return f"{stem}{self.counter}"

    def fits(self, ctx: Mapping[str, QType], *extra: QType) -> bool:
        d = ctx_dim(ctx)
        for t in extra:
            d *= dim(t)
        return d <= self.max_dim

    def split(self, ctx: Mapping[str, QType]) -> tuple[dict[str, QType], dict[str, QType]]:
        c1: dict[str, QType] = {}
        c2: dict[str, QType] = {}
        for x, t in ctx.items():
            (c1 if self.rng.random() < 0.5 else c2)[x] = t
        return c1, c2

    def unitary(self, sigma: QType) -> UnitaryExpr:
        if self.rng.random() < self.structured:
            return random_unitary(self.rng, sigma, 2)
        return named_unitary(haar_unitary(self.rng, dim(sigma)), sigma)

    def finish(self, ctx: Mapping[str, QType], tau: QType) -> QExp:
        from .rewrite import discard, discard_order

        names = [x for x, t in ctx.items() if t == tau]
        if names:
            keep = _choice(self.rng, names)
            body: QExp = Var(keep)
            rest = {x: t for x, t in ctx.items() if x != keep}
        else:
            v = inhabitant(self.rng, tau)
            if v is None:
                raise ValueError(f"no closed inhabitant of {tau}")
            body, rest = v, dict(ctx)
        avoid = set(ctx)
        for x in discard_order(rest):
            body = discard(x, rest[x], body, avoid, tau)
            avoid |= all_names(body)
        return body

    def term(self, ctx: Mapping[str, QType], tau: QType, depth: int = 3) -> QExp:
        ctx = dict(ctx)
        if depth <= 0:
            return self.finish(ctx, tau)
        moves = ["var", "put", "pair", "inj", "let", "letpair", "case", "bang", "uapp", "open", "open"]
        for _ in range(8):
            mv = _choice(self.rng, moves)
            out = getattr(self, "_" + mv)(ctx, tau, depth)
            if out is not None:
                return out
        return self.finish(ctx, tau)

    def _var(self, ctx, tau, depth):  # type: ignore[no-untyped-def]
        if len(ctx) == 1 and next(iter(ctx.values())) == tau:
            return Var(next(iter(ctx)))
        return None

    def _put(self, ctx, tau, depth):  # type: ignore[no-untyped-def]
        if not ctx and isinstance(tau, Lower) and tau.base.card:
            return Put(tau.base, int(self.rng.integers(tau.base.card)))
        return None

    def _pair(self, ctx, tau, depth):  # type: ignore[no-untyped-def]
        if not isinstance(tau, Tensor):
            return None
        c1, c2 = self.split(ctx)
        return Pair(self.term(c1, tau.l, depth - 1), self.term(c2, tau.r, depth - 1))

    def _inj(self, ctx, tau, depth):  # type: ignore[no-untyped-def]
        if self.binary or not isinstance(tau, Oplus):
            return None
        i = 1 if self.rng.random() < 0.5 else 2
        part = tau.l if i == 1 else tau.r
        if dim(part) == 0:
            return None
        return Inj(i, self.term(ctx, part, depth - 1), tau)

    def _let(self, ctx, tau, depth):  # type: ignore[no-untyped-def]
        sigma = _choice(self.rng, self.pool)
        c1, c2 = self.split(ctx)
        if not self.fits(c2, sigma) or not self.fits(c1, sigma):
            return None
        x = self.fresh()
        return Let(x, self.term(c1, sigma, depth - 1), self.term({**c2, x: sigma}, tau, depth - 1))

    def _letpair(self, ctx, tau, depth):  # type: ignore[no-untyped-def]
        sigma = _choice(self.rng, [t for t in self.pool if isinstance(t, Tensor)])
        c1, c2 = self.split(ctx)
        if not self.fits(c2, sigma) or not self.fits(c1, sigma):
            return None
        x1, x2 = self.fresh(), self.fresh()
        e = self.term(c1, sigma, depth - 1)
        return LetPair(x1, x2, e, self.term({**c2, x1: sigma.l, x2: sigma.r}, tau, depth - 1))

    def _case(self, ctx, tau, depth):  # type: ignore[no-untyped-def]
        if self.binary:
            return None
        sigma = _choice(self.rng, [t for t in self.pool if isinstance(t, Oplus)])
        c1, c2 = self.split(ctx)
        if not self.fits(c2, sigma) or not self.fits(c1, sigma):
            return None
        x1, x2 = self.fresh(), self.fresh()
        e = self.term(c1, sigma, depth - 1)
        return Case(
            e,
            x1,
            self.term({**c2, x1: sigma.l}, tau, depth - 1),
            x2,
            self.term({**c2, x2: sigma.r}, tau, depth - 1),
        )

    def _bang(self, ctx, tau, depth):  # type: ignore[no-untyped-def]
        alpha = BOOL if self.binary else _choice(self.rng, [UNIT, BOOL, Fin(3)])
        c1, c2 = self.split(ctx)
        if not self.fits(c1, Lower(alpha)):
            return None
        e = self.term(c1, Lower(alpha), depth - 1)
        return LetBang(e, tuple(self.term(c2, tau, depth - 2) for _ in range(alpha.card)))

    def _uapp(self, ctx, tau, depth):  # type: ignore[no-untyped-def]
        return UApp(self.unitary(tau), self.term(ctx, tau, depth - 1))

    def _open(self, ctx, tau, depth):  # type: ignore[no-untyped-def]
        """Eliminate a context variable directly."""
        if not ctx:
            return None
        x = _choice(self.rng, sorted(ctx))
        t = ctx[x]
        rest = {y: s for y, s in ctx.items() if y != x}
        if isinstance(t, Tensor):
            a, b = self.fresh(), self.fresh()
            return LetPair(a, b, Var(x), self.term({**rest, a: t.l, b: t.r}, tau, depth - 1))
        if isinstance(t, Oplus) and not self.binary:
            a, b = self.fresh(), self.fresh()
            return Case(
                Var(x), a, self.term({**rest, a: t.l}, tau, depth - 1), b, self.term({**rest, b: t.r}, tau, depth - 1)
            )
        if isinstance(t, Lower) and t.base.card:
            return LetBang(Var(x), tuple(self.term(rest, tau, depth - 2) for _ in range(t.base.card)))
        return None


def random_term(
    rng: Rng,
    ctx: Mapping[str, QType],
    tau: QType,
    depth: int = 3,
    binary: bool = False,
    max_dim: int = 16,
) -> QExp:
    return TermGen(rng, binary=binary, max_dim=max_dim).term(ctx, tau, depth)


def generate_term(
    seed: int, n_vars: int, depth: int, tau: QType, binary: bool = False, max_dim: int = 16
) -> tuple[dict[str, QType], QExp]:
    """A context of ``n_vars`` variables and a term of type ``tau`` in it, both fixed by ``seed``."""
    rng = rng_for(seed)
    ctx = random_context(rng, n_vars, binary=binary, max_dim=max_dim)
    return ctx, TermGen(rng, binary=binary, max_dim=max_dim).term(ctx, tau, depth)


def random_context(rng: Rng, n: int, binary: bool = False, prefix: str = "x", max_dim: int = 8) -> dict[str, QType]:
    pool = BINARY_POOL if binary else GENERAL_POOL
    out: dict[str, QType] = {}
    for k in range(n):
        t = _choice(rng, pool)
        if ctx_dim(out) * dim(t) > max_dim:
            if binary and ctx_dim(out) * 2 > max_dim:
                break
            t = QUBIT if ctx_dim(out) * 2 <= max_dim else Lower(UNIT)
        out[f"{prefix}{k}"] = t
    return out


# ---------------------------------------------------------------------------
# Algebraic terms


class AlgGen:
    """Random terms ``k : QUBIT | Δ ⊢ t`` over qubit wires."""

    def __init__(self, rng: Rng, max_wires: int = 4) -> None:
        self.rng = rng
        self.max_wires = max_wires
        self.counter = 0

    def fresh(self) -> str:
        self.counter += 1
        return f"g{self.counter}"

    def term(self, k: str, delta: Mapping[str, QType], depth: int = 3) -> AlgTerm:
        delta = dict(delta)
        pairs = [a for a, t in delta.items() if isinstance(t, Tensor)]
        if pairs:
            a = pairs[0]
            a1, a2 = self.fresh(), self.fresh()
            t = delta.pop(a)
            assert isinstance(t, Tensor)
            delta[a1], delta[a2] = t.l, t.r
            return Split(a, a1, a2, self.term(k, delta, depth))
        ws = sorted(delta)
        if depth <= 0:
            return self._finish(k, ws)
        mv = int(self.rng.integers(4))
        if mv == 0 and len(ws) < self.max_wires:
            a = self.fresh()
            return New(a, self.term(k, {**delta, a: QUBIT}, depth - 1))
        if mv == 1 and len(ws) > 1:
            a = _choice(self.rng, ws)
            rest = {w: t for w, t in delta.items() if w != a}
            return Meas(a, self.term(k, rest, depth - 1), self.term(k, rest, depth - 1))
        if mv == 2 and len(ws) >= 2:
            i, j = self.rng.choice(len(ws), 2, replace=False)
            arg = (ws[int(i)], ws[int(j)])
            u = named_unitary(haar_unitary(self.rng, 4), Tensor(QUBIT, QUBIT))
            return UStep(u, arg, arg, self.term(k, delta, depth - 1))
        if ws:
            a = _choice(self.rng, ws)
            u = named_unitary(haar_unitary(self.rng, 2), QUBIT)
            return UStep(u, a, a, self.term(k, delta, depth - 1))
        a = self.fresh()
        return New(a, self.term(k, {a: QUBIT}, depth - 1))

    def _finish(self, k: str, ws: list[str]) -> AlgTerm:
        if not ws:
            a = self.fresh()
            return New(a, Apply(k, a))
        keep = _choice(self.rng, ws)
        out: AlgTerm = Apply(k, keep)
        for w in ws:
            if w != keep:
                out = Meas(w, out, out)
        return out


def random_alg_term(rng: Rng, k: str, delta: Mapping[str, QType], depth: int = 3) -> AlgTerm:
    return AlgGen(rng).term(k, delta, depth)


__all__ = [
    "TermGen",
    "AlgGen",
    "random_term",
    "generate_term",
    "random_context",
    "random_unitary",
    "random_equiv",
    "random_open_type",
    "random_assignment",
    "random_closed_type",
    "haar_unitary",
    "inhabitant",
]
