"""Randomized equation sweeps.

A sweep draws random instances of a family of equations and checks each one
with the density-matrix semantics.  Every superoperator built along the way
is also checked for complete positivity and for not increasing the trace.

Instances are generated with one generator per (seed, round) pair, so any
failure can be reproduced on its own from the numbers in its report.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping

import numpy as np

from .algebraic import UStep, Apply, alg_axioms, alg_subst, check_alg, to_alg, to_qexp
from .generate import GENERAL_POOL, AlgGen, Rng, TermGen, _choice, haar_unitary, random_equiv, random_open_type
from .linalg import DEFAULT_TOL, PSD_TOL, Superoperator, choi_matrix, max_eigenvalue, min_eigenvalue, trace_form
from .opentype import apply_equiv, distr_equiv, gamma, map_tokens, partial_init, partial_match, point_type, var_leaves, wire_shapes
from .qtypes import BOOL, QUBIT, UNIT, VOID, Fin, FinType, Lower, Oplus, Prod, QType, Sum, Tensor, TVar, TypeAssignment, dim
from .rewrite import apply_rule, discard, unit_canon
from .semantics import equiv_report
from .syntax import (
    AssocOplus,
    AssocTensor,
    Case,
    Distr,
    FromEquiv,
    Inj,
    Let,
    LetBang,
    LetPair,
    LowerOplus,
    LowerTensor,
    LUnitOplus,
    LUnitTensor,
    LZero,
    NameSupply,
    Pair,
    Put,
    QExp,
    SwapOplus,
    SwapTensor,
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
    named_unitary,
    prim,
    rename,
    subst,
)
from .typecheck import infer_type


@dataclass(frozen=True)
class Instance:
    case: str
    lhs: QExp | None
    rhs: QExp | None
    ctx: Mapping[str, QType]
    rule: str | None = None
    vacuous: str = ""
    """Non-empty when the equation quantifies over an empty type; the text says why."""


@dataclass
class Failure:
    suite: str
    case: str
    seed: int
    round: int
    message: str


@dataclass
class SuiteResult:
    suite: str
    seed: int
    count: int
    checked: Counter = field(default_factory=Counter)
    vacuous: Counter = field(default_factory=Counter)
    failures: list[Failure] = field(default_factory=list)
    hygiene_checked: int = 0
    hygiene_failures: list[Failure] = field(default_factory=list)
    catalog_checked: int = 0
    worst_deviation: float = 0.0
    max_trace_gain: float = 0.0
    min_choi_eig: float = 0.0
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures and not self.hygiene_failures

    @property
    def verdict(self) -> str:
        return "pass" if self.ok else "fail"

    def lines(self) -> list[str]:
        out = [f"suite {self.suite} (seed {self.seed}, {self.count} rounds, {self.elapsed:.1f}s)"]
        for case in sorted(set(self.checked) | set(self.vacuous)):
            n, v = self.checked[case], self.vacuous[case]
            tag = f"{n} checked" if not v else f"{v} vacuous"
            out.append(f"  {case}: {tag}")
        out.append(f"  worst deviation {self.worst_deviation:.3e}")
        out.append(
            f"  hygiene: {self.hygiene_checked} superoperators, max trace gain {self.max_trace_gain:.3e}, "
            f"min Choi eigenvalue {self.min_choi_eig:.3e}"
        )
        if self.catalog_checked:
            out.append(f"  catalog rule agreement: {self.catalog_checked} instances")
        for f in self.failures + self.hygiene_failures:
            out.append(f"  FAIL {f.case} (seed {f.seed}, round {f.round}): {f.message}")
        return out


# ---------------------------------------------------------------------------
# Instance kit


class Kit:
    """Random pieces for one round, sharing a name supply."""

    def __init__(self, rng: Rng, binary: bool = False, max_dim: int = 16) -> None:
        self.rng = rng
        self.gen = TermGen(rng, binary=binary, max_dim=max_dim)

    def fresh(self, stem: str) -> str:
        return self.gen.fresh(stem)

    def coin(self, p: float = 0.5) -> bool:
        return bool(self.rng.random() < p)

    def ty(self, max_dim: int = 4) -> QType:
        return _choice(self.rng, [t for t in self.gen.pool if dim(t) <= max_dim])

    def fintype(self) -> FinType:
        return _choice(self.rng, [UNIT, BOOL, Fin(3)])

    def context(self, max_dim: int = 8, max_vars: int = 3) -> dict[str, QType]:
        out: dict[str, QType] = {}
        for _ in range(int(self.rng.integers(max_vars + 1))):
            t = self.ty()
            if _ctx_dim(out) * dim(t) > max_dim:
                break
            out[self.fresh("x")] = t
        return out

    def split(self, ctx: Mapping[str, QType], parts: int = 2) -> list[dict[str, QType]]:
        out: list[dict[str, QType]] = [{} for _ in range(parts)]
        for x, t in ctx.items():
            out[int(self.rng.integers(parts))][x] = t
        return out

    def term(self, ctx: Mapping[str, QType], tau: QType, depth: int = 2) -> QExp:
        try:
            return self.gen.term(ctx, tau, depth)
        except ValueError:
            return self.gen.finish(dict(ctx), tau)

    def unitary(self, sigma: QType) -> tuple[UnitaryExpr, QType]:
        """A unitary out of ``sigma`` and its target type."""
        if self.coin(0.6) or dim(sigma) == 0:
            return self.gen.unitary(sigma), sigma
        d = dim(sigma)
        opts = [t for t in GENERAL_POOL if dim(t) == d and t != sigma] + [Lower(Fin(d))]
        tau = _choice(self.rng, opts)
        return named_unitary(haar_unitary(self.rng, d), sigma, tau), tau

    def endo(self, sigma: QType) -> UnitaryExpr:
        return self.gen.unitary(sigma)


def _ctx_dim(ctx: Mapping[str, QType]) -> int:
    out = 1
    for t in ctx.values():
        out *= dim(t)
    return out


def _merge(*cs: Mapping[str, QType]) -> dict[str, QType]:
    out: dict[str, QType] = {}
    for c in cs:
        out.update(c)
    return out


def _equiv(f: UnitaryEquiv) -> FromEquiv:
    return FromEquiv(f, TypeAssignment())


# ---------------------------------------------------------------------------
# Linear/non-linear beta and eta


def beta_instances(k: Kit) -> list[Instance]:
    out = []
    g = k.context()

    c1, c2 = k.split(g)
    s, tau, x = k.ty(), k.ty(), k.fresh("y")
    e, body = k.term(c1, s), k.term({**c2, x: s}, tau)
    out.append(Instance("β-LET", Let(x, e, body), subst(body, {x: e}), g, "β-LET"))

    c1, c2, c3 = k.split(g, 3)
    s1, s2, tau = k.ty(2), k.ty(2), k.ty()
    x1, x2 = k.fresh("y"), k.fresh("y")
    e1, e2 = k.term(c1, s1), k.term(c2, s2)
    body = k.term({**c3, x1: s1, x2: s2}, tau)
    out.append(Instance("β-⊗", LetPair(x1, x2, Pair(e1, e2), body), subst(body, {x1: e1, x2: e2}), g, "β-⊗"))

    c1, c2 = k.split(g)
    s1, s2, tau = k.ty(), k.ty(), k.ty()
    i = 1 if k.coin() else 2
    x1, x2 = k.fresh("y"), k.fresh("y")
    e = k.term(c1, s1 if i == 1 else s2)
    b1, b2 = k.term({**c2, x1: s1}, tau), k.term({**c2, x2: s2}, tau)
    lhs = Case(Inj(i, e, Oplus(s1, s2)), x1, b1, x2, b2)  # type: ignore[arg-type]
    rhs = subst(b1, {x1: e}) if i == 1 else subst(b2, {x2: e})
    out.append(Instance("β-⊕", lhs, rhs, g, "β-⊕"))

    alpha, tau = k.fintype(), k.ty()
    a = int(k.rng.integers(alpha.card))
    fam = tuple(k.term(g, tau) for _ in range(alpha.card))
    out.append(Instance("β-LOWER", LetBang(Put(alpha, a), fam), fam[a], g, "β-LOWER"))
    return out


def eta_instances(k: Kit) -> list[Instance]:
    g = k.context()
    s1, s2 = k.ty(2), k.ty(2)
    e = k.term(g, Tensor(s1, s2))
    x1, x2 = k.fresh("y"), k.fresh("y")
    pair = Instance("η-⊗", LetPair(x1, x2, e, Pair(Var(x1), Var(x2))), e, g, "η-⊗")
    lhs = k.term(g, Lower(UNIT), 3)
    canon = unit_canon(g, all_names(lhs))
    fires = not isinstance(lhs, Var) and not alpha_eq(lhs, canon)
    unit = Instance("η-()", lhs, canon, g, "η-()" if fires else None)
    return [pair, unit]


# ---------------------------------------------------------------------------
# Commuting conversions: e0{E/x} for a random one-hole context e0


def cc_instances(k: Kit) -> list[Instance]:
    out = []
    for case in ("CC-LET", "CC-⊗", "CC-⊕", "CC-LOWER"):
        g = k.context(max_dim=4, max_vars=2)
        c0, ce, cb = k.split(g, 3)
        s, tau, x = k.ty(2), k.ty(2), k.fresh("h")
        e0 = k.term({**c0, x: s}, tau, 2)
        if case == "CC-LET":
            r, y = k.ty(2), k.fresh("y")
            e, body = k.term(ce, r), k.term({**cb, y: r}, s)
            lhs = subst(e0, {x: Let(y, e, body)})
            rhs: QExp = Let(y, e, subst(e0, {x: body}))
        elif case == "CC-⊗":
            r1, r2 = k.ty(2), k.ty(2)
            y1, y2 = k.fresh("y"), k.fresh("y")
            e, body = k.term(ce, Tensor(r1, r2)), k.term({**cb, y1: r1, y2: r2}, s)
            lhs = subst(e0, {x: LetPair(y1, y2, e, body)})
            rhs = LetPair(y1, y2, e, subst(e0, {x: body}))
        elif case == "CC-⊕":
            r1, r2 = k.ty(2), k.ty(2)
            y1, y2 = k.fresh("y"), k.fresh("y")
            e = k.term(ce, Oplus(r1, r2))
            b1, b2 = k.term({**cb, y1: r1}, s), k.term({**cb, y2: r2}, s)
            lhs = subst(e0, {x: Case(e, y1, b1, y2, b2)})
            rhs = Case(e, y1, subst(e0, {x: b1}), y2, subst(e0, {x: b2}))
        else:
            alpha = k.fintype()
            e = k.term(ce, Lower(alpha))
            fam = tuple(k.term(cb, s) for _ in range(alpha.card))
            lhs = subst(e0, {x: LetBang(e, fam)})
            rhs = LetBang(e, tuple(subst(e0, {x: b}) for b in fam))
        out.append(Instance(case, lhs, rhs, g))
    return out


# ---------------------------------------------------------------------------
# Structural and groupoid axioms for unitaries


def structural_instances(k: Kit) -> list[Instance]:
    out = []
    g = k.context()

    c1, c2 = k.split(g)
    s1, s2 = k.ty(2), k.ty(2)
    (u1, t1), (u2, t2) = k.unitary(s1), k.unitary(s2)
    e1, e2 = k.term(c1, s1), k.term(c2, s2)
    out.append(
        Instance(
            "U-⊗-INTRO",
            UApp(UTensor(u1, u2), Pair(e1, e2)),
            Pair(UApp(u1, e1), UApp(u2, e2)),
            g,
            "U-⊗-INTRO",
        )
    )

    c1, c2 = k.split(g)
    tau = k.ty()
    x1, x2, y1, y2 = (k.fresh("y") for _ in range(4))
    e = k.term(c1, Tensor(s1, s2))
    body = k.term({**c2, x1: t1, x2: t2}, tau)
    out.append(
        Instance(
            "U-⊗-ELIM",
            LetPair(x1, x2, UApp(UTensor(u1, u2), e), body),
            LetPair(y1, y2, e, subst(body, {x1: UApp(u1, Var(y1)), x2: UApp(u2, Var(y2))})),
            g,
            "U-⊗-ELIM",
        )
    )

    c1, c2 = k.split(g)
    r1, r2, s = k.ty(2), k.ty(2), k.ty()
    u, _ = k.unitary(s)
    x1, x2 = k.fresh("y"), k.fresh("y")
    e, body = k.term(c1, Tensor(r1, r2)), k.term({**c2, x1: r1, x2: r2}, s)
    out.append(
        Instance("U-⊗-COMM", UApp(u, LetPair(x1, x2, e, body)), LetPair(x1, x2, e, UApp(u, body)), g, "U-⊗-COMM")
    )

    s1, s2 = k.ty(), k.ty()
    (u1, t1), (u2, t2) = k.unitary(s1), k.unitary(s2)
    for i in (1, 2):
        e = k.term(g, s1 if i == 1 else s2)
        ui = u1 if i == 1 else u2
        out.append(
            Instance(
                f"U-⊕-INTRO{'₁₂'[i - 1]}",
                UApp(UDirectSum(u1, u2), Inj(i, e, Oplus(s1, s2))),  # type: ignore[arg-type]
                Inj(i, UApp(ui, e), Oplus(t1, t2)),  # type: ignore[arg-type]
                g,
                f"U-⊕-INTRO{'₁₂'[i - 1]}",
            )
        )

    c1, c2 = k.split(g)
    tau = k.ty()
    x1, x2, y1, y2 = (k.fresh("y") for _ in range(4))
    e = k.term(c1, Oplus(s1, s2))
    b1, b2 = k.term({**c2, x1: t1}, tau), k.term({**c2, x2: t2}, tau)
    out.append(
        Instance(
            "U-⊕-ELIM",
            Case(UApp(UDirectSum(u1, u2), e), x1, b1, x2, b2),
            Case(e, y1, subst(b1, {x1: UApp(u1, Var(y1))}), y2, subst(b2, {x2: UApp(u2, Var(y2))})),
            g,
            "U-⊕-ELIM",
        )
    )

    c1, c2 = k.split(g)
    r1, r2, s = k.ty(), k.ty(), k.ty()
    u, _ = k.unitary(s)
    x1, x2 = k.fresh("y"), k.fresh("y")
    e = k.term(c1, Oplus(r1, r2))
    b1, b2 = k.term({**c2, x1: r1}, s), k.term({**c2, x2: r2}, s)
    out.append(
        Instance(
            "U-⊕-COMM",
            UApp(u, Case(e, x1, b1, x2, b2)),
            Case(e, x1, UApp(u, b1), x2, UApp(u, b2)),
            g,
            "U-⊕-COMM",
        )
    )

    c1, c2 = k.split(g)
    alpha, s = k.fintype(), k.ty()
    u, _ = k.unitary(s)
    e = k.term(c1, Lower(alpha))
    fam = tuple(k.term(c2, s) for _ in range(alpha.card))
    out.append(
        Instance(
            "U-LOWER-COMM", UApp(u, LetBang(e, fam)), LetBang(e, tuple(UApp(u, b) for b in fam)), g, "U-LOWER-COMM"
        )
    )

    c1, c2 = k.split(g)
    alpha, tau = k.fintype(), k.ty()
    beta = _choice(k.rng, [b for b in (UNIT, BOOL, Fin(2), Fin(3), Sum(UNIT, Fin(2))) if b.card == alpha.card])
    u = named_unitary(haar_unitary(k.rng, alpha.card), Lower(alpha), Lower(beta))
    e, body = k.term(c1, Lower(alpha)), k.term(c2, tau)
    out.append(
        Instance(
            "U-LOWER-ELIM",
            LetBang(UApp(u, e), (body,) * beta.card),
            LetBang(e, (body,) * alpha.card),
            g,
            "U-LOWER-ELIM",
        )
    )
    return out


def groupoid_instances(k: Kit) -> list[Instance]:
    g = k.context()
    s = k.ty()
    e = k.term(g, s)
    v, t = k.unitary(s)
    u, _ = k.unitary(t)
    return [
        Instance("U-COMPOSE", UApp(u, UApp(v, e)), UApp(UCompose(u, v), e), g, "U-COMPOSE"),
        Instance("U-I", UApp(UId(s), e), e, g, "U-I"),
        Instance("U-†", UApp(UAdjoint(v), UApp(v, e)), e, g, "U-†"),
    ]


# ---------------------------------------------------------------------------
# Named quantum gates


def gate_instances(k: Kit) -> list[Instance]:
    out = []
    X = prim("X")
    g = k.context()

    b = int(k.coin())
    out.append(Instance("X-INTRO", UApp(X, Put(BOOL, b)), Put(BOOL, 1 - b), {}))

    c1, c2 = k.split(g)
    tau = k.ty()
    e, f0, f1 = k.term(c1, QUBIT), k.term(c2, tau), k.term(c2, tau)
    out.append(Instance("X-ELIM", LetBang(UApp(X, e), (f0, f1)), LetBang(e, (f1, f0)), g))

    c1, c2 = k.split(g)
    if k.coin(0.3):
        s1 = s2 = QUBIT
        swap: UnitaryExpr = prim("SWAP")
    else:
        s1, s2 = k.ty(2), k.ty(2)
        swap = _equiv(SwapTensor(s1, s2))
    e1, e2 = k.term(c1, s1), k.term(c2, s2)
    out.append(Instance("SWAP-INTRO", UApp(swap, Pair(e1, e2)), Pair(e2, e1), g))

    c1, c2 = k.split(g)
    tau = k.ty()
    x, y = k.fresh("y"), k.fresh("y")
    e = k.term(c1, Tensor(s1, s2))
    body = k.term({**c2, x: s2, y: s1}, tau)
    out.append(Instance("SWAP-ELIM", LetPair(x, y, UApp(swap, e), body), LetPair(y, x, e, body), g))

    t = k.ty()
    d = _equiv(distr_equiv(t))
    b = int(k.coin())
    e = k.term(g, t)
    out.append(
        Instance("DISTR-INTRO", UApp(d, Pair(Put(BOOL, b), e)), Inj(2 if b else 1, e, Oplus(t, t)), g)  # type: ignore[arg-type]
    )

    c1, c2 = k.split(g)
    rho = k.ty()
    z1, z2, q, y = (k.fresh("y") for _ in range(4))
    e = k.term(c1, Tensor(QUBIT, t))
    b1, b2 = k.term({**c2, z1: t}, rho), k.term({**c2, z2: t}, rho)
    out.append(
        Instance(
            "DISTR-ELIM",
            Case(UApp(d, e), z1, b1, z2, b2),
            LetPair(q, y, e, LetBang(Var(q), (rename(b1, {z1: y}), rename(b2, {z2: y})))),
            g,
        )
    )

    cnot = prim("CNOT")
    b = int(k.coin())
    e = k.term(g, QUBIT)
    out.append(
        Instance("CNOT-INTRO", UApp(cnot, Pair(Put(BOOL, b), e)), Pair(Put(BOOL, b), UApp(X, e) if b else e), g)
    )

    c1, c2 = k.split(g)
    tau = k.ty()
    c, y, y2 = k.fresh("y"), k.fresh("y"), k.fresh("y")
    e = k.term(c1, Tensor(QUBIT, QUBIT))
    body = k.term({**c2, y: QUBIT}, tau)
    out.append(
        Instance(
            "CNOT-ELIM",
            LetPair(c, y, UApp(cnot, e), LetBang(Var(c), (body, body))),
            LetPair(c, y2, e, LetBang(Var(c), (rename(body, {y: y2}), subst(body, {y: UApp(X, Var(y2))})))),
            g,
        )
    )
    return out


# ---------------------------------------------------------------------------
# Generic partial initialization / measurement law


def axiom20_instances(k: Kit) -> list[Instance]:
    rng = k.rng
    names = ("X", "Y")
    # an empty basis makes both laws trivial, so draw again a few times
    for _ in range(20):
        sigma = random_open_type(rng, names, depth=3, max_card=6)
        shapes = wire_shapes(sigma, NameSupply(stem="w"))
        if shapes:
            break
    f = random_equiv(rng, sigma, n_generators=6)
    tau = f.dst
    m = TypeAssignment.of({x: _choice(rng, [VOID, UNIT, BOOL, Fin(3)]) for x in names})
    u = FromEquiv(f, m)
    out = []

    if not shapes:
        why = "open type has no wire shapes"
        return [Instance(c, None, None, {}, vacuous=why) for c in ("AXIOM20-INTRO", "AXIOM20-ELIM")]
    b = shapes[int(rng.integers(len(shapes)))]
    lhs = UApp(u, partial_init(sigma, b, m))
    rhs = partial_init(tau, apply_equiv(f, b), m)
    out.append(Instance("AXIOM20-INTRO", lhs, rhs, gamma(sigma, b, m), "AXIOM20-INTRO"))

    rho = k.ty()
    extra = {k.fresh("x"): k.ty(2)} if k.coin() else {}
    d = k.fresh("d")
    delta = {d: point_type(sigma, m)}
    e = k.term(delta, point_type(sigma, m), 2)
    cache: dict[object, tuple[QExp, list[str]]] = {}

    def branches(bv):  # type: ignore[no-untyped-def]
        toks = var_leaves(bv)
        holes = [f"hole{i}" for i in range(len(toks))]
        key = map_tokens(bv, lambda t: holes[toks.index(t)])
        if key not in cache:
            ctx = {**gamma(tau, key, m), **extra}
            cache[key] = (k.term(ctx, rho, 2), holes)
        body, hs = cache[key]
        return rename(body, dict(zip(hs, map(str, toks))))

    avoid = all_names(e) | set(extra) | {d}
    lhs = partial_match(tau, UApp(u, e), branches, m, NameSupply(avoid, "m"), rho)
    rhs = partial_match(sigma, e, lambda bv: branches(apply_equiv(f, bv)), m, NameSupply(avoid, "n"), rho)
    # at a bare variable type the match is a substitution, with no eliminator for the rule to see
    rooted = not isinstance(tau, TVar) and isinstance(lhs, (LetPair, Case, LetBang)) and lhs.e == UApp(u, e)
    out.append(Instance("AXIOM20-ELIM", lhs, rhs, {**delta, **extra}, "AXIOM20-ELIM" if rooted else None))
    return out


# ---------------------------------------------------------------------------
# Behaviour of each equivalence generator on initialization and measurement


def generator_instances(k: Kit) -> list[Instance]:
    out: list[Instance] = []
    g = k.context(max_dim=4)

    def add(case: str, lhs: QExp, rhs: QExp, ctx: Mapping[str, QType] | None = None) -> None:
        out.append(Instance(case, lhs, rhs, g if ctx is None else ctx))

    # 1
    c1, c2 = k.split(g)
    s1, s2 = k.ty(2), k.ty(2)
    e1, e2 = k.term(c1, s1), k.term(c2, s2)
    add("01 SWAP⊗ intro", UApp(_equiv(SwapTensor(s1, s2)), Pair(e1, e2)), Pair(e2, e1))
    # 2
    s1, s2 = k.ty(), k.ty()
    for i in (1, 2):
        e = k.term(g, s1 if i == 1 else s2)
        add(
            f"02 SWAP⊕ intro ι{i}",
            UApp(_equiv(SwapOplus(s1, s2)), Inj(i, e, Oplus(s1, s2))),  # type: ignore[arg-type]
            Inj(3 - i, e, Oplus(s2, s1)),  # type: ignore[arg-type]
        )
    # 3
    c1, c2, c3 = k.split(g, 3)
    s1, s2, s3 = k.ty(2), k.ty(2), k.ty(2)
    e1, e2, e3 = k.term(c1, s1), k.term(c2, s2), k.term(c3, s3)
    add("03 ASSOC⊗ intro", UApp(_equiv(AssocTensor(s1, s2, s3)), Pair(e1, Pair(e2, e3))), Pair(Pair(e1, e2), e3))
    # 4-6
    s1, s2, s3 = k.ty(), k.ty(), k.ty()
    a = _equiv(AssocOplus(s1, s2, s3))
    inner, outer = Oplus(s2, s3), Oplus(s1, Oplus(s2, s3))
    left, result = Oplus(s1, s2), Oplus(Oplus(s1, s2), s3)
    e = k.term(g, s1)
    add("04 ASSOC⊕ intro ι1", UApp(a, Inj(1, e, outer)), Inj(1, Inj(1, e, left), result))
    e = k.term(g, s2)
    add("05 ASSOC⊕ intro ι2ι1", UApp(a, Inj(2, Inj(1, e, inner), outer)), Inj(1, Inj(2, e, left), result))
    e = k.term(g, s3)
    add("06 ASSOC⊕ intro ι2ι2", UApp(a, Inj(2, Inj(2, e, inner), outer)), Inj(2, e, result))
    # 7
    s1, s2, s3 = k.ty(2), k.ty(2), k.ty(2)
    dist = _equiv(Distr(s1, s2, s3))
    for i in (1, 2):
        c1, c2 = k.split(g)
        e1, e2 = k.term(c1, s1), k.term(c2, s2 if i == 1 else s3)
        add(
            f"07 DISTR intro ι{i}",
            UApp(dist, Pair(e1, Inj(i, e2, Oplus(s2, s3)))),  # type: ignore[arg-type]
            Inj(i, Pair(e1, e2), Oplus(Tensor(s1, s2), Tensor(s1, s3))),  # type: ignore[arg-type]
        )
    # 8
    a1, a2 = k.fintype(), k.fintype()
    i1, i2 = int(k.rng.integers(a1.card)), int(k.rng.integers(a2.card))
    p = Prod(a1, a2)
    add("08 Lower⊗ intro", UApp(_equiv(LowerTensor(a1, a2)), Pair(Put(a1, i1), Put(a2, i2))), Put(p, p.pair(i1, i2)), {})
    # 9
    sm = Sum(a1, a2)
    lo = _equiv(LowerOplus(a1, a2))
    add(
        "09 Lower⊕ intro ι1",
        UApp(lo, Inj(1, Put(a1, i1), Oplus(Lower(a1), Lower(a2)))),
        Put(sm, sm.inl(i1)),
        {},
    )
    add(
        "09 Lower⊕ intro ι2",
        UApp(lo, Inj(2, Put(a2, i2), Oplus(Lower(a1), Lower(a2)))),
        Put(sm, sm.inr(i2)),
        {},
    )
    # 10
    s = k.ty()
    e = k.term(g, s)
    add("10 lunit⊗ intro", UApp(_equiv(LUnitTensor(s)), Pair(Put(UNIT, 0), e)), e)
    # 11
    out.append(Instance("11 lunit⊕ intro ι1 (put a : Void)", None, None, {}, vacuous="no value a : Void"))
    # 12
    e = k.term(g, s)
    add("12 lunit⊕ intro ι2", UApp(_equiv(LUnitOplus(s)), Inj(2, e, Oplus(Lower(VOID), s))), e)
    # 13
    out.append(Instance("13 LZERO intro (put a : Void, e)", None, None, {}, vacuous="no value a : Void"))
    # 14
    c1, c2 = k.split(g)
    s1, s2, tau = k.ty(2), k.ty(2), k.ty()
    x1, x2 = k.fresh("y"), k.fresh("y")
    e, body = k.term(c1, Tensor(s1, s2)), k.term({**c2, x1: s1, x2: s2}, tau)
    add("14 SWAP⊗ elim", LetPair(x2, x1, UApp(_equiv(SwapTensor(s1, s2)), e), body), LetPair(x1, x2, e, body))
    # 15
    c1, c2 = k.split(g)
    s1, s2, tau = k.ty(), k.ty(), k.ty()
    x0, x1 = k.fresh("y"), k.fresh("y")
    e = k.term(c1, Oplus(s1, s2))
    b0, b1 = k.term({**c2, x0: s2}, tau), k.term({**c2, x1: s1}, tau)
    add("15 SWAP⊕ elim", Case(UApp(_equiv(SwapOplus(s1, s2)), e), x0, b0, x1, b1), Case(e, x1, b1, x0, b0))
    # 16
    c1, c2 = k.split(g)
    s1, s2, s3, tau = k.ty(2), k.ty(2), k.ty(2), k.ty()
    x1, x2, x3, p, q = (k.fresh("y") for _ in range(5))
    e = k.term(c1, Tensor(s1, Tensor(s2, s3)))
    body = k.term({**c2, x1: s1, x2: s2, x3: s3}, tau)
    add(
        "16 ASSOC⊗ elim",
        LetPair(p, x3, UApp(_equiv(AssocTensor(s1, s2, s3)), e), LetPair(x1, x2, Var(p), body)),
        LetPair(x1, q, e, LetPair(x2, x3, Var(q), body)),
    )
    # 17
    c1, c2 = k.split(g)
    s1, s2, s3, tau = k.ty(), k.ty(), k.ty(), k.ty()
    x1, x2, x3, p, q = (k.fresh("y") for _ in range(5))
    e = k.term(c1, Oplus(s1, Oplus(s2, s3)))
    b1, b2, b3 = (k.term({**c2, x: s}, tau) for x, s in ((x1, s1), (x2, s2), (x3, s3)))
    add(
        "17 ASSOC⊕ elim",
        Case(UApp(_equiv(AssocOplus(s1, s2, s3)), e), p, Case(Var(p), x1, b1, x2, b2), x3, b3),
        Case(e, x1, b1, q, Case(Var(q), x2, b2, x3, b3)),
    )
    # 18
    c1, c2 = k.split(g)
    a1, a2, tau = k.fintype(), k.fintype(), k.ty()
    p = Prod(a1, a2)
    y1, y2 = k.fresh("y"), k.fresh("y")
    e = k.term(c1, Tensor(Lower(a1), Lower(a2)))
    fam = [k.term(c2, tau) for _ in range(p.card)]
    add(
        "18 Lower⊗ elim",
        LetBang(UApp(_equiv(LowerTensor(a1, a2)), e), tuple(fam)),
        LetPair(
            y1,
            y2,
            e,
            LetBang(Var(y1), tuple(LetBang(Var(y2), tuple(fam[p.pair(i, j)] for j in range(a2.card))) for i in range(a1.card))),
        ),
    )
    # 19
    c1, c2 = k.split(g)
    s1, s2, s3, tau = k.ty(2), k.ty(2), k.ty(2), k.ty()
    x, y, y0, y1, p, q = (k.fresh("y") for _ in range(6))
    e = k.term(c1, Tensor(s1, Oplus(s2, s3)))
    b0, b1 = k.term({**c2, x: s1, y0: s2}, tau), k.term({**c2, x: s1, y1: s3}, tau)
    add(
        "19 DISTR elim",
        Case(UApp(_equiv(Distr(s1, s2, s3)), e), p, LetPair(x, y0, Var(p), b0), q, LetPair(x, y1, Var(q), b1)),
        LetPair(x, y, e, Case(Var(y), y0, b0, y1, b1)),
    )
    # 20
    c1, c2 = k.split(g)
    a1, a2, tau = k.fintype(), k.fintype(), k.ty()
    sm = Sum(a1, a2)
    x0, x1 = k.fresh("y"), k.fresh("y")
    e = k.term(c1, Oplus(Lower(a1), Lower(a2)))
    fam = [k.term(c2, tau) for _ in range(sm.card)]
    add(
        "20 Lower⊕ elim",
        LetBang(UApp(_equiv(LowerOplus(a1, a2)), e), tuple(fam)),
        Case(
            e,
            x0,
            LetBang(Var(x0), tuple(fam[sm.inl(i)] for i in range(a1.card))),
            x1,
            LetBang(Var(x1), tuple(fam[sm.inr(j)] for j in range(a2.card))),
        ),
    )
    # 21
    c1, c2 = k.split(g)
    s, tau = k.ty(), k.ty()
    x, u = k.fresh("y"), k.fresh("y")
    e = k.term(c1, Tensor(Lower(UNIT), s))
    body = k.term({**c2, x: s}, tau)
    add("21 lunit⊗ elim", Let(x, UApp(_equiv(LUnitTensor(s)), e), body), LetPair(u, x, e, LetBang(Var(u), (body,))))
    # 22
    s = k.ty()
    v, x = k.fresh("y"), k.fresh("y")
    ev = k.fresh("d")
    out.append(
        Instance(
            "22 lunit⊕ elim",
            UApp(_equiv(LUnitOplus(s)), Var(ev)),
            Case(Var(ev), v, LetBang(Var(v), (), s), x, Var(x)),
            {ev: Oplus(Lower(VOID), s)},
        )
    )
    # 23
    s, tau = k.ty(), k.ty()
    a, r = k.fresh("y"), k.fresh("y")
    c1 = {**k.context(max_dim=2, max_vars=1), k.fresh("d"): Tensor(Lower(VOID), s)}
    e = k.term(c1, Tensor(Lower(VOID), s))
    out.append(
        Instance(
            "23 LZERO elim",
            LetBang(UApp(_equiv(LZero(s)), e), (), tau),
            LetPair(a, r, e, discard(r, s, LetBang(Var(a), (), tau), all_names(e) | {a, r}, tau)),
            c1,
        )
    )
    return out


# ---------------------------------------------------------------------------
# Algebraic calculus


def staton_instances(k: Kit) -> list[Instance]:
    rng = k.rng
    u = named_unitary(haar_unitary(rng, 2), QUBIT)
    v = named_unitary(haar_unitary(rng, 2), QUBIT)
    out = []
    for ax in alg_axioms(u, v):
        bodies = {}
        gen = AlgGen(rng)
        for x, params in ax.metas.items():
            ps = tuple(f"{x}_p{i}" for i in range(len(params)))
            bodies[x] = (ps, gen.term("k", dict(zip(ps, params)), 2))
        lhs, rhs = ax.instantiate(bodies)
        for side in (lhs, rhs):
            if not check_alg({"k": QUBIT}, ax.delta, side):
                raise AssertionError(f"axiom {ax.name} instance is ill-typed")
        out.append(Instance(f"{ax.name}", to_qexp(lhs, "k"), to_qexp(rhs, "k"), dict(ax.delta)))
    return out


def roundtrip_instances(k: Kit) -> list[Instance]:
    rng = k.rng
    out = []
    bk = Kit(rng, binary=True, max_dim=8)
    g = bk.context(max_dim=4, max_vars=2)
    tau = bk.ty()
    e = bk.term(g, tau, 3)
    back = to_qexp(to_alg(e, "y"), "y")
    out.append(Instance("⟨⟨e⟩⟩ ≈ e", back, e, g))

    delta = {f"a{i}": QUBIT for i in range(int(rng.integers(0, 3)))}
    t = AlgGen(rng).term("k", delta, 3)
    q = to_qexp(t, "k")
    out.append(Instance("⟨⟨t⟩⟩ ≈ t", to_qexp(to_alg(q, "k"), "k"), q, delta))

    # translating a unitary application equals substituting a unitary step
    g2 = bk.context(max_dim=4, max_vars=2)
    sigma = bk.ty(2)
    e = bk.term(g2, sigma, 2)
    U = named_unitary(haar_unitary(rng, dim(sigma)), sigma)
    lhs = to_alg(UApp(U, e), "y")
    rhs = alg_subst(to_alg(e, "x"), "x", "a", UStep(U, "a", "a", Apply("y", "a")))
    out.append(Instance("⟨U # e⟩ ≈ ⟨e⟩[x(a) ↦ U(a, y(a))]", to_qexp(lhs, "y"), to_qexp(rhs, "y"), g2))
    return out


# ---------------------------------------------------------------------------
# Runner


Builder = Callable[[Kit], list[Instance]]

SUITES: dict[str, Builder] = {
    "fig2-beta": beta_instances,
    "eta": eta_instances,
    "fig3-cc": cc_instances,
    "fig4-structural": structural_instances,
    "fig5-groupoid": groupoid_instances,
    "fig6-unitary": gate_instances,
    "fig10-semantic": generator_instances,
    "axiom20": axiom20_instances,
    "staton-AO": staton_instances,
    "roundtrip-bexp": roundtrip_instances,
}
ALIASES = {"staton": "staton-AO", "beta": "fig2-beta", "cc": "fig3-cc"}


def suite_names() -> list[str]:
    return list(SUITES)


def instances(suite: str, seed: int, rnd: int) -> list[Instance]:
    name = ALIASES.get(suite, suite)
    rng = np.random.default_rng([seed, rnd])
    return SUITES[name](Kit(rng))


def hygiene(f: Superoperator) -> tuple[float, float]:
    """(largest trace gain, smallest Choi eigenvalue) of a superoperator."""
    if f.src_dim == 0 or f.dst_dim == 0:
        return 0.0, 0.0
    gain = max_eigenvalue(trace_form(f)) - 1.0
    return gain, min_eigenvalue(choi_matrix(f))


def run_suite(
    suite: str,
    seed: int = 0,
    count: int = 100,
    tol: float = DEFAULT_TOL,
    check_hygiene: bool = True,
    check_catalog: bool = True,
) -> SuiteResult:
    name = ALIASES.get(suite, suite)
    if name not in SUITES:
        raise KeyError(f"unknown suite {suite}; known: {', '.join(SUITES)}")
    res = SuiteResult(name, seed, count)
    start = time.perf_counter()
    for rnd in range(count):
        for inst in instances(name, seed, rnd):
            _check_instance(res, inst, rnd, tol, check_hygiene, check_catalog)
    res.elapsed = time.perf_counter() - start
    return res


def _check_instance(res: SuiteResult, inst: Instance, rnd: int, tol: float, hyg: bool, cat: bool) -> None:
    def fail(msg: str, bucket: list[Failure] | None = None) -> None:
        (res.failures if bucket is None else bucket).append(Failure(res.suite, inst.case, res.seed, rnd, msg))

    if inst.vacuous:
        res.vacuous[inst.case] += 1
        return
    assert inst.lhs is not None and inst.rhs is not None
    res.checked[inst.case] += 1
    try:
        rep = equiv_report(inst.lhs, inst.rhs, inst.ctx, tol)
    except Exception as err:  # noqa: BLE001 - every failure is reported, not raised
        fail(f"{type(err).__name__}: {err}")
        return
    res.worst_deviation = max(res.worst_deviation, rep.deviation)
    if not rep.equal:
        fail(rep.dump())
    if hyg:
        for side in (rep.left, rep.right):
            gain, low = hygiene(side)
            res.hygiene_checked += 1
            res.max_trace_gain = max(res.max_trace_gain, gain)
            res.min_choi_eig = min(res.min_choi_eig, low)
            if gain > tol or low < -PSD_TOL:
                fail(f"hygiene: trace gain {gain:.3e}, min Choi eigenvalue {low:.3e}", res.hygiene_failures)
    if cat and inst.rule is not None:
        res.catalog_checked += 1
        try:
            got = apply_rule(inst.rule, inst.lhs, (), ctx=inst.ctx)
        except Exception as err:  # noqa: BLE001
            fail(f"catalog rule {inst.rule} raised {type(err).__name__}: {err}")
            return
        if got is None:
            fail(f"catalog rule {inst.rule} did not fire at the root")
            return
        rep2 = equiv_report(got, inst.rhs, inst.ctx, tol)
        if not rep2.equal:
            fail(f"catalog rule {inst.rule} disagrees with the equation: {rep2.dump()}")


def measurement_counterexample():  # type: ignore[no-untyped-def]
    """``q`` against measure-then-reprepare ``q``: returns the semantic report."""
    q = Var("q")
    reput = LetBang(q, (Put(BOOL, 0), Put(BOOL, 1)))
    return equiv_report(q, reput, {"q": QUBIT})


def type_of(inst: Instance) -> QType:
    assert inst.lhs is not None
    return infer_type(dict(inst.ctx), inst.lhs)


def iter_all(seed: int, count: int) -> Iterator[SuiteResult]:
    for name in SUITES:
        yield run_suite(name, seed, count)
