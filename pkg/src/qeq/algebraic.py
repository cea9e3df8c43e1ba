"""Algebraic presentation of binary quantum programs.

Terms are built from continuation application, pair splitting, qubit
allocation, measurement and unitary steps.  Wires hold values of binary
types; a continuation argument is a *wire tree*, a wire name or a pair of
trees, which lets a substitution pass a tuple of wires as one value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Union

from .qtypes import BOOL, QUBIT, QType, Tensor, is_binary
from .syntax import (
    Case,
    Inj,
    Let,
    LetBang,
    LetPair,
    NameSupply,
    Pair,
    Put,
    QExp,
    UApp,
    UnitaryExpr,
    Var,
    all_names,
    prim,
)

WireTree = Union[str, tuple["WireTree", "WireTree"]]


def tree(*wires: WireTree) -> WireTree:
    """Right-nested tuple of the given wires (a single wire stays a name)."""
    if not wires:
        raise ValueError("a wire tree needs at least one wire")
    if len(wires) == 1:
        return wires[0]
    return (wires[0], tree(*wires[1:]))


def leaves(t: WireTree) -> list[str]:
    if isinstance(t, str):
        return [t]
    return leaves(t[0]) + leaves(t[1])


def map_leaves(t: WireTree, fn: Callable[[str], WireTree]) -> WireTree:
    if isinstance(t, str):
        return fn(t)
    return (map_leaves(t[0], fn), map_leaves(t[1], fn))


class AlgTerm:
    pass


@dataclass(frozen=True)
class Apply(AlgTerm):
    k: str
    arg: WireTree


@dataclass(frozen=True)
class Split(AlgTerm):
    a: str
    a1: str
    a2: str
    t: AlgTerm


@dataclass(frozen=True)
class New(AlgTerm):
    a: str
    t: AlgTerm


@dataclass(frozen=True)
class Meas(AlgTerm):
    a: str
    t0: AlgTerm
    t1: AlgTerm


@dataclass(frozen=True)
class UStep(AlgTerm):
    """Apply ``u`` to the wires of ``arg`` and bind the result to the pattern ``out``."""

    u: UnitaryExpr
    arg: WireTree
    out: WireTree
    t: AlgTerm


def ustep(u: UnitaryExpr, a: WireTree, t: AlgTerm) -> UStep:
    """``U(a, t)``: the output reuses the input wire names."""
    return UStep(u, a, a, t)


# ---------------------------------------------------------------------------
# Typing


class AlgTypeError(Exception):
    pass


def tree_type(t: WireTree, delta: Mapping[str, QType]) -> QType:
    if isinstance(t, str):
        if t not in delta:
            raise AlgTypeError(f"wire {t} is not available")
        return delta[t]
    return Tensor(tree_type(t[0], delta), tree_type(t[1], delta))


def _bind_pattern(p: WireTree, ty: QType, delta: dict[str, QType]) -> None:
    if isinstance(p, str):
        if p in delta:
            raise AlgTypeError(f"wire {p} bound twice")
        delta[p] = ty
        return
    if not isinstance(ty, Tensor):
        raise AlgTypeError(f"pair pattern against {ty}")
    _bind_pattern(p[0], ty.l, delta)
    _bind_pattern(p[1], ty.r, delta)


def _distinct(ws: list[str]) -> None:
    if len(set(ws)) != len(ws):
        raise AlgTypeError(f"wires {ws} repeated")


def alg_type_errors(gamma: Mapping[str, QType], delta: Mapping[str, QType], t: AlgTerm) -> None:
    """Raise :class:`AlgTypeError` unless ``gamma | delta ⊢ t``."""
    for k, ty in gamma.items():
        if not is_binary(ty):
            raise AlgTypeError(f"continuation {k} has non-binary type {ty}")
    for a, ty in delta.items():
        if not is_binary(ty):
            raise AlgTypeError(f"wire {a} has non-binary type {ty}")
    _check(dict(gamma), dict(delta), t)


def _check(gamma: dict[str, QType], delta: dict[str, QType], t: AlgTerm) -> None:
    if isinstance(t, Apply):
        if t.k not in gamma:
            raise AlgTypeError(f"unknown continuation {t.k}")
        ws = leaves(t.arg)
        _distinct(ws)
        if set(ws) != set(delta):
            raise AlgTypeError(f"{t.k} must receive exactly the wires {sorted(delta)}, got {sorted(ws)}")
        got = tree_type(t.arg, delta)
        if got != gamma[t.k]:
            raise AlgTypeError(f"{t.k} expects {gamma[t.k]}, got {got}")
        return
    if isinstance(t, Split):
        ty = delta.get(t.a)
        if not isinstance(ty, Tensor):
            raise AlgTypeError(f"split of wire {t.a} of type {ty}")
        if t.a1 == t.a2:
            raise AlgTypeError("split binds the same name twice")
        rest = {w: s for w, s in delta.items() if w != t.a}
        for w in (t.a1, t.a2):
            if w in rest:
                raise AlgTypeError(f"wire {w} already in use")
        rest[t.a1], rest[t.a2] = ty.l, ty.r
        _check(gamma, rest, t.t)
        return
    if isinstance(t, New):
        if t.a in delta:
            raise AlgTypeError(f"wire {t.a} already in use")
        _check(gamma, {**delta, t.a: QUBIT}, t.t)
        return
    if isinstance(t, Meas):
        if delta.get(t.a) != QUBIT:
            raise AlgTypeError(f"measurement of wire {t.a} of type {delta.get(t.a)}")
        rest = {w: s for w, s in delta.items() if w != t.a}
        _check(gamma, rest, t.t0)
        _check(gamma, rest, t.t1)
        return
    if isinstance(t, UStep):
        ws = leaves(t.arg)
        _distinct(ws)
        if not is_binary(t.u.src) or not is_binary(t.u.dst):
            raise AlgTypeError(f"unitary on non-binary types {t.u.src} -> {t.u.dst}")
        got = tree_type(t.arg, delta)
        if got != t.u.src:
            raise AlgTypeError(f"unitary expects {t.u.src}, got {got}")
        rest = {w: s for w, s in delta.items() if w not in ws}
        _distinct(leaves(t.out))
        _bind_pattern(t.out, t.u.dst, rest)
        _check(gamma, rest, t.t)
        return
    raise TypeError(t)


def check_alg(gamma: Mapping[str, QType], delta: Mapping[str, QType], t: AlgTerm) -> bool:
    try:
        alg_type_errors(gamma, delta, t)
    except AlgTypeError:
        return False
    return True


# ---------------------------------------------------------------------------
# Names


def free_wires(t: AlgTerm) -> frozenset[str]:
    if isinstance(t, Apply):
        return frozenset(leaves(t.arg))
    if isinstance(t, Split):
        return (free_wires(t.t) - {t.a1, t.a2}) | {t.a}
    if isinstance(t, New):
        return free_wires(t.t) - {t.a}
    if isinstance(t, Meas):
        return free_wires(t.t0) | free_wires(t.t1) | {t.a}
    if isinstance(t, UStep):
        return (free_wires(t.t) - set(leaves(t.out))) | set(leaves(t.arg))
    raise TypeError(t)


def wire_names(t: AlgTerm) -> set[str]:
    if isinstance(t, Apply):
        return set(leaves(t.arg))
    if isinstance(t, Split):
        return {t.a, t.a1, t.a2} | wire_names(t.t)
    if isinstance(t, New):
        return {t.a} | wire_names(t.t)
    if isinstance(t, Meas):
        return {t.a} | wire_names(t.t0) | wire_names(t.t1)
    if isinstance(t, UStep):
        return set(leaves(t.arg)) | set(leaves(t.out)) | wire_names(t.t)
    raise TypeError(t)


def continuations(t: AlgTerm) -> set[str]:
    if isinstance(t, Apply):
        return {t.k}
    if isinstance(t, (Split, New, UStep)):
        return continuations(t.t)
    if isinstance(t, Meas):
        return continuations(t.t0) | continuations(t.t1)
    raise TypeError(t)


def _fresh(base: str, avoid: set[str]) -> str:
    k = 0
    while f"{base}{k}" in avoid:
        k += 1
    name = f"{base}{k}"
    avoid.add(name)
    return name


def rename_wires(t: AlgTerm, r: Mapping[str, WireTree], avoid: set[str] | None = None) -> AlgTerm:
    """Capture-avoiding substitution of wire trees for free wires.

    A split whose wire is replaced by a pair is reduced on the spot.
    """
    if not r:
        return t
    if avoid is None:
        avoid = wire_names(t) | {w for v in r.values() for w in leaves(v)} | set(r)
    incoming = {w for v in r.values() for w in leaves(v)}

    def sub_leaf(w: str) -> WireTree:
        return r.get(w, w)

    def binder(b: str, body_r: dict[str, WireTree]) -> str:
        body_r.pop(b, None)
        if b in incoming:
            nb = _fresh(b.rstrip("0123456789") or "w", avoid)
            body_r[b] = nb
            return nb
        return b

    if isinstance(t, Apply):
        return Apply(t.k, map_leaves(t.arg, sub_leaf))
    if isinstance(t, Meas):
        a = r.get(t.a, t.a)
        if not isinstance(a, str):
            raise AlgTypeError(f"measurement of a pair of wires {a}")
        return Meas(a, rename_wires(t.t0, r, avoid), rename_wires(t.t1, r, avoid))
    if isinstance(t, New):
        br = dict(r)
        a = binder(t.a, br)
        return New(a, rename_wires(t.t, br, avoid))
    if isinstance(t, Split):
        src = r.get(t.a, t.a)
        if isinstance(src, tuple):
            br = {k: v for k, v in r.items() if k not in (t.a1, t.a2)}
            br[t.a1], br[t.a2] = src[0], src[1]
            return rename_wires(t.t, br, avoid)
        br = dict(r)
        a1 = binder(t.a1, br)
        a2 = binder(t.a2, br)
        return Split(src, a1, a2, rename_wires(t.t, br, avoid))
    if isinstance(t, UStep):
        arg = map_leaves(t.arg, sub_leaf)
        br = dict(r)
        out = map_leaves(t.out, lambda b: binder(b, br))
        return UStep(t.u, arg, out, rename_wires(t.t, br, avoid))
    raise TypeError(t)


def alg_subst(t: AlgTerm, x: str, param: WireTree, u: AlgTerm) -> AlgTerm:
    """``t[x(param) ↦ u]``: replace every call of continuation ``x`` by ``u``.

    ``param`` is the pattern of wires that ``u`` expects.  Binders of ``t`` that
    would capture free wires of ``u`` are renamed.
    """
    params = set(leaves(param))
    u_free = free_wires(u) - params
    avoid = wire_names(t) | wire_names(u)

    def go(s: AlgTerm) -> AlgTerm:
        if isinstance(s, Apply):
            if s.k != x:
                return s
            m = _match_pattern(param, s.arg)
            return rename_wires(u, m, set(avoid) | set(leaves(s.arg)))
        if isinstance(s, Meas):
            return Meas(s.a, go(s.t0), go(s.t1))
        if isinstance(s, New):
            if s.a in u_free:
                nb = _fresh(s.a.rstrip("0123456789") or "w", avoid)
                return New(nb, go(rename_wires(s.t, {s.a: nb})))
            return New(s.a, go(s.t))
        if isinstance(s, Split):
            r: dict[str, WireTree] = {}
            names = []
            for b in (s.a1, s.a2):
                if b in u_free:
                    nb = _fresh(b.rstrip("0123456789") or "w", avoid)
                    r[b] = nb
                    names.append(nb)
                else:
                    names.append(b)
            body = rename_wires(s.t, r) if r else s.t
            return Split(s.a, names[0], names[1], go(body))
        if isinstance(s, UStep):
            r = {}

            def ren(b: str) -> WireTree:
                if b in u_free:
                    nb = _fresh(b.rstrip("0123456789") or "w", avoid)
                    r[b] = nb
                    return nb
                return b

            out = map_leaves(s.out, ren)
            body = rename_wires(s.t, r) if r else s.t
            return UStep(s.u, s.arg, out, go(body))
        raise TypeError(s)

    return go(t)


def _match_pattern(p: WireTree, arg: WireTree) -> dict[str, WireTree]:
    if isinstance(p, str):
        return {p: arg}
    if isinstance(arg, str):
        raise AlgTypeError(f"argument {arg} does not have the shape of {p}")
    return {**_match_pattern(p[0], arg[0]), **_match_pattern(p[1], arg[1])}


def alg_alpha_eq(t1: AlgTerm, t2: AlgTerm) -> bool:
    return alg_canonical(t1) == alg_canonical(t2)


def alg_canonical(t: AlgTerm) -> AlgTerm:
    """Rename bound wires to ``_0, _1, ...`` in binding order."""
    counter = iter(range(10**9))

    def go(s: AlgTerm, env: dict[str, str]) -> AlgTerm:
        def look(w: str) -> str:
            return env.get(w, w)

        if isinstance(s, Apply):
            return Apply(s.k, map_leaves(s.arg, look))
        if isinstance(s, Meas):
            return Meas(look(s.a), go(s.t0, env), go(s.t1, env))
        if isinstance(s, New):
            nb = f"_{next(counter)}"
            return New(nb, go(s.t, {**env, s.a: nb}))
        if isinstance(s, Split):
            n1, n2 = f"_{next(counter)}", f"_{next(counter)}"
            return Split(look(s.a), n1, n2, go(s.t, {**env, s.a1: n1, s.a2: n2}))
        if isinstance(s, UStep):
            arg = map_leaves(s.arg, look)
            new_env = dict(env)

            def bind(b: str) -> str:
                nb = f"_{next(counter)}"
                new_env[b] = nb
                return nb

            out = map_leaves(s.out, bind)
            return UStep(s.u, arg, out, go(s.t, new_env))
        raise TypeError(s)

    return go(t, {})


# ---------------------------------------------------------------------------
# Translations


def tree_exp(t: WireTree) -> QExp:
    if isinstance(t, str):
        return Var(t)
    return Pair(tree_exp(t[0]), tree_exp(t[1]))


def _bind_out(out: WireTree, e: QExp, body: QExp, supply: NameSupply) -> QExp:
    if isinstance(out, str):
        return Let(out, e, body)
    w1 = out[0] if isinstance(out[0], str) else supply("o")
    w2 = out[1] if isinstance(out[1], str) else supply("o")
    inner = body
    if not isinstance(out[1], str):
        inner = _bind_out(out[1], Var(w2), inner, supply)
    if not isinstance(out[0], str):
        inner = _bind_out(out[0], Var(w1), inner, supply)
    return LetPair(w1, w2, e, inner)


def to_qexp(t: AlgTerm, k: str | None = None) -> QExp:
    """Quantum expression of a term with a single continuation ``k``."""
    ks = continuations(t)
    if k is None:
        if len(ks) != 1:
            raise AlgTypeError(f"expected one continuation, found {sorted(ks)}")
        (k,) = ks
    elif ks - {k}:
        raise AlgTypeError(f"unexpected continuations {sorted(ks - {k})}")
    supply = NameSupply(wire_names(t), stem="o")

    def go(s: AlgTerm) -> QExp:
        if isinstance(s, Apply):
            return tree_exp(s.arg)
        if isinstance(s, New):
            return Let(s.a, Put(BOOL, 0), go(s.t))
        if isinstance(s, Meas):
            return LetBang(Var(s.a), (go(s.t0), go(s.t1)))
        if isinstance(s, Split):
            return LetPair(s.a1, s.a2, Var(s.a), go(s.t))
        if isinstance(s, UStep):
            return _bind_out(s.out, UApp(s.u, tree_exp(s.arg)), go(s.t), supply)
        raise TypeError(s)

    return go(t)


class NotBinaryFragment(ValueError):
    pass


def in_binary_fragment(e: QExp) -> bool:
    """No sums; every measurement and preparation is on ``Lower Bool``."""
    try:
        _fragment(e)
    except NotBinaryFragment:
        return False
    return True


def _fragment(e: QExp) -> None:
    if isinstance(e, (Inj, Case)):
        raise NotBinaryFragment("sum types are outside the binary fragment")
    if isinstance(e, Put):
        if e.alpha != BOOL:
            raise NotBinaryFragment(f"preparation of {e.alpha}")
        return
    if isinstance(e, LetBang):
        if len(e.branches) != 2:
            raise NotBinaryFragment("measurement with other than two outcomes")
        _fragment(e.e)
        for b in e.branches:
            _fragment(b)
        return
    if isinstance(e, UApp):
        if not (is_binary(e.u.src) and is_binary(e.u.dst)):
            raise NotBinaryFragment(f"unitary on {e.u.src}")
        _fragment(e.e)
        return
    if isinstance(e, Var):
        return
    if isinstance(e, (Let, LetPair)):
        _fragment(e.e)
        _fragment(e.body)
        return
    if isinstance(e, Pair):
        _fragment(e.e1)
        _fragment(e.e2)
        return
    raise TypeError(e)


def to_alg(e: QExp, y: str = "y", avoid: set[str] | None = None) -> AlgTerm:
    """Algebraic term for ``e`` returning its value to continuation ``y``."""
    _fragment(e)
    names = set(all_names(e)) | set(avoid or ()) | {y}
    wires = NameSupply(names, stem="a")
    konts = NameSupply(names, stem="k")

    def go(t: QExp, out: str) -> AlgTerm:
        if isinstance(t, Var):
            return Apply(out, t.x)
        if isinstance(t, Let):
            k = konts()
            return alg_subst(go(t.e, k), k, t.x, go(t.body, out))
        if isinstance(t, Pair):
            k1, k2 = konts(), konts()
            x1, x2 = wires(), wires()
            second = alg_subst(go(t.e2, k2), k2, x2, Apply(out, (x1, x2)))
            return alg_subst(go(t.e1, k1), k1, x1, second)
        if isinstance(t, LetPair):
            k = konts()
            w = wires()
            return alg_subst(go(t.e, k), k, w, Split(w, t.x1, t.x2, go(t.body, out)))
        if isinstance(t, Put):
            a = wires()
            if t.a == 0:
                return New(a, Apply(out, a))
            return New(a, ustep(prim("X"), a, Apply(out, a)))
        if isinstance(t, LetBang):
            k = konts()
            q = wires()
            return alg_subst(go(t.e, k), k, q, Meas(q, go(t.branches[0], out), go(t.branches[1], out)))
        if isinstance(t, UApp):
            k = konts()
            a, b = wires(), wires()
            return alg_subst(go(t.e, k), k, a, UStep(t.u, a, b, Apply(out, b)))
        raise TypeError(t)

    return go(e, y)


# ---------------------------------------------------------------------------
# Axioms as instance generators


@dataclass(frozen=True)
class AxiomTemplate:
    """An axiom with continuation metavariables.

    ``metas`` maps each metavariable to its parameter types; an instance
    substitutes a concrete term for every metavariable.
    """

    name: str
    lhs: AlgTerm
    rhs: AlgTerm
    delta: Mapping[str, QType]
    metas: Mapping[str, tuple[QType, ...]]

    def instantiate(self, bodies: Mapping[str, tuple[tuple[str, ...], AlgTerm]]) -> tuple[AlgTerm, AlgTerm]:
        """``bodies[x] = (params, term)``; each term uses only the result continuation."""
        lhs, rhs = self.lhs, self.rhs
        for x, (params, body) in bodies.items():
            p = tree(*params)
            lhs = alg_subst(lhs, x, p, body)
            rhs = alg_subst(rhs, x, p, body)
        return lhs, rhs


def controlled(u: UnitaryExpr, v: UnitaryExpr) -> UnitaryExpr:
    """``D(U, V)`` on ``Qubit ⊗ σ``: ``U`` on the target when the control is 0, ``V`` when 1.

    With the basis ordering used here the distributivity isomorphism is the
    identity, so the matrix is the block diagonal ``U ⊕ V``.
    """
    from .linalg import direct_sum
    from .semantics import denote_unitary
    from .syntax import Primitive

    if u.src != v.src or u.dst != u.src or v.dst != v.src:
        raise ValueError("controlled unitaries need endomorphisms of one type")
    m = direct_sum(denote_unitary(u), denote_unitary(v))
    ty = Tensor(QUBIT, u.src)
    return Primitive(f"D({_uname(u)},{_uname(v)})", m, ty, ty)


def _uname(u: UnitaryExpr) -> str:
    return getattr(u, "name", None) or type(u).__name__


def alg_axioms(u: UnitaryExpr, v: UnitaryExpr) -> tuple[AxiomTemplate, ...]:
    """Axioms A to O, with ``u`` and ``v`` single-qubit unitaries.

    Nullary metavariables are given the extra wire ``c`` so that every
    continuation call carries at least one wire.
    """
    from .syntax import UCompose, UId, UTensor

    Q = QUBIT
    QQ = Tensor(Q, Q)
    X = prim("X")
    swap = prim("SWAP")
    d = controlled(u, v)

    def call(x: str, *ws: str) -> Apply:
        return Apply(x, tree(*ws))

    out = [
        AxiomTemplate(
            "A",
            ustep(X, "a", Meas("a", call("x", "c"), call("y", "c"))),
            Meas("a", call("y", "c"), call("x", "c")),
            {"a": Q, "c": Q},
            {"x": (Q,), "y": (Q,)},
        ),
        AxiomTemplate(
            "B",
            Meas("a", ustep(u, "b", call("x", "b", "c")), ustep(v, "b", call("y", "b", "c"))),
            ustep(d, ("a", "b"), Meas("a", call("x", "b", "c"), call("y", "b", "c"))),
            {"a": Q, "b": Q, "c": Q},
            {"x": (Q, Q), "y": (Q, Q)},
        ),
        AxiomTemplate(
            "C",
            ustep(u, "a", Meas("a", call("x", "c"), call("x", "c"))),
            Meas("a", call("x", "c"), call("x", "c")),
            {"a": Q, "c": Q},
            {"x": (Q,)},
        ),
        AxiomTemplate(
            "D",
            New("a", Meas("a", call("x", "c"), call("y", "c"))),
            call("x", "c"),
            {"c": Q},
            {"x": (Q,), "y": (Q,)},
        ),
        AxiomTemplate(
            "E",
            New("a", ustep(d, ("a", "b"), call("x", "a", "b", "c"))),
            ustep(u, "b", New("a", call("x", "a", "b", "c"))),
            {"b": Q, "c": Q},
            {"x": (Q, Q, Q)},
        ),
        AxiomTemplate(
            "F",
            ustep(swap, ("a", "b"), call("x", "a", "b", "c")),
            call("x", "b", "a", "c"),
            {"a": Q, "b": Q, "c": Q},
            {"x": (Q, Q, Q)},
        ),
        AxiomTemplate(
            "G",
            ustep(UId(Q), "a", call("x", "a", "c")),
            call("x", "a", "c"),
            {"a": Q, "c": Q},
            {"x": (Q, Q)},
        ),
        AxiomTemplate(
            "H",
            ustep(UCompose(v, u), "a", call("x", "a", "c")),
            ustep(u, "a", ustep(v, "a", call("x", "a", "c"))),
            {"a": Q, "c": Q},
            {"x": (Q, Q)},
        ),
        AxiomTemplate(
            "I",
            ustep(UTensor(u, v), ("a", "b"), call("x", "a", "b", "c")),
            ustep(u, "a", ustep(v, "b", call("x", "a", "b", "c"))),
            {"a": Q, "b": Q, "c": Q},
            {"x": (Q, Q, Q)},
        ),
        AxiomTemplate(
            "J",
            Meas("a", Meas("b", call("u", "c"), call("v", "c")), Meas("b", call("x", "c"), call("y", "c"))),
            Meas("b", Meas("a", call("u", "c"), call("x", "c")), Meas("a", call("v", "c"), call("y", "c"))),
            {"a": Q, "b": Q, "c": Q},
            {"u": (Q,), "v": (Q,), "x": (Q,), "y": (Q,)},
        ),
        AxiomTemplate(
            "K",
            New("a", New("b", call("x", "a", "b", "c"))),
            New("b", New("a", call("x", "a", "b", "c"))),
            {"c": Q},
            {"x": (Q, Q, Q)},
        ),
        AxiomTemplate(
            "L",
            New("a", Meas("b", call("x", "a", "c"), call("y", "a", "c"))),
            Meas("b", New("a", call("x", "a", "c")), New("a", call("y", "a", "c"))),
            {"b": Q, "c": Q},
            {"x": (Q, Q), "y": (Q, Q)},
        ),
        AxiomTemplate(
            "M",
            Split("a", "a1", "a2", Split("b", "b1", "b2", call("x", "a1", "a2", "b1", "b2"))),
            Split("b", "b1", "b2", Split("a", "a1", "a2", call("x", "a1", "a2", "b1", "b2"))),
            {"a": QQ, "b": QQ},
            {"x": (Q, Q, Q, Q)},
        ),
        AxiomTemplate(
            "N",
            Split("a", "a1", "a2", New("b", call("x", "a1", "a2", "b"))),
            New("b", Split("a", "a1", "a2", call("x", "a1", "a2", "b"))),
            {"a": QQ},
            {"x": (Q, Q, Q)},
        ),
        AxiomTemplate(
            "O",
            Split("a", "a1", "a2", Meas("b", call("x", "a1", "a2"), call("y", "a1", "a2"))),
            Meas("b", Split("a", "a1", "a2", call("x", "a1", "a2")), Split("a", "a1", "a2", call("y", "a1", "a2"))),
            {"a": QQ, "b": Q},
            {"x": (Q, Q), "y": (Q, Q)},
        ),
    ]
    return tuple(out)


AXIOM_NAMES = tuple("ABCDEFGHIJKLMNO")


def result_type_of(t: AlgTerm, gamma: Mapping[str, QType]) -> QType:
    (k,) = continuations(t)
    return gamma[k]


__all__ = [
    "AlgTerm",
    "Apply",
    "Split",
    "New",
    "Meas",
    "UStep",
    "ustep",
    "tree",
    "leaves",
    "check_alg",
    "alg_type_errors",
    "alg_subst",
    "alg_alpha_eq",
    "alg_canonical",
    "to_qexp",
    "to_alg",
    "in_binary_fragment",
    "alg_axioms",
    "controlled",
    "free_wires",
]
