"""Shared term utilities for the tests."""

import itertools

from qeq.generate import TermGen, random_closed_type, random_context, rng_for
from qeq.syntax import Case, Inj, Let, LetBang, LetPair, Pair, Put, UApp, Var


def random_term(seed, n=2, depth=3):
    rng = rng_for(seed)
    ctx = random_context(rng, n)
    tau = random_closed_type(rng)
    return ctx, tau, TermGen(rng).term(ctx, tau, depth)


def rebind(e, names):
    """Rename every binder to a new name drawn from ``names``, consistently."""

    def go(t, env):
        if isinstance(t, Var):
            return Var(env.get(t.x, t.x))
        if isinstance(t, Put):
            return t
        if isinstance(t, Pair):
            return Pair(go(t.e1, env), go(t.e2, env))
        if isinstance(t, Let):
            x = next(names)
            return Let(x, go(t.e, env), go(t.body, {**env, t.x: x}))
        if isinstance(t, LetPair):
            a, b = next(names), next(names)
            return LetPair(a, b, go(t.e, env), go(t.body, {**env, t.x1: a, t.x2: b}))
        if isinstance(t, Inj):
            return Inj(t.i, go(t.e, env), t.ty)
        if isinstance(t, Case):
            a, b = next(names), next(names)
            return Case(go(t.e, env), a, go(t.e1, {**env, t.x1: a}), b, go(t.e2, {**env, t.x2: b}))
        if isinstance(t, LetBang):
            return LetBang(go(t.e, env), tuple(go(c, env) for c in t.branches), t.ty)
        if isinstance(t, UApp):
            return UApp(t.u, go(t.e, env))
        raise TypeError(t)

    return go(e, {})


def names(stem):
    return (f"{stem}{k}" for k in itertools.count())
