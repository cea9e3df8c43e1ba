"""Independent reference computations used to freeze expected values.

Nothing here calls the routine it checks: matrices are built entry by entry,
alpha-equivalence goes through de Bruijn indices, and type equivalence is
decided by explicit shape matching and by cardinality polynomials.
"""

from __future__ import annotations

import itertools
from collections import Counter
from typing import Mapping

import numpy as np

from qeq.qtypes import Lower, Oplus, QType, Tensor, TVar
from qeq.syntax import Case, Inj, Let, LetBang, LetPair, Pair, Put, QExp, UApp, Var

# ---------------------------------------------------------------------------
# Matrices


def kron_by_index(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    m, n = a.shape
    p, q = b.shape
    out = np.zeros((m * p, n * q), dtype=complex)
    for i in range(m):
        for j in range(n):
            for k in range(p):
                for l in range(q):
                    out[i * p + k, j * q + l] = a[i, j] * b[k, l]
    return out


def direct_sum_by_index(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    m, n = a.shape
    p, q = b.shape
    out = np.zeros((m + p, n + q), dtype=complex)
    for i in range(m):
        for j in range(n):
            out[i, j] = a[i, j]
    for i in range(p):
        for j in range(q):
            out[m + i, n + j] = b[i, j]
    return out


def unit(n: int, i: int, j: int) -> np.ndarray:
    e = np.zeros((n, n), dtype=complex)
    e[i, j] = 1
    return e


def choi_by_loops(apply, n: int, d: int) -> np.ndarray:  # type: ignore[no-untyped-def]
    """Σ_ij E_ij ⊗ f(E_ij), assembled block by block."""
    out = np.zeros((n * d, n * d), dtype=complex)
    for i in range(n):
        for j in range(n):
            out[i * d : (i + 1) * d, j * d : (j + 1) * d] = apply(unit(n, i, j))
    return out


def max_output_trace(apply, n: int) -> float:  # type: ignore[no-untyped-def]
    """max tr f(ρ) over density matrices ρ: the top eigenvalue of T_ij = tr f(E_ji)."""
    t = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            t[i, j] = np.trace(apply(unit(n, j, i)))
    t = (t + t.conj().T) / 2
    return float(np.max(np.linalg.eigvalsh(t))) if n else 0.0


def dephase(rho: np.ndarray) -> np.ndarray:
    return np.diag(np.diag(rho))


# ---------------------------------------------------------------------------
# Terms


def nameless(e: QExp, env: tuple[str, ...] = ()) -> object:
    """De Bruijn form: bound variables become indices, free ones stay names."""

    def var(x: str) -> object:
        for k, y in enumerate(reversed(env)):
            if y == x:
                return ("bound", k)
        return ("free", x)

    if isinstance(e, Var):
        return var(e.x)
    if isinstance(e, Put):
        return ("put", e.alpha, e.a)
    if isinstance(e, Pair):
        return ("pair", nameless(e.e1, env), nameless(e.e2, env))
    if isinstance(e, Let):
        return ("let", nameless(e.e, env), nameless(e.body, env + (e.x,)))
    if isinstance(e, LetPair):
        return ("letpair", nameless(e.e, env), nameless(e.body, env + (e.x1, e.x2)))
    if isinstance(e, Inj):
        return ("inj", e.i, nameless(e.e, env))
    if isinstance(e, Case):
        return ("case", nameless(e.e, env), nameless(e.e1, env + (e.x1,)), nameless(e.e2, env + (e.x2,)))
    if isinstance(e, LetBang):
        return ("bang", nameless(e.e, env), tuple(nameless(b, env) for b in e.branches))
    if isinstance(e, UApp):
        return ("uapp", e.u, nameless(e.e, env))
    raise TypeError(e)


def alpha_equal(a: QExp, b: QExp) -> bool:
    return nameless(a) == nameless(b)


def free_names(e: QExp) -> set[str]:
    out: set[str] = set()

    def walk(t: object) -> None:
        if isinstance(t, tuple):
            if len(t) == 2 and t[0] == "free":
                out.add(t[1])  # type: ignore[arg-type]
            for c in t:
                walk(c)

    walk(nameless(e))
    return out


# ---------------------------------------------------------------------------
# Open types


def shapes(sigma: QType) -> list[tuple[str, ...]]:
    """Variables carried by each wire-mode basis element, sorted."""
    if isinstance(sigma, TVar):
        return [(sigma.name,)]
    if isinstance(sigma, Lower):
        return [()] * sigma.base.card
    if isinstance(sigma, Tensor):
        return [tuple(sorted(a + b)) for a in shapes(sigma.l) for b in shapes(sigma.r)]
    if isinstance(sigma, Oplus):
        return shapes(sigma.l) + shapes(sigma.r)
    raise TypeError(sigma)


def natural_bijection_exists(sigma: QType, tau: QType) -> bool:
    """Search for a shape-respecting bijection between the two wire-mode bases.

    A bijection natural in every variable must pair each element with one
    carrying the same variables (with multiplicity); a greedy matching
    within each class finds one whenever the classes have equal sizes.
    """
    left = shapes(sigma)
    right = list(shapes(tau))
    if len(left) != len(right):
        return False
    used = [False] * len(right)
    for s in left:
        for k, t in enumerate(right):
            if not used[k] and t == s:
                used[k] = True
                break
        else:
            return False
    return all(used)


def card(sigma: QType, m: Mapping[str, int]) -> int:
    if isinstance(sigma, TVar):
        return m[sigma.name]
    if isinstance(sigma, Lower):
        return sigma.base.card
    if isinstance(sigma, Tensor):
        return card(sigma.l, m) * card(sigma.r, m)
    if isinstance(sigma, Oplus):
        return card(sigma.l, m) + card(sigma.r, m)
    raise TypeError(sigma)


def degree(sigma: QType) -> int:
    if isinstance(sigma, TVar):
        return 1
    if isinstance(sigma, Lower):
        return 0
    if isinstance(sigma, Tensor):
        return degree(sigma.l) + degree(sigma.r)
    if isinstance(sigma, Oplus):
        return max(degree(sigma.l), degree(sigma.r))
    raise TypeError(sigma)


def same_cardinality_polynomial(sigma: QType, tau: QType, names: list[str]) -> bool:
    """Equality of the cardinality polynomials, by evaluation on a large enough grid."""
    d = max(degree(sigma), degree(tau))
    for values in itertools.product(range(d + 1), repeat=len(names)):
        m = dict(zip(names, values))
        if card(sigma, m) != card(tau, m):
            return False
    return True


def shape_counter(sigma: QType) -> Counter:
    return Counter(shapes(sigma))


def brute_force_bijection_family(sigma: QType, tau: QType) -> bool:
    """Try every pairing of wire-mode basis elements.

    A pairing is a natural family exactly when each element is sent to one
    carrying the same variables, so it can be renamed into a bijection under
    every assignment.  Exponential; only for small bases.
    """
    left, right = shapes(sigma), shapes(tau)
    if len(left) != len(right):
        return False
    return any(all(s == right[j] for s, j in zip(left, perm)) for perm in itertools.permutations(range(len(right))))
