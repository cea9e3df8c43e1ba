"""Abstract syntax of linear quantum expressions and syntactic unitaries.

Terms are immutable dataclasses.  Bound variables are explicit names; all
operations here treat terms up to renaming of bound variables.

Child positions (used by paths into a term)::

    Let        0 = bound term, 1 = body
    Pair       0, 1
    LetPair    0 = bound term, 1 = body
    Inj        0
    Case       0 = scrutinee, 1 = left branch, 2 = right branch
    LetBang    0 = scrutinee, 1 + a = branch for element a
    UApp       0
"""

from __future__ import annotations

import hashlib
import itertools
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

import numpy as np

from .qtypes import (
    BOOL,
    UNIT,
    VOID,
    FinType,
    Lower,
    Oplus,
    Prod,
    QType,
    Sum,
    Tensor,
    TypeAssignment,
    dim,
    instantiate,
)


# ---------------------------------------------------------------------------
# Type equivalence witnesses


class UnitaryEquiv(ABC):
    """A derivation that two open quantum types are equivalent."""

    @property
    @abstractmethod
    def src(self) -> QType:
        ...

    @property
    @abstractmethod
    def dst(self) -> QType:
        ...

    def size(self) -> int:
        """Number of generator leaves (Refl counts as zero)."""
        return 1


@dataclass(frozen=True)
class Refl(UnitaryEquiv):
    sigma: QType

    @property
    def src(self) -> QType:
        return self.sigma

    @property
    def dst(self) -> QType:
        return self.sigma

    def size(self) -> int:
        return 0


@dataclass(frozen=True)
class Symm(UnitaryEquiv):
    f: UnitaryEquiv

    @property
    def src(self) -> QType:
        return self.f.dst

    @property
    def dst(self) -> QType:
        return self.f.src

    def size(self) -> int:
        return self.f.size()


@dataclass(frozen=True)
class Trans(UnitaryEquiv):
    """``f`` followed by ``g``."""

    f: UnitaryEquiv
    g: UnitaryEquiv

    def __post_init__(self) -> None:
        if self.f.dst != self.g.src:
            raise TypeError(f"cannot chain {self.f.dst} with {self.g.src}")

    @property
    def src(self) -> QType:
        return self.f.src

    @property
    def dst(self) -> QType:
        return self.g.dst

    def size(self) -> int:
        return self.f.size() + self.g.size()


@dataclass(frozen=True)
class CongTensor(UnitaryEquiv):
    f: UnitaryEquiv
    g: UnitaryEquiv

    @property
    def src(self) -> QType:
        return Tensor(self.f.src, self.g.src)

    @property
    def dst(self) -> QType:
        return Tensor(self.f.dst, self.g.dst)

    def size(self) -> int:
        return self.f.size() + self.g.size()


@dataclass(frozen=True)
class CongOplus(UnitaryEquiv):
    f: UnitaryEquiv
    g: UnitaryEquiv

    @property
    def src(self) -> QType:
        return Oplus(self.f.src, self.g.src)

    @property
    def dst(self) -> QType:
        return Oplus(self.f.dst, self.g.dst)

    def size(self) -> int:
        return self.f.size() + self.g.size()


@dataclass(frozen=True)
class SwapTensor(UnitaryEquiv):
    s1: QType
    s2: QType

    @property
    def src(self) -> QType:
        return Tensor(self.s1, self.s2)

    @property
    def dst(self) -> QType:
        return Tensor(self.s2, self.s1)


@dataclass(frozen=True)
class SwapOplus(UnitaryEquiv):
    s1: QType
    s2: QType

    @property
    def src(self) -> QType:
        return Oplus(self.s1, self.s2)

    @property
    def dst(self) -> QType:
        return Oplus(self.s2, self.s1)


@dataclass(frozen=True)
class AssocTensor(UnitaryEquiv):
    """``s1 ⊗ (s2 ⊗ s3) ≃ (s1 ⊗ s2) ⊗ s3``."""

    s1: QType
    s2: QType
    s3: QType

    @property
    def src(self) -> QType:
        return Tensor(self.s1, Tensor(self.s2, self.s3))

    @property
    def dst(self) -> QType:
        return Tensor(Tensor(self.s1, self.s2), self.s3)


@dataclass(frozen=True)
class AssocOplus(UnitaryEquiv):
    """``s1 ⊕ (s2 ⊕ s3) ≃ (s1 ⊕ s2) ⊕ s3``."""

    s1: QType
    s2: QType
    s3: QType

    @property
    def src(self) -> QType:
        return Oplus(self.s1, Oplus(self.s2, self.s3))

    @property
    def dst(self) -> QType:
        return Oplus(Oplus(self.s1, self.s2), self.s3)


@dataclass(frozen=True)
class Distr(UnitaryEquiv):
    """``s1 ⊗ (s2 ⊕ s3) ≃ (s1 ⊗ s2) ⊕ (s1 ⊗ s3)``."""

    s1: QType
    s2: QType
    s3: QType

    @property
    def src(self) -> QType:
        return Tensor(self.s1, Oplus(self.s2, self.s3))

    @property
    def dst(self) -> QType:
        return Oplus(Tensor(self.s1, self.s2), Tensor(self.s1, self.s3))


@dataclass(frozen=True)
class LowerTensor(UnitaryEquiv):
    a1: FinType
    a2: FinType

    @property
    def src(self) -> QType:
        return Tensor(Lower(self.a1), Lower(self.a2))

    @property
    def dst(self) -> QType:
        return Lower(Prod(self.a1, self.a2))


@dataclass(frozen=True)
class LowerOplus(UnitaryEquiv):
    a1: FinType
    a2: FinType

    @property
    def src(self) -> QType:
        return Oplus(Lower(self.a1), Lower(self.a2))

    @property
    def dst(self) -> QType:
        return Lower(Sum(self.a1, self.a2))


@dataclass(frozen=True)
class LUnitTensor(UnitaryEquiv):
    """``Lower () ⊗ s ≃ s``."""

    s: QType

    @property
    def src(self) -> QType:
        return Tensor(Lower(UNIT), self.s)

    @property
    def dst(self) -> QType:
        return self.s


@dataclass(frozen=True)
class LUnitOplus(UnitaryEquiv):
    """``Lower Void ⊕ s ≃ s``."""

    s: QType

    @property
    def src(self) -> QType:
        return Oplus(Lower(VOID), self.s)

    @property
    def dst(self) -> QType:
        return self.s


@dataclass(frozen=True)
class LZero(UnitaryEquiv):
    """``Lower Void ⊗ s ≃ Lower Void``."""

    s: QType

    @property
    def src(self) -> QType:
        return Tensor(Lower(VOID), self.s)

    @property
    def dst(self) -> QType:
        return Lower(VOID)


@dataclass(frozen=True)
class LowerIso(UnitaryEquiv):
    """``Lower a1 ≃ Lower a2`` for finite types of equal cardinality.

    ``perm[i]`` is the image of element ``i``; ``None`` means the identity on
    indices.
    """

    a1: FinType
    a2: FinType
    perm: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.a1.card != self.a2.card:
            raise TypeError(f"{self.a1} and {self.a2} have different cardinalities")
        if self.perm is not None and sorted(self.perm) != list(range(self.a1.card)):
            raise ValueError(f"{self.perm} is not a permutation")

    @property
    def src(self) -> QType:
        return Lower(self.a1)

    @property
    def dst(self) -> QType:
        return Lower(self.a2)

    def image(self, i: int) -> int:
        return i if self.perm is None else self.perm[i]

    def preimage(self, j: int) -> int:
        return j if self.perm is None else self.perm.index(j)


def trans(*fs: UnitaryEquiv) -> UnitaryEquiv:
    """Chain a non-empty sequence of equivalences left to right, dropping Refl."""
    parts = [f for f in fs if not isinstance(f, Refl)]
    if not parts:
        return fs[0]
    out = parts[0]
    for g in parts[1:]:
        out = Trans(out, g)
    return out


# ---------------------------------------------------------------------------
# Unitary expressions


class UnitaryExpr(ABC):
    @property
    @abstractmethod
    def src(self) -> QType:
        ...

    @property
    @abstractmethod
    def dst(self) -> QType:
        ...


@dataclass(frozen=True)
class UId(UnitaryExpr):
    sigma: QType

    @property
    def src(self) -> QType:
        return self.sigma

    @property
    def dst(self) -> QType:
        return self.sigma


@dataclass(frozen=True)
class UCompose(UnitaryExpr):
    """``v`` after ``u``."""

    v: UnitaryExpr
    u: UnitaryExpr

    def __post_init__(self) -> None:
        if self.u.dst != self.v.src:
            raise TypeError(f"compose: {self.u.dst} does not match {self.v.src}")

    @property
    def src(self) -> QType:
        return self.u.src

    @property
    def dst(self) -> QType:
        return self.v.dst


@dataclass(frozen=True)
class UAdjoint(UnitaryExpr):
    u: UnitaryExpr

    @property
    def src(self) -> QType:
        return self.u.dst

    @property
    def dst(self) -> QType:
        return self.u.src


@dataclass(frozen=True)
class UTensor(UnitaryExpr):
    u: UnitaryExpr
    v: UnitaryExpr

    @property
    def src(self) -> QType:
        return Tensor(self.u.src, self.v.src)

    @property
    def dst(self) -> QType:
        return Tensor(self.u.dst, self.v.dst)


@dataclass(frozen=True)
class UDirectSum(UnitaryExpr):
    u: UnitaryExpr
    v: UnitaryExpr

    @property
    def src(self) -> QType:
        return Oplus(self.u.src, self.v.src)

    @property
    def dst(self) -> QType:
        return Oplus(self.u.dst, self.v.dst)


@dataclass(frozen=True)
class Primitive(UnitaryExpr):
    """A named unitary matrix.  Equality and hashing use the name and endpoints."""

    name: str
    matrix: np.ndarray = field(compare=False, repr=False)
    src_: QType
    dst_: QType

    def __post_init__(self) -> None:
        from .linalg import is_unitary

        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        if m.shape != (dim(self.dst_), dim(self.src_)):
            raise TypeError(f"primitive {self.name}: shape {m.shape} does not fit its endpoints")
        if not is_unitary(m, 1e-9):
            raise ValueError(f"primitive {self.name} is not unitary")

    @property
    def src(self) -> QType:
        return self.src_

    @property
    def dst(self) -> QType:
        return self.dst_


@dataclass(frozen=True)
class FromEquiv(UnitaryExpr):
    """The permutation unitary induced by a type equivalence under an assignment."""

    f: UnitaryEquiv
    m: TypeAssignment = TypeAssignment()

    @property
    def src(self) -> QType:
        return instantiate(self.f.src, self.m)

    @property
    def dst(self) -> QType:
        return instantiate(self.f.dst, self.m)


def named_unitary(matrix: np.ndarray, src: QType, dst: QType | None = None, prefix: str = "U") -> Primitive:
    """Primitive whose name is derived from its entries, so equal names mean equal matrices."""
    m = np.asarray(matrix, dtype=complex)
    digest = hashlib.sha1(np.round(m, 12).tobytes()).hexdigest()[:10]
    return Primitive(f"{prefix}_{digest}", m, src, dst if dst is not None else src)


_S2 = 1 / np.sqrt(2)

PRIMITIVE_MATRICES: dict[str, tuple[np.ndarray, int]] = {
    "X": (np.array([[0, 1], [1, 0]]), 1),
    "Y": (np.array([[0, -1j], [1j, 0]]), 1),
    "Z": (np.array([[1, 0], [0, -1]]), 1),
    "H": (np.array([[_S2, _S2], [_S2, -_S2]]), 1),
    "S": (np.array([[1, 0], [0, 1j]]), 1),
    "T": (np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]]), 1),
    "CNOT": (np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]), 2),
    "CZ": (np.diag([1, 1, 1, -1]), 2),
    "SWAP": (np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]), 2),
}


def prim(name: str) -> Primitive:
    """Look up a built-in gate on qubits (``X Y Z H S T CNOT CZ SWAP``)."""
    from .qtypes import QUBIT

    try:
        matrix, arity = PRIMITIVE_MATRICES[name]
    except KeyError:
        raise KeyError(f"unknown primitive {name}") from None
    t = QUBIT if arity == 1 else Tensor(QUBIT, QUBIT)
    return Primitive(name, matrix, t, t)


# ---------------------------------------------------------------------------
# Expressions


class QExp(ABC):
    pass


@dataclass(frozen=True)
class Var(QExp):
    x: str


@dataclass(frozen=True)
class Let(QExp):
    x: str
    e: QExp
    body: QExp


@dataclass(frozen=True)
class Pair(QExp):
    e1: QExp
    e2: QExp


@dataclass(frozen=True)
class LetPair(QExp):
    x1: str
    x2: str
    e: QExp
    body: QExp


@dataclass(frozen=True)
class Inj(QExp):
    """Injection ``i`` (1 or 2) into the sum type ``ty`` (``None`` if not annotated)."""

    i: int
    e: QExp
    ty: QType | None = None

    def __post_init__(self) -> None:
        if self.i not in (1, 2):
            raise ValueError("injection index must be 1 or 2")
        if self.ty is not None and not isinstance(self.ty, Oplus):
            raise TypeError("injection annotation must be a sum type")


@dataclass(frozen=True)
class Case(QExp):
    e: QExp
    x1: str
    e1: QExp
    x2: str
    e2: QExp


@dataclass(frozen=True)
class Put(QExp):
    alpha: FinType
    a: int

    def __post_init__(self) -> None:
        if not 0 <= self.a < self.alpha.card:
            raise IndexError(f"element {self.a} out of range for {self.alpha}")


@dataclass(frozen=True)
class LetBang(QExp):
    """Measure ``e`` and continue with the branch for the observed element.

    ``ty`` is the result type; it is only needed (and only compared) when the
    family is empty.
    """

    e: QExp
    branches: tuple[QExp, ...]
    ty: QType | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "branches", tuple(self.branches))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LetBang):
            return NotImplemented
        if self.e != other.e or self.branches != other.branches:
            return False
        return bool(self.branches) or self.ty == other.ty

    def __hash__(self) -> int:
        return hash((LetBang, self.e, self.branches, None if self.branches else self.ty))


@dataclass(frozen=True)
class UApp(QExp):
    u: UnitaryExpr
    e: QExp


@dataclass(frozen=True)
class LinearFn:
    """A suspended linear function ``λ param. body``."""

    param: str
    param_type: QType
    body: QExp


def suspend(param: str, param_type: QType, body: QExp) -> LinearFn:
    return LinearFn(param, param_type, body)


def force(f: LinearFn, arg: QExp) -> QExp:
    return subst(f.body, {f.param: arg})


def meas_fn(param: str = "x") -> LinearFn:
    """The measurement function on qubits: measure and re-prepare the outcome."""
    from .qtypes import QUBIT

    return LinearFn(param, QUBIT, LetBang(Var(param), (Put(BOOL, 0), Put(BOOL, 1))))


def init(b: bool) -> QExp:
    return Put(BOOL, int(b))


def meas(e: QExp) -> QExp:
    return LetBang(e, (Put(BOOL, 0), Put(BOOL, 1)))


# ---------------------------------------------------------------------------
# Generic traversal


def children(e: QExp) -> tuple[QExp, ...]:
    if isinstance(e, (Var, Put)):
        return ()
    if isinstance(e, Let):
        return (e.e, e.body)
    if isinstance(e, Pair):
        return (e.e1, e.e2)
    if isinstance(e, LetPair):
        return (e.e, e.body)
    if isinstance(e, Inj):
        return (e.e,)
    if isinstance(e, Case):
        return (e.e, e.e1, e.e2)
    if isinstance(e, LetBang):
        return (e.e,) + e.branches
    if isinstance(e, UApp):
        return (e.e,)
    raise TypeError(e)


def with_children(e: QExp, cs: tuple[QExp, ...] | list[QExp]) -> QExp:
    if isinstance(e, (Var, Put)):
        return e
    if isinstance(e, Let):
        return Let(e.x, cs[0], cs[1])
    if isinstance(e, Pair):
        return Pair(cs[0], cs[1])
    if isinstance(e, LetPair):
        return LetPair(e.x1, e.x2, cs[0], cs[1])
    if isinstance(e, Inj):
        return Inj(e.i, cs[0], e.ty)
    if isinstance(e, Case):
        return Case(cs[0], e.x1, cs[1], e.x2, cs[2])
    if isinstance(e, LetBang):
        return LetBang(cs[0], tuple(cs[1:]), e.ty)
    if isinstance(e, UApp):
        return UApp(e.u, cs[0])
    raise TypeError(e)


def binders_of_child(e: QExp, i: int) -> tuple[str, ...]:
    """Names bound by ``e`` in the scope of its ``i``-th child."""
    if isinstance(e, Let) and i == 1:
        return (e.x,)
    if isinstance(e, LetPair) and i == 1:
        return (e.x1, e.x2)
    if isinstance(e, Case) and i in (1, 2):
        return (e.x1,) if i == 1 else (e.x2,)
    return ()


Path = tuple[int, ...]


def subterm(e: QExp, path: Path) -> QExp:
    for i in path:
        e = children(e)[i]
    return e


def replace_at(e: QExp, path: Path, new: QExp) -> QExp:
    if not path:
        return new
    cs = list(children(e))
    cs[path[0]] = replace_at(cs[path[0]], path[1:], new)
    return with_children(e, cs)


def positions(e: QExp, prefix: Path = ()) -> Iterator[tuple[Path, QExp]]:
    """Pre-order enumeration of ``(path, subterm)`` pairs."""
    yield prefix, e
    for i, c in enumerate(children(e)):
        yield from positions(c, prefix + (i,))


def size(e: QExp) -> int:
    return 1 + sum(size(c) for c in children(e))


# ---------------------------------------------------------------------------
# Variables


@lru_cache(maxsize=65536)
def free_vars(e: QExp) -> frozenset[str]:
    if isinstance(e, Var):
        return frozenset({e.x})
    if isinstance(e, Put):
        return frozenset()
    out: set[str] = set()
    for i, c in enumerate(children(e)):
        out |= free_vars(c) - set(binders_of_child(e, i))
    return frozenset(out)


def all_names(e: QExp) -> set[str]:
    """Every variable name occurring in ``e``, bound or free."""
    out: set[str] = set()
    for _, s in positions(e):
        if isinstance(s, Var):
            out.add(s.x)
        elif isinstance(s, Let):
            out.add(s.x)
        elif isinstance(s, LetPair):
            out.update((s.x1, s.x2))
        elif isinstance(s, Case):
            out.update((s.x1, s.x2))
    return out


def fresh(base: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    stem = base.rstrip("0123456789'") or "v"
    if base not in avoid:
        return base
    for k in itertools.count(1):
        cand = f"{stem}{k}"
        if cand not in avoid:
            return cand
    raise AssertionError("unreachable")


class NameSupply:
    """Deterministic generator of names avoiding a given set."""

    def __init__(self, avoid: Iterable[str] = (), stem: str = "w") -> None:
        self.avoid = set(avoid)
        self.stem = stem
        self.counter = 0

    def __call__(self, stem: str | None = None) -> str:
        s = stem or self.stem
        while True:
            name = f"{s}{self.counter}"
            self.counter += 1
            if name not in self.avoid:
                self.avoid.add(name)
                return name


# ---------------------------------------------------------------------------
# Substitution


def subst(e: QExp, bindings: Mapping[str, QExp]) -> QExp:
    """Simultaneous capture-avoiding substitution."""
    live = {x: u for x, u in bindings.items() if x in free_vars(e)}
    if not live:
        return e
    danger: set[str] = set()
    for u in live.values():
        danger |= free_vars(u)
    return _subst(e, live, danger)


def _subst(e: QExp, b: Mapping[str, QExp], danger: set[str]) -> QExp:
    if not b:
        return e
    if isinstance(e, Var):
        return b.get(e.x, e)
    if isinstance(e, Put):
        return e
    cs = children(e)
    new_cs: list[QExp] = []
    renames: dict[str, str] = {}
    bound_all: set[str] = set()
    for i in range(len(cs)):
        bound_all.update(binders_of_child(e, i))
    # Rename binders that would capture a free variable of a substituted term.
    for x in bound_all:
        if x in danger:
            avoid = danger | all_names(e) | set(b)
            renames[x] = fresh(x, avoid | set(renames.values()))
    for i, c in enumerate(cs):
        bs = binders_of_child(e, i)
        if bs and renames:
            c = subst(c, {x: Var(renames[x]) for x in bs if x in renames})
        inner = {x: u for x, u in b.items() if x not in bs and x in free_vars(c)}
        new_cs.append(_subst(c, inner, danger))
    out = with_children(e, new_cs)
    if renames:
        out = _rename_binders(out, renames)
    return out


def _rename_binders(e: QExp, r: Mapping[str, str]) -> QExp:
    g = lambda x: r.get(x, x)  # noqa: E731
    if isinstance(e, Let):
        return Let(g(e.x), e.e, e.body)
    if isinstance(e, LetPair):
        return LetPair(g(e.x1), g(e.x2), e.e, e.body)
    if isinstance(e, Case):
        return Case(e.e, g(e.x1), e.e1, g(e.x2), e.e2)
    return e


def rename(e: QExp, mapping: Mapping[str, str]) -> QExp:
    return subst(e, {x: Var(y) for x, y in mapping.items()})


# ---------------------------------------------------------------------------
# Alpha equivalence


def alpha_eq(e1: QExp, e2: QExp) -> bool:
    return _alpha(e1, e2, {}, {}, itertools.count())


def _alpha(a: QExp, b: QExp, ea: dict[str, int], eb: dict[str, int], ids: Iterator[int]) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Var):
        ia, ib = ea.get(a.x), eb.get(b.x)  # type: ignore[attr-defined]
        if ia is None and ib is None:
            return a.x == b.x  # type: ignore[attr-defined]
        return ia == ib
    if isinstance(a, Put):
        return a == b
    if isinstance(a, Inj) and (a.i != b.i or a.ty != b.ty):  # type: ignore[attr-defined]
        return False
    if isinstance(a, UApp) and a.u != b.u:  # type: ignore[attr-defined]
        return False
    if isinstance(a, LetBang):
        if len(a.branches) != len(b.branches):  # type: ignore[attr-defined]
            return False
        if not a.branches and a.ty != b.ty:  # type: ignore[attr-defined]
            return False
    for i, (x, y) in enumerate(zip(children(a), children(b))):
        na, nb = dict(ea), dict(eb)
        for u, v in zip(binders_of_child(a, i), binders_of_child(b, i)):
            k = next(ids)
            na[u] = k
            nb[v] = k
        if not _alpha(x, y, na, nb, ids):
            return False
    return True


def canonical(e: QExp) -> QExp:
    """Alpha-normal representative: bound variables renamed ``%0, %1, ...`` in pre-order."""
    counter = itertools.count()

    def go(t: QExp, env: dict[str, str]) -> QExp:
        if isinstance(t, Var):
            return Var(env.get(t.x, t.x))
        if isinstance(t, Put):
            return t
        cs = children(t)
        new_cs = []
        new_names: dict[str, str] = {}
        for i, c in enumerate(cs):
            bs = binders_of_child(t, i)
            sub = dict(env)
            for x in bs:
                if x not in new_names:
                    new_names[x] = f"%{next(counter)}"
                sub[x] = new_names[x]
            new_cs.append(go(c, sub))
        out = with_children(t, new_cs)
        return _rename_binders(out, new_names) if new_names else out

    return go(e, {})
