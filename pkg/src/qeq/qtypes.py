"""Finite classical types, quantum types and open quantum types.

Finite types carry a canonical enumeration of their elements: ``Bool`` is
``false`` then ``true``, ``Sum`` lists the left block before the right block
and ``Prod`` is left-major.  Elements are identified with their index in that
enumeration everywhere in the package.

Quantum types are built from ``Lower`` (superpositions over a finite type),
``Tensor`` and ``Oplus``.  ``TVar`` adds type variables; a quantum type without
variables is called closed.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Iterator, Mapping


class FinType(ABC):
    """A finite classical type."""

    @property
    @abstractmethod
    def card(self) -> int:
        ...

    def elements(self) -> range:
        return range(self.card)

    @abstractmethod
    def value_repr(self, index: int) -> object:
        """Structured form of the element at ``index`` (used by the printer)."""


@dataclass(frozen=True)
class Void(FinType):
    @property
    def card(self) -> int:
        return 0

    def value_repr(self, index: int) -> object:
        raise IndexError("Void has no elements")

    def __str__(self) -> str:
        return "void"


@dataclass(frozen=True)
class Unit(FinType):
    @property
    def card(self) -> int:
        return 1

    def value_repr(self, index: int) -> object:
        _check_index(self, index)
        return "tt"

    def __str__(self) -> str:
        return "unit"


@dataclass(frozen=True)
class Bool(FinType):
    @property
    def card(self) -> int:
        return 2

    def value_repr(self, index: int) -> object:
        _check_index(self, index)
        return "true" if index else "false"

    def __str__(self) -> str:
        return "bool"


@dataclass(frozen=True)
class Fin(FinType):
    n: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("Fin size must be non-negative")

    @property
    def card(self) -> int:
        return self.n

    def value_repr(self, index: int) -> object:
        _check_index(self, index)
        return index

    def __str__(self) -> str:
        return f"(fin {self.n})"


@dataclass(frozen=True)
class Sum(FinType):
    left: FinType
    right: FinType

    @property
    def card(self) -> int:
        return self.left.card + self.right.card

    def inl(self, i: int) -> int:
        return i

    def inr(self, j: int) -> int:
        return self.left.card + j

    def split(self, index: int) -> tuple[int, int]:
        """Return ``(side, inner)`` with side 0 for the left block, 1 for the right."""
        _check_index(self, index)
        if index < self.left.card:
            return 0, index
        return 1, index - self.left.card

    def value_repr(self, index: int) -> object:
        side, inner = self.split(index)
        child = self.left if side == 0 else self.right
        return ("inl" if side == 0 else "inr", child.value_repr(inner))

    def __str__(self) -> str:
        return f"(sum {self.left} {self.right})"


@dataclass(frozen=True)
class Prod(FinType):
    left: FinType
    right: FinType

    @property
    def card(self) -> int:
        return self.left.card * self.right.card

    def pair(self, i: int, j: int) -> int:
        return i * self.right.card + j

    def unpair(self, index: int) -> tuple[int, int]:
        _check_index(self, index)
        return divmod(index, self.right.card)

    def value_repr(self, index: int) -> object:
        i, j = self.unpair(index)
        return (self.left.value_repr(i), self.right.value_repr(j))

    def __str__(self) -> str:
        return f"(prod {self.left} {self.right})"


def _check_index(t: FinType, index: int) -> None:
    if not 0 <= index < t.card:
        raise IndexError(f"element index {index} out of range for {t}")


VOID = Void()
UNIT = Unit()
BOOL = Bool()


class QType(ABC):
    """A quantum type, possibly containing type variables."""

    @abstractmethod
    def tvars(self) -> frozenset[str]:
        ...

    @property
    def closed(self) -> bool:
        return not self.tvars()


@dataclass(frozen=True)
class Lower(QType):
    base: FinType

    def tvars(self) -> frozenset[str]:
        return frozenset()

    def __str__(self) -> str:
        if self.base == BOOL:
            return "qubit"
        return f"(lower {self.base})"


@dataclass(frozen=True)
class Tensor(QType):
    l: QType
    r: QType

    def tvars(self) -> frozenset[str]:
        return self.l.tvars() | self.r.tvars()

    def __str__(self) -> str:
        return f"(tensor {self.l} {self.r})"


@dataclass(frozen=True)
class Oplus(QType):
    l: QType
    r: QType

    def tvars(self) -> frozenset[str]:
        return self.l.tvars() | self.r.tvars()

    def __str__(self) -> str:
        return f"(oplus {self.l} {self.r})"


@dataclass(frozen=True)
class TVar(QType):
    name: str

    def tvars(self) -> frozenset[str]:
        return frozenset({self.name})

    def __str__(self) -> str:
        return f"(tvar {self.name})"


QUBIT = Lower(BOOL)


def dim(sigma: QType) -> int:
    """Dimension of the Hilbert space of a closed quantum type.

    >>> dim(Tensor(QUBIT, Oplus(QUBIT, Lower(UNIT))))
    6
    """
    if isinstance(sigma, Lower):
        return sigma.base.card
    if isinstance(sigma, Tensor):
        return dim(sigma.l) * dim(sigma.r)
    if isinstance(sigma, Oplus):
        return dim(sigma.l) + dim(sigma.r)
    raise TypeError(f"dim is undefined on open type {sigma}")


def tensor_all(types: list[QType] | tuple[QType, ...]) -> QType:
    """Right-nested tensor of a non-empty list of types."""
    if not types:
        raise ValueError("empty tensor")
    out = types[-1]
    for t in reversed(types[:-1]):
        out = Tensor(t, out)
    return out


def is_binary(sigma: QType) -> bool:
    """True for ``Lower Bool`` and tensors of binary types."""
    if isinstance(sigma, Lower):
        return sigma.base == BOOL
    if isinstance(sigma, Tensor):
        return is_binary(sigma.l) and is_binary(sigma.r)
    return False


@dataclass(frozen=True)
class TypeAssignment(Mapping[str, FinType]):
    """Finite map from type variable names to finite types."""

    items_: tuple[tuple[str, FinType], ...] = ()

    @staticmethod
    def of(mapping: Mapping[str, FinType] | None = None, **kw: FinType) -> "TypeAssignment":
        d = dict(mapping or {})
        d.update(kw)
        return TypeAssignment(tuple(sorted(d.items())))

    def __getitem__(self, key: str) -> FinType:
        for k, v in self.items_:
            if k == key:
                return v
        raise KeyError(key)

    def __iter__(self) -> Iterator[str]:
        return (k for k, _ in self.items_)

    def __len__(self) -> int:
        return len(self.items_)

    def __str__(self) -> str:
        return "(" + " ".join(f"({k} {v})" for k, v in self.items_) + ")"


def basis(sigma: QType, m: Mapping[str, FinType]) -> FinType:
    """Finite type indexing the computational basis of ``sigma`` under ``m``."""
    if isinstance(sigma, TVar):
        try:
            return m[sigma.name]
        except KeyError:
            raise KeyError(f"unbound type variable {sigma.name}") from None
    if isinstance(sigma, Lower):
        return sigma.base
    if isinstance(sigma, Tensor):
        return Prod(basis(sigma.l, m), basis(sigma.r, m))
    if isinstance(sigma, Oplus):
        return Sum(basis(sigma.l, m), basis(sigma.r, m))
    raise TypeError(sigma)


def instantiate(sigma: QType, m: Mapping[str, FinType]) -> QType:
    """Closed type obtained by replacing each variable ``X`` with ``Lower (m X)``.

    Its dimension and basis enumeration agree with ``basis(sigma, m)``.
    """
    if isinstance(sigma, TVar):
        return Lower(basis(sigma, m))
    if isinstance(sigma, Lower):
        return sigma
    if isinstance(sigma, Tensor):
        return Tensor(instantiate(sigma.l, m), instantiate(sigma.r, m))
    if isinstance(sigma, Oplus):
        return Oplus(instantiate(sigma.l, m), instantiate(sigma.r, m))
    raise TypeError(sigma)
