"""S-expression syntax for types, terms, unitaries, equivalences and algebraic terms.

Finite types::

    unit  void  bool  (fin n)  (sum A B)  (prod A B)

Quantum types::

    qubit  (lower A)  (tensor S T)  (oplus S T)  (tvar X)

Terms::

    (var x)  (let x E E)  (pair E E)  (letpair x y E E)  (inj 1 E [T])
    (case E (x E) (y E))  (put A V)  (letbang E ((V E) ...) [T])  (uapp U E)

Values ``V`` of a finite type: ``true``/``false``, ``tt``, integers for
``fin``, ``(inl V)``/``(inr V)``, ``(pair V V)``, or ``#k`` for the k-th element.
A ``letbang`` must give exactly one branch per value of the measured type;
the printer lists them in enumeration order.  The optional trailing type on
``inj`` and ``letbang`` is only needed when it cannot be inferred.

Unitaries::

    (id T)  (compose V U)  (dagger U)  (utensor U V)  (uoplus U V)  (prim NAME)
    (matrix NAME S T (re im re im ...))  (equiv F ((X A) ...))

Equivalences::

    (refl T) (symm F) (trans F G) (cong-tensor F G) (cong-oplus F G)
    (swap-tensor S T) (swap-oplus S T) (assoc-tensor R S T) (assoc-oplus R S T)
    (distr R S T) (lower-tensor A B) (lower-oplus A B) (lunit-tensor T)
    (lunit-oplus T) (lzero T) (lower-iso A B (i ...))

Algebraic terms (``W`` is a wire or a list of wire trees, right-nested)::

    (apply k W)  (split a (a1 a2) T)  (new a T)  (meas a T T)  (ustep U W W T)

Contexts are lists ``((x T) ...)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .algebraic import AlgTerm, Apply, Meas, New, Split, UStep, WireTree
from .qtypes import (
    BOOL,
    UNIT,
    VOID,
    Bool,
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
    Unit,
    Void,
)
from .syntax import (
    AssocOplus,
    AssocTensor,
    Case,
    CongOplus,
    CongTensor,
    Distr,
    FromEquiv,
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
    Primitive,
    Put,
    QExp,
    Refl,
    SwapOplus,
    SwapTensor,
    Symm,
    Trans,
    UAdjoint,
    UApp,
    UCompose,
    UDirectSum,
    UId,
    UnitaryEquiv,
    UnitaryExpr,
    UTensor,
    Var,
    prim,
    PRIMITIVE_MATRICES,
)


class SExprError(ValueError):
    def __init__(self, msg: str, line: int, col: int) -> None:
        super().__init__(f"{line}:{col}: {msg}")
        self.msg = msg
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Sym:
    name: str
    line: int
    col: int


@dataclass(frozen=True)
class SList:
    items: tuple["SNode", ...]
    line: int
    col: int


SNode = Union[Sym, SList]

_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")


def read_all(text: str) -> list[SNode]:
    stack: list[tuple[list[SNode], int, int]] = [([], 1, 1)]
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        assert m is not None
        tok = m.group(0)
        if tok == "(":
            stack.append(([], line, col))
        elif tok == ")":
            if len(stack) == 1:
                raise SExprError("unbalanced ')'", line, col)
            items, l0, c0 = stack.pop()
            stack[-1][0].append(SList(tuple(items), l0, c0))
        elif not tok[0].isspace() and tok[0] != ";":
            stack[-1][0].append(Sym(tok, line, col))
        nl = tok.count("\n")
        if nl:
            line += nl
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
        pos = m.end()
    if len(stack) != 1:
        _, l0, c0 = stack[-1]
        raise SExprError("unclosed '('", l0, c0)
    return stack[0][0]


def read(text: str) -> SNode:
    nodes = read_all(text)
    if len(nodes) != 1:
        raise SExprError(f"expected one expression, found {len(nodes)}", 1, 1)
    return nodes[0]


def _err(node: SNode, msg: str) -> SExprError:
    return SExprError(msg, node.line, node.col)


def _head(node: SNode) -> tuple[str, tuple[SNode, ...]]:
    if not isinstance(node, SList) or not node.items or not isinstance(node.items[0], Sym):
        raise _err(node, "expected a form (keyword ...)")
    return node.items[0].name, node.items[1:]


def _arity(node: SNode, args: tuple[SNode, ...], *counts: int) -> None:
    if len(args) not in counts:
        want = " or ".join(map(str, counts))
        raise _err(node, f"'{_head(node)[0]}' takes {want} arguments, got {len(args)}")


def _sym(node: SNode, what: str = "a name") -> str:
    if not isinstance(node, Sym):
        raise _err(node, f"expected {what}")
    return node.name


def _int(node: SNode) -> int:
    s = _sym(node, "an integer")
    try:
        return int(s)
    except ValueError:
        raise _err(node, f"expected an integer, got {s}") from None


# ---------------------------------------------------------------------------
# Types


def parse_fintype_node(node: SNode) -> FinType:
    if isinstance(node, Sym):
        table = {"unit": UNIT, "void": VOID, "bool": BOOL}
        if node.name in table:
            return table[node.name]
        raise _err(node, f"unknown finite type {node.name}")
    h, args = _head(node)
    if h == "fin":
        _arity(node, args, 1)
        n = _int(args[0])
        if n < 0:
            raise _err(args[0], "negative cardinality")
        return Fin(n)
    if h in ("sum", "prod"):
        _arity(node, args, 2)
        a, b = parse_fintype_node(args[0]), parse_fintype_node(args[1])
        return Sum(a, b) if h == "sum" else Prod(a, b)
    raise _err(node, f"unknown finite type former {h}")


def parse_type_node(node: SNode) -> QType:
    if isinstance(node, Sym):
        if node.name == "qubit":
            return Lower(BOOL)
        raise _err(node, f"unknown type {node.name}")
    h, args = _head(node)
    if h == "lower":
        _arity(node, args, 1)
        return Lower(parse_fintype_node(args[0]))
    if h in ("tensor", "oplus"):
        _arity(node, args, 2)
        a, b = parse_type_node(args[0]), parse_type_node(args[1])
        return Tensor(a, b) if h == "tensor" else Oplus(a, b)
    if h == "tvar":
        _arity(node, args, 1)
        return TVar(_sym(args[0]))
    raise _err(node, f"unknown type former {h}")


def parse_value_node(node: SNode, alpha: FinType) -> int:
    if isinstance(node, Sym) and node.name.startswith("#"):
        try:
            k = int(node.name[1:])
        except ValueError:
            raise _err(node, f"bad index {node.name}") from None
    elif isinstance(alpha, Bool):
        if not isinstance(node, Sym) or node.name not in ("true", "false"):
            raise _err(node, "expected true or false")
        k = int(node.name == "true")
    elif isinstance(alpha, Unit):
        if not isinstance(node, Sym) or node.name != "tt":
            raise _err(node, "expected tt")
        k = 0
    elif isinstance(alpha, Fin):
        k = _int(node)
    elif isinstance(alpha, Sum):
        h, args = _head(node)
        _arity(node, args, 1)
        if h == "inl":
            k = alpha.inl(parse_value_node(args[0], alpha.left))
        elif h == "inr":
            k = alpha.inr(parse_value_node(args[0], alpha.right))
        else:
            raise _err(node, "expected (inl V) or (inr V)")
    elif isinstance(alpha, Prod):
        h, args = _head(node)
        if h != "pair":
            raise _err(node, "expected (pair V V)")
        _arity(node, args, 2)
        k = alpha.pair(parse_value_node(args[0], alpha.left), parse_value_node(args[1], alpha.right))
    elif isinstance(alpha, Void):
        raise _err(node, "void has no values")
    else:
        raise _err(node, f"cannot read values of {alpha}")
    if not 0 <= k < alpha.card:
        raise _err(node, f"value out of range for {alpha}")
    return k


def parse_context_node(node: SNode) -> dict[str, QType]:
    if not isinstance(node, SList):
        raise _err(node, "expected a context ((x T) ...)")
    out: dict[str, QType] = {}
    for item in node.items:
        if not isinstance(item, SList) or len(item.items) != 2:
            raise _err(item, "expected a binding (x T)")
        x = _sym(item.items[0])
        if x in out:
            raise _err(item, f"{x} bound twice in context")
        out[x] = parse_type_node(item.items[1])
    return out


def parse_assignment_node(node: SNode) -> TypeAssignment:
    if not isinstance(node, SList):
        raise _err(node, "expected an assignment ((X A) ...)")
    d: dict[str, FinType] = {}
    for item in node.items:
        if not isinstance(item, SList) or len(item.items) != 2:
            raise _err(item, "expected a binding (X A)")
        d[_sym(item.items[0])] = parse_fintype_node(item.items[1])
    return TypeAssignment.of(d)


# ---------------------------------------------------------------------------
# Equivalences and unitaries


def parse_equiv_node(node: SNode) -> UnitaryEquiv:
    h, args = _head(node)
    T = parse_type_node
    F = parse_equiv_node
    A = parse_fintype_node
    try:
        if h == "refl":
            _arity(node, args, 1)
            return Refl(T(args[0]))
        if h == "symm":
            _arity(node, args, 1)
            return Symm(F(args[0]))
        if h == "trans":
            _arity(node, args, 2)
            return Trans(F(args[0]), F(args[1]))
        if h in ("cong-tensor", "cong-oplus"):
            _arity(node, args, 2)
            return (CongTensor if h == "cong-tensor" else CongOplus)(F(args[0]), F(args[1]))
        if h in ("swap-tensor", "swap-oplus"):
            _arity(node, args, 2)
            return (SwapTensor if h == "swap-tensor" else SwapOplus)(T(args[0]), T(args[1]))
        if h in ("assoc-tensor", "assoc-oplus", "distr"):
            _arity(node, args, 3)
            cls = {"assoc-tensor": AssocTensor, "assoc-oplus": AssocOplus, "distr": Distr}[h]
            return cls(T(args[0]), T(args[1]), T(args[2]))
        if h in ("lower-tensor", "lower-oplus"):
            _arity(node, args, 2)
            return (LowerTensor if h == "lower-tensor" else LowerOplus)(A(args[0]), A(args[1]))
        if h in ("lunit-tensor", "lunit-oplus", "lzero"):
            _arity(node, args, 1)
            return {"lunit-tensor": LUnitTensor, "lunit-oplus": LUnitOplus, "lzero": LZero}[h](T(args[0]))
        if h == "lower-iso":
            _arity(node, args, 2, 3)
            perm = None
            if len(args) == 3:
                if not isinstance(args[2], SList):
                    raise _err(args[2], "expected a permutation list")
                perm = tuple(_int(i) for i in args[2].items)
            return LowerIso(A(args[0]), A(args[1]), perm)
    except (TypeError, ValueError) as err:
        if isinstance(err, SExprError):
            raise
        raise _err(node, str(err)) from None
    raise _err(node, f"unknown equivalence {h}")


def parse_unitary_node(node: SNode) -> UnitaryExpr:
    h, args = _head(node)
    U = parse_unitary_node
    try:
        if h == "id":
            _arity(node, args, 1)
            return UId(parse_type_node(args[0]))
        if h == "compose":
            _arity(node, args, 2)
            return UCompose(U(args[0]), U(args[1]))
        if h == "dagger":
            _arity(node, args, 1)
            return UAdjoint(U(args[0]))
        if h in ("utensor", "uoplus"):
            _arity(node, args, 2)
            return (UTensor if h == "utensor" else UDirectSum)(U(args[0]), U(args[1]))
        if h == "prim":
            _arity(node, args, 1)
            name = _sym(args[0])
            if name not in PRIMITIVE_MATRICES:
                raise _err(args[0], f"unknown primitive {name}")
            return prim(name)
        if h == "matrix":
            _arity(node, args, 4)
            name = _sym(args[0])
            src, dst = parse_type_node(args[1]), parse_type_node(args[2])
            if not isinstance(args[3], SList):
                raise _err(args[3], "expected a list of entries")
            nums = [float(_sym(x, "a number")) for x in args[3].items]
            if len(nums) % 2:
                raise _err(args[3], "entries come in (re im) pairs")
            flat = np.array(nums[0::2]) + 1j * np.array(nums[1::2])
            from .qtypes import dim

            if flat.size != dim(src) * dim(dst):
                raise _err(args[3], f"expected {dim(src) * dim(dst)} entries, got {flat.size}")
            return Primitive(name, flat.reshape(dim(dst), dim(src)), src, dst)
        if h == "equiv":
            _arity(node, args, 1, 2)
            m = parse_assignment_node(args[1]) if len(args) == 2 else TypeAssignment()
            return FromEquiv(parse_equiv_node(args[0]), m)
    except SExprError:
        raise
    except (TypeError, ValueError, KeyError) as err:
        raise _err(node, str(err)) from None
    raise _err(node, f"unknown unitary former {h}")


# ---------------------------------------------------------------------------
# Terms

_KEYWORDS = {"let", "pair", "letpair", "inj", "case", "put", "letbang", "uapp"}


def parse_term_node(node: SNode) -> QExp:
    h, args = _head(node)
    E = parse_term_node
    if h == "var":
        _arity(node, args, 1)
        return Var(_sym(args[0]))
    if h == "let":
        _arity(node, args, 3)
        return Let(_sym(args[0]), E(args[1]), E(args[2]))
    if h == "pair":
        _arity(node, args, 2)
        return Pair(E(args[0]), E(args[1]))
    if h == "letpair":
        _arity(node, args, 4)
        return LetPair(_sym(args[0]), _sym(args[1]), E(args[2]), E(args[3]))
    if h == "inj":
        _arity(node, args, 2, 3)
        i = _int(args[0])
        if i not in (1, 2):
            raise _err(args[0], "injection index must be 1 or 2")
        ty = parse_type_node(args[2]) if len(args) == 3 else None
        return Inj(i, E(args[1]), ty)  # type: ignore[arg-type]
    if h == "case":
        _arity(node, args, 3)
        bs = []
        for b in args[1:]:
            if not isinstance(b, SList) or len(b.items) != 2:
                raise _err(b, "expected a branch (x E)")
            bs.append((_sym(b.items[0]), E(b.items[1])))
        return Case(E(args[0]), bs[0][0], bs[0][1], bs[1][0], bs[1][1])
    if h == "put":
        _arity(node, args, 2)
        alpha = parse_fintype_node(args[0])
        return Put(alpha, parse_value_node(args[1], alpha))
    if h == "letbang":
        _arity(node, args, 2, 3)
        return _parse_letbang(node, args)
    if h == "uapp":
        _arity(node, args, 2)
        return UApp(parse_unitary_node(args[0]), E(args[1]))
    raise _err(node, f"unknown term former {h}")


def _parse_letbang(node: SNode, args: tuple[SNode, ...]) -> LetBang:
    scrut = parse_term_node(args[0])
    table = args[1]
    if not isinstance(table, SList):
        raise _err(table, "expected a branch table ((V E) ...)")
    ty = parse_type_node(args[2]) if len(args) == 3 else None
    for item in table.items:
        if not isinstance(item, SList) or len(item.items) != 2:
            raise _err(item, "expected a branch (V E)")
    alpha = _label_type([item.items[0] for item in table.items], table)  # type: ignore[union-attr]
    branches: dict[int, QExp] = {}
    for item in table.items:
        k = parse_value_node(item.items[0], alpha)
        if k in branches:
            raise _err(item, "duplicate branch label")
        branches[k] = parse_term_node(item.items[1])
    if sorted(branches) != list(range(alpha.card)):
        raise _err(table, f"branch table must cover all {alpha.card} values")
    return LetBang(scrut, tuple(branches[k] for k in range(alpha.card)), ty)


def _label_type(labels: list[SNode], where: SNode) -> FinType:
    """Recover the finite type a total set of value labels ranges over."""
    if not labels:
        return VOID
    first = labels[0]
    if isinstance(first, Sym):
        if first.name in ("true", "false"):
            return BOOL
        if first.name == "tt":
            return UNIT
        return Fin(max(_int(x) for x in labels) + 1)
    h, _ = _head(first)
    if h in ("inl", "inr"):
        left, right = [], []
        for x in labels:
            hx, ax = _head(x)
            if hx not in ("inl", "inr") or len(ax) != 1:
                raise _err(x, "expected (inl V) or (inr V)")
            (left if hx == "inl" else right).append(ax[0])
        return Sum(_label_type(left, where), _label_type(right, where))
    if h == "pair":
        firsts: dict[str, SNode] = {}
        seconds: dict[str, SNode] = {}
        for x in labels:
            hx, ax = _head(x)
            if hx != "pair" or len(ax) != 2:
                raise _err(x, "expected (pair V V)")
            firsts.setdefault(_key(ax[0]), ax[0])
            seconds.setdefault(_key(ax[1]), ax[1])
        return Prod(_label_type(list(firsts.values()), where), _label_type(list(seconds.values()), where))
    raise _err(first, f"cannot read branch label {h}")


def _key(node: SNode) -> str:
    if isinstance(node, Sym):
        return node.name
    return "(" + " ".join(_key(x) for x in node.items) + ")"


def parse_wire_tree(node: SNode) -> WireTree:
    if isinstance(node, Sym):
        return node.name
    if not node.items:
        raise _err(node, "empty wire list")
    parts = [parse_wire_tree(x) for x in node.items]
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = (p, out)
    return out


def parse_alg_node(node: SNode) -> AlgTerm:
    h, args = _head(node)
    if h == "apply":
        _arity(node, args, 2)
        return Apply(_sym(args[0]), parse_wire_tree(args[1]))
    if h == "split":
        _arity(node, args, 3)
        pat = args[1]
        if not isinstance(pat, SList) or len(pat.items) != 2:
            raise _err(pat, "expected a pattern (a1 a2)")
        return Split(_sym(args[0]), _sym(pat.items[0]), _sym(pat.items[1]), parse_alg_node(args[2]))
    if h == "new":
        _arity(node, args, 2)
        return New(_sym(args[0]), parse_alg_node(args[1]))
    if h == "meas":
        _arity(node, args, 3)
        return Meas(_sym(args[0]), parse_alg_node(args[1]), parse_alg_node(args[2]))
    if h == "ustep":
        _arity(node, args, 4)
        return UStep(parse_unitary_node(args[0]), parse_wire_tree(args[1]), parse_wire_tree(args[2]), parse_alg_node(args[3]))
    raise _err(node, f"unknown algebraic former {h}")


def _parse_with(fn: Callable[[SNode], object]) -> Callable[[str], object]:
    def parse(text: str):  # type: ignore[no-untyped-def]
        return fn(read(text))

    return parse


parse_type: Callable[[str], QType] = _parse_with(parse_type_node)  # type: ignore[assignment]
parse_fintype: Callable[[str], FinType] = _parse_with(parse_fintype_node)  # type: ignore[assignment]
parse_term: Callable[[str], QExp] = _parse_with(parse_term_node)  # type: ignore[assignment]
parse_unitary: Callable[[str], UnitaryExpr] = _parse_with(parse_unitary_node)  # type: ignore[assignment]
parse_equiv: Callable[[str], UnitaryEquiv] = _parse_with(parse_equiv_node)  # type: ignore[assignment]
parse_context: Callable[[str], dict[str, QType]] = _parse_with(parse_context_node)  # type: ignore[assignment]
parse_assignment: Callable[[str], TypeAssignment] = _parse_with(parse_assignment_node)  # type: ignore[assignment]
parse_alg: Callable[[str], AlgTerm] = _parse_with(parse_alg_node)  # type: ignore[assignment]


# ---------------------------------------------------------------------------
# Printing


def show_fintype(a: FinType) -> str:
    if isinstance(a, Unit):
        return "unit"
    if isinstance(a, Void):
        return "void"
    if isinstance(a, Bool):
        return "bool"
    if isinstance(a, Fin):
        return f"(fin {a.n})"
    if isinstance(a, Sum):
        return f"(sum {show_fintype(a.left)} {show_fintype(a.right)})"
    if isinstance(a, Prod):
        return f"(prod {show_fintype(a.left)} {show_fintype(a.right)})"
    raise TypeError(a)


def show_type(t: QType) -> str:
    if isinstance(t, Lower):
        return f"(lower {show_fintype(t.base)})"
    if isinstance(t, Tensor):
        return f"(tensor {show_type(t.l)} {show_type(t.r)})"
    if isinstance(t, Oplus):
        return f"(oplus {show_type(t.l)} {show_type(t.r)})"
    if isinstance(t, TVar):
        return f"(tvar {t.name})"
    raise TypeError(t)


def show_value(alpha: FinType, k: int) -> str:
    if isinstance(alpha, Bool):
        return "true" if k else "false"
    if isinstance(alpha, Unit):
        return "tt"
    if isinstance(alpha, Fin):
        return str(k)
    if isinstance(alpha, Sum):
        side, i = alpha.split(k)
        return f"(inl {show_value(alpha.left, i)})" if side == 0 else f"(inr {show_value(alpha.right, i)})"
    if isinstance(alpha, Prod):
        i, j = alpha.unpair(k)
        return f"(pair {show_value(alpha.left, i)} {show_value(alpha.right, j)})"
    return f"#{k}"


def show_assignment(m: TypeAssignment) -> str:
    return "(" + " ".join(f"({x} {show_fintype(a)})" for x, a in m.items_) + ")"


def show_context(ctx: dict[str, QType]) -> str:
    return "(" + " ".join(f"({x} {show_type(t)})" for x, t in ctx.items()) + ")"


def show_equiv(f: UnitaryEquiv) -> str:
    S, T, A = show_equiv, show_type, show_fintype
    if isinstance(f, Refl):
        return f"(refl {T(f.sigma)})"
    if isinstance(f, Symm):
        return f"(symm {S(f.f)})"
    if isinstance(f, Trans):
        return f"(trans {S(f.f)} {S(f.g)})"
    if isinstance(f, CongTensor):
        return f"(cong-tensor {S(f.f)} {S(f.g)})"
    if isinstance(f, CongOplus):
        return f"(cong-oplus {S(f.f)} {S(f.g)})"
    if isinstance(f, SwapTensor):
        return f"(swap-tensor {T(f.s1)} {T(f.s2)})"
    if isinstance(f, SwapOplus):
        return f"(swap-oplus {T(f.s1)} {T(f.s2)})"
    if isinstance(f, AssocTensor):
        return f"(assoc-tensor {T(f.s1)} {T(f.s2)} {T(f.s3)})"
    if isinstance(f, AssocOplus):
        return f"(assoc-oplus {T(f.s1)} {T(f.s2)} {T(f.s3)})"
    if isinstance(f, Distr):
        return f"(distr {T(f.s1)} {T(f.s2)} {T(f.s3)})"
    if isinstance(f, LowerTensor):
        return f"(lower-tensor {A(f.a1)} {A(f.a2)})"
    if isinstance(f, LowerOplus):
        return f"(lower-oplus {A(f.a1)} {A(f.a2)})"
    if isinstance(f, LUnitTensor):
        return f"(lunit-tensor {T(f.s)})"
    if isinstance(f, LUnitOplus):
        return f"(lunit-oplus {T(f.s)})"
    if isinstance(f, LZero):
        return f"(lzero {T(f.s)})"
    if isinstance(f, LowerIso):
        perm = "" if f.perm is None else " (" + " ".join(map(str, f.perm)) + ")"
        return f"(lower-iso {A(f.a1)} {A(f.a2)}{perm})"
    raise TypeError(f)


def show_unitary(u: UnitaryExpr) -> str:
    if isinstance(u, UId):
        return f"(id {show_type(u.sigma)})"
    if isinstance(u, UCompose):
        return f"(compose {show_unitary(u.v)} {show_unitary(u.u)})"
    if isinstance(u, UAdjoint):
        return f"(dagger {show_unitary(u.u)})"
    if isinstance(u, UTensor):
        return f"(utensor {show_unitary(u.u)} {show_unitary(u.v)})"
    if isinstance(u, UDirectSum):
        return f"(uoplus {show_unitary(u.u)} {show_unitary(u.v)})"
    if isinstance(u, Primitive):
        if u.name in PRIMITIVE_MATRICES and u == prim(u.name) and np.array_equal(u.matrix, prim(u.name).matrix):
            return f"(prim {u.name})"
        nums = " ".join(f"{float(z.real)!r} {float(z.imag)!r}" for z in u.matrix.reshape(-1))
        return f"(matrix {u.name} {show_type(u.src)} {show_type(u.dst)} ({nums}))"
    if isinstance(u, FromEquiv):
        if len(u.m):
            return f"(equiv {show_equiv(u.f)} {show_assignment(u.m)})"
        return f"(equiv {show_equiv(u.f)})"
    raise TypeError(u)


def show_term(e: QExp) -> str:
    E = show_term
    if isinstance(e, Var):
        return f"(var {e.x})"
    if isinstance(e, Let):
        return f"(let {e.x} {E(e.e)} {E(e.body)})"
    if isinstance(e, Pair):
        return f"(pair {E(e.e1)} {E(e.e2)})"
    if isinstance(e, LetPair):
        return f"(letpair {e.x1} {e.x2} {E(e.e)} {E(e.body)})"
    if isinstance(e, Inj):
        ty = "" if e.ty is None else " " + show_type(e.ty)
        return f"(inj {e.i} {E(e.e)}{ty})"
    if isinstance(e, Case):
        return f"(case {E(e.e)} ({e.x1} {E(e.e1)}) ({e.x2} {E(e.e2)}))"
    if isinstance(e, Put):
        return f"(put {show_fintype(e.alpha)} {show_value(e.alpha, e.a)})"
    if isinstance(e, LetBang):
        ty = "" if e.ty is None else " " + show_type(e.ty)
        # labels are printed as enumeration indices, which reparse as (fin n)
        table = " ".join(f"({k} {E(b)})" for k, b in enumerate(e.branches))
        return f"(letbang {E(e.e)} ({table}){ty})"
    if isinstance(e, UApp):
        return f"(uapp {show_unitary(e.u)} {E(e.e)})"
    raise TypeError(e)


def show_wire_tree(w: WireTree) -> str:
    if isinstance(w, str):
        return w
    parts = []
    while isinstance(w, tuple):
        parts.append(show_wire_tree(w[0]))
        w = w[1]
    parts.append(w)
    return "(" + " ".join(parts) + ")"


def show_alg(t: AlgTerm) -> str:
    if isinstance(t, Apply):
        return f"(apply {t.k} {show_wire_tree(t.arg)})"
    if isinstance(t, Split):
        return f"(split {t.a} ({t.a1} {t.a2}) {show_alg(t.t)})"
    if isinstance(t, New):
        return f"(new {t.a} {show_alg(t.t)})"
    if isinstance(t, Meas):
        return f"(meas {t.a} {show_alg(t.t0)} {show_alg(t.t1)})"
    if isinstance(t, UStep):
        return f"(ustep {show_unitary(t.u)} {show_wire_tree(t.arg)} {show_wire_tree(t.out)} {show_alg(t.t)})"
    raise TypeError(t)
