"""Command-line front end.

Term files hold an optional context followed by one term::

    ((q qubit) (r qubit))
    (letbang (var q) ((false (var r)) (true (uapp (prim H) (var r)))))

Every report ends with a ``RESULT: <verdict>`` line.  Exit status is 0 for
success or a true verdict, 1 for a false verdict and 2 for input, parse or
type errors.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from typing import Callable, Sequence, TextIO

import numpy as np

from . import sexpr
from .algebraic import AlgTypeError, NotBinaryFragment, to_alg, to_qexp
from .linalg import DEFAULT_TOL, is_density, matrix_from_json, matrix_to_json
from .opentype import decide_equiv, normalize_type
from .qtypes import QType, dim
from .rewrite import prove_equiv
from .semantics import denote, equiv_report
from .sexpr import SExprError
from .sweeps import ALIASES, SUITES, run_suite
from .syntax import QExp
from .typecheck import TypeCheckError, infer_type

log = logging.getLogger("qeq")

EXIT_OK, EXIT_FALSE, EXIT_ERROR = 0, 1, 2


class InputError(Exception):
    """Unreadable or malformed input; the message carries the location."""


@dataclass
class TermFile:
    ctx: dict[str, QType]
    term: QExp


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as err:
        raise InputError(f"{path}: {err.strerror or err}") from err


def _located(path: str, fn: Callable[[], object]) -> object:
    try:
        return fn()
    except SExprError as err:
        raise InputError(f"{path}:{err}") from err


def load_term_file(path: str) -> TermFile:
    text = _read(path)

    def parse() -> TermFile:
        nodes = sexpr.read_all(text)
        if len(nodes) == 1:
            return TermFile({}, sexpr.parse_term_node(nodes[0]))
        if len(nodes) == 2:
            return TermFile(sexpr.parse_context_node(nodes[0]), sexpr.parse_term_node(nodes[1]))
        raise SExprError(f"expected [context] term, found {len(nodes)} forms", 1, 1)

    return _located(path, parse)  # type: ignore[return-value]


def load_alg_file(path: str) -> tuple[dict[str, QType], object]:
    text = _read(path)

    def parse():  # type: ignore[no-untyped-def]
        nodes = sexpr.read_all(text)
        if len(nodes) == 1:
            return {}, sexpr.parse_alg_node(nodes[0])
        if len(nodes) == 2:
            return sexpr.parse_context_node(nodes[0]), sexpr.parse_alg_node(nodes[1])
        raise SExprError(f"expected [wire context] algebraic term, found {len(nodes)} forms", 1, 1)

    return _located(path, parse)  # type: ignore[return-value]


def _parse_type_arg(text: str) -> QType:
    return _located("<argument>", lambda: sexpr.parse_type(text))  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# Commands; each returns (exit status, verdict) and writes its human section.


def cmd_typecheck(a: argparse.Namespace, out: TextIO) -> tuple[int, str]:
    tf = load_term_file(a.file)
    tau = infer_type(tf.ctx, tf.term)
    out.write(f"context: {sexpr.show_context(tf.ctx)}\ntype: {sexpr.show_type(tau)}\n")
    return EXIT_OK, "well-typed"


def cmd_eval(a: argparse.Namespace, out: TextIO) -> tuple[int, str]:
    tf = load_term_file(a.file)
    text = _read(a.density)
    try:
        rho = matrix_from_json(text)
    except (ValueError, KeyError, TypeError) as err:
        raise InputError(f"{a.density}: bad density matrix: {err}") from err
    if not is_density(rho, a.tol):
        raise InputError(f"{a.density}: not a density matrix (needs Hermitian, positive, trace <= 1)")
    f = denote(tf.ctx, tf.term)
    if rho.shape != (f.src_dim, f.src_dim):
        d = f.src_dim
        raise InputError(f"{a.density}: the context has dimension {d}, the input is {rho.shape[0]}x{rho.shape[1]}")
    tau = infer_type(tf.ctx, tf.term)
    res = f(rho)
    out.write(f"type: {sexpr.show_type(tau)} (dimension {dim(tau)})\n")
    out.write(f"trace in {np.trace(rho).real:.12g}, trace out {np.trace(res).real:.12g}\n")
    out.write(matrix_to_json(res) + "\n")
    return EXIT_OK, "evaluated"


def cmd_equiv(a: argparse.Namespace, out: TextIO) -> tuple[int, str]:
    f1, f2 = load_term_file(a.file1), load_term_file(a.file2)
    if f1.ctx != f2.ctx:
        raise InputError(f"{a.file1} and {a.file2} declare different contexts")
    rep = equiv_report(f1.term, f2.term, f1.ctx, a.tol)
    out.write(f"max deviation {rep.deviation:.3e} (tolerance {a.tol:g})\n")
    if rep.equal:
        return EXIT_OK, "equal"
    out.write("counterexample:\n")
    out.write(f"  left:  {sexpr.show_term(f1.term)}\n  right: {sexpr.show_term(f2.term)}\n")
    out.write(f"  {rep.dump()}\n")
    return EXIT_FALSE, "not-equal"


def cmd_prove(a: argparse.Namespace, out: TextIO) -> tuple[int, str]:
    f1, f2 = load_term_file(a.file1), load_term_file(a.file2)
    if f1.ctx != f2.ctx:
        raise InputError(f"{a.file1} and {a.file2} declare different contexts")
    d = prove_equiv(f1.term, f2.term, f1.ctx, depth=a.depth)
    if d is None:
        out.write(f"no derivation within {a.depth} steps\n")
        return EXIT_FALSE, "not-found"
    out.write(d.format(sexpr.show_term) + "\n")
    return EXIT_OK, f"proved in {len(d)} steps"


def cmd_normalize(a: argparse.Namespace, out: TextIO) -> tuple[int, str]:
    sigma = _parse_type_arg(a.type)
    _, w = normalize_type(sigma)
    out.write(f"input:   {sexpr.show_type(sigma)}\nnormal:  {sexpr.show_type(w.dst)}\n")
    out.write(f"witness: {sexpr.show_equiv(w)}\n")
    return EXIT_OK, sexpr.show_type(w.dst)


def cmd_decide(a: argparse.Namespace, out: TextIO) -> tuple[int, str]:
    s, t = _parse_type_arg(a.type1), _parse_type_arg(a.type2)
    w = decide_equiv(s, t)
    if w is None:
        return EXIT_FALSE, "not-equivalent"
    out.write(f"witness: {sexpr.show_equiv(w)}\n")
    return EXIT_OK, "equivalent"


def cmd_translate(a: argparse.Namespace, out: TextIO) -> tuple[int, str]:
    if a.direction == "to-alg":
        tf = load_term_file(a.file)
        infer_type(tf.ctx, tf.term)
        try:
            t = to_alg(tf.term, a.cont or "k")
        except NotBinaryFragment as err:
            raise InputError(f"{a.file}: {err}") from err
        out.write(sexpr.show_alg(t) + "\n")
        return EXIT_OK, "translated"
    delta, t = load_alg_file(a.file)
    try:
        e = to_qexp(t, a.cont)  # type: ignore[arg-type]
    except AlgTypeError as err:
        raise InputError(f"{a.file}: {err}") from err
    tau = infer_type(delta, e)
    out.write(f"type: {sexpr.show_type(tau)}\n{sexpr.show_term(e)}\n")
    return EXIT_OK, "translated"


def cmd_axioms(a: argparse.Namespace, out: TextIO) -> tuple[int, str]:
    names = list(SUITES) if a.suite == "all" else [a.suite]
    ok = True
    for name in names:
        if ALIASES.get(name, name) not in SUITES:
            raise InputError(f"unknown suite {name}; known: all, {', '.join(list(SUITES) + list(ALIASES))}")
        res = run_suite(name, a.seed, a.count, a.tol)
        out.write("\n".join(res.lines()) + "\n")
        ok = ok and res.ok
    return (EXIT_OK, "pass") if ok else (EXIT_FALSE, "fail")


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qeq", description="Quantum equational reasoning toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable, help: str) -> argparse.ArgumentParser:  # noqa: A002
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("typecheck", cmd_typecheck, "infer the type of a term")
    sp.add_argument("file")

    sp = add("eval", cmd_eval, "apply a term's superoperator to a density matrix")
    sp.add_argument("file")
    sp.add_argument("density", help="JSON matrix {rows, cols, entries: [[re, im], ...]}")
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)

    sp = add("equiv", cmd_equiv, "compare two terms semantically")
    sp.add_argument("file1")
    sp.add_argument("file2")
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)

    sp = add("prove", cmd_prove, "search for an equational derivation")
    sp.add_argument("file1")
    sp.add_argument("file2")
    sp.add_argument("--depth", type=int, default=8)

    sp = add("normalize-type", cmd_normalize, "normal form of an open type with its witness")
    sp.add_argument("type")

    sp = add("decide-equiv", cmd_decide, "decide whether two open types are equivalent")
    sp.add_argument("type1")
    sp.add_argument("type2")

    sp = add("translate", cmd_translate, "translate between terms and algebraic terms")
    sp.add_argument("direction", choices=["to-alg", "to-qexp"])
    sp.add_argument("file")
    sp.add_argument("--cont", default=None, help="continuation name (default k, or inferred for to-qexp)")

    sp = add("axioms-check", cmd_axioms, "run a randomized equation sweep")
    sp.add_argument("suite", help="suite name or 'all'")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    return p


def _configure_logging() -> None:
    level = os.environ.get("QEQ_LOG", "warning").strip()
    value = int(level) if level.isdigit() else getattr(logging, level.upper(), logging.WARNING)
    logging.basicConfig(level=value, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        status, verdict = args.fn(args, out)
    except InputError as err:
        out.write(f"error: {err}\n")
        status, verdict = EXIT_ERROR, "error"
    except TypeCheckError as err:
        out.write(f"type error: {err}\n")
        status, verdict = EXIT_ERROR, f"ill-typed {err.kind.value}"
    out.write(f"RESULT: {verdict}\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
