"""Existential sentences built from difference atoms with and/or/not.

Instances only know conjunctions of disjunctions; a formula may nest
connectives freely and negate atoms.  Satisfiability still only needs the
compact grid: negation flips interval membership, so every subformula is
invariant under the same assignment equivalence that drives plain
enumeration.  The module also expands named relations that carry a
clause-form definition into ordinary instances.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .core import (
    Assignment,
    Atom,
    Constraint,
    Instance,
    Interval,
    Rational,
    atom_bound,
    eval_atom,
    full,
    make_instance,
)
from .enumeration import cd_values
from .textio import ParseError, _parse_interval

DEFAULT_CNF_CAP = 100_000


# ---------------------------------------------------------------------------
# Syntax tree.  Variables are ids into the owning Formula's name tuple.


@dataclass(frozen=True)
class FAtom:
    atom: Atom


@dataclass(frozen=True)
class FAnd:
    children: tuple["FNode", ...]


@dataclass(frozen=True)
class FOr:
    children: tuple["FNode", ...]


@dataclass(frozen=True)
class FNot:
    child: "FNode"


@dataclass(frozen=True)
class FFalse:
    pass


FNode = FAtom | FAnd | FOr | FNot | FFalse

FALSE = FFalse()


@dataclass(frozen=True)
class Formula:
    var_names: tuple[str, ...]
    root: FNode

    def __post_init__(self) -> None:
        if len(set(self.var_names)) != len(self.var_names):
            raise ValueError("duplicate variable name")
        n = len(self.var_names)
        for a in _atoms_of(self.root):
            if not (0 <= a.x < n and 0 <= a.y < n):
                raise ValueError(f"atom references unknown variable id: {a}")

    @property
    def var_count(self) -> int:
        return len(self.var_names)

    def var_id(self, name: str) -> int:
        try:
            return self.var_names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None


def make_formula(var_names: Iterable[str], root: FNode) -> Formula:
    return Formula(tuple(var_names), root)


def _atoms_of(node: FNode) -> Iterable[Atom]:
    if isinstance(node, FAtom):
        yield node.atom
    elif isinstance(node, (FAnd, FOr)):
        for c in node.children:
            yield from _atoms_of(c)
    elif isinstance(node, FNot):
        yield from _atoms_of(node.child)
    elif not isinstance(node, FFalse):
        raise ValueError(f"unknown formula node {node!r}")


def formula_num_bound(f: Formula) -> int:
    return max((atom_bound(a) for a in _atoms_of(f.root)), default=0)


# ---------------------------------------------------------------------------
# Evaluation and direct satisfiability by grid sweep.


def _eval(node: FNode, assignment: Mapping[int, Rational]) -> bool:
    if isinstance(node, FAtom):
        return eval_atom(node.atom, assignment)
    if isinstance(node, FAnd):
        return all(_eval(c, assignment) for c in node.children)
    if isinstance(node, FOr):
        return any(_eval(c, assignment) for c in node.children)
    if isinstance(node, FNot):
        return not _eval(node.child, assignment)
    return False  # FFalse


def eval_formula(f: Formula, assignment: Mapping[int, Rational]) -> bool:
    """Boolean value under a total assignment; negated atoms test non-membership."""
    for i, name in enumerate(f.var_names):
        if i not in assignment:
            raise ValueError(f"unbound variable {name!r}")
    return _eval(f.root, assignment)


def solve_dlsat(f: Formula) -> Assignment | None:
    """First satisfying grid assignment, or None.

    Sweeps the full compact grid for the formula's variable count and
    endpoint bound, evaluating the tree directly; no clause form is built.
    """
    n = f.var_count
    if n == 0:
        return {} if _eval(f.root, {}) else None
    vals = cd_values(n, formula_num_bound(f))
    for combo in itertools.product(vals, repeat=n):
        assignment: Assignment = dict(enumerate(combo))
        if _eval(f.root, assignment):
            return assignment
    return None


# ---------------------------------------------------------------------------
# Clause form.  Negation is pushed onto atoms (an interval complement is at
# most two tails with the same endpoints), then or distributes over and.
# A true subformula (not-false, or an empty conjunction) would normally
# swallow its or-siblings; instead the clause it absorbs them into is kept,
# marked tautological, and later granted one full-interval atom, so the
# endpoint bound of the output matches the input exactly.


def _complement(iv: Interval) -> list[Interval]:
    out = []
    if iv.lo is not None:
        out.append(Interval(None, iv.lo, True, not iv.lo_open))
    if iv.hi is not None:
        out.append(Interval(iv.hi, None, not iv.hi_open, True))
    return out


# clause under construction: (tautological, atoms)
_Clause = tuple[bool, tuple[Atom, ...]]


def _clauses(node: FNode, neg: bool, cap: int) -> list[_Clause]:
    if isinstance(node, FFalse):
        return [(True, ())] if neg else [(False, ())]
    if isinstance(node, FNot):
        return _clauses(node.child, not neg, cap)
    if isinstance(node, FAtom):
        a = node.atom
        if not neg:
            return [(False, (a,))]
        if a.x == a.y:
            # a constructible self-difference atom always holds
            return [(False, ())]
        tails = tuple(Atom(a.x, a.y, t) for t in _complement(a.interval))
        return [(False, tails)]
    if not isinstance(node, (FAnd, FOr)):
        raise ValueError(f"unknown formula node {node!r}")
    parts = [_clauses(c, neg, cap) for c in node.children]
    conjunctive = isinstance(node, FAnd) != neg
    if conjunctive:
        out = [cl for p in parts for cl in p]
        if len(out) > cap:
            raise ValueError("cnf blow-up")
        return out
    if any(not p for p in parts):
        # a clause-free part is plain true; keep the siblings' atoms anyway
        atoms = tuple(a for p in parts for _, cl in p for a in cl)
        return [(True, atoms)]
    size = 1
    for p in parts:
        size *= len(p)
        if size > cap:
            raise ValueError("cnf blow-up")
    merged = []
    for combo in itertools.product(*parts):
        taut = any(t for t, _ in combo)
        atoms = tuple(a for _, cl in combo for a in cl)
        merged.append((taut, atoms))
    return merged


def to_cnf(f: Formula, cap: int = DEFAULT_CNF_CAP) -> Instance:
    """Equivalent plain instance over the same variables.

    Raises when distribution would exceed cap clauses.  Every finite
    endpoint of the formula survives into the instance and none is added,
    so the endpoint bound is preserved; the exception is a negated
    self-difference atom, which folds to a truth value and takes its
    endpoints with it.
    """
    constraints = []
    for taut, atoms in _clauses(f.root, False, cap):
        if taut:
            if atoms:
                anchor = atoms[0]
                constraints.append(Constraint(atoms + (Atom(anchor.x, anchor.y, full()),)))
            continue  # no atoms to keep, clause is plain true
        constraints.append(Constraint(atoms))
    return make_instance(f.var_names, constraints)


# ---------------------------------------------------------------------------
# Named relations with clause-form definitions.


@dataclass(frozen=True)
class RelationTable:
    """Maps a relation name to (arity, clauses over argument positions)."""

    relations: dict[str, tuple[int, tuple[Constraint, ...]]]

    def __post_init__(self) -> None:
        for name, (ar, clauses) in self.relations.items():
            if ar < 1:
                raise ValueError(f"relation {name!r} needs positive arity")
            for cl in clauses:
                for a in cl.atoms:
                    if not (0 <= a.x < ar and 0 <= a.y < ar):
                        raise ValueError(
                            f"definition of {name!r} references position outside arity {ar}"
                        )


def make_relation_table(
    entries: Mapping[str, tuple[int, Iterable[Constraint]]],
) -> RelationTable:
    return RelationTable({nm: (ar, tuple(cls)) for nm, (ar, cls) in entries.items()})


def expand_relations(
    table: RelationTable, apps: Sequence[tuple[str, Sequence[str]]]
) -> Instance:
    """Instance produced by substituting each application into its definition.

    Variables appear in first-use order.  Repeating a variable inside one
    application collapses a definition atom onto a self-difference; when its
    interval misses zero that disjunct can never hold and is dropped.
    """
    names: list[str] = []
    ids: dict[str, int] = {}
    constraints: list[Constraint] = []
    for name, args in apps:
        if name not in table.relations:
            raise ValueError(f"unknown relation {name!r}")
        ar, clauses = table.relations[name]
        if len(args) != ar:
            raise ValueError(f"relation {name!r} expects {ar} arguments, got {len(args)}")
        arg_ids = []
        for nm in args:
            if nm not in ids:
                ids[nm] = len(names)
                names.append(nm)
            arg_ids.append(ids[nm])
        for cl in clauses:
            atoms = []
            for a in cl.atoms:
                x, y = arg_ids[a.x], arg_ids[a.y]
                if x == y and not a.interval.contains(0):
                    continue
                atoms.append(Atom(x, y, a.interval))
            constraints.append(Constraint(tuple(atoms)))
    return make_instance(names, constraints)


# ---------------------------------------------------------------------------
# Text form: prefix expressions, one atom token shape, round-trips exactly.
#   (and ...)  (or ...)  (not X)  (atom x - y in [0,3])  false

_WORDS = {"and", "or", "not", "atom", "false", "in", "-"}

# interval literals may carry parens of their own, so they lex as one token
_TOKEN_RE = re.compile(r"[\[\(](?:-inf|-?\d+),(?:\+inf|-?\d+)[\]\)]|[()]|[^()\s]+")


def _lex(text: str) -> list[tuple[int, int, str]]:
    out = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        cut = raw.find("#")
        if cut >= 0:
            raw = raw[:cut]
        for m in _TOKEN_RE.finditer(raw):
            out.append((ln, m.start() + 1, m.group()))
    return out


class _Tokens:
    def __init__(self, items: list[tuple[int, int, str]]):
        self.items = items
        self.pos = 0

    def peek(self) -> tuple[int, int, str] | None:
        if self.pos < len(self.items):
            return self.items[self.pos]
        return None

    def take(self, what: str) -> tuple[int, int, str]:
        tok = self.peek()
        if tok is None:
            ln, col, last = self.items[-1] if self.items else (1, 1, "")
            raise ParseError(ln, col + len(last), f"expected {what}, got end of input")
        self.pos += 1
        return tok


def _parse_name(toks: _Tokens, names: list[str], ids: dict[str, int]) -> tuple[int, int, int]:
    ln, col, tok = toks.take("a variable name")
    if tok in _WORDS or tok in "()" or _parse_interval_ok(tok):
        raise ParseError(ln, col, f"invalid variable name {tok!r}")
    if tok not in ids:
        ids[tok] = len(names)
        names.append(tok)
    return ids[tok], ln, col


def _parse_interval_ok(tok: str) -> bool:
    try:
        _parse_interval(tok, 1, 1)
    except ParseError:
        return False
    return True


def _expect(toks: _Tokens, literal: str) -> None:
    ln, col, tok = toks.take(f"'{literal}'")
    if tok != literal:
        raise ParseError(ln, col, f"expected '{literal}', got {tok!r}")


def _parse_node(toks: _Tokens, names: list[str], ids: dict[str, int]) -> FNode:
    ln, col, tok = toks.take("a formula")
    if tok == "false":
        return FALSE
    if tok != "(":
        raise ParseError(ln, col, f"expected '(' or 'false', got {tok!r}")
    ln, col, op = toks.take("an operator")
    if op in ("and", "or"):
        children = []
        while True:
            nxt = toks.peek()
            if nxt is not None and nxt[2] == ")":
                toks.pos += 1
                break
            children.append(_parse_node(toks, names, ids))
        return FAnd(tuple(children)) if op == "and" else FOr(tuple(children))
    if op == "not":
        child = _parse_node(toks, names, ids)
        _expect(toks, ")")
        return FNot(child)
    if op == "atom":
        x, lx, cx = _parse_name(toks, names, ids)
        _expect(toks, "-")
        y, _, _ = _parse_name(toks, names, ids)
        _expect(toks, "in")
        li, ci, iv_tok = toks.take("an interval")
        iv = _parse_interval(iv_tok, li, ci)
        _expect(toks, ")")
        if x == y and not iv.contains(0):
            raise ParseError(lx, cx, f"self-difference atom can never lie in {iv}")
        return FAtom(Atom(x, y, iv))
    raise ParseError(ln, col, f"expected 'and', 'or', 'not' or 'atom', got {op!r}")


def parse_formula(text: str) -> Formula:
    toks = _Tokens(_lex(text))
    if toks.peek() is None:
        raise ParseError(1, 1, "empty formula")
    names: list[str] = []
    ids: dict[str, int] = {}
    root = _parse_node(toks, names, ids)
    left = toks.peek()
    if left is not None:
        raise ParseError(left[0], left[1], f"trailing input {left[2]!r}")
    return Formula(tuple(names), root)


def _print_node(node: FNode, names: tuple[str, ...]) -> str:
    if isinstance(node, FAtom):
        a = node.atom
        return f"(atom {names[a.x]} - {names[a.y]} in {a.interval})"
    if isinstance(node, FAnd):
        return "(and" + "".join(" " + _print_node(c, names) for c in node.children) + ")"
    if isinstance(node, FOr):
        return "(or" + "".join(" " + _print_node(c, names) for c in node.children) + ")"
    if isinstance(node, FNot):
        return f"(not {_print_node(node.child, names)})"
    return "false"


def print_formula(f: Formula) -> str:
    return _print_node(f.root, f.var_names) + "\n"
