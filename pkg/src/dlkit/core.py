"""Exact representation and evaluation of difference constraints.

Variables are integer ids into an instance's name table.  An atom states
x - y in I for an interval I over the rationals whose finite endpoints are
integers; a constraint is a disjunction of atoms; an instance is a
conjunction of constraints.  All arithmetic is exact (fractions.Fraction),
no floats anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

Rational = Fraction

# Interval endpoints are int, or None for the infinite end (always open).


@dataclass(frozen=True)
class Interval:
    lo: int | None
    hi: int | None
    lo_open: bool
    hi_open: bool

    def __post_init__(self) -> None:
        if self.lo is None and not self.lo_open:
            raise ValueError("infinite endpoint must be open")
        if self.hi is None and not self.hi_open:
            raise ValueError("infinite endpoint must be open")
        if self.lo is not None and self.hi is not None:
            if self.lo > self.hi:
                raise ValueError("empty interval")
            if self.lo == self.hi and (self.lo_open or self.hi_open):
                raise ValueError("empty interval")

    def contains(self, value: Rational | int) -> bool:
        if self.lo is not None:
            if self.lo_open:
                if not value > self.lo:
                    return False
            elif not value >= self.lo:
                return False
        if self.hi is not None:
            if self.hi_open:
                if not value < self.hi:
                    return False
            elif not value <= self.hi:
                return False
        return True

    def mirror(self) -> "Interval":
        """The reflected interval -I, so x-y in I iff y-x in mirror(I)."""
        lo = None if self.hi is None else -self.hi
        hi = None if self.lo is None else -self.lo
        return Interval(lo, hi, self.hi_open, self.lo_open)

    def is_point(self) -> bool:
        return self.lo is not None and self.lo == self.hi

    def __str__(self) -> str:
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        lo = "-inf" if self.lo is None else str(self.lo)
        hi = "+inf" if self.hi is None else str(self.hi)
        return f"{left}{lo},{hi}{right}"


def point(c: int) -> Interval:
    return Interval(c, c, False, False)


def closed(a: int, b: int) -> Interval:
    return Interval(a, b, False, False)


def openiv(a: int, b: int) -> Interval:
    return Interval(a, b, True, True)


def above(c: int) -> Interval:
    return Interval(c, None, True, True)


def at_least(c: int) -> Interval:
    return Interval(c, None, False, True)


def below(c: int) -> Interval:
    return Interval(None, c, True, True)


def at_most(c: int) -> Interval:
    return Interval(None, c, True, False)


def full() -> Interval:
    return Interval(None, None, True, True)


@dataclass(frozen=True)
class Atom:
    x: int
    y: int
    interval: Interval

    def __post_init__(self) -> None:
        if self.x == self.y and not self.interval.contains(0):
            raise ValueError("self-difference atom outside its interval")

    def oriented(self) -> "Atom":
        """Canonical form: smaller variable id on the left."""
        if self.x <= self.y:
            return self
        return Atom(self.y, self.x, self.interval.mirror())

    def __str__(self) -> str:
        return f"v{self.x} - v{self.y} in {self.interval}"


@dataclass(frozen=True)
class Constraint:
    atoms: tuple[Atom, ...]

    def variables(self) -> frozenset[int]:
        vs: set[int] = set()
        for a in self.atoms:
            vs.add(a.x)
            vs.add(a.y)
        return frozenset(vs)


EMPTY_CONSTRAINT = Constraint(())


@dataclass(frozen=True)
class Instance:
    var_names: tuple[str, ...]
    constraints: tuple[Constraint, ...]

    def __post_init__(self) -> None:
        if len(set(self.var_names)) != len(self.var_names):
            raise ValueError("duplicate variable name")
        n = len(self.var_names)
        for c in self.constraints:
            for a in c.atoms:
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


Assignment = dict[int, Rational]


def make_instance(var_names: Iterable[str], constraints: Iterable[Constraint]) -> Instance:
    return Instance(tuple(var_names), tuple(constraints))


def eval_atom(atom: Atom, assignment: Mapping[int, Rational]) -> bool:
    try:
        vx = assignment[atom.x]
        vy = assignment[atom.y]
    except KeyError as e:
        raise ValueError(f"unassigned variable {e.args[0]}") from None
    return atom.interval.contains(vx - vy)


def eval_constraint(c: Constraint, assignment: Mapping[int, Rational]) -> bool:
    return any(eval_atom(a, assignment) for a in c.atoms)


def eval_instance(inst: Instance, assignment: Mapping[int, Rational]) -> bool:
    return all(eval_constraint(c, assignment) for c in inst.constraints)


def violated_index(inst: Instance, assignment: Mapping[int, Rational]) -> int | None:
    """Index of the first unsatisfied constraint, or None if all hold."""
    for i, c in enumerate(inst.constraints):
        if not eval_constraint(c, assignment):
            return i
    return None


def atom_bound(a: Atom) -> int:
    b = 0
    if a.interval.lo is not None:
        b = abs(a.interval.lo)
    if a.interval.hi is not None:
        b = max(b, abs(a.interval.hi))
    return b


def num_bound(inst: Instance) -> int:
    b = 0
    for c in inst.constraints:
        for a in c.atoms:
            b = max(b, atom_bound(a))
    return b


def constraint_arity(c: Constraint) -> int:
    return len(c.variables())


def arity(inst: Instance) -> int:
    return max((constraint_arity(c) for c in inst.constraints), default=0)


def intersect_intervals(i1: Interval, i2: Interval) -> Interval | None:
    """Set intersection; None when empty.  On equal endpoints, open wins."""
    if i1.lo is None:
        lo, lo_open = i2.lo, i2.lo_open
    elif i2.lo is None:
        lo, lo_open = i1.lo, i1.lo_open
    else:
        lo = max(i1.lo, i2.lo)
        if i1.lo == i2.lo:
            lo_open = i1.lo_open or i2.lo_open
        else:
            lo_open = i1.lo_open if i1.lo > i2.lo else i2.lo_open
    if i1.hi is None:
        hi, hi_open = i2.hi, i2.hi_open
    elif i2.hi is None:
        hi, hi_open = i1.hi, i1.hi_open
    else:
        hi = min(i1.hi, i2.hi)
        if i1.hi == i2.hi:
            hi_open = i1.hi_open or i2.hi_open
        else:
            hi_open = i1.hi_open if i1.hi < i2.hi else i2.hi_open
    if lo is not None and hi is not None:
        if lo > hi or (lo == hi and (lo_open or hi_open)):
            return None
    return Interval(lo, hi, lo_open, hi_open)


def _is_tautology(c: Constraint) -> bool:
    return any(a.x == a.y for a in c.atoms)


def normalize_pairwise(inst: Instance) -> Instance:
    """Fold all constraints on a pair into one product-of-disjuncts constraint.

    Output has at most one constraint per unordered variable pair, atoms
    canonically oriented, plus a single trailing empty constraint if any
    input constraint was empty.  Solution set is unchanged.
    """
    if arity(inst) > 2:
        raise ValueError("pairwise normalization requires binary instance")
    had_empty = False
    by_pair: dict[tuple[int, int], list[Interval]] = {}
    order: list[tuple[int, int]] = []
    for c in inst.constraints:
        if not c.atoms:
            had_empty = True
            continue
        if _is_tautology(c):
            continue
        atoms = [a.oriented() for a in c.atoms]
        pair = (atoms[0].x, atoms[0].y)
        disjuncts = [a.interval for a in atoms]
        if pair not in by_pair:
            by_pair[pair] = disjuncts
            order.append(pair)
            continue
        product: list[Interval] = []
        for old in by_pair[pair]:
            for new in disjuncts:
                got = intersect_intervals(old, new)
                if got is not None and got not in product:
                    product.append(got)
        by_pair[pair] = product
    out: list[Constraint] = []
    for pair in sorted(order):
        x, y = pair
        if not by_pair[pair]:
            had_empty = True
            continue
        out.append(Constraint(tuple(Atom(x, y, iv) for iv in by_pair[pair])))
    if had_empty:
        out.append(EMPTY_CONSTRAINT)
    return Instance(inst.var_names, tuple(out))


def _unit_pieces(x: int, y: int, iv: Interval) -> list[Atom]:
    # Tails toward -inf become (c, inf)-tails on the swapped pair.
    if iv.lo is None and iv.hi is None:
        return [Atom(y, x, above(0)), Atom(x, y, point(0)), Atom(x, y, above(0))]
    if iv.lo is None:
        assert iv.hi is not None
        pieces = [Atom(y, x, above(-iv.hi))]
        if not iv.hi_open:
            pieces.append(Atom(x, y, point(iv.hi)))
        return pieces
    if iv.hi is None:
        pieces = []
        if not iv.lo_open:
            pieces.append(Atom(x, y, point(iv.lo)))
        pieces.append(Atom(x, y, above(iv.lo)))
        return pieces
    pieces = []
    for i in range(iv.lo, iv.hi + 1):
        if iv.contains(i):
            pieces.append(Atom(x, y, point(i)))
        if i < iv.hi:
            pieces.append(Atom(x, y, openiv(i, i + 1)))
    return pieces


def to_unit_disjuncts(c: Constraint, k: int) -> Constraint:
    """Rewrite every disjunct as unit relations: {i}, (i,i+1), or (i,inf)."""
    out: list[Atom] = []
    for a in c.atoms:
        if a.x == a.y:
            raise ValueError("unit decomposition of a self-difference atom")
        if atom_bound(a) > k:
            raise ValueError("unit decomposition endpoint exceeds bound")
        for piece in _unit_pieces(a.x, a.y, a.interval):
            if piece not in out:
                out.append(piece)
    return Constraint(tuple(out))


def add_zero_variable(
    inst: Instance, unary: Iterable[tuple[int, Interval]], name: str = "z"
) -> Instance:
    fresh = name
    i = 0
    while fresh in inst.var_names:
        i += 1
        fresh = f"{name}{i}"
    z = inst.var_count
    extra = tuple(Constraint((Atom(v, z, iv),)) for v, iv in unary)
    return Instance(inst.var_names + (fresh,), inst.constraints + extra)
