"""Solving when all values fit in a window [0, w).

Split every value into integer and fractional part.  Integer parts range
over {0..w-1} and are swept exhaustively; for fixed integer parts each
unit disjunct collapses to an order relation between the two fractional
parts, so what remains is a point-algebra system.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .core import (
    Assignment,
    Atom,
    Constraint,
    Instance,
    Interval,
    arity,
    normalize_pairwise,
    to_unit_disjuncts,
)
from .simple import PaSystem, pa_feasible, pa_system

# verdicts for a single unit disjunct under fixed integer parts
IMPLIED = "implied"  # holds for every fractional part, constraint drops

_LT = frozenset("<")
_EQ = frozenset("=")
_GT = frozenset(">")
_ALL = frozenset("<=>")


@dataclass(frozen=True)
class SpanProblem:
    w: int
    inst: Instance

    def __post_init__(self) -> None:
        if self.w < 1:
            raise ValueError("span must be at least 1")
        if arity(self.inst) > 2:
            raise ValueError("bounded span requires binary instance")


def unit_relation(c: int, iv: Interval) -> frozenset[str] | str | None:
    """Order relation on fractional parts forced by one unit disjunct
    when the integer parts differ by c.  None: cannot hold; IMPLIED:
    holds regardless."""
    if iv.lo is not None and iv.hi is None:
        if c > iv.lo:
            return IMPLIED
        if c == iv.lo:
            return _GT if iv.lo_open else frozenset("=>")
        return None
    if iv.is_point():
        return _EQ if c == iv.lo else None
    if iv.lo is None or iv.hi != iv.lo + 1 or not iv.lo_open or not iv.hi_open:
        raise ValueError(f"not a unit interval: {iv}")
    if c == iv.lo:
        return _GT
    if c == iv.hi:
        return _LT
    return None


def fractional_system(phi_int: Mapping[int, int], inst: Instance) -> PaSystem | None:
    """Point-algebra system of the fractional parts, or None when some
    constraint cannot hold under these integer parts.  Expects the
    normalized unit-disjunct form: one constraint per pair."""
    relations: dict[tuple[int, int], frozenset[str]] = {}
    for con in inst.constraints:
        if not con.atoms:
            return None
        x, y = con.atoms[0].x, con.atoms[0].y
        c = phi_int[x] - phi_int[y]
        rel: frozenset[str] = frozenset()
        dropped = False
        for a in con.atoms:
            got = unit_relation(c if (a.x, a.y) == (x, y) else -c, a.interval)
            if got is IMPLIED:
                dropped = True
                break
            if got is not None:
                if (a.x, a.y) != (x, y):
                    got = frozenset({"<": ">", ">": "<", "=": "="}[r] for r in got)
                rel |= got
        if dropped:
            continue
        if not rel:
            return None
        if rel == _ALL:
            continue
        key = (x, y)
        relations[key] = relations.get(key, _ALL) & rel
        if not relations[key]:
            return None
    return pa_system(len(phi_int), relations)


def _unit_form(inst: Instance, w: int) -> Instance:
    norm = normalize_pairwise(inst)
    out = []
    for c in norm.constraints:
        if not c.atoms:
            out.append(c)
        else:
            out.append(to_unit_disjuncts(c, w))
    return Instance(norm.var_names, tuple(out))


def _cell_compatible(c: int, con: Constraint) -> bool:
    x, y = con.atoms[0].x, con.atoms[0].y
    for a in con.atoms:
        if unit_relation(c if (a.x, a.y) == (x, y) else -c, a.interval) is not None:
            return True
    return False


def solve_bounded(w: int, inst: Instance) -> Assignment | None:
    """First model with all values in [0, w), or None.

    Integer parts are enumerated in variable-major ascending order; the
    fractional parts of the first feasible cell come from the point
    algebra ranking, scaled to rank/(rank_count+1)."""
    SpanProblem(w, inst)  # validates
    n = inst.var_count
    if n == 0:
        return None if any(not c.atoms for c in inst.constraints) else {}
    unit = _unit_form(inst, w)
    if any(not c.atoms for c in unit.constraints):
        return None
    by_depth: list[list[Constraint]] = [[] for _ in range(n)]
    for con in unit.constraints:
        by_depth[max(con.atoms[0].x, con.atoms[0].y)].append(con)
    phi_int = [0] * n

    def dfs(depth: int) -> dict[int, int] | None:
        if depth == n:
            pa = fractional_system({v: phi_int[v] for v in range(n)}, unit)
            if pa is None:
                return None
            return pa_feasible(pa)
        for val in range(w):
            phi_int[depth] = val
            ok = True
            for con in by_depth[depth]:
                x, y = con.atoms[0].x, con.atoms[0].y
                if not _cell_compatible(phi_int[x] - phi_int[y], con):
                    ok = False
                    break
            if ok:
                got = dfs(depth + 1)
                if got is not None:
                    return got
        return None

    ranking = dfs(0)
    if ranking is None:
        return None
    count = max(ranking.values()) + 1 if ranking else 1
    return {
        v: Fraction(phi_int[v]) + Fraction(ranking[v], count + 1) for v in range(n)
    }
