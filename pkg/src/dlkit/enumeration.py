"""Small-solution grid, exhaustive solving, and certificate listing.

Satisfiable instances on n variables with endpoint bound k always have a
model inside the grid CD(n,k) = { z + q/n : 0 <= z <= (n-1)(k+1), 0 <= q < n },
so exhaustive search over that grid is a complete decision procedure.
Internally all grid values are scaled by n so every comparison is on ints.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .core import (
    Assignment,
    Atom,
    Constraint,
    Instance,
    Rational,
    num_bound,
)
from .simple import SimpleSystem, stp_feasible

Certificate = frozenset


def cd_values(n: int, k: int) -> list[Fraction]:
    """The grid CD(n,k), ascending."""
    if n < 1:
        raise ValueError("cd grid needs at least one variable")
    if k < 0:
        raise ValueError("negative endpoint bound")
    return [Fraction(s, n) for s in range(((n - 1) * (k + 1) + 1) * n)]


# compiled atom: (x, y, lo_scaled, lo_open, hi_scaled, hi_open), bounds in n-ths
_CAtom = tuple[int, int, int | None, bool, int | None, bool]


def _compile_atom(a: Atom, n: int) -> _CAtom:
    iv = a.interval
    lo = None if iv.lo is None else iv.lo * n
    hi = None if iv.hi is None else iv.hi * n
    return (a.x, a.y, lo, iv.lo_open, hi, iv.hi_open)


def _atom_holds(ca: _CAtom, vals: list[int]) -> bool:
    x, y, lo, lo_open, hi, hi_open = ca
    d = vals[x] - vals[y]
    if lo is not None and (d <= lo if lo_open else d < lo):
        return False
    if hi is not None and (d >= hi if hi_open else d > hi):
        return False
    return True


def _compile(inst: Instance, n: int) -> tuple[list[list[list[_CAtom]]], bool]:
    """Constraints compiled and bucketed by their highest variable id."""
    by_depth: list[list[list[_CAtom]]] = [[] for _ in range(n)]
    has_empty = False
    for c in inst.constraints:
        if not c.atoms:
            has_empty = True
            continue
        if any(a.x == a.y for a in c.atoms):
            continue  # tautological disjunct
        top = max(max(a.x, a.y) for a in c.atoms)
        by_depth[top].append([_compile_atom(a, n) for a in c.atoms])
    return by_depth, has_empty


def solve_enumerate(inst: Instance) -> Assignment | None:
    """First model in variable-major, ascending-grid order, or None."""
    n = inst.var_count
    if n == 0:
        return None if any(not c.atoms for c in inst.constraints) else {}
    k = num_bound(inst)
    by_depth, has_empty = _compile(inst, n)
    if has_empty:
        return None
    m = ((n - 1) * (k + 1) + 1) * n
    vals = [0] * n

    def dfs(depth: int) -> bool:
        if depth == n:
            return True
        for s in range(m):
            vals[depth] = s
            if all(
                any(_atom_holds(ca, vals) for ca in catoms)
                for catoms in by_depth[depth]
            ) and dfs(depth + 1):
                return True
        return False

    if not dfs(0):
        return None
    return {v: Fraction(vals[v], n) for v in range(n)}


def atom_set(inst: Instance) -> list[Atom]:
    """Distinct atoms appearing in the instance, canonically oriented."""
    seen: list[Atom] = []
    for c in inst.constraints:
        for a in c.atoms:
            o = a.oriented()
            if o not in seen:
                seen.append(o)
    return seen


def list_certificates(inst: Instance) -> list[Certificate]:
    """All satisfied-atom sets over the grid sweep, deduplicated.

    Each satisfying assignment contributes the subset of the instance's
    atoms it satisfies; the list keeps first-discovery order of the sweep.
    Empty list iff the instance is unsatisfiable over the grid.
    """
    n = inst.var_count
    if n == 0:
        return [] if any(not c.atoms for c in inst.constraints) else [frozenset()]
    k = num_bound(inst)
    by_depth, has_empty = _compile(inst, n)
    if has_empty:
        return []
    atoms = atom_set(inst)
    catoms = [_compile_atom(a, n) for a in atoms]
    m = ((n - 1) * (k + 1) + 1) * n
    vals = [0] * n
    out: list[Certificate] = []
    seen: set[Certificate] = set()

    def sweep(depth: int) -> None:
        if depth == n:
            cert = frozenset(
                a for a, ca in zip(atoms, catoms) if _atom_holds(ca, vals)
            )
            if cert not in seen:
                seen.add(cert)
                out.append(cert)
            return
        for s in range(m):
            vals[depth] = s
            if all(
                any(_atom_holds(ca, vals) for ca in cs) for cs in by_depth[depth]
            ):
                sweep(depth + 1)

    sweep(0)
    return out


def certificate_oracle(inst: Instance, cap: int = 1_000_000) -> bool:
    """Reference decision: try every one-disjunct-per-constraint selection.

    The number of selections is checked against cap up front; infeasible
    prefixes are cut, which never changes the verdict because adding atoms
    only shrinks the solution set.
    """
    total = 1
    for c in inst.constraints:
        total *= len(c.atoms)
        if total > cap:
            raise ValueError("oracle blow-up")
    constraints = list(inst.constraints)
    chosen: list[Atom] = []

    def pick(i: int) -> bool:
        if stp_feasible(SimpleSystem(inst.var_count, tuple(chosen))) is None:
            return False
        if i == len(constraints):
            return True
        for a in constraints[i].atoms:
            chosen.append(a)
            if pick(i + 1):
                return True
            chosen.pop()
        return False

    return pick(0)


def _frac(v: Rational) -> Fraction:
    return v - math.floor(v)


def _diff_class(d: Rational, k: int) -> tuple:
    """Which D_{2,k} intervals contain d is determined by this tag."""
    if d > k:
        return ("hi",)
    if d < -k:
        return ("lo",)
    z = math.floor(d)
    return ("pt", z) if d == z else ("cell", z)


def equivalent_up_to(phi1: Assignment, phi2: Assignment, k: int) -> bool:
    """True iff the assignments satisfy the same single-atom constraints
    with endpoint bound k on their (shared) variable set."""
    if phi1.keys() != phi2.keys():
        raise ValueError("assignments must share a variable set")
    for x, y in itertools.permutations(phi1.keys(), 2):
        d1 = phi1[x] - phi1[y]
        d2 = phi2[x] - phi2[y]
        if _diff_class(d1, k) != _diff_class(d2, k):
            return False
    return True


def compactify(phi: Assignment, k: int) -> Assignment:
    """Map any rational assignment into CD(n,k) preserving all simple
    constraints with endpoint bound k: consecutive integer-part gaps are
    capped at k+1 and fractional parts are rank-compressed to q/n."""
    n = len(phi)
    if n == 0:
        return {}
    order = sorted(phi.keys(), key=lambda v: (phi[v], v))
    floors = {v: math.floor(phi[v]) for v in order}
    fracs = {v: _frac(phi[v]) for v in order}
    ranks = {q: i for i, q in enumerate(sorted(set(fracs.values())))}
    out: Assignment = {}
    c = 0
    prev = None
    for v in order:
        if prev is not None:
            c += min(floors[v] - floors[prev], k + 1)
        out[v] = Fraction(c) + Fraction(ranks[fracs[v]], n)
        prev = v
    return out
