"""Seeded random instance sampling for benchmarks and property tests."""

from __future__ import annotations

import math
import random
from fractions import Fraction

from .core import (
    Assignment,
    Atom,
    Constraint,
    Instance,
    Interval,
    Rational,
    make_instance,
)


def random_interval(rng: random.Random, k: int, closed_only: bool = False) -> Interval:
    kinds = ["point", "closed", "tail_up", "tail_down"]
    if not closed_only:
        kinds += ["open", "half_lo", "half_hi", "tail_up_strict", "tail_down_strict"]
    kind = rng.choice(kinds)
    if kind == "point":
        c = rng.randint(-k, k)
        return Interval(c, c, False, False)
    if kind == "tail_up":
        return Interval(rng.randint(-k, k), None, False, True)
    if kind == "tail_up_strict":
        return Interval(rng.randint(-k, k), None, True, True)
    if kind == "tail_down":
        return Interval(None, rng.randint(-k, k), True, False)
    if kind == "tail_down_strict":
        return Interval(None, rng.randint(-k, k), True, True)
    a = rng.randint(-k, k)
    b = rng.randint(a, k)
    if kind == "closed":
        return Interval(a, b, False, False)
    if a == b:
        return Interval(a, b, False, False)
    if kind == "open":
        return Interval(a, b, True, True)
    if kind == "half_lo":
        return Interval(a, b, True, False)
    return Interval(a, b, False, True)


def random_atom(rng: random.Random, n: int, k: int, closed_only: bool = False) -> Atom:
    x, y = rng.sample(range(n), 2)
    return Atom(x, y, random_interval(rng, k, closed_only))


def random_instance(
    rng: random.Random,
    n: int,
    k: int,
    n_constraints: int,
    max_disjuncts: int,
    closed_only: bool = False,
    one_pair_per_constraint: bool = False,
) -> Instance:
    names = tuple(f"v{i}" for i in range(n))
    if n < 2:
        return make_instance(names, ())
    constraints = []
    for _ in range(n_constraints):
        width = rng.randint(1, max_disjuncts)
        if one_pair_per_constraint:
            x, y = rng.sample(range(n), 2)
            atoms = tuple(
                Atom(x, y, random_interval(rng, k, closed_only)) for _ in range(width)
            )
        else:
            atoms = tuple(random_atom(rng, n, k, closed_only) for _ in range(width))
        constraints.append(Constraint(atoms))
    return make_instance(names, constraints)


def random_assignment(rng: random.Random, n: int, k: int) -> Assignment:
    out: Assignment = {}
    spread = 4 * (k + 1)
    for v in range(n):
        den = rng.randint(1, 4)
        out[v] = Fraction(rng.randint(-spread * den, spread * den), den)
    return out


def interval_containing(rng: random.Random, d: Rational, k: int, closed_only: bool = False) -> Interval:
    """A random interval with endpoint bound k that contains d."""
    lo_f = math.floor(d)
    hi_c = math.ceil(d)
    kinds = []
    if -k <= d <= k:
        kinds += ["box", "tail_up", "tail_down"]
        if d == lo_f:
            kinds.append("point")
    elif d > k:
        kinds.append("tail_up")
    else:
        kinds.append("tail_down")
    kind = rng.choice(kinds)
    if kind == "point":
        return Interval(lo_f, lo_f, False, False)
    if kind == "tail_up":
        a = rng.randint(-k, min(k, lo_f))
        strict = (not closed_only) and a < d and rng.random() < 0.5
        return Interval(a, None, strict, True)
    if kind == "tail_down":
        b = rng.randint(max(-k, hi_c), k)
        strict = (not closed_only) and d < b and rng.random() < 0.5
        return Interval(None, b, True, strict)
    a = rng.randint(-k, min(k, lo_f))
    b = rng.randint(max(-k, hi_c), k)
    lo_open = (not closed_only) and a < d and rng.random() < 0.5
    hi_open = (not closed_only) and d < b and rng.random() < 0.5
    if a == b and (lo_open or hi_open):
        lo_open = hi_open = False
    return Interval(a, b, lo_open, hi_open)


def planted_instance(
    rng: random.Random,
    n: int,
    k: int,
    n_constraints: int,
    max_disjuncts: int,
    closed_only: bool = False,
) -> tuple[Instance, Assignment]:
    """Random instance plus an assignment that satisfies it by construction."""
    names = tuple(f"v{i}" for i in range(n))
    phi = random_assignment(rng, n, k)
    if n < 2:
        return make_instance(names, ()), phi
    constraints = []
    for _ in range(n_constraints):
        width = rng.randint(1, max_disjuncts)
        atoms = [random_atom(rng, n, k, closed_only) for _ in range(width - 1)]
        x, y = rng.sample(range(n), 2)
        witness = Atom(x, y, interval_containing(rng, phi[x] - phi[y], k, closed_only))
        atoms.insert(rng.randint(0, len(atoms)), witness)
        constraints.append(Constraint(tuple(atoms)))
    return make_instance(names, constraints), phi
