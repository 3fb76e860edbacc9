"""Labeled benchmark generators: reductions into difference-logic fragments.

Each generator takes a combinatorial source problem whose answer is cheap to
brute-force (subset sums, one-per-row independent sets in a square grid,
small CSPs with disequality structure, multicoloured cliques) and emits a
difference-logic instance whose satisfiability tracks the source.  The
heavyweight constructions additionally expose the planted assignment used
by their correctness argument, so yes-instances can be certified without
solving the output.

Variable naming is part of the contract: every generator documents its name
schema, and planted assignments are keyed by those names.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import (
    EMPTY_CONSTRAINT,
    Atom,
    Constraint,
    Instance,
    Interval,
    above,
    at_least,
    at_most,
    below,
    closed,
    make_instance,
    num_bound,
    openiv,
    point,
)
from .sidon import sidon_set

GridVertex = tuple[int, int]
GridEdge = tuple[GridVertex, GridVertex]


@dataclass(frozen=True)
class GridGraph:
    """n-by-n grid; vertices are (row, column) pairs, both in [1..n]."""

    n: int
    edges: frozenset[GridEdge]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("grid size must be positive")
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if u > v:
                raise ValueError(f"edge ({u}, {v}) not normalized")
            for r, c in (u, v):
                if not (1 <= r <= self.n and 1 <= c <= self.n):
                    raise ValueError(f"vertex {(r, c)} outside the grid")


def grid_graph(n: int, edges: Iterable[GridEdge]) -> GridGraph:
    """Normalize unordered edge pairs and validate against the grid."""
    norm = set()
    for u, v in edges:
        u, v = (tuple(u), tuple(v))
        norm.add((min(u, v), max(u, v)))
    return GridGraph(n, frozenset(norm))


# ---------------------------------------------------------------------------
# Subset Sum as a cycle of choice constraints.


def gen_subset_sum(values: Sequence[int], target: int) -> Instance:
    """Instance over x0..xn that is satisfiable iff a subset sums to target.

    Each step either skips an element (difference 0) or takes it; the
    closing constraint pins the total.  The primal graph is a cycle, so the
    output is a natural fixture for width-bounded solvers.
    """
    values = list(values)
    if any(s < 1 for s in values):
        raise ValueError("values must be positive")
    if target < 0:
        raise ValueError("target must be non-negative")
    n = len(values)
    names = [f"x{i}" for i in range(n + 1)]
    if n == 0:
        # Degenerate 0 = target check on a single variable.
        cons = [] if target == 0 else [EMPTY_CONSTRAINT]
        return make_instance(names, cons)
    cons = []
    for i, s in enumerate(values, start=1):
        cons.append(
            Constraint((Atom(i, i - 1, point(0)), Atom(i, i - 1, point(s))))
        )
    cons.append(Constraint((Atom(n, 0, point(target)),)))
    return make_instance(names, cons)


# ---------------------------------------------------------------------------
# One-per-row independent set, bound-free four-variable encoding.


def gen_is_d40(g: GridGraph) -> Instance:
    """Arity-4, endpoint-0 instance satisfiable iff g has a one-per-row IS.

    Variables c1..cn (strictly increasing column marks) and r1..rn (one per
    row).  Row variables are snapped onto the column marks by interval
    exclusion; an edge between (a,i) and (b,j) is excluded by the four-atom
    disjunction "r_a avoids c_i or r_b avoids c_j".
    """
    n = g.n
    names = [f"c{j}" for j in range(1, n + 1)] + [f"r{i}" for i in range(1, n + 1)]
    col = {j: j - 1 for j in range(1, n + 1)}
    row = {i: n + i - 1 for i in range(1, n + 1)}
    cons = []
    for j in range(2, n + 1):
        cons.append(Constraint((Atom(col[j], col[j - 1], above(0)),)))
    for i in range(1, n + 1):
        cons.append(Constraint((Atom(row[i], col[1], at_least(0)),)))
        cons.append(Constraint((Atom(row[i], col[n], at_most(0)),)))
        for j in range(2, n + 1):
            cons.append(
                Constraint(
                    (
                        Atom(row[i], col[j - 1], at_most(0)),
                        Atom(row[i], col[j], at_least(0)),
                    )
                )
            )
    for (a, i), (b, j) in sorted(g.edges):
        cons.append(
            Constraint(
                (
                    Atom(row[a], col[i], below(0)),
                    Atom(row[a], col[i], above(0)),
                    Atom(row[b], col[j], below(0)),
                    Atom(row[b], col[j], above(0)),
                )
            )
        )
    return make_instance(names, cons)


# ---------------------------------------------------------------------------
# One-per-row independent set, arity-3 encoding over a Sidon ruler.


def _d31_ruler(n: int) -> tuple[int, ...]:
    return sidon_set(n + 1).elements


def gen_is_d31(g: GridGraph, *, closed_edges: bool = False) -> Instance:
    """Arity <= 3 encoding of one-per-row IS over a Sidon-valued ruler.

    Variables x1..xr (rows) and a unit chain y0..yL pinning y_i = i up to a
    global shift, where L is the largest ruler mark.  Row variables are
    snapped to integers, then to ruler marks; choosing column j means
    x_i = a_j.  An edge between (c,c') and (d,d') is excluded through the
    mark difference e = a_{c'} - a_{d'}: the constraint says
    x_c - x_d != e, emitted as the strict pair (x_c - x_d < e) or
    (x_c - x_d > e), or as its closed integer shift when closed_edges is
    set.  Edge constraints on distinct rows with distinct columns carry
    the endpoint bound |e|; no two-variable disjunction with unit bounds
    can separate a single far difference, so this is the tightest fragment
    the exclusion fits in.  Same-row edges exclude nothing (a row variable
    holds one value) and are skipped.

    The canonical assignment for a row choice maps x_i to the chosen mark
    and y_i to i; it satisfies the instance iff no edge has its mark
    difference realized by the choice.
    """
    r = g.n
    ruler = _d31_ruler(r)
    top = ruler[-1]
    names = [f"x{i}" for i in range(1, r + 1)] + [f"y{i}" for i in range(top + 1)]
    xv = {i: i - 1 for i in range(1, r + 1)}
    yv = {i: r + i for i in range(top + 1)}
    marks = set(ruler)
    cons = []
    for i in range(top):
        cons.append(Constraint((Atom(yv[i + 1], yv[i], at_most(1)),)))
        cons.append(Constraint((Atom(yv[i], yv[i + 1], at_most(-1)),)))
    for i in range(1, r + 1):
        x = xv[i]
        cons.append(Constraint((Atom(x, yv[0], at_least(0)),)))
        cons.append(Constraint((Atom(x, yv[top], at_most(0)),)))
        for m in range(1, top + 1):
            cons.append(
                Constraint(
                    (
                        Atom(x, yv[m], at_most(-1)),
                        Atom(x, yv[m], point(0)),
                        Atom(x, yv[m], at_least(1)),
                    )
                )
            )
        for m in range(top + 1):
            if m not in marks:
                cons.append(
                    Constraint(
                        (Atom(x, yv[m], at_most(-1)), Atom(x, yv[m], at_least(1)))
                    )
                )
    for (c, cc), (d, dc) in sorted(g.edges):
        if c == d:
            continue
        e = ruler[cc] - ruler[dc]
        if closed_edges:
            atoms = (Atom(xv[c], xv[d], at_most(e - 1)), Atom(xv[c], xv[d], at_least(e + 1)))
        else:
            atoms = (Atom(xv[c], xv[d], below(e)), Atom(xv[c], xv[d], above(e)))
        cons.append(Constraint(atoms))
    return make_instance(names, cons)


def d31_canonical_assignment(g: GridGraph, choice: Sequence[int]) -> dict[str, Fraction]:
    """Name-keyed assignment placing row i on the mark of choice[i-1]."""
    r = g.n
    if len(choice) != r or any(not 1 <= j <= r for j in choice):
        raise ValueError("choice must pick one column per row")
    ruler = _d31_ruler(r)
    out = {f"x{i}": Fraction(ruler[j]) for i, j in enumerate(choice, start=1)}
    for i in range(ruler[-1] + 1):
        out[f"y{i}"] = Fraction(i)
    return out


# ---------------------------------------------------------------------------
# One-per-row independent set, binary encoding with quadratic endpoints.


def gen_is_d2(g: GridGraph) -> Instance:
    """Binary closed instance (endpoints up to n^2), SAT iff one-per-row IS.

    Row i picks x_i = z + v with v in [1..n]; the companion xp_i is forced
    to z + n*v by the two scaled-choice constraints.  The pair (v_a, v_b)
    behind an edge is then a single value of xp_a - x_b = n*v_a - v_b and
    one two-tail disjunction excludes it.
    """
    n = g.n
    names = ["z"] + [f"x{i}" for i in range(1, n + 1)] + [f"xp{i}" for i in range(1, n + 1)]
    x = {i: i for i in range(1, n + 1)}
    xp = {i: n + i for i in range(1, n + 1)}
    cons = []
    for i in range(1, n + 1):
        cons.append(Constraint(tuple(Atom(x[i], 0, point(v)) for v in range(1, n + 1))))
        cons.append(
            Constraint(tuple(Atom(xp[i], x[i], point((n - 1) * v)) for v in range(1, n + 1)))
        )
        cons.append(Constraint(tuple(Atom(xp[i], 0, point(n * v)) for v in range(1, n + 1))))
    for (a, i), (b, j) in sorted(g.edges):
        w = n * i - j
        cons.append(
            Constraint((Atom(xp[a], x[b], at_most(w - 1)), Atom(xp[a], x[b], at_least(w + 1))))
        )
    return make_instance(names, cons)


# ---------------------------------------------------------------------------
# CSPs of disequality facts with the implicit all-diagonal rule.


@dataclass(frozen=True)
class DcspInstance:
    """CSP over [1..d] built from unary and binary disequality facts.

    unary holds (variable, value) meaning x != value.  binary holds
    (x, y, a, b) with x < y meaning x != a or y != b.  Any pair that
    carries at least one binary fact is implicitly constrained to take
    different values (the diagonal rule); solution checks must apply it.
    """

    d: int
    var_count: int
    unary: frozenset[tuple[int, int]]
    binary: frozenset[tuple[int, int, int, int]]

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("domain size must be positive")
        if self.var_count < 0:
            raise ValueError("variable count must be non-negative")
        for x, a in self.unary:
            if not 0 <= x < self.var_count:
                raise ValueError(f"unary fact on unknown variable {x}")
            if not 1 <= a <= self.d:
                raise ValueError(f"unary value {a} outside domain")
        for x, y, a, b in self.binary:
            if not 0 <= x < y < self.var_count:
                raise ValueError(f"binary fact on bad pair ({x}, {y})")
            if not (1 <= a <= self.d and 1 <= b <= self.d):
                raise ValueError("binary values outside domain")

    def constrained_pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset((x, y) for x, y, _, _ in self.binary)


def dcsp_instance(
    d: int,
    var_count: int,
    unary: Iterable[tuple[int, int]] = (),
    binary: Iterable[tuple[int, int, int, int]] = (),
) -> DcspInstance:
    """Normalize binary facts so the lower variable comes first."""
    norm = set()
    for x, y, a, b in binary:
        if x == y:
            raise ValueError("binary fact needs two distinct variables")
        if x > y:
            x, y, a, b = y, x, b, a
        norm.add((x, y, a, b))
    return DcspInstance(d, var_count, frozenset(unary), frozenset(norm))


def _effective_binary(inst: DcspInstance) -> set[tuple[int, int, int, int]]:
    """Explicit facts plus the diagonal facts the pair rule implies."""
    facts = set(inst.binary)
    for x, y in inst.constrained_pairs():
        for c in range(1, inst.d + 1):
            facts.add((x, y, c, c))
    return facts


def dcsp_compress(inst: DcspInstance, r: int) -> DcspInstance:
    """Re-encode over blocks of r variables with tuple domain d^r.

    Blocks are consecutive variable runs (the tail padded with fresh,
    unconstrained variables); a tuple t maps to the value
    1 + sum (t_p - 1) d^p.  Facts lift pointwise: a source fact forbidding
    a combination forbids every tuple pair exhibiting it, and same-block
    combinations become unary exclusions.

    The diagonal rule does not survive compression in general: the output
    instance forbids equal tuples on every pair that carries a lifted
    fact, which can exclude assignments the source allows (two blocks may
    legitimately coincide as tuples even though some inner positions are
    constrained).  Lifts of instances whose facts stay inside one block,
    and r = 1 re-encodings, are exact.
    """
    if r < 1:
        raise ValueError("block size must be positive")
    blocks = (inst.var_count + r - 1) // r
    tuples = list(itertools.product(range(1, inst.d + 1), repeat=r))

    def enc(t: tuple[int, ...]) -> int:
        v = 0
        for p in range(r - 1, -1, -1):
            v = v * inst.d + (t[p] - 1)
        return v + 1

    unary: set[tuple[int, int]] = set()
    binary: set[tuple[int, int, int, int]] = set()
    for x, a in inst.unary:
        bx, px = divmod(x, r)
        for t in tuples:
            if t[px] == a:
                unary.add((bx, enc(t)))
    for x, y, a, b in _effective_binary(inst):
        bx, px = divmod(x, r)
        by, py = divmod(y, r)
        if bx == by:
            for t in tuples:
                if t[px] == a and t[py] == b:
                    unary.add((bx, enc(t)))
            continue
        for s in tuples:
            if s[px] != a:
                continue
            for t in tuples:
                if t[py] == b:
                    fact = (bx, by, enc(s), enc(t))
                    if bx > by:
                        fact = (by, bx, enc(t), enc(s))
                    binary.add(fact)
    return DcspInstance(inst.d**r, blocks, frozenset(unary), frozenset(binary))


def dcsp_to_d2k(inst: DcspInstance) -> Instance:
    """Binary difference-logic instance equisatisfiable with the CSP.

    Values are injected through a Sidon ruler so value pairs correspond
    one-to-one to differences: v_x - z snaps to the ruler marks left open
    by the unary facts, and a binary fact forbidding (a, b) excludes the
    single difference mark(a) - mark(b) with a two-tail disjunction.
    Variables: z, then v0..v{n-1}.
    """
    ruler = sidon_set(inst.d).elements
    names = ["z"] + [f"v{i}" for i in range(inst.var_count)]
    cons = []
    for x in range(inst.var_count):
        banned = {a for (xx, a) in inst.unary if xx == x}
        atoms = tuple(
            Atom(1 + x, 0, point(ruler[c - 1]))
            for c in range(1, inst.d + 1)
            if c not in banned
        )
        cons.append(Constraint(atoms))
    for x, y, a, b in sorted(_effective_binary(inst)):
        delta = ruler[a - 1] - ruler[b - 1]
        cons.append(
            Constraint(
                (
                    Atom(1 + x, 1 + y, at_most(delta - 1)),
                    Atom(1 + x, 1 + y, at_least(delta + 1)),
                )
            )
        )
    return make_instance(names, cons)


# ---------------------------------------------------------------------------
# Multi-dimensional partitioned subset sum and the clique reduction into it.


def coordinate_pairs(k: int) -> tuple[tuple[int, int], ...]:
    """Lexicographic bijection between [1..C(k,2)] and index pairs a < b."""
    return tuple((a, b) for a in range(1, k + 1) for b in range(a + 1, k + 1))


@dataclass(frozen=True)
class UniformVector:
    """Vector whose non-zero coordinates all carry the same value."""

    value: int
    support: frozenset[int]

    def __post_init__(self) -> None:
        if self.value < 1:
            raise ValueError("vector value must be positive")
        if not self.support:
            raise ValueError("support must be non-empty")


@dataclass(frozen=True)
class MpssInstance:
    """One-vector-per-set partitioned subset sum over C(k,2) coordinates.

    v_sets[i-1] holds vectors supported on every coordinate touching index
    i; e_sets[r-1] holds vectors supported on the single coordinate r.  A
    solution picks one vector from each set so that every coordinate sums
    to target.  Within a set, vector values are pairwise distinct.
    """

    k: int
    target: int
    v_sets: tuple[tuple[UniformVector, ...], ...]
    e_sets: tuple[tuple[UniformVector, ...], ...]

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValueError("need at least two indices")
        if self.target < 1:
            raise ValueError("target must be positive")
        pairs = coordinate_pairs(self.k)
        if len(self.v_sets) != self.k or len(self.e_sets) != len(pairs):
            raise ValueError("set list lengths must match k and C(k,2)")
        for i, vs in enumerate(self.v_sets, start=1):
            want = frozenset(r for r, (a, b) in enumerate(pairs, start=1) if i in (a, b))
            for v in vs:
                if v.support != want:
                    raise ValueError(f"vector in V_{i} has wrong support")
            if len({v.value for v in vs}) != len(vs):
                raise ValueError(f"repeated value inside V_{i}")
        for r, es in enumerate(self.e_sets, start=1):
            for v in es:
                if v.support != frozenset({r}):
                    raise ValueError(f"vector in E_{r} has wrong support")
            if len({v.value for v in es}) != len(es):
                raise ValueError(f"repeated value inside E_{r}")


def mcc_to_mpss(parts: Sequence[Sequence[int]], edges: Iterable[tuple[int, int]]) -> MpssInstance:
    """MPSS instance solvable iff the k-partite graph has a full clique.

    Vertices must be numbered 1..V and partitioned by parts; edges join
    different parts.  Vertex u is weighted by the u-th positive mark of a
    Sidon ruler, the target is one more than the largest two-mark sum, and
    an edge contributes the complement of its endpoint weights, so a
    coordinate reaches the target exactly when its two index vectors and
    its edge vector come from a genuine triangle corner.
    """
    k = len(parts)
    if k < 2:
        raise ValueError("need at least two parts")
    flat = sorted(v for part in parts for v in part)
    total = len(flat)
    if flat != list(range(1, total + 1)):
        raise ValueError("parts must partition vertices 1..V")
    part_of = {}
    for i, part in enumerate(parts, start=1):
        for v in part:
            part_of[v] = i
    ruler = sidon_set(total + 1).elements[1:]
    weight = {v: ruler[v - 1] for v in range(1, total + 1)}
    if total >= 2:
        target = ruler[-1] + ruler[-2] + 1
    elif total == 1:
        target = 2 * ruler[-1] + 1
    else:
        target = 1
    pairs = coordinate_pairs(k)
    index_of = {pr: r for r, pr in enumerate(pairs, start=1)}
    edge_lists: dict[int, list[UniformVector]] = {r: [] for r in index_of.values()}
    for u, v in edges:
        u, v = min(u, v), max(u, v)
        if part_of.get(u) is None or part_of.get(v) is None:
            raise ValueError(f"edge ({u}, {v}) uses unknown vertices")
        pu, pv = part_of[u], part_of[v]
        if pu == pv:
            raise ValueError("parts must be independent sets")
        r = index_of[(min(pu, pv), max(pu, pv))]
        edge_lists[r].append(UniformVector(target - weight[u] - weight[v], frozenset({r})))
    v_sets = []
    for i in range(1, k + 1):
        support = frozenset(r for r, (a, b) in enumerate(pairs, start=1) if i in (a, b))
        v_sets.append(tuple(UniformVector(weight[u], support) for u in parts[i - 1]))
    return MpssInstance(
        k, target, tuple(v_sets), tuple(tuple(edge_lists[r]) for r in sorted(edge_lists))
    )


# ---------------------------------------------------------------------------
# MPSS into unit-bound binary difference logic.


def _board_specs(m: MpssInstance):
    """Shared layout for the unit-bound board and its planted assignments.

    Returns (base variable names, constraint specs, M, bucket name map,
    garbage name map, pair records).  Specs are interpreted twice: once to
    emit constraints and auxiliary variables, once to place values.
    """
    pairs = coordinate_pairs(m.k)
    big_k = len(pairs)
    spread = sum(v.value for vs in m.v_sets for v in vs) + sum(
        v.value for es in m.e_sets for v in es
    )
    gap = big_k * m.target + spread

    names: list[str] = []
    bucket: dict[tuple[int, int], str] = {}
    for r in range(1, big_k + 1):
        for l in range(1, 5):
            nm = f"b{r}_{l}"
            bucket[(r, l)] = nm
            names.append(nm)
    garbage: dict[tuple[str, int, int], str] = {}
    chains = [("V", i, m.v_sets[i - 1]) for i in range(1, m.k + 1)]
    chains += [("E", r, m.e_sets[r - 1]) for r in range(1, big_k + 1)]
    for kind, idx, vs in chains:
        for l in range(len(vs) + 1):
            nm = f"g{kind}{idx}_{l}"
            garbage[(kind, idx, l)] = nm
            names.append(nm)

    pair_records = []
    for i in range(1, m.k + 1):
        for l, vec in enumerate(m.v_sets[i - 1], start=1):
            for c in sorted(vec.support):
                a, b = pairs[c - 1]
                bx, by = ((c, 1), (c, 2)) if a == i else ((c, 2), (c, 3))
                x, y = f"xV{i}_{l}_{c}", f"yV{i}_{l}_{c}"
                names.extend((x, y))
                pair_records.append(
                    {
                        "x": x,
                        "y": y,
                        "span": vec.value,
                        "bx": bucket[bx],
                        "by": bucket[by],
                        "gx": garbage[("V", i, l - 1)],
                        "gy": garbage[("V", i, l)],
                        "kind": "V",
                        "set": i,
                        "member": l,
                    }
                )
    for r in range(1, big_k + 1):
        for l, vec in enumerate(m.e_sets[r - 1], start=1):
            x, y = f"xE{r}_{l}", f"yE{r}_{l}"
            names.extend((x, y))
            pair_records.append(
                {
                    "x": x,
                    "y": y,
                    "span": vec.value,
                    "bx": bucket[(r, 3)],
                    "by": bucket[(r, 4)],
                    "gx": garbage[("E", r, l - 1)],
                    "gy": garbage[("E", r, l)],
                    "kind": "E",
                    "set": r,
                    "member": l,
                }
            )

    specs: list[tuple] = []
    for r in range(1, big_k + 1):
        for l in range(1, 4):
            specs.append(("ge0", bucket[(r, l + 1)], bucket[(r, l)]))
        specs.append(("eq", bucket[(r, 4)], bucket[(r, 1)], m.target, f"N{r}"))
        if r < big_k:
            specs.append(("eq", bucket[(r + 1, 1)], bucket[(r, 4)], 0, None))
    prev_end: str | None = None
    for kind, idx, vs in chains:
        first = garbage[(kind, idx, 0)]
        if prev_end is not None:
            specs.append(("eq", first, prev_end, 0, None))
        for l in range(1, len(vs) + 1):
            specs.append(("ge0", garbage[(kind, idx, l)], garbage[(kind, idx, l - 1)]))
        width = sum(v.value for v in vs)
        last = garbage[(kind, idx, len(vs))]
        if width == 0:
            specs.append(("false",))
        else:
            specs.append(("lt", last, first, width, f"W{kind}{idx}"))
        prev_end = last
    specs.append(("eq", garbage[("V", 1, 0)], bucket[(big_k, 4)], gap, "M"))
    for rec in pair_records:
        tag = f"s{rec['kind']}{rec['set']}_{rec['member']}"
        if rec["kind"] == "V":
            tag += "_" + rec["x"].rsplit("_", 1)[1]
        specs.append(("eq", rec["y"], rec["x"], rec["span"], tag))
        specs.append(("gadget", rec["bx"], rec["x"], gap, f"pB_{rec['x']}"))
        specs.append(("gadget", rec["x"], rec["gx"], gap, f"pG_{rec['x']}"))
        specs.append(("gadget", rec["by"], rec["y"], gap, f"pB_{rec['y']}"))
        specs.append(("gadget", rec["y"], rec["gy"], gap, f"pG_{rec['y']}"))
    return names, specs, gap, bucket, garbage, pair_records


def mpss_to_d21(m: MpssInstance) -> Instance:
    """Unit-endpoint binary board whose models realize MPSS solutions.

    Layout: per coordinate r a bucket b{r}_1..b{r}_4 of span target, the
    consecutive buckets chained; per set a garbage strip g<kind><i>_l of
    total width strictly below the set's value sum; a gap of
    M = K*target + (sum of all vector values) between the last bucket and
    the first strip.  Every vector contributes an (x, y) pair with
    y - x = value; two occupancy gadgets per endpoint force the pair to
    sit either at its bucket positions or in its garbage slot (an
    endpoint is at its anchor, or beyond it by more than M).  Long
    equalities and strict width bounds are stretched into unit-step
    chains h<tag>_t, and occupancy uses the skip-free chain gadget, so
    every atom endpoint lies in {-1, 0, 1}.
    """
    names, specs, _, _, _, _ = _board_specs(m)
    names = list(names)
    index = {nm: i for i, nm in enumerate(names)}

    def var(nm: str) -> int:
        index[nm] = len(names)
        names.append(nm)
        return index[nm]

    cons: list[Constraint] = []
    for spec in specs:
        if spec[0] == "false":
            cons.append(EMPTY_CONSTRAINT)
        elif spec[0] == "ge0":
            cons.append(Constraint((Atom(index[spec[1]], index[spec[2]], at_least(0)),)))
        elif spec[0] == "eq":
            _, a, b, n, tag = spec
            if n <= 1:
                cons.append(Constraint((Atom(index[a], index[b], point(n)),)))
                continue
            steps = [var(f"h{tag}_{t}") for t in range(1, n + 1)]
            cons.append(Constraint((Atom(steps[0], index[b], point(1)),)))
            for t in range(n - 1):
                cons.append(Constraint((Atom(steps[t + 1], steps[t], point(1)),)))
            cons.append(Constraint((Atom(steps[-1], index[a], point(0)),)))
        elif spec[0] == "lt":
            _, a, b, n, tag = spec
            if n == 1:
                cons.append(Constraint((Atom(index[a], index[b], below(1)),)))
                continue
            steps = [var(f"h{tag}_{t}") for t in range(1, n + 1)]
            cons.append(Constraint((Atom(steps[0], index[b], below(1)),)))
            for t in range(n - 1):
                cons.append(Constraint((Atom(steps[t + 1], steps[t], below(1)),)))
            cons.append(Constraint((Atom(steps[-1], index[a], point(0)),)))
        elif spec[0] == "gadget":
            _, a, b, z, tag = spec
            cons.extend(_gadget_constraints(var, index[a], index[b], z, tag))
        else:
            raise AssertionError(f"unknown spec {spec[0]}")
    return make_instance(names, cons)


def _gadget_constraints(var, a: int, b: int, z: int, tag: str) -> list[Constraint]:
    """Occupancy gadget: b - a is 0 or lands in (z, 2z]."""
    steps = [var(f"h{tag}_{t}") for t in range(2 * z + 1)]
    cons = [Constraint((Atom(steps[0], a, point(0)),))]
    for t in range(2 * z):
        cons.append(Constraint((Atom(steps[t + 1], steps[t], closed(0, 1)),)))
    cons.append(Constraint((Atom(steps[-1], b, point(0)),)))
    for t in range(2 * z - 1):
        cons.append(
            Constraint((Atom(steps[t + 2], steps[t], point(0)), Atom(steps[t + 2], steps[t], above(1))))
        )
    return cons


def unit_gadget(z: int) -> Instance:
    """Stand-alone occupancy gadget between variables a and b."""
    if z < 1:
        raise ValueError("gadget size must be positive")
    names = ["a", "b"] + [f"h_{t}" for t in range(2 * z + 1)]
    index = {nm: i for i, nm in enumerate(names)}
    cons = _gadget_constraints(lambda nm: index[nm], 0, 1, z, "")
    return make_instance(names, cons)


def planted_assignment(
    m: MpssInstance, v_pick: Sequence[int], e_pick: Sequence[int]
) -> dict[str, Fraction]:
    """Name-keyed model of mpss_to_d21(m) built from an MPSS solution.

    v_pick and e_pick give the 1-based index of the chosen vector in each
    set.  Chosen pairs sit at their bucket positions, the rest fill their
    garbage slots; a chosen vector's slot shrinks to half its value so no
    garbage distance collides with the occupancy threshold.  Raises if the
    picks are not an MPSS solution.
    """
    pairs = coordinate_pairs(m.k)
    big_k = len(pairs)
    if len(v_pick) != m.k or len(e_pick) != big_k:
        raise ValueError("one pick per set required")
    for pick, sets in ((v_pick, m.v_sets), (e_pick, m.e_sets)):
        for idx, vs in zip(pick, sets):
            if not 1 <= idx <= len(vs):
                raise ValueError("pick out of range")
    for r, (a, b) in enumerate(pairs, start=1):
        total = (
            m.v_sets[a - 1][v_pick[a - 1] - 1].value
            + m.v_sets[b - 1][v_pick[b - 1] - 1].value
            + m.e_sets[r - 1][e_pick[r - 1] - 1].value
        )
        if total != m.target:
            raise ValueError(f"picks miss the target at coordinate {r}")

    _, specs, gap, bucket, garbage, pair_records = _board_specs(m)
    chosen = {("V", i, v_pick[i - 1]) for i in range(1, m.k + 1)}
    chosen |= {("E", r, e_pick[r - 1]) for r in range(1, big_k + 1)}

    val: dict[str, Fraction] = {}
    for r, (a, b) in enumerate(pairs, start=1):
        base = Fraction((r - 1) * m.target)
        si = m.v_sets[a - 1][v_pick[a - 1] - 1].value
        sj = m.v_sets[b - 1][v_pick[b - 1] - 1].value
        val[bucket[(r, 1)]] = base
        val[bucket[(r, 2)]] = base + si
        val[bucket[(r, 3)]] = base + si + sj
        val[bucket[(r, 4)]] = base + m.target
    cursor = Fraction(big_k * m.target + gap)
    chains = [("V", i, m.v_sets[i - 1]) for i in range(1, m.k + 1)]
    chains += [("E", r, m.e_sets[r - 1]) for r in range(1, big_k + 1)]
    for kind, idx, vs in chains:
        val[garbage[(kind, idx, 0)]] = cursor
        for l, vec in enumerate(vs, start=1):
            width = Fraction(vec.value, 2) if (kind, idx, l) in chosen else Fraction(vec.value)
            cursor += width
            val[garbage[(kind, idx, l)]] = cursor
    for rec in pair_records:
        if (rec["kind"], rec["set"], rec["member"]) in chosen:
            val[rec["x"]] = val[rec["bx"]]
            val[rec["y"]] = val[rec["by"]]
        else:
            val[rec["x"]] = val[rec["gx"]]
            val[rec["y"]] = val[rec["gy"]]

    for spec in specs:
        if spec[0] == "eq":
            _, a, b, n, tag = spec
            if n > 1:
                for t in range(1, n + 1):
                    val[f"h{tag}_{t}"] = val[b] + t
        elif spec[0] == "lt":
            _, a, b, n, tag = spec
            if n > 1:
                step = (val[a] - val[b]) / n
                for t in range(1, n + 1):
                    val[f"h{tag}_{t}"] = val[b] + t * step
        elif spec[0] == "gadget":
            _, a, b, z, tag = spec
            jump = val[b] - val[a]
            step = jump / (2 * z)
            for t in range(2 * z + 1):
                val[f"h{tag}_{t}"] = val[a] + t * step
    return val


# ---------------------------------------------------------------------------
# Unit-length interval relations.

_ALLEN_ORDER = ("p", "m", "o", "e", "oi", "mi", "pi")
_ALLEN_TABLE = {
    "p": below(-1),
    "m": point(-1),
    "o": openiv(-1, 0),
    "e": point(0),
    "oi": openiv(0, 1),
    "mi": point(1),
    "pi": above(1),
}


def from_unit_allen(relations: Iterable[tuple[str, str, Iterable[str]]]) -> Instance:
    """Unit-interval relation network as left-endpoint difference atoms.

    Each (i, j, subset) row constrains left(i) - left(j) by the union of
    the basic relations' difference ranges; inverse relations are written
    oi, mi, pi.  An empty subset is the unsatisfiable constraint.
    """
    rows = [(i, j, tuple(sub)) for i, j, sub in relations]
    names: list[str] = []
    seen: dict[str, int] = {}
    for i, j, _ in rows:
        for nm in (i, j):
            if nm not in seen:
                seen[nm] = len(names)
                names.append(nm)
    cons = []
    for i, j, sub in rows:
        bad = [s for s in sub if s not in _ALLEN_TABLE]
        if bad:
            raise ValueError(f"unknown relation symbol {bad[0]!r}")
        picked = set(sub)
        atoms = tuple(
            Atom(seen[i], seen[j], _ALLEN_TABLE[s]) for s in _ALLEN_ORDER if s in picked
        )
        cons.append(Constraint(atoms))
    return make_instance(names, cons)


# ---------------------------------------------------------------------------
# Adapters between the rational and integer readings of an instance.


@dataclass(frozen=True)
class IntegerInstance:
    """Marker wrapping an instance whose variables range over the integers."""

    inst: Instance


def closed_reinterpret(inst: Instance) -> IntegerInstance:
    """Read a closed instance over the integers; solvability is unchanged."""
    for c in inst.constraints:
        for a in c.atoms:
            iv = a.interval
            if (iv.lo is not None and iv.lo_open) or (iv.hi is not None and iv.hi_open):
                raise ValueError("strict endpoint outside the closed fragment")
    return IntegerInstance(inst)


def rationalize(zinst: IntegerInstance) -> Instance:
    """Closed rational instance with the same integer solution set.

    Finite strict endpoints move inward by one and close; atoms whose
    interval holds no integer are dropped.  Endpoint magnitudes grow by at
    most one.
    """
    cons = []
    for c in zinst.inst.constraints:
        atoms = []
        for a in c.atoms:
            iv = a.interval
            lo = iv.lo + 1 if iv.lo is not None and iv.lo_open else iv.lo
            hi = iv.hi - 1 if iv.hi is not None and iv.hi_open else iv.hi
            if lo is not None and hi is not None and lo > hi:
                continue
            atoms.append(Atom(a.x, a.y, Interval(lo, hi, lo is None, hi is None)))
        cons.append(Constraint(tuple(atoms)))
    return make_instance(zinst.inst.var_names, cons)


def strict0_roundtrip(inst: Instance) -> tuple[IntegerInstance, Instance]:
    """Zero-endpoint instances keep their status over the integers and back."""
    if num_bound(inst) != 0:
        raise ValueError("endpoint bound must be zero")
    return IntegerInstance(inst), inst
