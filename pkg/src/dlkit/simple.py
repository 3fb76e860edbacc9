"""Feasibility for conjunctive fragments.

Two engines live here: shortest-path reasoning for conjunctions of single
interval atoms (the classic simple temporal problem), and an order solver
for qualitative <, =, > systems on fractional parts.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .core import Assignment, Atom

# A directed bound x - y <= c, possibly strict: edge y -> x with weight c.
Edge = tuple[int, int, int, bool]  # (src, dst, weight, strict)


@dataclass(frozen=True)
class SimpleSystem:
    var_count: int
    atoms: tuple[Atom, ...]

    def __post_init__(self) -> None:
        for a in self.atoms:
            if not (0 <= a.x < self.var_count and 0 <= a.y < self.var_count):
                raise ValueError(f"atom references unknown variable id: {a}")

    def edges(self) -> list[Edge]:
        out: list[Edge] = []
        for a in self.atoms:
            iv = a.interval
            if a.x == a.y:
                continue  # constructor guarantees 0 is inside, no information
            if iv.hi is not None:
                out.append((a.y, a.x, iv.hi, iv.hi_open))
            if iv.lo is not None:
                out.append((a.x, a.y, -iv.lo, iv.lo_open))
        return out


def simple_system(var_count: int, atoms: Iterable[Atom]) -> SimpleSystem:
    return SimpleSystem(var_count, tuple(atoms))


def _strict_atom_count(sys: SimpleSystem) -> int:
    n = 0
    for a in sys.atoms:
        iv = a.interval
        if (iv.lo is not None and iv.lo_open) or (iv.hi is not None and iv.hi_open):
            n += 1
    return n


def stp_feasible(sys: SimpleSystem) -> Assignment | None:
    """Rational witness for a conjunction of interval atoms, or None.

    Bellman-Ford over lexicographic (bound, strictness) weights; a strict
    edge costs an extra -1 in the second component.  The witness value of
    v is b_v + s_v * eps with eps = 1/(S+1), shifted so the minimum is 0.
    """
    n = sys.var_count
    edges = sys.edges()
    # virtual source gives every vertex distance (0, 0)
    dist: list[tuple[int, int]] = [(0, 0)] * n
    for _ in range(n):
        changed = False
        for src, dst, w, strict in edges:
            cand = (dist[src][0] + w, dist[src][1] - (1 if strict else 0))
            if cand < dist[dst]:
                dist[dst] = cand
                changed = True
        if not changed:
            break
    for src, dst, w, strict in edges:
        cand = (dist[src][0] + w, dist[src][1] - (1 if strict else 0))
        if cand < dist[dst]:
            return None  # negative cycle
    if n == 0:
        return {}
    eps = Fraction(1, _strict_atom_count(sys) + 1)
    raw = [Fraction(b) + s * eps for b, s in dist]
    base = min(raw)
    return {v: raw[v] - base for v in range(n)}


def stp_integer_witness(sys: SimpleSystem) -> Assignment | None:
    """Integer witness for a closed system, or None when infeasible."""
    for a in sys.atoms:
        iv = a.interval
        if (iv.lo is not None and iv.lo_open) or (iv.hi is not None and iv.hi_open):
            raise ValueError("integer witness requires closed system")
    n = sys.var_count
    edges = sys.edges()
    dist = [0] * n
    for _ in range(n):
        changed = False
        for src, dst, w, _ in edges:
            if dist[src] + w < dist[dst]:
                dist[dst] = dist[src] + w
                changed = True
        if not changed:
            break
    for src, dst, w, _ in edges:
        if dist[src] + w < dist[dst]:
            return None
    if n == 0:
        return {}
    base = min(dist)
    return {v: Fraction(dist[v] - base) for v in range(n)}


LT = "<"
EQ = "="
GT = ">"
_ALL = frozenset((LT, EQ, GT))
_FLIP = {LT: GT, EQ: EQ, GT: LT}


@dataclass(frozen=True)
class PaSystem:
    """Qualitative order constraints: ordered pair -> allowed relations."""

    var_count: int
    relations: tuple[tuple[tuple[int, int], frozenset[str]], ...]

    def __post_init__(self) -> None:
        for (x, y), rel in self.relations:
            if not (0 <= x < self.var_count and 0 <= y < self.var_count) or x == y:
                raise ValueError(f"bad variable pair ({x}, {y})")
            if not rel:
                raise ValueError("empty relation set is already infeasible")
            if not rel <= _ALL:
                raise ValueError(f"unknown relation symbols {rel - _ALL}")


def pa_system(var_count: int, relations: Mapping[tuple[int, int], Iterable[str]]) -> PaSystem:
    items = tuple((pair, frozenset(rel)) for pair, rel in relations.items())
    return PaSystem(var_count, items)


def _merged_relations(pa: PaSystem) -> dict[tuple[int, int], frozenset[str]] | None:
    merged: dict[tuple[int, int], frozenset[str]] = {}
    for (x, y), rel in pa.relations:
        if x > y:
            x, y = y, x
            rel = frozenset(_FLIP[r] for r in rel)
        prev = merged.get((x, y), _ALL)
        now = prev & rel
        if not now:
            return None
        merged[(x, y)] = now
    return merged


def pa_feasible(pa: PaSystem) -> dict[int, int] | None:
    """A rank function realizing the order constraints, or None.

    Condense the <=-digraph; infeasibility is a strict or a not-equal
    relation inside one component.  Ranks come from a deterministic
    topological order (smallest original vertex id first).
    """
    merged = _merged_relations(pa)
    if merged is None:
        return None
    n = pa.var_count
    le: list[set[int]] = [set() for _ in range(n)]  # x -> {y : x <= y}
    strict: list[tuple[int, int]] = []
    noteq: list[tuple[int, int]] = []
    for (x, y), rel in merged.items():
        if rel == _ALL:
            continue
        if GT not in rel:
            le[x].add(y)
            if EQ not in rel:
                strict.append((x, y))
        if LT not in rel:
            le[y].add(x)
            if EQ not in rel:
                strict.append((y, x))
        if rel == frozenset((LT, GT)):
            noteq.append((x, y))
    comp = _scc(le)
    for x, y in strict:
        if comp[x] == comp[y]:
            return None
    for x, y in noteq:
        if comp[x] == comp[y]:
            return None
    # condensation DAG, then Kahn with a min-heap on smallest member id
    n_comp = max(comp) + 1 if n else 0
    members: list[list[int]] = [[] for _ in range(n_comp)]
    for v in range(n):
        members[comp[v]].append(v)
    succ: list[set[int]] = [set() for _ in range(n_comp)]
    indeg = [0] * n_comp
    for x in range(n):
        for y in le[x]:
            cx, cy = comp[x], comp[y]
            if cx != cy and cy not in succ[cx]:
                succ[cx].add(cy)
                indeg[cy] += 1
    heap = [(members[c][0], c) for c in range(n_comp) if indeg[c] == 0]
    heapq.heapify(heap)
    rank: dict[int, int] = {}
    next_rank = 0
    while heap:
        _, c = heapq.heappop(heap)
        for v in members[c]:
            rank[v] = next_rank
        next_rank += 1
        for d in sorted(succ[c]):
            indeg[d] -= 1
            if indeg[d] == 0:
                heapq.heappush(heap, (members[d][0], d))
    assert len(rank) == n
    return rank


def _scc(adj: list[set[int]]) -> list[int]:
    """Tarjan, iterative; component ids in deterministic order."""
    n = len(adj)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comp = [-1] * n
    counter = 0
    n_comp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work: list[tuple[int, list[int]]] = [(root, sorted(adj[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, todo = work[-1]
            if todo:
                w = todo.pop(0)
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, sorted(adj[w])))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    parent = work[-1][0]
                    low[parent] = min(low[parent], low[v])
                if low[v] == index[v]:
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp[w] = n_comp
                        if w == v:
                            break
                    n_comp += 1
    return comp
