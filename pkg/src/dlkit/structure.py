"""Graphs extracted from instances, tree decompositions, and their nice form.

Variables are graph vertices 0..n-1; in incidence graphs the constraints
follow as vertices n..n+m-1, tagged by kind.  Decomposition nodes are
id-indexed with node 0 as the root.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import Constraint, Instance
from .textio import ParseError

VARIABLE = "variable"
CONSTRAINT = "constraint"

LEAF = "leaf"
INTRODUCE = "introduce"
FORGET = "forget"
JOIN = "join"


@dataclass(frozen=True)
class Graph:
    vertex_count: int
    edges: frozenset[tuple[int, int]]  # pairs (u, v) with u < v
    kinds: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.kinds) != self.vertex_count:
            raise ValueError("one kind tag per vertex required")
        for kind in self.kinds:
            if kind not in (VARIABLE, CONSTRAINT):
                raise ValueError(f"unknown vertex kind {kind!r}")
        for u, v in self.edges:
            if not 0 <= u < v < self.vertex_count:
                raise ValueError(f"bad edge ({u}, {v})")

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.vertex_count)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj


def make_graph(vertex_count: int, edges, kinds=None) -> Graph:
    pairs = set()
    for u, v in edges:
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        pairs.add((min(u, v), max(u, v)))
    if kinds is None:
        kinds = (VARIABLE,) * vertex_count
    return Graph(vertex_count, frozenset(pairs), tuple(kinds))


def scope(c: Constraint) -> set[int]:
    out: set[int] = set()
    for a in c.atoms:
        out.add(a.x)
        out.add(a.y)
    return out


def primal_graph(inst: Instance) -> Graph:
    edges = set()
    for c in inst.constraints:
        for u, v in itertools.combinations(sorted(scope(c)), 2):
            edges.add((u, v))
    return make_graph(inst.var_count, edges)


def incidence_graph(inst: Instance) -> Graph:
    n = inst.var_count
    edges = set()
    for j, c in enumerate(inst.constraints):
        for v in scope(c):
            edges.add((v, n + j))
    kinds = (VARIABLE,) * n + (CONSTRAINT,) * len(inst.constraints)
    return make_graph(n + len(inst.constraints), edges, kinds)


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple[tuple[int, ...], ...]  # bags[i] sorted; node 0 is the root
    edges: tuple[tuple[int, int], ...]  # sorted (min, max) node pairs

    def __post_init__(self) -> None:
        for bag in self.bags:
            if tuple(sorted(set(bag))) != bag:
                raise ValueError(f"bag {bag} not sorted and duplicate-free")
        n = len(self.bags)
        for a, b in self.edges:
            if not (0 <= a < b < n):
                raise ValueError(f"bad tree edge ({a}, {b})")
        if tuple(sorted(set(self.edges))) != self.edges:
            raise ValueError("tree edges not sorted and duplicate-free")

    @property
    def width(self) -> int:
        return max(len(bag) for bag in self.bags) - 1

    def neighbours(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.bags]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj


def make_decomposition(bags, edges) -> TreeDecomposition:
    return TreeDecomposition(
        tuple(tuple(sorted(set(bag))) for bag in bags),
        tuple(sorted({(min(a, b), max(a, b)) for a, b in edges})),
    )


def decompose(g: Graph) -> TreeDecomposition:
    """Min-fill elimination ordering, ties broken by lowest vertex id; the
    clique of each eliminated vertex becomes a bag."""
    n = g.vertex_count
    if n == 0:
        return TreeDecomposition(((),), ())
    adj = g.adjacency()
    alive = set(range(n))
    order: list[int] = []
    bags: list[set[int]] = []
    while alive:
        best = None
        best_fill = None
        for v in sorted(alive):
            nb = adj[v]
            fill = sum(
                1 for a, b in itertools.combinations(sorted(nb), 2) if b not in adj[a]
            )
            if best_fill is None or fill < best_fill:
                best, best_fill = v, fill
        nb = sorted(adj[best])
        for a, b in itertools.combinations(nb, 2):
            adj[a].add(b)
            adj[b].add(a)
        for u in nb:
            adj[u].discard(best)
        order.append(best)
        bags.append({best, *nb})
        alive.discard(best)
        adj[best] = set()

    position = {v: i for i, v in enumerate(order)}
    parent: list[int | None] = [None] * n
    roots: list[int] = []
    for i, bag in enumerate(bags):
        later = [position[u] for u in bag if position[u] > i]
        if later:
            parent[i] = min(later)
        else:
            roots.append(i)
    # chain the remaining component roots under the last bag created
    for r in roots[:-1]:
        parent[r] = roots[-1]

    # relabel so the root gets id 0, children visited in creation order
    children: list[list[int]] = [[] for _ in range(n)]
    for i, p in enumerate(parent):
        if p is not None:
            children[p].append(i)
    new_id = {}
    queue = [roots[-1]]
    while queue:
        node = queue.pop(0)
        new_id[node] = len(new_id)
        queue.extend(sorted(children[node]))
    out_bags = [()] * n
    out_edges = []
    for old, new in new_id.items():
        out_bags[new] = tuple(sorted(bags[old]))
        if parent[old] is not None:
            p = new_id[parent[old]]
            out_edges.append((min(p, new), max(p, new)))
    return TreeDecomposition(tuple(out_bags), tuple(sorted(out_edges)))


@dataclass(frozen=True)
class DecompositionReport:
    ok: bool
    problems: tuple[str, ...]


def validate(td: TreeDecomposition, g: Graph) -> DecompositionReport:
    """Checks the two defining properties: every graph edge inside some bag
    and every vertex's bags forming a non-empty connected subtree."""
    problems: list[str] = []
    n = len(td.bags)
    for i, bag in enumerate(td.bags):
        for v in bag:
            if not 0 <= v < g.vertex_count:
                problems.append(f"bag {i} references unknown vertex {v}")
    if len(td.edges) != n - 1 or not _connected(n, td.edges):
        problems.append("decomposition tree is not a tree")
        return DecompositionReport(False, tuple(problems))
    for u, v in sorted(g.edges):
        if not any(u in bag and v in bag for bag in td.bags):
            problems.append(f"edge ({u}, {v}) not covered by any bag")
    adj = td.neighbours()
    for v in range(g.vertex_count):
        holding = [i for i, bag in enumerate(td.bags) if v in bag]
        if not holding:
            problems.append(f"vertex {v} appears in no bag")
        elif not _connected_within(holding, adj):
            problems.append(f"vertex {v} has a disconnected bag subtree")
    return DecompositionReport(not problems, tuple(problems))


def _connected(n: int, edges) -> bool:
    if n == 0:
        return False
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = {0}
    stack = [0]
    while stack:
        for u in adj[stack.pop()]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == n


def _connected_within(nodes: list[int], adj: list[list[int]]) -> bool:
    inside = set(nodes)
    seen = {nodes[0]}
    stack = [nodes[0]]
    while stack:
        for u in adj[stack.pop()]:
            if u in inside and u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == len(inside)


@dataclass(frozen=True)
class NiceDecomposition:
    """Rooted at node 0 with an empty root bag; leaf bags are singletons and
    every inner node introduces one vertex, forgets one, or joins two
    children with equal bags.  A vertexless decomposition is the single
    empty leaf node."""

    bags: tuple[tuple[int, ...], ...]
    kind: tuple[str, ...]
    touched: tuple[int | None, ...]  # leaf/introduce/forget vertex, None for join
    children: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.bags)
        if not (len(self.kind) == len(self.touched) == len(self.children) == n):
            raise ValueError("parallel node tables must have equal length")
        if n == 1 and self.kind[0] == LEAF and self.bags[0] == ():
            return  # vertexless special case
        if self.bags[0] != ():
            raise ValueError("root bag must be empty")
        for t in range(n):
            bag, kids = self.bags[t], self.children[t]
            if self.kind[t] == LEAF:
                if kids or len(bag) != 1 or self.touched[t] != bag[0]:
                    raise ValueError(f"node {t} is not a valid leaf")
            elif self.kind[t] == INTRODUCE:
                (c,) = kids
                v = self.touched[t]
                if v in self.bags[c] or bag != _insert(self.bags[c], v):
                    raise ValueError(f"node {t} is not a valid introduce")
            elif self.kind[t] == FORGET:
                (c,) = kids
                v = self.touched[t]
                if v not in self.bags[c] or bag != _remove(self.bags[c], v):
                    raise ValueError(f"node {t} is not a valid forget")
            elif self.kind[t] == JOIN:
                if len(kids) != 2 or any(self.bags[c] != bag for c in kids):
                    raise ValueError(f"node {t} is not a valid join")
            else:
                raise ValueError(f"unknown node kind {self.kind[t]!r}")

    @property
    def width(self) -> int:
        return max(len(bag) for bag in self.bags) - 1

    def postorder(self) -> list[int]:
        out: list[int] = []
        stack: list[tuple[int, bool]] = [(0, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                out.append(node)
            else:
                stack.append((node, True))
                for c in self.children[node]:
                    stack.append((c, False))
        return out


def _insert(bag: tuple[int, ...], v: int) -> tuple[int, ...]:
    return tuple(sorted(bag + (v,)))


def _remove(bag: tuple[int, ...], v: int) -> tuple[int, ...]:
    return tuple(u for u in bag if u != v)


class _NiceBuilder:
    def __init__(self) -> None:
        self.bags: list[tuple[int, ...]] = []
        self.kind: list[str] = []
        self.touched: list[int | None] = []
        self.children: list[tuple[int, ...]] = []

    def add(self, bag, kind, touched, children) -> int:
        self.bags.append(tuple(bag))
        self.kind.append(kind)
        self.touched.append(touched)
        self.children.append(tuple(children))
        return len(self.bags) - 1

    def leaf_chain(self, bag: tuple[int, ...]) -> int:
        node = self.add((bag[0],), LEAF, bag[0], ())
        for i in range(1, len(bag)):
            node = self.add(bag[: i + 1], INTRODUCE, bag[i], (node,))
        return node

    def adapt(self, node: int, target: tuple[int, ...]) -> int:
        """Forget-then-introduce chain turning the bag at node into target."""
        have = self.bags[node]
        for v in sorted(set(have) - set(target)):
            bag = _remove(self.bags[node], v)
            node = self.add(bag, FORGET, v, (node,))
        for v in sorted(set(target) - set(have)):
            bag = _insert(self.bags[node], v)
            node = self.add(bag, INTRODUCE, v, (node,))
        return node

    def finish(self, top: int) -> NiceDecomposition:
        for v in sorted(self.bags[top]):
            top = self.add(_remove(self.bags[top], v), FORGET, v, (top,))
        # flip ids so the root becomes node 0
        last = len(self.bags) - 1
        flip = lambda i: last - i
        order = range(last, -1, -1)
        return NiceDecomposition(
            tuple(self.bags[i] for i in order),
            tuple(self.kind[i] for i in order),
            tuple(self.touched[i] for i in order),
            tuple(tuple(sorted(flip(c) for c in self.children[i])) for i in order),
        )


def to_nice(td: TreeDecomposition) -> NiceDecomposition:
    """Width-preserving conversion; the original tree is re-rooted at the
    node with the lexicographically smallest bag."""
    n = len(td.bags)
    if len(td.edges) != n - 1 or not _connected(n, td.edges):
        raise ValueError("decomposition property violated")
    adj = td.neighbours()
    for v in {u for bag in td.bags for u in bag}:
        holding = [i for i, bag in enumerate(td.bags) if v in bag]
        if not _connected_within(holding, adj):
            raise ValueError("decomposition property violated")

    keep = _prune_empty_leaves(td)
    if not keep:
        return NiceDecomposition(((),), (LEAF,), (None,), ((),))

    root = min(keep, key=lambda i: (td.bags[i], i))
    builder = _NiceBuilder()
    seen = {root}
    # (node, iterator over unvisited children, collected child tops)
    stack = [(root, iter(sorted(u for u in adj[root] if u in keep)), [])]
    top = None
    while stack:
        node, kids, tops = stack[-1]
        advanced = False
        for child in kids:
            if child in seen:
                continue
            seen.add(child)
            stack.append(
                (child, iter(sorted(u for u in adj[child] if u in keep)), [])
            )
            advanced = True
            break
        if advanced:
            continue
        stack.pop()
        bag = td.bags[node]
        if not tops:
            built = builder.leaf_chain(bag)
        else:
            arms = [builder.adapt(t, bag) for t in tops]
            built = arms[0]
            for arm in arms[1:]:
                built = builder.add(bag, JOIN, None, (built, arm))
        if stack:
            stack[-1][2].append(built)
        else:
            top = built
    return builder.finish(top)


def _prune_empty_leaves(td: TreeDecomposition) -> set[int]:
    keep = set(range(len(td.bags)))
    adj = td.neighbours()
    changed = True
    while changed:
        changed = False
        for i in sorted(keep):
            degree = sum(1 for u in adj[i] if u in keep)
            if td.bags[i] == () and degree <= 1 and len(keep) > 1:
                keep.discard(i)
                changed = True
    return keep if any(td.bags[i] for i in keep) else set()


def print_decomposition(td: TreeDecomposition) -> str:
    lines = [f"bag {i} {' '.join(map(str, bag))}".rstrip() for i, bag in enumerate(td.bags)]
    lines += [f"edge {a} {b}" for a, b in td.edges]
    return "\n".join(lines) + "\n"


def parse_decomposition(text: str) -> TreeDecomposition:
    bags: dict[int, tuple[int, ...]] = {}
    edges = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if parts[0] == "bag":
                bags[int(parts[1])] = tuple(int(p) for p in parts[2:])
            elif parts[0] == "edge":
                if len(parts) != 3:
                    raise ValueError
                edges.append((int(parts[1]), int(parts[2])))
            else:
                raise ValueError
        except (ValueError, IndexError):
            raise ParseError(ln, 1, f"bad decomposition line {raw!r}") from None
    if sorted(bags) != list(range(len(bags))):
        raise ParseError(0, 1, "bag ids must be consecutive from 0")
    return make_decomposition([bags[i] for i in range(len(bags))], edges)
