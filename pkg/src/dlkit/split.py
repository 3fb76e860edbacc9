"""Divide-and-conquer decision procedure for binary instances with small
endpoint bound.

The solver looks for a 3- or 5-way ordered partition of the variables in
which outer groups can always sit more than k apart, enumerates
certificates of the thin middle groups, and recurses on the two (or
three) overlapping halves.  Middles are windowed to width k around a
fresh anchor variable, so their certificate lists stay small.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .bounded import solve_bounded
from .core import (
    Atom,
    Constraint,
    EMPTY_CONSTRAINT,
    Instance,
    Interval,
    above,
    arity,
    at_least,
    normalize_pairwise,
    num_bound,
    to_unit_disjuncts,
)
from .enumeration import list_certificates
from .simple import SimpleSystem, stp_feasible


@dataclass(frozen=True)
class SplitConfig:
    k: int
    base_case_threshold: int = 8
    log_base: int = 2

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError("endpoint bound must be non-negative")
        if self.base_case_threshold < 1:
            raise ValueError("base case threshold must be positive")
        if self.log_base < 2:
            raise ValueError("log base must be at least 2")


class _State:
    def __init__(self, cfg: SplitConfig):
        self.cfg = cfg
        self.decisions: dict = {}
        self.cert_lists: dict = {}
        self.bounded: dict = {}


def _canonical(inst: Instance):
    cons = frozenset(
        frozenset((a.x, a.y, a.interval) for a in c.atoms) for c in inst.constraints
    )
    return (inst.var_count, cons)


def solve_dnc(inst: Instance, cfg: SplitConfig | None = None) -> bool:
    """Accept iff the instance is satisfiable.  Decision only."""
    if arity(inst) > 2:
        raise ValueError("divide and conquer requires binary instance")
    if cfg is None:
        cfg = SplitConfig(num_bound(inst))
    if num_bound(inst) > cfg.k:
        raise ValueError("instance endpoint bound exceeds configured k")
    return _solve(inst, _State(cfg))


def _decide(inst: Instance) -> bool:
    """Satisfiable iff some choice of one disjunct per constraint is a
    feasible simple system; equivalent to a non-empty certificate list."""
    return _decide_rows(inst.var_count, [c.atoms for c in inst.constraints])


def _decide_rows(n: int, rows) -> bool:
    # all unit rows are forced, so commit them in one feasibility check
    if any(not row for row in rows):
        return False
    chosen: list[Atom] = [row[0] for row in rows if len(row) == 1]
    branching = sorted((row for row in rows if len(row) > 1), key=len)

    def dfs(depth: int) -> bool:
        if stp_feasible(SimpleSystem(n, tuple(chosen))) is None:
            return False
        if depth == len(branching):
            return True
        for atom in branching[depth]:
            chosen.append(atom)
            ok = dfs(depth + 1)
            chosen.pop()
            if ok:
                return True
        return False

    return dfs(0)


def _solve(inst: Instance, st: _State) -> bool:
    inst = normalize_pairwise(inst)
    key = _canonical(inst)
    got = st.decisions.get(key)
    if got is not None:
        return got
    if any(not c.atoms for c in inst.constraints):
        ans = False
    elif inst.var_count < st.cfg.base_case_threshold:
        ans = _decide(inst)
    else:
        ans = _three_split(inst, st) or _five_split(inst, st)
    st.decisions[key] = ans
    return ans


def three_split(inst: Instance, cfg: SplitConfig | None = None) -> bool:
    if cfg is None:
        cfg = SplitConfig(num_bound(inst))
    return _three_split(normalize_pairwise(inst), _State(cfg))


def five_split(inst: Instance, cfg: SplitConfig | None = None) -> bool:
    if cfg is None:
        cfg = SplitConfig(num_bound(inst))
    return _five_split(normalize_pairwise(inst), _State(cfg))


def _pair_map(inst: Instance) -> dict[tuple[int, int], Constraint]:
    out = {}
    for c in inst.constraints:
        if c.atoms:
            a = c.atoms[0]
            out[(min(a.x, a.y), max(a.x, a.y))] = c
    return out


def _admits_gap(con: Constraint, lo_var: int, hi_var: int, k: int) -> bool:
    """True iff some disjunct, read as hi_var - lo_var in I, contains all of
    (k, inf).  The reassembled solution places the pair at an arbitrary
    difference above k, so the constraint must cover that whole ray; with
    endpoints bounded by k any disjunct reaching past k is such a tail.
    Unconstrained pairs pass by convention (no constraint object)."""
    for a in con.atoms:
        iv = a.interval if (a.x, a.y) == (hi_var, lo_var) else a.interval.mirror()
        if iv.hi is None and (iv.lo is None or iv.lo <= k):
            return True
    return False


def _separated(pairs, group_a, group_b, k) -> bool:
    for a in group_a:
        for b in group_b:
            con = pairs.get((min(a, b), max(a, b)))
            if con is not None and not _admits_gap(con, a, b, k):
                return False
    return True


def _fresh_name(names: tuple[str, ...]) -> str:
    name = "~m"
    while name in names:
        name += "~"
    return name


def _slice(inst: Instance, members: list[int]):
    """Sub-instance on members (sorted), plus parent->child id map."""
    members = sorted(members)
    idx = {pid: i for i, pid in enumerate(members)}
    names = tuple(inst.var_names[pid] for pid in members)
    cons = []
    for c in inst.constraints:
        if c.atoms and c.variables() <= idx.keys():
            cons.append(
                Constraint(tuple(Atom(idx[a.x], idx[a.y], a.interval) for a in c.atoms))
            )
    return members, idx, names, cons


def _middle_instance(inst: Instance, group: list[int], k: int) -> tuple[Instance, list[int]]:
    """The windowed middle: group variables plus a fresh anchor (last id),
    every member within [0,k) above the anchor, and every pair carrying an
    explicit unit decomposition of (-k,k) so certificates fix each pair's
    unit cell."""
    members, idx, names, cons = _slice(inst, group)
    m = len(members)
    names = names + (_fresh_name(names),)
    if k == 0:
        if members:
            cons.append(EMPTY_CONSTRAINT)  # width-0 window is unsatisfiable
    else:
        window = Interval(0, k, False, True)
        band = Constraint((Atom(0, 1, Interval(-k, k, True, True)),))
        band_units = to_unit_disjuncts(band, k).atoms
        for i in range(m):
            cons.append(Constraint((Atom(i, m, window),)))
        for u, v in itertools.combinations(range(m + 1), 2):
            cons.append(Constraint(tuple(Atom(u, v, a.interval) for a in band_units)))
    return Instance(names, tuple(cons)), members


def _certificates(inst: Instance, st: _State):
    key = _canonical(inst)
    got = st.cert_lists.get(key)
    if got is None:
        got = list_certificates(inst)
        st.cert_lists[key] = got
    return got


def _assemble(inst, own: list[int], mid_members: list[int], cert, extra) -> Instance:
    """Child instance on own variables plus a fresh anchor: sliced parent
    constraints, the certificate atoms, and extra (x, y, interval) triples
    given in parent ids with None standing for the anchor."""
    members, idx, names, cons = _slice(inst, own)
    m = len(members)
    names = names + (_fresh_name(names),)

    def child_id(mid_id: int) -> int:
        return m if mid_id == len(mid_members) else idx[mid_members[mid_id]]

    for a in cert:
        cons.append(Constraint((Atom(child_id(a.x), child_id(a.y), a.interval),)))
    for x, y, iv in extra:
        cx = m if x is None else idx[x]
        cy = m if y is None else idx[y]
        cons.append(Constraint((Atom(cx, cy, iv),)))
    return Instance(names, tuple(cons))


def _log_cap_ok(size: int, n: int, base: int) -> bool:
    # size <= n / log_base(n), checked exactly as n**size <= base**n
    return n**size <= base**n


def _three_split(inst: Instance, st: _State) -> bool:
    cfg = st.cfg
    n = inst.var_count
    k = cfg.k
    pairs = _pair_map(inst)
    ids = range(n)
    mids: dict = {}
    sides: dict = {}
    for labels in itertools.product((0, 1, 2), repeat=n):
        if 3 * labels.count(0) < n or 3 * labels.count(2) < n:
            continue
        if not _log_cap_ok(labels.count(1), n, cfg.log_base):
            continue
        xs = [v for v in ids if labels[v] == 0]
        ys = [v for v in ids if labels[v] == 1]
        zs = [v for v in ids if labels[v] == 2]
        if not _separated(pairs, xs, zs, k):
            continue
        gkey = tuple(ys)
        got = mids.get(gkey)
        if got is None:
            middle, mid_members = _middle_instance(inst, ys, k)
            got = (mid_members, _certificates(middle, st))
            mids[gkey] = got
        mid_members, certs = got
        for ci, cert in enumerate(certs):
            lkey = (0, tuple(xs), gkey, ci)
            ok = sides.get(lkey)
            if ok is None:
                left = _assemble(
                    inst, xs + ys, mid_members, cert,
                    [(None, x, above(0)) for x in xs],
                )
                ok = _solve(left, st)
                sides[lkey] = ok
            if not ok:
                continue
            rkey = (1, tuple(zs), gkey, ci)
            ok = sides.get(rkey)
            if ok is None:
                right = _assemble(
                    inst, ys + zs, mid_members, cert,
                    [(z, None, above(k)) for z in zs],
                )
                ok = _solve(right, st)
                sides[rkey] = ok
            if ok:
                return True
    return False


def _span_width(n: int, cfg: SplitConfig) -> int:
    # ceil(k * (log_base(n) + 2)), computed without floats
    target = n**cfg.k
    t = 0
    p = 1
    while p < target:
        p *= cfg.log_base
        t += 1
    return max(1, cfg.k * 2 + t)


def _five_split(inst: Instance, st: _State) -> bool:
    cfg = st.cfg
    n = inst.var_count
    k = cfg.k
    pairs = _pair_map(inst)
    ids = range(n)
    w = _span_width(n, cfg)
    mids: dict = {}
    sides: dict = {}
    bands: dict = {}
    band_bases: dict = {}

    def middle(group: list[int]):
        gkey = tuple(group)
        got = mids.get(gkey)
        if got is None:
            mid, mem = _middle_instance(inst, group, k)
            got = (mem, _certificates(mid, st))
            mids[gkey] = got
        return got

    for labels in itertools.product((0, 1, 2, 3, 4), repeat=n):
        if 3 * labels.count(0) >= n or 3 * labels.count(4) >= n:
            continue
        if not _log_cap_ok(labels.count(1), n, cfg.log_base):
            continue
        if not _log_cap_ok(labels.count(3), n, cfg.log_base):
            continue
        s1 = [v for v in ids if labels[v] == 0]
        s2 = [v for v in ids if labels[v] == 1]
        s3 = [v for v in ids if labels[v] == 2]
        s4 = [v for v in ids if labels[v] == 3]
        s5 = [v for v in ids if labels[v] == 4]
        if not _separated(pairs, s1, s3 + s4 + s5, k):
            continue
        if not _separated(pairs, s2, s5, k):
            continue
        if not _separated(pairs, s3, s5, k):
            continue
        mem2, certs2 = middle(s2)
        if not certs2:
            continue
        mem4, certs4 = middle(s4)
        if not certs4:
            continue
        t1, t2, t3, t4, t5 = map(tuple, (s1, s2, s3, s4, s5))
        for (i2, c2), (i4, c4) in itertools.product(
            enumerate(certs2), enumerate(certs4)
        ):
            lkey = (0, t1, t2, i2)
            ok = sides.get(lkey)
            if ok is None:
                left = _assemble(
                    inst, s1 + s2, mem2, c2,
                    [(None, x, above(0)) for x in s1],
                )
                ok = _solve(left, st)
                sides[lkey] = ok
            if not ok:
                continue
            rkey = (1, t4, t5, i4)
            ok = sides.get(rkey)
            if ok is None:
                right = _assemble(
                    inst, s4 + s5, mem4, c4,
                    [(z, None, above(k)) for z in s5],
                )
                ok = _solve(right, st)
                sides[rkey] = ok
            if not ok:
                continue
            bkey = (t2, t3, t4, i2, i4)
            ok = bands.get(bkey)
            if ok is None:
                ctx = band_bases.get((t2, t3, t4))
                if ctx is None:
                    ctx = _band_base(inst, s2, s3, s4, k)
                    band_bases[(t2, t3, t4)] = ctx
                ok = _band_check(ctx, mem2, mem4, c2, c4, w, st)
                bands[bkey] = ok
            if ok:
                return True
    return False


def _band_base(inst, s2, s3, s4, k):
    """Certificate-independent part of the centre instance: both anchors
    (ids 0 and 1, placed first so span search can prune early), sliced
    parent constraints, S3 strictly more than k above the first anchor and
    strictly below the second, and the second anchor at least k above the
    first so the two windows stay ordered even when S3 is empty."""
    members = sorted(s2 + s3 + s4)
    idx = {pid: i + 2 for i, pid in enumerate(members)}
    rows: list[tuple[Atom, ...]] = [(Atom(1, 0, at_least(k)),)]
    for c in inst.constraints:
        if c.atoms and c.variables() <= idx.keys():
            rows.append(tuple(Atom(idx[a.x], idx[a.y], a.interval) for a in c.atoms))
    for v in s3:
        rows.append((Atom(idx[v], 0, above(k)),))
        rows.append((Atom(1, idx[v], above(0)),))
    base_fp = frozenset(frozenset((a.x, a.y, a.interval) for a in row) for row in rows)
    mem_names = tuple(inst.var_names[p] for p in members)
    return len(members) + 2, idx, rows, base_fp, mem_names


def _band_check(ctx, mem2, mem4, c2, c4, w, st) -> bool:
    """Decide the centre instance assembled from a band base and the two
    middle certificates, memoized on structure so partitions that differ
    only in unconstrained variable identity are decided once."""
    n, idx, base_rows, base_fp, mem_names = ctx

    def pins(cert, members_mid, anchor):
        def cid(i):
            return anchor if i == len(members_mid) else idx[members_mid[i]]
        return [(Atom(cid(a.x), cid(a.y), a.interval),) for a in cert]

    p2 = pins(c2, mem2, 0)
    p4 = pins(c4, mem4, 1)
    pin_fp = frozenset((r[0].x, r[0].y, r[0].interval) for r in p2 + p4)
    key = (w, n, base_fp, pin_fp)
    got = st.bounded.get(key)
    if got is None:
        rows = base_rows + p2 + p4
        if not _decide_rows(n, rows):
            got = False  # an infeasible centre has no bounded-span solution
        else:
            n2 = _fresh_name(mem_names)
            n4 = n2 + "~"
            while n4 in mem_names:
                n4 += "~"
            band = Instance((n2, n4) + mem_names, tuple(Constraint(r) for r in rows))
            got = solve_bounded(w, band) is not None
        st.bounded[key] = got
    return got
