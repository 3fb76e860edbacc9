"""Dynamic programming over a nice tree decomposition of the incidence graph.

A record pairs an assignment of grid values to the bag's variables with a
per-constraint state: satisfied, unsatisfied, or pending on a forgotten
scope variable pinned to a grid value.  Records are canonical tuples,
  ((var, value), ...) sorted by variable,
  ((con, state), ...) sorted by constraint,
and record sets are deduplicated after every transition.  Internally the
grid is scaled by the variable count so all arithmetic is on ints; the
public record encoding uses the Fraction grid values themselves.

Every record with a witnessing assignment (check_record_validity) appears
in the computed table for its node, and satisfied marks are only ever
produced from value checks the witness actually passes, so the final
answer and any recovered model are exact.  The converse containment does
not hold for the raw transition output: a table may also carry records
whose unsatisfied or pending marks understate what every completion would
satisfy, because detecting that locally would need the constraints and
variables forgotten far below the node.  Such records are carried along
by solve_tw, where they are harmless, and die out at forget transitions
unless a genuine upgrade path exists.

record_tables instead reports the node sets in their definitional form:
the transition output filtered by check_record_validity.  Every valid
record of a node arises from valid records of its children (the witness
restricts to witnesses below, and a variable introduced at a node cannot
occur in constraints forgotten under it), so filtering loses nothing and
the published sets are exactly the valid ones.  The validity check
enumerates assignments to the forgotten variables, which is affordable
only at small scale; record_tables inherits its cap and is meant for
auditing, not for deciding.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .core import Assignment, Constraint, Instance, num_bound
from .enumeration import cd_values
from .structure import (
    FORGET,
    INTRODUCE,
    JOIN,
    LEAF,
    NiceDecomposition,
    incidence_graph,
    make_decomposition,
    scope,
    validate,
)

SATISFIED = "S"
UNSATISFIED = "U"

Record = tuple


def _satisfied(c: Constraint, assign) -> bool:
    """Some disjunct with both endpoints assigned evaluates true."""
    for a in c.atoms:
        if a.x in assign and a.y in assign:
            if a.interval.contains(assign[a.x] - assign[a.y]):
                return True
    return False


def _compile(cons, n: int):
    """Atom rows (x, y, lo, lo_open, hi, hi_open) with endpoints scaled by n."""
    out = []
    for c in cons:
        rows = []
        for a in c.atoms:
            iv = a.interval
            lo = None if iv.lo is None else iv.lo * n
            hi = None if iv.hi is None else iv.hi * n
            rows.append((a.x, a.y, lo, iv.lo_open, hi, iv.hi_open))
        out.append(tuple(rows))
    return out


def _sat(rows, assign) -> bool:
    for x, y, lo, lo_open, hi, hi_open in rows:
        vx = assign.get(x)
        if vx is None:
            continue
        vy = assign.get(y)
        if vy is None:
            continue
        d = vx - vy
        if lo is not None and (d < lo or (lo_open and d == lo)):
            continue
        if hi is not None and (d > hi or (hi_open and d == hi)):
            continue
        return True
    return False


def _pin_sat(rows, v1, d1, v2, d2) -> bool:
    """Satisfaction under the two-variable pin {v1: d1, v2: d2}."""
    if v1 == v2:
        return False  # a single pinned variable cannot complete any atom
    for x, y, lo, lo_open, hi, hi_open in rows:
        if x == v1 and y == v2:
            d = d1 - d2
        elif x == v2 and y == v1:
            d = d2 - d1
        else:
            continue
        if lo is not None and (d < lo or (lo_open and d == lo)):
            continue
        if hi is not None and (d > hi or (hi_open and d == hi)):
            continue
        return True
    return False


def _check_decomposition(inst: Instance, nd: NiceDecomposition) -> None:
    g = incidence_graph(inst)
    edges = []
    for parent, kids in enumerate(nd.children):
        edges.extend((parent, c) for c in kids)
    td = make_decomposition(nd.bags, edges)
    report = validate(td, g)
    if not report.ok:
        raise ValueError(f"decomposition mismatch: {report.problems[0]}")


def _tables(inst: Instance, nd: NiceDecomposition):
    """Scaled record tables with provenance, keyed by decomposition node."""
    n = inst.var_count
    compiled = _compile(inst.constraints, n)
    scopes = [scope(c) for c in inst.constraints]
    cd = range(((n - 1) * (num_bound(inst) + 1) + 1) * n) if n else range(0)

    recs: dict[int, dict[Record, tuple]] = {}
    for t in nd.postorder():
        kind = nd.kind[t]
        kids = nd.children[t]
        if kind == LEAF:
            cur = _leaf(nd.bags[t], nd.touched[t], n, cd)
        elif kind == INTRODUCE:
            vertex = nd.touched[t]
            if vertex < n:
                cur = _intro_var(recs[kids[0]], vertex, cd, compiled)
            else:
                cur = _intro_con(recs[kids[0]], vertex - n, compiled)
        elif kind == FORGET:
            vertex = nd.touched[t]
            if vertex < n:
                cur = _forget_var(recs[kids[0]], vertex, scopes)
            else:
                cur = _forget_con(recs[kids[0]], vertex - n)
        else:
            cur = _join(recs[kids[0]], recs[kids[1]], compiled)
        recs[t] = cur
    return recs


def solve_tw(inst: Instance, nd: NiceDecomposition, *, return_model: bool = False):
    """Bottom-up record computation; satisfiable iff the root has a record.

    With return_model the answer is a grid model (or None) recovered by a
    second top-down pass over stored provenance.
    """
    _check_decomposition(inst, nd)
    recs = _tables(inst, nd)
    if not return_model:
        return bool(recs[0])
    if not recs[0]:
        return None
    return _recover(inst, nd, recs)


def record_tables(
    inst: Instance, nd: NiceDecomposition, cap: int = 1_000_000
) -> dict[int, frozenset]:
    """Per-node valid-record sets in the public Fraction encoding.

    Transition output filtered by check_record_validity, node by node.
    Raises ValueError via the validity check when a node's forgotten
    variables make the witness search exceed cap.
    """
    _check_decomposition(inst, nd)
    n = inst.var_count
    out = {}
    for t, table in _tables(inst, nd).items():
        kept = []
        for rec in table:
            pub = _public_record(rec, n)
            if check_record_validity(pub, t, inst, nd, cap=cap):
                kept.append(pub)
        out[t] = frozenset(kept)
    return out


def _public_record(rec: Record, n: int) -> Record:
    alpha, beta = rec
    return (
        tuple((v, Fraction(d, n)) for v, d in alpha),
        tuple(
            (ci, state if state in (SATISFIED, UNSATISFIED) else (state[0], Fraction(state[1], n)))
            for ci, state in beta
        ),
    )


def _leaf(bag, vertex, n, cd):
    if bag == ():  # vertexless decomposition
        return {((), ()): ("leaf",)}
    if vertex < n:
        return {(((vertex, d),), ()): ("leaf",) for d in cd}
    return {((), ((vertex - n, UNSATISFIED),)): ("leaf",)}


def _intro_var(child, v, cd, compiled):
    out: dict[Record, tuple] = {}
    for rec in child:
        alpha0, beta0 = rec
        base = dict(alpha0)
        pos = sum(1 for u, _ in alpha0 if u < v)
        for d in cd:
            base[v] = d
            alpha = alpha0[:pos] + ((v, d),) + alpha0[pos:]
            beta = []
            for ci, state in beta0:
                if state == UNSATISFIED:
                    if _sat(compiled[ci], base):
                        state = SATISFIED
                elif state != SATISFIED:
                    u, dd = state
                    if _pin_sat(compiled[ci], v, d, u, dd):
                        state = SATISFIED
                beta.append((ci, state))
            out.setdefault((alpha, tuple(beta)), ("one", rec))
        del base[v]
    return out


def _intro_con(child, ci, compiled):
    out: dict[Record, tuple] = {}
    for rec in child:
        alpha0, beta0 = rec
        state = SATISFIED if _sat(compiled[ci], dict(alpha0)) else UNSATISFIED
        beta = tuple(sorted(beta0 + ((ci, state),)))
        out.setdefault((alpha0, beta), ("one", rec))
    return out


def _forget_var(child, v, scopes):
    out: dict[Record, tuple] = {}
    for rec in child:
        alpha0, beta0 = rec
        d = dict(alpha0)[v]
        alpha = tuple(item for item in alpha0 if item[0] != v)
        eligible = [
            ci for ci, state in beta0 if state == UNSATISFIED and v in scopes[ci]
        ]
        for size in range(len(eligible) + 1):
            for combo in itertools.combinations(eligible, size):
                chosen = set(combo)
                beta = tuple(
                    (ci, (v, d) if ci in chosen else state) for ci, state in beta0
                )
                out.setdefault((alpha, beta), ("forget", rec, v, d))
    return out


def _forget_con(child, ci):
    out: dict[Record, tuple] = {}
    for rec in child:
        alpha0, beta0 = rec
        states = dict(beta0)
        if states[ci] != SATISFIED:
            continue
        beta = tuple(item for item in beta0 if item[0] != ci)
        out.setdefault((alpha0, beta), ("one", rec))
    return out


def _join(left, right, compiled):
    by_alpha: dict[tuple, list[Record]] = {}
    for rec in left:
        by_alpha.setdefault(rec[0], []).append(rec)
    out: dict[Record, tuple] = {}
    merged: dict[tuple, tuple | None] = {}  # beta pairs repeat across alphas
    for rec2 in right:
        alpha, beta2 = rec2
        for rec1 in by_alpha.get(alpha, ()):
            beta1 = rec1[1]
            key = (beta1, beta2)
            beta = merged.get(key, False)
            if beta is False:
                beta = _merge_beta(beta1, beta2, compiled)
                merged[key] = beta
            if beta is not None:
                out.setdefault((alpha, beta), ("join", rec1, rec2))
    return out


def _merge_beta(beta1, beta2, compiled):
    beta = []
    for (ci, s1), (_, s2) in zip(beta1, beta2):
        if s1 == SATISFIED or s2 == SATISFIED:
            state = SATISFIED
        elif s1 == UNSATISFIED:
            state = s2
        elif s2 == UNSATISFIED:
            state = s1
        else:  # pending on both sides: the pinned pair must satisfy c
            (v1, d1), (v2, d2) = s1, s2
            if not _pin_sat(compiled[ci], v1, d1, v2, d2):
                return None
            state = SATISFIED
        beta.append((ci, state))
    return tuple(beta)


def _recover(inst, nd, recs) -> Assignment:
    n = inst.var_count
    model: Assignment = {}
    stack = [(0, next(iter(recs[0])))]
    while stack:
        t, rec = stack.pop()
        origin = recs[t][rec]
        tag = origin[0]
        if tag == "leaf":
            if nd.bags[t] and nd.touched[t] < n:
                ((v, d),) = rec[0]
                model[v] = Fraction(d, n)
            continue
        kids = nd.children[t]
        if tag == "one":
            stack.append((kids[0], origin[1]))
        elif tag == "forget":
            stack.append((kids[0], origin[1]))
            model[origin[2]] = Fraction(origin[3], n)
        else:
            stack.append((kids[0], origin[1]))
            stack.append((kids[1], origin[2]))
    return model


def check_record_validity(
    record: Record, t: int, inst: Instance, nd: NiceDecomposition, cap: int = 1_000_000
) -> bool:
    """Exhaustive witness search for the record semantics at node t over the
    public Fraction encoding; the test-side oracle for the transitions."""
    n = inst.var_count
    cons = inst.constraints
    subtree = [t]
    seen = {t}
    for node in subtree:
        for c in nd.children[node]:
            if c not in seen:
                seen.add(c)
                subtree.append(c)
    vars_sub = {v for s in subtree for v in nd.bags[s] if v < n}
    cons_sub = {v - n for s in subtree for v in nd.bags[s] if v >= n}
    var_t = {v for v in nd.bags[t] if v < n}
    con_t = {v - n for v in nd.bags[t] if v >= n}

    alpha, beta = record
    if {v for v, _ in alpha} != var_t or {ci for ci, _ in beta} != con_t:
        raise ValueError("record does not fit the node")
    pinned: dict[int, Fraction] = dict(alpha)
    for ci, state in beta:
        if state in (SATISFIED, UNSATISFIED):
            continue
        v, d = state
        if v not in scope(cons[ci]) or v not in vars_sub or v in var_t:
            return False
        if pinned.setdefault(v, d) != d:
            return False

    free = sorted(vars_sub - set(pinned))
    cd = cd_values(n, num_bound(inst)) if n else []
    if len(cd) ** len(free) > cap:
        raise ValueError("validity check blow-up")
    states = dict(beta)
    for combo in itertools.product(cd, repeat=len(free)):
        tau = dict(pinned)
        tau.update(zip(free, combo))
        ok = True
        for ci in cons_sub:
            sat = _satisfied(cons[ci], tau)
            if ci in con_t and states[ci] != SATISFIED:
                if sat:
                    ok = False
                    break
            elif not sat:
                ok = False
                break
        if ok:
            return True
    return False
