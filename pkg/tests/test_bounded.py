import random
from fractions import Fraction

import pytest

from dlkit.bounded import IMPLIED, SpanProblem, fractional_system, solve_bounded, unit_relation
from dlkit.core import (
    Atom,
    Constraint,
    Interval,
    above,
    add_zero_variable,
    at_least,
    eval_instance,
    make_instance,
    openiv,
    point,
)
from dlkit.enumeration import certificate_oracle
from dlkit.randgen import random_instance


def test_unit_relation_six_cases():
    # fixed integer-part difference c, one unit disjunct each
    assert unit_relation(2, openiv(1, 2)) == frozenset("<")
    assert unit_relation(2, point(2)) == frozenset("=")
    assert unit_relation(2, openiv(2, 3)) == frozenset(">")
    assert unit_relation(0, openiv(0, 1)) == frozenset(">")
    assert unit_relation(5, point(0)) is None
    assert unit_relation(1, above(1)) == frozenset(">")
    assert unit_relation(2, above(1)) is IMPLIED
    assert unit_relation(0, above(1)) is None
    assert unit_relation(1, at_least(1)) == frozenset("=>")
    with pytest.raises(ValueError, match="not a unit interval"):
        unit_relation(0, Interval(0, 2, True, True))


def test_fractional_system_examples():
    inst = make_instance(("x", "y"), (Constraint((Atom(0, 1, openiv(0, 1)),)),))
    pa = fractional_system({0: 0, 1: 0}, inst)
    assert pa is not None and dict(pa.relations) == {(0, 1): frozenset(">")}
    inst = make_instance(
        ("x", "y"),
        (Constraint((Atom(0, 1, openiv(-1, 0)), Atom(0, 1, openiv(0, 1)))),),
    )
    pa = fractional_system({0: 0, 1: 0}, inst)
    assert pa is not None and dict(pa.relations) == {(0, 1): frozenset("<>")}
    inst = make_instance(("x", "y"), (Constraint((Atom(0, 1, point(0)),)),))
    assert fractional_system({0: 5, 1: 0}, inst) is None


def test_fractional_system_drops_full_relation():
    c = Constraint((Atom(0, 1, point(0)), Atom(0, 1, openiv(0, 1)), Atom(0, 1, openiv(-1, 0))))
    pa = fractional_system({0: 0, 1: 0}, make_instance(("x", "y"), (c,)))
    assert pa is not None and pa.relations == ()


def test_solve_bounded_examples():
    win = make_instance(("x", "y"), (Constraint((Atom(0, 1, openiv(0, 1)),)),))
    got = solve_bounded(1, win)
    assert got == {0: Fraction(1, 3), 1: Fraction(0)}
    step = make_instance(("x", "y"), (Constraint((Atom(0, 1, point(1)),)),))
    assert solve_bounded(2, step) == {0: Fraction(1), 1: Fraction(0)}
    assert solve_bounded(1, step) is None


def test_solve_bounded_validation():
    inst = make_instance(("x", "y"), ())
    with pytest.raises(ValueError, match="span must be at least 1"):
        solve_bounded(0, inst)
    tern = make_instance(
        ("x", "y", "z"),
        (Constraint((Atom(0, 1, point(0)), Atom(1, 2, point(0)))),),
    )
    with pytest.raises(ValueError, match="bounded span requires binary instance"):
        solve_bounded(2, tern)
    with pytest.raises(ValueError, match="span must be at least 1"):
        SpanProblem(0, inst)


def test_solve_bounded_empty_constraint():
    inst = make_instance(("x",), (Constraint(()),))
    assert solve_bounded(3, inst) is None


def _pinned(rng, n, k, w, n_constraints):
    inst = random_instance(rng, n, k, n_constraints, 2, one_pair_per_constraint=True)
    window = Interval(0, w, False, True)
    return add_zero_variable(inst, [(v, window) for v in range(n)])


def test_solve_bounded_agrees_with_oracle_on_pinned_instances():
    rng = random.Random(31)
    sats = unsats = 0
    for _ in range(60):
        n = rng.randint(1, 3)
        w = rng.randint(1, 3)
        inst = _pinned(rng, n, 1, w, rng.randint(0, 4))
        want = certificate_oracle(inst)
        got = solve_bounded(w, inst)
        assert (got is not None) == want
        if got is None:
            unsats += 1
            continue
        sats += 1
        assert eval_instance(inst, got)
        assert all(0 <= v < w for v in got.values())
    assert sats > 10 and unsats > 5
