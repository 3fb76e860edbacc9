"""Formula evaluation, grid search, clause conversion, relation expansion."""

import random

import pytest

from dlkit.core import (
    Atom,
    Constraint,
    EMPTY_CONSTRAINT,
    Interval,
    above,
    at_least,
    at_most,
    below,
    closed,
    eval_instance,
    full,
    make_instance,
    num_bound,
    openiv,
    point,
)
from dlkit.enumeration import cd_values, certificate_oracle
from dlkit.formula import (
    FALSE,
    FAnd,
    FAtom,
    FNot,
    FOr,
    Formula,
    RelationTable,
    eval_formula,
    expand_relations,
    formula_num_bound,
    make_formula,
    make_relation_table,
    parse_formula,
    print_formula,
    solve_dlsat,
    to_cnf,
)
from dlkit.randgen import random_assignment, random_interval
from dlkit.textio import ParseError


def fa(x, y, iv):
    return FAtom(Atom(x, y, iv))


def random_formula(rng, n, depth, k):
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.1:
            return FALSE
        x, y = rng.sample(range(n), 2)
        return FAtom(Atom(x, y, random_interval(rng, k)))
    kind = rng.choice(["and", "or", "not"])
    if kind == "not":
        return FNot(random_formula(rng, n, depth - 1, k))
    children = tuple(
        random_formula(rng, n, depth - 1, k) for _ in range(rng.randint(0, 3))
    )
    return FAnd(children) if kind == "and" else FOr(children)


# --------------------------------------------------------------------------
# Construction and evaluation.


def test_formula_validation():
    with pytest.raises(ValueError, match="duplicate variable"):
        make_formula(["x", "x"], FALSE)
    with pytest.raises(ValueError, match="unknown variable id"):
        make_formula(["x", "y"], fa(0, 2, point(0)))
    with pytest.raises(ValueError, match="unknown formula node"):
        make_formula(["x"], "junk")
    f = make_formula(["x", "y"], fa(0, 1, point(1)))
    assert f.var_id("y") == 1
    with pytest.raises(KeyError):
        f.var_id("z")


def test_eval_unit_chain():
    # x = z1, y = z4, consecutive steps of one: holds exactly when y = x + 3
    names = ["x", "z1", "z2", "z3", "z4", "y"]
    f = make_formula(
        names,
        FAnd(
            (
                fa(0, 1, point(0)),
                fa(5, 4, point(0)),
                fa(2, 1, point(1)),
                fa(3, 2, point(1)),
                fa(4, 3, point(1)),
            )
        ),
    )
    chain = {0: 0, 1: 0, 2: 1, 3: 2, 4: 3, 5: 3}
    assert eval_formula(f, chain)
    assert not eval_formula(f, {**chain, 5: 2})


def test_eval_false_and_negation():
    f = make_formula(["x", "y"], FALSE)
    assert not eval_formula(f, {0: 0, 1: 0})
    g = make_formula(["x", "y"], FNot(fa(0, 1, point(0))))
    assert not eval_formula(g, {0: 3, 1: 3})
    assert eval_formula(g, {0: 3, 1: 2})


def test_eval_requires_total_assignment():
    f = make_formula(["x", "y"], FAnd(()))
    with pytest.raises(ValueError, match="unbound variable 'y'"):
        eval_formula(f, {0: 0})


# --------------------------------------------------------------------------
# Direct satisfiability sweep.


def test_solve_dlsat_examples():
    unsat = make_formula(
        ["x", "y"], FAnd((fa(0, 1, point(1)), fa(1, 0, point(1))))
    )
    assert solve_dlsat(unsat) is None
    sat = make_formula(["x", "y"], FOr((fa(0, 1, point(0)), fa(0, 1, point(2)))))
    model = solve_dlsat(sat)
    assert model is not None
    assert eval_formula(sat, model)
    grid = set(cd_values(2, 2))
    assert all(v in grid for v in model.values())


def test_solve_dlsat_no_variables():
    assert solve_dlsat(make_formula([], FALSE)) is None
    assert solve_dlsat(make_formula([], FAnd(()))) == {}


def test_solve_dlsat_negation_only_sat():
    f = make_formula(["x", "y"], FNot(fa(0, 1, point(0))))
    model = solve_dlsat(f)
    assert model is not None and model[0] != model[1]


# --------------------------------------------------------------------------
# Clause conversion.


def test_to_cnf_single_atom():
    f = make_formula(["x", "y"], fa(0, 1, closed(0, 3)))
    inst = to_cnf(f)
    assert inst.var_names == ("x", "y")
    assert inst.constraints == (Constraint((Atom(0, 1, closed(0, 3)),)),)


def test_to_cnf_complement_splits_into_tails():
    f = make_formula(["x", "y"], FNot(fa(0, 1, closed(0, 3))))
    inst = to_cnf(f)
    assert inst.constraints == (
        Constraint((Atom(0, 1, below(0)), Atom(0, 1, above(3)))),
    )
    g = make_formula(["x", "y"], FNot(fa(0, 1, point(2))))
    assert to_cnf(g).constraints == (
        Constraint((Atom(0, 1, below(2)), Atom(0, 1, above(2)))),
    )
    h = make_formula(["x", "y"], FNot(fa(0, 1, below(5))))
    assert to_cnf(h).constraints == (Constraint((Atom(0, 1, at_least(5)),)),)


def test_to_cnf_distribution():
    a = fa(0, 1, closed(0, 1))
    b = fa(1, 2, point(2))
    c = fa(2, 0, above(0))
    f = make_formula(["x", "y", "z"], FOr((FAnd((a, b)), c)))
    inst = to_cnf(f)
    assert inst.constraints == (
        Constraint((a.atom, c.atom)),
        Constraint((b.atom, c.atom)),
    )


def test_to_cnf_truth_constants():
    assert to_cnf(make_formula([], FALSE)).constraints == (EMPTY_CONSTRAINT,)
    assert to_cnf(make_formula([], FNot(FALSE))).constraints == ()
    a = fa(0, 1, point(4))
    taut = to_cnf(make_formula(["x", "y"], FOr((a, FNot(FALSE)))))
    assert taut.constraints == (
        Constraint((a.atom, Atom(0, 1, full()))),
    )
    assert num_bound(taut) == 4


def test_to_cnf_negated_full_atom_is_false():
    f = make_formula(["x", "y"], FNot(fa(0, 1, full())))
    assert to_cnf(f).constraints == (EMPTY_CONSTRAINT,)


def test_to_cnf_double_negation():
    a = fa(0, 1, openiv(0, 2))
    f = make_formula(["x", "y"], FNot(FNot(a)))
    assert to_cnf(f).constraints == (Constraint((a.atom,)),)


def test_to_cnf_negated_conjunction():
    a = fa(0, 1, at_most(1))
    b = fa(1, 0, at_least(-1))
    f = make_formula(["x", "y"], FNot(FAnd((a, b))))
    inst = to_cnf(f)
    assert inst.constraints == (
        Constraint((Atom(0, 1, above(1)), Atom(1, 0, below(-1)))),
    )


def test_to_cnf_cap():
    groups = tuple(
        FAnd((fa(0, 1, point(i)), fa(1, 2, point(i)), fa(2, 0, point(i))))
        for i in range(3)
    )
    f = make_formula(["x", "y", "z"], FOr(groups))
    with pytest.raises(ValueError, match="cnf blow-up"):
        to_cnf(f, cap=8)
    assert len(to_cnf(f, cap=27).constraints) == 27


def test_formula_matches_instance_semantics():
    rng = random.Random(61)
    for _ in range(120):
        root = random_formula(rng, 3, 3, 2)
        f = make_formula(["x", "y", "z"], root)
        inst = to_cnf(f)
        assert formula_num_bound(f) == num_bound(inst)
        for _ in range(6):
            a = random_assignment(rng, 3, 2)
            assert eval_formula(f, a) == eval_instance(inst, a)
        status = solve_dlsat(f) is not None
        assert status == certificate_oracle(inst)


# --------------------------------------------------------------------------
# Relation expansion.


def _table():
    return make_relation_table(
        {
            "max0": (
                3,
                [Constraint((Atom(2, 0, at_most(0)), Atom(2, 1, at_most(0))))],
            ),
            "overlaps": (2, [Constraint((Atom(0, 1, openiv(-1, 0)),))]),
            "eq": (
                2,
                [
                    Constraint((Atom(0, 1, at_most(0)),)),
                    Constraint((Atom(0, 1, at_least(0)),)),
                ],
            ),
            "neq": (
                2,
                [Constraint((Atom(0, 1, below(0)), Atom(0, 1, above(0))))],
            ),
        }
    )


def test_expand_relations_examples():
    inst = expand_relations(_table(), [("max0", ("x", "y", "z"))])
    assert inst.var_names == ("x", "y", "z")
    assert inst.constraints == (
        Constraint((Atom(2, 0, at_most(0)), Atom(2, 1, at_most(0)))),
    )
    allen = expand_relations(_table(), [("overlaps", ("a", "b"))])
    assert allen.constraints == (Constraint((Atom(0, 1, openiv(-1, 0)),)),)
    eq = expand_relations(_table(), [("eq", ("u", "v"))])
    assert len(eq.constraints) == 2
    assert certificate_oracle(eq)


def test_expand_relations_shares_variables():
    inst = expand_relations(
        _table(), [("eq", ("u", "v")), ("neq", ("v", "w")), ("eq", ("w", "u"))]
    )
    assert inst.var_names == ("u", "v", "w")
    assert not certificate_oracle(inst)


def test_expand_relations_collapsed_arguments():
    inst = expand_relations(_table(), [("neq", ("w", "w"))])
    assert inst.constraints == (EMPTY_CONSTRAINT,)
    assert not certificate_oracle(inst)


def test_expand_relations_errors():
    with pytest.raises(ValueError, match="unknown relation"):
        expand_relations(_table(), [("nope", ("x",))])
    with pytest.raises(ValueError, match="expects 3 arguments"):
        expand_relations(_table(), [("max0", ("x", "y"))])
    with pytest.raises(ValueError, match="outside arity"):
        make_relation_table(
            {"bad": (2, [Constraint((Atom(0, 2, point(0)),))])}
        )
    with pytest.raises(ValueError, match="positive arity"):
        RelationTable({"bad": (0, ())})


# --------------------------------------------------------------------------
# Text form.


def test_print_formula_examples():
    f = make_formula(
        ["x", "y", "z"],
        FOr((FAnd((fa(0, 1, closed(0, 3)), FALSE)), FNot(fa(1, 2, below(0))))),
    )
    assert print_formula(f) == (
        "(or (and (atom x - y in [0,3]) false) (not (atom y - z in (-inf,0))))\n"
    )
    assert print_formula(make_formula([], FAnd(()))) == "(and)\n"


def test_parse_formula_round_trip():
    texts = [
        "(atom x - y in [0,3])\n",
        "false\n",
        "(and)\n",
        "(or (atom a - b in (-inf,0)) (not false))\n",
        "(not (and (atom p - q in (0,1)) (atom q - p in [2,+inf))))\n",
    ]
    for t in texts:
        f = parse_formula(t)
        assert print_formula(f) == t
        assert parse_formula(print_formula(f)) == f


def test_parse_formula_variable_order_and_comments():
    f = parse_formula("# heading\n(and (atom b - a in [0,0])\n (atom c - b in [1,1]))")
    assert f.var_names == ("b", "a", "c")


def test_parse_formula_random_round_trip():
    rng = random.Random(67)
    for _ in range(60):
        f = make_formula(["x", "y", "z"], random_formula(rng, 3, 3, 2))
        text = print_formula(f)
        back = parse_formula(text)
        assert print_formula(back) == text
        # names may renumber when not all variables occur; semantics agree
        if back.var_names == f.var_names:
            assert back == f


def test_parse_formula_self_difference():
    taut = parse_formula("(atom x - x in [0,0])")
    assert taut.var_names == ("x",)
    assert eval_formula(taut, {0: 5})
    with pytest.raises(ParseError, match="can never lie"):
        parse_formula("(atom x - x in [1,1])")


def test_parse_formula_errors():
    cases = [
        ("", "empty formula"),
        ("(xor x y)", "expected 'and'"),
        ("(atom x + y in [0,1])", "expected '-'"),
        ("(atom x - y in 7)", "bad interval"),
        ("(atom x - y in [1,0])", "empty interval"),
        ("(atom and - y in [0,1])", "invalid variable name"),
        ("(not false false)", "expected '\\)'"),
        ("(and false", "end of input"),
        ("false false", "trailing input"),
        ("(atom x - y in [0,1]) junk", "trailing input"),
    ]
    for text, msg in cases:
        with pytest.raises(ParseError, match=msg):
            parse_formula(text)


def test_parse_error_positions():
    try:
        parse_formula("(and\n  (atom x - y in [2,1]))")
    except ParseError as e:
        assert (e.line, e.col) == (2, 18)
    else:
        pytest.fail("expected ParseError")
