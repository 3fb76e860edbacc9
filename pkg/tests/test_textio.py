from fractions import Fraction

import pytest

from dlkit.core import Atom, Constraint, Interval, closed, openiv, point
from dlkit.textio import ParseError, parse_instance, parse_model, print_instance, print_model

SAMPLE = """\
# two clocks
var x y
con x - y in [0,3] | x - y in [5,5]
con y - x <= 4
"""


def test_parse_sample():
    inst = parse_instance(SAMPLE)
    assert inst.var_names == ("x", "y")
    assert inst.constraints[0] == Constraint((Atom(0, 1, closed(0, 3)), Atom(0, 1, point(5))))
    assert inst.constraints[1] == Constraint((Atom(1, 0, Interval(None, 4, True, False)),))


def test_sugar_forms():
    inst = parse_instance("var a b\ncon a - b < 2\ncon a - b >= -1\ncon a - b = 0\ncon a - b > 3\n")
    ivs = [c.atoms[0].interval for c in inst.constraints]
    assert ivs == [
        Interval(None, 2, True, True),
        Interval(-1, None, False, True),
        point(0),
        Interval(3, None, True, True),
    ]


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as e:
        parse_instance("var x y\ncon x - w in [0,1]\n")
    assert e.value.line == 2 and e.value.col == 9 and "unknown variable" in e.value.msg
    with pytest.raises(ParseError, match="line 1, col 1"):
        parse_instance("von x y\n")
    with pytest.raises(ParseError, match="empty interval"):
        parse_instance("var x y\ncon x - y in (2,2)\n")
    with pytest.raises(ParseError, match="must be open"):
        parse_instance("var x y\ncon x - y in [-inf,1]\n")
    with pytest.raises(ParseError, match="duplicate variable"):
        parse_instance("var x x\n")
    with pytest.raises(ParseError, match="at least one atom"):
        parse_instance("var x y\ncon\n")


def test_self_difference_handling():
    inst = parse_instance("var x y\ncon x - x in [0,0] | x - y in [9,9]\ncon x - y in [1,1]\n")
    # the tautological disjunction disappears entirely
    assert inst.constraints == (Constraint((Atom(0, 1, point(1)),)),)
    with pytest.raises(ParseError, match="can never lie in"):
        parse_instance("var x\ncon x - x in [1,1]\n")


def test_round_trip_is_identity_on_printed_form():
    inst = parse_instance(SAMPLE)
    text = print_instance(inst)
    assert parse_instance(text) == inst
    assert print_instance(parse_instance(text)) == text
    assert "y - x in (-inf,4]" in text


def test_interval_text_forms():
    inst = parse_instance("var x y\ncon x - y in (-1,0] | x - y in [2,+inf) | x - y in (-inf,-3)\n")
    assert print_instance(inst) == "var x y\ncon x - y in (-1,0] | x - y in [2,+inf) | x - y in (-inf,-3)\n"


def test_model_output():
    inst = parse_instance("var x y\ncon x - y in (0,1)\n")
    assert print_model(inst, None) == "UNSAT\n"
    text = print_model(inst, {0: Fraction(1, 2), 1: Fraction(0)})
    assert text == "SAT\nx = 1/2\ny = 0\n"
    back = parse_model(text, inst)
    assert back == {0: Fraction(1, 2), 1: Fraction(0)}
    assert parse_model("UNSAT\n", inst) is None
    assert parse_model("x = -7/2\ny = 3\n", inst) == {0: Fraction(-7, 2), 1: Fraction(3)}


def test_model_parse_errors():
    inst = parse_instance("var x y\ncon x - y in (0,1)\n")
    with pytest.raises(ParseError, match="unknown variable"):
        parse_model("w = 1\n", inst)
    with pytest.raises(ParseError, match="bad rational"):
        parse_model("x = one\n", inst)
