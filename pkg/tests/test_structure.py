import random
from functools import lru_cache

import pytest

from dlkit.core import Atom, Constraint, EMPTY_CONSTRAINT, make_instance, point
from dlkit.randgen import random_instance
from dlkit.structure import (
    CONSTRAINT,
    FORGET,
    INTRODUCE,
    JOIN,
    LEAF,
    VARIABLE,
    Graph,
    NiceDecomposition,
    TreeDecomposition,
    decompose,
    incidence_graph,
    make_decomposition,
    make_graph,
    parse_decomposition,
    primal_graph,
    print_decomposition,
    to_nice,
    validate,
)


def exact_treewidth(g: Graph) -> int:
    # elimination-order dynamic program; fine for <= 8 vertices
    adj = g.adjacency()
    if g.vertex_count == 0:
        return -1

    def reach_degree(done: frozenset, v: int) -> int:
        seen, stack, out = {v}, [v], set()
        while stack:
            for u in adj[stack.pop()]:
                if u in seen:
                    continue
                seen.add(u)
                if u in done:
                    stack.append(u)
                else:
                    out.add(u)
        return len(out)

    @lru_cache(maxsize=None)
    def f(done: frozenset) -> int:
        if not done:
            return -1
        return min(
            max(f(done - {v}), reach_degree(done - {v}, v)) for v in done
        )

    return f(frozenset(range(g.vertex_count)))


def nice_to_td(nd: NiceDecomposition) -> TreeDecomposition:
    edges = []
    for parent, kids in enumerate(nd.children):
        edges.extend((parent, c) for c in kids)
    return make_decomposition(nd.bags, edges)


def binary(x, y):
    return Constraint((Atom(x, y, point(1)),))


def test_graph_validation():
    with pytest.raises(ValueError):
        make_graph(2, [(0, 0)])
    with pytest.raises(ValueError):
        make_graph(2, [(0, 5)])
    with pytest.raises(ValueError):
        Graph(2, frozenset(), (VARIABLE,))


def test_primal_graph_shapes():
    one = make_instance(("x", "y"), (binary(0, 1),))
    assert primal_graph(one).edges == frozenset({(0, 1)})
    cycle = make_instance(
        ("a", "b", "c", "d"),
        (binary(0, 1), binary(1, 2), binary(2, 3), binary(3, 0)),
    )
    assert primal_graph(cycle).edges == frozenset({(0, 1), (1, 2), (2, 3), (0, 3)})
    wide = make_instance(
        ("x", "y", "z"),
        (Constraint((Atom(0, 1, point(1)), Atom(1, 2, point(1)))),),
    )
    assert primal_graph(wide).edges == frozenset({(0, 1), (0, 2), (1, 2)})


def test_incidence_graph_shapes():
    one = make_instance(("x", "y"), (binary(0, 1),))
    g = incidence_graph(one)
    assert g.vertex_count == 3
    assert g.edges == frozenset({(0, 2), (1, 2)})
    assert g.kinds == (VARIABLE, VARIABLE, CONSTRAINT)

    lonely = make_instance(("x",), (EMPTY_CONSTRAINT,))
    g = incidence_graph(lonely)
    assert g.edges == frozenset()
    assert g.kinds == (VARIABLE, CONSTRAINT)

    star = make_instance(
        ("a", "b", "c", "d"),
        (Constraint(tuple(Atom(0, i, point(1)) for i in (1, 2, 3))),),
    )
    g = incidence_graph(star)
    assert len(g.edges) == 4
    assert all(4 in e for e in g.edges)


def test_decompose_widths():
    triangle = make_graph(3, [(0, 1), (1, 2), (0, 2)])
    td = decompose(triangle)
    assert validate(td, triangle).ok
    assert td.width == 2

    c4 = make_graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    td = decompose(c4)
    assert validate(td, c4).ok
    assert td.width == 2

    tree = make_graph(5, [(0, 1), (1, 2), (1, 3), (3, 4)])
    td = decompose(tree)
    assert validate(td, tree).ok
    assert td.width == 1


def test_decompose_handles_isolated_vertices_and_empty_graph():
    g = make_graph(4, [(1, 2)])
    td = decompose(g)
    assert validate(td, g).ok
    empty = make_graph(0, [])
    td = decompose(empty)
    assert td.bags == ((),)


def test_validate_reports_name_the_problem():
    g = make_graph(3, [(0, 1), (1, 2)])
    missing = make_decomposition([(0, 1), (2,)], [(0, 1)])
    report = validate(missing, g)
    assert not report.ok
    assert any("(1, 2)" in p for p in report.problems)

    split_vertex = make_decomposition([(0, 1), (1, 2), (0,)], [(0, 1), (1, 2)])
    report = validate(split_vertex, g)
    assert not report.ok
    assert any("vertex 0" in p for p in report.problems)

    dropped = make_decomposition([(0, 1), (1, 2)], [(0, 1)])
    bigger = make_graph(4, [(0, 1), (1, 2)])
    report = validate(dropped, bigger)
    assert not report.ok
    assert any("vertex 3 appears in no bag" in p for p in report.problems)


def test_paper_style_decomposition_validates_and_nicifies():
    # vertices a..h as 0..7
    g = make_graph(
        8,
        [(0, 1), (0, 2), (1, 2), (2, 3), (1, 4), (2, 5), (3, 5), (3, 6), (4, 5), (5, 6), (6, 7)],
    )
    td = make_decomposition(
        [(2, 3, 5), (1, 2, 5), (3, 5, 6), (0, 1, 2), (1, 4, 5), (6, 7)],
        [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5)],
    )
    assert validate(td, g).ok
    assert td.width == 2
    nd = to_nice(td)
    assert nd.width == 2
    assert validate(nice_to_td(nd), g).ok


def test_to_nice_single_bag():
    td = make_decomposition([(0, 1)], [])
    nd = to_nice(td)
    assert nd.bags[0] == ()
    assert nd.kind.count(LEAF) == 1
    assert nd.kind.count(FORGET) == 2
    assert nd.kind.count(INTRODUCE) == 1
    assert JOIN not in nd.kind
    assert nd.width == 1


def test_to_nice_join_free_stays_join_free():
    td = make_decomposition([(0, 1), (1, 2), (2, 3)], [(0, 1), (1, 2)])
    nd = to_nice(td)
    assert JOIN not in nd.kind


def test_to_nice_rejects_broken_decomposition():
    bad = make_decomposition([(0, 1), (1, 2), (0,)], [(0, 1), (1, 2)])
    with pytest.raises(ValueError, match="decomposition property violated"):
        to_nice(bad)


def test_nice_invariants_enforced():
    with pytest.raises(ValueError):
        NiceDecomposition(((0,),), (LEAF,), (1,), ((),))
    with pytest.raises(ValueError):
        NiceDecomposition(
            ((0, 1),), (JOIN,), (None,), ((),)
        )


def test_postorder_visits_children_first():
    td = make_decomposition([(0, 1), (1, 2), (1, 3)], [(0, 1), (0, 2)])
    nd = to_nice(td)
    seen = set()
    for node in nd.postorder():
        for child in nd.children[node]:
            assert child in seen
        seen.add(node)
    assert len(seen) == len(nd.bags)


def test_random_decompositions_are_valid_and_width_preserved():
    rng = random.Random(11)
    for _ in range(60):
        n = rng.randint(1, 8)
        all_pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        edges = [p for p in all_pairs if rng.random() < 0.4]
        g = make_graph(n, edges)
        td = decompose(g)
        assert validate(td, g).ok
        assert td.width >= exact_treewidth(g)
        nd = to_nice(td)
        assert nd.width == td.width
        assert validate(nice_to_td(nd), g).ok


def test_incidence_width_at_most_primal_plus_one():
    rng = random.Random(12)
    for _ in range(40):
        n = rng.randint(2, 5)
        inst = random_instance(rng, n, 1, rng.randint(1, 6), max_disjuncts=2)
        tw_primal = exact_treewidth(primal_graph(inst))
        tw_incidence = exact_treewidth(incidence_graph(inst))
        assert tw_incidence <= tw_primal + 1


def test_text_round_trip():
    td = make_decomposition([(2, 3, 5), (1, 2, 5), (6,), ()], [(0, 1), (0, 2), (2, 3)])
    text = print_decomposition(td)
    assert parse_decomposition(text) == td
    assert print_decomposition(parse_decomposition(text)) == text
    rng = random.Random(13)
    for _ in range(20):
        n = rng.randint(1, 7)
        all_pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        g = make_graph(n, [p for p in all_pairs if rng.random() < 0.5])
        td = decompose(g)
        assert parse_decomposition(print_decomposition(td)) == td


def test_parse_errors():
    from dlkit.textio import ParseError

    with pytest.raises(ParseError):
        parse_decomposition("bag 0 1\nbag 2 0\n")
    with pytest.raises(ParseError):
        parse_decomposition("huh 0\n")
    with pytest.raises(ParseError):
        parse_decomposition("edge 0\n")
