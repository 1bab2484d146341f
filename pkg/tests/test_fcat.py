from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fsetmag.errors import HorizonError, UsageError, ValidationError
from fsetmag.fcat import (FCat, Functor, Morphism, GroupPresentationBall, LocallyFiniteGraph, Poset, RankedPoset,
                          from_finite_category, from_graph, from_group, from_metric, from_poset_ranked, induced_submetric,
                          kolmogorov_projection, product)

import oracles


def graph(vertices, edges, directed=False):
    return from_graph(LocallyFiniteGraph.from_edges(vertices, edges, directed=directed))


def test_metric_builder_and_triangle_witness():
    k2 = from_metric([[0, 1], [1, 0]], ["a", "b"])
    assert k2.metric_like and k2.distance(0, 1) == 1
    with pytest.raises(ValidationError) as err:
        from_metric([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    assert err.value.witness == (0, 1, 2)
    with pytest.raises(ValidationError):
        from_metric([[1, 0], [0, 0]])
    with pytest.raises(UsageError):
        from_metric([[0, 0.5], [0.5, 0]])


def test_infinite_distance_means_no_morphism():
    c = from_metric([[0, "inf"], [None, 0]])
    assert c.distance(0, 1) is None
    assert len(c.morphisms) == 2


@given(st.integers(min_value=2, max_value=7), st.data())
def test_graph_metric_matches_bfs(n, data):
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edges = data.draw(st.lists(st.sampled_from(pairs), unique=True))
    c = graph(range(n), edges)
    dist = oracles.bfs_distances(list(range(n)), edges)
    for a in range(n):
        for b in range(n):
            want = dist[(a, b)]
            assert c.distance(a, b) == (None if want is None else Fraction(want))


def test_digraph_metric_is_directed():
    c = graph("abcd", [("a", "b"), ("b", "d"), ("a", "c"), ("c", "d")], directed=True)
    idx = c.index
    assert c.distance(idx["a"], idx["d"]) == 2
    assert c.distance(idx["d"], idx["a"]) is None
    assert not c.is_symmetric()


def test_product_is_l1():
    k2 = from_metric([[0, 1], [1, 0]])
    k3 = graph(range(3), [(0, 1), (1, 2), (0, 2)])
    p = product(k3, k2)
    assert len(p) == 6
    assert p.distance(p.index[(0, 0)], p.index[(1, 1)]) == 2


def test_integer_ball_keeps_true_distances_and_horizon():
    z = GroupPresentationBall("free_abelian", [(1,)], 4, rank=1)
    ball = from_graph(z.cayley_graph(), 4)
    assert len(ball) == 9 and ball.horizon == 4
    assert ball.distance(ball.index[(-4,)], ball.index[(4,)]) == 8
    assert ball.object_horizon(ball.index[(0,)]) == 4
    assert ball.object_horizon(ball.index[(3,)]) == 1
    with pytest.raises(UsageError):
        from_graph(z.cayley_graph())


def test_cyclic_group_category_and_cayley_graph():
    g = GroupPresentationBall("cyclic", [1], 2, order=5)
    assert g.whole_group_in_ball()
    one, cay = from_group(g)
    assert len(one) == 1 and len(one.morphisms) == 5
    assert sorted(m.degree for m in one.morphisms) == [0, 1, 1, 2, 2]
    assert one.compose(1, 1) == one.group_elements.index(2)
    assert len(from_graph(cay)) == 5


def test_infinite_group_needs_explicit_truncation():
    z = GroupPresentationBall("free", [(1,)], 2, rank=1)
    with pytest.raises(HorizonError):
        from_group(z)
    one, _ = from_group(z, allow_truncation=True)
    assert one.horizon == 2
    # two degree-2 elements compose past the horizon
    a = one.group_elements.index((1, 1))
    with pytest.raises(HorizonError):
        one.compose(a, a)


def test_group_table_is_validated():
    table = {(a, b): (a + b) % 2 for a in range(2) for b in range(2)}
    g = GroupPresentationBall("table", [1], 1, elements=[0, 1], table=table, identity=0)
    assert g.whole_group_in_ball()
    bad = dict(table)
    bad[(1, 1)] = 1
    with pytest.raises(ValidationError):
        GroupPresentationBall("table", [1], 1, elements=[0, 1], table=bad, identity=0)


def one_object(degrees, table):
    morphisms = [("*", "*", 0, True)] + [("*", "*", d, False) for d in degrees]
    ids = range(len(morphisms))
    units = [(0, m, m) for m in ids] + [(m, 0, m) for m in ids[1:]]
    return from_finite_category(["*"], morphisms, units + [(g, f, h) for (g, f), h in table.items()])


def test_finite_category_validation():
    assert not one_object([0], {(1, 1): 0}).metric_like
    with pytest.raises(ValidationError, match="misses"):
        one_object([1], {})
    # a o a = b, b o b = a, a o b = b o a = a: (a o a) o b != a o (a o b)
    with pytest.raises(ValidationError, match="associativity"):
        one_object([0, 0], {(1, 1): 2, (2, 2): 1, (1, 2): 1, (2, 1): 1})
    with pytest.raises(ValidationError, match="composition table is required"):
        FCat(["*"], [Morphism(0, 0, 0, Fraction(0), True), Morphism(1, 0, 0, Fraction(0))])


def test_degree_law_is_enforced():
    with pytest.raises(ValidationError):
        from_finite_category(["a", "b", "c"],
                             [("a", "a", 0, True), ("b", "b", 0, True), ("c", "c", 0, True),
                              ("a", "b", 1, False), ("b", "c", 1, False), ("a", "c", 3, False)],
                             [(0, 0, 0), (1, 1, 1), (2, 2, 2), (3, 0, 3), (1, 3, 3), (4, 1, 4), (2, 4, 4),
                              (5, 0, 5), (2, 5, 5), (4, 3, 5)])


def test_json_round_trip():
    c = from_finite_category(["*"], [("*", "*", 0, True), ("*", "*", 0, False)],
                             [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)])
    assert FCat.from_json(c.to_json()) == c
    m = from_metric([[0, Fraction(1, 2)], [Fraction(1, 2), 0]], [("x", 1), ("y", 2)])
    assert FCat.from_json(m.to_json()) == m


def test_posets():
    p = Poset.from_relations("abc", [("a", "b"), ("b", "c")])
    assert p.leq(0, 2) and p.covers() == [(0, 1), (1, 2)]
    with pytest.raises(ValidationError):
        Poset.from_relations("ab", [("a", "b"), ("b", "a")])
    rp = RankedPoset(p, (0, 1, 3))
    c = from_poset_ranked(rp)
    assert c.distance(0, 2) == 3 and c.distance(2, 0) is None
    with pytest.raises(ValidationError):
        RankedPoset(p, (0, 2, 1))
    with pytest.raises(ValidationError):
        RankedPoset(Poset.from_relations("ab", []), (0, 0))


def test_kolmogorov_projection():
    x = from_metric([[0, 0, 1], [0, 0, 1], [1, 1, 0]], "pqr")
    quotient, classes = kolmogorov_projection(x)
    assert len(quotient) == 2 and classes == [0, 0, 1]
    with pytest.raises(ValidationError):
        kolmogorov_projection(from_metric([[0, 0, 1], [0, 0, 2], [1, 2, 0]]))
    sub = induced_submetric(x, [0, 2])
    assert sub.objects == ("p", "r")


def test_functors():
    c = graph("abcd", [("a", "b"), ("b", "d"), ("a", "c"), ("c", "d")], directed=True)
    idx = c.index
    collapse = Functor.from_object_map(c, c, [idx[{"a": "b", "b": "b", "c": "d", "d": "d"}[o]] for o in c.objects])
    assert collapse.then(Functor.identity(c)).obj_map == collapse.obj_map
    with pytest.raises(ValidationError):
        # swapping a and d leaves d -> b without an image
        Functor.from_object_map(c, c, [idx[{"a": "d", "d": "a"}.get(o, o)] for o in c.objects])
    k2 = from_metric([[0, 1], [1, 0]])
    k2_far = from_metric([[0, 2], [2, 0]])
    with pytest.raises(ValidationError, match="raises the degree"):
        Functor.from_object_map(k2, k2_far, [0, 1])
