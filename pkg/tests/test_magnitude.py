from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fsetmag import corpus
from fsetmag.acceptance import two_lines, z2_category
from fsetmag.errors import NotInvertibleError, StrategyError, UsageError, ValidationError
from fsetmag.fcat import LocallyFiniteGraph, Poset, from_graph, from_metric
from fsetmag.magnitude import (classify, coweighting, galois_hypotheses, growth_series, magnitude, mobius,
                               path_expansion_magnitude, poincare_polynomial, subspace_arrangement, weighting,
                               zeta_inverse, zeta_matrix)
from fsetmag.novikov import NSeries, invert

import oracles

# frozen after agreeing with the recursion oracle and with path expansion
FROZEN = {
    "point": "1",
    "K2": "2 - 2q + 2q^2 - 2q^3 + 2q^4",
    "K3": "3 - 6q + 12q^2 - 24q^3 + 48q^4",
    "C4": "4 - 8q + 12q^2 - 16q^3 + 20q^4",
    "C5": "5 - 10q + 10q^2 - 20q^4",
    "K3xK2": "6 - 18q + 42q^2 - 90q^3 + 186q^4",
    "K33": "6 - 18q + 42q^2 - 90q^3 + 186q^4",
    "B2": "4 - 4q + q^2",
    "triangle_faces": "6 - 6q",
    "diamond": "4 - 4q + q^2",
    "dicycle5": "5 - 5q",
    "Z_ball": "9 - 16q + 16q^2 - 16q^3 + 16q^4",
}

METRIC_NAMES = [n for n in corpus.UNIFORM if n != "Z5_cayley"]


def integer_distances(c):
    dist = {}
    for i, a in enumerate(c.objects):
        for j, b in enumerate(c.objects):
            d = c.distance(i, j)
            dist[(a, b)] = None if d is None else int(d)
    return dist


@pytest.mark.parametrize("name", sorted(FROZEN))
def test_frozen_magnitudes(name):
    assert str(magnitude(corpus.category(name), 4)) == FROZEN[name]


@pytest.mark.parametrize("name", METRIC_NAMES)
def test_weighting_matches_degreewise_recursion(name):
    c = corpus.category(name)
    want = oracles.weighting_by_recursion(integer_distances(c), list(c.objects), 5)
    got = weighting(c, 5)
    for label in c.objects:
        assert got.at(label).as_dict() == want[label]


@pytest.mark.parametrize("name", METRIC_NAMES)
def test_weighting_at_each_object_is_its_path_expansion(name):
    c = corpus.category(name)
    w = weighting(c, 4)
    for a in range(len(c)):
        assert w[a] == path_expansion_magnitude(c, 4, start=a)


@given(st.integers(min_value=2, max_value=6), st.data())
def test_strategies_agree_on_random_graphs(n, data):
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edges = data.draw(st.lists(st.sampled_from(pairs), unique=True))
    c = from_graph(LocallyFiniteGraph.from_edges(range(n), edges))
    neumann = magnitude(c, 4, strategy="neumann")
    assert neumann == magnitude(c, 4, strategy="constant_term_lu")
    assert neumann == path_expansion_magnitude(c, 4)


def test_zeta_inverse_is_two_sided():
    z = zeta_matrix(corpus.category("diamond"), 3)
    inv = zeta_inverse(z)
    ident = type(z).identity(z.objects, z.cutoff)
    assert z @ inv == ident and inv @ z == ident


def test_weighting_and_coweighting_of_asymmetric_space():
    c = corpus.category("diamond")
    w, cw = weighting(c, 3), coweighting(c, 3)
    assert w.at("a") == NSeries.polynomial([1, -2, 1], 3)
    assert cw.at("d") == NSeries.polynomial([1, -2, 1], 3)
    assert w.at("d") == NSeries.one(3)
    total = sum((x for x in w.values), NSeries.zero(3))
    assert total == sum((x for x in cw.values), NSeries.zero(3)) == magnitude(c, 3)


def test_finite_degree_zero_category():
    c = z2_category()
    assert magnitude(c, 2) == Fraction(1, 2)
    with pytest.raises(StrategyError):
        magnitude(c, 2, strategy="neumann")
    with pytest.raises(UsageError):
        magnitude(c, 2, strategy="gauss")


def test_degenerate_space_has_no_magnitude():
    with pytest.raises(NotInvertibleError):
        magnitude(corpus.category("degenerate2"), 2)


def test_classification():
    k3 = classify(corpus.category("K3"))
    assert k3.uniform and k3.tame and k3.epsilon == 1 and k3.skeletal
    z2 = classify(z2_category())
    assert not z2.tame and z2.has_nontrivial_endomorphism and z2.all_degrees_zero
    deg = classify(corpus.category("degenerate2"))
    assert not deg.quasi_tame and not deg.skeletal and deg.degenerate_witness == ("p", "p'")
    diamond = classify(corpus.category("diamond"))
    assert diamond.finitely_many_paths and diamond.longest_path_degree == 2
    half = classify(from_metric([[0, Fraction(1, 2)], [Fraction(1, 2), 0]]))
    assert half.epsilon == Fraction(1, 2)


def test_exactness_of_finite_path_categories():
    assert magnitude(corpus.category("diamond"), 2).exact
    assert not magnitude(corpus.category("diamond"), 1).exact
    assert not magnitude(corpus.category("K2"), 5).exact


def test_rational_distances():
    c = from_metric([[0, Fraction(1, 2)], [Fraction(1, 2), 0]])
    assert magnitude(c, 2) == 2 * invert(NSeries.from_dict({0: 1, Fraction(1, 2): 1}, 2))


@st.composite
def posets(draw):
    n = draw(st.integers(min_value=1, max_value=6))
    rel = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda t: t[0] < t[1]),
                        max_size=10))
    return Poset.from_relations(range(n), rel)


@given(posets())
def test_mobius_matches_recursive_definition(p):
    mu = mobius(p)
    want = oracles.mobius_recursive(range(len(p)), p.leq)
    assert all(mu[i][j] == want[(i, j)] for i in range(len(p)) for j in range(len(p)))


def test_poincare_polynomial_of_boolean_lattice():
    res = poincare_polynomial(corpus.load("B2"))
    assert str(res.poincare) == "1 + 2q + q^2"
    assert str(res.weighting) == "1 - 2q + q^2"
    assert res.agree


def test_two_lines_arrangement():
    arr = two_lines()
    assert galois_hypotheses(arr)
    assert arr.intersections.phi == (0, 1, 1, 2)
    assert poincare_polynomial(arr.intersections).poincare == poincare_polynomial(arr.subsets).poincare


def test_parallel_lines_meet_in_the_empty_set():
    arr = subspace_arrangement([[[1, 0, 0]], [[1, 0, 1]]], 2)
    assert max(arr.intersections.phi) == 3
    assert poincare_polynomial(arr.intersections).agree
    with pytest.raises(ValidationError):
        subspace_arrangement([[[0, 0, 1]]], 2)


def test_growth_series_of_cyclic_group():
    res = growth_series(corpus.load("Z5_cayley"), 6)
    assert str(res.series) == "1 + 2q + 2q^2"
    assert res.inverse.coefficients() == oracles.invert_series([1, 2, 2], 6)
    assert res.agree


def test_growth_series_of_integers_needs_radius():
    from fsetmag.errors import HorizonError
    z = corpus.load("Z_ball")
    res = growth_series(z, 4)
    assert str(res.series) == "1 + 2q + 2q^2 + 2q^3 + 2q^4"
    assert res.agree
    with pytest.raises(HorizonError):
        growth_series(z, 5)
