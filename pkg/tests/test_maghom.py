from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fsetmag import corpus
from fsetmag.acceptance import diamond_homotopy
from fsetmag.errors import PreconditionError, ResourceError, StrategyError, UsageError
from fsetmag.fcat import Functor, LocallyFiniteGraph, from_graph, from_metric
from fsetmag.maghom import (ChainComplexZ, euler_categorification_check, hochschild_complex, hochschild_graded_check,
                            homology_table, induced_map, magnitude_homology, mc_complex, path_length_bound)

import oracles

GRAPHS = ["K2", "K3", "C4", "C5", "K3xK2"]


def rational_betti(name, ell, n):
    g = corpus.load(name)
    return oracles.graph_mh_betti(list(g.vertices), g.edges(), ell, n)


@pytest.mark.parametrize("name", GRAPHS)
def test_ranks_match_vertex_tuple_complex(name):
    c = corpus.category(name)
    for ell in range(4 if name == "K3xK2" else 5):
        table = homology_table(c, ell, ell + 1)
        for n in range(ell + 1):
            assert table[n].betti == rational_betti(name, ell, n), (ell, n)


def test_cycle_graph_has_no_torsion_in_low_degrees():
    c = corpus.category("C5")
    for ell in range(5):
        assert all(not h.torsion for h in homology_table(c, ell, ell + 1))


def test_known_diagonal_of_complete_graph():
    # diagonal MH^l_l of K3 counts walks without backtracking: 3 * 2^l
    c = corpus.category("K3")
    assert [magnitude_homology(c, ell, ell).betti for ell in range(5)] == [3, 6, 12, 24, 48]


@given(st.integers(min_value=2, max_value=6), st.data())
def test_boundary_squares_to_zero_on_random_graphs(n, data):
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edges = data.draw(st.lists(st.sampled_from(pairs), unique=True))
    c = from_graph(LocallyFiniteGraph.from_edges(range(n), edges))
    ell = data.draw(st.integers(min_value=1, max_value=4))
    cx = mc_complex(c, ell)
    for k in range(2, cx.top + 1):
        upper, lower = cx.matrix(k), cx.matrix(k - 1)
        if not upper or not lower:
            continue
        product = [[sum(lower[i][m] * upper[m][j] for m in range(len(upper))) for j in range(len(upper[0]))]
                   for i in range(len(lower))]
        assert all(v == 0 for row in product for v in row)


def test_square_zero_check_catches_a_bad_complex():
    with pytest.raises(AssertionError):
        ChainComplexZ({0: ["x"], 1: ["y"], 2: ["z"]}, {1: [{0: 1}], 2: [{0: 1}]})


def test_integral_homology_sees_torsion():
    cx = ChainComplexZ({0: ["x"], 1: ["y"]}, {1: [{0: 2}]})
    assert cx.homology(0).betti == 0 and cx.homology(0).torsion == [2]


@pytest.mark.parametrize("name", ["K2", "K3", "C4", "C5", "B2", "diamond", "triangle_faces"])
def test_euler_characteristic_recovers_magnitude(name):
    report = euler_categorification_check(corpus.category(name), 4)
    assert report.equal and report.first_divergence is None


def test_euler_check_needs_enough_degrees():
    with pytest.raises(PreconditionError):
        euler_categorification_check(corpus.category("C4"), 4, max_n=1)
    with pytest.raises(PreconditionError):
        path_length_bound(corpus.category("degenerate2"), 2)


def test_kolmogorov_invariance():
    deg, point = corpus.category("degenerate2"), corpus.category("point")
    for ell in range(4):
        assert homology_table(deg, ell, 4) == homology_table(point, ell, 4)


def test_degree_zero_morphisms_need_explicit_bound():
    with pytest.raises(StrategyError):
        mc_complex(corpus.category("degenerate2"), 1)


@pytest.mark.parametrize("name", ["K2", "diamond", "C4"])
def test_hochschild_agrees_with_magnitude_homology(name):
    c = corpus.category(name)
    for ell in range(3):
        assert hochschild_graded_check(c, ell, 3).equal


def test_hochschild_guardrail():
    with pytest.raises(ResourceError) as err:
        hochschild_complex(corpus.category("K3"), 2, 3, guardrail_cells=100)
    assert err.value.cells > 100


@pytest.mark.parametrize("name", ["K3", "C5", "diamond"])
def test_complex_splits_over_endpoints(name):
    c = corpus.category(name)
    for ell in range(1, 4):
        whole = homology_table(c, ell, ell + 1)
        for n in range(ell + 1):
            split = sum(magnitude_homology(c, ell, n, (a, b)).betti for a in range(len(c)) for b in range(len(c)))
            assert split == whole[n].betti


def test_pointed_basepoints_must_be_t1():
    with pytest.raises(PreconditionError):
        mc_complex(corpus.category("degenerate2"), 1, 2, basepoints=(0,))
    with pytest.raises(UsageError):
        mc_complex(corpus.category("K3"), 1, 2, basepoints=(0, 1, 2))


def test_unnormalized_complex_has_the_same_homology():
    c = corpus.category("C4")
    for ell in range(3):
        assert homology_table(c, ell, 3, normalized=False) == homology_table(c, ell, 3)


def test_identity_functor_induces_identity():
    c = corpus.category("C5")
    m = induced_map(Functor.identity(c), 2, 2)
    assert m.source_dim == m.target_dim
    assert m.homology == [[Fraction(int(i == j)) for j in range(m.source_dim)] for i in range(m.target_dim)]


def test_one_step_homotopic_functors_can_differ_on_magnitude_homology():
    # the identity and the collapse of the diamond are 1-homotopic, yet on MH^2_2
    # the identity is an isomorphism while the collapse sends the class to zero
    f, g, _ = diamond_homotopy()
    assert induced_map(f, 2, 2).homology == [[1]]
    assert induced_map(g, 2, 2).homology == [[0]]


def test_maps_between_spaces():
    k2 = corpus.category("K2")
    line = from_metric([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    inclusion = Functor.from_object_map(k2, line, [0, 1])
    m = induced_map(inclusion, 1, 1)
    assert m.source_dim == 2 and m.target_dim == 4
    assert sorted(sum(1 for x in col if x) for col in zip(*m.homology)) == [1, 1]
