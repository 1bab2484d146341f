from collections import deque
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from fsetmag import corpus
from fsetmag.acceptance import diamond_homotopy
from fsetmag.errors import PreconditionError, UsageError, ValidationError
from fsetmag.fcat import Functor, from_metric
from fsetmag.maghom import homology_table
from fsetmag.specseq import (Digraph, build_filtered_chain, e2_vs_path_homology, page_table, path_homology,
                             r_homotopy_invariance_check, validate_r_transformation)

import oracles


def nerve_count(c, n, p):
    """Vertex sequences x_0..x_n (repeats allowed) of total distance exactly p."""
    count = 0
    for seq in product(range(len(c)), repeat=n + 1):
        total = 0
        for a, b in zip(seq, seq[1:]):
            d = c.distance(a, b)
            if d is None:
                break
            total += d
        else:
            count += total == p
    return count


def components(vertices, edges):
    adj = {v: set() for v in vertices}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    seen, count = set(), 0
    for v in vertices:
        if v in seen:
            continue
        count += 1
        queue = deque([v])
        seen.add(v)
        while queue:
            for w in adj[queue.popleft()]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
    return count


@st.composite
def digraphs(draw, max_vertices=5):
    n = draw(st.integers(min_value=1, max_value=max_vertices))
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=8)) if pairs else []
    return Digraph(range(n), edges)


@pytest.mark.parametrize("name", ["K2", "C4", "diamond"])
def test_zeroth_page_counts_nerve_tuples(name):
    c = corpus.category(name)
    fc = build_filtered_chain(c, 3, 3)
    for p in range(4):
        for n in range(3):
            entry = fc.page(0, p, n - p)
            assert entry.valid
            assert entry.dimension == nerve_count(c, n, p), (p, n)


@pytest.mark.parametrize("name", ["K2", "K3", "C4", "diamond", "dicycle5"])
def test_first_page_is_magnitude_homology(name):
    c = corpus.category(name)
    fc = build_filtered_chain(c, 4, 4)
    for p in range(4):
        table = homology_table(c, p, 4)
        for n in range(4):
            entry = fc.page(1, p, n - p)
            if entry.valid:
                assert entry.dimension == table[n].betti, (p, n)


def test_entries_beyond_the_caps_are_flagged():
    fc = build_filtered_chain(corpus.category("K2"), 3, 3)
    assert not fc.page(2, 3, 0).valid and fc.page(2, 3, 0).note
    assert not fc.page(1, 0, 3).valid
    assert fc.page(1, 3, -1).valid
    assert all(e.p <= 3 and e.p + e.q < 3 for e in page_table(fc, 1))


def test_negative_positions_are_zero():
    fc = build_filtered_chain(corpus.category("K2"), 2, 2)
    assert fc.page(3, -1, 1).dimension == 0
    assert fc.page(3, 1, -2).dimension == 0
    with pytest.raises(UsageError):
        fc.page(-1, 0, 0)


def test_nerve_needs_integral_degrees():
    with pytest.raises(ValidationError):
        build_filtered_chain(from_metric([[0, Fraction(1, 2)], [Fraction(1, 2), 0]]), 2, 2)


def test_truncated_ball_must_cover_the_cap():
    ball = corpus.category("Z_ball")
    build_filtered_chain(ball, 2, 2)
    with pytest.raises(UsageError):
        build_filtered_chain(ball, 5, 2)


@given(digraphs(4), st.integers(min_value=0, max_value=2))
def test_pages_never_grow(d, r):
    fc = build_filtered_chain(d.category(), 3, 3)
    for e in page_table(fc, r + 1):
        if e.valid and fc.is_valid(r, e.p, e.q):
            assert e.dimension <= fc.page(r, e.p, e.q).dimension


@pytest.mark.parametrize("name", ["K2", "C4", "diamond"])
def test_pages_converge_to_the_nerve_homology(name):
    # chains of degree n have filtration <= 2n here, so pages are stable once r > 2n + 2;
    # the nerve of a category with an initial object, or of a connected metric space, is contractible
    fc = build_filtered_chain(corpus.category(name), 12, 3)
    for n in range(2):
        stable = [fc.page(8, p, n - p) for p in range(5)]
        assert all(e.valid for e in stable)
        assert [e.dimension for e in stable] == [fc.page(9, p, n - p).dimension for p in range(5)]
        assert sum(e.dimension for e in stable) == (1 if n == 0 else 0)


@pytest.mark.parametrize("edges,betti", [
    ([("a", "b"), ("b", "d"), ("a", "c"), ("c", "d")], [0, 0, 0]),
    ([("a", "b"), ("b", "c"), ("a", "c")], [0, 0, 0]),
    ([("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")], [0, 1, 0]),
    ([("a", "b"), ("c", "b")], [0, 0, 0]),
    ([("a", "b"), ("c", "d")], [1, 0, 0]),
])
def test_path_homology_examples(edges, betti):
    vertices = sorted({v for e in edges for v in e})
    assert [h.betti for h in path_homology(Digraph(vertices, edges), 2)] == betti


@given(digraphs())
def test_unreduced_path_homology_counts_components(d):
    assert path_homology(d, 0, reduced=False)[0].betti == components(d.vertices, d.edges)


@given(digraphs())
def test_low_degree_euler_bound(d):
    # Omega_0 and Omega_1 are spanned by vertices and edges, so h0 - h1 = V - E + rank d_2 >= V - E
    h = path_homology(d, 1, reduced=False)
    edges = oracles.allowed_path_counts(d.vertices, d.edges, 1)
    assert h[0].betti - h[1].betti >= len(d.vertices) - edges


@given(digraphs())
def test_second_page_is_path_homology(d):
    assert e2_vs_path_homology(d, 2).equal


def test_second_page_on_corpus_digraphs():
    for name, h1 in [("diamond", 0), ("dicycle5", 1)]:
        g = corpus.load(name)
        report = e2_vs_path_homology(Digraph(g.vertices, g.edges()), 2, 5, 5)
        assert report.equal and report.rows[1].reduced_betti == h1
        assert report.rows[0].e2 == 1


def test_e2_comparison_needs_room():
    d = Digraph("ab", [("a", "b")])
    with pytest.raises(PreconditionError):
        e2_vs_path_homology(d, 2, 3, 3)


def test_digraph_validation():
    with pytest.raises(ValidationError):
        Digraph("ab", [("a", "a")])
    with pytest.raises(ValidationError):
        Digraph("ab", [("a", "z")])


def test_homotopic_functors_agree_from_the_next_page():
    f, g, tau = diamond_homotopy()
    report = r_homotopy_invariance_check(f, g, 1, tau, 4, 4)
    assert report.page == 2 and report.rows and report.equal


def test_identity_and_collapse_differ_on_the_first_page():
    # with r = 0 the same pair must fail, since tau has degree 1 > 0
    f, g, tau = diamond_homotopy()
    with pytest.raises(PreconditionError, match="degree"):
        r_homotopy_invariance_check(f, g, 0, tau, 4, 4)


def test_bad_transformations_are_rejected():
    f, g, tau = diamond_homotopy()
    c = f.source
    idx = c.index
    wrong_end = list(tau)
    wrong_end[idx["a"]] = c.hom_ids(idx["a"], idx["d"])[0]
    with pytest.raises(PreconditionError, match="endpoints"):
        validate_r_transformation(f, g, 2, wrong_end)
    with pytest.raises(PreconditionError):
        validate_r_transformation(f, g, 1, tau[:-1])
    other = corpus.category("diamond")
    with pytest.raises(PreconditionError):
        validate_r_transformation(f, Functor.identity(other), 1, tau)
