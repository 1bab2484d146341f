from fractions import Fraction

from hypothesis import given, strategies as st

from fsetmag import linalg

import oracles

small = st.integers(min_value=-6, max_value=6)


@st.composite
def matrices(draw, max_side=4):
    rows = draw(st.integers(min_value=1, max_value=max_side))
    cols = draw(st.integers(min_value=1, max_value=max_side))
    return [[draw(small) for _ in range(cols)] for _ in range(rows)]


@given(matrices())
def test_smith_form_matches_determinantal_divisors(m):
    got = linalg.smith_invariants(linalg.dense_to_sparse([list(col) for col in zip(*m)]), len(m))
    assert got == oracles.smith_by_minors(m)


@given(matrices(5))
def test_rank_matches_gaussian_elimination(m):
    assert linalg.rank(m) == oracles.rank_q(m)


@given(matrices(5))
def test_nullspace_is_a_kernel_basis(m):
    ncols = len(m[0])
    kernel = linalg.nullspace(m, ncols)
    assert len(kernel) == ncols - oracles.rank_q(m)
    for v in kernel:
        assert all(sum(Fraction(a) * x for a, x in zip(row, v)) == 0 for row in m)


@given(matrices(4))
def test_inverse_or_kernel_witness(m):
    if len(m) != len(m[0]):
        return
    inv, kernel = linalg.inverse(m)
    if inv is None:
        assert oracles.determinant(m) == 0
        assert any(kernel) and all(sum(a * x for a, x in zip(row, kernel)) == 0 for row in m)
    else:
        ident = [[Fraction(int(i == j)) for j in range(len(m))] for i in range(len(m))]
        assert linalg.matmul(m, inv) == ident


def test_torsion_example():
    # [[2, 0], [0, 3]] ~ diag(1, 6)
    assert linalg.smith_invariants(linalg.dense_to_sparse([[2, 0], [0, 3]]), 2) == [1, 6]
