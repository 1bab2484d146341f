"""Exact linear algebra over the rationals and Smith normal form over the integers.

Matrices are plain lists of rows. Sparse integer matrices, used for chain
complexes, are lists of ``{column: value}`` dicts.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

SparseRows = List[Dict[int, int]]


def rref(rows: Sequence[Sequence], ncols: Optional[int] = None) -> Tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form over Q. Returns (nonzero rows, pivot columns)."""
    mat = [[Fraction(x) for x in row] for row in rows]
    if ncols is None:
        ncols = len(mat[0]) if mat else 0
    pivots: List[int] = []
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(mat)) if mat[i][col] != 0), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        lead = mat[r][col]
        if lead != 1:
            mat[r] = [x / lead for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col] != 0:
                factor = mat[i][col]
                mat[i] = [x - factor * y for x, y in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> List[List[Fraction]]:
    """Basis of {x : A x = 0}."""
    reduced, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def span_basis(vectors: Sequence[Sequence], ncols: int) -> List[List[Fraction]]:
    """Row-reduced basis of the span of ``vectors``."""
    if not vectors:
        return []
    return rref(vectors, ncols)[0]


def in_span(basis: Sequence[Sequence], vector: Sequence, ncols: int) -> bool:
    if all(x == 0 for x in vector):
        return True
    return rank(list(basis) + [vector]) == rank(basis) if basis else False


def solve_in_basis(basis: Sequence[Sequence], vector: Sequence) -> Optional[List[Fraction]]:
    """Coefficients c with sum c_i basis_i = vector, or None."""
    n = len(basis)
    if n == 0:
        return [] if all(x == 0 for x in vector) else None
    dim = len(vector)
    # augmented system: columns are basis vectors
    system = [[Fraction(basis[j][i]) for j in range(n)] + [Fraction(vector[i])] for i in range(dim)]
    reduced, pivots = rref(system, n + 1)
    if n in pivots:
        return None
    coeffs = [Fraction(0)] * n
    for row, p in zip(reduced, pivots):
        coeffs[p] = row[n]
    return coeffs


def inverse(matrix: Sequence[Sequence]) -> Tuple[Optional[List[List[Fraction]]], Optional[List[Fraction]]]:
    """Inverse over Q, or (None, kernel vector) when singular."""
    n = len(matrix)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(matrix)]
    reduced, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)):
        kernel = nullspace(matrix, n)
        return None, kernel[0]
    return [row[n:] for row in reduced[:n]], None


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> List[List]:
    cols = list(zip(*b)) if b else []
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in a]


def dense_to_sparse(rows: Sequence[Sequence[int]]) -> SparseRows:
    return [{j: v for j, v in enumerate(row) if v} for row in rows]


def smith_invariants(rows: SparseRows, ncols: int) -> List[int]:
    """Nonzero invariant factors d_1 | d_2 | ... of an integer matrix.

    Elimination always pivots on an entry of minimal absolute value, which keeps
    entries small on the sparse unimodular matrices typical of chain complexes.
    """
    mat = [dict(r) for r in rows if r]
    cols: Dict[int, set] = {}
    for i, row in enumerate(mat):
        for j in row:
            cols.setdefault(j, set()).add(i)
    alive = set(range(len(mat)))
    diagonal: List[int] = []

    def pick_pivot():
        best = None
        for i in alive:
            for j, v in mat[i].items():
                a = abs(v)
                if best is None or a < best[0]:
                    best = (a, i, j)
                    if a == 1:
                        return best
        return best

    def axpy(target: int, source: int, factor: int):
        row_t = mat[target]
        for j, v in mat[source].items():
            nv = row_t.get(j, 0) - factor * v
            if nv:
                if j not in row_t:
                    cols[j].add(target)
                row_t[j] = nv
            elif j in row_t:
                del row_t[j]
                cols[j].discard(target)

    while True:
        found = pick_pivot()
        if found is None:
            break
        _, pi, pj = found
        while True:
            p = mat[pi][pj]
            dirty = False
            # clear the pivot column using row operations
            for i in list(cols.get(pj, ())):
                if i == pi:
                    continue
                q = mat[i][pj] // p
                axpy(i, pi, q)
                if pj in mat[i]:
                    dirty = True
            # clear the pivot row using column operations; column pj is now
            # zero outside the pivot row only if nothing was left behind.
            if not dirty:
                for j in list(mat[pi].keys()):
                    if j == pj:
                        continue
                    q = mat[pi][j] // p
                    if q:
                        # col_j -= q col_pj touches only row pi
                        nv = mat[pi][j] - q * p
                        if nv:
                            mat[pi][j] = nv
                        else:
                            del mat[pi][j]
                            cols[j].discard(pi)
                    if j in mat[pi]:
                        dirty = True
            if not dirty:
                break
            # a smaller remainder exists in the pivot row or column: move there
            best = (abs(p), pi, pj)
            for i in cols.get(pj, ()):
                if abs(mat[i][pj]) < best[0]:
                    best = (abs(mat[i][pj]), i, pj)
            for j, v in mat[pi].items():
                if abs(v) < best[0]:
                    best = (abs(v), pi, j)
            _, pi, pj = best
        diagonal.append(abs(mat[pi][pj]))
        for j in mat[pi]:
            cols[j].discard(pi)
        mat[pi] = {}
        alive.discard(pi)
        cols.pop(pj, None)
    return _divisibility_chain(diagonal)


def _divisibility_chain(diagonal: List[int]) -> List[int]:
    d = sorted(diagonal)
    changed = True
    while changed:
        changed = False
        for i in range(len(d)):
            for j in range(i + 1, len(d)):
                if d[j] % d[i]:
                    g = gcd(d[i], d[j])
                    d[i], d[j] = g, d[i] * d[j] // g
                    changed = True
        d.sort()
    return d
