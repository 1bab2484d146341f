"""Magnitude chain complexes, their integral homology, and two cross-checks.

Generators of ``MC^l_n`` are tuples ``(f_1, ..., f_n)`` of composable
non-identity morphisms with total degree exactly ``l``. The boundary is
``sum_i (-1)^i d_i``; a face survives only when it keeps total degree ``l``
(and, for composition faces, does not produce an identity). The end faces
``d_0`` and ``d_n`` survive only when they drop a degree-0 morphism, so they
never appear for categories without degree-0 non-identity morphisms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from . import linalg
from .errors import HorizonError, PreconditionError, ResourceError, StrategyError, UsageError
from .fcat import FCat, Functor
from .magnitude import classify, magnitude
from .novikov import exponent

DEFAULT_GUARDRAIL_CELLS = 2_000_000


@dataclass(frozen=True, order=True)
class PathGenerator:
    start: int
    morphisms: Tuple[int, ...]
    end: int
    degree: Fraction = field(compare=False)

    @property
    def length(self) -> int:
        return len(self.morphisms)


@dataclass
class HomologySummary:
    betti: int
    torsion: List[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"betti": self.betti, "torsion": list(self.torsion)}


Column = Dict[int, int]


class ChainComplexZ:
    """Finite integer chain complex with sparse boundary columns.

    ``boundary[n][j]`` is the column of generator ``j`` in degree ``n``,
    a dict from generator indices in degree ``n - 1`` to coefficients.
    """

    def __init__(self, generators: Dict[int, list], boundary: Dict[int, List[Column]], check: bool = True):
        self.generators = generators
        self.boundary = boundary
        self._snf: Dict[int, List[int]] = {}
        if check:
            self.check_square_zero()

    @property
    def top(self) -> int:
        return max(self.generators) if self.generators else -1

    def rank(self, n: int) -> int:
        return len(self.generators.get(n, ()))

    def check_square_zero(self) -> None:
        for n in sorted(self.boundary):
            if n - 1 not in self.boundary:
                continue
            lower = self.boundary[n - 1]
            for j, col in enumerate(self.boundary[n]):
                acc: Dict[int, int] = {}
                for i, v in col.items():
                    for k, w in lower[i].items():
                        acc[k] = acc.get(k, 0) + v * w
                if any(acc.values()):
                    raise AssertionError(f"boundary squares to a nonzero map at degree {n}, generator {j}")

    def invariants(self, n: int) -> List[int]:
        """Invariant factors of the boundary out of degree ``n``."""
        if n not in self._snf:
            cols = self.boundary.get(n, [])
            self._snf[n] = linalg.smith_invariants(cols, self.rank(n - 1)) if cols else []
        return self._snf[n]

    def homology(self, n: int) -> HomologySummary:
        rk_out = len(self.invariants(n)) if n > 0 else 0
        incoming = self.invariants(n + 1)
        betti = self.rank(n) - rk_out - len(incoming)
        return HomologySummary(betti, [d for d in incoming if d > 1])

    def matrix(self, n: int) -> List[List[int]]:
        """Dense boundary matrix from degree ``n`` to ``n - 1`` (rows index degree ``n - 1``)."""
        rows = [[0] * self.rank(n) for _ in range(self.rank(n - 1))]
        for j, col in enumerate(self.boundary.get(n, [])):
            for i, v in col.items():
                rows[i][j] = v
        return rows

    def to_json(self) -> dict:
        return {
            "generators": {str(n): [list(g.morphisms) if isinstance(g, PathGenerator) else list(g) for g in gens]
                           for n, gens in sorted(self.generators.items())},
            "boundary": {str(n): self.matrix(n) for n in sorted(self.boundary)},
        }


# ---------------------------------------------------------------------------
# generator enumeration


def _t1_violation(c: FCat, a: int) -> Optional[int]:
    for m in c.morphisms:
        if not m.is_identity and m.degree == 0 and a in (m.source, m.target):
            return m.id
    return None


def _paths(c: FCat, ell: Fraction, max_n: int, normalized: bool, start: Optional[int]) -> Iterator[Tuple[int, Tuple[int, ...]]]:
    """Composable tuples of length <= max_n and total degree exactly ``ell``."""
    n_obj = len(c)
    outgoing = []
    for a in range(n_obj):
        ms = c.out_morphisms(a)
        if normalized:
            ms = [m for m in ms if not c.is_identity(m)]
        outgoing.append(sorted(ms, key=lambda m: m))

    def walk(obj: int, total: Fraction, seq: List[int]):
        if total == ell:
            yield tuple(seq)
        if len(seq) == max_n:
            return
        for m in outgoing[obj]:
            t = total + c.degree(m)
            if t <= ell:
                seq.append(m)
                yield from walk(c.target(m), t, seq)
                seq.pop()

    starts = range(n_obj) if start is None else [start]
    for a in starts:
        for seq in walk(a, Fraction(0), []):
            yield a, seq


def max_chain_length(c: FCat, ell: Fraction) -> int:
    cls = classify(c)
    if not cls.uniform:
        raise StrategyError("an explicit max_n is needed for categories with degree-0 non-identity morphisms")
    if cls.epsilon is None:
        return 1
    return int(ell / cls.epsilon) + 1


def mc_complex(c: FCat, ell, max_n: Optional[int] = None, basepoints: Sequence[int] = (),
               normalized: bool = True) -> ChainComplexZ:
    """The magnitude chain complex ``MC^l`` in chain degrees ``0..max_n``.

    ``basepoints`` is ``()``, ``(a,)`` or ``(a, b)`` (object indices) for the
    pointed variants; pointed objects must be T1. ``normalized=False`` keeps
    tuples containing identities.
    """
    ell = exponent(ell)
    if max_n is None:
        max_n = max_chain_length(c, ell)
    if max_n < 0:
        raise UsageError("max_n must be non-negative")
    basepoints = tuple(basepoints)
    if len(basepoints) > 2:
        raise UsageError("at most two basepoints")
    for a in basepoints:
        bad = _t1_violation(c, a)
        if bad is not None:
            raise PreconditionError(f"basepoint {c.objects[a]!r} is not T1", witness=bad)
    start = basepoints[0] if basepoints else None
    end = basepoints[1] if len(basepoints) == 2 else None

    by_degree: Dict[int, List[PathGenerator]] = {n: [] for n in range(max_n + 1)}
    for a, seq in _paths(c, ell, max_n, normalized, start):
        last = c.target(seq[-1]) if seq else a
        if end is not None and last != end:
            continue
        by_degree[len(seq)].append(PathGenerator(a, seq, last, ell))
    for gens in by_degree.values():
        gens.sort()
    index = {n: {g: i for i, g in enumerate(gens)} for n, gens in by_degree.items()}

    boundary: Dict[int, List[Column]] = {}
    for n in range(1, max_n + 1):
        cols = []
        for g in by_degree[n]:
            col: Column = {}
            for sign, face in _faces(c, g, normalized):
                k = index[n - 1].get(face)
                if k is None:
                    raise AssertionError(f"face {face} of {g} left the complex")
                col[k] = col.get(k, 0) + sign
            cols.append({k: v for k, v in col.items() if v})
        boundary[n] = cols
    return ChainComplexZ(by_degree, boundary)


def _faces(c: FCat, g: PathGenerator, normalized: bool):
    seq = g.morphisms
    n = len(seq)
    ell = g.degree
    first, last = seq[0], seq[-1]
    if c.degree(first) == 0:
        rest = seq[1:]
        s = c.target(first)
        yield 1, PathGenerator(s, rest, g.end, ell)
    for i in range(1, n):
        f, h = seq[i - 1], seq[i]
        comp = c.compose(h, f)
        if c.degree(comp) != c.degree(f) + c.degree(h):
            continue
        if normalized and c.is_identity(comp):
            continue
        yield (-1) ** i, PathGenerator(g.start, seq[:i - 1] + (comp,) + seq[i + 1:], g.end, ell)
    if c.degree(last) == 0:
        rest = seq[:-1]
        e = c.source(last)
        yield (-1) ** n, PathGenerator(g.start, rest, e, ell)


def homology_table(c: FCat, ell, max_n: int, basepoints: Sequence[int] = (),
                   normalized: bool = True) -> List[HomologySummary]:
    """Summaries of ``MH^l_n`` for ``n = 0 .. max_n - 1``."""
    cx = mc_complex(c, ell, max_n, basepoints, normalized)
    return [cx.homology(n) for n in range(max_n)]


def magnitude_homology(c: FCat, ell, n: int, basepoints: Sequence[int] = (),
                       max_n: Optional[int] = None) -> HomologySummary:
    if max_n is None:
        max_n = n + 1
    if max_n < n + 1:
        raise UsageError("max_n must be at least n + 1")
    return mc_complex(c, ell, max_n, basepoints).homology(n)


# ---------------------------------------------------------------------------
# categorification of magnitude


@dataclass
class EulerRow:
    ell: Fraction
    alternating_sum: int
    coefficient: Fraction
    bettis: List[int]

    @property
    def equal(self) -> bool:
        return self.alternating_sum == self.coefficient


@dataclass
class EulerReport:
    rows: List[EulerRow]
    bound: int

    @property
    def equal(self) -> bool:
        return all(r.equal for r in self.rows)

    @property
    def first_divergence(self) -> Optional[Fraction]:
        return next((r.ell for r in self.rows if not r.equal), None)

    def to_json(self) -> dict:
        return {"equal": self.equal, "bound": self.bound,
                "first_divergence": None if self.first_divergence is None else str(self.first_divergence),
                "rows": [{"l": str(r.ell), "alternating_betti_sum": r.alternating_sum,
                          "magnitude_coefficient": str(r.coefficient), "bettis": r.bettis, "equal": r.equal}
                         for r in self.rows]}


def path_length_bound(c: FCat, cutoff) -> Tuple[int, List[Fraction]]:
    """Longest non-degenerate path of degree <= cutoff, and all attained degrees."""
    cutoff = exponent(cutoff)
    cls = classify(c)
    if not cls.tame:
        raise PreconditionError("category is not tame: non-degenerate paths are unbounded",
                                witness=cls.degenerate_witness)
    outgoing = [[m for m in c.out_morphisms(a) if not c.is_identity(m)] for a in range(len(c))]
    best = 0
    totals = {Fraction(0)}
    stack = [(a, Fraction(0), 0) for a in range(len(c))]
    while stack:
        obj, total, length = stack.pop()
        best = max(best, length)
        totals.add(total)
        for m in outgoing[obj]:
            t = total + c.degree(m)
            if t <= cutoff:
                stack.append((c.target(m), t, length + 1))
    return best, sorted(totals)


def euler_categorification_check(c: FCat, cutoff, max_n: Optional[int] = None) -> EulerReport:
    """Compare ``sum_n (-1)^n rank MH^l_n`` with the magnitude coefficient of ``q^l``."""
    cutoff = exponent(cutoff)
    bound, totals = path_length_bound(c, cutoff)
    if max_n is None:
        max_n = bound
    if max_n < bound:
        raise PreconditionError(f"max_n = {max_n} is below the path-length bound {bound}")
    mag = magnitude(c, cutoff)
    exponents = sorted(set(totals) | {e for e, _ in mag.terms})
    rows = []
    for ell in exponents:
        cx = mc_complex(c, ell, max_n + 1)
        bettis = [cx.homology(n).betti for n in range(max_n + 1)]
        alt = sum((-1) ** n * b for n, b in enumerate(bettis))
        rows.append(EulerRow(ell, alt, mag.coefficient(ell), bettis))
    return EulerReport(rows, bound)


# ---------------------------------------------------------------------------
# graded Hochschild complex


@dataclass
class ComparisonRow:
    n: int
    hochschild: HomologySummary
    magnitude: HomologySummary

    @property
    def equal(self) -> bool:
        return self.hochschild == self.magnitude


@dataclass
class HochschildReport:
    ell: Fraction
    rows: List[ComparisonRow]
    cells: int

    @property
    def equal(self) -> bool:
        return all(r.equal for r in self.rows)

    def to_json(self) -> dict:
        return {"l": str(self.ell), "equal": self.equal, "cells": self.cells,
                "rows": [{"n": r.n, "hochschild": r.hochschild.to_json(), "magnitude": r.magnitude.to_json(),
                          "equal": r.equal} for r in self.rows]}


def hochschild_cells(c: FCat, max_n: int) -> int:
    nm, no = len(c.morphisms), len(c)
    return sum(nm ** n * no * no for n in range(max_n + 1))


def _gr_product(c: FCat, f: int, g: int) -> Optional[int]:
    """``f . g`` in the associated graded category algebra: ``g o f`` when degrees add."""
    if c.target(f) != c.source(g):
        return None
    try:
        h = c.compose(g, f)
    except HorizonError:
        return None
    if c.degree(h) != c.degree(f) + c.degree(g):
        return None
    return h


def hochschild_complex(c: FCat, ell, max_n: int, guardrail_cells: int = DEFAULT_GUARDRAIL_CELLS) -> ChainComplexZ:
    """Degree-``l`` piece of the Hochschild complex of Gr P_C with coefficients in Z(Ob x Ob)."""
    ell = exponent(ell)
    cells = hochschild_cells(c, max_n)
    if cells > guardrail_cells:
        raise ResourceError(f"Hochschild complex needs {cells} cells, above the guardrail {guardrail_cells}",
                            cells=cells, limit=guardrail_cells)
    mors = list(range(len(c.morphisms)))
    pairs = [(a, b) for a in range(len(c)) for b in range(len(c))]

    def tuples(n: int, budget: Fraction):
        if n == 0:
            if budget == 0:
                yield ()
            return
        for m in mors:
            d = c.degree(m)
            if d <= budget:
                for rest in tuples(n - 1, budget - d):
                    yield (m,) + rest

    gens: Dict[int, list] = {}
    for n in range(max_n + 1):
        gens[n] = [(rs, m) for rs in tuples(n, ell) for m in pairs]
    index = {n: {g: i for i, g in enumerate(gs)} for n, gs in gens.items()}

    boundary: Dict[int, List[Column]] = {}
    for n in range(1, max_n + 1):
        cols = []
        for rs, (a, b) in gens[n]:
            col: Column = {}

            def add(key, sign):
                k = index[n - 1][key]
                col[k] = col.get(k, 0) + sign

            r1, rn = rs[0], rs[-1]
            # m . r1 = (a, t r1) when s r1 = b; kept only if r1 has degree 0
            if c.degree(r1) == 0 and c.source(r1) == b:
                add((rs[1:], (a, c.target(r1))), 1)
            for i in range(1, n):
                prod = _gr_product(c, rs[i - 1], rs[i])
                if prod is not None:
                    add((rs[:i - 1] + (prod,) + rs[i + 1:], (a, b)), (-1) ** i)
            # rn . m = (s rn, b) when t rn = a
            if c.degree(rn) == 0 and c.target(rn) == a:
                add((rs[:-1], (c.source(rn), b)), (-1) ** n)
            cols.append({k: v for k, v in col.items() if v})
        boundary[n] = cols
    return ChainComplexZ(gens, boundary)


def hochschild_graded_check(c: FCat, ell, max_n: int,
                            guardrail_cells: int = DEFAULT_GUARDRAIL_CELLS) -> HochschildReport:
    """Compare graded Hochschild homology with magnitude homology in degrees ``0..max_n-1``."""
    ell = exponent(ell)
    hh = hochschild_complex(c, ell, max_n, guardrail_cells)
    mc = mc_complex(c, ell, max_n)
    rows = [ComparisonRow(n, hh.homology(n), mc.homology(n)) for n in range(max_n)]
    return HochschildReport(ell, rows, hochschild_cells(c, max_n))


# ---------------------------------------------------------------------------
# functoriality


def _rational_homology_basis(cx: ChainComplexZ, n: int):
    """(boundary basis, homology representatives) in degree ``n`` over Q."""
    dim = cx.rank(n)
    d_out = cx.matrix(n) if n > 0 else []
    cycles = linalg.nullspace(d_out, dim) if d_out else [
        [Fraction(int(i == j)) for j in range(dim)] for i in range(dim)]
    d_in = cx.matrix(n + 1)
    images = [list(col) for col in zip(*d_in)] if d_in and d_in[0] else []
    bounds = linalg.span_basis(images, dim)
    reps: List[List[Fraction]] = []
    current = list(bounds)
    for z in cycles:
        if linalg.rank(current + [z]) > len(current):
            current.append(z)
            reps.append(z)
    return bounds, reps


@dataclass
class InducedMap:
    ell: Fraction
    n: int
    chain: List[List[int]]                  # target generators x source generators
    homology: List[List[Fraction]]          # target homology basis x source homology basis
    source_dim: int
    target_dim: int

    def to_json(self) -> dict:
        return {"l": str(self.ell), "n": self.n, "source_dim": self.source_dim, "target_dim": self.target_dim,
                "homology": [[str(x) for x in row] for row in self.homology]}


def chain_map(f: Functor, ell, n: int, max_n: Optional[int] = None):
    """Generator-wise image, with the source and target complexes it connects."""
    ell = exponent(ell)
    if max_n is None:
        max_n = n + 1
    src = mc_complex(f.source, ell, max_n)
    tgt = mc_complex(f.target, ell, max_n)
    t_index = {g: i for i, g in enumerate(tgt.generators[n])}
    matrix = [[0] * src.rank(n) for _ in range(tgt.rank(n))]
    D = f.target
    for j, g in enumerate(src.generators[n]):
        image = tuple(f.mor_map[m] for m in g.morphisms)
        if any(D.is_identity(m) for m in image):
            continue
        if sum((D.degree(m) for m in image), Fraction(0)) != ell:
            continue
        target_gen = PathGenerator(f.obj_map[g.start], image, f.obj_map[g.end], ell)
        matrix[t_index[target_gen]][j] += 1
    return src, tgt, matrix


def induced_map(f: Functor, ell, n: int) -> InducedMap:
    """Matrix of ``MH^l_n(f)`` over Q in the canonical homology bases of both sides."""
    ell = exponent(ell)
    src, tgt, chain = chain_map(f, ell, n)
    _, src_reps = _rational_homology_basis(src, n)
    tgt_bounds, tgt_reps = _rational_homology_basis(tgt, n)
    columns = []
    for z in src_reps:
        image = [sum(Fraction(chain[i][j]) * z[j] for j in range(len(z))) for i in range(tgt.rank(n))]
        coeffs = linalg.solve_in_basis(tgt_reps + tgt_bounds, image)
        if coeffs is None:
            raise AssertionError("image of a cycle is not a cycle")
        columns.append(coeffs[:len(tgt_reps)])
    hom = [[columns[j][i] for j in range(len(src_reps))] for i in range(len(tgt_reps))]
    return InducedMap(ell, n, chain, hom, len(src_reps), len(tgt_reps))
