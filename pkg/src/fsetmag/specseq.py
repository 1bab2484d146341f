"""The spectral sequence of the degree-filtered nerve complex, over Q.

Page entries are computed from ranks of "lower-left" blocks of the boundary
matrices (columns of filtration <= a, rows of filtration > b). One column
reduction per chain degree yields every such rank at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from . import linalg
from .errors import PreconditionError, UsageError, ValidationError
from .fcat import FCat, Functor, LocallyFiniteGraph, from_graph
from .maghom import HomologySummary, PathGenerator


@dataclass
class PageEntry:
    r: int
    p: int
    q: int
    dimension: int
    valid: bool
    note: str = ""

    def to_json(self) -> dict:
        return {"r": self.r, "p": self.p, "q": self.q, "dimension": self.dimension,
                "valid": self.valid, "note": self.note}


class FilteredChainQ:
    """Nerve tuples of length <= N and total degree <= L, with the full face boundary.

    Generators in each chain degree are sorted by filtration, so ``F_p`` is a
    prefix of the generator list.
    """

    def __init__(self, category: FCat, L: int, N: int, normalized: bool = False):
        self.category = category
        self.L = int(L)
        self.N = int(N)
        self.normalized = normalized
        for m in category.morphisms:
            if m.degree.denominator != 1:
                raise ValidationError(f"morphism {m.id} has non-integral degree {m.degree}", witness=m.id)
        if category.horizon is not None and category.horizon < self.L:
            raise UsageError("truncated category has a horizon below the filtration cap")
        self.generators: Dict[int, List[PathGenerator]] = {}
        self.filtration: Dict[int, List[int]] = {}
        self._enumerate()
        self.index = {n: {g: i for i, g in enumerate(gs)} for n, gs in self.generators.items()}
        self.boundary: Dict[int, List[Dict[int, int]]] = {}
        for n in range(1, self.N + 1):
            self.boundary[n] = [self._boundary_column(g, n) for g in self.generators[n]]
        self._check_square_zero()
        self._pivots: Dict[int, List[Tuple[int, int]]] = {}

    def _enumerate(self):
        c = self.category
        outgoing = []
        for a in range(len(c)):
            ms = c.out_morphisms(a)
            if self.normalized:
                ms = [m for m in ms if not c.is_identity(m)]
            outgoing.append(sorted(ms))
        by_n: Dict[int, List[PathGenerator]] = {n: [] for n in range(self.N + 1)}

        def walk(start, obj, total, seq):
            by_n[len(seq)].append(PathGenerator(start, tuple(seq), obj, Fraction(total)))
            if len(seq) == self.N:
                return
            for m in outgoing[obj]:
                t = total + int(c.degree(m))
                if t <= self.L:
                    seq.append(m)
                    walk(start, c.target(m), t, seq)
                    seq.pop()

        for a in range(len(c)):
            walk(a, a, 0, [])
        for n, gs in by_n.items():
            gs.sort(key=lambda g: (g.degree, g.start, g.morphisms))
            self.generators[n] = gs
            self.filtration[n] = [int(g.degree) for g in gs]

    def _face(self, g: PathGenerator, i: int) -> Optional[PathGenerator]:
        c = self.category
        seq = g.morphisms
        n = len(seq)
        if i == 0:
            rest = seq[1:]
            start = c.target(seq[0])
            end = g.end
        elif i == n:
            rest = seq[:-1]
            start = g.start
            end = c.source(seq[-1])
        else:
            comp = c.compose(seq[i], seq[i - 1])
            if self.normalized and c.is_identity(comp):
                return None
            rest = seq[:i - 1] + (comp,) + seq[i + 1:]
            start, end = g.start, g.end
        total = sum((c.degree(m) for m in rest), Fraction(0))
        return PathGenerator(start, rest, end, total)

    def _boundary_column(self, g: PathGenerator, n: int) -> Dict[int, int]:
        col: Dict[int, int] = {}
        for i in range(n + 1):
            face = self._face(g, i)
            if face is None:
                continue
            k = self.index[n - 1][face]
            col[k] = col.get(k, 0) + (-1) ** i
        return {k: v for k, v in col.items() if v}

    def _check_square_zero(self):
        for n in range(2, self.N + 1):
            lower = self.boundary[n - 1]
            for col in self.boundary[n]:
                acc: Dict[int, int] = {}
                for i, v in col.items():
                    for k, w in lower[i].items():
                        acc[k] = acc.get(k, 0) + v * w
                if any(acc.values()):
                    raise AssertionError(f"nerve boundary squares to a nonzero map in degree {n}")

    # -- ranks ------------------------------------------------------------

    def pivots(self, n: int) -> List[Tuple[int, int]]:
        """(column filtration, pivot row filtration) after left-to-right column reduction."""
        if n not in self._pivots:
            if n <= 0 or n > self.N:
                self._pivots[n] = []
                return self._pivots[n]
            owner: Dict[int, Dict[int, Fraction]] = {}
            out = []
            for j, col in enumerate(self.boundary[n]):
                work = {k: Fraction(v) for k, v in col.items()}
                while work:
                    low = max(work)
                    if low not in owner:
                        owner[low] = work
                        out.append((self.filtration[n][j], self.filtration[n - 1][low]))
                        break
                    other = owner[low]
                    factor = work[low] / other[low]
                    for k, v in other.items():
                        nv = work.get(k, 0) - factor * v
                        if nv:
                            work[k] = nv
                        else:
                            work.pop(k, None)
            self._pivots[n] = out
        return self._pivots[n]

    def block_rank(self, n: int, a: int, b: int) -> int:
        """Rank of the boundary out of degree ``n`` restricted to F_a, projected away from F_b."""
        return sum(1 for cf, rf in self.pivots(n) if cf <= a and rf > b)

    def dim_filtered(self, p: int, n: int) -> int:
        if p < 0:
            return 0
        return sum(1 for f in self.filtration.get(n, ()) if f <= p)

    def _dim_z(self, r: int, p: int, n: int) -> int:
        if p < 0:
            return 0
        return self.dim_filtered(p, n) - self.block_rank(n, p, p - r)

    def _dim_b(self, s: int, p: int, n: int) -> int:
        if p < 0:
            return 0
        top = p + s - 1
        return self.block_rank(n + 1, top, -1) - self.block_rank(n + 1, top, p)

    def is_valid(self, r: int, p: int, q: int) -> bool:
        n = p + q
        return 0 <= n and n + 1 <= self.N and 0 <= p <= self.L and p + r - 1 <= self.L

    def page(self, r: int, p: int, q: int) -> PageEntry:
        """Dimension of ``E^r_{p,q}`` in chain degree ``p + q``."""
        if r < 0:
            raise UsageError("page index must be non-negative")
        n = p + q
        if n < 0 or p < 0:
            return PageEntry(r, p, q, 0, True)
        dim = (self._dim_z(r, p, n) - self._dim_z(r - 1, p - 1, n)) - (
            self._dim_b(r, p, n) - self._dim_b(r + 1, p - 1, n))
        valid = self.is_valid(r, p, q)
        note = "" if valid else "cap-limited: defining subspaces exceed L or N"
        return PageEntry(r, p, q, dim, valid, note)

    # -- explicit subspaces for induced maps -------------------------------

    def _dense(self, n: int) -> List[List[int]]:
        rows = [[0] * len(self.generators[n]) for _ in range(len(self.generators[n - 1]))]
        for j, col in enumerate(self.boundary[n]):
            for i, v in col.items():
                rows[i][j] = v
        return rows

    def cycles_basis(self, s: int, p: int, n: int) -> List[List[Fraction]]:
        """Basis of Z^s_p in degree n, as vectors over all degree-n generators."""
        dim_n = len(self.generators[n])
        cols = [j for j in range(dim_n) if self.filtration[n][j] <= p]
        if n == 0:
            basis = [[Fraction(int(i == j)) for i in cols] for j in cols]
        else:
            dense = self._dense(n)
            rows = [i for i, f in enumerate(self.filtration[n - 1]) if f > p - s]
            sub = [[dense[i][j] for j in cols] for i in rows]
            basis = linalg.nullspace(sub, len(cols)) if rows else [
                [Fraction(int(i == j)) for i in range(len(cols))] for j in range(len(cols))]
        out = []
        for v in basis:
            full = [Fraction(0)] * dim_n
            for j, x in zip(cols, v):
                full[j] = x
            out.append(full)
        return out

    def boundaries_projected(self, s: int, p: int, n: int) -> List[List[Fraction]]:
        """Projection of B^s_p = F_p cap d(F_{p+s-1}) onto filtration-exactly-p coordinates."""
        dense = self._dense(n + 1)
        top = p + s - 1
        cols = [j for j, f in enumerate(self.filtration[n + 1]) if f <= top]
        rows_high = [i for i, f in enumerate(self.filtration[n]) if f > p]
        sub = [[dense[i][j] for j in cols] for i in rows_high]
        if rows_high:
            u_basis = linalg.nullspace(sub, len(cols))
        else:
            u_basis = [[Fraction(int(i == j)) for i in range(len(cols))] for j in range(len(cols))]
        exact = [i for i, f in enumerate(self.filtration[n]) if f == p]
        out = []
        for u in u_basis:
            image = [sum(Fraction(dense[i][j]) * x for j, x in zip(cols, u)) for i in exact]
            out.append(image)
        return linalg.span_basis(out, len(exact))

    def project(self, vector: Sequence[Fraction], p: int, n: int) -> List[Fraction]:
        return [x for x, f in zip(vector, self.filtration[n]) if f == p]


def build_filtered_chain(c: FCat, L: int, N: int, normalized: bool = False) -> FilteredChainQ:
    return FilteredChainQ(c, L, N, normalized)


def page(fc: FilteredChainQ, r: int, p: int, q: int) -> PageEntry:
    return fc.page(r, p, q)


def page_table(fc: FilteredChainQ, r: int) -> List[PageEntry]:
    """All entries of page ``r`` with ``0 <= p <= L`` and ``0 <= p + q < N``."""
    out = []
    for p in range(fc.L + 1):
        for n in range(fc.N):
            out.append(fc.page(r, p, n - p))
    return out


# ---------------------------------------------------------------------------
# path homology of digraphs


@dataclass
class Digraph:
    vertices: Tuple[Hashable, ...]
    edges: Tuple[Tuple[Hashable, Hashable], ...]

    def __post_init__(self):
        self.vertices = tuple(self.vertices)
        self.edges = tuple(dict.fromkeys(tuple(e) for e in self.edges))
        vs = set(self.vertices)
        for u, v in self.edges:
            if u not in vs or v not in vs:
                raise ValidationError(f"edge {(u, v)} names an unknown vertex", witness=(u, v))
            if u == v:
                raise ValidationError(f"loop at {u!r}", witness=(u, v))

    def graph(self) -> LocallyFiniteGraph:
        return LocallyFiniteGraph.from_edges(self.vertices, self.edges, directed=True)

    def category(self) -> FCat:
        return from_graph(self.graph())


def _allowed_paths(d: Digraph, p: int) -> List[Tuple[Hashable, ...]]:
    out_nbrs: Dict[Hashable, List[Hashable]] = {v: [] for v in d.vertices}
    for u, v in d.edges:
        out_nbrs[u].append(v)
    paths = [(v,) for v in d.vertices]
    for _ in range(p):
        paths = [path + (w,) for path in paths for w in out_nbrs[path[-1]]]
    return paths


def _path_boundary(path: Tuple) -> Dict[Tuple, int]:
    out: Dict[Tuple, int] = {}
    for i in range(len(path)):
        face = path[:i] + path[i + 1:]
        if any(face[k] == face[k + 1] for k in range(len(face) - 1)):
            continue  # non-regular paths vanish
        out[face] = out.get(face, 0) + (-1) ** i
    return out


def path_homology(d: Digraph, max_p: int, reduced: bool = True) -> List[HomologySummary]:
    """Betti numbers of GLMY path homology over Q in degrees ``0..max_p``."""
    allowed = {p: _allowed_paths(d, p) for p in range(max_p + 2)}
    omega: Dict[int, List[List[Fraction]]] = {}
    for p in range(max_p + 2):
        a_p = allowed[p]
        if p == 0:
            omega[0] = [[Fraction(int(i == j)) for i in range(len(a_p))] for j in range(len(a_p))]
            continue
        allowed_lower = set(allowed[p - 1])
        bad: Dict[Tuple, int] = {}
        cols = []
        for path in a_p:
            bd = _path_boundary(path)
            cols.append(bd)
            for face in bd:
                if face not in allowed_lower and face not in bad:
                    bad[face] = len(bad)
        if bad:
            constraint = [[0] * len(a_p) for _ in range(len(bad))]
            for j, bd in enumerate(cols):
                for face, v in bd.items():
                    if face in bad:
                        constraint[bad[face]][j] += v
            omega[p] = linalg.nullspace(constraint, len(a_p))
        else:
            omega[p] = [[Fraction(int(i == j)) for i in range(len(a_p))] for j in range(len(a_p))]

    def boundary_rank(p: int) -> int:
        """Rank of the boundary on Omega_p (augmentation at p = 0 when reduced)."""
        if p == 0:
            return 1 if (reduced and allowed[0] and omega[0]) else 0
        lower_index = {path: i for i, path in enumerate(allowed[p - 1])}
        images = []
        for v in omega[p]:
            img = [Fraction(0)] * len(allowed[p - 1])
            for j, path in enumerate(allowed[p]):
                if v[j]:
                    for face, s in _path_boundary(path).items():
                        # non-allowed faces cancel inside Omega_p
                        if face in lower_index:
                            img[lower_index[face]] += s * v[j]
            images.append(img)
        return linalg.rank(images) if images else 0

    ranks = {p: boundary_rank(p) for p in range(max_p + 2)}
    return [HomologySummary(len(omega[p]) - ranks[p] - ranks[p + 1]) for p in range(max_p + 1)]


@dataclass
class E2Row:
    p: int
    e2: Optional[int]
    reduced_betti: int
    equal: Optional[bool]
    note: str = ""


@dataclass
class E2Report:
    rows: List[E2Row]
    L: int
    N: int

    @property
    def equal(self) -> bool:
        return all(r.equal is not False for r in self.rows)

    def to_json(self) -> dict:
        return {"equal": self.equal, "L": self.L, "N": self.N,
                "rows": [{"p": r.p, "E2_p0": r.e2, "reduced_path_betti": r.reduced_betti,
                          "equal": r.equal, "note": r.note} for r in self.rows]}


def e2_vs_path_homology(d: Digraph, max_p: int, L: Optional[int] = None, N: Optional[int] = None) -> E2Report:
    """Compare ``E^2_{p,0}`` of the digraph's distance category with path homology.

    In degree 0 the spectral sequence sees the unaugmented complex, so the
    comparison there is with the reduced Betti number plus one.
    """
    L = max_p + 2 if L is None else L
    N = max_p + 2 if N is None else N
    if L < max_p + 2 or N < max_p + 2:
        raise PreconditionError("caps must satisfy L, N >= max_p + 2")
    fc = build_filtered_chain(d.category(), L, N)
    ph = path_homology(d, max_p)
    rows = []
    for p in range(max_p + 1):
        entry = fc.page(2, p, 0)
        expected = ph[p].betti + (1 if p == 0 and d.vertices else 0)
        if not entry.valid:
            rows.append(E2Row(p, None, ph[p].betti, None, entry.note))
            continue
        note = "degree 0 compares with reduced + 1" if p == 0 else ""
        rows.append(E2Row(p, entry.dimension, ph[p].betti, entry.dimension == expected, note))
    return E2Report(rows, L, N)


# ---------------------------------------------------------------------------
# r-homotopy invariance


def _nerve_image(f: Functor, g: PathGenerator) -> Optional[PathGenerator]:
    D = f.target
    image = tuple(f.mor_map[m] for m in g.morphisms)
    total = sum((D.degree(m) for m in image), Fraction(0))
    return PathGenerator(f.obj_map[g.start], image, f.obj_map[g.end], total)


def _push(f: Functor, src: FilteredChainQ, tgt: FilteredChainQ, vector: Sequence[Fraction], n: int) -> List[Fraction]:
    out = [Fraction(0)] * len(tgt.generators[n])
    for j, x in enumerate(vector):
        if not x:
            continue
        image = _nerve_image(f, src.generators[n][j])
        if tgt.normalized and any(f.target.is_identity(m) for m in image.morphisms):
            continue
        out[tgt.index[n][image]] += x
    return out


def validate_r_transformation(f: Functor, g: Functor, r: int, tau: Sequence[int]) -> None:
    """Check that ``tau`` defines a functor C x I_r -> D restricting to f and g."""
    C, D = f.source, f.target
    if g.source is not C or g.target is not D:
        raise PreconditionError("f and g must share source and target")
    if len(tau) != len(C):
        raise PreconditionError("tau needs one component per object")
    for a in range(len(C)):
        t = D.morphisms[tau[a]]
        if (t.source, t.target) != (f.obj_map[a], g.obj_map[a]):
            raise PreconditionError(f"component at {C.objects[a]!r} has the wrong endpoints", witness=a)
        if t.degree > r:
            raise PreconditionError(f"component at {C.objects[a]!r} has degree {t.degree} > {r}", witness=a)
    for m in C.morphisms:
        left = D.compose(g.mor_map[m.id], tau[m.source])
        right = D.compose(tau[m.target], f.mor_map[m.id])
        if left != right:
            raise PreconditionError(f"naturality square fails at morphism {m.id}", witness=m.id)
        if D.degree(left) > m.degree + r:
            raise PreconditionError(f"diagonal of the square at morphism {m.id} exceeds deg + r", witness=m.id)


@dataclass
class HomotopyRow:
    p: int
    q: int
    dimension: int
    equal: bool


@dataclass
class HomotopyReport:
    r: int
    page: int
    rows: List[HomotopyRow] = field(default_factory=list)

    @property
    def equal(self) -> bool:
        return all(row.equal for row in self.rows)

    def to_json(self) -> dict:
        return {"r": self.r, "page": self.page, "equal": self.equal,
                "rows": [{"p": x.p, "q": x.q, "dimension": x.dimension, "equal": x.equal} for x in self.rows]}


def r_homotopy_invariance_check(f: Functor, g: Functor, r: int, tau: Sequence[int], L: int, N: int) -> HomotopyReport:
    """Verify that f and g induce the same maps on every valid entry of E^{r+1}."""
    validate_r_transformation(f, g, r, tau)
    src = build_filtered_chain(f.source, L, N)
    tgt = build_filtered_chain(f.target, L, N)
    s = r + 1
    report = HomotopyReport(r, s)
    for p in range(L + 1):
        for n in range(N):
            q = n - p
            if not (src.is_valid(s, p, q) and tgt.is_valid(s, p, q)):
                continue
            cycles = src.cycles_basis(s, p, n)
            bounds = tgt.boundaries_projected(s, p, n)
            equal = True
            for z in cycles:
                diff = [x - y for x, y in zip(_push(f, src, tgt, z, n), _push(g, src, tgt, z, n))]
                proj = tgt.project(diff, p, n)
                if not linalg.in_span(bounds, proj, len(proj)):
                    equal = False
                    break
            report.rows.append(HomotopyRow(p, q, src.page(s, p, q).dimension, equal))
    return report
