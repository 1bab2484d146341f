"""Zeta matrices, weightings and magnitude, plus the classical invariants they recover."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from . import linalg
from .errors import HorizonError, NotInvertibleError, StrategyError, UsageError, ValidationError
from .fcat import (FCat, GroupPresentationBall, Poset, RankedPoset, from_finite_poset_unit, from_graph,
                   from_group, from_poset_ranked)
from .novikov import NSeries, dot, eval_at_one, exponent, invert


class SeriesMatrix:
    """Square matrix of :class:`NSeries` sharing one cutoff."""

    def __init__(self, objects: Sequence[Hashable], rows: Sequence[Sequence[NSeries]], cutoff):
        self.objects = tuple(objects)
        self.rows = [list(r) for r in rows]
        self.cutoff = exponent(cutoff)
        n = len(self.objects)
        if len(self.rows) != n or any(len(r) != n for r in self.rows):
            raise UsageError("series matrix must be square and match its index")
        if any(x.cutoff != self.cutoff for r in self.rows for x in r):
            raise UsageError("all entries of a series matrix share one cutoff")

    @classmethod
    def identity(cls, objects, cutoff) -> "SeriesMatrix":
        n = len(objects)
        one, zero = NSeries.one(cutoff), NSeries.zero(cutoff)
        return cls(objects, [[one if i == j else zero for j in range(n)] for i in range(n)], cutoff)

    def __len__(self):
        return len(self.objects)

    def __getitem__(self, key) -> NSeries:
        i, j = key
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, SeriesMatrix) and self.cutoff == other.cutoff and self.rows == other.rows

    def __add__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        return SeriesMatrix(self.objects, [[x + y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)],
                            self.cutoff)

    def __sub__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        return SeriesMatrix(self.objects, [[x - y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)],
                            self.cutoff)

    def __neg__(self):
        return SeriesMatrix(self.objects, [[-x for x in r] for r in self.rows], self.cutoff)

    def __matmul__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        columns = list(zip(*other.rows))
        out = [[dot(row, col, self.cutoff) for col in columns] for row in self.rows]
        return SeriesMatrix(self.objects, out, self.cutoff)

    def scalar_left(self, matrix: Sequence[Sequence[Fraction]]) -> "SeriesMatrix":
        """Product ``A @ self`` with a rational matrix ``A``."""
        n = len(self)
        zero = NSeries.zero(self.cutoff)
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = zero
                for k in range(n):
                    if matrix[i][k] and self.rows[k][j].terms:
                        acc = acc + self.rows[k][j].scale(matrix[i][k])
                row.append(acc)
            out.append(row)
        return SeriesMatrix(self.objects, out, self.cutoff)

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self.rows for x in r)

    def constant_matrix(self) -> List[List[Fraction]]:
        return [[x.constant_term for x in r] for r in self.rows]

    def row_sums(self) -> List[NSeries]:
        zero = NSeries.zero(self.cutoff)
        out = []
        for r in self.rows:
            acc = zero
            for x in r:
                acc = acc + x
            out.append(acc)
        return out

    def column_sums(self) -> List[NSeries]:
        n = len(self)
        zero = NSeries.zero(self.cutoff)
        out = []
        for j in range(n):
            acc = zero
            for i in range(n):
                acc = acc + self.rows[i][j]
            out.append(acc)
        return out

    def total(self) -> NSeries:
        acc = NSeries.zero(self.cutoff)
        for x in self.row_sums():
            acc = acc + x
        return acc

    def mark_exact(self) -> "SeriesMatrix":
        return SeriesMatrix(self.objects, [[x.mark_exact() for x in r] for r in self.rows], self.cutoff)

    def to_json(self) -> dict:
        return {"objects": list(self.objects), "entries": [[x.to_json() for x in r] for r in self.rows]}


def zeta_matrix(c: FCat, cutoff) -> SeriesMatrix:
    cutoff = exponent(cutoff)
    n = len(c)
    rows = []
    for a in range(n):
        row = []
        for b in range(n):
            coeffs: Dict[Fraction, int] = {}
            for m in c.hom_ids(a, b):
                d = c.degree(m)
                coeffs[d] = coeffs.get(d, 0) + 1
            exact = all(d <= cutoff for d in coeffs)
            row.append(NSeries.from_dict(coeffs, cutoff, exact))
        rows.append(row)
    return SeriesMatrix(c.objects, rows, cutoff)


# ---------------------------------------------------------------------------
# classification


@dataclass
class Classification:
    finite: bool
    finite_type: bool
    uniform: bool
    epsilon: Optional[Fraction]
    tame: bool
    quasi_tame: bool
    all_degrees_zero: bool
    skeletal: bool
    has_nontrivial_endomorphism: bool
    finitely_many_paths: bool
    longest_path_degree: Optional[Fraction]
    longest_path_steps: Optional[int]
    degenerate_witness: Optional[Tuple] = None
    zero_cycle: Optional[List[int]] = None
    truncated_at: Optional[Fraction] = None

    def to_json(self) -> dict:
        def frac(x):
            return None if x is None else str(x)
        return {
            "finite": self.finite, "finite_type": self.finite_type,
            "uniform": self.uniform, "epsilon": frac(self.epsilon),
            "tame": self.tame, "quasi_tame": self.quasi_tame,
            "all_degrees_zero": self.all_degrees_zero, "skeletal": self.skeletal,
            "nontrivial_endomorphism": self.has_nontrivial_endomorphism,
            "finitely_many_nondegenerate_paths": self.finitely_many_paths,
            "longest_path_degree": frac(self.longest_path_degree),
            "longest_path_steps": self.longest_path_steps,
            "degenerate_witness": None if self.degenerate_witness is None else [str(x) for x in self.degenerate_witness],
            "zero_cycle": self.zero_cycle,
            "truncated_at": frac(self.truncated_at),
        }


def _find_cycle(n: int, edges: Dict[int, List[Tuple[int, int]]]) -> Optional[List[Tuple[int, int]]]:
    """Edges ``(morphism, source)`` along some directed cycle, or None."""
    state = [0] * n
    path: List[Tuple[int, int]] = []

    def visit(v):
        state[v] = 1
        for m, w in edges.get(v, ()):
            path.append((m, v))
            if state[w] == 1:
                start = next(i for i, (_, src) in enumerate(path) if src == w)
                del path[:start]
                return True
            if state[w] == 0 and visit(w):
                return True
            path.pop()
        state[v] = 2
        return False

    for v in range(n):
        if state[v] == 0 and visit(v):
            return list(path)
    return None


def classify(c: FCat) -> Classification:
    """Finiteness, uniformity and tameness of a finite (possibly truncated) category.

    For a finite category, non-degenerate paths of bounded length are finitely
    many exactly when the degree-0 non-identity morphisms contain no directed
    cycle; this is the tameness test used here.
    """
    n = len(c)
    nonid = [m for m in c.morphisms if not m.is_identity]
    epsilon = min((m.degree for m in nonid), default=None)
    uniform = epsilon is None or epsilon > 0
    zero_edges: Dict[int, List[Tuple[int, int]]] = {}
    for m in nonid:
        if m.degree == 0:
            zero_edges.setdefault(m.source, []).append((m.id, m.target))
    cycle = _find_cycle(n, zero_edges)
    tame = cycle is None
    all_zero = all(m.degree == 0 for m in c.morphisms)
    nontrivial_endo = any(m.source == m.target for m in nonid)
    skeletal = True
    witness = None
    for a in range(n):
        for b in range(a + 1, n):
            if c.hom_ids(a, b) and c.hom_ids(b, a):
                # isomorphisms of the degree-0 part
                if any(c.degree(f) == 0 and c.degree(g) == 0 and c.compose(g, f) == c.identity[a]
                       and c.compose(f, g) == c.identity[b] for f in c.hom_ids(a, b) for g in c.hom_ids(b, a)):
                    skeletal = False
                if c.metric_like and c.distance(a, b) == 0 and c.distance(b, a) == 0 and witness is None:
                    witness = (c.objects[a], c.objects[b])
    if witness is None and cycle is not None:
        witness = tuple(c.objects[src] for _, src in cycle)
    all_edges: Dict[int, List[Tuple[int, int]]] = {}
    for m in nonid:
        all_edges.setdefault(m.source, []).append((m.id, m.target))
    acyclic = _find_cycle(n, all_edges) is None
    longest_deg = longest_steps = None
    if acyclic:
        deg_memo: Dict[int, Fraction] = {}

        def heaviest(v) -> Fraction:
            if v not in deg_memo:
                deg_memo[v] = max((c.degree(m) + heaviest(w) for m, w in all_edges.get(v, ())),
                                  default=Fraction(0))
            return deg_memo[v]

        step_memo: Dict[int, int] = {}
        longest_deg = max((heaviest(v) for v in range(n)), default=Fraction(0))
        longest_steps = max((_longest_steps(v, all_edges, step_memo) for v in range(n)), default=0)
    return Classification(
        finite=True, finite_type=True, uniform=uniform, epsilon=epsilon, tame=tame, quasi_tame=tame,
        all_degrees_zero=all_zero, skeletal=skeletal, has_nontrivial_endomorphism=nontrivial_endo,
        finitely_many_paths=acyclic, longest_path_degree=longest_deg, longest_path_steps=longest_steps,
        degenerate_witness=None if tame else witness,
        zero_cycle=None if cycle is None else [m for m, _ in cycle], truncated_at=c.horizon,
    )


def _longest_steps(v, edges, memo) -> int:
    if v not in memo:
        memo[v] = max((1 + _longest_steps(w, edges, memo) for _, w in edges.get(v, ())), default=0)
    return memo[v]


# ---------------------------------------------------------------------------
# inversion


def _geometric(x: SeriesMatrix, tail: SeriesMatrix) -> SeriesMatrix:
    """Sum of (-x)^k @ tail over k >= 0; x must have only positive exponents."""
    result = tail
    power = tail
    neg = -x
    while True:
        power = neg @ power
        if power.is_zero():
            return result + power  # a power that vanished by truncation makes the sum inexact
        result = result + power


def zeta_inverse(z: SeriesMatrix, strategy: str = "auto") -> SeriesMatrix:
    """Inverse of a zeta matrix modulo q^{>cutoff}.

    ``neumann`` sums (1 - z)^n and requires the constant term of ``z`` to be the
    identity (a uniform category). ``constant_term_lu`` inverts the constant
    term over Q and corrects with a geometric series. ``auto`` picks the first
    applicable one.
    """
    n = len(z)
    const = z.constant_matrix()
    unit_const = all(const[i][j] == (1 if i == j else 0) for i in range(n) for j in range(n))
    if strategy == "auto":
        strategy = "neumann" if unit_const else "constant_term_lu"
    ident = SeriesMatrix.identity(z.objects, z.cutoff)
    if strategy == "neumann":
        if not unit_const:
            raise StrategyError("Neumann series needs every non-identity morphism to have positive degree")
        # sum_k (1 - z)^k = sum_k (-(z - 1))^k
        return _geometric(z - ident, ident)
    if strategy == "constant_term_lu":
        inv0, kernel = linalg.inverse(const)
        if inv0 is None:
            raise NotInvertibleError("constant term of the zeta matrix is singular", witness=kernel)
        inv0_series = SeriesMatrix(z.objects, [[NSeries.constant(x, z.cutoff) for x in r] for r in inv0], z.cutoff)
        const_series = SeriesMatrix(z.objects, [[NSeries.constant(x, z.cutoff) for x in r] for r in const],
                                    z.cutoff)
        x = (z - const_series).scalar_left(inv0)
        return _geometric(x, inv0_series)
    raise UsageError(f"unknown inversion strategy {strategy!r}")


def _inverse_for(c: FCat, cutoff, strategy: str) -> Tuple[SeriesMatrix, Classification]:
    cls = classify(c)
    inv = zeta_inverse(zeta_matrix(c, cutoff), strategy)
    exact = cls.all_degrees_zero or (
        cls.finitely_many_paths and c.horizon is None and cls.longest_path_degree <= exponent(cutoff))
    return (inv.mark_exact() if exact else inv), cls


@dataclass
class WeightVector:
    objects: Tuple[Hashable, ...]
    values: List[NSeries]
    side: str
    horizon: Fraction
    object_horizons: List[Fraction] = field(default_factory=list)

    def __getitem__(self, i) -> NSeries:
        return self.values[i]

    def at(self, label) -> NSeries:
        return self.values[self.objects.index(label)]

    def to_json(self) -> dict:
        return {
            "side": self.side,
            "horizon": str(self.horizon),
            "values": [{"object": _label_text(o), "series": str(v), "horizon": str(h)}
                       for o, v, h in zip(self.objects, self.values, self.object_horizons)],
        }


def _label_text(label) -> str:
    if isinstance(label, tuple):
        return "(" + ",".join(_label_text(x) for x in label) + ")"
    return str(label)


def _weights(c: FCat, cutoff, strategy: str, side: str) -> WeightVector:
    cutoff = exponent(cutoff)
    inv, _ = _inverse_for(c, cutoff, strategy)
    values = inv.row_sums() if side == "weighting" else inv.column_sums()
    if c.horizon is None:
        horizon = cutoff
        per_object = [cutoff] * len(c)
    else:
        horizon = min(cutoff, c.horizon)
        per_object = [min(cutoff, c.object_horizon(a)) for a in range(len(c))]
    return WeightVector(c.objects, values, side, horizon, per_object)


def weighting(c: FCat, cutoff, strategy: str = "auto") -> WeightVector:
    """Row sums of the inverse zeta matrix: ``k^a = sum_b zeta^{-1}(a, b)``."""
    return _weights(c, cutoff, strategy, "weighting")


def coweighting(c: FCat, cutoff, strategy: str = "auto") -> WeightVector:
    return _weights(c, cutoff, strategy, "coweighting")


def magnitude(c: FCat, cutoff, strategy: str = "auto") -> NSeries:
    inv, _ = _inverse_for(c, cutoff, strategy)
    return inv.total()


def path_expansion_magnitude(c: FCat, cutoff, start: Optional[int] = None) -> NSeries:
    """Alternating sum over explicitly enumerated non-degenerate paths.

    With ``start`` given, only paths leaving that object are counted, which
    gives the weighting at ``start``.
    """
    cutoff = exponent(cutoff)
    cls = classify(c)
    if not cls.uniform:
        raise StrategyError("path expansion needs a uniform category")
    out_by_object = [[m for m in c.out_morphisms(a) if not c.is_identity(m)] for a in range(len(c))]
    coeffs: Dict[Fraction, int] = {}

    def extend(obj: int, total: Fraction, length: int):
        sign = -1 if length % 2 else 1
        coeffs[total] = coeffs.get(total, 0) + sign
        for m in out_by_object[obj]:
            t = total + c.degree(m)
            if t <= cutoff:
                extend(c.target(m), t, length + 1)

    starts = range(len(c)) if start is None else [start]
    for a in starts:
        extend(a, Fraction(0), 0)
    return NSeries.from_dict(coeffs, cutoff)


# ---------------------------------------------------------------------------
# posets


def mobius_direct(p: Poset) -> List[List[int]]:
    """Inverse of the 0/1 incidence matrix, by rational Gaussian elimination."""
    n = len(p)
    xi = [[1 if p.leq(i, j) else 0 for j in range(n)] for i in range(n)]
    inv, _ = linalg.inverse(xi)
    if inv is None:  # unreachable: the incidence matrix is unitriangular
        raise NotInvertibleError("incidence matrix is singular")
    return [[int(x) for x in row] for row in inv]


def mobius(p: Poset) -> List[List[int]]:
    """Möbius function as ``zeta^{-1}`` of the degree-1 encoding evaluated at q = 1."""
    n = len(p)
    c = from_finite_poset_unit(p)
    cutoff = max(n - 1, 0)
    inv, _ = _inverse_for(c, cutoff, "neumann")
    mu = []
    for i in range(n):
        row = []
        for j in range(n):
            value = eval_at_one(inv[i, j])
            if value.denominator != 1:
                raise ValidationError("Möbius value is not an integer")
            row.append(int(value))
        mu.append(row)
    if mu != mobius_direct(p):
        raise ValidationError("Möbius function disagrees with direct inversion")
    return mu


@dataclass
class PoincareResult:
    weighting: NSeries          # k^{0} of the d_phi metrization
    poincare: NSeries           # pi(q) = sum_a mu(0, a) (-q)^{phi(a)}
    agree: bool                 # pi(-q) == k^{0}

    def to_json(self) -> dict:
        return {"weighting_at_bottom": str(self.weighting), "poincare": str(self.poincare),
                "poincare_at_minus_q": str(self.poincare.negate_variable()), "agree": self.agree}


def poincare_polynomial(rp: RankedPoset) -> PoincareResult:
    cutoff = max(rp.phi) if rp.phi else 0
    c = from_poset_ranked(rp)
    bottom = rp.bottom
    inv, _ = _inverse_for(c, cutoff, "auto")
    k0 = inv.row_sums()[bottom]
    mu = mobius(rp.poset)
    coeffs: Dict[int, int] = {}
    for a in range(len(rp.poset)):
        e = rp.phi[a]
        coeffs[e] = coeffs.get(e, 0) + mu[bottom][a] * (-1) ** e
    pi = NSeries.from_dict(coeffs, cutoff, exact=True)
    return PoincareResult(k0, pi, pi.negate_variable() == k0)


# ---------------------------------------------------------------------------
# subspace arrangements


def _canonical_system(rows: List[List[Fraction]], dim: int):
    """Canonical key of the solution set of [A | b]; None means empty."""
    if not rows:
        return ()
    reduced, pivots = linalg.rref(rows, dim + 1)
    if dim in pivots:
        return None
    return tuple(tuple(r) for r in reduced)


@dataclass
class Arrangement:
    intersections: RankedPoset     # I(S): intersections ordered by reverse inclusion, rank = codim
    subsets: RankedPoset           # P(S): subsets of S, phi = codim of the intersection
    to_intersection: List[int]     # F: P(S) -> I(S)
    to_subset: List[int]           # G: I(S) -> P(S)


def subspace_arrangement(subspaces: Sequence[Sequence[Sequence]], dim: int) -> Arrangement:
    """Posets of a finite arrangement of affine subspaces of Q^dim.

    Each subspace is a list of equations ``[a_1, ..., a_dim, b]`` meaning
    ``a . x = b``. The empty intersection, if it occurs, gets codimension
    ``dim + 1``.
    """
    k = len(subspaces)
    systems = [[[Fraction(x) for x in eq] for eq in s] for s in subspaces]
    for s in systems:
        if any(len(eq) != dim + 1 for eq in s):
            raise ValidationError("each equation needs dim + 1 entries")
        if _canonical_system(s, dim) is None:
            raise ValidationError("arrangement members must be non-empty")
        if _canonical_system(s, dim) == ():
            raise ValidationError("arrangement members must be proper subspaces")

    def codim(key) -> int:
        if key is None:
            return dim + 1
        return len(key)

    subsets = [frozenset(t) for r in range(k + 1) for t in combinations(range(k), r)]
    keys = []
    for t in subsets:
        rows = [eq for i in sorted(t) for eq in systems[i]]
        keys.append(_canonical_system(rows, dim))

    def contains(big, small) -> bool:
        """Solution set of ``small`` lies inside that of ``big``."""
        if small is None:
            return True
        if big is None:
            return False
        if not big:
            return True
        return linalg.rank(list(small) + list(big)) == linalg.rank(list(small)) if small else False

    distinct = []
    for key in keys:
        if key not in distinct:
            distinct.append(key)

    def members(key) -> Tuple[int, ...]:
        return tuple(i for i in range(k) if contains(_canonical_system(systems[i], dim), key))

    i_labels = [members(key) for key in distinct]
    i_less = [(i_labels[a], i_labels[b]) for a in range(len(distinct)) for b in range(len(distinct))
              if a != b and contains(distinct[a], distinct[b])]
    inter = RankedPoset(Poset.from_relations(i_labels, i_less), tuple(codim(key) for key in distinct))
    p_labels = [tuple(sorted(t)) for t in subsets]
    p_less = [(p_labels[a], p_labels[b]) for a in range(len(subsets)) for b in range(len(subsets))
              if a != b and subsets[a] <= subsets[b]]
    subs = RankedPoset(Poset.from_relations(p_labels, p_less), tuple(codim(key) for key in keys))
    f_map = [distinct.index(key) for key in keys]
    g_map = [p_labels.index(lbl) for lbl in i_labels]
    return Arrangement(inter, subs, f_map, g_map)


def galois_hypotheses(arr: Arrangement) -> bool:
    """F -| G is a Galois connection with psi F = phi and phi G = psi."""
    P, Q = arr.subsets, arr.intersections
    for a in range(len(P.poset)):
        if Q.phi[arr.to_intersection[a]] != P.phi[a]:
            return False
        for y in range(len(Q.poset)):
            if Q.poset.leq(arr.to_intersection[a], y) != P.poset.leq(a, arr.to_subset[y]):
                return False
    return all(P.phi[arr.to_subset[y]] == Q.phi[y] for y in range(len(Q.poset)))


# ---------------------------------------------------------------------------
# groups


@dataclass
class GrowthResult:
    series: NSeries
    inverse: NSeries
    one_object_magnitude: Optional[NSeries]
    cayley_weighting: NSeries
    agree: bool

    def to_json(self) -> dict:
        return {"growth": str(self.series), "inverse": str(self.inverse),
                "one_object_magnitude": None if self.one_object_magnitude is None else str(self.one_object_magnitude),
                "cayley_weighting_at_identity": str(self.cayley_weighting), "agree": self.agree}


def growth_series(g: GroupPresentationBall, cutoff=None) -> GrowthResult:
    """Word-length generating function, its inverse, and two independent checks."""
    cutoff = exponent(g.radius if cutoff is None else cutoff)
    closed = g.whole_group_in_ball()
    if not closed and g.radius < cutoff:
        raise HorizonError(f"radius {g.radius} is below the cutoff {cutoff}")
    wl = g.ball()
    coeffs: Dict[int, int] = {}
    for length in wl.values():
        coeffs[length] = coeffs.get(length, 0) + 1
    series = NSeries.from_dict(coeffs, cutoff)
    inverse = invert(series)
    one_obj, cayley = from_group(g, allow_truncation=True)
    mag = magnitude(one_obj, cutoff)
    graph = from_graph(cayley, None if closed else g.radius)
    k = weighting(graph, cutoff)
    at_identity = k.at(g.identity_element)
    agree = mag == inverse and at_identity == inverse
    return GrowthResult(series, inverse, mag, at_identity, agree)
