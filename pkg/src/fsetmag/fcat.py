"""Categories enriched over filtered sets, with validated builders.

An :class:`FCat` has finitely many objects and morphisms. Every morphism carries
a non-negative rational degree, and composition satisfies
``deg(g o f) <= deg f + deg g``. Metric-like categories (at most one morphism
per hom-set) store no composition table because composition is forced.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .errors import HorizonError, UsageError, ValidationError
from .novikov import exponent

INF = None  # absent morphism / infinite distance


@dataclass(frozen=True)
class Morphism:
    id: int
    source: int
    target: int
    degree: Fraction
    is_identity: bool = False


class FCat:
    """A finite category enriched over filtered sets.

    Args:
        objects: object labels, indexed by position.
        morphisms: records whose ``id`` equals their position.
        composition: map ``(g, f) -> g o f`` over all composable pairs, or
            ``None`` for metric-like categories where composition is forced.
        horizon: truncation radius for balls cut out of infinite objects.
        centers: object indices the truncation balls are centred on.
    """

    def __init__(self, objects: Sequence[Hashable], morphisms: Sequence[Morphism],
                 composition: Optional[Dict[Tuple[int, int], int]] = None, *,
                 horizon=None, centers: Sequence[int] = (), validate: bool = True):
        self.objects = tuple(objects)
        self.morphisms = tuple(morphisms)
        self._comp = None if composition is None else dict(composition)
        self.horizon = None if horizon is None else exponent(horizon)
        self.centers = tuple(centers)
        self.index = {label: i for i, label in enumerate(self.objects)}
        if len(self.index) != len(self.objects):
            raise ValidationError("duplicate object labels")
        hom: Dict[Tuple[int, int], List[int]] = {}
        identity: List[Optional[int]] = [None] * len(self.objects)
        for pos, m in enumerate(self.morphisms):
            if m.id != pos:
                raise ValidationError(f"morphism id {m.id} stored at position {pos}", witness=m)
            if not (0 <= m.source < len(self.objects) and 0 <= m.target < len(self.objects)):
                raise ValidationError(f"morphism {m.id} has an unknown endpoint", witness=m)
            if m.degree < 0:
                raise ValidationError(f"morphism {m.id} has negative degree", witness=m)
            hom.setdefault((m.source, m.target), []).append(m.id)
            if m.is_identity:
                if m.source != m.target:
                    raise ValidationError(f"identity {m.id} is not an endomorphism", witness=m)
                if m.degree != 0:
                    raise ValidationError(f"identity {m.id} has nonzero degree", witness=m)
                if identity[m.source] is not None:
                    raise ValidationError(f"object {self.objects[m.source]!r} has two identities", witness=m)
                identity[m.source] = m.id
        for a, ident in enumerate(identity):
            if ident is None:
                raise ValidationError(f"object {self.objects[a]!r} has no identity", witness=a)
        self.hom = {k: tuple(v) for k, v in hom.items()}
        self.identity = tuple(identity)
        self.metric_like = all(len(v) == 1 for v in self.hom.values())
        if self._comp is None and not self.metric_like:
            raise ValidationError("a composition table is required when hom-sets have several morphisms")
        if validate:
            self.validate()

    # -- basic queries ----------------------------------------------------

    def __len__(self):
        return len(self.objects)

    def __repr__(self):
        return f"FCat({len(self.objects)} objects, {len(self.morphisms)} morphisms)"

    def hom_ids(self, a: int, b: int) -> Tuple[int, ...]:
        return self.hom.get((a, b), ())

    def degree(self, m: int) -> Fraction:
        return self.morphisms[m].degree

    def source(self, m: int) -> int:
        return self.morphisms[m].source

    def target(self, m: int) -> int:
        return self.morphisms[m].target

    def is_identity(self, m: int) -> bool:
        return self.morphisms[m].is_identity

    def non_identities(self) -> List[int]:
        return [m.id for m in self.morphisms if not m.is_identity]

    def out_morphisms(self, a: int) -> List[int]:
        return [m for b in range(len(self.objects)) for m in self.hom_ids(a, b)]

    def compose(self, g: int, f: int) -> int:
        """``g o f`` (first ``f``, then ``g``)."""
        mf, mg = self.morphisms[f], self.morphisms[g]
        if mf.target != mg.source:
            raise UsageError(f"morphisms {f} and {g} are not composable")
        if mf.is_identity:
            return g
        if mg.is_identity:
            return f
        if self._comp is None:
            found = self.hom_ids(mf.source, mg.target)
            if not found:
                raise HorizonError(f"composite of {f} and {g} lies outside the materialized ball")
            return found[0]
        try:
            return self._comp[(g, f)]
        except KeyError:
            raise HorizonError(f"composite of {f} and {g} lies outside the materialized ball") from None

    def distance(self, a: int, b: int) -> Optional[Fraction]:
        """Degree of the unique morphism a -> b, or None (infinite)."""
        if not self.metric_like:
            raise UsageError("distance is only defined for metric-like categories")
        found = self.hom_ids(a, b)
        return self.morphisms[found[0]].degree if found else None

    def distance_matrix(self) -> List[List[Optional[Fraction]]]:
        n = len(self.objects)
        return [[self.distance(a, b) for b in range(n)] for a in range(n)]

    def is_symmetric(self) -> bool:
        n = len(self.objects)
        return self.metric_like and all(self.distance(a, b) == self.distance(b, a)
                                        for a in range(n) for b in range(n))

    def object_horizon(self, a: int) -> Optional[Fraction]:
        """Radius up to which data seen from object ``a`` is exact, or None if untruncated."""
        if self.horizon is None:
            return None
        if a in self.centers:
            return self.horizon
        best = None
        for c in self.centers:
            d = self.distance(c, a) if self.metric_like else None
            if d is not None and d <= self.horizon:
                slack = self.horizon - d
                best = slack if best is None or slack > best else best
        return best if best is not None else Fraction(0)

    # -- validation -------------------------------------------------------

    def validate(self) -> None:
        if self._comp is None:
            self._validate_metric()
        else:
            self._validate_table()

    def _validate_metric(self) -> None:
        n = len(self.objects)
        for (a, b), ids in self.hom.items():
            if a == b and not self.morphisms[ids[0]].is_identity:
                raise ValidationError(f"endomorphism of {self.objects[a]!r} is not the identity", witness=(a,))
        for a, b, c in iproduct(range(n), repeat=3):
            dab, dbc = self.distance(a, b), self.distance(b, c)
            if dab is None or dbc is None:
                continue
            dac = self.distance(a, c)
            if dac is None or dac > dab + dbc:
                labels = (self.objects[a], self.objects[b], self.objects[c])
                raise ValidationError(f"triangle inequality fails at {labels}", witness=labels)

    def _validate_table(self) -> None:
        comp = self._comp
        mors = self.morphisms
        for (g, f), h in comp.items():
            if not (0 <= g < len(mors) and 0 <= f < len(mors) and 0 <= h < len(mors)):
                raise ValidationError(f"composition entry {(g, f)} -> {h} names an unknown morphism", witness=(g, f))
            mf, mg, mh = mors[f], mors[g], mors[h]
            if mf.target != mg.source:
                raise ValidationError(f"composition entry for non-composable pair {(g, f)}", witness=(g, f))
            if (mh.source, mh.target) != (mf.source, mg.target):
                raise ValidationError(f"composite of {(g, f)} has wrong endpoints", witness=(g, f))
            if mh.degree > mf.degree + mg.degree:
                raise ValidationError(f"deg({g} o {f}) exceeds deg {f} + deg {g}", witness=(g, f))
        # totality and unit laws
        for f in mors:
            for g_id in self.out_morphisms(f.target):
                g = mors[g_id]
                key = (g.id, f.id)
                if key not in comp:
                    if self.horizon is not None and f.degree + g.degree > self.horizon:
                        continue
                    raise ValidationError(f"composition table misses {key}", witness=key)
                if f.is_identity and comp[key] != g.id:
                    raise ValidationError(f"left unit law fails for {g.id}", witness=key)
                if g.is_identity and comp[key] != f.id:
                    raise ValidationError(f"right unit law fails for {f.id}", witness=key)
        # associativity on every composable triple
        for f in mors:
            for g_id in self.out_morphisms(f.target):
                gf = comp.get((g_id, f.id))
                for h_id in self.out_morphisms(mors[g_id].target):
                    hg = comp.get((h_id, g_id))
                    if gf is None or hg is None:
                        continue
                    left = comp.get((h_id, gf))
                    right = comp.get((hg, f.id))
                    if left is None or right is None:
                        continue
                    if left != right:
                        raise ValidationError(f"associativity fails for ({h_id}, {g_id}, {f.id})",
                                              witness=(h_id, g_id, f.id))

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        data = {
            "kind": "category",
            "objects": [_label_json(o) for o in self.objects],
            "morphisms": [
                {"id": m.id, "source": m.source, "target": m.target,
                 "degree": [m.degree.numerator, m.degree.denominator], "identity": m.is_identity}
                for m in self.morphisms
            ],
        }
        if self._comp is not None:
            data["composition"] = [[g, f, h] for (g, f), h in sorted(self._comp.items())]
        if self.horizon is not None:
            data["horizon"] = [self.horizon.numerator, self.horizon.denominator]
            data["centers"] = list(self.centers)
        return data

    @classmethod
    def from_json(cls, data: dict) -> "FCat":
        objects = [_label_from_json(o) for o in data["objects"]]
        morphisms = [Morphism(int(m["id"]), int(m["source"]), int(m["target"]),
                              exponent(Fraction(*m["degree"])), bool(m.get("identity", False)))
                     for m in data["morphisms"]]
        comp = None
        if "composition" in data:
            comp = {(int(g), int(f)): int(h) for g, f, h in data["composition"]}
        horizon = Fraction(*data["horizon"]) if "horizon" in data else None
        return cls(objects, morphisms, comp, horizon=horizon, centers=data.get("centers", ()))

    def structure_key(self):
        """Hashable summary used to compare categories for equality."""
        comp = None if self._comp is None else tuple(sorted(self._comp.items()))
        return (self.objects, self.morphisms, comp, self.horizon, self.centers)

    def __eq__(self, other):
        return isinstance(other, FCat) and self.structure_key() == other.structure_key()

    def __hash__(self):
        return hash(self.structure_key())


def _label_json(label):
    if isinstance(label, tuple):
        return [_label_json(x) for x in label]
    return label


def _label_from_json(value):
    if isinstance(value, list):
        return tuple(_label_from_json(x) for x in value)
    return value


# ---------------------------------------------------------------------------
# metric spaces


def _parse_distance(value) -> Optional[Fraction]:
    if value is None:
        return None
    if isinstance(value, float):
        if value == float("inf"):
            return None
        raise UsageError("floating-point distances are not accepted; use exact rationals")
    if isinstance(value, str) and value.strip().lower() in ("inf", "∞"):
        return None
    return exponent(value)


def from_metric(matrix: Sequence[Sequence], labels: Optional[Sequence[Hashable]] = None, *,
                horizon=None, centers: Sequence[int] = ()) -> FCat:
    """Metric-like category with one morphism ``a -> b`` of degree ``d(a, b)`` per finite entry."""
    n = len(matrix)
    if labels is None:
        labels = list(range(n))
    if len(labels) != n or any(len(row) != n for row in matrix):
        raise ValidationError("distance matrix must be square and match the labels")
    morphisms = []
    for a in range(n):
        for b in range(n):
            d = _parse_distance(matrix[a][b])
            if a == b:
                if d != 0:
                    raise ValidationError(f"d({labels[a]!r}, {labels[a]!r}) must be 0", witness=(labels[a],))
                morphisms.append(Morphism(len(morphisms), a, a, Fraction(0), True))
            elif d is not None:
                morphisms.append(Morphism(len(morphisms), a, b, d, False))
    return FCat(labels, morphisms, None, horizon=horizon, centers=centers)


def product(x: FCat, y: FCat) -> FCat:
    """The l1 product of two metric-like categories, objects labelled by pairs."""
    if not (x.metric_like and y.metric_like):
        raise UsageError("product is implemented for metric-like categories")
    labels = [(a, b) for a in x.objects for b in y.objects]
    n, m = len(x), len(y)
    matrix = []
    for a, b in iproduct(range(n), range(m)):
        row = []
        for a2, b2 in iproduct(range(n), range(m)):
            da, db = x.distance(a, a2), y.distance(b, b2)
            row.append(None if da is None or db is None else da + db)
        matrix.append(row)
    return from_metric(matrix, labels)


# ---------------------------------------------------------------------------
# graphs


@dataclass
class LocallyFiniteGraph:
    """A graph given by a deterministic neighbour oracle.

    ``vertices`` is set for finite graphs and fixes the object order; infinite
    graphs are explored from ``base`` and ordered by discovery.
    """

    neighbors: Callable[[Hashable], Iterable[Hashable]]
    base: Tuple[Hashable, ...]
    symmetric: bool = True
    vertices: Optional[Tuple[Hashable, ...]] = None

    def __post_init__(self):
        self.base = tuple(self.base)
        if not self.base:
            raise ValidationError("a graph needs at least one base vertex")

    @classmethod
    def from_edges(cls, vertices: Sequence[Hashable], edges: Iterable[Tuple[Hashable, Hashable]],
                   directed: bool = False) -> "LocallyFiniteGraph":
        adjacency: Dict[Hashable, List[Hashable]] = {v: [] for v in vertices}
        for u, v in edges:
            for w in (u, v):
                if w not in adjacency:
                    raise ValidationError(f"edge endpoint {w!r} is not a vertex", witness=(u, v))
            if u == v:
                raise ValidationError(f"loop at {u!r}", witness=(u, v))
            if v not in adjacency[u]:
                adjacency[u].append(v)
            if not directed and u not in adjacency[v]:
                adjacency[v].append(u)
        verts = tuple(vertices)
        return cls(lambda x: adjacency[x], verts if verts else (), not directed, verts)

    def edges(self) -> List[Tuple[Hashable, Hashable]]:
        if self.vertices is None:
            raise UsageError("edge listing needs a finite graph")
        out = []
        for u in self.vertices:
            for v in self.neighbors(u):
                if self.symmetric and (v, u) in out:
                    continue
                out.append((u, v))
        return out

    def _checked_neighbors(self, v) -> List[Hashable]:
        nbrs = list(self.neighbors(v))
        if self.symmetric:
            for u in nbrs:
                if v not in list(self.neighbors(u)):
                    raise ValidationError(f"asymmetric adjacency between {v!r} and {u!r}", witness=(v, u))
        return nbrs


def _bfs(g: LocallyFiniteGraph, start, limit: Optional[int], targets=None) -> Dict[Hashable, int]:
    dist = {start: 0}
    queue = deque([start])
    remaining = None if targets is None else set(targets) - {start}
    while queue:
        v = queue.popleft()
        if limit is not None and dist[v] >= limit:
            continue
        if remaining is not None and not remaining:
            break
        for u in g._checked_neighbors(v):
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
                if remaining is not None:
                    remaining.discard(u)
    return dist


def from_graph(g: LocallyFiniteGraph, radius=None, *, search_depth: Optional[int] = None) -> FCat:
    """Path-metric category on the union of closed balls of ``radius`` around the base.

    Distances between the selected vertices are the true graph distances, found
    by breadth-first search through the oracle up to ``search_depth`` steps
    (default: twice the radius per base vertex; unlimited for finite graphs).
    Pairs not joined within that depth get no morphism. ``radius=None`` takes a finite graph whole.
    """
    if radius is None:
        if g.vertices is None:
            raise UsageError("an infinite graph needs a finite radius")
        selected = list(g.vertices)
        horizon = None
        limit = None
    else:
        r = exponent(radius)
        rad = int(r)  # path lengths are integers
        ball: Dict[Hashable, int] = {}
        for b in g.base:
            for v, d in _bfs(g, b, rad).items():
                if v not in ball or d < ball[v]:
                    ball[v] = d
        order = {v: i for i, v in enumerate(g.vertices)} if g.vertices is not None else None
        if order is not None:
            selected = sorted(ball, key=lambda v: order[v])
        else:
            selected = list(ball)  # insertion order = discovery order
        if g.vertices is not None and len(selected) == len(g.vertices):
            horizon = None
        else:
            horizon = r
        if g.vertices is not None:
            limit = None
        else:
            limit = search_depth if search_depth is not None else 2 * rad * len(g.base)
    index = {v: i for i, v in enumerate(selected)}
    matrix: List[List[Optional[Fraction]]] = []
    for v in selected:
        reach = _bfs(g, v, limit, selected)
        matrix.append([Fraction(reach[u]) if u in reach else None for u in selected])
    centers = [index[b] for b in g.base if b in index] if horizon is not None else []
    return from_metric(matrix, selected, horizon=horizon, centers=centers)


# ---------------------------------------------------------------------------
# posets


@dataclass(frozen=True)
class Poset:
    """A finite poset stored as the set of strict relations ``(i, j)`` meaning i < j."""

    elements: Tuple[Hashable, ...]
    less: frozenset

    @classmethod
    def from_relations(cls, elements: Sequence[Hashable], relations: Iterable[Tuple[Hashable, Hashable]]) -> "Poset":
        elements = tuple(elements)
        index = {e: i for i, e in enumerate(elements)}
        if len(index) != len(elements):
            raise ValidationError("duplicate poset elements")
        up: Dict[int, set] = {i: set() for i in range(len(elements))}
        for a, b in relations:
            if a not in index or b not in index:
                raise ValidationError(f"relation {a!r} < {b!r} names an unknown element", witness=(a, b))
            if a == b:
                raise ValidationError(f"strict relation {a!r} < {a!r}", witness=(a, b))
            up[index[a]].add(index[b])
        closure = set()
        for i in range(len(elements)):
            stack = list(up[i])
            seen = set()
            while stack:
                j = stack.pop()
                if j in seen:
                    continue
                seen.add(j)
                stack.extend(up[j])
            if i in seen:
                raise ValidationError(f"relations contain a cycle through {elements[i]!r}", witness=(elements[i],))
            closure.update((i, j) for j in seen)
        return cls(elements, frozenset(closure))

    def __len__(self):
        return len(self.elements)

    def leq(self, i: int, j: int) -> bool:
        return i == j or (i, j) in self.less

    def covers(self) -> List[Tuple[int, int]]:
        out = []
        for i, j in sorted(self.less):
            if not any((i, k) in self.less and (k, j) in self.less for k in range(len(self.elements))):
                out.append((i, j))
        return out

    def minimum(self) -> Optional[int]:
        mins = [i for i in range(len(self)) if all(self.leq(i, j) for j in range(len(self)))]
        return mins[0] if mins else None


@dataclass(frozen=True)
class RankedPoset:
    poset: Poset
    phi: Tuple[int, ...]

    def __post_init__(self):
        p = self.poset
        if len(self.phi) != len(p):
            raise ValidationError("rank map must assign a value to every element")
        if any((not isinstance(v, int)) or v < 0 for v in self.phi):
            raise ValidationError("rank values must be non-negative integers")
        bottom = p.minimum()
        if bottom is None:
            raise ValidationError("ranked poset needs a unique minimum")
        if self.phi[bottom] != 0:
            raise ValidationError("rank of the minimum must be 0", witness=(p.elements[bottom],))
        for i, j in p.less:
            if self.phi[i] > self.phi[j]:
                raise ValidationError(f"rank map decreases along {p.elements[i]!r} < {p.elements[j]!r}",
                                      witness=(p.elements[i], p.elements[j]))

    @property
    def bottom(self) -> int:
        return self.poset.minimum()

    @classmethod
    def from_covers(cls, elements, covers, ranks: Dict[Hashable, int]) -> "RankedPoset":
        p = Poset.from_relations(elements, covers)
        missing = [e for e in p.elements if e not in ranks]
        if missing:
            raise ValidationError(f"no rank given for {missing[0]!r}", witness=(missing[0],))
        return cls(p, tuple(int(ranks[e]) for e in p.elements))


def from_poset_ranked(p: RankedPoset) -> FCat:
    """Generalized metric d(a, b) = phi(b) - phi(a) when a <= b, infinite otherwise."""
    n = len(p.poset)
    matrix = [[Fraction(p.phi[j] - p.phi[i]) if p.poset.leq(i, j) else None for j in range(n)]
              for i in range(n)]
    return from_metric(matrix, p.poset.elements)


def from_finite_poset_unit(p: Poset) -> FCat:
    """Every strict relation becomes a morphism of degree 1."""
    n = len(p)
    matrix = [[Fraction(0) if i == j else (Fraction(1) if (i, j) in p.less else None) for j in range(n)]
              for i in range(n)]
    return from_metric(matrix, p.elements)


# ---------------------------------------------------------------------------
# finite categories


def from_finite_category(objects: Sequence[Hashable], morphisms: Sequence[Tuple[Hashable, Hashable, object, bool]],
                         composition: Iterable[Tuple[int, int, int]]) -> FCat:
    """Validated category from a user table.

    ``morphisms`` lists ``(source label, target label, degree, is_identity)``;
    ``composition`` lists triples ``(g, f, h)`` meaning ``g o f = h``. The table
    must cover every composable pair, identities included.
    """
    index = {o: i for i, o in enumerate(objects)}
    records = []
    for pos, (s, t, deg, ident) in enumerate(morphisms):
        if s not in index or t not in index:
            raise ValidationError(f"morphism {pos} names an unknown object", witness=pos)
        records.append(Morphism(pos, index[s], index[t], exponent(deg), bool(ident)))
    comp = {}
    for g, f, h in composition:
        if (g, f) in comp and comp[(g, f)] != h:
            raise ValidationError(f"composition of {(g, f)} given twice", witness=(g, f))
        comp[(g, f)] = h
    return FCat(objects, records, comp)


# ---------------------------------------------------------------------------
# groups


class GroupPresentationBall:
    """A finitely generated group with a built-in element enumerator.

    ``kind`` is one of ``"table"`` (finite multiplication table), ``"free"``
    (free group on ``rank`` letters), ``"free_abelian"`` (Z^rank) or
    ``"cyclic"`` (Z/order). Elements are: table labels; reduced words as tuples
    of nonzero ints (``-i`` is the inverse of letter ``i``); int tuples; ints.
    """

    def __init__(self, kind: str, generators: Sequence, radius: int, *, rank: int = 0, order: int = 0,
                 elements: Sequence = (), table: Optional[Dict[Tuple, Hashable]] = None,
                 identity: Hashable = None, symmetric: bool = True):
        self.kind = kind
        self.rank = rank
        self.order = order
        self.radius = int(radius)
        self.symmetric = symmetric
        if self.radius < 0:
            raise ValidationError("radius must be non-negative")
        if kind == "table":
            self.elements = tuple(elements)
            self.table = dict(table or {})
            self.identity_element = identity
            self._validate_table()
        elif kind == "free":
            if rank < 0:
                raise ValidationError("rank must be non-negative")
            self.identity_element = ()
        elif kind == "free_abelian":
            if rank < 0:
                raise ValidationError("rank must be non-negative")
            self.identity_element = (0,) * rank
        elif kind == "cyclic":
            if order < 1:
                raise ValidationError("cyclic order must be positive")
            self.identity_element = 0
        else:
            raise ValidationError(f"unknown group kind {kind!r}")
        gens = [self._normalize(s) for s in generators]
        if symmetric:
            full = []
            for s in gens:
                for t in (s, self.inverse(s)):
                    if t not in full and t != self.identity_element:
                        full.append(t)
            gens = full
        self.generators = tuple(gens)

    def _normalize(self, g):
        if self.kind == "cyclic":
            return int(g) % self.order
        if self.kind == "free_abelian":
            g = tuple(int(x) for x in g)
            if len(g) != self.rank:
                raise ValidationError(f"element {g!r} has the wrong rank")
            return g
        if self.kind == "free":
            word = tuple(int(x) for x in g)
            if any(x == 0 or abs(x) > self.rank for x in word):
                raise ValidationError(f"word {g!r} uses an unknown letter")
            return self.multiply((), word)
        if g not in self.elements:
            raise ValidationError(f"{g!r} is not a group element")
        return g

    def _validate_table(self):
        els = self.elements
        if self.identity_element not in els:
            raise ValidationError("identity is not an element")
        for a in els:
            for b in els:
                if (a, b) not in self.table or self.table[(a, b)] not in els:
                    raise ValidationError(f"multiplication table not closed at {(a, b)}", witness=(a, b))
        e = self.identity_element
        for a in els:
            if self.table[(e, a)] != a or self.table[(a, e)] != a:
                raise ValidationError(f"identity law fails at {a!r}", witness=(a,))
            if not any(self.table[(a, b)] == e for b in els):
                raise ValidationError(f"{a!r} has no inverse", witness=(a,))
        for a, b, c in iproduct(els, repeat=3):
            if self.table[(self.table[(a, b)], c)] != self.table[(a, self.table[(b, c)])]:
                raise ValidationError(f"associativity fails at {(a, b, c)}", witness=(a, b, c))

    @property
    def is_finite(self) -> bool:
        return self.kind in ("table", "cyclic") or (self.kind in ("free", "free_abelian") and self.rank == 0)

    def multiply(self, g, h):
        if self.kind == "cyclic":
            return (g + h) % self.order
        if self.kind == "free_abelian":
            return tuple(x + y for x, y in zip(g, h))
        if self.kind == "free":
            out = list(g)
            for x in h:
                if out and out[-1] == -x:
                    out.pop()
                else:
                    out.append(x)
            return tuple(out)
        return self.table[(g, h)]

    def inverse(self, g):
        if self.kind == "cyclic":
            return (-g) % self.order
        if self.kind == "free_abelian":
            return tuple(-x for x in g)
        if self.kind == "free":
            return tuple(-x for x in reversed(g))
        return next(b for b in self.elements if self.table[(g, b)] == self.identity_element)

    def neighbors(self, g) -> List:
        return [self.multiply(g, s) for s in self.generators]

    def ball(self) -> Dict[Hashable, int]:
        """Word lengths of all elements of length at most ``radius``, in BFS order."""
        wl = {self.identity_element: 0}
        queue = deque([self.identity_element])
        while queue:
            g = queue.popleft()
            if wl[g] >= self.radius:
                continue
            for h in self.neighbors(g):
                if h not in wl:
                    wl[h] = wl[g] + 1
                    queue.append(h)
        return wl

    def whole_group_in_ball(self) -> bool:
        """True when the ball is closed under the generators, i.e. contains the group."""
        wl = self.ball()
        return all(h in wl for g in wl for h in self.neighbors(g))

    def cayley_graph(self) -> LocallyFiniteGraph:
        vertices = None
        if self.whole_group_in_ball():
            vertices = tuple(self.ball())
        return LocallyFiniteGraph(self.neighbors, (self.identity_element,), self.symmetric, vertices)


def from_group(g: GroupPresentationBall, *, allow_truncation: bool = False) -> Tuple[FCat, LocallyFiniteGraph]:
    """One-object category with ``deg h = wl(h)``, together with the Cayley graph.

    Composition is ``h o k = h * k``. If the ball does not contain the whole
    group, ``allow_truncation`` keeps the ball and leaves composites of total
    degree above the radius undefined; the category is then marked truncated.
    """
    wl = g.ball()
    closed = g.whole_group_in_ball()
    if not closed and not allow_truncation:
        raise HorizonError("ball does not contain the whole group; pass allow_truncation=True")
    elements = list(wl)
    index = {h: i for i, h in enumerate(elements)}
    morphisms = [Morphism(i, 0, 0, Fraction(wl[h]), h == g.identity_element) for i, h in enumerate(elements)]
    comp = {}
    for a, b in iproduct(elements, repeat=2):
        c = g.multiply(a, b)
        if c in index:
            comp[(index[a], index[b])] = index[c]
    horizon = None if closed else g.radius
    cat = FCat(("*",), morphisms, comp, horizon=horizon, centers=(0,) if horizon is not None else ())
    cat.group_elements = tuple(elements)
    return cat, g.cayley_graph()


# ---------------------------------------------------------------------------
# Kolmogorov quotient


def kolmogorov_projection(x: FCat) -> Tuple[FCat, List[int]]:
    """Quotient by the relation d(a, b) = d(b, a) = 0, and the class of each object."""
    if not x.metric_like:
        raise UsageError("Kolmogorov quotient needs a metric-like category")
    n = len(x)
    cls_of = [-1] * n
    reps: List[int] = []
    for a in range(n):
        if cls_of[a] >= 0:
            continue
        cls_of[a] = len(reps)
        for b in range(a + 1, n):
            if cls_of[b] < 0 and x.distance(a, b) == 0 and x.distance(b, a) == 0:
                cls_of[b] = len(reps)
        reps.append(a)
    for a in range(n):
        for b in range(n):
            if x.distance(a, b) != x.distance(reps[cls_of[a]], reps[cls_of[b]]):
                raise ValidationError("distances are not constant on Kolmogorov classes",
                                      witness=(x.objects[a], x.objects[b]))
    matrix = [[x.distance(r, s) for s in reps] for r in reps]
    quotient = from_metric(matrix, [x.objects[r] for r in reps])
    return quotient, cls_of


def kolmogorov_quotient(x: FCat) -> FCat:
    return kolmogorov_projection(x)[0]


def induced_submetric(x: FCat, members: Sequence[int]) -> FCat:
    """Full subcategory of a metric-like category on the given objects."""
    matrix = [[x.distance(a, b) for b in members] for a in members]
    return from_metric(matrix, [x.objects[a] for a in members])


# ---------------------------------------------------------------------------
# functors


class Functor:
    """A filtered functor: preserves composition and identities, never raises degree."""

    def __init__(self, source: FCat, target: FCat, obj_map: Sequence[int], mor_map: Sequence[int],
                 validate: bool = True):
        self.source = source
        self.target = target
        self.obj_map = tuple(obj_map)
        self.mor_map = tuple(mor_map)
        if validate:
            self.validate()

    @classmethod
    def from_object_map(cls, source: FCat, target: FCat, obj_map: Sequence[int]) -> "Functor":
        """Functor into a metric-like category, determined by its object map."""
        if not target.metric_like:
            raise UsageError("object maps determine functors only into metric-like categories")
        if len(obj_map) != len(source):
            raise ValidationError("object map must cover every source object")
        mor_map = []
        for m in source.morphisms:
            found = target.hom_ids(obj_map[m.source], obj_map[m.target])
            if not found:
                raise ValidationError(f"morphism {m.id} has no image: target distance is infinite", witness=m.id)
            mor_map.append(found[0])
        return cls(source, target, obj_map, mor_map)

    @classmethod
    def identity(cls, c: FCat) -> "Functor":
        return cls(c, c, range(len(c)), range(len(c.morphisms)))

    def validate(self) -> None:
        s, t = self.source, self.target
        if len(self.obj_map) != len(s) or len(self.mor_map) != len(s.morphisms):
            raise ValidationError("functor maps must cover every object and morphism")
        for m in s.morphisms:
            image = t.morphisms[self.mor_map[m.id]]
            if (image.source, image.target) != (self.obj_map[m.source], self.obj_map[m.target]):
                raise ValidationError(f"image of morphism {m.id} has the wrong endpoints", witness=m.id)
            if image.degree > m.degree:
                raise ValidationError(f"functor raises the degree of morphism {m.id}", witness=m.id)
            if m.is_identity and not image.is_identity:
                raise ValidationError(f"identity {m.id} is not sent to an identity", witness=m.id)
        for f in s.morphisms:
            for g in s.out_morphisms(f.target):
                try:
                    gf = s.compose(g, f.id)
                except HorizonError:
                    continue
                left = self.mor_map[gf]
                right = t.compose(self.mor_map[g], self.mor_map[f.id])
                if left != right:
                    raise ValidationError(f"functor does not preserve the composite of {(g, f.id)}",
                                          witness=(g, f.id))

    def then(self, other: "Functor") -> "Functor":
        """``other o self``."""
        return Functor(self.source, other.target, [other.obj_map[a] for a in self.obj_map],
                       [other.mor_map[m] for m in self.mor_map])
