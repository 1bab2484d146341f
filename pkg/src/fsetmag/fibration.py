"""Metric actions, their Grothendieck total spaces, and metric fibrations.

A metric action over a base X assigns a metric space Fx to each point and a
transport bijection F(x, x'): Fx -> Fx' to each pair at finite distance.
Fiber points are referred to by their index in the fiber category.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from .errors import PreconditionError, UsageError, ValidationError
from .fcat import FCat, LocallyFiniteGraph, from_finite_category, from_graph, from_metric, induced_submetric
from .magnitude import magnitude, weighting
from .novikov import NSeries, exponent

Perm = Tuple[int, ...]


def _require_metric(c: FCat, what: str) -> None:
    if not c.metric_like:
        raise UsageError(f"{what} must be a metric-like category")


def _is_isometry(fiber_a: FCat, fiber_b: FCat, perm: Sequence[int]) -> bool:
    n = len(fiber_a)
    if len(fiber_b) != n or sorted(perm) != list(range(n)):
        return False
    return all(fiber_a.distance(i, j) == fiber_b.distance(perm[i], perm[j]) for i in range(n) for j in range(n))


class MetricAction:
    """Transports between fibers over a metric base, validated on construction."""

    def __init__(self, base: FCat, fibers: Sequence[FCat], transport: Dict[Tuple[int, int], Sequence[int]],
                 validate: bool = True):
        self.base = base
        self.fibers = list(fibers)
        self.transport: Dict[Tuple[int, int], Perm] = {k: tuple(v) for k, v in transport.items()}
        if validate:
            self.validate()

    def move(self, x: int, y: int, a: int) -> int:
        return a if x == y else self.transport[(x, y)][a]

    def validate(self) -> None:
        X = self.base
        _require_metric(X, "base")
        if len(self.fibers) != len(X):
            raise ValidationError("one fiber is needed per base point")
        for f in self.fibers:
            _require_metric(f, "fiber")
        pairs = [(x, y) for x, y in iproduct(range(len(X)), repeat=2) if x != y and X.distance(x, y) is not None]
        for x, y in pairs:
            if (x, y) not in self.transport:
                raise ValidationError(f"missing transport {X.objects[x]!r} -> {X.objects[y]!r}", witness=(x, y))
        for x, y in pairs:
            if not _is_isometry(self.fibers[x], self.fibers[y], self.transport[(x, y)]):
                raise ValidationError(f"transport {X.objects[x]!r} -> {X.objects[y]!r} is not an isometric bijection",
                                      witness=(x, y))
            if X.distance(y, x) is not None:
                back = self.transport[(y, x)]
                if any(back[self.transport[(x, y)][a]] != a for a in range(len(self.fibers[x]))):
                    raise ValidationError(f"transports between {X.objects[x]!r} and {X.objects[y]!r} are not mutually "
                                          f"inverse", witness=(x, y))
        for x, y, z in iproduct(range(len(X)), repeat=3):
            dxy, dyz, dxz = X.distance(x, y), X.distance(y, z), X.distance(x, z)
            if dxy is None or dyz is None:
                continue
            slack = dxy + dyz - dxz
            fiber = self.fibers[z]
            for a in range(len(self.fibers[x])):
                d = fiber.distance(self.move(x, z, a), self.move(y, z, self.move(x, y, a)))
                if d is None or d > slack:
                    raise ValidationError(
                        f"comparison defect at {(X.objects[x], X.objects[y], X.objects[z])}, point {a}: "
                        f"{d} exceeds {slack}", witness=(x, y, z, a))

    def to_oplax(self) -> "OplaxAction":
        X = self.base
        maps = {}
        for m in X.morphisms:
            maps[m.id] = tuple(range(len(self.fibers[m.source]))) if m.is_identity else \
                self.transport[(m.source, m.target)]
        return OplaxAction(X, self.fibers, maps)

    def to_json(self) -> dict:
        return {"kind": "action", "base": self.base.to_json(), "fibers": [f.to_json() for f in self.fibers],
                "transport": [[x, y, list(p)] for (x, y), p in sorted(self.transport.items())]}

    @classmethod
    def from_json(cls, data: dict) -> "MetricAction":
        return cls(FCat.from_json(data["base"]), [FCat.from_json(f) for f in data["fibers"]],
                   {(x, y): tuple(p) for x, y, p in data["transport"]})


class OplaxAction:
    """A normal oplax functor from a finite category into metric spaces.

    ``maps[m]`` is the object map of F(m) on fiber indices. Comparison cells are
    the unique fiber morphisms F(g o f)a -> F(g)F(f)a.
    """

    def __init__(self, base: FCat, fibers: Sequence[FCat], maps: Dict[int, Sequence[int]], validate: bool = True):
        self.base = base
        self.fibers = list(fibers)
        self.maps = {m: tuple(v) for m, v in maps.items()}
        if validate:
            self.validate()

    def validate(self) -> None:
        B = self.base
        if len(self.fibers) != len(B):
            raise ValidationError("one fiber is needed per base object")
        for f in self.fibers:
            _require_metric(f, "fiber")
        for m in B.morphisms:
            src, tgt = self.fibers[m.source], self.fibers[m.target]
            image = self.maps.get(m.id)
            if image is None or len(image) != len(src) or any(not 0 <= v < len(tgt) for v in image):
                raise ValidationError(f"F({m.id}) is not a map between the right fibers", witness=m.id)
            if m.is_identity and image != tuple(range(len(src))):
                raise ValidationError(f"F sends identity {m.id} to a non-identity", witness=m.id)
            for a, b in iproduct(range(len(src)), repeat=2):
                dab = src.distance(a, b)
                if dab is None:
                    continue
                dimg = tgt.distance(image[a], image[b])
                if dimg is None or dimg > dab:
                    raise ValidationError(f"F({m.id}) is not 1-Lipschitz at {(a, b)}", witness=(m.id, a, b))
        for f in B.morphisms:
            for g in B.out_morphisms(f.target):
                gf = B.compose(g, f.id)
                slack = f.degree + B.degree(g) - B.degree(gf)
                fiber = self.fibers[B.target(g)]
                for a in range(len(self.fibers[f.source])):
                    d = fiber.distance(self.maps[gf][a], self.maps[g][self.maps[f.id][a]])
                    if d is None or d > slack:
                        raise ValidationError(f"comparison cell for {(g, f.id)} at point {a} has degree {d} > {slack}",
                                              witness=(g, f.id, a))


def grothendieck(action: MetricAction) -> FCat:
    """Total space with d((x, a), (x', b)) = d(x, x') + d(F(x, x')a, b)."""
    X = action.base
    labels, points = [], []
    for x in range(len(X)):
        for a in range(len(action.fibers[x])):
            labels.append((X.objects[x], action.fibers[x].objects[a]))
            points.append((x, a))
    matrix = []
    for x, a in points:
        row = []
        for y, b in points:
            dxy = X.distance(x, y)
            if dxy is None:
                row.append(None)
                continue
            dfib = action.fibers[y].distance(action.move(x, y, a), b)
            row.append(None if dfib is None else dxy + dfib)
        matrix.append(row)
    return from_metric(matrix, labels)


def grothendieck_oplax(action: OplaxAction) -> FCat:
    """Total category with morphisms (f, b): (x, a) -> (x', b) of degree deg f + d(F(f)a, b)."""
    B = action.base
    objects, position = [], {}
    for x in range(len(B)):
        for a in range(len(action.fibers[x])):
            position[(x, a)] = len(objects)
            objects.append((B.objects[x], action.fibers[x].objects[a]))
    morphisms, index = [], {}
    for (x, a), _ in sorted(position.items(), key=lambda kv: kv[1]):
        for m in B.out_morphisms(x):
            y = B.target(m)
            fiber = action.fibers[y]
            for b in range(len(fiber)):
                d = fiber.distance(action.maps[m][a], b)
                if d is None:
                    continue
                ident = B.is_identity(m) and a == b
                index[(m, x, a, b)] = len(morphisms)
                morphisms.append((objects[position[(x, a)]], objects[position[(y, b)]], B.degree(m) + d, ident))
    composition = []
    for (f, x, a, b), i in index.items():
        y = B.target(f)
        for (g, y2, b2, c), j in index.items():
            if y2 != y or b2 != b:
                continue
            composition.append((j, i, index[(B.compose(g, f), x, a, c)]))
    return from_finite_category(objects, morphisms, composition)


# ---------------------------------------------------------------------------
# fibrations


@dataclass
class FibrationWitness:
    total: FCat
    base: FCat
    projection: Tuple[int, ...]
    lifts: Dict[Tuple[int, int], int] = field(default_factory=dict)

    def fiber(self, y: int) -> List[int]:
        return [u for u, p in enumerate(self.projection) if p == y]


@dataclass
class Counterexample:
    point: Hashable
    base_point: Hashable
    reason: str

    def to_json(self) -> dict:
        return {"point": str(self.point), "base_point": str(self.base_point), "reason": self.reason}


def is_metric_fibration(total: FCat, base: FCat, projection: Sequence[int]):
    """Exhaustive lift check. Returns a FibrationWitness or the first Counterexample."""
    _require_metric(total, "total space")
    _require_metric(base, "base")
    proj = tuple(projection)
    if len(proj) != len(total) or any(not 0 <= p < len(base) for p in proj):
        raise ValidationError("projection must send every point of the total space into the base")
    if set(proj) != set(range(len(base))):
        missing = min(set(range(len(base))) - set(proj))
        raise ValidationError(f"projection misses {base.objects[missing]!r}", witness=missing)
    for u, v in iproduct(range(len(total)), repeat=2):
        duv, dpp = total.distance(u, v), base.distance(proj[u], proj[v])
        if duv is not None and (dpp is None or dpp > duv):
            raise ValidationError(f"projection is not 1-Lipschitz at {(total.objects[u], total.objects[v])}",
                                  witness=(u, v))
    fibers = {y: [u for u in range(len(total)) if proj[u] == y] for y in range(len(base))}
    witness = FibrationWitness(total, base, proj)
    for u in range(len(total)):
        for y in range(len(base)):
            target = base.distance(proj[u], y)
            good = []
            for z in fibers[y]:
                if total.distance(u, z) != target or target is None:
                    continue
                if all(total.distance(u, w) == _add(total.distance(u, z), total.distance(z, w)) for w in fibers[y]):
                    good.append(z)
            if len(good) != 1:
                reason = "no lift" if not good else f"{len(good)} lifts"
                return Counterexample(total.objects[u], base.objects[y], reason)
            witness.lifts[(u, y)] = good[0]
    return witness


def _add(a: Optional[Fraction], b: Optional[Fraction]) -> Optional[Fraction]:
    return None if a is None or b is None else a + b


def extract_action(w: FibrationWitness) -> MetricAction:
    """Fibers as induced subspaces; transports follow the unique lifts."""
    members = [w.fiber(y) for y in range(len(w.base))]
    fibers = [induced_submetric(w.total, m) for m in members]
    local = [{u: i for i, u in enumerate(m)} for m in members]
    transport = {}
    for x, y in iproduct(range(len(w.base)), repeat=2):
        if x != y and w.base.distance(x, y) is not None:
            transport[(x, y)] = tuple(local[y][w.lifts[(u, y)]] for u in members[x])
    return MetricAction(w.base, fibers, transport)


def projection_of(total: FCat, base: FCat) -> Tuple[int, ...]:
    """Projection of a Grothendieck total space, read off its pair labels."""
    index = {o: i for i, o in enumerate(base.objects)}
    return tuple(index[label[0]] for label in total.objects)


# ---------------------------------------------------------------------------
# isometries and invariants


def find_isometry(a: FCat, b: FCat) -> Optional[Tuple[int, ...]]:
    """An isometry a -> b as a tuple of target indices, or None. Backtracking search."""
    _require_metric(a, "source")
    _require_metric(b, "target")
    n = len(a)
    if len(b) != n:
        return None

    def profile(c: FCat, i: int):
        return (tuple(sorted((str(c.distance(i, j)) for j in range(n)))),
                tuple(sorted((str(c.distance(j, i)) for j in range(n)))))

    pa = [profile(a, i) for i in range(n)]
    pb = [profile(b, i) for i in range(n)]
    if sorted(pa) != sorted(pb):
        return None
    order = sorted(range(n), key=lambda i: sum(1 for j in range(n) if pa[j] == pa[i]))
    image: Dict[int, int] = {}
    used = set()

    def extend(k: int) -> bool:
        if k == n:
            return True
        i = order[k]
        for cand in range(n):
            if cand in used or pb[cand] != pa[i]:
                continue
            if all(a.distance(i, j) == b.distance(cand, image[j]) and a.distance(j, i) == b.distance(image[j], cand)
                   for j in image):
                image[i] = cand
                used.add(cand)
                if extend(k + 1):
                    return True
                del image[i]
                used.discard(cand)
        return False

    if not extend(0):
        return None
    return tuple(image[i] for i in range(n))


def girth(c: FCat) -> Optional[int]:
    """Length of a shortest cycle in the graph of distance-one pairs; None for forests."""
    _require_metric(c, "input")
    n = len(c)
    adj = [[j for j in range(n) if j != i and c.distance(i, j) == 1 and c.distance(j, i) == 1] for i in range(n)]
    best = None
    for s in range(n):
        dist, parent = {s: 0}, {s: -1}
        queue = [s]
        for u in queue:
            for v in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    parent[v] = u
                    queue.append(v)
                elif parent[u] != v:
                    length = dist[u] + dist[v] + 1
                    if best is None or length < best:
                        best = length
    return best


def distance_multiset(c: FCat) -> List[str]:
    n = len(c)
    return sorted(str(c.distance(i, j)) for i in range(n) for j in range(n))


# ---------------------------------------------------------------------------
# product formula


@dataclass
class ProductReport:
    cutoff: Fraction
    total: NSeries
    base: NSeries
    fiber: NSeries
    product: NSeries
    magnitude_equal: bool
    weighting_equal: bool

    @property
    def equal(self) -> bool:
        return self.magnitude_equal and self.weighting_equal

    def to_json(self) -> dict:
        return {"cutoff": str(self.cutoff), "total": str(self.total), "base": str(self.base),
                "fiber": str(self.fiber), "product": str(self.product),
                "magnitude_equal": self.magnitude_equal, "weighting_equal": self.weighting_equal,
                "equal": self.equal}


def product_formula_check(action, cutoff) -> ProductReport:
    """Compare Mag E(F) with Mag X . Mag Fx, and k^(x,a) with k^x k^a pointwise."""
    cutoff = exponent(cutoff)
    first = action.fibers[0]
    for i, f in enumerate(action.fibers[1:], 1):
        if find_isometry(first, f) is None:
            raise PreconditionError(f"fiber over {action.base.objects[i]!r} is not isometric to the first fiber",
                                    witness=i)
    if isinstance(action, MetricAction):
        total = grothendieck(action)
    else:
        total = grothendieck_oplax(action)
    mt, mb, mf = magnitude(total, cutoff), magnitude(action.base, cutoff), magnitude(first, cutoff)
    prod = mb * mf
    kt, kb = weighting(total, cutoff), weighting(action.base, cutoff)
    kf = [weighting(f, cutoff) for f in action.fibers]
    w_equal = True
    pos = 0
    for x in range(len(action.base)):
        for a in range(len(action.fibers[x])):
            if kt[pos] != kb[x] * kf[x][a]:
                w_equal = False
            pos += 1
    return ProductReport(cutoff, mt, mb, mf, prod, mt == prod, w_equal)


# ---------------------------------------------------------------------------
# builders


def action_from_twists(base: FCat, fiber: FCat, twists: Dict[Tuple[int, int], Sequence[int]]) -> MetricAction:
    """Constant fiber; transports along base edges given by ``twists`` (identity otherwise).

    An edge is a pair with no point strictly between them. Transports between
    other pairs compose along the geodesic through the first intermediate point.
    The result is validated, so inconsistent twists are rejected.
    """
    _require_metric(base, "base")
    _require_metric(fiber, "fiber")
    n, m = len(base), len(fiber)
    ident = tuple(range(m))
    edge_maps: Dict[Tuple[int, int], Perm] = {}
    for (x, y), perm in twists.items():
        perm = tuple(perm)
        if not _is_isometry(fiber, fiber, perm):
            raise ValidationError(f"twist on {(base.objects[x], base.objects[y])} is not an isometry of the fiber",
                                  witness=(x, y))
        edge_maps[(x, y)] = perm
        if (y, x) not in twists:
            inv = [0] * m
            for a, b in enumerate(perm):
                inv[b] = a
            edge_maps[(y, x)] = tuple(inv)
    memo: Dict[Tuple[int, int], Perm] = {}

    def transport(x: int, y: int) -> Perm:
        if (x, y) in memo:
            return memo[(x, y)]
        d = base.distance(x, y)
        mid = next((z for z in range(n) if z not in (x, y) and base.distance(x, z) is not None
                    and base.distance(z, y) is not None
                    and base.distance(x, z) + base.distance(z, y) == d), None)
        if mid is None:
            result = edge_maps.get((x, y), ident)
        else:
            first, second = transport(x, mid), transport(mid, y)
            result = tuple(second[first[a]] for a in range(m))
        memo[(x, y)] = result
        return result

    maps = {(x, y): transport(x, y) for x, y in iproduct(range(n), repeat=2)
            if x != y and base.distance(x, y) is not None}
    return MetricAction(base, [fiber] * n, maps)


def cycle_base(n: int) -> FCat:
    if n < 3:
        raise UsageError("cycle length must be at least 3")
    return from_graph(LocallyFiniteGraph.from_edges(range(n), [(i, (i + 1) % n) for i in range(n)], directed=False))


def cyclic_twist(fiber: FCat, theta: Sequence[int], n: int) -> MetricAction:
    """Action over the n-cycle twisting by ``theta`` along the edge n-1 -> 0 only."""
    return action_from_twists(cycle_base(n), fiber, {(n - 1, 0): tuple(theta)})


def group_self_action(group_category: FCat) -> OplaxAction:
    """A one-object group category acting on its elements by left multiplication."""
    elements = group_category.group_elements
    if group_category.horizon is not None:
        raise UsageError("the acting group must be finite and fully enumerated")
    point_index = {g: i for i, g in enumerate(elements)}
    discrete = from_metric([[0 if i == j else None for j in range(len(elements))] for i in range(len(elements))],
                           list(elements))
    maps = {}
    for m in group_category.morphisms:
        maps[m.id] = tuple(point_index[elements[group_category.compose(m.id, point_index[h])]] for h in elements)
    return OplaxAction(group_category, [discrete], maps)
