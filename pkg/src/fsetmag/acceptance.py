"""The acceptance suite: thirteen exact checks, each with a wall-clock bound."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Tuple

from . import corpus
from .fcat import Functor, from_finite_category, product
from .fibration import (MetricAction, action_from_twists, cyclic_twist, extract_action, find_isometry, girth,
                        grothendieck, is_metric_fibration, product_formula_check, projection_of)
from .maghom import hochschild_graded_check, homology_table, mc_complex, euler_categorification_check
from .magnitude import (growth_series, magnitude, path_expansion_magnitude, poincare_polynomial,
                        subspace_arrangement, weighting)
from .novikov import NSeries, eval_at_one, invert
from .specseq import Digraph, build_filtered_chain, e2_vs_path_homology, r_homotopy_invariance_check


@dataclass
class Outcome:
    number: int
    title: str
    passed: bool
    seconds: float
    bound: float
    detail: str

    @property
    def ok(self) -> bool:
        return self.passed and self.seconds < self.bound

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        timing = f"{self.seconds:.3f}s < {self.bound:g}s" if self.seconds < self.bound else \
            f"{self.seconds:.3f}s exceeds {self.bound:g}s"
        return f"{status} [{self.number:2d}] {self.title} ({timing}) {self.detail}".rstrip()


def _point() -> Tuple[bool, str]:
    c = corpus.category("point")
    ok = magnitude(c, 3) == 1
    for ell in range(4):
        for n, h in enumerate(homology_table(c, ell, 4)):
            expected = 1 if (ell, n) == (0, 0) else 0
            ok = ok and h.betti == expected and not h.torsion
    return ok, "Mag = 1, MH concentrated at (0, 0)"


def _fibration() -> Tuple[bool, str]:
    k2, k3 = corpus.category("K2"), corpus.category("K3")
    prism, k33 = corpus.category("K3xK2"), corpus.category("K33")
    twisted = grothendieck(cyclic_twist(k2, (1, 0), 3))
    expected = magnitude(k3, 10) * magnitude(k2, 10)
    report = product_formula_check(cyclic_twist(k2, (1, 0), 3), 10)
    ok = (magnitude(prism, 10) == expected and magnitude(k33, 10) == expected and report.equal
          and find_isometry(twisted, k33) is not None and find_isometry(product(k3, k2), prism) is not None)
    g_prism, g_k33 = girth(prism), girth(k33)
    ok = ok and (g_prism, g_k33) == (3, 4)
    return ok, f"girth {g_prism} vs {g_k33}"


def _oracles() -> Tuple[bool, str]:
    bad = []
    for name in corpus.UNIFORM:
        c = corpus.category(name)
        if magnitude(c, 6, strategy="neumann") != path_expansion_magnitude(c, 6):
            bad.append(name)
    return not bad, f"{len(corpus.UNIFORM)} categories" + (f"; mismatch {bad}" if bad else "")


def z2_category():
    return from_finite_category(["*"], [("*", "*", 0, True), ("*", "*", 0, False)],
                                [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)])


def _finite_category() -> Tuple[bool, str]:
    mag = magnitude(z2_category(), 2, strategy="constant_term_lu")
    return mag == Fraction(1, 2) and mag.exact, f"Mag = {mag}"


def _simplicial() -> Tuple[bool, str]:
    mag = magnitude(corpus.category("triangle_faces"), 3)
    value = eval_at_one(mag)
    return str(mag) == "6 - 6q" and value == 0, f"Mag = {mag}, value at 1 = {value}"


def _growth() -> Tuple[bool, str]:
    g = corpus.load("Z5_cayley")
    res = growth_series(g, 8)
    expected = invert(NSeries.polynomial([1, 2, 2], 8))
    cay = weighting(corpus.category("Z5_cayley"), 8)
    ok = res.one_object_magnitude == expected and all(v == expected for v in cay.values)
    ball = weighting(corpus.category("Z_ball"), 4)
    k0 = ball.at((0,))
    ok = ok and k0 == NSeries.polynomial([1, -2, 2, -2, 2], 4) and ball.object_horizons[ball.objects.index((0,))] == 4
    return ok, f"k(0) = {k0}"


def two_lines():
    return subspace_arrangement([[[1, 0, 0]], [[0, 1, 0]]], 2)


def _poincare() -> Tuple[bool, str]:
    arr = two_lines()
    pi_i, pi_p = poincare_polynomial(arr.intersections), poincare_polynomial(arr.subsets)
    ok = pi_i.poincare == pi_p.poincare and pi_i.agree and pi_p.agree and pi_i.weighting == pi_p.weighting
    return ok, f"pi = {pi_i.poincare}"


def _categorification() -> Tuple[bool, str]:
    bad = [name for name in ("K2", "K3", "C4", "C5")
           if not euler_categorification_check(corpus.category(name), 5).equal]
    return not bad, "K2 K3 C4 C5 up to l = 5" + (f"; mismatch {bad}" if bad else "")


def _kolmogorov() -> Tuple[bool, str]:
    deg, pt = corpus.category("degenerate2"), corpus.category("point")
    ok = all(homology_table(deg, ell, 4) == homology_table(pt, ell, 4) for ell in range(4))
    return ok, "l, n <= 3"


def _hochschild() -> Tuple[bool, str]:
    k2 = corpus.category("K2")
    reports = [hochschild_graded_check(k2, ell, 2) for ell in (0, 1, 2)]
    return all(r.equal for r in reports), f"cells {max(r.cells for r in reports)}"


def _specseq() -> Tuple[bool, str]:
    ok = True
    checked = 0
    for name in ("K2", "diamond"):
        c = corpus.category(name)
        fc = build_filtered_chain(c, 5, 5)
        for p in range(4):
            table = homology_table(c, p, 5)
            for n in range(5):
                entry = fc.page(1, p, n - p)
                if entry.valid:
                    checked += 1
                    ok = ok and entry.dimension == table[n].betti
    betti = {}
    for name in ("diamond", "dicycle5"):
        g = corpus.load(name)
        d = Digraph(g.vertices, g.edges())
        report = e2_vs_path_homology(d, 2, 5, 5)
        ok = ok and report.equal
        betti[name] = report.rows[1].reduced_betti
    ok = ok and betti == {"diamond": 0, "dicycle5": 1}
    return ok, f"{checked} E1 entries; H1 diamond {betti['diamond']}, 5-cycle {betti['dicycle5']}"


def diamond_homotopy():
    """Identity and the collapse a, b -> b, c, d -> d on the diamond, with a 1-step homotopy."""
    c = corpus.category("diamond")
    idx = {o: i for i, o in enumerate(c.objects)}
    f = Functor.identity(c)
    collapse = {"a": "b", "b": "b", "c": "d", "d": "d"}
    g = Functor.from_object_map(c, c, [idx[collapse[x]] for x in c.objects])

    def hom(a, b):
        return c.hom_ids(idx[a], idx[b])[0]

    tau = [hom(x, collapse[x]) for x in c.objects]
    return f, g, tau


def _rhomotopy() -> Tuple[bool, str]:
    f, g, tau = diamond_homotopy()
    report = r_homotopy_invariance_check(f, g, 1, tau, 4, 4)
    return report.equal and bool(report.rows), f"{len(report.rows)} E2 entries"


def _random_series(rng: random.Random, cutoff: int) -> NSeries:
    terms = {}
    for _ in range(rng.randint(0, 5)):
        terms[Fraction(rng.randint(0, 2 * cutoff), 2)] = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
    return NSeries.from_dict(terms, cutoff)


def fibration_corpus() -> List[MetricAction]:
    k2, k3 = corpus.category("K2"), corpus.category("K3")
    c4 = corpus.category("C4")
    point = corpus.category("point")
    return [
        action_from_twists(k3, k2, {}),
        cyclic_twist(k2, (1, 0), 3),
        cyclic_twist(k2, (1, 0), 5),
        cyclic_twist(corpus.category("C4"), (1, 2, 3, 0), 3),
        action_from_twists(c4, k3, {}),
        action_from_twists(point, c4, {}),
    ]


def _properties() -> Tuple[bool, str]:
    rng = random.Random(20240611)
    for _ in range(1000):
        a, b, c = (_random_series(rng, 6) for _ in range(3))
        if not (a + b == b + a and a * b == b * a and (a + b) + c == a + (b + c)
                and (a * b) * c == a * (b * c) and a * (b + c) == a * b + a * c):
            return False, f"ring law fails at {a}, {b}, {c}"
    for name in corpus.UNIFORM:
        c = corpus.category(name)
        for ell in range(3):
            mc_complex(c, ell, 3)  # raises if the boundary does not square to zero
    for action in fibration_corpus():
        total = grothendieck(action)
        w = is_metric_fibration(total, action.base, projection_of(total, action.base))
        if not hasattr(w, "lifts") or find_isometry(grothendieck(extract_action(w)), total) is None:
            return False, "round trip failed"
    from .cli import determinism_probe
    if not determinism_probe():
        return False, "CLI output is not byte-deterministic"
    return True, "1000 ring-law triples, square-zero, round trips, CLI determinism"


CRITERIA: List[Tuple[str, float, Callable[[], Tuple[bool, str]]]] = [
    ("point normalization", 0.1, _point),
    ("fibration product formula", 1.0, _fibration),
    ("Neumann vs path expansion", 5.0, _oracles),
    ("finite category Euler characteristic", 0.1, _finite_category),
    ("simplicial Euler characteristic", 0.1, _simplicial),
    ("growth series", 1.0, _growth),
    ("Poincare polynomial and Galois connection", 0.5, _poincare),
    ("categorification", 30.0, _categorification),
    ("Kolmogorov invariance", 0.5, _kolmogorov),
    ("Hochschild agreement", 10.0, _hochschild),
    ("spectral sequence", 30.0, _specseq),
    ("r-homotopy invariance", 10.0, _rhomotopy),
    ("property suites", 120.0, _properties),
]


def run(number: int) -> Outcome:
    title, bound, fn = CRITERIA[number - 1]
    start = time.perf_counter()
    try:
        passed, detail = fn()
    except Exception as exc:  # a crash is a failure, reported like one
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    return Outcome(number, title, passed, time.perf_counter() - start, bound, detail)


def run_all() -> List[Outcome]:
    return [run(i) for i in range(1, len(CRITERIA) + 1)]
