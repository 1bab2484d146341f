"""Text and JSON input formats, with line/field diagnostics, and canonical JSON emission.

Text grammars (``#`` starts a comment, blank lines are ignored):

* graph:   ``a -- b -- c`` edge chains; a lone token declares a vertex.
* digraph: ``a -> b`` edge chains; a lone token declares a vertex.
* metric:  optional ``labels: a b c``, then one row of distances per line.
           Rows may also be separated by ``/`` on one line. Entries are
           integers, ``p/q`` rationals or ``inf``.
* poset:   ``a < b < c`` relation chains, lone tokens, and ``rank a 2`` lines.
           If any rank is given the result is a ranked poset.
* twists:  ``x y : p0 p1 ...`` gives the fiber permutation along base edge x -> y.

category, group and action inputs are JSON. Every kind also accepts its
canonical JSON form, an object with a ``"kind"`` field.
"""

from __future__ import annotations

import json
import os
import re
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .errors import FsetmagError, ValidationError
from .fcat import FCat, GroupPresentationBall, LocallyFiniteGraph, Poset, RankedPoset, from_metric
from .fibration import MetricAction
from .novikov import exponent

KINDS = ("graph", "digraph", "metric", "poset", "category", "group", "action")
_INT = re.compile(r"-?\d+$")


class ParseError(ValidationError):
    def __init__(self, message, line: Optional[int] = None, field: Optional[str] = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message, witness=(line, field))
        self.line = line
        self.field = field


def _token(tok: str):
    return int(tok) if _INT.match(tok) else tok


def _lines(text: str):
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line


def read_source(source: str) -> str:
    """File contents when ``source`` names a file, otherwise the text itself."""
    if "\n" not in source and os.path.isfile(source):
        with open(source, encoding="utf-8") as fh:
            return fh.read()
    return source


def parse_input(source: str, kind: str):
    if kind not in KINDS:
        raise ParseError(f"unknown input kind {kind!r}; expected one of {', '.join(KINDS)}")
    text = read_source(source)
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
        return from_canonical(data, kind)
    if kind in ("graph", "digraph"):
        return _parse_graph(text, directed=(kind == "digraph"))
    if kind == "metric":
        return _parse_metric(text)
    if kind == "poset":
        return _parse_poset(text)
    raise ParseError(f"{kind} input must be JSON")


def _parse_graph(text: str, directed: bool) -> LocallyFiniteGraph:
    arrow, other = ("->", "--") if directed else ("--", "->")
    vertices: Dict = {}
    edges: List[Tuple] = []
    for number, line in _lines(text):
        if other in line:
            raise ParseError(f"'{other}' is not allowed here; use '{arrow}'", line=number)
        parts = [p.strip() for p in line.split(arrow)]
        for i, p in enumerate(parts, 1):
            if not p or len(p.split()) != 1:
                raise ParseError(f"expected a single vertex name, got {p!r}", line=number, field=str(i))
        names = [_token(p) for p in parts]
        for v in names:
            vertices.setdefault(v, None)
        for u, v in zip(names, names[1:]):
            if u == v:
                raise ParseError(f"loop at {u!r}", line=number)
            edges.append((u, v))
    if not vertices:
        raise ParseError("graph has no vertices")
    return LocallyFiniteGraph.from_edges(list(vertices), edges, directed=directed)


def _parse_entry(tok: str, line: int, field: int) -> Optional[Fraction]:
    if tok.lower() in ("inf", "∞"):
        return None
    try:
        return exponent(tok)
    except FsetmagError as exc:
        raise ParseError(str(exc), line=line, field=str(field)) from None


def _parse_metric(text: str) -> FCat:
    labels = None
    rows: List[Tuple[int, List[Optional[Fraction]]]] = []
    for number, line in _lines(text):
        if line.startswith("labels:"):
            labels = [_token(t) for t in line[len("labels:"):].split()]
            continue
        row: List[str] = []
        for tok in line.split() + ["/"]:
            if tok != "/":
                row.append(tok)
            elif row:
                rows.append((number, [_parse_entry(t, number, i) for i, t in enumerate(row, 1)]))
                row = []
    n = len(rows)
    if n == 0:
        raise ParseError("metric has no rows")
    for number, row in rows:
        if len(row) != n:
            raise ParseError(f"row has {len(row)} entries, expected {n}", line=number)
    if labels is not None and len(labels) != n:
        raise ParseError(f"{len(labels)} labels for {n} rows", field="labels")
    return from_metric([r for _, r in rows], labels)


def _parse_poset(text: str):
    elements: Dict = {}
    relations = []
    ranks: Dict = {}
    for number, line in _lines(text):
        toks = line.split()
        if toks[0] == "rank":
            if len(toks) != 3 or not _INT.match(toks[2]):
                raise ParseError("expected 'rank <element> <integer>'", line=number)
            ranks[_token(toks[1])] = int(toks[2])
            continue
        parts = [p.strip() for p in line.split("<")]
        for i, p in enumerate(parts, 1):
            if not p or len(p.split()) != 1:
                raise ParseError(f"expected a single element name, got {p!r}", line=number, field=str(i))
        names = [_token(p) for p in parts]
        for e in names:
            elements.setdefault(e, None)
        relations.extend(zip(names, names[1:]))
    for e in ranks:
        if e not in elements:
            raise ParseError(f"rank given for unknown element {e!r}")
    if not ranks:
        return Poset.from_relations(list(elements), relations)
    return RankedPoset.from_covers(list(elements), relations, ranks)


def parse_twists(source: str, base: FCat) -> Dict[Tuple[int, int], Tuple[int, ...]]:
    index = {o: i for i, o in enumerate(base.objects)}
    out = {}
    for number, line in _lines(read_source(source)):
        if ":" not in line:
            raise ParseError("expected 'x y : permutation'", line=number)
        head, perm = line.split(":", 1)
        ends = [_token(t) for t in head.split()]
        if len(ends) != 2:
            raise ParseError("an edge needs exactly two endpoints", line=number, field="1")
        for e in ends:
            if e not in index:
                raise ParseError(f"unknown base point {e!r}", line=number, field="1")
        try:
            values = tuple(int(t) for t in perm.split())
        except ValueError:
            raise ParseError("permutation entries must be integers", line=number, field="2") from None
        out[(index[ends[0]], index[ends[1]])] = values
    return out


# ---------------------------------------------------------------------------
# canonical JSON


def _label(x):
    if isinstance(x, tuple):
        return [_label(v) for v in x]
    return x


def _unlabel(x):
    if isinstance(x, list):
        return tuple(_unlabel(v) for v in x)
    return x


def _dist(d: Optional[Fraction]) -> str:
    return "inf" if d is None else str(d)


def canonical(obj, kind: str) -> dict:
    if kind in ("graph", "digraph"):
        return {"kind": kind, "vertices": [_label(v) for v in obj.vertices],
                "edges": [[_label(u), _label(v)] for u, v in obj.edges()]}
    if kind == "metric":
        n = len(obj)
        return {"kind": "metric", "labels": [_label(o) for o in obj.objects],
                "matrix": [[_dist(obj.distance(a, b)) for b in range(n)] for a in range(n)]}
    if kind == "poset":
        p = obj.poset if isinstance(obj, RankedPoset) else obj
        data = {"kind": "poset", "elements": [_label(e) for e in p.elements],
                "relations": [[_label(p.elements[i]), _label(p.elements[j])] for i, j in p.covers()]}
        if isinstance(obj, RankedPoset):
            data["ranks"] = list(obj.phi)
        return data
    if kind == "category":
        return obj.to_json()
    if kind == "group":
        return _group_json(obj)
    if kind == "action":
        return obj.to_json()
    raise ParseError(f"unknown kind {kind!r}")


def _group_json(g: GroupPresentationBall) -> dict:
    data = {"kind": "group", "type": g.kind, "radius": g.radius, "symmetric": g.symmetric,
            "generators": [_label(s) for s in g.generators]}
    if g.kind == "cyclic":
        data["order"] = g.order
    elif g.kind in ("free", "free_abelian"):
        data["rank"] = g.rank
    else:
        data["elements"] = [_label(e) for e in g.elements]
        data["identity"] = _label(g.identity_element)
        data["table"] = [[_label(a), _label(b), _label(g.table[(a, b)])] for a in g.elements for b in g.elements]
    return data


def _need(data: dict, key: str, kind: str):
    if key not in data:
        raise ParseError(f"{kind} JSON is missing {key!r}", field=key)
    return data[key]


def from_canonical(data: dict, kind: str):
    if not isinstance(data, dict):
        raise ParseError("top-level JSON value must be an object")
    declared = data.get("kind", kind)
    if declared != kind:
        raise ParseError(f"expected kind {kind!r}, found {declared!r}", field="kind")
    try:
        return _from_canonical(data, kind)
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed {kind} JSON ({exc})") from None


def _from_canonical(data: dict, kind: str):
    if kind in ("graph", "digraph"):
        vertices = [_unlabel(v) for v in _need(data, "vertices", kind)]
        edges = [(_unlabel(u), _unlabel(v)) for u, v in _need(data, "edges", kind)]
        return LocallyFiniteGraph.from_edges(vertices, edges, directed=(kind == "digraph"))
    if kind == "metric":
        matrix = _need(data, "matrix", kind)
        rows = [[_parse_entry(str(x), i, j) for j, x in enumerate(row, 1)] for i, row in enumerate(matrix, 1)]
        labels = data.get("labels")
        return from_metric(rows, None if labels is None else [_unlabel(x) for x in labels])
    if kind == "poset":
        elements = [_unlabel(e) for e in _need(data, "elements", kind)]
        relations = [(_unlabel(a), _unlabel(b)) for a, b in _need(data, "relations", kind)]
        if "ranks" in data:
            return RankedPoset.from_covers(elements, relations, dict(zip(elements, data["ranks"])))
        return Poset.from_relations(elements, relations)
    if kind == "category":
        for i, m in enumerate(_need(data, "morphisms", kind)):
            for key in ("id", "source", "target", "degree"):
                if key not in m:
                    raise ParseError(f"morphism is missing {key!r}", field=f"morphisms[{i}].{key}")
            if m["degree"][1] == 0:
                raise ParseError("zero denominator", field=f"morphisms[{i}].degree")
        return FCat.from_json(data)
    if kind == "group":
        gtype = _need(data, "type", kind)
        table = None
        if gtype == "table":
            table = {(_unlabel(a), _unlabel(b)): _unlabel(c) for a, b, c in _need(data, "table", kind)}
        return GroupPresentationBall(
            gtype, [_unlabel(s) for s in data.get("generators", [])], _need(data, "radius", kind),
            rank=data.get("rank", 0), order=data.get("order", 0),
            elements=[_unlabel(e) for e in data.get("elements", [])], table=table,
            identity=_unlabel(data.get("identity")), symmetric=data.get("symmetric", True))
    if kind == "action":
        return MetricAction.from_json(data)
    raise ParseError(f"unknown kind {kind!r}")


def dumps(data) -> str:
    """Deterministic JSON text."""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
