"""The built-in corpus of small inputs, stored in the text formats."""

from __future__ import annotations

from typing import Dict, List, Tuple

from .fcat import (FCat, GroupPresentationBall, LocallyFiniteGraph, Poset, RankedPoset, from_finite_poset_unit,
                   from_graph, from_group, from_poset_ranked)
from .formats import parse_input

BUILTIN: Dict[str, Tuple[str, str]] = {
    "point": ("metric", "0\n"),
    "K2": ("graph", "a -- b\n"),
    "K3": ("graph", "0 -- 1 -- 2 -- 0\n"),
    "C4": ("graph", "0 -- 1 -- 2 -- 3 -- 0\n"),
    "C5": ("graph", "0 -- 1 -- 2 -- 3 -- 4 -- 0\n"),
    "K3xK2": ("graph", "a0 -- b0 -- c0 -- a0\na1 -- b1 -- c1 -- a1\na0 -- a1\nb0 -- b1\nc0 -- c1\n"),
    "K33": ("graph", "u1 -- v1 -- u2 -- v2 -- u3 -- v3 -- u1\nu1 -- v2\nu2 -- v3\nu3 -- v1\n"),
    "B2": ("poset", "e < x < xy\ne < y < xy\nrank e 0\nrank x 1\nrank y 1\nrank xy 2\n"),
    "triangle_faces": ("poset", "v1 < e12\nv2 < e12\nv1 < e13\nv3 < e13\nv2 < e23\nv3 < e23\n"),
    "Z5_cayley": ("group", '{"kind": "group", "type": "cyclic", "order": 5, "generators": [1], "radius": 2}\n'),
    "Z_ball": ("group", '{"kind": "group", "type": "free_abelian", "rank": 1, "generators": [[1]], "radius": 4}\n'),
    "diamond": ("digraph", "a -> b -> d\na -> c -> d\n"),
    "dicycle5": ("digraph", "0 -> 1 -> 2 -> 3 -> 4 -> 0\n"),
    "degenerate2": ("metric", "labels: p p'\n0 0\n0 0\n"),
}

UNIFORM = ("point", "K2", "K3", "C4", "C5", "K3xK2", "K33", "B2", "triangle_faces", "Z5_cayley", "Z_ball",
           "diamond", "dicycle5")


def names() -> List[str]:
    return list(BUILTIN)


def load(name: str):
    kind, text = BUILTIN[name]
    return parse_input(text, kind)


def to_category(obj) -> FCat:
    """The category an input stands for: graph metrics, poset metrics, Cayley graphs."""
    if isinstance(obj, FCat):
        return obj
    if isinstance(obj, LocallyFiniteGraph):
        return from_graph(obj)
    if isinstance(obj, RankedPoset):
        return from_poset_ranked(obj)
    if isinstance(obj, Poset):
        return from_finite_poset_unit(obj)
    if isinstance(obj, GroupPresentationBall):
        graph = obj.cayley_graph()
        return from_graph(graph, None if obj.whole_group_in_ball() else obj.radius)
    raise TypeError(f"no category for {type(obj).__name__}")


def category(name: str) -> FCat:
    return to_category(load(name))


def group_category(name: str) -> FCat:
    """One-object word-length category of a corpus group."""
    return from_group(load(name), allow_truncation=True)[0]
