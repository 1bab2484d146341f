"""Command-line front end.

Exit codes: 0 on success, 1 on usage or validation errors, 2 when a size
guardrail is exceeded. Output is byte-deterministic.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from contextlib import redirect_stdout
from typing import List, Optional

from . import corpus
from .errors import FsetmagError, ResourceError
from .fcat import FCat, GroupPresentationBall, LocallyFiniteGraph, Poset, RankedPoset, from_group
from .formats import KINDS, ParseError, canonical, dumps, parse_input, parse_twists, read_source
from .novikov import exponent


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--cutoff", default="5", help="truncation exponent L (integer or p/q); terms q^L are kept")
    p.add_argument("--max-n", type=int, default=None, help="largest chain degree")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--guardrail-cells", type=int, default=None, help="size limit for the Hochschild complex")
    return p


def _with_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", nargs="?", help="input file, or the input text itself")
    p.add_argument("--kind", choices=KINDS, help="input kind (inferred when omitted)")
    p.add_argument("--corpus", dest="corpus_name", metavar="NAME", choices=corpus.names(),
                   help="use a built-in corpus entry instead of an input")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="fsetmag", description="Magnitude and magnitude homology of filtered-set enriched "
                                                 "categories, computed exactly.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        return p

    for name, text in (("mag", "magnitude"), ("weighting", "weighting k^a"), ("coweighting", "coweighting k_a"),
                       ("classify", "finiteness and tameness report")):
        p = command(name, text)
        _with_input(p)
        if name in ("mag", "weighting", "coweighting"):
            p.add_argument("--strategy", choices=("auto", "neumann", "constant_term_lu"), default="auto")
        p.add_argument("--one-object", action="store_true", help="for groups: the one-object word-length category")

    p = command("homology", "magnitude homology MH^l_n")
    _with_input(p)
    p.add_argument("--l", dest="ell", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--basepoint", default=None)
    p.add_argument("--endpoint", default=None)
    p.add_argument("--unnormalized", action="store_true")

    p = command("euler-check", "alternating betti sums against magnitude coefficients")
    _with_input(p)

    p = command("hochschild-check", "graded Hochschild homology against magnitude homology")
    _with_input(p)
    p.add_argument("--l", dest="ell", required=True)

    p = command("specseq", "pages of the degree-filtration spectral sequence")
    _with_input(p)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--max-p", type=int, default=3)
    p.add_argument("--L", dest="cap_l", type=int, default=5)
    p.add_argument("--N", dest="cap_n", type=int, default=5)

    p = command("pathhom", "reduced path homology of a digraph")
    _with_input(p)
    p.add_argument("--max-p", type=int, default=3)
    p.add_argument("--compare-e2", action="store_true", help="also compare with E^2_{p,0}")

    for name, text in (("mobius", "Möbius function of a poset"), ("poincare", "Poincaré polynomial"),
                       ("growth", "growth series of a group"), ("validate", "parse and echo canonical JSON")):
        p = command(name, text)
        _with_input(p)

    fib = sub.add_parser("fib", help="metric actions and fibrations")
    fsub = fib.add_subparsers(dest="fib_command", required=True, parser_class=_Parser)
    p = fsub.add_parser("build", parents=[common], help="total space of a twisted action")
    p.add_argument("--base", required=True)
    p.add_argument("--fiber", required=True)
    p.add_argument("--twists", default=None)
    p = fsub.add_parser("check", parents=[common], help="is a map a metric fibration")
    p.add_argument("--total", required=True)
    p.add_argument("--base", required=True)
    p.add_argument("--map", dest="mapping", required=True)
    p = fsub.add_parser("product-check", parents=[common], help="magnitude product formula")
    p.add_argument("--action", default=None)
    p.add_argument("--base", default=None)
    p.add_argument("--fiber", default=None)
    p.add_argument("--twists", default=None)

    check = sub.add_parser("check", help="run checks")
    csub = check.add_subparsers(dest="check_command", required=True, parser_class=_Parser)
    p = csub.add_parser("all", parents=[common], help="the acceptance suite")
    p.add_argument("--corpus", dest="suite", choices=("builtin",), default="builtin")
    return parser


# ---------------------------------------------------------------------------
# inputs


def infer_kind(text: str) -> str:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            kind = json.loads(text).get("kind")
        except (json.JSONDecodeError, AttributeError):
            kind = None
        if kind in KINDS:
            return kind
        raise ParseError("JSON input needs a \"kind\" field or --kind")
    body = "\n".join(line.split("#", 1)[0] for line in text.splitlines())
    if "->" in body:
        return "digraph"
    if "--" in body:
        return "graph"
    if "<" in body or "rank " in body:
        return "poset"
    return "metric"


def load(source: Optional[str], kind: Optional[str] = None, corpus_name: Optional[str] = None):
    """Parsed input object and its kind."""
    if corpus_name is not None:
        kind, text = corpus.BUILTIN[corpus_name]
        return parse_input(text, kind), kind
    if source is None:
        raise ParseError("an input file, inline input or --corpus is required")
    text = read_source(source)
    kind = kind or infer_kind(text)
    return parse_input(text, kind), kind


def _category(args) -> FCat:
    obj, _ = load(args.input, args.kind, args.corpus_name)
    if getattr(args, "one_object", False):
        if not isinstance(obj, GroupPresentationBall):
            raise ParseError("--one-object needs a group input")
        return from_group(obj, allow_truncation=True)[0]
    return corpus.to_category(obj)


def _label_index(c: FCat, name: str) -> int:
    for i, o in enumerate(c.objects):
        if str(o) == name:
            return i
    raise ParseError(f"unknown object {name!r}")


# ---------------------------------------------------------------------------
# commands


def _text(data) -> str:
    if isinstance(data, dict):
        lines = []
        for key in data:
            value = data[key]
            if isinstance(value, (dict, list)):
                value = json.dumps(value, sort_keys=True, ensure_ascii=False)
            lines.append(f"{key}: {value}")
        return "\n".join(lines) + "\n"
    return f"{data}\n"


def _cmd_mag(args):
    from .magnitude import magnitude
    m = magnitude(_category(args), args.cutoff, args.strategy)
    return {"magnitude": str(m), "cutoff": str(m.cutoff), "exact": m.exact}, str(m)


def _cmd_weights(args):
    from .magnitude import coweighting, weighting
    fn = weighting if args.command == "weighting" else coweighting
    w = fn(_category(args), args.cutoff, args.strategy)
    data = w.to_json()
    text = "\n".join(f"{v['object']}: {v['series']}" for v in data["values"])
    return data, text


def _cmd_classify(args):
    from .magnitude import classify
    return classify(_category(args)).to_json(), None


def _cmd_homology(args):
    from .maghom import homology_table, max_chain_length
    c = _category(args)
    ell = exponent(args.ell)
    basepoints = []
    if args.basepoint is not None:
        basepoints.append(_label_index(c, args.basepoint))
    if args.endpoint is not None:
        if not basepoints:
            raise ParseError("--endpoint needs --basepoint")
        basepoints.append(_label_index(c, args.endpoint))
    if args.n is not None:
        max_n = args.n + 1
    else:
        max_n = args.max_n if args.max_n is not None else max_chain_length(c, ell) + 1
    table = homology_table(c, ell, max_n, basepoints, normalized=not args.unnormalized)
    rows = [(n, h) for n, h in enumerate(table) if args.n is None or n == args.n]
    data = {"l": str(ell), "rows": [{"n": n, **h.to_json()} for n, h in rows]}
    text = "\n".join(f"MH^{ell}_{n}: betti {h.betti}" + (f", torsion {h.torsion}" if h.torsion else "")
                     for n, h in rows)
    return data, text


def _cmd_euler(args):
    from .maghom import euler_categorification_check
    return euler_categorification_check(_category(args), args.cutoff, args.max_n).to_json(), None


def _cmd_hochschild(args):
    from .maghom import DEFAULT_GUARDRAIL_CELLS, hochschild_graded_check
    limit = args.guardrail_cells or DEFAULT_GUARDRAIL_CELLS
    max_n = 2 if args.max_n is None else args.max_n
    return hochschild_graded_check(_category(args), args.ell, max_n, limit).to_json(), None


def _cmd_specseq(args):
    from .specseq import build_filtered_chain
    fc = build_filtered_chain(_category(args), args.cap_l, args.cap_n)
    entries = [fc.page(args.r, p, n - p) for p in range(args.max_p + 1) for n in range(args.cap_n)]
    data = {"r": args.r, "L": args.cap_l, "N": args.cap_n, "entries": [e.to_json() for e in entries]}
    text = "\n".join(f"E^{e.r}[{e.p},{e.q}] = {e.dimension}" + ("" if e.valid else " (cap-limited)")
                     for e in entries)
    return data, text


def _digraph(args):
    from .specseq import Digraph
    obj, kind = load(args.input, args.kind, args.corpus_name)
    if not isinstance(obj, LocallyFiniteGraph):
        raise ParseError("path homology needs a digraph input")
    edges = obj.edges()
    if obj.symmetric:
        edges = edges + [(v, u) for u, v in edges]
    return Digraph(obj.vertices, edges)


def _cmd_pathhom(args):
    from .specseq import e2_vs_path_homology, path_homology
    d = _digraph(args)
    betti = [h.betti for h in path_homology(d, args.max_p)]
    data = {"reduced_betti": betti}
    if args.compare_e2:
        data["e2"] = e2_vs_path_homology(d, args.max_p).to_json()
    text = "\n".join(f"H~_{p}: {b}" for p, b in enumerate(betti))
    if args.compare_e2:
        text += f"\nE2 agreement: {data['e2']['equal']}"
    return data, text


def _poset(args):
    obj, _ = load(args.input, args.kind or "poset", args.corpus_name)
    if not isinstance(obj, (Poset, RankedPoset)):
        raise ParseError("this command needs a poset input")
    return obj


def _cmd_mobius(args):
    from .magnitude import mobius
    obj = _poset(args)
    p = obj.poset if isinstance(obj, RankedPoset) else obj
    mu = mobius(p)
    labels = [str(e) for e in p.elements]
    return {"elements": labels, "mobius": mu}, "\n".join(
        f"mu({labels[i]}, {labels[j]}) = {mu[i][j]}" for i in range(len(p)) for j in range(len(p)) if mu[i][j])


def _cmd_poincare(args):
    from .magnitude import poincare_polynomial
    obj = _poset(args)
    if not isinstance(obj, RankedPoset):
        raise ParseError("the Poincaré polynomial needs rank lines")
    return poincare_polynomial(obj).to_json(), None


def _cmd_growth(args):
    from .magnitude import growth_series
    obj, _ = load(args.input, args.kind or "group", args.corpus_name)
    if not isinstance(obj, GroupPresentationBall):
        raise ParseError("growth needs a group input")
    return growth_series(obj, args.cutoff).to_json(), None


def _cmd_validate(args):
    obj, kind = load(args.input, args.kind, args.corpus_name)
    data = canonical(obj, kind)
    return data, dumps(data).rstrip("\n")


def _metric_input(source: str) -> FCat:
    obj, _ = load(source)
    return corpus.to_category(obj)


def _twisted_action(args):
    from .fibration import action_from_twists
    base, fiber = _metric_input(args.base), _metric_input(args.fiber)
    twists = parse_twists(args.twists, base) if args.twists else {}
    return action_from_twists(base, fiber, twists)


def _cmd_fib(args):
    from .fibration import (MetricAction, Counterexample, extract_action, grothendieck, is_metric_fibration,
                            product_formula_check)
    if args.fib_command == "build":
        action = _twisted_action(args)
        total = grothendieck(action)
        return {"action": action.to_json(), "total": canonical(total, "metric")}, None
    if args.fib_command == "check":
        total, base = _metric_input(args.total), _metric_input(args.base)
        proj = []
        pairs = {}
        for line in read_source(args.mapping).splitlines():
            line = line.split("#", 1)[0].split()
            if line:
                if len(line) != 2:
                    raise ParseError(f"map lines are 'point base-point', got {' '.join(line)!r}")
                pairs[line[0]] = line[1]
        for o in total.objects:
            if str(o) not in pairs:
                raise ParseError(f"map does not cover {o!r}")
            proj.append(_label_index(base, pairs[str(o)]))
        result = is_metric_fibration(total, base, proj)
        if isinstance(result, Counterexample):
            return {"fibration": False, "counterexample": result.to_json()}, None
        action = extract_action(result)
        return {"fibration": True, "action": action.to_json()}, None
    if args.action:
        obj, _ = load(args.action, "action")
        action = obj
    else:
        if not (args.base and args.fiber):
            raise ParseError("product-check needs --action or --base and --fiber")
        action = _twisted_action(args)
    return product_formula_check(action, args.cutoff).to_json(), None


def _cmd_check(args):
    from .acceptance import run_all
    outcomes = run_all()
    data = {"passed": sum(o.ok for o in outcomes), "total": len(outcomes),
            "criteria": [{"number": o.number, "title": o.title, "pass": o.ok, "detail": o.detail}
                         for o in outcomes]}
    text = "\n".join(o.line() for o in outcomes) + f"\n{data['passed']}/{data['total']} criteria passed"
    return data, text


COMMANDS = {
    "mag": _cmd_mag, "weighting": _cmd_weights, "coweighting": _cmd_weights, "classify": _cmd_classify,
    "homology": _cmd_homology, "euler-check": _cmd_euler, "hochschild-check": _cmd_hochschild,
    "specseq": _cmd_specseq, "pathhom": _cmd_pathhom, "mobius": _cmd_mobius, "poincare": _cmd_poincare,
    "growth": _cmd_growth, "validate": _cmd_validate, "fib": _cmd_fib, "check": _cmd_check,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        data, text = COMMANDS[args.command](args)
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FsetmagError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.format == "json":
        sys.stdout.write(dumps(data))
    else:
        sys.stdout.write(_text(data) if text is None else text + "\n")
    if args.command == "check":
        return 0 if data["passed"] == data["total"] else 1
    return 0


def run_captured(argv: List[str]) -> tuple:
    """(exit code, stdout) of one in-process invocation."""
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


PROBE_COMMANDS = [
    ["mag", "--corpus", "K3", "--cutoff", "4"],
    ["weighting", "--corpus", "C5", "--format", "json"],
    ["classify", "--corpus", "diamond", "--format", "json"],
    ["homology", "--corpus", "C4", "--l", "2", "--format", "json"],
    ["specseq", "--corpus", "K2", "--r", "2", "--L", "4", "--N", "4"],
    ["pathhom", "--corpus", "dicycle5", "--format", "json"],
    ["poincare", "--corpus", "B2"],
    ["growth", "--corpus", "Z5_cayley", "--cutoff", "6", "--format", "json"],
    ["validate", "--corpus", "K33", "--format", "json"],
]


def determinism_probe() -> bool:
    """Every probe command produces identical bytes on two runs."""
    return all(run_captured(cmd) == run_captured(cmd) for cmd in PROBE_COMMANDS)


if __name__ == "__main__":
    sys.exit(main())
