"""Command-line entry point.

Every command prints one JSON document.  Exit codes: 0 success, 1 the
mathematics said no (a cut certificate, a shortfall, an invalid object),
2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .connectivity import lambda_count
from .immersion import (
    MODES,
    StarShape,
    brute_force_find,
    embed_in_star,
    immersion_from_dict,
    immersion_to_dict,
    star_graph,
    validate,
)
from .ksystem import (
    CutCertificate,
    KSystem,
    build_gx,
    certificate_from_dict,
    certificate_holds,
    certificate_to_dict,
    d_of,
    find_cut_certificate,
    ksystem_from_dict,
    ksystem_to_dict,
    validate_ksystem,
)
from .multigraph import GraphError, MultiGraph, read_edgelist
from .pipeline import PipelineError, find_star_immersion, trace_jsonl, trace_record


class InputError(Exception):
    pass


def _emit(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc) + "\n")


def _need(args, name: str):
    val = getattr(args, name)
    if val is None:
        raise InputError(f"--{name.replace('_', '-')} is required for {args.command}")
    return val


def _graph(path: str) -> MultiGraph:
    try:
        return read_edgelist(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not JSON: {exc}") from None


def _terminals(path: str, g: MultiGraph) -> List[int]:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln.split("#", 1)[0].strip() for ln in fh]
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        xs = sorted({int(ln) for ln in lines if ln})
    except ValueError:
        raise InputError(f"{path}: terminal ids must be integers") from None
    for x in xs:
        if not g.has_vertex(x):
            raise InputError(f"terminal {x} is not a vertex")
    return xs


def _default_terminals(g: MultiGraph, c: int, k: int) -> List[int]:
    return [x for x in sorted(g.vertices) if x != c and lambda_count(g, c, x, limit=k) >= k]


def _threshold(args, k: int, n: Optional[int], default: Optional[int]) -> int:
    raw = args.threshold
    if raw is None:
        if default is None:
            raise InputError("--threshold is required")
        return default
    if raw == "auto":
        if n is None:
            raise InputError("--threshold auto needs --n")
        return d_of(k) * n
    try:
        val = int(raw)
    except ValueError:
        raise InputError(f"--threshold must be an integer or 'auto', got {raw!r}") from None
    if val < 1:
        raise InputError("--threshold must be at least 1")
    return val


def _star_or_graph(d: dict, key: str, path: Optional[str], flag: str) -> MultiGraph:
    if path is not None:
        return _graph(path)
    shape = d.get(key)
    if shape is None:
        raise InputError(f"{flag} is required (or a '{key}' entry in the immersion JSON)")
    try:
        return star_graph(StarShape(int(shape["n"]), int(shape["k"])))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad {key} entry: {exc}") from None


def _certificate_doc(cert: CutCertificate, flow: int, threshold: int) -> dict:
    return {"result": "certificate", "certificate": certificate_to_dict(cert),
            "threshold": str(threshold), "flow": str(flow)}


def _ksystem_doc(s: KSystem) -> dict:
    return {"result": "ksystem", "magnitude": str(s.size), "ksystem": ksystem_to_dict(s)}


# -- commands ------------------------------------------------------------------


def cmd_validate_immersion(args) -> int:
    d = _json(_need(args, "immersion"))
    pattern = _star_or_graph(d, "pattern_star", args.pattern, "--pattern")
    host = _star_or_graph(d, "host_star", args.graph, "--graph")
    im = immersion_from_dict(d, pattern, host)
    rep = validate(im, args.mode)
    _emit({"valid": rep.ok, "mode": args.mode, "violations": rep.violations})
    return 0 if rep.ok else 1


def cmd_validate_certificate(args) -> int:
    g = _graph(_need(args, "graph"))
    c, k = _need(args, "center"), _need(args, "k")
    X = _terminals(_need(args, "terminals"), g)
    d = _json(_need(args, "certificate"))
    cert = certificate_from_dict(d.get("certificate", d), k)
    ok = certificate_holds(g, c, X, cert)
    _emit({"valid": ok, "cost": str(cert.cost)})
    return 0 if ok else 1


def cmd_validate_ksystem(args) -> int:
    g = _graph(_need(args, "graph"))
    d = _json(_need(args, "ksystem"))
    s = ksystem_from_dict(d.get("ksystem", d), g)
    magnitude = args.magnitude if args.magnitude is not None else int(d.get("magnitude", 1))
    rep = validate_ksystem(s, magnitude)
    _emit({"valid": rep.ok, "magnitude": str(magnitude), "violations": rep.violations})
    return 0 if rep.ok else 1


def _find(args, default_threshold: Optional[int]):
    g = _graph(_need(args, "graph"))
    c, k = _need(args, "center"), _need(args, "k")
    if not g.has_vertex(c):
        raise InputError(f"center {c} is not a vertex")
    X = _terminals(args.terminals, g) if args.terminals else _default_terminals(g, c, k)
    X = [x for x in X if x != c]
    if not X:
        raise InputError("no terminals")
    threshold = _threshold(args, k, args.n, default_threshold)
    return g, c, k, X, threshold, find_cut_certificate(g, c, X, k, threshold)


def _report_certificate(g, c, X, cert, threshold) -> int:
    if not certificate_holds(g, c, X, cert) or cert.cost >= threshold:
        raise PipelineError("certificate failed re-validation")
    _emit(_certificate_doc(cert, cert.cost, threshold))
    return 1


def _find_and_report(args, default_threshold: Optional[int]) -> int:
    g, c, k, X, threshold, res = _find(args, default_threshold)
    if isinstance(res, CutCertificate):
        return _report_certificate(g, c, X, res, threshold)
    rep = validate_ksystem(res, threshold)
    if not rep.ok:
        raise PipelineError(f"k-system failed re-validation: {rep.violations}")
    _emit(_ksystem_doc(res))
    return 0


def cmd_find_cut(args) -> int:
    return _find_and_report(args, None)


def cmd_find_ksystem(args) -> int:
    return _find_and_report(args, 1)


def _system_for_star(args):
    n = _need(args, "n")
    if n < 2:
        raise InputError("--n must be at least 2")
    if args.ksystem:
        g = _graph(_need(args, "graph"))
        d = _json(args.ksystem)
        s = ksystem_from_dict(d.get("ksystem", d), g)
        return g, s, n
    g, c, k, X, threshold, res = _find(args, 1)
    if isinstance(res, CutCertificate):
        return g, (c, X, res, threshold), n
    return g, res, n


def _run_pipeline(args):
    g, s, n = _system_for_star(args)
    if not isinstance(s, KSystem):
        return None, _report_certificate(g, *s)
    rep = validate_ksystem(s, 1)
    if not rep.ok:
        raise InputError(f"k-system is invalid: {rep.violations}")
    res = find_star_immersion(g, s, n)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(trace_jsonl(res))
    return (g, s, n, res), None


def cmd_find_star(args) -> int:
    ran, code = _run_pipeline(args)
    if ran is None:
        return code
    g, s, n, res = ran
    doc = {"result": "star" if res.complete else "shortfall", "requested": n,
           "achieved": res.star.achieved, "k": s.k}
    if res.immersion is not None:
        doc.update(immersion_to_dict(res.immersion))
        doc["pattern_star"] = {"n": res.star.achieved, "k": s.k}
    _emit(doc)
    return 0 if res.complete else 1


def cmd_pipeline_trace(args) -> int:
    ran, code = _run_pipeline(args)
    if ran is None:
        return code
    g, s, n, res = ran
    _emit({"stages": [trace_record(st) for st in res.stages],
           "steps": [{"rule": r, "measure": m} for r, m in res.steps],
           "requested": n, "achieved": res.star.achieved, "complete": res.complete})
    return 0 if res.complete else 1


def cmd_embed_star(args) -> int:
    f = _graph(_need(args, "pattern"))
    shape = StarShape(_need(args, "n"), _need(args, "k"))
    im = embed_in_star(f, shape)
    rep = validate(im, "strong")
    if not rep.ok:
        raise PipelineError(f"embedding failed re-validation: {rep.violations}")
    doc = immersion_to_dict(im)
    doc["host_star"] = {"n": shape.n, "k": shape.k}
    _emit(doc)
    return 0


def cmd_build_gx(args) -> int:
    g = _graph(_need(args, "graph"))
    X = _terminals(_need(args, "terminals"), g)
    m = args.m if args.m is not None else _need(args, "k")
    gx = build_gx(g, X, m)
    _emit({"m": m, "vertices": sorted(gx.vertices), "edges": [[u, v] for u, v in gx.edges.values()]})
    return 0


def cmd_oracle(args) -> int:
    pattern = _graph(_need(args, "pattern"))
    host = _graph(_need(args, "graph"))
    im = brute_force_find(pattern, host, args.mode)
    if im is None:
        _emit({"found": False, "mode": args.mode})
        return 1
    rep = validate(im, args.mode)
    if not rep.ok:
        raise PipelineError(f"oracle output failed re-validation: {rep.violations}")
    doc = {"found": True, "mode": args.mode}
    doc.update(immersion_to_dict(im))
    _emit(doc)
    return 0


COMMANDS = {
    "validate-immersion": cmd_validate_immersion,
    "validate-certificate": cmd_validate_certificate,
    "validate-ksystem": cmd_validate_ksystem,
    "find-cut": cmd_find_cut,
    "find-ksystem": cmd_find_ksystem,
    "find-star": cmd_find_star,
    "embed-star": cmd_embed_star,
    "build-gx": cmd_build_gx,
    "oracle": cmd_oracle,
    "pipeline-trace": cmd_pipeline_trace,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="starimm", description="Strong immersions of multistars around high-degree vertices.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--graph")
    p.add_argument("--pattern")
    p.add_argument("--k", type=int)
    p.add_argument("--center", type=int)
    p.add_argument("--terminals")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--mode", choices=MODES, default="strong")
    p.add_argument("--threshold")
    p.add_argument("--trace")
    p.add_argument("--immersion")
    p.add_argument("--certificate")
    p.add_argument("--ksystem")
    p.add_argument("--magnitude", type=int)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = make_parser().parse_args(argv)
        if args.k is not None and args.command not in ("embed-star", "build-gx") and args.k < 3:
            raise InputError("--k must be at least 3")
        return COMMANDS[args.command](args)
    except (InputError, GraphError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
