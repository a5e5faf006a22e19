"""Command line entry point.

Input files are JSON objects holding the ambient free product under
``"spec"`` (``{"factors": [{"cyclic": 3}, {"order": 2, "mul": [[0, 1], [1, 0]]}]}``)
and the subgroup either as ``"generators"`` (words ``[[factor, element], ...]``)
or as an irreducible ``"graph"``.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .agraph import (
    AGraph,
    EmptyCore,
    EmptyGeneratorSet,
    NotFactorFree,
    components,
    core,
    graph_from_json,
    graph_is_valid_over,
    graph_to_json,
    is_irreducible,
    reduced_rank,
    subgroup_graph,
)
from .embed import d_M, restrict_to_I, two_factor_pipeline
from .fiber import fiber_core, has_property_Bd
from .groups import FreeProductSpec, NotAGroup, q_ratio, q_star
from .lp import SolverError, primal_point, sli_problem, solve_sli, to_lp_text
from .oracle import ratio_table
from .sli import OracleFailure, enumerate_sli
from .witness import (
    UnbalancedCombination,
    WitnessContradiction,
    ZeroVector,
    verify_witness,
    witness_from_system,
    witness_json,
)

EXIT_OK, EXIT_USAGE, EXIT_NOT_FF, EXIT_CONTRA = 0, 1, 2, 3


class UsageError(Exception):
    pass


class Refused(Exception):
    """Input is well formed but not factor-free."""


def _load(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _spec(data: dict) -> FreeProductSpec:
    raw = data.get("spec", data)
    if "factors" not in raw:
        raise UsageError("input lacks a free product spec")
    return FreeProductSpec.from_json(raw)


def _words(data: dict) -> list:
    return [[(int(f), int(x)) for f, x in w] for w in data["generators"]]


def _graph(data: dict, spec: FreeProductSpec) -> AGraph:
    """Irreducible core graph of the input subgroup."""
    if "graph" in data:
        g = graph_from_json(data["graph"])
        if not graph_is_valid_over(g, spec):
            raise UsageError("graph labels do not match the free product")
        if not is_irreducible(g):
            raise UsageError("input graph is not irreducible")
    elif "generators" in data:
        res = subgroup_graph(_words(data), spec)
        if isinstance(res, NotFactorFree):
            raise Refused(f"not factor-free (secondary {res.secondary}, factor {res.alpha})")
        g = res.graph
    else:
        raise UsageError("input needs 'generators' or 'graph'")
    try:
        return core(g)
    except EmptyCore as exc:
        raise UsageError("subgroup is cyclic or trivial") from exc


def _positive(g: AGraph) -> None:
    if reduced_rank(g) <= 0 or len(components(g)) != 1:
        raise UsageError("subgroup must be noncyclic")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _emit(args, report: dict, lines: list[str]) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(_dump(report) + "\n")
    if args.json:
        print(_dump(report))
    else:
        for ln in lines:
            print(ln)


def _two_factor(g: AGraph, spec: FreeProductSpec):
    if len(g.types()) < 2:
        raise UsageError("subgroup must use two factors")
    h, sub, idx = restrict_to_I(g, spec)
    if sub.m != 2:
        raise UsageError("three or more factors in use: pass --embed")
    return h, sub, idx


def _default_d(args, g: AGraph, spec: FreeProductSpec) -> int:
    if args.d is not None:
        if args.d < 3:
            raise UsageError("--d must be at least 3")
        return args.d
    if not all(hasattr(spec.factor(a), "order") for a in g.types()):
        raise UsageError("--d is required for infinite factors")
    return max(3, d_M(g, spec))


# ---------------------------------------------------------------------------
# subcommands

def cmd_check(args) -> int:
    data = _load(args.input)
    spec = _spec(data)
    try:
        res = subgroup_graph(_words(data), spec)
    except EmptyGeneratorSet:
        _emit(args, {"factor_free": True, "cyclic": True, "rank": 0},
              ["factor-free: yes", "cyclic: yes (trivial)"])
        return EXIT_OK
    if isinstance(res, NotFactorFree):
        report = {"factor_free": False, "secondary": res.secondary, "alpha": res.alpha,
                  "labels": [res.l1, res.l2]}
        _emit(args, report, ["factor-free: no",
                             f"conflicting labels {res.l1}, {res.l2} at a type-{res.alpha} secondary"])
        return EXIT_NOT_FF
    g = res.graph
    rank = g.n_edges - g.n_vertices + 1
    report = {"factor_free": True, "cyclic": rank <= 1, "rank": rank, "graph": graph_to_json(g)}
    _emit(args, report, ["factor-free: yes", f"cyclic: {'yes' if rank <= 1 else 'no'}",
                         f"rank: {rank}",
                         f"graph: {len(g.primary)} primary, {len(g.secondary)} secondary"])
    return EXIT_OK


def _sigma_report(g, spec, d, res, sys) -> dict:
    q = q_star(spec)
    upper = 2 * q_ratio(q)
    x, xs = primal_point(res, sys)
    point = {f"xA_{k:x}": str(v) for k, v in sorted(x.items()) if v}
    point["xs"] = str(xs)
    return {
        "sigma_d": str(res.sigma),
        "d": d,
        "brr": res.brr,
        "inequalities": len(sys.inequalities),
        "primal_value": str(res.primal_value),
        "dual_value": str(res.dual_value),
        "q_star": None if q == float("inf") else int(q),
        "upper_bound": str(upper),
        "upper_bound_ok": res.sigma <= upper,
        "is_sigma": spec.all_finite() and d >= d_M(g, spec),
        "primal_point": point,
        "dual": {str(k): str(v) for k, v in enumerate(res.dual_y) if v},
        "basis": list(res.primal.basis),
    }


def cmd_sigma(args) -> int:
    data = _load(args.input)
    spec = _spec(data)
    g = _graph(data, spec)
    _positive(g)
    if args.embed and len(g.types()) >= 3:
        if not spec.all_finite():
            raise UsageError("--embed needs finite factors")
        rep = two_factor_pipeline(g, spec, args.d)
        report = rep.to_json()
        _emit(args, report, [f"sigma_{rep.d}(mu2(H1)) = {rep.sigma}",
                             f"g = {list(rep.g)}",
                             f"conjecture bound q*/(q*-2) = {rep.bound}: "
                             + ("holds" if rep.conjecture_holds else "undecided")])
        return EXIT_OK
    h, sub, _ = _two_factor(g, spec)
    d = _default_d(args, h, sub)
    sys_ = enumerate_sli(h, d, sub)
    if args.lp_out:
        with open(args.lp_out, "w") as fh:
            fh.write(to_lp_text(sli_problem(sys_), f"d = {d}"))
    res = solve_sli(sys_)
    report = _sigma_report(h, sub, d, res, sys_)
    if not report["upper_bound_ok"]:
        raise WitnessContradiction("sigma_d exceeds 2q*/(q*-2)")
    _emit(args, report, [f"sigma_{d} = {res.sigma}",
                         f"inequalities: {len(sys_.inequalities)}",
                         f"primal = dual = {res.dual_value}"])
    return EXIT_OK


def cmd_witness(args) -> int:
    data = _load(args.input)
    spec = _spec(data)
    g = _graph(data, spec)
    _positive(g)
    h, sub, _ = _two_factor(g, spec)
    d = _default_d(args, h, sub)
    sys_ = enumerate_sli(h, d, sub)
    res = solve_sli(sys_)
    w, rep, q = witness_from_system(sys_, sub, res)
    out = witness_json(w, rep, q, res, sys_)
    out["spec"] = sub.to_json()
    _emit(args, out, [f"sigma_{d} = {res.sigma}",
                      f"witness: {len(w.primary)} primary, {len(w.secondary)} secondary, brr {rep.brr_y2}",
                      f"brr(core) = {rep.brr_fiber} = sigma * {rep.brr_y1} * {rep.brr_y2}: {rep.equality_ok}",
                      f"connected: {rep.connected}", f"size bound: {rep.size_bound_ok}"])
    if not rep.ok:
        raise WitnessContradiction("witness verification failed")
    return EXIT_OK


def cmd_intersect(args) -> int:
    a, b = _load(args.input), _load(args.other)
    spec = _spec(a)
    y1, y2 = _graph(a, spec), _graph(b, spec)
    fc = fiber_core(y1, y2, spec)
    rows = fc.component_table()
    total = fc.brr()
    b1, b2 = reduced_rank(y1), reduced_rank(y2)
    report = {"brr": total, "brr_h1": b1, "brr_h2": b2, "components": rows,
              "ratio": str(Fraction(total, b1 * b2)) if b1 * b2 else None}
    lines = [f"brr(H1, H2) = {total}"]
    lines += [f"  component at {r['min_pair']}: {r['primary']} primary, "
              f"{r['secondary']} secondary, brr {r['brr']}" for r in rows]
    _emit(args, report, lines)
    return EXIT_OK


def cmd_oracle(args) -> int:
    data = _load(args.input)
    spec = _spec(data)
    g = _graph(data, spec)
    _positive(g)
    if not spec.all_finite():
        raise UsageError("oracle needs finite factors")
    d = _default_d(args, g, spec)
    rows = ratio_table(g, spec, d, args.max_secondary)
    _emit(args, {"d": d, "table": rows},
          [f"cap {r['max_secondary']}: {r['ratio']}" for r in rows])
    return EXIT_OK


def cmd_verify(args) -> int:
    data = _load(args.input)
    spec = _spec(data)
    y1 = _graph(data, spec)
    wit = _load(args.witness)
    y2 = graph_from_json(wit["graph"])
    h, sub, _ = _two_factor(y1, spec)
    d = args.d if args.d is not None else wit["provenance"]["d"]
    sigma = Fraction(wit["report"]["sigma"])
    rep = verify_witness(h, y2, sigma, d, sub)
    report = rep.to_json()
    report["property_bd_recheck"] = has_property_Bd(h, y2, d, sub)
    _emit(args, report, [f"ok: {rep.ok}", f"brr(core) = {rep.brr_fiber}",
                         f"sigma * brr1 * brr2 = {sigma * rep.brr_y1 * rep.brr_y2}"])
    return EXIT_OK if rep.ok else EXIT_CONTRA


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wncoeff", description="WN-coefficients of subgroups of free products.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="write the JSON report here")
        sp.add_argument("--json", action="store_true", help="print JSON instead of text")

    sp = sub.add_parser("check", help="factor-freeness and the irreducible graph")
    sp.add_argument("input")
    common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("sigma", help="exact sigma_d via the linear program")
    sp.add_argument("input")
    sp.add_argument("--d", type=int)
    sp.add_argument("--embed", action="store_true", help="reduce three or more factors to two")
    sp.add_argument("--lp-out", help="export the LP in text form")
    common(sp)
    sp.set_defaults(func=cmd_sigma)

    sp = sub.add_parser("witness", help="extremal subgroup from an optimal dual vertex")
    sp.add_argument("input")
    sp.add_argument("--d", type=int)
    common(sp)
    sp.set_defaults(func=cmd_witness)

    sp = sub.add_parser("intersect", help="generalized intersection of two subgroups")
    sp.add_argument("input")
    sp.add_argument("other")
    common(sp)
    sp.set_defaults(func=cmd_intersect)

    sp = sub.add_parser("oracle", help="brute-force lower bounds on sigma_d")
    sp.add_argument("input")
    sp.add_argument("--d", type=int)
    sp.add_argument("--max-secondary", type=int, default=3)
    common(sp)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("verify", help="recheck a witness file")
    sp.add_argument("input")
    sp.add_argument("witness")
    sp.add_argument("--d", type=int)
    common(sp)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except Refused as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_FF
    except (SolverError, WitnessContradiction, UnbalancedCombination, ZeroVector, OracleFailure) as exc:
        print(f"internal contradiction: {exc}", file=sys.stderr)
        return EXIT_CONTRA
    except (UsageError, NotAGroup, KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
