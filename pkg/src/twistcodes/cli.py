"""``twistcodes`` command line.

Every subcommand prints one JSON document on stdout.  Exit status is 0 on
success, 2 when a verification fails (the JSON then carries the witness)
and 1 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import codes, ferrers, golden, gf, msrd
from .errors import TwistCodesError
from .parse import parse_element, parse_poly, parse_ratfun, split_list
from .twist import TwistAut, moore

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2


@dataclass
class Result:
    payload: dict
    status: int = EXIT_OK
    tables: dict[str, list[list[str]]] = field(default_factory=dict)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 by default
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# Shared argument groups
# ---------------------------------------------------------------------------


def _add_tower(p: argparse.ArgumentParser, top: bool = False) -> None:
    g = p.add_argument_group("field tower")
    g.add_argument("--q", type=int, help="size of the base field F_q (a prime power)")
    g.add_argument("--p", type=int, help="characteristic (alternative to --q)")
    g.add_argument("--s", type=int, default=None, help="degree of F_q over F_p (with --p)")
    g.add_argument("--m", type=int, help="degree of F_{q^m} over F_q")
    if top:
        g.add_argument("--r", type=int, help="degree of the top extension")
    g.add_argument("--moduli", help="JSON list of moduli, one per extension step")
    g.add_argument("--example", action="store_true", help="the F_27 < F_{3^12} example tower")
    g.add_argument("--lambda", dest="lam", default="auto", help="twist parameter (expression, JSON, or 'auto')")


def _tower(args: argparse.Namespace, with_top: bool = False) -> gf.FieldTower:
    if args.example:
        return gf.example_tower(with_top=with_top)
    if args.q is None and args.p is None:
        raise UsageError("give --q (or --p/--s), or --example")
    if args.q is not None:
        factors = gf.prime_factors(args.q)
        if len(factors) != 1:
            raise UsageError(f"--q {args.q} is not a prime power")
        p = factors[0]
        s, v = 0, args.q
        while v > 1:
            v //= p
            s += 1
        if args.p is not None and args.p != p:
            raise UsageError("--p disagrees with --q")
    else:
        p, s = args.p, args.s or 1
    m = args.m or 1
    r = getattr(args, "r", None) if with_top else None
    moduli = json.loads(args.moduli) if args.moduli else None
    return gf.FieldTower(p, s, m, r, moduli)


def _phi(args: argparse.Namespace, tower: gf.FieldTower) -> TwistAut:
    if args.lam in (None, "auto"):
        return TwistAut.auto(tower)
    return TwistAut(tower, parse_element(args.lam, tower))


def _load_json(path: str) -> dict:
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def _strs(rows: Sequence[Sequence[Any]]) -> list[list[str]]:
    return [[str(e) for e in row] for row in rows]


def _threads(args: argparse.Namespace) -> int:
    if getattr(args, "threads", None):
        return args.threads
    return codes.default_workers()


# ---------------------------------------------------------------------------
# Field commands
# ---------------------------------------------------------------------------


def cmd_field_info(args) -> Result:
    T = _tower(args, with_top=True)
    levels = {gf.LEVEL_NAMES[i]: {"order": T.level(i).order, "dim_over_p": T.level(i).dim} for i in range(T.top_level + 1)}
    return Result({"tower": T.to_json(), "levels": levels})


def cmd_find_lambda(args) -> Result:
    T = _tower(args)
    lam = gf.find_lambda(T)
    N = gf.norm(lam)
    return Result({"lambda": lam.to_json(), "lambda_str": str(lam), "norm": N.to_json(), "norm_order": gf.multiplicative_order(N)})


def cmd_moore(args) -> Result:
    T = _tower(args)
    phi = _phi(args, T)
    pts = [parse_ratfun(s, T) for s in split_list(args.points)]
    W = moore(phi, pts, rows=args.rows)
    out: dict[str, Any] = {"lambda": phi.lam.to_json(), "entries": W.to_json(), "entries_str": _strs(W.entries)}
    if len(W.entries) == W.n:
        det = W.det()
        out["det"] = det.to_json()
        out["det_str"] = str(det)
        out["independent"] = not det.is_zero()
    return Result(out, tables={"Moore matrix": _strs(W.entries)})


# ---------------------------------------------------------------------------
# MRD codes
# ---------------------------------------------------------------------------


def _code_result(G: codes.GenMatrix, extra: dict | None = None) -> Result:
    out = G.to_json()
    out["entries_str"] = _strs(G.entries)
    if extra:
        out.update(extra)
    return Result(out, tables={"generator": _strs(G.entries)})


def cmd_construct_mrd(args) -> Result:
    T = _tower(args)
    phi = _phi(args, T)
    pts = [parse_ratfun(s, T) for s in split_list(args.points)]
    return _code_result(codes.construct_mrd(phi, pts, args.k))


def cmd_reduce(args) -> Result:
    G = codes.GenMatrix.from_json(_load_json(args.code))
    base = G.tower.base_tower()
    if args.search:
        res = codes.search_reduction(G, args.r_min, args.r_max, args.seeds, _threads(args))
        if res.code is None:
            return Result({"certified": False, "tried": res.tried}, EXIT_FAILED)
        return _code_result(res.code, {"certificate": res.certificate.to_json(), "tried": res.tried})
    if args.f:
        f = parse_poly(args.f, base)
    elif args.fallback:
        f = gf.irreducible(base, codes.fallback_degree(G.k, base.q), args.seed)
    elif args.r:
        f = gf.irreducible(base, args.r, args.seed)
    else:
        raise UsageError("give one of --f, --r, --fallback or --search")
    return _code_result(codes.reduce_code(G, f, allow_small_degree=args.allow_small_degree))


def cmd_certify(args) -> Result:
    G = codes.GenMatrix.from_json(_load_json(args.code))
    cert = codes.certify_mrd(G, _threads(args))
    return Result(cert.to_json(), EXIT_OK if cert.certified else EXIT_FAILED)


def cmd_distance(args) -> Result:
    G = codes.GenMatrix.from_json(_load_json(args.code))
    d = codes.min_rank_distance(G, args.budget)
    return Result({"distance": d, "n": G.n, "k": G.k, "singleton": G.n - G.k + 1, "mrd": d == G.n - G.k + 1})


def cmd_twisted(args) -> Result:
    T = _tower(args)
    eta = parse_element(args.eta, T)
    pts = [parse_element(s, T) for s in split_list(args.points)]
    G = codes.twisted_gabidulin(T, args.k, args.h, args.s_twist, eta, pts)
    extra = {}
    if args.frobenius:
        extra["frobenius_intersections"] = {str(s): codes.intersection_dim(G, codes.frobenius_code(G, s)) for s in args.frobenius}
    return _code_result(G, extra)


def cmd_intersect(args) -> Result:
    C1 = codes.GenMatrix.from_json(_load_json(args.code))
    out: dict[str, Any] = {}
    if args.other:
        C2 = codes.GenMatrix.from_json(_load_json(args.other))
        out["dim"] = codes.intersection_dim(C1, C2)
    if args.frobenius:
        out["frobenius_intersections"] = {str(s): codes.intersection_dim(C1, codes.frobenius_code(C1, s)) for s in args.frobenius}
    if not out:
        raise UsageError("give --with and/or --frobenius")
    return Result(out)


# ---------------------------------------------------------------------------
# Ferrers codes
# ---------------------------------------------------------------------------


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.replace(" ", "").split(",") if t]


def _profile(text: str) -> ferrers.BlockProfile:
    """``2x2,4x2``: blocks written as height x count."""
    blocks = []
    for part in text.replace(" ", "").split(","):
        h, _, c = part.partition("x")
        if not c:
            raise UsageError(f"profile block {part!r} must look like HEIGHTxCOUNT")
        blocks.append((int(h), int(c)))
    return ferrers.BlockProfile(tuple(blocks))


def cmd_ferrers_bound(args) -> Result:
    D = ferrers.FerrersDiagram(tuple(_ints(args.heights)))
    return Result({"heights": list(D.heights), "d": args.d, "bound": ferrers.es_bound(D, args.d)})


def _ferrers_result(code: ferrers.FerrersCode, report: dict) -> Result:
    ok = report["fits"] and report["distance_ok"] and report.get("independent", True)
    return Result(code.to_json(), EXIT_OK if ok else EXIT_FAILED)


def cmd_ferrers_construct(args) -> Result:
    T = _tower(args)
    lam = None if args.lam in (None, "auto") else parse_element(args.lam, T)
    if args.staircase:
        m, n = _ints(args.staircase)
        profile = ferrers.staircase_profile(m, n)
    elif args.profile:
        profile = _profile(args.profile)
    else:
        raise UsageError("give --profile or --staircase")
    if args.override:
        code = ferrers.construct_ferrers_general(profile, _ints(args.override), args.d, T, lam)
    else:
        code = ferrers.construct_ferrers(profile, args.d, T, lam)
    report = ferrers.verify_ferrers(code, args.d, args.budget, args.seed)
    return _ferrers_result(code, report)


def cmd_ferrers_verify(args) -> Result:
    if args.code:
        data = _load_json(args.code)
        D = ferrers.FerrersDiagram.from_json(data["diagram"])
        T = gf.FieldTower.from_json(data["tower"]) if "tower" in data else _tower(args)
        d = args.d or data["d"]
        mats = data["basis"]
    else:
        if not (args.heights and args.matrices and args.d):
            raise UsageError("give --code, or --heights, --matrices and --d")
        D = ferrers.FerrersDiagram(tuple(_ints(args.heights)))
        T = _tower(args)
        d = args.d
        mats = json.loads(args.matrices)
    code = ferrers.code_from_matrices(mats, D, d, T)
    report = ferrers.verify_ferrers(code, d, args.budget, args.seed)
    return _ferrers_result(code, report)


# ---------------------------------------------------------------------------
# Sum-rank codes
# ---------------------------------------------------------------------------


def _msrd_code(args) -> msrd.MsrdCode:
    T = _tower(args)
    lam = None if args.lam in (None, "auto") else parse_element(args.lam, T)
    pts = [parse_ratfun(s, T).as_poly() for s in split_list(args.points)] if getattr(args, "points", None) else None
    return msrd.construct_msrd(tuple(_ints(args.profile)), args.k, T, lam, pts)


def _distance_report(C: msrd.MsrdCode, budget: int) -> dict:
    d = msrd.min_sum_rank_distance(C, budget=budget)
    return {"distance": d, "N": C.N, "k": C.k, "singleton": C.N - C.k + 1, "msrd": d == C.N - C.k + 1}


def cmd_msrd_construct(args) -> Result:
    C = _msrd_code(args)
    report = _distance_report(C, args.budget) if args.distance else None
    out = C.to_json(report)
    out["G_str"] = _strs(C.G.entries)
    status = EXIT_FAILED if report is not None and not report["msrd"] else EXIT_OK
    return Result(out, status, tables={"generator": _strs(C.G.entries)})


def cmd_msrd_distance(args) -> Result:
    if args.code:
        data = _load_json(args.code)
        T = gf.FieldTower.from_json(data["tower"])
        F = T.fqm
        rows = tuple(tuple(F(e) for e in row) for row in data["G"])
        G = codes.GenMatrix(rows, T)
        profile = msrd.SumRankProfile(tuple(data["profile"]))
        d = msrd.min_sum_rank_distance(G, profile, args.budget)
        report = {"distance": d, "N": profile.N, "k": G.k, "singleton": profile.N - G.k + 1, "msrd": d == profile.N - G.k + 1}
    else:
        report = _distance_report(_msrd_code(args), args.budget)
    return Result(report, EXIT_OK if report["msrd"] else EXIT_FAILED)


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------


def cmd_fixture(args) -> Result:
    if args.name != "paper-s5":
        raise UsageError(f"unknown fixture {args.name!r}")
    rep = golden.rebuild_s5(_threads(args))
    return Result(rep, EXIT_OK if rep["ok"] else EXIT_FAILED, tables={"G": rep["G"], "Gbar": rep["Gbar"]})


# ---------------------------------------------------------------------------
# Parser and entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="twistcodes", description="Rank-metric codes from twisted automorphisms of F_{q^m}(x).")
    p.add_argument("--pretty", action="store_true", help="human-readable output instead of JSON")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name: str, fn: Callable, parent=sub, **kw) -> argparse.ArgumentParser:
        sp = parent.add_parser(name, **kw)
        sp.set_defaults(func=fn)
        return sp

    sp = command("field-info", cmd_field_info, help="describe a field tower")
    _add_tower(sp, top=True)

    sp = command("find-lambda", cmd_find_lambda, help="first twist parameter whose norm has order q-1")
    _add_tower(sp)

    sp = command("moore", cmd_moore, help="Moore matrix of points under the twisted automorphism")
    _add_tower(sp)
    sp.add_argument("--points", required=True, help="comma separated expressions, e.g. 1,a,x,ax")
    sp.add_argument("--rows", type=int)

    cons = command("construct", None, help="construct a code")
    csub = cons.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    sp = command("mrd", cmd_construct_mrd, parent=csub, help="MRD code over F_{q^m}(x)")
    _add_tower(sp)
    sp.add_argument("--points", required=True)
    sp.add_argument("--k", type=int, required=True)

    sp = command("reduce", cmd_reduce, help="reduce a code modulo an irreducible f")
    sp.add_argument("--code", required=True, help="code JSON file ('-' for stdin)")
    sp.add_argument("--f", help="modulus as an expression in x or JSON")
    sp.add_argument("--r", type=int, help="degree of a seeded random irreducible modulus")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--fallback", action="store_true", help="use degree k(q-2)+1")
    sp.add_argument("--search", action="store_true", help="search increasing degrees from q-1 and certify each")
    sp.add_argument("--r-min", type=int)
    sp.add_argument("--r-max", type=int)
    sp.add_argument("--seeds", type=int, default=3)
    sp.add_argument("--threads", type=int)
    sp.add_argument("--allow-small-degree", action="store_true")

    sp = command("certify", cmd_certify, help="check det(GM) != 0 over all CREF matrices M")
    sp.add_argument("--code", required=True)
    sp.add_argument("--threads", type=int)

    sp = command("distance", cmd_distance, help="minimum rank distance by enumeration")
    sp.add_argument("--code", required=True)
    sp.add_argument("--budget", type=int, default=10**5)

    sp = command("twisted-gabidulin", cmd_twisted, help="generalized twisted Gabidulin code")
    _add_tower(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--h", type=int, default=0)
    sp.add_argument("--twist-s", dest="s_twist", type=int, default=1, help="Frobenius exponent s of x -> x^{q^s}")
    sp.add_argument("--eta", default="0")
    sp.add_argument("--points", required=True)
    sp.add_argument("--frobenius", type=int, nargs="*", help="also report dim(C ∩ C^{q^s}) for these s")

    sp = command("intersect", cmd_intersect, help="dimension of the intersection of two codes")
    sp.add_argument("--code", required=True)
    sp.add_argument("--with", dest="other")
    sp.add_argument("--frobenius", type=int, nargs="*")

    fer = command("ferrers", None, help="Ferrers diagram codes")
    fsub = fer.add_subparsers(dest="action", required=True, parser_class=_Parser)
    sp = command("bound", cmd_ferrers_bound, parent=fsub, help="upper bound on the dimension")
    sp.add_argument("--heights", required=True)
    sp.add_argument("--d", type=int, required=True)
    sp = command("construct", cmd_ferrers_construct, parent=fsub, help="optimal construction for block diagrams")
    _add_tower(sp)
    sp.add_argument("--profile", help="blocks as HEIGHTxCOUNT, e.g. 2x2,4x2")
    sp.add_argument("--staircase", help="m,n for heights m,...,nm in blocks of m")
    sp.add_argument("--override", help="lowered heights for the first k columns")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--budget", type=int, default=200_000)
    sp.add_argument("--seed", type=int, default=0)
    sp = command("verify", cmd_ferrers_verify, parent=fsub, help="check fit, optimality and distance")
    _add_tower(sp)
    sp.add_argument("--code")
    sp.add_argument("--heights")
    sp.add_argument("--matrices", help="JSON list of basis matrices over F_q")
    sp.add_argument("--d", type=int)
    sp.add_argument("--budget", type=int, default=200_000)
    sp.add_argument("--seed", type=int, default=0)

    ms = command("msrd", None, help="sum-rank codes")
    msub = ms.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name, fn in (("construct", cmd_msrd_construct), ("distance", cmd_msrd_distance)):
        sp = command(name, fn, parent=msub)
        _add_tower(sp)
        sp.add_argument("--profile", required=name == "construct", help="block lengths, e.g. 2,2")
        sp.add_argument("--k", type=int, required=name == "construct")
        sp.add_argument("--points", help="override evaluation points")
        sp.add_argument("--budget", type=int, default=10**5)
        if name == "construct":
            sp.add_argument("--distance", action="store_true", help="also enumerate the minimum distance")
        else:
            sp.add_argument("--code")

    sp = command("fixture", cmd_fixture, help="rebuild an embedded golden example")
    sp.add_argument("name", help="fixture name (paper-s5)")
    sp.add_argument("--threads", type=int)
    return p


def _render(res: Result) -> str:
    lines = []
    for title, rows in res.tables.items():
        widths = [max(len(r[j]) for r in rows) for j in range(len(rows[0]))] if rows else []
        lines.append(f"{title}:")
        for r in rows:
            lines.append("  " + "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    skip = {"entries", "entries_str", "G", "G_str", "Gbar", "basis", "tower", "points"}
    for key, val in res.payload.items():
        if key in skip:
            continue
        if isinstance(val, (dict, list)):
            val = json.dumps(val)
        lines.append(f"{key}: {val}")
    return "\n".join(lines)


def _json_default(o: Any):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.func is None:
        parser.error("missing subcommand")
    try:
        res = args.func(args)
    except (UsageError, TwistCodesError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"twistcodes: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.pretty:
        print(_render(res))
    else:
        print(json.dumps(res.payload, default=_json_default))
    return res.status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
