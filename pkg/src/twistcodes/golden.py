"""Embedded golden fixtures and the end-to-end rebuild that checks them."""

from __future__ import annotations

import json
import time
from importlib import resources
from typing import Any

from . import codes, gf
from .parse import parse_element, parse_poly, parse_ratfun
from .twist import TwistAut


def load(name: str = "paper_s5") -> dict:
    return json.loads(resources.files("twistcodes").joinpath("fixtures", f"{name}.json").read_text())


def _diff(got: list[list[Any]], want: list[list[Any]]) -> list[dict]:
    out = []
    if len(got) != len(want) or any(len(a) != len(b) for a, b in zip(got, want)):
        return [{"shape": [len(got), len(want)]}]
    for i, (ra, rb) in enumerate(zip(got, want)):
        for j, (x, y) in enumerate(zip(ra, rb)):
            if x != y:
                out.append({"row": i, "col": j, "got": str(x), "want": str(y)})
    return out


def rebuild_s5(workers: int | None = None, fixture: dict | None = None) -> dict:
    """Rebuild the F_27 / F_{3^12} example, certify it and diff against the fixture."""
    fx = load("paper_s5") if fixture is None else fixture
    t0 = time.perf_counter()
    base = gf.FieldTower(fx["p"], fx["s"], fx["m"], None, [[0, 1], fx["modulus_a"]])
    lam = parse_element(fx["lambda"], base)
    phi = TwistAut(base, lam)
    points = [parse_ratfun(p, base) for p in fx["points"]]
    G = codes.construct_mrd(phi, points, fx["k"])
    f = parse_poly(fx["f"], base)
    Gbar = codes.reduce_code(G, f)
    top = Gbar.tower
    want_G = [[parse_ratfun(e, base) for e in row] for row in fx["G"]]
    want_Gbar = [[parse_element(e, top, gf.TOP) for e in row] for row in fx["Gbar"]]
    cert = codes.certify_mrd(Gbar, workers)
    inter = {str(s): codes.intersection_dim(Gbar, codes.frobenius_code(Gbar, s)) for s in map(int, fx["frobenius_intersections"])}
    diff_G = _diff(G.rows(), want_G)
    diff_Gbar = _diff(Gbar.rows(), want_Gbar)
    ok = (
        not diff_G
        and not diff_Gbar
        and cert.certified == fx["certified"]
        and cert.total == fx["cref_count"]
        and inter == {k: int(v) for k, v in fx["frobenius_intersections"].items()}
    )
    return {
        "ok": ok,
        "lambda": lam.to_json(),
        "G_diff": diff_G,
        "Gbar_diff": diff_Gbar,
        "certified": cert.certified,
        "certificate": cert.to_json(),
        "cref_count": cert.total,
        "frobenius_intersections": inter,
        "G": [[str(e) for e in row] for row in G.rows()],
        "Gbar": [[str(e) for e in row] for row in Gbar.rows()],
        "wall_time_ms": round((time.perf_counter() - t0) * 1000, 3),
    }
