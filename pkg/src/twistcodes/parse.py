"""Parse field elements and polynomials written as ``a^2 + 2a + 1`` or ``(2a + 1)x``.

Names: ``w`` (generator of F_q), ``a`` (of F_{q^m}), ``b`` (of F_{q^{mr}})
and ``x`` (the indeterminate over F_{q^m}).  Juxtaposition multiplies,
``^`` and ``**`` are powers, ``/`` divides.  JSON input (a list or an
object) is also accepted and decoded as a serialized polynomial.
"""

from __future__ import annotations

import json
import re
from typing import Any

from .gf import FieldTower
from .ratfun import Poly, RatFun, as_ratfun

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z])|(\*\*|[-+*/^()]))")


def _tokens(text: str) -> list[str]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse {text[pos:]!r}")
        out.append(m.group(m.lastindex))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, names: dict[str, Any]):
        self.toks = _tokens(text)
        self.i = 0
        self.names = names
        self.text = text

    def peek(self) -> str | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ValueError(f"unexpected end of {self.text!r}")
        self.i += 1
        return tok

    def parse(self) -> Any:
        v = self.expr()
        if self.peek() is not None:
            raise ValueError(f"trailing input {self.peek()!r} in {self.text!r}")
        return v

    def expr(self) -> Any:
        if self.peek() in ("+", "-"):
            sign = self.take()
            v = self.term()
            v = -v if sign == "-" else v
        else:
            v = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.term()
            v = v + rhs if op == "+" else v - rhs
        return v

    def term(self) -> Any:
        v = self.power()
        while True:
            tok = self.peek()
            if tok in ("*", "/"):
                self.take()
                rhs = self.power()
                v = v * rhs if tok == "*" else self.div(v, rhs)
            elif tok is not None and (tok == "(" or tok[0].isalnum()):
                v = v * self.power()
            else:
                return v

    def div(self, u: Any, v: Any) -> Any:
        F = self.names["a"].field
        if isinstance(u, (Poly, RatFun)) or isinstance(v, (Poly, RatFun)):
            return as_ratfun(u, F) / as_ratfun(v, F)
        if isinstance(u, int) and isinstance(v, int):
            u = F(u)
        return u / v

    def power(self) -> Any:
        v = self.atom()
        if self.peek() in ("^", "**"):
            self.take()
            neg = False
            if self.peek() == "-":
                self.take()
                neg = True
            e = int(self.take())
            v = v ** (-e if neg else e)
        return v

    def atom(self) -> Any:
        tok = self.take()
        if tok == "(":
            v = self.expr()
            if self.take() != ")":
                raise ValueError(f"unbalanced parentheses in {self.text!r}")
            return v
        if tok.isdigit():
            return int(tok)
        if tok in self.names:
            return self.names[tok]
        raise ValueError(f"unknown name {tok!r} in {self.text!r}")


def _names(tower: FieldTower) -> dict[str, Any]:
    names: dict[str, Any] = {"w": tower.fq.gen, "a": tower.fqm.gen, "x": Poly.x(tower.fqm)}
    if tower.r is not None:
        names["b"] = tower.top.gen
    return names


def parse_expr(text: str, tower: FieldTower) -> Any:
    """An int, :class:`FieldElem`, :class:`Poly` or :class:`RatFun`."""
    return _Parser(text, _names(tower)).parse()


def parse_element(text: Any, tower: FieldTower, level: int | None = None):
    """A field element at ``level`` (default F_{q^m}); accepts expressions or serialized JSON."""
    L = tower.level(tower.fqm.level if level is None else level)
    if not isinstance(text, str):
        return L(text)
    s = text.strip()
    if s.startswith("["):
        return L(json.loads(s))
    v = parse_expr(s, tower)
    if isinstance(v, (Poly, RatFun)):
        raise ValueError(f"{text!r} is not a constant")
    return L(v)


def parse_ratfun(text: Any, tower: FieldTower) -> RatFun:
    F = tower.fqm
    if not isinstance(text, str):
        return RatFun.from_json(text, F)
    s = text.strip()
    if s.startswith("[") or s.startswith("{"):
        return RatFun.from_json(json.loads(s), F)
    v = parse_expr(s, tower)
    if isinstance(v, RatFun):
        return v
    if isinstance(v, Poly):
        return RatFun(v)
    return RatFun(Poly.constant(v, F))


def parse_poly(text: Any, tower: FieldTower) -> Poly:
    g = parse_ratfun(text, tower)
    if not g.is_poly():
        raise ValueError(f"{text!r} is not a polynomial")
    return g.as_poly()


def split_list(text: str) -> list[str]:
    """Split on top-level commas (a JSON array is decoded instead)."""
    s = text.strip()
    if s.startswith("["):
        return json.loads(s)
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]
