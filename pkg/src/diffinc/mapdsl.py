"""Text format for user-defined set-valued maps.

A map file is a JSON document::

    {"dim": 1,
     "pieces": [
       {"region": [{"var": 1, "op": "le", "bound": 0}],
        "image": [[["-1", "0"]]]},
       {"region": [{"var": 1, "op": "ge", "bound": 0}],
        "image": [[["-1", "1"]]]}
     ]}

The top level carries ``dim`` and exactly one of ``pieces``, ``product``
(two sub-maps whose dimensions add), ``union`` (two sub-maps of equal
dimension) or ``builtin`` (``{"name": ..., "params": {...}}``).  A box is
an array of ``dim`` two-element arrays of expression strings
``[lo, hi]``; region comparators are ``lt``, ``le``, ``ge``, ``gt``,
``eq`` with 1-based variable indices.  An optional ``growth": [A, B]``
declares the linear-growth constants used for mesh sizing.

Expression grammar (precedence low to high)::

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := NUMBER | 'x' | 'x' DIGITS | FUNC '(' expr ')'
            | '(' expr ')' | '-' factor
    FUNC   := 'sign' | 'cbrt' | 'abs'

Whitespace is insignificant.  ``x`` names the single coordinate of a
1-D map; ``x1 .. xn`` name coordinates of higher-dimensional maps
(range-checking against the map dimension happens during map
validation, not expression parsing).
"""

from __future__ import annotations

import json
import random
import re

from .setmap import (
    Condition,
    Expr,
    MapDefinitionError,
    NativeMap,
    Piece,
    PiecewiseMap,
    ProductMap,
    Region,
    SetValuedMap,
    UnionMap,
    builtin,
)

_REGION_OPS = ("lt", "le", "ge", "gt", "eq")


class ParseError(ValueError):
    """Syntax error with byte offset and the token set expected there."""

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = tuple(expected)
        detail = f"{message} at byte {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


# ---------------------------------------------------------------------------
# Expression parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_]\w*)
  | (?P<punct>[+\-*()])
    """,
    re.VERBOSE,
)


def _byte_offset(src: str, pos: int) -> int:
    return len(src[:pos].encode("utf-8"))


class _ExprParser:
    def __init__(self, src: str):
        self.src = src
        self.tokens: list[tuple[str, str, int]] = []  # (kind, text, char pos)
        pos = 0
        while pos < len(src):
            m = _TOKEN_RE.match(src, pos)
            if m is None:
                raise ParseError(
                    f"unexpected character {src[pos]!r}",
                    _byte_offset(src, pos),
                    ("number", "x", "function", "(", "-"),
                )
            if m.lastgroup != "ws":
                self.tokens.append((m.lastgroup, m.group(), pos))
            pos = m.end()
        self.tokens.append(("eof", "", len(src)))
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected: tuple[str, ...]) -> ParseError:
        kind, text, pos = self.peek()
        what = "end of input" if kind == "eof" else repr(text)
        return ParseError(
            f"unexpected {what}", _byte_offset(self.src, pos), expected
        )

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek()[0] != "eof":
            raise self.fail(("+", "-", "*", "end of input"))
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.advance()[1]
            rhs = self.term()
            e = Expr.add(e, rhs) if op == "+" else Expr.sub(e, rhs)
        return e

    def term(self) -> Expr:
        e = self.factor()
        while self.peek()[1] == "*":
            self.advance()
            e = Expr.mul(e, self.factor())
        return e

    def factor(self) -> Expr:
        kind, text, pos = self.peek()
        if text == "-":
            self.advance()
            return Expr.neg(self.factor())
        if text == "(":
            self.advance()
            e = self.expr()
            if self.peek()[1] != ")":
                raise self.fail((")",))
            self.advance()
            return e
        if kind == "number":
            self.advance()
            return Expr.const(float(text))
        if kind == "name":
            self.advance()
            if text == "x":
                return Expr.var(0)
            m = re.fullmatch(r"x(\d+)", text)
            if m:
                index = int(m.group(1))
                if index < 1:
                    raise ParseError(
                        "variable indices are 1-based",
                        _byte_offset(self.src, pos),
                        ("x1", "x2", "..."),
                    )
                return Expr.var(index - 1)
            if self.peek()[1] == "(":
                if text not in ("sign", "cbrt", "abs"):
                    raise ParseError(
                        f"unknown function {text!r}",
                        _byte_offset(self.src, pos),
                        ("sign", "cbrt", "abs"),
                    )
                self.advance()
                e = self.expr()
                if self.peek()[1] != ")":
                    raise self.fail((")",))
                self.advance()
                return Expr(text, args=(e,))
            raise ParseError(
                f"unknown name {text!r}",
                _byte_offset(self.src, pos),
                ("number", "x", "sign", "cbrt", "abs"),
            )
        raise self.fail(("number", "x", "function", "(", "-"))


def parse_expr(src: str) -> Expr:
    """Parse one scalar expression."""
    return _ExprParser(src).parse()


# ---------------------------------------------------------------------------
# Map files
# ---------------------------------------------------------------------------


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise MapDefinitionError(message)


def _map_from_obj(obj: object, path: str) -> SetValuedMap:
    _require(isinstance(obj, dict), f"{path}: map node must be a JSON object")
    assert isinstance(obj, dict)
    keys = {"pieces", "product", "union", "builtin"} & obj.keys()
    _require(
        len(keys) == 1,
        f"{path}: need exactly one of pieces/product/union/builtin, got {sorted(keys)}",
    )
    _require("dim" in obj, f"{path}: missing 'dim'")
    dim = obj["dim"]
    _require(isinstance(dim, int) and dim >= 1, f"{path}: 'dim' must be an integer >= 1")

    growth = obj.get("growth")
    if growth is not None:
        _require(
            isinstance(growth, (list, tuple)) and len(growth) == 2
            and all(isinstance(g, (int, float)) and g >= 0 for g in growth),
            f"{path}: 'growth' must be [A, B] with A, B >= 0",
        )
        growth = (float(growth[0]), float(growth[1]))

    kind = keys.pop()
    if kind == "pieces":
        m: SetValuedMap = _pieces_from_obj(dim, obj["pieces"], path)
    elif kind == "product":
        parts = obj["product"]
        _require(isinstance(parts, list) and len(parts) == 2,
                 f"{path}: 'product' must hold two sub-maps")
        left = _map_from_obj(parts[0], path + ".product[0]")
        right = _map_from_obj(parts[1], path + ".product[1]")
        _require(left.dim + right.dim == dim,
                 f"{path}: product dims {left.dim}+{right.dim} != {dim}")
        m = ProductMap(left, right)
    elif kind == "union":
        parts = obj["union"]
        _require(isinstance(parts, list) and len(parts) == 2,
                 f"{path}: 'union' must hold two sub-maps")
        left = _map_from_obj(parts[0], path + ".union[0]")
        right = _map_from_obj(parts[1], path + ".union[1]")
        m = UnionMap(left, right)
        _require(m.dim == dim, f"{path}: union dim {m.dim} != {dim}")
    else:
        node = obj["builtin"]
        _require(isinstance(node, dict) and "name" in node,
                 f"{path}: 'builtin' must hold a name")
        m = builtin(node["name"], node.get("params"))
        _require(m.dim == dim,
                 f"{path}: builtin {node['name']!r} has dim {m.dim}, file says {dim}")

    if growth is not None:
        m.growth = growth
    return m


def _pieces_from_obj(dim: int, pieces_obj: object, path: str) -> PiecewiseMap:
    _require(isinstance(pieces_obj, list) and pieces_obj,
             f"{path}: 'pieces' must be a nonempty array")
    pieces = []
    for pi, pobj in enumerate(pieces_obj):
        ppath = f"{path}.pieces[{pi}]"
        _require(isinstance(pobj, dict), f"{ppath}: piece must be an object")
        conditions = []
        for cobj in pobj.get("region", []):
            _require(isinstance(cobj, dict), f"{ppath}: condition must be an object")
            var = cobj.get("var")
            _require(isinstance(var, int) and 1 <= var <= dim,
                     f"{ppath}: condition 'var' must be in 1..{dim}")
            op = cobj.get("op")
            _require(op in _REGION_OPS,
                     f"{ppath}: condition 'op' must be one of {_REGION_OPS}")
            bound = cobj.get("bound")
            _require(isinstance(bound, (int, float)),
                     f"{ppath}: condition 'bound' must be a number")
            conditions.append(Condition(var - 1, op, float(bound)))
        image_obj = pobj.get("image")
        _require(isinstance(image_obj, list) and image_obj,
                 f"{ppath}: 'image' must be a nonempty array of boxes")
        image = []
        for bi, box_obj in enumerate(image_obj):
            _require(isinstance(box_obj, list) and len(box_obj) == dim,
                     f"{ppath}.image[{bi}]: box must list {dim} coordinate ranges")
            coords = []
            for ci, pair in enumerate(box_obj):
                _require(isinstance(pair, list) and len(pair) == 2
                         and all(isinstance(s, str) for s in pair),
                         f"{ppath}.image[{bi}][{ci}]: expected [lo, hi] expression strings")
                lo = parse_expr(pair[0])
                hi = parse_expr(pair[1])
                coords.append((lo, hi))
            image.append(tuple(coords))
        pieces.append(Piece(Region(tuple(conditions)), tuple(image)))
    return PiecewiseMap(dim, tuple(pieces))


def _validation_points(m: PiecewiseMap) -> list[tuple[float, ...]]:
    bounds = m.region_boundaries()
    per_var: list[list[float]] = []
    for j in range(m.dim):
        vals = sorted(set(bounds.get(j, ())))
        # bounds first so a totality hole is witnessed at the boundary itself
        cands = list(vals)
        cands.extend((a + b) / 2.0 for a, b in zip(vals, vals[1:]))
        for v in vals:
            cands.extend((v - 1.0, v + 1.0))
        cands.extend((0.0, -1.0, 1.0))
        seen: set[float] = set()
        ordered = [v for v in cands if not (v in seen or seen.add(v))]
        per_var.append(ordered)
    if m.dim == 1:
        points = [(v,) for v in per_var[0]]
    else:
        total = 1
        for vals in per_var:
            total *= len(vals)
        points = []
        if total <= 512:
            acc: list[tuple[float, ...]] = [()]
            for vals in per_var:
                acc = [p + (v,) for p in acc for v in vals]
            points = acc
        else:
            rng = random.Random(20210 + m.dim)
            for _ in range(256):
                points.append(tuple(rng.choice(vals) for vals in per_var))
    radius = max(
        [1.0] + [abs(v) + 1.0 for vals in per_var for v in vals]
    )
    rng = random.Random(4002 + m.dim)
    for _ in range(32):
        points.append(tuple(rng.uniform(-radius, radius) for _ in range(m.dim)))
    return points


def validate_map(m: SetValuedMap) -> None:
    """Check totality and image well-formedness of every piecewise node.

    Piece coverage cannot be decided from point queries alone in general;
    in one dimension the candidate set (all region bounds, the midpoints
    between them and points beyond the extremes) is exhaustive for
    conjunctive single-variable regions, and higher dimensions fall back
    to a boundary-derived grid plus seeded random probes.

    Raises MapDefinitionError carrying a witness point on failure.
    """
    if isinstance(m, PiecewiseMap):
        for p in _validation_points(m):
            m.evaluate(p)  # raises with the witness on empty image / lo > hi
    elif isinstance(m, (ProductMap, UnionMap)):
        validate_map(m.left)
        validate_map(m.right)
    # NativeMap builtins are total by construction.


def parse_map(src: str) -> SetValuedMap:
    """Parse and validate a map file; see the module docstring for the format."""
    try:
        obj = json.loads(src)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", _byte_offset(src, e.pos)) from None
    m = _map_from_obj(obj, "$")
    validate_map(m)
    return m


def load_map(path: str) -> SetValuedMap:
    with open(path, "r", encoding="utf-8") as fh:
        m = parse_map(fh.read())
    return m


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _derived_growth(m: SetValuedMap) -> tuple[float, float] | None:
    if isinstance(m, ProductMap):
        lg, rg = m.left.growth, m.right.growth
        if lg is not None and rg is not None:
            return (lg[0] + rg[0], lg[1] + rg[1])
        return None
    if isinstance(m, UnionMap):
        lg, rg = m.left.growth, m.right.growth
        if lg is not None and rg is not None:
            return (max(lg[0], rg[0]), max(lg[1], rg[1]))
        return None
    return None


def map_to_dict(m: SetValuedMap) -> dict:
    if isinstance(m, PiecewiseMap):
        out: dict = {"dim": m.dim}
        if m.growth is not None:
            out["growth"] = [m.growth[0], m.growth[1]]
        out["pieces"] = [
            {
                "region": [
                    {"var": c.var + 1, "op": c.op, "bound": c.bound}
                    for c in p.region.conditions
                ],
                "image": [
                    [[lo.to_text(m.dim), hi.to_text(m.dim)] for lo, hi in box]
                    for box in p.image
                ],
            }
            for p in m.pieces
        ]
        return out
    if isinstance(m, (ProductMap, UnionMap)):
        key = "product" if isinstance(m, ProductMap) else "union"
        out = {"dim": m.dim, key: [map_to_dict(m.left), map_to_dict(m.right)]}
        if m.growth is not None and m.growth != _derived_growth(m):
            out["growth"] = [m.growth[0], m.growth[1]]
        return out
    if isinstance(m, NativeMap):
        out = {"dim": m.dim, "builtin": {"name": m.name, "params": m.params}}
        return out
    raise TypeError(f"cannot serialize map of type {type(m).__name__}")


def roundtrip(m: SetValuedMap) -> str:
    """Serialize so that ``parse_map(roundtrip(m))`` evaluates identically.

    Structurally defined builtins are lowered to their explicit piece
    encoding; only callable-backed builtins keep a ``builtin`` node.
    """
    return json.dumps(map_to_dict(m), indent=2) + "\n"
