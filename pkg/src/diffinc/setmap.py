"""Box-union sets and set-valued maps.

The images of every map in this package are finite unions of closed,
axis-aligned boxes in R^n (degenerate boxes are points, so finite point
sets are covered too).  That representation keeps every geometric query
used by the solver and the checkers exact: membership, point-to-set
distance, extreme points and coordinate-interval intersections are all
computed without tolerances.

Maps are immutable and evaluation is pure: the same input vector always
produces the same box list, bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

Vector = tuple[float, ...]

MAX_VERTEX_DIM = 16


class MapDefinitionError(ValueError):
    """A map is structurally invalid (empty image, lo > hi, bad dims)."""


def as_vector(x: Sequence[float]) -> Vector:
    return tuple(float(v) for v in x)


def norm(x: Sequence[float]) -> float:
    return math.hypot(*x)


def _midpoint_cube_cmp(r1: float, r2: float, a_num: int, a_den: int) -> int:
    """Exact sign of ((r1 + r2) / 2)**3 - a_num/a_den (all denominators
    are powers of two, so the midpoint is an exact rational)."""
    n1, d1 = r1.as_integer_ratio()
    n2, d2 = r2.as_integer_ratio()
    d = max(d1, d2)
    num = n1 * (d // d1) + n2 * (d // d2)
    den = 2 * d
    lhs = num * num * num * a_den
    rhs = a_num * den * den * den
    return (lhs > rhs) - (lhs < rhs)


def real_cbrt(v: float) -> float:
    """Correctly rounded real cube root, odd by construction.

    ``float ** (1/3)`` can be off by an ulp depending on the platform's
    pow; the selection logic compares cube roots of nearby states
    exactly, so the result must be the nearest double (which also makes
    the function weakly monotone).  The candidate from pow is verified
    against the half-ulp windows in exact integer arithmetic and nudged
    if needed.
    """
    if v == 0.0 or math.isnan(v) or math.isinf(v):
        return v
    a = abs(v)
    r = a ** (1.0 / 3.0)
    a_num, a_den = a.as_integer_ratio()
    while _midpoint_cube_cmp(math.nextafter(r, 0.0), r, a_num, a_den) > 0:
        r = math.nextafter(r, 0.0)
    while _midpoint_cube_cmp(r, math.nextafter(r, math.inf), a_num, a_den) < 0:
        r = math.nextafter(r, math.inf)
    return math.copysign(r, v)


# ---------------------------------------------------------------------------
# Scalar expressions (the arithmetic used inside piecewise map images)
# ---------------------------------------------------------------------------

_EXPR_OPS = ("const", "var", "neg", "add", "sub", "mul", "sign", "cbrt", "abs")


@dataclass(frozen=True)
class Expr:
    """Expression tree over constants, coordinates and {+,-,*,sign,cbrt,abs}.

    Evaluation is total on R; ``sign(0) = 0`` and ``cbrt`` is the real
    cube root (``cbrt(-8) = -2``).  Multi-valued behaviour at
    discontinuities is never encoded here; it belongs to overlapping
    piece regions.
    """

    op: str
    args: tuple["Expr", ...] = ()
    value: float = 0.0
    index: int = 0

    def __post_init__(self) -> None:
        if self.op not in _EXPR_OPS:
            raise ValueError(f"unknown expression op {self.op!r}")

    @classmethod
    def const(cls, v: float) -> "Expr":
        return cls("const", value=float(v))

    @classmethod
    def var(cls, index: int = 0) -> "Expr":
        if index < 0:
            raise ValueError("variable index must be >= 0")
        return cls("var", index=index)

    @classmethod
    def neg(cls, e: "Expr") -> "Expr":
        return cls("neg", args=(e,))

    @classmethod
    def add(cls, a: "Expr", b: "Expr") -> "Expr":
        return cls("add", args=(a, b))

    @classmethod
    def sub(cls, a: "Expr", b: "Expr") -> "Expr":
        return cls("sub", args=(a, b))

    @classmethod
    def mul(cls, a: "Expr", b: "Expr") -> "Expr":
        return cls("mul", args=(a, b))

    @classmethod
    def sign(cls, e: "Expr") -> "Expr":
        return cls("sign", args=(e,))

    @classmethod
    def cbrt(cls, e: "Expr") -> "Expr":
        return cls("cbrt", args=(e,))

    @classmethod
    def abs(cls, e: "Expr") -> "Expr":
        return cls("abs", args=(e,))

    def evaluate(self, x: Sequence[float]) -> float:
        op = self.op
        if op == "const":
            return self.value
        if op == "var":
            if self.index >= len(x):
                raise MapDefinitionError(
                    f"expression uses x{self.index + 1} but the point has "
                    f"dimension {len(x)}"
                )
            return float(x[self.index])
        if op == "neg":
            return -self.args[0].evaluate(x)
        if op == "add":
            return self.args[0].evaluate(x) + self.args[1].evaluate(x)
        if op == "sub":
            return self.args[0].evaluate(x) - self.args[1].evaluate(x)
        if op == "mul":
            return self.args[0].evaluate(x) * self.args[1].evaluate(x)
        v = self.args[0].evaluate(x)
        if op == "sign":
            return float((v > 0) - (v < 0))
        if op == "cbrt":
            return real_cbrt(v)
        return abs(v)

    def max_var_index(self) -> int:
        if self.op == "var":
            return self.index
        if not self.args:
            return -1
        return max(a.max_var_index() for a in self.args)

    def to_text(self, dim: int = 1) -> str:
        """Serialize so that the map-file grammar parses it back."""
        return self._text(dim, 0)

    # precedence levels: 0 = sum, 1 = product, 2 = factor
    def _text(self, dim: int, level: int) -> str:
        op = self.op
        if op == "const":
            if self.value < 0 or (self.value == 0 and math.copysign(1.0, self.value) < 0):
                body = format(-self.value, ".17g")
                return f"(-{body})" if level > 2 else f"-{body}"
            return format(self.value, ".17g")
        if op == "var":
            text = "x" if dim == 1 else f"x{self.index + 1}"
            return text
        if op == "neg":
            body = f"-{self.args[0]._text(dim, 2)}"
            return f"({body})" if level > 2 else body
        if op in ("add", "sub"):
            sep = "+" if op == "add" else "-"
            body = f"{self.args[0]._text(dim, 0)}{sep}{self.args[1]._text(dim, 1)}"
            return f"({body})" if level > 0 else body
        if op == "mul":
            body = f"{self.args[0]._text(dim, 1)}*{self.args[1]._text(dim, 2)}"
            return f"({body})" if level > 1 else body
        return f"{op}({self.args[0]._text(dim, 0)})"


# ---------------------------------------------------------------------------
# Boxes and box-union sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Box:
    """Closed axis-aligned box [lo_1,hi_1] x ... x [lo_n,hi_n], lo_j <= hi_j."""

    lo: Vector
    hi: Vector

    def __post_init__(self) -> None:
        lo = as_vector(self.lo)
        hi = as_vector(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if len(lo) != len(hi) or not lo:
            raise MapDefinitionError("box corners must share a dimension >= 1")
        for a, b in zip(lo, hi):
            if not (math.isfinite(a) and math.isfinite(b)):
                raise MapDefinitionError("box corners must be finite")
            if a > b:
                raise MapDefinitionError(f"box has lo {a!r} > hi {b!r}")

    @property
    def dim(self) -> int:
        return len(self.lo)

    @classmethod
    def point(cls, p: Sequence[float]) -> "Box":
        v = as_vector(p)
        return cls(v, v)

    @classmethod
    def interval(cls, lo: float, hi: float) -> "Box":
        return cls((lo,), (hi,))

    def contains(self, v: Sequence[float]) -> bool:
        return all(a <= c <= b for a, b, c in zip(self.lo, self.hi, v))

    def clamp(self, v: Sequence[float]) -> Vector:
        return tuple(min(max(c, a), b) for a, b, c in zip(self.lo, self.hi, v))

    def distance(self, v: Sequence[float]) -> float:
        gaps = [max(a - c, c - b, 0.0) for a, b, c in zip(self.lo, self.hi, v)]
        return math.hypot(*gaps)

    def corners(self) -> list[Vector]:
        if self.dim > MAX_VERTEX_DIM:
            raise ValueError(
                f"corner enumeration limited to dimension {MAX_VERTEX_DIM}"
            )
        out: list[Vector] = [()]
        for a, b in zip(self.lo, self.hi):
            choices = (a,) if a == b else (a, b)
            out = [c + (v,) for c in out for v in choices]
        return out


@dataclass(frozen=True)
class CompactSet:
    """Nonempty finite union of boxes sharing one dimension.

    Boxes may overlap; the represented set is their union.
    """

    boxes: tuple[Box, ...]

    def __post_init__(self) -> None:
        boxes = tuple(self.boxes)
        object.__setattr__(self, "boxes", boxes)
        if not boxes:
            raise MapDefinitionError("a compact set needs at least one box")
        d = boxes[0].dim
        if any(b.dim != d for b in boxes):
            raise MapDefinitionError("all boxes of a set must share a dimension")

    @property
    def dim(self) -> int:
        return self.boxes[0].dim

    @classmethod
    def of_points(cls, *points: Sequence[float]) -> "CompactSet":
        return cls(tuple(Box.point(p) for p in points))

    @classmethod
    def of_intervals(cls, *bounds: tuple[float, float]) -> "CompactSet":
        return cls(tuple(Box.interval(lo, hi) for lo, hi in bounds))

    def contains(self, v: Sequence[float]) -> bool:
        return any(b.contains(v) for b in self.boxes)


def sup_norm(s: CompactSet) -> float:
    """sup of the Euclidean norm over the set.

    Attained, per box, at the corner with the larger magnitude in every
    coordinate, so the value is exact up to one rounding of the norm.
    """
    best = 0.0
    for b in s.boxes:
        extreme = [max(abs(a), abs(c)) for a, c in zip(b.lo, b.hi)]
        best = max(best, math.hypot(*extreme))
    return best


def distance(s: CompactSet, v: Sequence[float]) -> float:
    """Euclidean distance from v to the set; exactly 0 iff v lies in it."""
    if len(v) != s.dim:
        raise ValueError(f"point has dimension {len(v)}, set has {s.dim}")
    return min(b.distance(v) for b in s.boxes)


def vertices(s: CompactSet) -> list[Vector]:
    """All box corners (duplicates across boxes allowed).

    Every linear functional attains its extremum over the set on this
    list.  Guarded to dimension 16 to avoid the 2^n corner blow-up.
    """
    if s.dim > MAX_VERTEX_DIM:
        raise ValueError(f"vertices limited to dimension {MAX_VERTEX_DIM}")
    out: list[Vector] = []
    for b in s.boxes:
        out.extend(b.corners())
    return out


# ---------------------------------------------------------------------------
# Piecewise regions
# ---------------------------------------------------------------------------

_REGION_OPS = {
    "lt": lambda v, b: v < b,
    "le": lambda v, b: v <= b,
    "ge": lambda v, b: v >= b,
    "gt": lambda v, b: v > b,
    "eq": lambda v, b: v == b,
}


@dataclass(frozen=True)
class Condition:
    """One comparison ``x[var] <op> bound`` (var is 0-based here)."""

    var: int
    op: str
    bound: float

    def __post_init__(self) -> None:
        if self.op not in _REGION_OPS:
            raise MapDefinitionError(f"unknown region comparator {self.op!r}")
        if self.var < 0:
            raise MapDefinitionError("condition variable index must be >= 0")
        object.__setattr__(self, "bound", float(self.bound))

    def holds(self, x: Sequence[float]) -> bool:
        return _REGION_OPS[self.op](x[self.var], self.bound)


@dataclass(frozen=True)
class Region:
    """Conjunction of conditions; the empty conjunction matches all of R^n.

    Comparators are honoured literally (``lt`` is strict), so a piece
    with a strict region genuinely excludes its boundary.  The shipped
    builtins encode boundary multi-valuedness with overlapping closed
    regions instead, which keeps them upper semi-continuous.
    """

    conditions: tuple[Condition, ...] = ()

    def matches(self, x: Sequence[float]) -> bool:
        return all(c.holds(x) for c in self.conditions)

    def max_var_index(self) -> int:
        return max((c.var for c in self.conditions), default=-1)


ExprBox = tuple[tuple[Expr, Expr], ...]  # per-coordinate (lo, hi) expressions


@dataclass(frozen=True)
class Piece:
    region: Region
    image: tuple[ExprBox, ...]

    def __post_init__(self) -> None:
        if not self.image:
            raise MapDefinitionError("a piece needs at least one image box")


# ---------------------------------------------------------------------------
# Set-valued maps
# ---------------------------------------------------------------------------


class SetValuedMap:
    """Evaluable mapping x -> CompactSet with optional linear-growth data.

    ``growth = (A, B)`` declares ``sup_norm(F(x)) <= A + B*|x|``, which
    the solver uses to size meshes a priori.  Subclasses implement
    ``evaluate``; all state is fixed at construction.
    """

    kind = "abstract"

    def __init__(self, dim: int, growth: tuple[float, float] | None = None,
                 label: str | None = None):
        if dim < 1:
            raise MapDefinitionError("map dimension must be >= 1")
        self.dim = int(dim)
        if growth is not None:
            a, b = float(growth[0]), float(growth[1])
            if a < 0 or b < 0:
                raise MapDefinitionError("growth constants must be >= 0")
            growth = (a, b)
        self.growth = growth
        self.label = label if label is not None else self.kind

    def evaluate(self, x: Sequence[float]) -> CompactSet:
        raise NotImplementedError

    def _check_point(self, x: Sequence[float]) -> Vector:
        if len(x) != self.dim:
            raise ValueError(
                f"point has dimension {len(x)}, map {self.label!r} has {self.dim}"
            )
        return as_vector(x)

    def region_boundaries(self) -> dict[int, tuple[float, ...]]:
        """Per-coordinate values where the image definition may switch."""
        return {}


class PiecewiseMap(SetValuedMap):
    """Union-of-matching-pieces map: the image at x collects the boxes of
    every piece whose region contains x."""

    kind = "piecewise"

    def __init__(self, dim: int, pieces: Sequence[Piece],
                 growth: tuple[float, float] | None = None,
                 label: str | None = None):
        super().__init__(dim, growth, label)
        self.pieces = tuple(pieces)
        if not self.pieces:
            raise MapDefinitionError("a piecewise map needs at least one piece")
        for p in self.pieces:
            if p.region.max_var_index() >= dim:
                raise MapDefinitionError(
                    f"region condition uses x{p.region.max_var_index() + 1} in a "
                    f"{dim}-dimensional map"
                )
            for box in p.image:
                if len(box) != dim:
                    raise MapDefinitionError(
                        f"image box has {len(box)} coordinates, map has {dim}"
                    )
                for lo_e, hi_e in box:
                    bad = max(lo_e.max_var_index(), hi_e.max_var_index())
                    if bad >= dim:
                        raise MapDefinitionError(
                            f"image expression uses x{bad + 1} in a "
                            f"{dim}-dimensional map"
                        )

    def evaluate(self, x: Sequence[float]) -> CompactSet:
        x = self._check_point(x)
        boxes: list[Box] = []
        for p in self.pieces:
            if not p.region.matches(x):
                continue
            for expr_box in p.image:
                lo = []
                hi = []
                for lo_e, hi_e in expr_box:
                    a = lo_e.evaluate(x)
                    b = a if hi_e is lo_e else hi_e.evaluate(x)
                    if a > b:
                        raise MapDefinitionError(
                            f"map {self.label!r} produced lo {a!r} > hi {b!r} at {x}"
                        )
                    lo.append(a)
                    hi.append(b)
                boxes.append(Box(tuple(lo), tuple(hi)))
        if not boxes:
            raise MapDefinitionError(
                f"map {self.label!r} has an empty image at {x} (no piece matches)"
            )
        return CompactSet(tuple(boxes))

    def region_boundaries(self) -> dict[int, tuple[float, ...]]:
        acc: dict[int, set[float]] = {}
        for p in self.pieces:
            for c in p.region.conditions:
                acc.setdefault(c.var, set()).add(c.bound)
        return {j: tuple(sorted(vals)) for j, vals in acc.items()}


class ProductMap(SetValuedMap):
    """Cartesian product: the image at (x, y) is F(x) x G(y), realised as
    the pairwise products of the factor boxes."""

    kind = "product"

    def __init__(self, left: SetValuedMap, right: SetValuedMap,
                 label: str | None = None):
        growth = None
        if left.growth is not None and right.growth is not None:
            # |(u, v)| <= |u| + |v| and |x|, |y| <= |(x, y)|
            growth = (left.growth[0] + right.growth[0],
                      left.growth[1] + right.growth[1])
        super().__init__(left.dim + right.dim, growth, label)
        self.left = left
        self.right = right

    def evaluate(self, x: Sequence[float]) -> CompactSet:
        x = self._check_point(x)
        a = self.left.evaluate(x[: self.left.dim])
        b = self.right.evaluate(x[self.left.dim :])
        boxes = tuple(
            Box(ba.lo + bb.lo, ba.hi + bb.hi)
            for ba in a.boxes
            for bb in b.boxes
        )
        return CompactSet(boxes)

    def region_boundaries(self) -> dict[int, tuple[float, ...]]:
        out = dict(self.left.region_boundaries())
        shift = self.left.dim
        for j, vals in self.right.region_boundaries().items():
            out[j + shift] = vals
        return out


class UnionMap(SetValuedMap):
    """Pointwise union: the image box lists of both maps, concatenated."""

    kind = "union"

    def __init__(self, left: SetValuedMap, right: SetValuedMap,
                 label: str | None = None):
        if left.dim != right.dim:
            raise MapDefinitionError(
                f"union requires equal dimensions, got {left.dim} and {right.dim}"
            )
        growth = None
        if left.growth is not None and right.growth is not None:
            growth = (max(left.growth[0], right.growth[0]),
                      max(left.growth[1], right.growth[1]))
        super().__init__(left.dim, growth, label)
        self.left = left
        self.right = right

    def evaluate(self, x: Sequence[float]) -> CompactSet:
        x = self._check_point(x)
        return CompactSet(self.left.evaluate(x).boxes + self.right.evaluate(x).boxes)

    def region_boundaries(self) -> dict[int, tuple[float, ...]]:
        out: dict[int, set[float]] = {
            j: set(v) for j, v in self.left.region_boundaries().items()
        }
        for j, vals in self.right.region_boundaries().items():
            out.setdefault(j, set()).update(vals)
        return {j: tuple(sorted(v)) for j, v in out.items()}


class NativeMap(SetValuedMap):
    """Map backed by a Python callable; used for builtins whose images are
    not expressible in the piecewise expression grammar."""

    kind = "builtin"

    def __init__(self, dim: int, fn: Callable[[Vector], CompactSet],
                 name: str, params: dict,
                 growth: tuple[float, float] | None = None,
                 boundaries: dict[int, tuple[float, ...]] | None = None,
                 label: str | None = None):
        super().__init__(dim, growth, label or name)
        self._fn = fn
        self.name = name
        self.params = dict(params)
        self._boundaries = dict(boundaries or {})

    def evaluate(self, x: Sequence[float]) -> CompactSet:
        x = self._check_point(x)
        s = self._fn(x)
        if s.dim != self.dim:
            raise MapDefinitionError(
                f"builtin {self.name!r} returned dimension {s.dim}, expected {self.dim}"
            )
        return s

    def region_boundaries(self) -> dict[int, tuple[float, ...]]:
        return dict(self._boundaries)


def product(f: SetValuedMap, g: SetValuedMap) -> SetValuedMap:
    """Cartesian product of two maps (dimensions add)."""
    return ProductMap(f, g, label=f"product({f.label},{g.label})")


def union(f: SetValuedMap, g: SetValuedMap) -> SetValuedMap:
    """Pointwise union of two maps of equal dimension."""
    return UnionMap(f, g, label=f"union({f.label},{g.label})")


# ---------------------------------------------------------------------------
# Builtin catalog
# ---------------------------------------------------------------------------

_X = Expr.var(0)


def _interval_box(lo: Expr, hi: Expr) -> ExprBox:
    return ((lo, hi),)


def _point_box(e: Expr) -> ExprBox:
    return ((e, e),)


def _closed(op_lo: str, bound: float, var: int = 0) -> Region:
    return Region((Condition(var, op_lo, bound),))


def _make_example1() -> SetValuedMap:
    pieces = (
        Piece(_closed("le", 0.0), (_interval_box(Expr.const(-1.0), Expr.const(0.0)),)),
        Piece(_closed("ge", 0.0), (_interval_box(Expr.const(-1.0), Expr.const(1.0)),)),
    )
    return PiecewiseMap(1, pieces, growth=(1.0, 0.0), label="example1")


def _make_example2_F() -> SetValuedMap:
    pieces = (
        Piece(Region(), (_point_box(_X), _point_box(Expr.cbrt(_X)))),
    )
    return PiecewiseMap(1, pieces, growth=(1.0, 1.0), label="example2_F")


def _make_example2_G() -> SetValuedMap:
    minus = Expr.sub(_X, Expr.const(1.0))
    plus = Expr.add(_X, Expr.const(1.0))
    pieces = (
        Piece(_closed("le", 0.0), (_point_box(Expr.cbrt(_X)), _point_box(minus))),
        Piece(_closed("ge", 0.0), (_point_box(Expr.cbrt(_X)), _point_box(plus))),
    )
    return PiecewiseMap(1, pieces, growth=(1.0, 1.0), label="example2_G")


def _make_example3() -> SetValuedMap:
    lo = Expr.sub(Expr.cbrt(_X), Expr.const(1.0))
    hi_neg = Expr.cbrt(_X)
    hi_pos = Expr.add(Expr.cbrt(_X), Expr.const(1.0))
    first = PiecewiseMap(
        1,
        (
            Piece(_closed("le", 0.0), (_interval_box(lo, hi_neg),)),
            Piece(_closed("ge", 0.0), (_interval_box(lo, hi_pos),)),
        ),
        growth=(2.0, 1.0),
        label="example3.x1",
    )
    second = PiecewiseMap(
        1,
        (
            Piece(Region(), (
                _interval_box(Expr.const(-2.0), Expr.const(-1.0)),
                _interval_box(Expr.const(1.0), Expr.const(2.0)),
            )),
        ),
        growth=(2.0, 0.0),
        label="example3.x2",
    )
    return ProductMap(first, second, label="example3")


def _sign_branch(scale: float) -> SetValuedMap:
    pieces = (
        Piece(_closed("le", 0.0), (_point_box(Expr.const(-scale)),)),
        Piece(_closed("ge", 0.0), (_point_box(Expr.const(scale)),)),
    )
    return PiecewiseMap(1, pieces, growth=(scale, 0.0),
                        label=f"signbranch({scale:g})")


def _make_example4(n: int) -> SetValuedMap:
    if n < 1:
        raise ValueError("example4 needs n >= 1")
    full: SetValuedMap = _sign_branch(1.0)
    half: SetValuedMap = _sign_branch(0.5)
    for _ in range(n - 1):
        full = ProductMap(_sign_branch(1.0), full)
        half = ProductMap(_sign_branch(0.5), half)
    m = UnionMap(half, full, label=f"example4({n})")
    return m


def _make_antisign() -> SetValuedMap:
    # Velocity pushes against the displacement on both sides of 0; the
    # selection constraint becomes infeasible after any sign crossing.
    pieces = (
        Piece(_closed("ge", 0.0), (_point_box(Expr.const(-1.0)),)),
        Piece(_closed("le", 0.0), (_point_box(Expr.const(1.0)),)),
    )
    return PiecewiseMap(1, pieces, growth=(1.0, 0.0), label="antisign")


def _normgrad_origin(n: int, k: int) -> CompactSet:
    points: list[Vector] = []
    if n == 2:
        for i in range(k):
            angle = 2.0 * math.pi * i / k
            points.append((math.cos(angle), math.sin(angle)))
    else:
        axis = 0
        sign = 1.0
        for _ in range(k):
            v = [0.0] * n
            v[axis] = sign
            points.append(tuple(v))
            if sign > 0:
                sign = -1.0
            else:
                sign = 1.0
                axis = (axis + 1) % n
    return CompactSet.of_points(*points)


def _make_normgrad(n: int, k: int) -> SetValuedMap:
    if n < 2:
        raise ValueError("normgrad needs n >= 2")
    if k < 1:
        raise ValueError("normgrad needs k >= 1")
    origin = _normgrad_origin(n, k)

    def fn(x: Vector) -> CompactSet:
        r = math.hypot(*x)
        if r == 0.0:
            return origin
        return CompactSet.of_points(tuple(v / r for v in x))

    return NativeMap(
        n, fn, "normgrad", {"n": n, "k": k},
        growth=(1.0, 0.0),
        boundaries={j: (0.0,) for j in range(n)},
        label=f"normgrad({n},{k})",
    )


BUILTIN_NAMES = (
    "example1", "example2_F", "example2_G", "example3",
    "example4", "antisign", "normgrad",
)


def builtin(name: str, params: dict | None = None) -> SetValuedMap:
    """Construct a catalog map by name.

    ``example4`` takes ``n`` (state dimension); ``normgrad`` takes ``n``
    and ``k`` (how many unit vectors stand in for the image at the
    origin).  All other names take no parameters.
    """
    params = dict(params or {})
    if name == "example1":
        m = _make_example1()
    elif name == "example2_F":
        m = _make_example2_F()
    elif name == "example2_G":
        m = _make_example2_G()
    elif name == "example3":
        m = _make_example3()
    elif name == "example4":
        m = _make_example4(int(params.pop("n", 1)))
    elif name == "antisign":
        m = _make_antisign()
    elif name == "normgrad":
        m = _make_normgrad(int(params.pop("n", 2)), int(params.pop("k", 4)))
    else:
        raise ValueError(f"unknown builtin map {name!r}")
    if params:
        raise ValueError(f"unexpected parameters for {name!r}: {sorted(params)}")
    return m
