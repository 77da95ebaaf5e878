"""Shared test utilities: independent oracles and random generators."""

import math

from diffinc.setmap import Expr, Piece, PiecewiseMap, Region, product


def reference_eval(src, x):
    """Independent recursive-descent *text* interpreter (own cube root)."""
    pos = 0

    def skip():
        nonlocal pos
        while pos < len(src) and src[pos].isspace():
            pos += 1

    def expr():
        nonlocal pos
        val = term()
        while True:
            skip()
            if pos < len(src) and src[pos] in "+-":
                op = src[pos]
                pos += 1
                rhs = term()
                val = val + rhs if op == "+" else val - rhs
            else:
                return val

    def term():
        nonlocal pos
        val = factor()
        while True:
            skip()
            if pos < len(src) and src[pos] == "*":
                pos += 1
                val = val * factor()
            else:
                return val

    def factor():
        nonlocal pos
        skip()
        ch = src[pos]
        if ch == "-":
            pos += 1
            return -factor()
        if ch == "(":
            pos += 1
            val = expr()
            skip()
            assert src[pos] == ")"
            pos += 1
            return val
        if ch.isdigit() or ch == ".":
            start = pos
            while pos < len(src) and (src[pos].isdigit() or src[pos] == "."):
                pos += 1
            if pos < len(src) and src[pos] in "eE":
                pos += 1
                if src[pos] in "+-":
                    pos += 1
                while pos < len(src) and src[pos].isdigit():
                    pos += 1
            return float(src[start:pos])
        start = pos
        while pos < len(src) and (src[pos].isalnum() or src[pos] == "_"):
            pos += 1
        name = src[start:pos]
        if name == "x":
            return x[0]
        if name.startswith("x") and name[1:].isdigit():
            return x[int(name[1:]) - 1]
        skip()
        assert src[pos] == "("
        pos += 1
        val = expr()
        skip()
        assert src[pos] == ")"
        pos += 1
        if name == "sign":
            return float((val > 0) - (val < 0))
        if name == "abs":
            return abs(val)
        assert name == "cbrt"
        return math.copysign(abs(val) ** (1.0 / 3.0), val)

    result = expr()
    skip()
    assert pos == len(src)
    return result


def random_expr(rng, max_vars, depth=0):
    roll = rng.random()
    if depth >= 4 or roll < 0.25:
        if rng.random() < 0.5:
            mantissa = round(rng.uniform(-20, 20), rng.randint(0, 6))
            return Expr.const(mantissa * 10.0 ** rng.randint(-3, 3))
        return Expr.var(rng.randrange(max_vars))
    op = rng.choice(["add", "sub", "mul", "neg", "sign", "cbrt", "abs"])
    if op in ("add", "sub", "mul"):
        return Expr(op, args=(random_expr(rng, max_vars, depth + 1),
                              random_expr(rng, max_vars, depth + 1)))
    return Expr(op, args=(random_expr(rng, max_vars, depth + 1),))


def integrate_majorant(a, b, r0, horizon, steps=20000):
    """RK4 on r' = a + b + 1 + b*r: independent check of the closed form."""
    f = lambda r: a + b + 1.0 + b * r
    h = horizon / steps
    r = r0
    for _ in range(steps):
        k1 = f(r)
        k2 = f(r + 0.5 * h * k1)
        k3 = f(r + 0.5 * h * k2)
        k4 = f(r + h * k3)
        r += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return r


def monotone_single_valued_expr(rng):
    """Nondecreasing 1-D expression c0 + sum of a_i * {x, cbrt(x), sign(x)},
    returned with tight linear-growth constants (|cbrt(x)| <= 1 + |x|)."""
    c0 = round(rng.uniform(-2, 2), 3)
    terms = [Expr.const(c0)]
    a = abs(c0)
    b = 0.0
    for fn in ("var", "cbrt", "sign"):
        if rng.random() < 0.6:
            coeff = round(rng.uniform(0, 2), 3)
            base = Expr.var(0)
            if fn == "cbrt":
                base = Expr.cbrt(base)
                a += coeff
                b += coeff
            elif fn == "sign":
                base = Expr.sign(base)
                a += coeff
            else:
                b += coeff
            terms.append(Expr.mul(Expr.const(coeff), base))
    e = terms[0]
    for t in terms[1:]:
        e = Expr.add(e, t)
    return e, a, b


def random_monotone_map(rng, dim):
    """Product of single-valued maps with nondecreasing coordinate functions."""
    factors = []
    for _ in range(dim):
        e, a, b = monotone_single_valued_expr(rng)
        factors.append(PiecewiseMap(1, (Piece(Region(), (((e, e),),)),),
                                    growth=(a, b)))
    m = factors[0]
    for f in factors[1:]:
        m = product(m, f)
    return m
