"""Condition checkers: verify or refute map hypotheses on samples.

Per-pair decisions are exact for box-union images:

* the componentwise selection condition ("for every v in F(x) some
  w in F(y) moves with the displacement sign") reduces to finitely many
  hardest corners — in each coordinate the constraint on w is tightest
  at one end of the v-box, so one corner decides the whole box;
* the monotonicity form <x-y, v-w> is linear in v and w separately, so
  its minimum over box unions is attained at vertices (evaluated in
  exact rational arithmetic, so the sign is decided rigorously);
* cyclic sums split per cycle point and minimise vertex-wise, also in
  exact arithmetic (telescoping sums come out exactly zero).

Only the pair/cycle *sampling* is approximate: a ``pass-sampled``
verdict claims absence of counterexamples within the budget, never a
proof.  Every ``fail`` verdict carries a certificate that re-verifies
by direct evaluation.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .selector import SignPattern, feasible_region
from .setmap import (
    CompactSet,
    SetValuedMap,
    Vector,
    as_vector,
    distance,
    norm,
    sup_norm,
    vertices,
)


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one sampled condition check.

    ``fail`` carries a deterministic re-checkable certificate;
    ``pass-sampled`` only states that the budget found nothing.
    """

    condition: str
    verdict: str  # "pass-sampled" | "fail"
    samples: int
    seed: int
    radius: float
    certificate: dict | None = None
    extra: dict | None = None

    @property
    def failed(self) -> bool:
        return self.verdict == "fail"

    def to_json_dict(self) -> dict:
        out = {
            "condition": self.condition,
            "verdict": self.verdict,
            "samples": self.samples,
            "seed": self.seed,
            "radius": self.radius,
        }
        if self.certificate is not None:
            out["certificate"] = self.certificate
        if self.extra:
            out.update(self.extra)
        return out


# ---------------------------------------------------------------------------
# Sampling helpers
# ---------------------------------------------------------------------------

_LADDER = (0.25, 0.5, 0.75, 1.0, 2.0)
_STRADDLE = (1e-6, 1e-3, 0.1)


def _axis_point(n: int, j: int, value: float) -> Vector:
    p = [0.0] * n
    p[j] = value
    return tuple(p)


def structured_pairs(m: SetValuedMap, radius: float) -> list[tuple[Vector, Vector]]:
    """Deterministic battery: axis-aligned pairs at ladder magnitudes,
    cross-axis pairs, and pairs straddling every piece boundary."""
    n = m.dim
    mags = sorted({v for v in _LADDER if v <= radius} | {radius, radius / 2})
    signed = sorted({s * v for v in mags for s in (1.0, -1.0)} | {0.0})
    pairs: list[tuple[Vector, Vector]] = []
    for j in range(n):
        pairs.extend(
            (_axis_point(n, j, a), _axis_point(n, j, b))
            for a in signed
            for b in signed
            if a != b
        )
    if n > 1:
        for j in range(n):
            k = (j + 1) % n
            pairs.extend(
                (_axis_point(n, j, a), _axis_point(n, k, b))
                for a in (radius / 2, -radius / 2, 1.0)
                for b in (radius / 2, -radius / 2, 1.0)
            )
    for j, bounds in sorted(m.region_boundaries().items()):
        if j >= n:
            continue
        for b in bounds:
            for eps in _STRADDLE:
                above = _axis_point(n, j, b + eps)
                below = _axis_point(n, j, b - eps)
                at = _axis_point(n, j, b)
                pairs.extend([(above, below), (below, above), (at, above), (at, below)])
    return pairs


def _random_point(rng: random.Random, n: int, radius: float) -> Vector:
    return tuple(rng.uniform(-radius, radius) for _ in range(n))


def _first_failure(
    items: Sequence,
    decide: Callable,
    threads: int | None,
) -> tuple[int, dict | None]:
    """Index of the lowest failing item and its certificate.

    The item list is fixed up front, so the outcome is independent of
    the number of worker threads.
    """
    if threads is not None and threads > 1 and len(items) > 64:
        chunk = 512
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for base in range(0, len(items), chunk):
                part = items[base : base + chunk]
                for i, cert in enumerate(pool.map(decide, part)):
                    if cert is not None:
                        return base + i, cert
        return len(items), None
    for i, item in enumerate(items):
        cert = decide(item)
        if cert is not None:
            return i, cert
    return len(items), None


# ---------------------------------------------------------------------------
# Componentwise selection condition (exact per pair)
# ---------------------------------------------------------------------------


def wcm_pair_feasible(
    image_x: CompactSet, image_y: CompactSet, x: Sequence[float], y: Sequence[float]
) -> dict | None:
    """Exact decision for one (x, y): None if every v in image_x admits a
    compatible w in image_y, else a counterexample certificate.

    Hardest corner: with sigma_j = sign(x_j - y_j) the constraint on w
    is ``w_j <= v_j`` where sigma_j > 0 and ``w_j >= v_j`` where
    sigma_j < 0, so it is tightest at v*_j = lo_j (resp. hi_j); free
    coordinates take the midpoint so v* stays inside its box.  One w for
    v* serves the whole box, and v* itself is a genuine witness.
    """
    x = as_vector(x)
    y = as_vector(y)
    sigma = SignPattern.of_vector(tuple(a - b for a, b in zip(x, y)))
    # selector convention is displacement-sign based (w >= prev when s > 0),
    # which is the sigma-flipped form of the constraint above
    flipped = sigma.negated()
    for box_index, box in enumerate(image_x.boxes):
        corner = tuple(
            lo if s > 0 else hi if s < 0 else (lo + hi) / 2.0
            for lo, hi, s in zip(box.lo, box.hi, sigma)
        )
        if feasible_region(image_y, corner, flipped, 0.0) is None:
            blocking = []
            for k, ybox in enumerate(image_y.boxes):
                for j, s in enumerate(sigma):
                    if s > 0 and ybox.lo[j] > corner[j]:
                        blocking.append({
                            "box": k, "coordinate": j + 1, "needs": "<=",
                            "bound": corner[j],
                            "available": [ybox.lo[j], ybox.hi[j]],
                        })
                        break
                    if s < 0 and ybox.hi[j] < corner[j]:
                        blocking.append({
                            "box": k, "coordinate": j + 1, "needs": ">=",
                            "bound": corner[j],
                            "available": [ybox.lo[j], ybox.hi[j]],
                        })
                        break
            return {
                "x": list(x),
                "y": list(y),
                "v": list(corner),
                "box_index": box_index,
                "signs": list(sigma.signs),
                "blocking": blocking,
            }
    return None


def check_wcm_pair(m: SetValuedMap, x: Sequence[float], y: Sequence[float]) -> dict | None:
    """Exact per-pair check on a map; None means the pair passes."""
    if len(x) != m.dim or len(y) != m.dim:
        raise ValueError(f"points must have the map dimension {m.dim}")
    return wcm_pair_feasible(m.evaluate(x), m.evaluate(y), x, y)


def check_wcm(
    m: SetValuedMap,
    radius: float,
    count: int,
    seed: int,
    threads: int | None = None,
) -> CheckReport:
    """Sample `count` random pairs in [-radius, radius]^n plus the
    deterministic battery; first failure short-circuits."""
    if radius <= 0 or count < 1:
        raise ValueError("need radius > 0 and count >= 1")
    rng = random.Random(seed)
    pairs = structured_pairs(m, radius)
    pairs.extend(
        (_random_point(rng, m.dim, radius), _random_point(rng, m.dim, radius))
        for _ in range(count)
    )
    index, cert = _first_failure(
        pairs, lambda p: check_wcm_pair(m, p[0], p[1]), threads
    )
    return CheckReport(
        condition="wcm",
        verdict="fail" if cert is not None else "pass-sampled",
        samples=index + 1 if cert is not None else len(pairs),
        seed=seed,
        radius=radius,
        certificate=cert,
    )


# ---------------------------------------------------------------------------
# Monotonicity and cyclic monotonicity (vertex-exact minimisation)
# ---------------------------------------------------------------------------
# Floats are exact rationals; doing the bilinear arithmetic in Fraction
# makes the sign decision rigorous (telescoping cycle sums come out as
# an exact 0 instead of summation noise).


def _exact_diff(x: Vector, y: Vector) -> tuple[Fraction, ...]:
    return tuple(Fraction(a) - Fraction(b) for a, b in zip(x, y))


def _exact_dot(d: Sequence[Fraction], v: Vector) -> Fraction:
    total = Fraction(0)
    for a, b in zip(d, v):
        total += a * Fraction(b)
    return total


def _min_vertex(image: CompactSet, d: Sequence[Fraction]) -> tuple[Fraction, Vector]:
    best: tuple[Fraction, Vector] | None = None
    for v in vertices(image):
        val = _exact_dot(d, v)
        if best is None or val < best[0]:
            best = (val, v)
    assert best is not None
    return best


def _max_vertex(image: CompactSet, d: Sequence[Fraction]) -> tuple[Fraction, Vector]:
    val, v = _min_vertex(image, tuple(-c for c in d))
    return -val, v


def _monotone_gap(m: SetValuedMap, x: Vector, y: Vector) -> dict | None:
    if x == y:
        return None
    d = _exact_diff(x, y)
    lo_v, v = _min_vertex(m.evaluate(x), d)
    hi_w, w = _max_vertex(m.evaluate(y), d)
    value = lo_v - hi_w
    if value < 0:
        return {"x": list(x), "y": list(y), "v": list(v), "w": list(w),
                "value": float(value)}
    return None


def find_monotonicity_violation(
    m: SetValuedMap,
    radius: float,
    count: int,
    seed: int,
    threads: int | None = None,
) -> CheckReport:
    """Search for <x-y, v-w> < 0; exact per pair via vertex minimisation."""
    if radius <= 0 or count < 1:
        raise ValueError("need radius > 0 and count >= 1")
    rng = random.Random(seed)
    pairs = structured_pairs(m, radius)
    pairs.extend(
        (_random_point(rng, m.dim, radius), _random_point(rng, m.dim, radius))
        for _ in range(count)
    )
    index, cert = _first_failure(
        pairs, lambda p: _monotone_gap(m, p[0], p[1]), threads
    )
    return CheckReport(
        condition="monotone",
        verdict="fail" if cert is not None else "pass-sampled",
        samples=index + 1 if cert is not None else len(pairs),
        seed=seed,
        radius=radius,
        certificate=cert,
    )


def _cycle_gap(m: SetValuedMap, points: Sequence[Vector]) -> dict | None:
    total = Fraction(0)
    chosen: list[Vector] = []
    length = len(points)
    for i in range(1, length + 1):
        here = points[i % length]
        prev = points[i - 1]
        d = _exact_diff(here, prev)
        val, v = _min_vertex(m.evaluate(here), d)
        total += val
        chosen.append(v)
    if total < 0:
        cycle = [list(p) for p in points] + [list(points[0])]
        return {"cycle": cycle, "velocities": [list(v) for v in chosen],
                "value": float(total)}
    return None


def find_cyclic_violation(
    m: SetValuedMap,
    radius: float,
    cycle_len: int,
    count: int,
    seed: int,
    threads: int | None = None,
) -> CheckReport:
    """Search cycles whose minimal circulation sum is negative.

    The sum splits per cycle point, so each term is minimised over the
    vertices of that point's image independently (exact per cycle).
    """
    if cycle_len < 2:
        raise ValueError("cycles need at least 2 points")
    if radius <= 0 or count < 1:
        raise ValueError("need radius > 0 and count >= 1")
    rng = random.Random(seed)
    cycles: list[tuple[Vector, ...]] = [
        (a, b) for a, b in structured_pairs(m, radius) if a != b
    ]
    cycles.extend(
        tuple(_random_point(rng, m.dim, radius) for _ in range(cycle_len))
        for _ in range(count)
    )
    index, cert = _first_failure(cycles, lambda c: _cycle_gap(m, c), threads)
    return CheckReport(
        condition="cyclic",
        verdict="fail" if cert is not None else "pass-sampled",
        samples=index + 1 if cert is not None else len(cycles),
        seed=seed,
        radius=radius,
        certificate=cert,
        extra={"cycle_len": cycle_len},
    )


# ---------------------------------------------------------------------------
# Linear growth
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GrowthFit:
    """Conservative fit of sup_norm(F(x)) <= a + b|x| over the sample.

    Max-based, never an underestimate on the sampled points: b is the
    steepest observed slope of the norm against |x| (clipped at 0) and a
    closes the largest remaining gap.  ``declared_violation`` is the
    worst excess over the map's declared constants (None if undeclared).
    """

    a: float
    b: float
    declared_violation: float | None
    samples: int


def estimate_growth(
    m: SetValuedMap, radius: float, count: int, seed: int
) -> GrowthFit:
    if radius <= 0 or count < 1:
        raise ValueError("need radius > 0 and count >= 1")
    rng = random.Random(seed)
    points: list[Vector] = [(0.0,) * m.dim]
    for j in range(m.dim):
        for v in (radius, -radius, radius / 2, 1.0, -1.0):
            points.append(_axis_point(m.dim, j, v))
    points.extend(_random_point(rng, m.dim, radius) for _ in range(count))

    data = sorted((norm(p), sup_norm(m.evaluate(p))) for p in points)
    # steepest pairwise slope; equal-radius groups collapse to (min, max)
    # so consecutive groups dominate all pairs
    groups: list[tuple[float, float, float]] = []
    for r, g in data:
        if groups and groups[-1][0] == r:
            pr, gmin, gmax = groups[-1]
            groups[-1] = (pr, min(gmin, g), max(gmax, g))
        else:
            groups.append((r, g, g))
    b = 0.0
    for (r1, gmin1, _), (r2, _, gmax2) in zip(groups, groups[1:]):
        b = max(b, (gmax2 - gmin1) / (r2 - r1))
    a = max(g - b * r for r, g in data)

    violation = None
    if m.growth is not None:
        da, db = m.growth
        violation = max(0.0, max(g - da - db * r for r, g in data))
    return GrowthFit(a, b, violation, len(points))


# ---------------------------------------------------------------------------
# Closed graph (upper semi-continuity heuristic)
# ---------------------------------------------------------------------------

_GRAPH_DELTAS = (1e-5, 1e-7)


def check_closed_graph(
    m: SetValuedMap,
    radius: float,
    count: int,
    seed: int,
    eps: float,
) -> CheckReport:
    """Two-scale perturbation heuristic for upper semi-continuity.

    A point is suspect when every vertex-distance from F(x + delta*d)
    to F(x) stays above eps at both of the smallest perturbation
    scales, i.e. the image jumps away and the jump does not shrink.
    Open-region piece encodings are the typical culprit.  Boundary
    points of piecewise maps are probed first.
    """
    if eps <= 0:
        raise ValueError("eps must be > 0")
    if radius <= 0 or count < 1:
        raise ValueError("need radius > 0 and count >= 1")
    rng = random.Random(seed)
    points: list[Vector] = [(0.0,) * m.dim]
    for j, bounds in sorted(m.region_boundaries().items()):
        for b in bounds:
            points.append(_axis_point(m.dim, j, b))
    points.extend(_random_point(rng, m.dim, radius) for _ in range(count))

    directions: list[Vector] = []
    for j in range(m.dim):
        directions.append(_axis_point(m.dim, j, 1.0))
        directions.append(_axis_point(m.dim, j, -1.0))
    if m.dim > 1:
        for _ in range(2):
            d = tuple(rng.gauss(0.0, 1.0) for _ in range(m.dim))
            r = norm(d)
            if r > 0:
                directions.append(tuple(c / r for c in d))

    def probe(x: Vector) -> dict | None:
        base = m.evaluate(x)
        for d in directions:
            worst: list[float] = []
            worst_vertex: Vector | None = None
            for delta in _GRAPH_DELTAS:
                shifted = tuple(c + delta * dc for c, dc in zip(x, d))
                far = 0.0
                for u in vertices(m.evaluate(shifted)):
                    gap = distance(base, u)
                    if gap > far:
                        far = gap
                        if delta == _GRAPH_DELTAS[-1]:
                            worst_vertex = u
                worst.append(far)
            if min(worst) > eps:
                return {
                    "x": list(x),
                    "direction": list(d),
                    "deltas": list(_GRAPH_DELTAS),
                    "distances": worst,
                    "vertex": list(worst_vertex) if worst_vertex else None,
                }
        return None

    index, cert = _first_failure(points, probe, None)
    return CheckReport(
        condition="closed-graph",
        verdict="fail" if cert is not None else "pass-sampled",
        samples=index + 1 if cert is not None else len(points),
        seed=seed,
        radius=radius,
        certificate=cert,
        extra={"eps": eps},
    )


# ---------------------------------------------------------------------------
# Trajectory quality
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoordinateMonotone:
    """Exact per-coordinate classification of one polygon coordinate."""

    coordinate: int
    classification: str  # "identically-zero" | "increasing" | "decreasing"
    velocity_sign_stable: bool
    velocity_monotone: bool
    nodes_monotone: bool

    @property
    def ok(self) -> bool:
        return self.velocity_sign_stable and self.velocity_monotone and self.nodes_monotone


def check_trajectory_monotone(traj) -> tuple[CoordinateMonotone, ...]:
    """Verify sign stability and monotonicity of velocities and nodes.

    All comparisons are exact (tolerance 0); a violation indicates a
    solver bug, not a property of the map.  An all-zero velocity tail is
    monotone.
    """
    out = []
    for j in range(traj.dim):
        vs = [v[j] for v in traj.velocities]
        xs = [p[j] for p in traj.nodes]
        first = next((i for i, v in enumerate(vs) if v != 0.0), None)
        if first is None:
            out.append(CoordinateMonotone(
                j, "identically-zero",
                velocity_sign_stable=True,
                velocity_monotone=True,
                nodes_monotone=all(a == b for a, b in zip(xs, xs[1:])),
            ))
            continue
        increasing = vs[first] > 0.0
        tail = vs[first:]
        if increasing:
            stable = all(v > 0.0 for v in tail)
            vel_mono = all(a <= b for a, b in zip(tail, tail[1:]))
            node_mono = all(a <= b for a, b in zip(xs, xs[1:]))
        else:
            stable = all(v < 0.0 for v in tail)
            vel_mono = all(a >= b for a, b in zip(tail, tail[1:]))
            node_mono = all(a >= b for a, b in zip(xs, xs[1:]))
        out.append(CoordinateMonotone(
            j, "increasing" if increasing else "decreasing",
            velocity_sign_stable=stable,
            velocity_monotone=vel_mono,
            nodes_monotone=node_mono,
        ))
    return tuple(out)


def residual(traj, m: SetValuedMap, samples_per_interval: int = 4) -> tuple[float, float]:
    """(max node residual, max interior residual).

    Node residual is the distance from each interval velocity to the
    image at its node — 0 by selection soundness.  The interior residual
    samples strictly inside each interval; expected O(h) away from image
    discontinuities.
    """
    if samples_per_interval < 1:
        raise ValueError("samples_per_interval must be >= 1")
    node_res = 0.0
    for x, v in zip(traj.nodes, traj.velocities):
        node_res = max(node_res, distance(m.evaluate(x), v))
    interval_res = 0.0
    for i in range(traj.steps):
        t0 = traj.times[i]
        span = traj.times[i + 1] - t0
        v = traj.velocities[i]
        x = traj.nodes[i]
        for k in range(1, samples_per_interval + 1):
            dt = span * k / (samples_per_interval + 1)
            state = tuple(c + dt * vc for c, vc in zip(x, v))
            interval_res = max(interval_res, distance(m.evaluate(state), v))
    return node_res, interval_res
