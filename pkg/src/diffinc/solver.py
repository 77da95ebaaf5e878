"""Euler polygon construction, a-priori bounds and refinement studies.

The polygon is piecewise linear: ``x(t) = x(t_i) + (t - t_i) * v_i`` on
each mesh interval, with ``v_0`` taken from the initial image and every
later velocity chosen so it never moves against the sign of the
previous displacement.  That selection rule makes each coordinate of
the polygon and of its derivative monotone by construction.

A-priori bounds: if ``sup_norm(F(x)) <= A + B*|x|`` then every solution
of the inflated inclusion satisfies ``|x(t)| <= L`` and speed ``<= M``
where (Gronwall majorant ``r' = A + B + 1 + B*r``)::

    L = |x0| * exp(B*T) + ((A + B + 1) / B) * (exp(B*T) - 1)   (B > 0)
    L = |x0| + (A + 1) * T                                     (B = 0)
    M = A + B + 1 + B * L

The mesh condition ``h * M < 1`` is enforced by default whenever growth
constants are declared.
"""

from __future__ import annotations

import math
import warnings
from bisect import bisect_right
from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

from . import analyzer
from .selector import (
    SelectionPolicy,
    SignPattern,
    WcmInfeasible,
    initial_velocity,
    select_velocity,
)
from .setmap import SetValuedMap, Vector, as_vector, norm

__all__ = [
    "GrowthBounds",
    "MeshTooCoarse",
    "Trajectory",
    "ConvergenceReport",
    "gronwall_bounds",
    "min_steps",
    "euler_polygon",
    "converge",
    "trajectory_to_csv",
    "trajectory_from_csv",
]


class MeshTooCoarse(ValueError):
    """N violates the mesh condition h*M < 1 for the declared growth."""


@dataclass(frozen=True)
class GrowthBounds:
    """Linear-growth constants and the state/speed bounds they imply."""

    a: float
    b: float
    x0_norm: float
    horizon: float
    state_bound: float     # L
    velocity_bound: float  # M


def gronwall_bounds(a: float, b: float, x0_norm: float, horizon: float) -> GrowthBounds:
    """Bounds L, M for the module-docstring majorant; see formulas there."""
    if a < 0 or b < 0:
        raise ValueError("growth constants must be >= 0")
    if horizon <= 0:
        raise ValueError("horizon must be > 0")
    x0_norm = abs(float(x0_norm))
    if b > 0:
        grow = math.exp(b * horizon)
        state = x0_norm * grow + ((a + b + 1.0) / b) * (grow - 1.0)
    else:
        state = x0_norm + (a + 1.0) * horizon
    speed = a + b + 1.0 + b * state
    return GrowthBounds(a, b, x0_norm, horizon, state, speed)


def min_steps(bounds: GrowthBounds) -> int:
    """Smallest N with (T/N) * M < 1, i.e. floor(T*M) + 1."""
    return int(math.floor(bounds.horizon * bounds.velocity_bound)) + 1


@dataclass(frozen=True)
class Trajectory:
    """Euler polygon: N+1 nodes, N per-interval velocities.

    ``times[i] = (i / N) * T`` so refinements that double N share the
    coarse grid bit-exactly.  Velocities are held constant on
    ``[t_i, t_{i+1})``; the final interval is closed.
    """

    times: tuple[float, ...]
    nodes: tuple[Vector, ...]
    velocities: tuple[Vector, ...]
    map_label: str
    policy: SelectionPolicy

    def __post_init__(self) -> None:
        if len(self.nodes) != len(self.times) or len(self.velocities) != len(self.times) - 1:
            raise ValueError("node/velocity counts do not match the mesh")
        if self.times[0] != 0.0 or any(a >= b for a, b in zip(self.times, self.times[1:])):
            raise ValueError("times must increase strictly from 0")

    @property
    def steps(self) -> int:
        return len(self.velocities)

    @property
    def horizon(self) -> float:
        return self.times[-1]

    @property
    def mesh_size(self) -> float:
        return self.horizon / self.steps

    @property
    def dim(self) -> int:
        return len(self.nodes[0])

    @property
    def terminal(self) -> Vector:
        return self.nodes[-1]

    def interpolate(self, t: float) -> Vector:
        """Piecewise-linear value; exactly the stored node at node times."""
        if not (0.0 <= t <= self.horizon):
            raise ValueError(f"t = {t!r} outside [0, {self.horizon!r}]")
        i = bisect_right(self.times, t) - 1
        if i >= self.steps:
            i = self.steps - 1
        if self.times[i] == t:
            return self.nodes[i]
        if t == self.horizon:
            return self.nodes[-1]
        dt = t - self.times[i]
        v = self.velocities[i]
        return tuple(xc + dt * vc for xc, vc in zip(self.nodes[i], v))


def _mesh_times(horizon: float, n: int) -> tuple[float, ...]:
    return tuple((i / n) * horizon for i in range(n + 1))


def euler_polygon(
    m: SetValuedMap,
    x0: Sequence[float],
    horizon: float,
    n: int | None = None,
    policy: SelectionPolicy = SelectionPolicy(),
    v0: Sequence[float] | None = None,
    enforce_mesh: bool = True,
) -> Trajectory:
    """Build the N-step polygon from x0 over [0, horizon].

    ``n = None`` uses the smallest mesh allowed by the map's declared
    growth constants.  With declared growth, ``n`` below that minimum
    raises MeshTooCoarse unless ``enforce_mesh=False`` (then it warns
    and proceeds); without declared growth the mesh condition cannot be
    checked and a warning is issued.

    Raises WcmInfeasible, annotated with step, time and state, when no
    image point satisfies the sign constraint at some node.
    """
    x0 = as_vector(x0)
    if len(x0) != m.dim:
        raise ValueError(f"x0 has dimension {len(x0)}, map has {m.dim}")
    if horizon <= 0:
        raise ValueError("horizon must be > 0")

    bounds = None
    if m.growth is not None:
        bounds = gronwall_bounds(m.growth[0], m.growth[1], norm(x0), horizon)
    if n is None:
        if bounds is None:
            raise ValueError(
                "n is required for maps without declared growth constants"
            )
        n = min_steps(bounds)
    if n < 1:
        raise ValueError("n must be >= 1")
    if bounds is None:
        warnings.warn(
            f"map {m.label!r} declares no growth constants; "
            "mesh condition h*M < 1 not checked",
            stacklevel=2,
        )
    elif n < min_steps(bounds):
        msg = (
            f"n = {n} gives h*M = {(horizon / n) * bounds.velocity_bound:.6g} "
            f">= 1; need n >= {min_steps(bounds)}"
        )
        if enforce_mesh:
            raise MeshTooCoarse(msg)
        warnings.warn(msg, stacklevel=2)

    times = _mesh_times(horizon, n)
    h = horizon / n
    nodes = [x0]
    v = initial_velocity(m.evaluate(x0), policy, v0)
    velocities = [v]
    x = x0
    for i in range(1, n):
        x = tuple(xc + h * vc for xc, vc in zip(x, v))
        nodes.append(x)
        signs = SignPattern.of_vector(v)
        image = m.evaluate(x)
        try:
            v = select_velocity(image, v, signs, policy)
        except WcmInfeasible as e:
            raise WcmInfeasible(
                e.prev_v, e.signs, e.image,
                state=x, step=i, time=times[i],
            ) from None
        velocities.append(v)
    nodes.append(tuple(xc + h * vc for xc, vc in zip(x, v)))
    return Trajectory(times, tuple(nodes), tuple(velocities), m.label, policy)


@dataclass(frozen=True)
class ConvergenceReport:
    """Mesh-refinement study: N doubles per level, deltas compare
    consecutive levels on the coarse grid (observed Cauchy behaviour;
    no limit is asserted)."""

    map_label: str
    policy: SelectionPolicy
    x0: Vector
    horizon: float
    trajectories: tuple[Trajectory, ...]
    deltas: tuple[float, ...]
    residuals: tuple[tuple[float, float], ...]
    monotone: tuple[tuple[str, ...], ...]

    def to_json_dict(self) -> dict:
        levels = []
        for traj, res, mono in zip(self.trajectories, self.residuals, self.monotone):
            levels.append({
                "steps": traj.steps,
                "mesh_size": traj.mesh_size,
                "terminal": list(traj.terminal),
                "max_state_norm": max(norm(p) for p in traj.nodes),
                "max_velocity_norm": max(norm(v) for v in traj.velocities),
                "node_residual": res[0],
                "interval_residual": res[1],
                "monotone": list(mono),
            })
        return {
            "map": self.map_label,
            "policy": self.policy.variant,
            "slack": self.policy.slack,
            "x0": list(self.x0),
            "horizon": self.horizon,
            "levels": levels,
            "deltas": list(self.deltas),
        }


def _grid_delta(coarse: Trajectory, fine: Trajectory) -> float:
    worst = 0.0
    for t, node in zip(coarse.times, coarse.nodes):
        other = fine.interpolate(t)
        worst = max(worst, math.hypot(*(a - b for a, b in zip(node, other))))
    return worst


def converge(
    m: SetValuedMap,
    x0: Sequence[float],
    horizon: float,
    n0: int,
    levels: int,
    policy: SelectionPolicy = SelectionPolicy(),
    v0: Sequence[float] | None = None,
    samples_per_interval: int = 4,
    threads: int | None = None,
) -> ConvergenceReport:
    """Run `levels` polygons with N, 2N, 4N, ... steps and compare them.

    Starts at max(n0, declared mesh minimum).  Levels are independent
    solves (selections are not nested across levels).  WcmInfeasible is
    re-raised annotated with the level at which it occurred.
    """
    if levels < 2:
        raise ValueError("a convergence study needs at least 2 levels")
    x0 = as_vector(x0)
    start = n0
    if m.growth is not None:
        bounds = gronwall_bounds(m.growth[0], m.growth[1], norm(x0), horizon)
        start = max(n0, min_steps(bounds))
    ns = [start * (2 ** k) for k in range(levels)]

    def solve(n: int) -> Trajectory:
        return euler_polygon(m, x0, horizon, n, policy, v0)

    trajectories: list[Trajectory] = []
    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(solve, n) for n in ns]
            for lvl, fut in enumerate(futures):
                try:
                    trajectories.append(fut.result())
                except WcmInfeasible as e:
                    raise WcmInfeasible(
                        e.prev_v, e.signs, e.image, state=e.state,
                        step=e.step, time=e.time, level=lvl,
                    ) from None
    else:
        for lvl, n in enumerate(ns):
            try:
                trajectories.append(solve(n))
            except WcmInfeasible as e:
                raise WcmInfeasible(
                    e.prev_v, e.signs, e.image, state=e.state,
                    step=e.step, time=e.time, level=lvl,
                ) from None

    deltas = tuple(
        _grid_delta(coarse, fine)
        for coarse, fine in zip(trajectories, trajectories[1:])
    )
    residuals = tuple(
        analyzer.residual(traj, m, samples_per_interval) for traj in trajectories
    )
    monotone = tuple(
        tuple(r.classification for r in analyzer.check_trajectory_monotone(traj))
        for traj in trajectories
    )
    return ConvergenceReport(
        m.label, policy, x0, float(horizon),
        tuple(trajectories), deltas, residuals, monotone,
    )


# ---------------------------------------------------------------------------
# CSV export (decimal, 17 significant digits: round-trips bit-exactly)
# ---------------------------------------------------------------------------


def _fmt(v: float) -> str:
    return format(v, ".17g")


def trajectory_to_csv(traj: Trajectory) -> str:
    n = traj.dim
    header = ["t"] + [f"x_{j + 1}" for j in range(n)] + [f"v_{j + 1}" for j in range(n)]
    lines = [",".join(header)]
    for i, (t, node) in enumerate(zip(traj.times, traj.nodes)):
        v = traj.velocities[min(i, traj.steps - 1)]  # last row repeats v^{N-1}
        lines.append(",".join(_fmt(c) for c in (t, *node, *v)))
    return "\n".join(lines) + "\n"


def trajectory_from_csv(text: str, map_label: str = "csv",
                        policy: SelectionPolicy = SelectionPolicy()) -> Trajectory:
    lines = [ln for ln in text.split("\n") if ln.strip()]
    header = lines[0].split(",")
    if not header or header[0] != "t" or (len(header) - 1) % 2 != 0:
        raise ValueError("not a trajectory CSV (header must be t,x_1..,v_1..)")
    n = (len(header) - 1) // 2
    times: list[float] = []
    nodes: list[Vector] = []
    velocities: list[Vector] = []
    for ln in lines[1:]:
        cells = [float(c) for c in ln.split(",")]
        if len(cells) != 1 + 2 * n:
            raise ValueError(f"row has {len(cells)} cells, expected {1 + 2 * n}")
        times.append(cells[0])
        nodes.append(tuple(cells[1 : 1 + n]))
        velocities.append(tuple(cells[1 + n :]))
    velocities.pop()  # final row repeats the last interval velocity
    return Trajectory(tuple(times), tuple(nodes), tuple(velocities),
                      map_label, policy)
