"""Velocity selection under the componentwise sign constraint.

At each polygon step the new velocity w must satisfy, coordinate by
coordinate, ``s_j * (w_j - prev_v_j) >= -slack`` where ``s_j`` is the
sign of the previous displacement.  For box-union images that feasible
set is again a box union (each coordinate interval is clipped by a
half-line), so feasibility and the selection itself are exact interval
operations with no tolerances beyond the explicit ``slack``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .setmap import Box, CompactSet, Vector, as_vector, distance


@dataclass(frozen=True)
class SignPattern:
    """Componentwise signs of the previous displacement (exact zero test).

    Because the displacement over one mesh interval is h times the
    previous velocity, these are exactly the signs of that velocity.
    """

    signs: tuple[int, ...]

    def __post_init__(self) -> None:
        signs = tuple(int(s) for s in self.signs)
        object.__setattr__(self, "signs", signs)
        if not signs:
            raise ValueError("sign pattern needs at least one coordinate")
        if any(s not in (-1, 0, 1) for s in signs):
            raise ValueError("sign entries must be -1, 0 or +1")

    @classmethod
    def of_vector(cls, v: Sequence[float]) -> "SignPattern":
        return cls(tuple((x > 0) - (x < 0) for x in v))

    def negated(self) -> "SignPattern":
        return SignPattern(tuple(-s for s in self.signs))

    def __len__(self) -> int:
        return len(self.signs)

    def __iter__(self):
        return iter(self.signs)


_POLICY_VARIANTS = ("project", "lex_min", "lex_max")


@dataclass(frozen=True)
class SelectionPolicy:
    """How to pick one point from the feasible region.

    ``project`` (default) clamps the previous velocity into the feasible
    region, minimising velocity chatter; ``lex_min`` / ``lex_max`` take
    the lexicographic extreme vertex, which reproduces branch-following
    behaviour on multi-branch images.  ``slack`` relaxes the sign
    constraint; it exists for maps whose images carry expression
    round-off and defaults to 0 (exact feasibility).
    """

    variant: str = "project"
    slack: float = 0.0

    def __post_init__(self) -> None:
        if self.variant not in _POLICY_VARIANTS:
            raise ValueError(
                f"unknown policy {self.variant!r}; choose from {_POLICY_VARIANTS}"
            )
        if not (self.slack >= 0.0):
            raise ValueError("slack must be >= 0")


class WcmInfeasible(RuntimeError):
    """No image point satisfies the sign constraint.

    Signals that the componentwise monotone selection condition fails
    along the trajectory; carries the offending state (when known), the
    previous velocity and the sign pattern as a re-checkable
    certificate.
    """

    def __init__(self, prev_v: Vector, signs: SignPattern, image: CompactSet,
                 state: Vector | None = None, step: int | None = None,
                 time: float | None = None, level: int | None = None):
        self.prev_v = prev_v
        self.signs = signs
        self.image = image
        self.state = state
        self.step = step
        self.time = time
        self.level = level
        super().__init__(self._message())

    def _message(self) -> str:
        where = ""
        if self.step is not None:
            where = f" at step {self.step} (t = {self.time})"
        if self.state is not None:
            where += f", state {self.state}"
        return (
            f"no feasible velocity{where}: previous velocity {self.prev_v}, "
            f"sign pattern {self.signs.signs}"
        )

    def to_json_dict(self) -> dict:
        out = {
            "prev_velocity": list(self.prev_v),
            "sign_pattern": list(self.signs.signs),
            "image": [[list(b.lo), list(b.hi)] for b in self.image.boxes],
        }
        if self.state is not None:
            out["state"] = list(self.state)
        if self.step is not None:
            out["step"] = self.step
            out["time"] = self.time
        if self.level is not None:
            out["level"] = self.level
        return out


def _constrain_box(box: Box, prev_v: Vector, signs: SignPattern,
                   slack: float) -> Box | None:
    lo = list(box.lo)
    hi = list(box.hi)
    for j, s in enumerate(signs):
        if s > 0:
            lo[j] = max(lo[j], prev_v[j] - slack)
        elif s < 0:
            hi[j] = min(hi[j], prev_v[j] + slack)
        if lo[j] > hi[j]:
            return None
    return Box(tuple(lo), tuple(hi))


def feasible_region(image: CompactSet, prev_v: Sequence[float],
                    signs: SignPattern, slack: float = 0.0) -> CompactSet | None:
    """Image points satisfying the sign constraint, or None if empty.

    Emptiness is a verdict, not an error; callers that need a velocity
    raise WcmInfeasible.
    """
    prev_v = as_vector(prev_v)
    if len(prev_v) != image.dim or len(signs) != image.dim:
        raise ValueError(
            f"dimension mismatch: image {image.dim}, prev_v {len(prev_v)}, "
            f"signs {len(signs)}"
        )
    kept = [
        b for box in image.boxes
        if (b := _constrain_box(box, prev_v, signs, slack)) is not None
    ]
    if not kept:
        return None
    return CompactSet(tuple(kept))


def _nearest_point(region: CompactSet, target: Vector) -> Vector:
    """Clamp target into each box; nearest wins, ties by box order then
    lexicographic order (all comparisons exact)."""
    best: tuple[float, int, Vector] | None = None
    for i, box in enumerate(region.boxes):
        p = box.clamp(target)
        d = math.hypot(*(a - b for a, b in zip(p, target)))
        key = (d, i, p)
        if best is None or key < best:
            best = key
    assert best is not None
    return best[2]


def select_velocity(image: CompactSet, prev_v: Sequence[float],
                    signs: SignPattern,
                    policy: SelectionPolicy = SelectionPolicy()) -> Vector:
    """Pick the next velocity from the constrained image; deterministic."""
    prev_v = as_vector(prev_v)
    region = feasible_region(image, prev_v, signs, policy.slack)
    if region is None:
        raise WcmInfeasible(prev_v, signs, image)
    if policy.variant == "project":
        return _nearest_point(region, prev_v)
    if policy.variant == "lex_min":
        return min(b.lo for b in region.boxes)
    return max(b.hi for b in region.boxes)


def initial_velocity(image: CompactSet,
                     policy: SelectionPolicy = SelectionPolicy(),
                     override: Sequence[float] | None = None) -> Vector:
    """First velocity: policy-chosen from the image, or a validated override."""
    if override is not None:
        v = as_vector(override)
        if len(v) != image.dim:
            raise ValueError(
                f"initial velocity has dimension {len(v)}, image has {image.dim}"
            )
        if distance(image, v) > policy.slack:
            raise ValueError(
                f"initial velocity {v} is not in the image (distance "
                f"{distance(image, v)!r} exceeds slack {policy.slack!r})"
            )
        return v
    if policy.variant == "project":
        return _nearest_point(image, (0.0,) * image.dim)
    if policy.variant == "lex_min":
        return min(b.lo for b in image.boxes)
    return max(b.hi for b in image.boxes)
