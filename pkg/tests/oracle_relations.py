"""Independent brute-force evaluator for the geometric relation rules.

Deliberately coded without the engine's inversion closure: every one of
the twelve predicates is evaluated directly on every ordered pair from its
own inequality (inverses are written mirrored, e.g. below tests
y_c(A) > y_c(B) + tau_v rather than delegating to above). Agreement with
derive_relations therefore checks both the rules and the closure.
"""

from __future__ import annotations

import math

from horse.scene import RelationConfig, SceneObject


def _center(o: SceneObject) -> tuple[float, float]:
    b = o.bbox
    return ((b.x_min + b.x_max) / 2.0, (b.y_min + b.y_max) / 2.0)


def _area(o: SceneObject) -> float:
    b = o.bbox
    return (b.x_max - b.x_min) * (b.y_max - b.y_min)


def _x_overlap(a: SceneObject, b: SceneObject) -> float:
    return max(0.0, min(a.bbox.x_max, b.bbox.x_max) - max(a.bbox.x_min, b.bbox.x_min))


def _enclosed(inner: SceneObject, outer: SceneObject) -> bool:
    return (
        outer.bbox.x_min <= inner.bbox.x_min
        and outer.bbox.y_min <= inner.bbox.y_min
        and inner.bbox.x_max <= outer.bbox.x_max
        and inner.bbox.y_max <= outer.bbox.y_max
    )


def _contains(a: SceneObject, b: SceneObject, cfg: RelationConfig) -> bool:
    return _enclosed(b, a) and _area(b) <= cfg.kappa * _area(a)


def _holds(pred: str, a: SceneObject, b: SceneObject, cfg: RelationConfig) -> bool:
    (ax, ay), (bx, by) = _center(a), _center(b)
    if pred == "above":
        ok = ay < by - cfg.tau_v
        return ok and (_x_overlap(a, b) > 0.0 or not cfg.above_needs_x_overlap)
    if pred == "below":
        ok = ay > by + cfg.tau_v
        return ok and (_x_overlap(a, b) > 0.0 or not cfg.above_needs_x_overlap)
    if pred == "left_of":
        return ax < bx - cfg.tau_h
    if pred == "right_of":
        return ax > bx + cfg.tau_h
    if pred == "contains":
        return _contains(a, b, cfg)
    if pred == "inside":
        return _contains(b, a, cfg)
    if pred == "on":
        if abs(a.bbox.y_max - b.bbox.y_min) > cfg.eps_on:
            return False
        if _x_overlap(a, b) / (a.bbox.x_max - a.bbox.x_min) < 0.5:
            return False
        return not _contains(b, a, cfg)
    if pred == "in_front_of":
        return a.depth is not None and b.depth is not None and a.depth < b.depth - cfg.tau_d
    if pred == "behind":
        return a.depth is not None and b.depth is not None and a.depth > b.depth + cfg.tau_d
    if pred == "near":
        if math.hypot(ax - bx, ay - by) > cfg.delta_near:
            return False
        return not (_contains(a, b, cfg) or _contains(b, a, cfg))
    if pred == "bigger_than":
        return _area(a) >= cfg.sigma * _area(b)
    if pred == "smaller_than":
        return _area(b) >= cfg.sigma * _area(a)
    raise AssertionError(pred)


PREDICATES = (
    "above", "below", "left_of", "right_of", "in_front_of", "behind",
    "contains", "inside", "on", "near", "bigger_than", "smaller_than",
)


def oracle_relations(
    objects: list[SceneObject], cfg: RelationConfig = RelationConfig()
) -> set[tuple[int, str, int]]:
    """Every (subject_id, predicate, object_id) licensed by the rules."""
    out: set[tuple[int, str, int]] = set()
    for a in objects:
        for b in objects:
            if a.object_id == b.object_id:
                continue
            for pred in PREDICATES:
                if _holds(pred, a, b, cfg):
                    out.add((a.object_id, pred, b.object_id))
    return out
