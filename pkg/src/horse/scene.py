"""Scene-graph domain types and geometric relation derivation.

A scene graph is one image's symbolic content: objects with normalized
bounding boxes plus the spatial/size relation triples derived from them by
deterministic rules. Coordinates are normalized to [0,1] with the origin at
the top-left corner and y increasing downward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable

from .errors import ConfigError, EmptyScene

CENTER_DISTANCE_MAX = math.sqrt(0.5)  # distance from image center to a corner


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box in normalized [0,1] coordinates, y downward."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if not (0.0 <= self.x_min < self.x_max <= 1.0):
            raise ValueError(f"bad x extent [{self.x_min}, {self.x_max}]")
        if not (0.0 <= self.y_min < self.y_max <= 1.0):
            raise ValueError(f"bad y extent [{self.y_min}, {self.y_max}]")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> tuple[float, float]:
        return ((self.x_min + self.x_max) / 2.0, (self.y_min + self.y_max) / 2.0)

    def x_overlap(self, other: "BBox") -> float:
        """Length of the horizontal interval shared with `other` (>= 0)."""
        return max(0.0, min(self.x_max, other.x_max) - max(self.x_min, other.x_min))

    def encloses(self, other: "BBox") -> bool:
        """Non-strict edge-inclusive containment of `other`."""
        return (
            self.x_min <= other.x_min
            and self.y_min <= other.y_min
            and other.x_max <= self.x_max
            and other.y_max <= self.y_max
        )


class Predicate(str, Enum):
    """The relation vocabulary. Values double as the wire/term spelling."""

    ABOVE = "above"
    BELOW = "below"
    LEFT_OF = "left_of"
    RIGHT_OF = "right_of"
    IN_FRONT_OF = "in_front_of"
    BEHIND = "behind"
    CONTAINS = "contains"
    INSIDE = "inside"
    ON = "on"
    NEAR = "near"
    BIGGER_THAN = "bigger_than"
    SMALLER_THAN = "smaller_than"

    @property
    def inverse(self) -> "Predicate | None":
        """The predicate naming the same fact seen from the other side.

        `on` has no stored inverse; `near` is its own inverse.
        """
        return _INVERSE[self]


_INVERSE: dict[Predicate, Predicate | None] = {
    Predicate.ABOVE: Predicate.BELOW,
    Predicate.BELOW: Predicate.ABOVE,
    Predicate.LEFT_OF: Predicate.RIGHT_OF,
    Predicate.RIGHT_OF: Predicate.LEFT_OF,
    Predicate.IN_FRONT_OF: Predicate.BEHIND,
    Predicate.BEHIND: Predicate.IN_FRONT_OF,
    Predicate.CONTAINS: Predicate.INSIDE,
    Predicate.INSIDE: Predicate.CONTAINS,
    Predicate.ON: None,
    Predicate.NEAR: Predicate.NEAR,
    Predicate.BIGGER_THAN: Predicate.SMALLER_THAN,
    Predicate.SMALLER_THAN: Predicate.BIGGER_THAN,
}


@dataclass(frozen=True)
class RelationTriple:
    """One (subject, predicate, object) fact between two scene objects."""

    subject_id: int
    predicate: Predicate
    object_id: int

    def __post_init__(self):
        if self.subject_id == self.object_id:
            raise ValueError("relation subject and object must differ")


@dataclass(frozen=True)
class SceneObject:
    """One detected object with canonical attributes and derived geometry.

    `area`, `size_rank` and `salience` are populated by normalize_sizes;
    they are 0/0/0.0 placeholders until then. size_rank 1 is the largest
    object in the scene. Attributes with no annotation stay None/empty.
    """

    object_id: int
    label: str
    bbox: BBox
    depth: float | None = None
    colors: frozenset[str] = frozenset()
    shape: str | None = None
    confidence: float = 1.0
    area: float = 0.0
    size_rank: int = 0
    salience: float = 0.0

    def __post_init__(self):
        if not self.label:
            raise ValueError("object label must be non-empty")
        if self.depth is not None and not (0.0 <= self.depth <= 1.0):
            raise ValueError(f"depth {self.depth} outside [0,1]")
        if not (0.0 <= self.confidence <= 1.0):
            raise ValueError(f"confidence {self.confidence} outside [0,1]")

    @property
    def center(self) -> tuple[float, float]:
        return self.bbox.center


@dataclass(frozen=True)
class SceneGraph:
    """One image's objects plus the relation triples derived from them."""

    image_id: str
    objects: tuple[SceneObject, ...]
    relations: frozenset[RelationTriple]
    image_uri: str | None = None
    built_at: float = 0.0

    def __post_init__(self):
        ids = {o.object_id for o in self.objects}
        if len(ids) != len(self.objects):
            raise ValueError(f"duplicate object_id in scene {self.image_id!r}")
        for t in self.relations:
            if t.subject_id not in ids or t.object_id not in ids:
                raise ValueError(f"relation {t} references a missing object")

    def object_by_id(self, object_id: int) -> SceneObject:
        for o in self.objects:
            if o.object_id == object_id:
                return o
        raise KeyError(object_id)

    @property
    def labels(self) -> set[str]:
        return {o.label for o in self.objects}


@dataclass(frozen=True)
class RelationConfig:
    """Thresholds for the geometric relation rules.

    tau_v / tau_h: minimum center separation for above/left_of.
    eps_on: max gap between a subject's bottom edge and a support's top edge.
    tau_d: minimum depth separation for in_front_of.
    delta_near: max center distance for near.
    kappa: containment area ratio cap, must stay below 1 so two identical
        boxes never contain each other.
    sigma: area ratio for bigger_than, must exceed 1 so the relation stays
        antisymmetric.
    above_needs_x_overlap: when True (default), diagonally separated objects
        read as left/right only, never above/below.
    """

    tau_v: float = 0.05
    tau_h: float = 0.05
    eps_on: float = 0.05
    tau_d: float = 0.05
    delta_near: float = 0.2
    kappa: float = 0.9
    sigma: float = 1.5
    above_needs_x_overlap: bool = True

    def __post_init__(self):
        for name in ("tau_v", "tau_h", "eps_on", "tau_d", "delta_near"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)}")
        if not (0.0 < self.kappa < 1.0):
            raise ConfigError(f"kappa must be in (0,1), got {self.kappa}")
        if self.sigma <= 1.0:
            raise ConfigError(f"sigma must be > 1, got {self.sigma}")


DEFAULT_RELATION_CONFIG = RelationConfig()

# Default mix of relative size and centrality in the salience score.
SALIENCE_AREA_WEIGHT = 0.7
SALIENCE_CENTER_WEIGHT = 0.3


def normalize_sizes(
    objects: list[SceneObject],
    area_weight: float = SALIENCE_AREA_WEIGHT,
    center_weight: float = SALIENCE_CENTER_WEIGHT,
) -> list[SceneObject]:
    """Populate area, size_rank and salience on every object.

    size_rank orders objects by descending area, ties broken by ascending
    object_id. The raw salience of an object is

        area_weight * (area / max scene area)
        + center_weight * (1 - center_distance / corner_distance)

    clamped to [0,1], then rescaled by the scene maximum so the most salient
    object(s) score exactly 1.0.
    """
    if not objects:
        raise EmptyScene("cannot normalize an empty object list")

    areas = {o.object_id: o.bbox.area for o in objects}
    max_area = max(areas.values())
    order = sorted(objects, key=lambda o: (-areas[o.object_id], o.object_id))
    ranks = {o.object_id: i + 1 for i, o in enumerate(order)}

    raw: dict[int, float] = {}
    for o in objects:
        cx, cy = o.bbox.center
        d_center = math.hypot(cx - 0.5, cy - 0.5)
        score = area_weight * (areas[o.object_id] / max_area) + center_weight * (
            1.0 - d_center / CENTER_DISTANCE_MAX
        )
        raw[o.object_id] = min(1.0, max(0.0, score))
    peak = max(raw.values())

    return [
        replace(
            o,
            area=areas[o.object_id],
            size_rank=ranks[o.object_id],
            salience=raw[o.object_id] / peak if peak > 0 else 1.0,
        )
        for o in objects
    ]


def _contains(a: SceneObject, b: SceneObject, cfg: RelationConfig) -> bool:
    return a.bbox.encloses(b.bbox) and b.bbox.area <= cfg.kappa * a.bbox.area


def _above(a: SceneObject, b: SceneObject, cfg: RelationConfig) -> bool:
    if a.bbox.center[1] >= b.bbox.center[1] - cfg.tau_v:
        return False
    return a.bbox.x_overlap(b.bbox) > 0.0 if cfg.above_needs_x_overlap else True


def _left_of(a: SceneObject, b: SceneObject, cfg: RelationConfig) -> bool:
    return a.bbox.center[0] < b.bbox.center[0] - cfg.tau_h


def _on(a: SceneObject, b: SceneObject, cfg: RelationConfig) -> bool:
    if abs(a.bbox.y_max - b.bbox.y_min) > cfg.eps_on:
        return False
    if a.bbox.x_overlap(b.bbox) / a.bbox.width < 0.5:
        return False
    return not _contains(b, a, cfg)


def _in_front_of(a: SceneObject, b: SceneObject, cfg: RelationConfig) -> bool:
    if a.depth is None or b.depth is None:
        return False
    return a.depth < b.depth - cfg.tau_d


def _near(a: SceneObject, b: SceneObject, cfg: RelationConfig) -> bool:
    (ax, ay), (bx, by) = a.bbox.center, b.bbox.center
    if math.hypot(ax - bx, ay - by) > cfg.delta_near:
        return False
    return not (_contains(a, b, cfg) or _contains(b, a, cfg))


def _bigger_than(a: SceneObject, b: SceneObject, cfg: RelationConfig) -> bool:
    return a.bbox.area >= cfg.sigma * b.bbox.area


def derive_relations(
    objects: list[SceneObject], cfg: RelationConfig = DEFAULT_RELATION_CONFIG
) -> frozenset[RelationTriple]:
    """Evaluate every rule on every ordered object pair.

    The result is closed under predicate inversion: whenever above(A,B) is
    emitted so is below(B,A), and likewise for the other invertible
    predicates. `on` stores no inverse; `near` is stored in both directions.
    Objects must already be normalized.
    """
    triples: set[RelationTriple] = set()

    def emit(subj: int, pred: Predicate, obj: int):
        triples.add(RelationTriple(subj, pred, obj))
        inv = pred.inverse
        if inv is not None:
            triples.add(RelationTriple(obj, inv, subj))

    for a in objects:
        for b in objects:
            if a.object_id == b.object_id:
                continue
            if _above(a, b, cfg):
                emit(a.object_id, Predicate.ABOVE, b.object_id)
            if _left_of(a, b, cfg):
                emit(a.object_id, Predicate.LEFT_OF, b.object_id)
            if _contains(a, b, cfg):
                emit(a.object_id, Predicate.CONTAINS, b.object_id)
            if _on(a, b, cfg):
                emit(a.object_id, Predicate.ON, b.object_id)
            if _in_front_of(a, b, cfg):
                emit(a.object_id, Predicate.IN_FRONT_OF, b.object_id)
            if _bigger_than(a, b, cfg):
                emit(a.object_id, Predicate.BIGGER_THAN, b.object_id)
            if a.object_id < b.object_id and _near(a, b, cfg):
                emit(a.object_id, Predicate.NEAR, b.object_id)

    return frozenset(triples)


def build_scene_graph(
    image_id: str,
    objects: Iterable[SceneObject],
    cfg: RelationConfig = DEFAULT_RELATION_CONFIG,
    image_uri: str | None = None,
    built_at: float = 0.0,
    area_weight: float = SALIENCE_AREA_WEIGHT,
    center_weight: float = SALIENCE_CENTER_WEIGHT,
) -> SceneGraph:
    """Normalize objects, derive relations, and assemble the graph.

    Empty object lists are allowed here (they yield an empty graph); the
    per-operation EmptyScene contract applies to normalize_sizes itself.
    """
    objs = list(objects)
    if objs:
        objs = normalize_sizes(objs, area_weight, center_weight)
        relations = derive_relations(objs, cfg)
    else:
        relations = frozenset()
    return SceneGraph(
        image_id=image_id,
        objects=tuple(objs),
        relations=relations,
        image_uri=image_uri,
        built_at=built_at,
    )


def relation_evidence(
    subject: SceneObject,
    obj: SceneObject,
    predicate: Predicate,
    cfg: RelationConfig = DEFAULT_RELATION_CONFIG,
) -> dict:
    """Geometric quantities a rule inspected for (subject, predicate, object).

    Returned for explanations: the same numbers whether the rule passed or
    failed, plus a `holds` flag. Inverse predicates report the forward
    rule's quantities with the roles swapped back.
    """
    inv = predicate.inverse
    forward = {
        Predicate.ABOVE,
        Predicate.LEFT_OF,
        Predicate.CONTAINS,
        Predicate.IN_FRONT_OF,
        Predicate.BIGGER_THAN,
        Predicate.ON,
        Predicate.NEAR,
    }
    if predicate not in forward and inv is not None:
        ev = relation_evidence(obj, subject, inv, cfg)
        ev["predicate"] = predicate.value
        ev["stored_as_inverse_of"] = inv.value
        return ev

    a, b = subject, obj
    ev: dict = {"predicate": predicate.value}
    if predicate is Predicate.ABOVE:
        ev.update(
            y_center_subject=a.bbox.center[1],
            y_center_object=b.bbox.center[1],
            tau_v=cfg.tau_v,
            x_overlap=a.bbox.x_overlap(b.bbox),
            holds=_above(a, b, cfg),
        )
    elif predicate is Predicate.LEFT_OF:
        ev.update(
            x_center_subject=a.bbox.center[0],
            x_center_object=b.bbox.center[0],
            tau_h=cfg.tau_h,
            holds=_left_of(a, b, cfg),
        )
    elif predicate is Predicate.CONTAINS:
        ev.update(
            encloses=a.bbox.encloses(b.bbox),
            area_subject=a.bbox.area,
            area_object=b.bbox.area,
            kappa=cfg.kappa,
            holds=_contains(a, b, cfg),
        )
    elif predicate is Predicate.ON:
        ev.update(
            bottom_edge_subject=a.bbox.y_max,
            top_edge_object=b.bbox.y_min,
            edge_gap=abs(a.bbox.y_max - b.bbox.y_min),
            eps_on=cfg.eps_on,
            x_overlap_ratio=a.bbox.x_overlap(b.bbox) / a.bbox.width,
            holds=_on(a, b, cfg),
        )
    elif predicate is Predicate.IN_FRONT_OF:
        ev.update(
            depth_subject=a.depth,
            depth_object=b.depth,
            tau_d=cfg.tau_d,
            holds=_in_front_of(a, b, cfg),
        )
    elif predicate is Predicate.NEAR:
        (ax, ay), (bx, by) = a.bbox.center, b.bbox.center
        ev.update(
            center_distance=math.hypot(ax - bx, ay - by),
            delta_near=cfg.delta_near,
            holds=_near(a, b, cfg),
        )
    elif predicate is Predicate.BIGGER_THAN:
        ev.update(
            area_subject=a.bbox.area,
            area_object=b.bbox.area,
            sigma=cfg.sigma,
            holds=_bigger_than(a, b, cfg),
        )
    return ev
