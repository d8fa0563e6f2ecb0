"""Annotation ingestion and synthetic corpus generation.

This is the boundary where externally produced detections become scene
graphs: pixel boxes are normalized, labels and attributes canonicalized,
low-confidence objects dropped, and relations derived. No pixels are ever
read; the engine only consumes annotation documents.
"""

from __future__ import annotations

import json
import logging
import re
import zlib
from dataclasses import dataclass, field
from typing import Any, BinaryIO, Iterable

from .errors import BadGeometry, ConfigError, DuplicateImage, ParseError
from .scene import (
    BBox,
    RelationConfig,
    DEFAULT_RELATION_CONFIG,
    SceneGraph,
    SceneObject,
    build_scene_graph,
)

logger = logging.getLogger(__name__)

CANONICAL_COLORS = frozenset(
    {
        "red", "orange", "yellow", "green", "blue", "purple",
        "pink", "brown", "black", "white", "gray", "beige",
    }
)

CANONICAL_SHAPES = frozenset({"round", "square", "rectangular", "triangular", "oval"})

_COLOR_SYNONYMS = {"grey": "gray"}

_SHAPE_SYNONYMS = {
    "circle": "round",
    "circular": "round",
    "sphere": "round",
    "rectangle": "rectangular",
    "rect": "rectangular",
    "triangle": "triangular",
    "ellipse": "oval",
    "elliptical": "oval",
}

DEFAULT_LABEL_SYNONYMS = {
    "automobile": "car",
    "auto": "car",
    "vehicle": "car",
    "cars": "car",
    "balls": "ball",
    "tables": "table",
    "buildings": "building",
    "houses": "house",
    "people": "human",
    "person": "human",
}

_WS = re.compile(r"\s+")


def _clean_token(text: str) -> str:
    # ':' is reserved by the index term encoding
    return _WS.sub(" ", text.strip().lower().replace(":", ""))


@dataclass(frozen=True)
class Vocabulary:
    """Canonicalization tables for labels, colors, and shapes.

    The label synonym map is path-compressed at construction so one
    application reaches a fixed point: canon(canon(x)) == canon(x).
    """

    label_synonyms: dict[str, str] = field(default_factory=dict)
    color_canon: frozenset[str] = CANONICAL_COLORS
    shape_canon: frozenset[str] = CANONICAL_SHAPES

    def __post_init__(self):
        compressed: dict[str, str] = {}
        for key in self.label_synonyms:
            seen = [key]
            target = self.label_synonyms[key]
            while target in self.label_synonyms and self.label_synonyms[target] != target:
                if target in seen:
                    raise ConfigError(f"synonym cycle through {target!r}")
                seen.append(target)
                target = self.label_synonyms[target]
            compressed[_clean_token(key)] = _clean_token(target)
        object.__setattr__(self, "label_synonyms", compressed)

    def canon_label(self, label: str) -> str:
        cleaned = _clean_token(label)
        return self.label_synonyms.get(cleaned, cleaned)

    def canon_color(self, color: str) -> str | None:
        """Canonical color name, or None when outside the palette."""
        cleaned = _clean_token(color)
        cleaned = _COLOR_SYNONYMS.get(cleaned, cleaned)
        return cleaned if cleaned in self.color_canon else None

    def canon_shape(self, shape: str) -> str | None:
        cleaned = _clean_token(shape)
        cleaned = _SHAPE_SYNONYMS.get(cleaned, cleaned)
        return cleaned if cleaned in self.shape_canon else None

    @classmethod
    def with_defaults(cls, extra_synonyms: dict[str, str] | None = None) -> "Vocabulary":
        synonyms = dict(DEFAULT_LABEL_SYNONYMS)
        if extra_synonyms:
            synonyms.update(extra_synonyms)
        return cls(label_synonyms=synonyms)

    @classmethod
    def load(cls, path: str) -> "Vocabulary":
        """Default vocabulary extended with a UTF-8 JSON synonym map."""
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in data.items()
        ):
            raise ConfigError(f"vocab file {path} must be a JSON object of string pairs")
        return cls.with_defaults(data)


DEFAULT_VOCABULARY = Vocabulary.with_defaults()


@dataclass
class LoadResult:
    """Loaded graphs plus the load report."""

    graphs: list[SceneGraph]
    empty_images: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    dropped_objects: int = 0


_IMAGE_FIELDS = {"image_id", "image_uri", "width_px", "height_px", "objects"}
_OBJECT_FIELDS = {"label", "bbox_px", "depth", "colors", "shape", "confidence"}


def _require(cond: bool, message: str, path: str):
    if not cond:
        raise ParseError(message, path)


def load_annotations(
    source: BinaryIO | bytes | str,
    vocab: Vocabulary = DEFAULT_VOCABULARY,
    min_confidence: float = 0.5,
    cfg: RelationConfig = DEFAULT_RELATION_CONFIG,
    built_at: float = 0.0,
) -> LoadResult:
    """Parse an annotation document into scene graphs.

    Pixel boxes are divided by the image dimensions, labels/colors/shapes
    canonicalized through `vocab`, and objects with confidence below
    `min_confidence` dropped (missing confidence counts as 1.0). Images left
    with zero objects are kept as empty graphs and listed in the report.
    """
    if hasattr(source, "read"):
        raw = source.read()
    else:
        raw = source
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc

    result = LoadResult(graphs=[])
    _require(isinstance(doc, dict), "document must be a JSON object", "$")
    for key in doc:
        if key != "images":
            result.warnings.append(f"ignoring unknown field {key!r}")
            logger.warning("ignoring unknown field %r", key)
    _require("images" in doc, "missing field 'images'", "$")
    _require(isinstance(doc["images"], list), "'images' must be a list", "images")

    seen_ids: set[str] = set()
    for i, entry in enumerate(doc["images"]):
        path = f"images[{i}]"
        _require(isinstance(entry, dict), "image entry must be an object", path)
        for key in entry:
            if key not in _IMAGE_FIELDS:
                result.warnings.append(f"ignoring unknown field {key!r} in {path}")
                logger.warning("ignoring unknown field %r in %s", key, path)
        for need in ("image_id", "width_px", "height_px", "objects"):
            _require(need in entry, f"missing field {need!r}", path)
        image_id = entry["image_id"]
        _require(isinstance(image_id, str) and image_id != "", "image_id must be a non-empty string", f"{path}.image_id")
        if image_id in seen_ids:
            raise DuplicateImage(image_id)
        seen_ids.add(image_id)
        width, height = entry["width_px"], entry["height_px"]
        _require(
            isinstance(width, (int, float)) and not isinstance(width, bool) and width > 0,
            "width_px must be a positive number", f"{path}.width_px",
        )
        _require(
            isinstance(height, (int, float)) and not isinstance(height, bool) and height > 0,
            "height_px must be a positive number", f"{path}.height_px",
        )
        image_uri = entry.get("image_uri")
        if image_uri is not None:
            _require(isinstance(image_uri, str), "image_uri must be a string", f"{path}.image_uri")
        _require(isinstance(entry["objects"], list), "'objects' must be a list", f"{path}.objects")

        objects: list[SceneObject] = []
        for j, obj in enumerate(entry["objects"]):
            opath = f"{path}.objects[{j}]"
            _require(isinstance(obj, dict), "object entry must be an object", opath)
            for key in obj:
                if key not in _OBJECT_FIELDS:
                    result.warnings.append(f"ignoring unknown field {key!r} in {opath}")
                    logger.warning("ignoring unknown field %r in %s", key, opath)
            for need in ("label", "bbox_px"):
                _require(need in obj, f"missing field {need!r}", opath)
            _require(
                isinstance(obj["label"], str) and obj["label"].strip() != "",
                "label must be a non-empty string", f"{opath}.label",
            )
            bbox_px = obj["bbox_px"]
            _require(
                isinstance(bbox_px, (list, tuple)) and len(bbox_px) == 4
                and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in bbox_px),
                "bbox_px must be [x, y, w, h]", f"{opath}.bbox_px",
            )
            x, y, w, h = (float(v) for v in bbox_px)
            if w <= 0 or h <= 0:
                raise BadGeometry(f"bbox_px has non-positive extent {bbox_px}", image_id, j)
            if x < 0 or y < 0 or x + w > width or y + h > height:
                raise BadGeometry(f"bbox_px {bbox_px} outside {width}x{height} image", image_id, j)

            confidence = obj.get("confidence", 1.0)
            _require(
                isinstance(confidence, (int, float)) and not isinstance(confidence, bool)
                and 0.0 <= confidence <= 1.0,
                "confidence must be in [0,1]", f"{opath}.confidence",
            )
            if confidence < min_confidence:
                result.dropped_objects += 1
                continue

            depth = obj.get("depth")
            if depth is not None:
                _require(
                    isinstance(depth, (int, float)) and not isinstance(depth, bool)
                    and 0.0 <= depth <= 1.0,
                    "depth must be in [0,1]", f"{opath}.depth",
                )
            colors: set[str] = set()
            for c in obj.get("colors", ()) or ():
                _require(isinstance(c, str), "colors must be strings", f"{opath}.colors")
                canon = vocab.canon_color(c)
                if canon is None:
                    result.warnings.append(f"dropping unknown color {c!r} in {opath}")
                    logger.warning("dropping unknown color %r in %s", c, opath)
                else:
                    colors.add(canon)
            shape = obj.get("shape")
            if shape is not None:
                _require(isinstance(shape, str), "shape must be a string", f"{opath}.shape")
                canon_shape = vocab.canon_shape(shape)
                if canon_shape is None:
                    result.warnings.append(f"dropping unknown shape {shape!r} in {opath}")
                    logger.warning("dropping unknown shape %r in %s", shape, opath)
                shape = canon_shape

            objects.append(
                SceneObject(
                    object_id=len(objects),
                    label=vocab.canon_label(obj["label"]),
                    bbox=BBox(x / width, y / height, (x + w) / width, (y + h) / height),
                    depth=float(depth) if depth is not None else None,
                    colors=frozenset(colors),
                    shape=shape,
                    confidence=float(confidence),
                )
            )

        graph = build_scene_graph(image_id, objects, cfg, image_uri=image_uri, built_at=built_at)
        if not objects:
            result.empty_images.append(image_id)
        result.graphs.append(graph)

    return result


def export_annotations(
    graphs: Iterable[SceneGraph], width_px: int = 1000, height_px: int = 1000
) -> dict:
    """Render graphs back to the annotation document format.

    Coordinates are emitted at a canonical synthetic resolution; loading the
    result reproduces the graphs up to floating-point wobble.
    """
    images = []
    for g in graphs:
        objects = []
        for o in g.objects:
            entry: dict[str, Any] = {
                "label": o.label,
                "bbox_px": [
                    o.bbox.x_min * width_px,
                    o.bbox.y_min * height_px,
                    o.bbox.width * width_px,
                    o.bbox.height * height_px,
                ],
                "confidence": o.confidence,
            }
            if o.depth is not None:
                entry["depth"] = o.depth
            if o.colors:
                entry["colors"] = sorted(o.colors)
            if o.shape is not None:
                entry["shape"] = o.shape
            objects.append(entry)
        image: dict[str, Any] = {
            "image_id": g.image_id,
            "width_px": width_px,
            "height_px": height_px,
            "objects": objects,
        }
        if g.image_uri is not None:
            image["image_uri"] = g.image_uri
        images.append(image)
    return {"images": images}


# --- synthetic corpus ------------------------------------------------------

DEFAULT_LABEL_POOL = (
    "dog", "cat", "bird", "lamp", "chair", "plant", "sign", "bench",
    "bicycle", "kite", "box", "bottle", "cup", "book", "bag", "hat",
    "clock", "flag", "drone", "balloon", "cone", "barrel", "crate", "wheel",
)

_PALETTE = ("red", "orange", "yellow", "green", "blue", "purple", "pink", "brown", "black", "white")

VIOLATIONS = ("car_in_sky", "ball_below_table", "sky_under_ground", "building_in_front_of_car")


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of the synthetic corpus generator."""

    n_scenes: int
    seed: int
    label_pool: tuple[str, ...] = DEFAULT_LABEL_POOL
    anomaly_rate: float = 0.0

    def __post_init__(self):
        if self.n_scenes < 1:
            raise ConfigError(f"n_scenes must be >= 1, got {self.n_scenes}")
        if not self.label_pool:
            raise ConfigError("label_pool must not be empty")
        if not (0.0 <= self.anomaly_rate <= 1.0):
            raise ConfigError(f"anomaly_rate must be in [0,1], got {self.anomaly_rate}")


@dataclass
class GeneratedCorpus:
    """Synthetic scenes plus the oracle record of injected violations."""

    graphs: list[SceneGraph]
    violations: dict[str, str]


def _label_hash(label: str) -> int:
    # stable across runs and platforms, unlike hash()
    return zlib.crc32(label.encode("utf-8"))


def _filler_bbox(label: str) -> BBox:
    h = _label_hash(label)
    col, row = h % 4, (h // 4) % 2
    size = 0.04 + (h // 8) % 7 * 0.01
    x = 0.42 + col * 0.145
    y = 0.18 + row * 0.14
    return BBox(x, y, x + size, y + size)


def _filler_shape(label: str) -> str:
    return sorted(CANONICAL_SHAPES)[_label_hash(label) % len(CANONICAL_SHAPES)]


def generate_synthetic(
    spec: GeneratorSpec, cfg: RelationConfig = DEFAULT_RELATION_CONFIG
) -> GeneratedCorpus:
    """Deterministic desk-scale corpus with templated scene conventions.

    Every scene has a sky band on top, a ground band below, a car on the
    ground in front of a building, and a ball on a table. Filler objects
    from the label pool occupy per-label fixed slots so a given label pair
    relates identically in every scene it shares. round(n * anomaly_rate)
    scenes (half-up) get exactly one violated convention, recorded per
    image_id in the result.
    """
    import random

    rng = random.Random(spec.seed)
    n_anomalies = int(spec.n_scenes * spec.anomaly_rate + 0.5)
    anomalous = set(rng.sample(range(spec.n_scenes), n_anomalies))

    graphs: list[SceneGraph] = []
    violations: dict[str, str] = {}
    for i in range(spec.n_scenes):
        image_id = f"scene-{i:06d}"
        violation = rng.choice(VIOLATIONS) if i in anomalous else None

        sky_box = BBox(0.0, 0.0, 1.0, 0.15)
        ground_box = BBox(0.0, 0.85, 1.0, 1.0)
        if violation == "sky_under_ground":
            sky_box, ground_box = ground_box, sky_box
        car_box = BBox(0.15, 0.75, 0.4, 0.85)
        if violation == "car_in_sky":
            car_box = BBox(0.15, 0.0, 0.4, 0.04)
        ball_box = BBox(0.18, 0.42, 0.26, 0.5)
        if violation == "ball_below_table":
            ball_box = BBox(0.18, 0.68, 0.26, 0.76)
        car_depth, building_depth = 0.3, 0.8
        if violation == "building_in_front_of_car":
            car_depth, building_depth = building_depth, car_depth

        car_color = rng.choice(_PALETTE)
        ball_color = rng.choice(_PALETTE)
        objects = [
            SceneObject(0, "sky", sky_box, colors=frozenset({"blue"})),
            SceneObject(1, "ground", ground_box, colors=frozenset({rng.choice(("green", "brown"))})),
            SceneObject(2, "building", BBox(0.55, 0.25, 0.8, 0.85), depth=building_depth,
                        colors=frozenset({rng.choice(("gray", "white", "beige"))}), shape="rectangular"),
            SceneObject(3, "car", car_box, depth=car_depth, colors=frozenset({car_color})),
            SceneObject(4, "table", BBox(0.1, 0.5, 0.35, 0.68), shape="rectangular",
                        colors=frozenset({"brown"})),
            SceneObject(5, "ball", ball_box, shape="round", colors=frozenset({ball_color})),
        ]
        n_fillers = rng.randint(2, 4)
        for label in rng.sample(spec.label_pool, min(n_fillers, len(spec.label_pool))):
            objects.append(
                SceneObject(
                    len(objects), label, _filler_bbox(label),
                    colors=frozenset({rng.choice(_PALETTE)}), shape=_filler_shape(label),
                )
            )

        graphs.append(build_scene_graph(image_id, objects, cfg))
        if violation is not None:
            violations[image_id] = violation

    return GeneratedCorpus(graphs=graphs, violations=violations)


def write_annotation_file(path: str, corpus: GeneratedCorpus) -> None:
    """Write a generated corpus as an annotation JSON file.

    Injected violations ride along under a top-level "violations" key; the
    loader ignores it (with a warning) but test oracles and demos read it.
    """
    doc = export_annotations(corpus.graphs)
    if corpus.violations:
        doc["violations"] = dict(sorted(corpus.violations.items()))
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def merge_corpora(batches: Iterable[list[SceneGraph]]) -> list[SceneGraph]:
    """Concatenate independently loaded batches, enforcing unique image ids."""
    merged: list[SceneGraph] = []
    seen: set[str] = set()
    for batch in batches:
        for g in batch:
            if g.image_id in seen:
                raise DuplicateImage(g.image_id)
            seen.add(g.image_id)
            merged.append(g)
    return merged
