"""Shared builders for tests.

Random scenes snap coordinates to a 1/64 grid so every rule inequality is
decided far from float rounding; thresholds like 0.05 are never hit
exactly, which keeps the implementation and the independently coded
oracles in exact agreement at pair level.
"""

from __future__ import annotations

import random

from horse.scene import BBox, SceneObject, build_scene_graph, normalize_sizes

GRID = 64

LABELS = ("ball", "table", "car", "building", "sky", "ground", "dog", "lamp", "box", "tree")
COLORS = ("red", "blue", "green", "yellow", "black", "white")
SHAPES = ("round", "square", "rectangular", "triangular", "oval")


def grid_bbox(rng: random.Random) -> BBox:
    x0 = rng.randrange(0, GRID - 1)
    y0 = rng.randrange(0, GRID - 1)
    w = rng.randrange(1, GRID - x0 + 1)
    h = rng.randrange(1, GRID - y0 + 1)
    return BBox(x0 / GRID, y0 / GRID, (x0 + w) / GRID, (y0 + h) / GRID)


def random_objects(rng: random.Random, n: int | None = None) -> list[SceneObject]:
    n = n if n is not None else rng.randint(2, 10)
    objects = []
    for i in range(n):
        objects.append(
            SceneObject(
                object_id=i,
                label=rng.choice(LABELS),
                bbox=grid_bbox(rng),
                depth=rng.randrange(0, GRID + 1) / GRID if rng.random() < 0.5 else None,
                colors=frozenset(rng.sample(COLORS, rng.randint(0, 2))),
                shape=rng.choice(SHAPES) if rng.random() < 0.5 else None,
            )
        )
    return normalize_sizes(objects)


def random_graph(rng: random.Random, image_id: str, n: int | None = None):
    return build_scene_graph(image_id, random_objects(rng, n))


def random_corpus(seed: int, n_scenes: int, max_objects: int = 10):
    rng = random.Random(seed)
    return [
        random_graph(rng, f"img-{i:05d}", rng.randint(2, max_objects)) for i in range(n_scenes)
    ]


def ball_on_table_objects() -> list[SceneObject]:
    """The worked two-object scene: a ball resting on a table."""
    return normalize_sizes(
        [
            SceneObject(0, "ball", BBox(0.45, 0.30, 0.55, 0.50), colors=frozenset({"red"}), shape="round"),
            SceneObject(1, "table", BBox(0.30, 0.50, 0.70, 0.80), shape="rectangular"),
        ]
    )


def car_ground_corpus():
    """100 two-object scenes; the car sits on the ground in 99 of them.

    The odd one out buries the car inside the ground band, which yields a
    never-seen-before containment fact instead of the usual support fact.
    """
    graphs = []
    for i in range(100):
        if i == 37:
            car_box = BBox(0.2, 0.9, 0.4, 0.98)  # inside the ground band
        else:
            car_box = BBox(0.15, 0.75, 0.4, 0.85)  # bottom edge meets ground top
        objects = [
            SceneObject(0, "car", car_box, colors=frozenset({"red"})),
            SceneObject(1, "ground", BBox(0.0, 0.85, 1.0, 1.0)),
        ]
        graphs.append(build_scene_graph(f"cg-{i:03d}", objects))
    return graphs, "cg-037"
