"""JSON shape converters for graphs, reports, and match results.

Only scene types are imported here so the index segments can serialize
documents without pulling in the matcher; everything else is duck-typed
attribute access over frozen dataclasses.
"""

from __future__ import annotations

from typing import Any

from .scene import BBox, Predicate, RelationTriple, SceneGraph, SceneObject


def object_to_json(o: SceneObject) -> dict:
    entry: dict[str, Any] = {
        "object_id": o.object_id,
        "label": o.label,
        "bbox": [o.bbox.x_min, o.bbox.y_min, o.bbox.x_max, o.bbox.y_max],
        "colors": sorted(o.colors),
        "confidence": o.confidence,
        "area": o.area,
        "size_rank": o.size_rank,
        "salience": o.salience,
    }
    if o.depth is not None:
        entry["depth"] = o.depth
    if o.shape is not None:
        entry["shape"] = o.shape
    return entry


def object_from_json(data: dict) -> SceneObject:
    return SceneObject(
        object_id=data["object_id"],
        label=data["label"],
        bbox=BBox(*data["bbox"]),
        depth=data.get("depth"),
        colors=frozenset(data["colors"]),
        shape=data.get("shape"),
        confidence=data["confidence"],
        area=data["area"],
        size_rank=data["size_rank"],
        salience=data["salience"],
    )


def triple_to_json(t: RelationTriple) -> dict:
    return {"subject_id": t.subject_id, "predicate": t.predicate.value, "object_id": t.object_id}


def graph_to_json(g: SceneGraph) -> dict:
    entry: dict[str, Any] = {
        "image_id": g.image_id,
        "built_at": g.built_at,
        "objects": [object_to_json(o) for o in g.objects],
        "relations": [
            triple_to_json(t)
            for t in sorted(g.relations, key=lambda t: (t.subject_id, t.predicate.value, t.object_id))
        ],
    }
    if g.image_uri is not None:
        entry["image_uri"] = g.image_uri
    return entry


def graph_from_json(data: dict) -> SceneGraph:
    return SceneGraph(
        image_id=data["image_id"],
        objects=tuple(object_from_json(o) for o in data["objects"]),
        relations=frozenset(
            RelationTriple(t["subject_id"], Predicate(t["predicate"]), t["object_id"])
            for t in data["relations"]
        ),
        image_uri=data.get("image_uri"),
        built_at=data["built_at"],
    )


def query_graph_to_json(q) -> dict:
    nodes = []
    for n in q.nodes:
        node: dict[str, Any] = {"node_id": n.node_id, "label": n.label}
        if n.color is not None:
            node["color"] = n.color
        if n.shape is not None:
            node["shape"] = n.shape
        if n.size_word is not None:
            node["size_word"] = n.size_word
        nodes.append(node)
    return {
        "raw_text": q.raw_text,
        "nodes": nodes,
        "edges": [
            {"from_node": e.from_node, "predicate": e.predicate.value, "to_node": e.to_node}
            for e in q.edges
        ],
    }


def constraint_to_json(c) -> dict:
    entry: dict[str, Any] = {"kind": c.kind, "node_id": c.node_id, "description": c.description}
    if c.detail is not None:
        entry["detail"] = c.detail
    if c.evidence is not None:
        entry["evidence"] = c.evidence
    return entry


def match_result_to_json(m) -> dict:
    return {
        "image_id": m.image_id,
        "score": m.score,
        "binding": {str(k): v for k, v in sorted(m.binding.items())},
        "satisfied": [constraint_to_json(c) for c in m.satisfied],
        "violated": [constraint_to_json(c) for c in m.violated],
        "mean_salience": m.mean_salience,
    }


def scored_triple_to_json(s) -> dict:
    return {
        "subject_id": s.subject_id,
        "subject_label": s.subject_label,
        "predicate": s.predicate.value,
        "object_id": s.object_id,
        "object_label": s.object_label,
        "probability": s.probability,
        "surprisal": s.surprisal,
    }


def report_to_json(r) -> dict:
    return {
        "image_id": r.image_id,
        "uniqueness": r.uniqueness,
        "anomalous": r.is_anomalous,
        "triple_surprisals": [scored_triple_to_json(s) for s in r.triple_surprisals],
        "anomalous_triples": [scored_triple_to_json(s) for s in r.anomalous_triples],
    }
