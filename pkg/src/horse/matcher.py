"""Query execution: candidate generation, subgraph binding, ranking.

Candidates come from intersecting label-term postings; each candidate is
then verified by a backtracking search over injective, label-consistent
assignments of query nodes to scene objects. A node is left unbound only
when no free object with its label remains, and every constraint touching
an unbound node counts as violated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import QueryTooLarge
from .index import IndexHandle, Posting, intersect, label_term, relation_term
from .query import QueryGraph, QueryNode
from .scene import Predicate, RelationTriple, SceneGraph, relation_evidence

MAX_QUERY_NODES = 8

_UNBOUND = 2**31  # sorts after any real object_id in tiebreak tuples


@dataclass(frozen=True)
class Constraint:
    """One checkable query condition, phrased for explanations."""

    kind: str  # "label" | "color" | "shape" | "size" | "edge"
    node_id: int
    description: str
    detail: str | None = None
    evidence: dict | None = None

    @property
    def scored(self) -> bool:
        # labels are mandatory for binding and carry no score weight
        return self.kind != "label"


@dataclass
class MatchResult:
    image_id: str
    score: float
    binding: dict[int, int]
    satisfied: list[Constraint] = field(default_factory=list)
    violated: list[Constraint] = field(default_factory=list)
    mean_salience: float = 0.0


def _size_ok(size_word: str, size_rank: int, n_objects: int) -> bool:
    third = math.ceil(n_objects / 3)
    if size_word == "big":
        return size_rank <= third
    return size_rank > n_objects - third


def _edge_holds(graph: SceneGraph, subject_id: int, predicate: Predicate, object_id: int) -> bool:
    if RelationTriple(subject_id, predicate, object_id) in graph.relations:
        return True
    inv = predicate.inverse
    return inv is not None and RelationTriple(object_id, inv, subject_id) in graph.relations


def _attr_checks(node: QueryNode) -> list[tuple[str, str]]:
    checks = []
    if node.color is not None:
        checks.append(("color", node.color))
    if node.shape is not None:
        checks.append(("shape", node.shape))
    if node.size_word is not None:
        checks.append(("size", node.size_word))
    return checks


def _evaluate(graph: SceneGraph, q: QueryGraph, binding: dict[int, int]) -> tuple[int, int]:
    """(satisfied scored constraints, total scored constraints) for a binding."""
    objects = {o.object_id: o for o in graph.objects}
    n = len(graph.objects)
    satisfied = 0
    total = 0
    for node in q.nodes:
        obj = objects.get(binding.get(node.node_id, -1))
        for kind, value in _attr_checks(node):
            total += 1
            if obj is None:
                continue
            if kind == "color" and value in obj.colors:
                satisfied += 1
            elif kind == "shape" and value == obj.shape:
                satisfied += 1
            elif kind == "size" and _size_ok(value, obj.size_rank, n):
                satisfied += 1
    for e in q.edges:
        total += 1
        s, o = binding.get(e.from_node), binding.get(e.to_node)
        if s is not None and o is not None and _edge_holds(graph, s, e.predicate, o):
            satisfied += 1
    return satisfied, total


def _best_binding(graph: SceneGraph, q: QueryGraph) -> dict[int, int]:
    """Backtracking maximization of (score, mean salience, id order)."""
    by_label: dict[str, list] = {}
    for o in graph.objects:
        by_label.setdefault(o.label, []).append(o)
    for objs in by_label.values():
        objs.sort(key=lambda o: o.object_id)
    salience = {o.object_id: o.salience for o in graph.objects}
    node_order = [n.node_id for n in q.nodes]

    best: dict[str, object] = {"key": None, "binding": {}}

    def consider(binding: dict[int, int]):
        satisfied, total = _evaluate(graph, q, binding)
        score = satisfied / total if total else 1.0
        bound = [salience[v] for v in binding.values()]
        mean_sal = sum(bound) / len(bound) if bound else 0.0
        key = (
            -score,
            -mean_sal,
            tuple(binding.get(nid, _UNBOUND) for nid in node_order),
        )
        if best["key"] is None or key < best["key"]:
            best["key"] = key
            best["binding"] = dict(binding)

    def maximal(binding: dict[int, int], used: set[int]) -> bool:
        # a node may stay unbound only when every object with its label is taken
        for node in q.nodes:
            if node.node_id in binding:
                continue
            if any(o.object_id not in used for o in by_label.get(node.label, ())):
                return False
        return True

    def assign(i: int, binding: dict[int, int], used: set[int]):
        if i == len(q.nodes):
            if maximal(binding, used):
                consider(binding)
            return
        node = q.nodes[i]
        free = [o for o in by_label.get(node.label, ()) if o.object_id not in used]
        for o in free:
            binding[node.node_id] = o.object_id
            used.add(o.object_id)
            assign(i + 1, binding, used)
            used.discard(o.object_id)
            del binding[node.node_id]
        # skipping can be maximal only if later same-label nodes drain the pool
        if not free or any(q.nodes[j].label == node.label for j in range(i + 1, len(q.nodes))):
            assign(i + 1, binding, used)

    assign(0, {}, set())
    return best["binding"]


def _constraints_for(
    graph: SceneGraph, q: QueryGraph, binding: dict[int, int], with_evidence: bool = False
) -> tuple[list[Constraint], list[Constraint]]:
    objects = {o.object_id: o for o in graph.objects}
    n = len(graph.objects)
    satisfied: list[Constraint] = []
    violated: list[Constraint] = []

    for node in q.nodes:
        obj = objects.get(binding.get(node.node_id, -1))
        label_c = Constraint(
            kind="label",
            node_id=node.node_id,
            description=f"{node.label} present",
            detail=None if obj is None else f"object {obj.object_id}",
            evidence={"scene_labels": sorted(graph.labels)} if with_evidence and obj is None else None,
        )
        (satisfied if obj is not None else violated).append(label_c)

        for kind, value in _attr_checks(node):
            if kind == "color":
                ok = obj is not None and value in obj.colors
                desc = f"{node.label}.color={value}"
                ev = None if obj is None else {"colors": sorted(obj.colors)}
            elif kind == "shape":
                ok = obj is not None and value == obj.shape
                desc = f"{node.label}.shape={value}"
                ev = None if obj is None else {"shape": obj.shape}
            else:
                ok = obj is not None and _size_ok(value, obj.size_rank, n)
                desc = f"{node.label} is {value}"
                ev = None if obj is None else {"size_rank": obj.size_rank, "n_objects": n}
            c = Constraint(
                kind=kind,
                node_id=node.node_id,
                description=desc,
                detail=None if obj is None else f"object {obj.object_id}",
                evidence=ev if with_evidence else None,
            )
            (satisfied if ok else violated).append(c)

    by_id = {nd.node_id: nd for nd in q.nodes}
    for e in q.edges:
        s, o = binding.get(e.from_node), binding.get(e.to_node)
        desc = f"{by_id[e.from_node].label} {e.predicate.value} {by_id[e.to_node].label}"
        ok = s is not None and o is not None and _edge_holds(graph, s, e.predicate, o)
        ev = None
        if with_evidence and s is not None and o is not None:
            ev = relation_evidence(objects[s], objects[o], e.predicate)
        c = Constraint(
            kind="edge",
            node_id=e.from_node,
            description=desc,
            detail=None if s is None or o is None else f"objects {s}->{o}",
            evidence=ev,
        )
        (satisfied if ok else violated).append(c)

    return satisfied, violated


def bind(
    graph: SceneGraph, q: QueryGraph, mode: str = "ranked", with_evidence: bool = False
) -> MatchResult | None:
    """Best binding of the query in one scene.

    Strict mode returns a result only when everything is satisfied; ranked
    mode always returns one, scoring satisfied attributes and edges over
    the total stated.
    """
    if mode not in ("strict", "ranked"):
        raise ValueError(f"unknown mode {mode!r}")
    if len(q.nodes) > MAX_QUERY_NODES:
        raise QueryTooLarge(len(q.nodes), MAX_QUERY_NODES)

    binding = _best_binding(graph, q)
    satisfied_n, total = _evaluate(graph, q, binding)
    score = satisfied_n / total if total else 1.0
    fully_bound = len(binding) == len(q.nodes)
    if mode == "strict" and not (fully_bound and satisfied_n == total):
        return None

    satisfied, violated = _constraints_for(graph, q, binding, with_evidence)
    bound_sal = [graph.object_by_id(v).salience for v in binding.values()]
    return MatchResult(
        image_id=graph.image_id,
        score=1.0 if mode == "strict" else score,
        binding=binding,
        satisfied=satisfied,
        violated=[] if mode == "strict" else violated,
        mean_salience=sum(bound_sal) / len(bound_sal) if bound_sal else 0.0,
    )


def candidates(handle: IndexHandle, q: QueryGraph, use_relation_terms: bool = False) -> list[str]:
    """Images containing every query label; a sound superset of matches.

    With use_relation_terms (strict-mode optimization only), edge terms
    join the intersection, shrinking candidates without losing any image
    that satisfies every edge.
    """
    families: list[list[Posting]] = []
    for label in sorted({n.label for n in q.nodes}):
        families.append(handle.lookup(label_term(label)))
    if use_relation_terms:
        by_id = {n.node_id: n for n in q.nodes}
        for e in q.edges:
            term = relation_term(by_id[e.from_node].label, e.predicate, by_id[e.to_node].label)
            inv = e.predicate.inverse
            postings = handle.lookup(term)
            if inv is not None:
                alt = relation_term(by_id[e.to_node].label, inv, by_id[e.from_node].label)
                merged = {p.image_id for p in postings} | {p.image_id for p in handle.lookup(alt)}
                postings = [Posting(i, (0,)) for i in sorted(merged)]
            families.append(postings)
    return intersect(families, handle.image_ids)


def search(
    handle: IndexHandle,
    q: QueryGraph,
    k: int = 20,
    mode: str = "ranked",
    use_relation_terms: bool = False,
) -> list[MatchResult]:
    """Top-k scenes for a query, deterministically ordered."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if len(q.nodes) > MAX_QUERY_NODES:
        # fail the same way on an empty candidate set as on a full one
        raise QueryTooLarge(len(q.nodes), MAX_QUERY_NODES)
    results: list[MatchResult] = []
    for image_id in candidates(handle, q, use_relation_terms and mode == "strict"):
        result = bind(handle.graph(image_id), q, mode)
        if result is None:
            continue
        if mode == "strict" and result.score < 1.0:
            continue
        results.append(result)
    results.sort(key=lambda r: (-r.score, -r.mean_salience, r.image_id))
    return results[:k]


def explain(handle: IndexHandle, image_id: str, q: QueryGraph) -> MatchResult:
    """Ranked bind against one image with geometric evidence attached."""
    graph = handle.graph(image_id)  # raises NotFound
    result = bind(graph, q, mode="ranked", with_evidence=True)
    assert result is not None  # ranked bind always returns a result
    return result
