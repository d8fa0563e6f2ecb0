"""Corpus relation statistics and per-image typicality scoring.

Counts how often each (subject label, predicate, object label) fact holds
among co-occurring label pairs, smooths the counts into Bernoulli
probabilities, and scores images by the surprisal of their rarest facts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from .errors import EmptyCorpus
from .scene import Predicate, RelationTriple, SceneGraph

CountKey = tuple[str, str, str]  # (subject_label, predicate value, object_label)
PairKey = tuple[str, str]

DEFAULT_THETA = 0.05
DEFAULT_TOP_K = 3


@dataclass(frozen=True)
class RelationPriors:
    """Fitted relation frequencies. Immutable; safe for concurrent scoring.

    pair_totals counts ordered label-pair co-occurrences (one per ordered
    object pair, related or not), so counts[key] never exceeds the
    pair_totals entry for its label pair.
    """

    counts: dict[CountKey, int]
    pair_totals: dict[PairKey, int]
    alpha: float = 1.0
    predicate_count: int = len(Predicate)

    def probability(self, subject_label: str, predicate: Predicate | str, object_label: str) -> float:
        """Laplace-smoothed Bernoulli estimate; 0.5 for an unseen label pair."""
        pred = predicate.value if isinstance(predicate, Predicate) else predicate
        count = self.counts.get((subject_label, pred, object_label), 0)
        total = self.pair_totals.get((subject_label, object_label), 0)
        return (count + self.alpha) / (total + 2.0 * self.alpha)

    def surprisal(self, subject_label: str, predicate: Predicate | str, object_label: str) -> float:
        return -math.log2(self.probability(subject_label, predicate, object_label))


def fit(graphs: Iterable[SceneGraph], alpha: float = 1.0) -> RelationPriors:
    """Accumulate pair co-occurrence and fact counts over a corpus.

    Order-independent: the maps are pure sums over scenes.
    """
    graphs = list(graphs)
    if not graphs:
        raise EmptyCorpus("cannot fit priors on zero scenes")

    counts: dict[CountKey, int] = {}
    pair_totals: dict[PairKey, int] = {}
    for g in graphs:
        labels = {o.object_id: o.label for o in g.objects}
        for a in g.objects:
            for b in g.objects:
                if a.object_id == b.object_id:
                    continue
                pair = (a.label, b.label)
                pair_totals[pair] = pair_totals.get(pair, 0) + 1
        for t in g.relations:
            key = (labels[t.subject_id], t.predicate.value, labels[t.object_id])
            counts[key] = counts.get(key, 0) + 1

    return RelationPriors(counts=counts, pair_totals=pair_totals, alpha=alpha)


@dataclass(frozen=True)
class ScoredTriple:
    """One scored relation fact with its corpus probability."""

    subject_id: int
    subject_label: str
    predicate: Predicate
    object_id: int
    object_label: str
    probability: float
    surprisal: float


@dataclass(frozen=True)
class TypicalityReport:
    """How unusual one image's relational facts are against the priors."""

    image_id: str
    triple_surprisals: tuple[ScoredTriple, ...]
    uniqueness: float
    anomalous_triples: tuple[ScoredTriple, ...]

    @property
    def is_anomalous(self) -> bool:
        return bool(self.anomalous_triples)


def _fact_representatives(graph: SceneGraph) -> list:
    """One triple per stored fact, so inverse pairs are scored once.

    The representative is the form whose (subject_label, predicate) sorts
    lexicographically smaller; exact ties (same labels, self-inverse
    predicate) fall back to object ids.
    """
    labels = {o.object_id: o.label for o in graph.objects}
    reps = []
    for t in graph.relations:
        inv = t.predicate.inverse
        if inv is not None and RelationTriple(t.object_id, inv, t.subject_id) in graph.relations:
            mine = (labels[t.subject_id], t.predicate.value, t.subject_id, t.object_id)
            partner = (labels[t.object_id], inv.value, t.object_id, t.subject_id)
            if partner < mine:
                continue  # the partner triple is the representative
        reps.append(t)
    return reps


def score_image(
    priors: RelationPriors,
    graph: SceneGraph,
    theta: float = DEFAULT_THETA,
    top_k: int = DEFAULT_TOP_K,
) -> TypicalityReport:
    """Surprisal per fact, anomaly flags below theta, top-k-mean uniqueness."""
    labels = {o.object_id: o.label for o in graph.objects}
    scored = []
    for t in _fact_representatives(graph):
        subj, obj = labels[t.subject_id], labels[t.object_id]
        p = priors.probability(subj, t.predicate, obj)
        scored.append(
            ScoredTriple(
                subject_id=t.subject_id,
                subject_label=subj,
                predicate=t.predicate,
                object_id=t.object_id,
                object_label=obj,
                probability=p,
                surprisal=-math.log2(p),
            )
        )
    scored.sort(key=lambda s: (-s.surprisal, s.subject_id, s.predicate.value, s.object_id))

    k = min(top_k, len(scored))
    uniqueness = sum(s.surprisal for s in scored[:k]) / k if k else 0.0
    return TypicalityReport(
        image_id=graph.image_id,
        triple_surprisals=tuple(scored),
        uniqueness=uniqueness,
        anomalous_triples=tuple(s for s in scored if s.probability < theta),
    )


def rank_by_uniqueness(
    priors: RelationPriors,
    graphs: Iterable[SceneGraph],
    theta: float = DEFAULT_THETA,
    top_k: int = DEFAULT_TOP_K,
) -> list[TypicalityReport]:
    """All reports sorted most-unusual first, ties by image_id."""
    reports = [score_image(priors, g, theta, top_k) for g in graphs]
    reports.sort(key=lambda r: (-r.uniqueness, r.image_id))
    return reports


def priors_to_json(priors: RelationPriors) -> dict:
    """JSON-ready dump, also the payload of the persisted priors segment."""
    return {
        "alpha": priors.alpha,
        "predicate_count": priors.predicate_count,
        "counts": [
            {"subject": s, "predicate": p, "object": o, "count": c}
            for (s, p, o), c in sorted(priors.counts.items())
        ],
        "pair_totals": [
            {"subject": s, "object": o, "total": t}
            for (s, o), t in sorted(priors.pair_totals.items())
        ],
    }


def priors_from_json(data: dict) -> RelationPriors:
    return RelationPriors(
        counts={(e["subject"], e["predicate"], e["object"]): e["count"] for e in data["counts"]},
        pair_totals={(e["subject"], e["object"]): e["total"] for e in data["pair_totals"]},
        alpha=data["alpha"],
        predicate_count=data["predicate_count"],
    )
