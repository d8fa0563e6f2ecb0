"""Symbolic image retrieval over annotated scenes.

Pipeline: annotations become scene graphs with derived spatial/size
relations; a corpus fits relation priors; an inverted index accelerates
controlled-language queries; surprisal against the priors surfaces unusual
images.
"""

from .config import EngineConfig
from .errors import EngineError
from .index import IndexHandle, build, open_index
from .ingest import GeneratorSpec, Vocabulary, generate_synthetic, load_annotations
from .matcher import MatchResult, bind, candidates, explain, search
from .priors import RelationPriors, TypicalityReport, fit, score_image
from .query import QueryGraph, parse, unparse
from .scene import (
    BBox,
    Predicate,
    RelationConfig,
    RelationTriple,
    SceneGraph,
    SceneObject,
    build_scene_graph,
    derive_relations,
    normalize_sizes,
)

__version__ = "0.1.0"

__all__ = [
    "BBox",
    "EngineConfig",
    "EngineError",
    "GeneratorSpec",
    "IndexHandle",
    "MatchResult",
    "Predicate",
    "QueryGraph",
    "RelationConfig",
    "RelationPriors",
    "RelationTriple",
    "SceneGraph",
    "SceneObject",
    "TypicalityReport",
    "Vocabulary",
    "bind",
    "build",
    "build_scene_graph",
    "candidates",
    "derive_relations",
    "explain",
    "fit",
    "generate_synthetic",
    "load_annotations",
    "normalize_sizes",
    "open_index",
    "parse",
    "score_image",
    "search",
    "unparse",
]
