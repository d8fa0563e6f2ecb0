"""Exception hierarchy for the engine.

Every error raised by the package derives from EngineError so callers can
catch one base type at the CLI/service boundary.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine errors."""


class EmptyScene(EngineError):
    """Raised when an operation requires at least one object in a scene."""


class EmptyCorpus(EngineError):
    """Raised when an operation requires at least one scene graph."""


class ConfigError(EngineError):
    """Invalid configuration value or file."""


class ParseError(EngineError):
    """Malformed annotation document.

    `path` is a dotted/indexed field path such as "images[3].objects[2].bbox_px";
    `line` is set when the underlying JSON itself failed to decode.
    """

    def __init__(self, message: str, path: str = "", line: int | None = None):
        self.path = path
        self.line = line
        loc = path or (f"line {line}" if line is not None else "")
        super().__init__(f"{message}{f' at {loc}' if loc else ''}")


class DuplicateImage(EngineError):
    """Two scenes share one image_id."""

    def __init__(self, image_id: str):
        self.image_id = image_id
        super().__init__(f"duplicate image_id {image_id!r}")


class BadGeometry(EngineError):
    """Bounding box outside image bounds or degenerate."""

    def __init__(self, message: str, image_id: str = "", object_index: int | None = None):
        self.image_id = image_id
        self.object_index = object_index
        where = f" (image {image_id!r}" + (
            f", object {object_index})" if object_index is not None else ")"
        ) if image_id else ""
        super().__init__(f"{message}{where}")


class IndexIoError(EngineError):
    """I/O failure while reading or writing an index directory."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{message}{f': {path}' if path else ''}")


class IndexCorrupt(EngineError):
    """A persisted index segment failed validation."""

    def __init__(self, segment: str, detail: str = ""):
        self.segment = segment
        super().__init__(f"corrupt index segment {segment!r}{f': {detail}' if detail else ''}")


class QueryParseError(EngineError):
    """Query text rejected by the grammar.

    `position` is the character offset into the original query string.
    """

    def __init__(self, message: str, position: int = 0):
        self.position = position
        super().__init__(f"{message} (position {position})")


class EmptyQuery(QueryParseError):
    """Query text empty after trimming."""

    def __init__(self):
        super().__init__("empty query", 0)


class QueryTooLarge(EngineError):
    """Query graph exceeds the node cap enforced by the matcher."""

    def __init__(self, n_nodes: int, cap: int):
        self.n_nodes = n_nodes
        self.cap = cap
        super().__init__(f"query has {n_nodes} nodes, cap is {cap}")


class NotFound(EngineError):
    """Unknown image_id."""

    def __init__(self, image_id: str):
        self.image_id = image_id
        super().__init__(f"unknown image {image_id!r}")
