"""Inverted index over scene-graph terms with on-disk persistence.

Terms name labels ("label:ball"), attributes ("attr:ball:color:red"), and
label-keyed relations ("rel:ball:on:table"). The on-disk form is four
binary segments plus a JSON manifest; all multi-byte integers are
little-endian, every segment is checksummed, and the manifest write is the
atomic commit point. An opened index is immutable.
"""

from __future__ import annotations

import bisect
import json
import os
import struct
import zlib
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DuplicateImage, EmptyCorpus, IndexCorrupt, IndexIoError, NotFound
from .priors import RelationPriors, priors_from_json, priors_to_json
from .scene import Predicate, SceneGraph
from .serialize import graph_from_json, graph_to_json

FORMAT_VERSION = 1
SEGMENT_NAMES = ("terms.seg", "postings.seg", "docs.seg", "priors.seg")
_MAGIC = {
    "terms.seg": b"HTRM",
    "postings.seg": b"HPST",
    "docs.seg": b"HDOC",
    "priors.seg": b"HPRI",
}

_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")


@dataclass(frozen=True)
class Term:
    """One dictionary entry; the string encoding is the canonical form."""

    kind: str  # "label" | "attr" | "rel"
    label: str
    attr_kind: str | None = None
    value: str | None = None
    predicate: str | None = None
    object_label: str | None = None

    def encode(self) -> str:
        if self.kind == "label":
            return f"label:{self.label}"
        if self.kind == "attr":
            return f"attr:{self.label}:{self.attr_kind}:{self.value}"
        return f"rel:{self.label}:{self.predicate}:{self.object_label}"

    @classmethod
    def parse(cls, text: str) -> "Term":
        parts = text.split(":")
        if parts[0] == "label" and len(parts) == 2 and parts[1]:
            return cls(kind="label", label=parts[1])
        if parts[0] == "attr" and len(parts) == 4 and all(parts[1:]) and parts[2] in ("color", "shape"):
            return cls(kind="attr", label=parts[1], attr_kind=parts[2], value=parts[3])
        if parts[0] == "rel" and len(parts) == 4 and all(parts[1:]):
            Predicate(parts[2])  # raises ValueError on an unknown predicate
            return cls(kind="rel", label=parts[1], predicate=parts[2], object_label=parts[3])
        raise ValueError(f"not a valid term: {text!r}")


def label_term(label: str) -> str:
    return f"label:{label}"


def color_term(label: str, color: str) -> str:
    return f"attr:{label}:color:{color}"


def shape_term(label: str, shape: str) -> str:
    return f"attr:{label}:shape:{shape}"


def relation_term(subject_label: str, predicate: Predicate | str, object_label: str) -> str:
    pred = predicate.value if isinstance(predicate, Predicate) else predicate
    return f"rel:{subject_label}:{pred}:{object_label}"


@dataclass(frozen=True)
class Posting:
    """Objects (or relation subjects) realizing a term in one image."""

    image_id: str
    object_ids: tuple[int, ...]

    def __post_init__(self):
        if not self.object_ids:
            raise ValueError("posting must reference at least one object")
        if any(b <= a for a, b in zip(self.object_ids, self.object_ids[1:])):
            raise ValueError("posting object_ids must be strictly increasing")


def terms_for_graph(g: SceneGraph) -> dict[str, list[int]]:
    """Every term the graph emits, with the realizing object/subject ids."""
    out: dict[str, set[int]] = {}

    def add(term: str, object_id: int):
        out.setdefault(term, set()).add(object_id)

    labels = {}
    for o in g.objects:
        labels[o.object_id] = o.label
        add(label_term(o.label), o.object_id)
        for c in o.colors:
            add(color_term(o.label, c), o.object_id)
        if o.shape is not None:
            add(shape_term(o.label, o.shape), o.object_id)
    for t in g.relations:
        add(relation_term(labels[t.subject_id], t.predicate, labels[t.object_id]), t.subject_id)
    return {term: sorted(ids) for term, ids in out.items()}


def _segment_header(name: str) -> bytes:
    return _MAGIC[name] + _U32.pack(FORMAT_VERSION)


def _check_header(name: str, data: bytes) -> int:
    """Validate magic and version; return the payload start offset."""
    if len(data) < 8 or data[:4] != _MAGIC[name]:
        raise IndexCorrupt(name, "bad magic")
    version = _U32.unpack_from(data, 4)[0]
    if version != FORMAT_VERSION:
        raise IndexCorrupt(name, f"segment version {version}, expected {FORMAT_VERSION}")
    return 8


def build(
    graphs: Iterable[SceneGraph],
    priors: RelationPriors,
    dir: str,
    config_snapshot: dict | None = None,
) -> "IndexHandle":
    """Write a fresh index directory and reopen it through the read path."""
    graphs = list(graphs)
    if not graphs:
        raise EmptyCorpus("cannot index zero scenes")
    seen: set[str] = set()
    for g in graphs:
        if g.image_id in seen:
            raise DuplicateImage(g.image_id)
        seen.add(g.image_id)

    docs = sorted(graphs, key=lambda g: g.image_id)
    postings_by_term: dict[str, list[tuple[int, list[int]]]] = {}
    for ordinal, g in enumerate(docs):
        for term, ids in terms_for_graph(g).items():
            postings_by_term.setdefault(term, []).append((ordinal, ids))

    postings_blob = bytearray(_segment_header("postings.seg"))
    term_entries: list[tuple[str, int, int]] = []  # (term, offset, n_postings)
    for term in sorted(postings_by_term):
        entries = postings_by_term[term]
        term_entries.append((term, len(postings_blob), len(entries)))
        for ordinal, ids in entries:
            postings_blob += _U32.pack(ordinal) + _U32.pack(len(ids))
            postings_blob += b"".join(_U32.pack(i) for i in ids)

    terms_blob = bytearray(_segment_header("terms.seg"))
    terms_blob += _U32.pack(len(term_entries))
    for term, offset, count in term_entries:
        raw = term.encode("utf-8")
        terms_blob += _U32.pack(len(raw)) + raw + _U64.pack(offset) + _U32.pack(count)

    docs_blob = bytearray(_segment_header("docs.seg"))
    docs_blob += _U32.pack(len(docs))
    for g in docs:
        raw = json.dumps(graph_to_json(g), separators=(",", ":"), sort_keys=True).encode("utf-8")
        docs_blob += _U32.pack(len(raw)) + raw

    priors_raw = json.dumps(priors_to_json(priors), separators=(",", ":"), sort_keys=True).encode("utf-8")
    priors_blob = bytearray(_segment_header("priors.seg"))
    priors_blob += _U32.pack(len(priors_raw)) + priors_raw

    blobs = {
        "terms.seg": bytes(terms_blob),
        "postings.seg": bytes(postings_blob),
        "docs.seg": bytes(docs_blob),
        "priors.seg": bytes(priors_blob),
    }
    manifest = {
        "format_version": FORMAT_VERSION,
        "counts": {
            "images": len(docs),
            "objects": sum(len(g.objects) for g in docs),
            "triples": sum(len(g.relations) for g in docs),
            "terms": len(term_entries),
        },
        "config": config_snapshot,
        "segments": {
            name: {"bytes": len(blob), "crc32": zlib.crc32(blob)} for name, blob in blobs.items()
        },
    }

    try:
        os.makedirs(dir, exist_ok=True)
        for name, blob in blobs.items():
            with open(os.path.join(dir, name), "wb") as fh:
                fh.write(blob)
        # the manifest is the commit point: written last, swapped atomically
        tmp = os.path.join(dir, "manifest.json.tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=1, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, os.path.join(dir, "manifest.json"))
    except OSError as exc:
        raise IndexIoError(str(exc), dir) from exc

    return open_index(dir)


def _read_segment(dir: str, name: str, manifest: dict) -> bytes:
    path = os.path.join(dir, name)
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise IndexIoError(str(exc), path) from exc
    expected = manifest["segments"].get(name)
    if expected is None:
        raise IndexCorrupt(name, "segment missing from manifest")
    if len(data) != expected["bytes"] or zlib.crc32(data) != expected["crc32"]:
        raise IndexCorrupt(name, "checksum mismatch")
    return data


def open_index(dir: str) -> "IndexHandle":
    """Validate and load an index directory into an immutable handle."""
    manifest_path = os.path.join(dir, "manifest.json")
    try:
        with open(manifest_path, encoding="utf-8") as fh:
            manifest = json.load(fh)
    except OSError as exc:
        raise IndexIoError(str(exc), manifest_path) from exc
    except json.JSONDecodeError as exc:
        raise IndexCorrupt("manifest.json", f"invalid JSON: {exc.msg}") from exc

    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise IndexIoError(
            f"unsupported index format version {version!r}, expected {FORMAT_VERSION}", manifest_path
        )

    terms_data = _read_segment(dir, "terms.seg", manifest)
    postings_data = _read_segment(dir, "postings.seg", manifest)
    docs_data = _read_segment(dir, "docs.seg", manifest)
    priors_data = _read_segment(dir, "priors.seg", manifest)

    try:
        pos = _check_header("terms.seg", terms_data)
        (n_terms,) = _U32.unpack_from(terms_data, pos)
        pos += 4
        term_dict: dict[str, tuple[int, int]] = {}
        sorted_terms: list[str] = []
        for _ in range(n_terms):
            (length,) = _U32.unpack_from(terms_data, pos)
            pos += 4
            term = terms_data[pos : pos + length].decode("utf-8")
            pos += length
            (offset,) = _U64.unpack_from(terms_data, pos)
            pos += 8
            (count,) = _U32.unpack_from(terms_data, pos)
            pos += 4
            term_dict[term] = (offset, count)
            sorted_terms.append(term)
    except (struct.error, UnicodeDecodeError) as exc:
        raise IndexCorrupt("terms.seg", str(exc)) from exc

    _check_header("postings.seg", postings_data)

    try:
        pos = _check_header("docs.seg", docs_data)
        (n_docs,) = _U32.unpack_from(docs_data, pos)
        pos += 4
        docs: list[SceneGraph] = []
        for _ in range(n_docs):
            (length,) = _U32.unpack_from(docs_data, pos)
            pos += 4
            docs.append(graph_from_json(json.loads(docs_data[pos : pos + length])))
            pos += length
    except (struct.error, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise IndexCorrupt("docs.seg", str(exc)) from exc

    try:
        pos = _check_header("priors.seg", priors_data)
        (length,) = _U32.unpack_from(priors_data, pos)
        priors = priors_from_json(json.loads(priors_data[pos + 4 : pos + 4 + length]))
    except (struct.error, json.JSONDecodeError, KeyError) as exc:
        raise IndexCorrupt("priors.seg", str(exc)) from exc

    return IndexHandle(
        dir=dir,
        manifest=manifest,
        priors=priors,
        _terms=term_dict,
        _sorted_terms=sorted_terms,
        _postings=postings_data,
        _docs=docs,
        _by_id={g.image_id: g for g in docs},
    )


@dataclass
class IndexHandle:
    """An opened, read-only index."""

    dir: str
    manifest: dict
    priors: RelationPriors
    _terms: dict[str, tuple[int, int]]
    _sorted_terms: list[str]
    _postings: bytes
    _docs: list[SceneGraph]
    _by_id: dict[str, SceneGraph]

    @property
    def image_ids(self) -> list[str]:
        return [g.image_id for g in self._docs]

    @property
    def graphs(self) -> list[SceneGraph]:
        return list(self._docs)

    @property
    def config_snapshot(self) -> dict | None:
        return self.manifest.get("config")

    def stats(self) -> dict:
        return dict(self.manifest["counts"])

    def graph(self, image_id: str) -> SceneGraph:
        try:
            return self._by_id[image_id]
        except KeyError:
            raise NotFound(image_id) from None

    def terms(self) -> list[str]:
        return list(self._sorted_terms)

    def terms_with_prefix(self, prefix: str) -> list[str]:
        lo = bisect.bisect_left(self._sorted_terms, prefix)
        hi = bisect.bisect_left(self._sorted_terms, prefix + "￿")
        return self._sorted_terms[lo:hi]

    def lookup(self, term: str | Term) -> list[Posting]:
        """Exact-match postings, ascending by image_id; unknown term → []."""
        key = term.encode() if isinstance(term, Term) else term
        entry = self._terms.get(key)
        if entry is None:
            return []
        offset, count = entry
        postings: list[Posting] = []
        try:
            pos = offset
            for _ in range(count):
                ordinal, n_ids = struct.unpack_from("<II", self._postings, pos)
                pos += 8
                ids = struct.unpack_from(f"<{n_ids}I", self._postings, pos)
                pos += 4 * n_ids
                postings.append(Posting(self._docs[ordinal].image_id, tuple(ids)))
        except (struct.error, IndexError, ValueError) as exc:
            raise IndexCorrupt("postings.seg", str(exc)) from exc
        return postings


def intersect(
    families: Sequence[Sequence[Posting | str]], universe: Sequence[str] = ()
) -> list[str]:
    """Sorted image ids present in every posting family.

    An empty family list is a vacuous constraint and yields the whole
    universe; any empty member list yields [].
    """
    if not families:
        return sorted(universe)

    def ids(family: Sequence[Posting | str]) -> set[str]:
        return {p.image_id if isinstance(p, Posting) else p for p in family}

    result = ids(families[0])
    for family in families[1:]:
        if not result:
            break
        result &= ids(family)
    return sorted(result)
