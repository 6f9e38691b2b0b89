"""Triple ingestion: N-Triples / TSV parsing, filtering, edge-list building.

The pipeline is: parse raw triples, drop triples that fail the filter rules
(literal objects, out-of-namespace entities), discard the predicate, intern
entity names, and conflate duplicate (subject, object) pairs into a single
edge. Self-loops are dropped because a statement relating an entity to
itself carries no path information.
"""

from __future__ import annotations

import gzip
import io
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator

import numpy as np

from .dictionary import EntityDictionary
from .errors import ParseError, ValidationError

__all__ = [
    "RawTriple",
    "FilterConfig",
    "FilterDecision",
    "EdgeList",
    "EdgeListBuilder",
    "Statement",
    "IngestReport",
    "parse_ntriples",
    "apply_filters",
    "build_edge_list",
    "read_tsv_edges",
    "load_annotated_corpus",
    "ingest_sources",
]

DROP_LITERAL = "literal_object"
DROP_NAMESPACE = "external_namespace"


@dataclass(frozen=True)
class RawTriple:
    """One parsed subject-predicate-object record.

    ``object_is_literal`` marks quoted objects; ``object_datatype`` carries
    the ``^^<...>`` tag or ``@lang`` suffix verbatim when present.
    """

    subject: str
    predicate: str
    object: str
    object_is_literal: bool = False
    object_datatype: str | None = None


@dataclass(frozen=True)
class FilterConfig:
    """Keep/drop rules applied to parsed triples.

    ``allowed_namespaces`` is a set of IRI prefixes; subjects or objects
    outside every prefix are dropped. ``None`` disables namespace filtering
    entirely (an empty set is rejected: it would drop everything silently).
    """

    allowed_namespaces: frozenset[str] | None = None
    drop_literal_objects: bool = True

    def __post_init__(self):
        if self.allowed_namespaces is not None:
            object.__setattr__(
                self, "allowed_namespaces", frozenset(self.allowed_namespaces)
            )
            if not self.allowed_namespaces:
                raise ValidationError(
                    "allowed_namespaces must be non-empty when namespace "
                    "filtering is enabled (use None to disable)"
                )


@dataclass(frozen=True)
class FilterDecision:
    keep: bool
    reason: str | None = None


@dataclass
class EdgeList:
    """Deduplicated (subject, object) id pairs plus the interning dictionary.

    ``edges`` is an (m, 2) int32 array. In undirected mode each pair is
    normalized to (min, max); in directed mode orientation is preserved.
    """

    dictionary: EntityDictionary
    edges: np.ndarray
    directed: bool = False

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=np.int32).reshape(-1, 2)


@dataclass
class IngestReport:
    """Counts collected while ingesting one or more triple sources."""

    triples_read: int = 0
    kept: int = 0
    parse_errors: int = 0
    dropped: dict[str, int] = field(default_factory=dict)
    duplicate_pairs: int = 0
    self_loops: int = 0
    nodes: int = 0
    edges: int = 0
    sources: list[str] = field(default_factory=list)

    def count_drop(self, reason: str) -> None:
        self.dropped[reason] = self.dropped.get(reason, 0) + 1

    def to_dict(self) -> dict:
        return {
            "triples_read": self.triples_read,
            "kept": self.kept,
            "parse_errors": self.parse_errors,
            "dropped": dict(sorted(self.dropped.items())),
            "duplicate_pairs": self.duplicate_pairs,
            "self_loops": self.self_loops,
            "nodes": self.nodes,
            "edges": self.edges,
            "sources": list(self.sources),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


@dataclass(frozen=True)
class Statement:
    """A (subject, predicate, object) triple under evaluation.

    ``rating`` is the human consensus score (#Yes - #No over five raters),
    present only for annotated-corpus statements.
    """

    subject: str
    predicate: str
    object: str
    rating: int | None = None


# N-Triples terms. Permissive by design: IRIs are kept verbatim (including
# percent-encoding), blank node labels pass through as names.
_IRI = r"<([^>]*)>"
_BNODE = r"(_:[A-Za-z0-9][A-Za-z0-9._-]*)"
_LITERAL = r'"((?:[^"\\]|\\.)*)"'
_LIT_SUFFIX = r"(?:\^\^<([^>]*)>|@([A-Za-z0-9-]+))?"

_LINE_RE = re.compile(
    rf"^\s*(?:{_IRI}|{_BNODE})\s+{_IRI}\s+"
    rf"(?:{_IRI}|{_BNODE}|{_LITERAL}{_LIT_SUFFIX})\s*\.\s*(?:#.*)?$"
)


def _parse_line(line: str) -> RawTriple | None:
    """Parse one N-Triples line; None for blank/comment lines."""
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return None
    m = _LINE_RE.match(line)
    if m is None:
        raise ParseError(f"malformed N-Triples line: {stripped[:80]!r}")
    s_iri, s_bnode, pred, o_iri, o_bnode, o_lit, o_dtype, o_lang = m.groups()
    subject = s_iri if s_iri is not None else s_bnode
    if o_lit is not None:
        obj, is_literal = o_lit, True
        datatype = o_dtype if o_dtype is not None else o_lang
    else:
        obj, is_literal = (o_iri if o_iri is not None else o_bnode), False
        datatype = None
    if not subject or not pred or not obj:
        raise ParseError(f"empty term in line: {stripped[:80]!r}")
    return RawTriple(subject, pred, obj, is_literal, datatype)


def parse_ntriples(
    lines: Iterable[str],
    on_error: Callable[[ParseError], None] | None = None,
) -> Iterator[RawTriple]:
    """Yield one RawTriple per well-formed line, preserving order.

    Malformed lines raise :class:`ParseError` with the line number, unless
    ``on_error`` is given, in which case the error is reported there and the
    stream continues.
    """
    for lineno, line in enumerate(lines, start=1):
        try:
            triple = _parse_line(line)
        except ParseError as exc:
            err = ParseError(str(exc), line_number=lineno)
            if on_error is None:
                raise err from None
            on_error(err)
            continue
        if triple is not None:
            yield triple


def apply_filters(triple: RawTriple, cfg: FilterConfig) -> FilterDecision:
    """Decide keep-or-drop for one triple. Total: never raises.

    Literal objects are checked first, then namespace membership of the
    subject and object.
    """
    if cfg.drop_literal_objects and triple.object_is_literal:
        return FilterDecision(False, DROP_LITERAL)
    if cfg.allowed_namespaces is not None:
        for term in (triple.subject, triple.object):
            if not any(term.startswith(ns) for ns in cfg.allowed_namespaces):
                return FilterDecision(False, DROP_NAMESPACE)
    return FilterDecision(True)


class EdgeListBuilder:
    """Accumulates deduplicated (subject, object) pairs.

    Shared by the triple path and the TSV fast path. Pair identity is the
    unordered pair in undirected mode, the ordered pair in directed mode.
    """

    def __init__(self, directed: bool = False, dictionary: EntityDictionary | None = None):
        self.directed = directed
        self.dictionary = dictionary if dictionary is not None else EntityDictionary()
        self._seen: set[int] = set()
        self._src: list[int] = []
        self._dst: list[int] = []
        self.duplicate_pairs = 0
        self.self_loops = 0

    def add(self, subject: str, obj: str) -> bool:
        """Intern both names and record the pair; False if loop/duplicate."""
        s = self.dictionary.intern(subject)
        o = self.dictionary.intern(obj)
        if s == o:
            self.self_loops += 1
            return False
        if not self.directed and s > o:
            s, o = o, s
        key = (s << 32) | o
        if key in self._seen:
            self.duplicate_pairs += 1
            return False
        self._seen.add(key)
        self._src.append(s)
        self._dst.append(o)
        return True

    def build(self) -> EdgeList:
        edges = np.empty((len(self._src), 2), dtype=np.int32)
        edges[:, 0] = self._src
        edges[:, 1] = self._dst
        return EdgeList(self.dictionary, edges, directed=self.directed)


def build_edge_list(
    triples: Iterable[RawTriple],
    directed: bool = False,
    builder: EdgeListBuilder | None = None,
) -> EdgeList:
    """Discard predicates and conflate same-(subject, object) triples.

    Entities are interned in first-seen order. Input is assumed already
    filtered.
    """
    if builder is None:
        builder = EdgeListBuilder(directed=directed)
    for t in triples:
        builder.add(t.subject, t.object)
    return builder.build()


def read_tsv_edges(
    lines: Iterable[str],
    on_error: Callable[[ParseError], None] | None = None,
) -> Iterator[tuple[str, str]]:
    """Yield (subject, object) name pairs from 2-column TSV lines."""
    for lineno, line in enumerate(lines, start=1):
        stripped = line.rstrip("\n").rstrip("\r")
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            err = ParseError(
                f"expected 2 tab-separated columns: {stripped[:80]!r}",
                line_number=lineno,
            )
            if on_error is None:
                raise err
            on_error(err)
            continue
        yield parts[0], parts[1]


_CORPUS_COLUMNS = ["subject", "predicate", "object", "r1", "r2", "r3", "r4", "r5"]
_RATER_YES = {"yes", "y"}
_RATER_NO = {"no", "n"}
_RATER_ABSTAIN = {"abstain", "skip", ""}


def load_annotated_corpus(
    source: str | Path | Iterable[str],
    on_error: Callable[[ParseError], None] | None = None,
) -> list[Statement]:
    """Load a rater-annotated statement TSV.

    Expected header: ``subject predicate object r1 r2 r3 r4 r5`` (tab
    separated). Each rater field is Yes/No/abstain; the statement rating is
    (#Yes - #No), an integer in [-5, +5]. Bad records raise ParseError with
    the row number, or are routed to ``on_error`` and skipped.
    """
    if isinstance(source, (str, Path)):
        with _open_text(Path(source)) as fh:
            return load_annotated_corpus(list(fh), on_error=on_error)

    lines = iter(source)
    try:
        header = next(lines)
    except StopIteration:
        raise ParseError("empty annotated corpus: missing header") from None
    columns = [c.strip().lower() for c in header.rstrip("\n").split("\t")]
    if columns != _CORPUS_COLUMNS:
        raise ParseError(
            f"bad header: expected {_CORPUS_COLUMNS}, got {columns}", line_number=1
        )

    statements = []
    for lineno, line in enumerate(lines, start=2):
        stripped = line.rstrip("\n").rstrip("\r")
        if not stripped:
            continue
        try:
            statements.append(_parse_corpus_row(stripped, lineno))
        except ParseError as exc:
            if on_error is None:
                raise
            on_error(exc)
    return statements


def _parse_corpus_row(row: str, lineno: int) -> Statement:
    parts = row.split("\t")
    if len(parts) != 8:
        raise ParseError(
            f"expected 8 columns (3 terms + 5 raters), got {len(parts)}",
            line_number=lineno,
        )
    subject, predicate, obj = (p.strip() for p in parts[:3])
    if not subject or not predicate or not obj:
        raise ParseError("empty subject/predicate/object", line_number=lineno)
    yes = no = 0
    for raw in parts[3:]:
        token = raw.strip().lower()
        if token in _RATER_YES:
            yes += 1
        elif token in _RATER_NO:
            no += 1
        elif token in _RATER_ABSTAIN:
            pass
        else:
            raise ParseError(f"unknown rater response {raw!r}", line_number=lineno)
    return Statement(subject, predicate, obj, rating=yes - no)


def _open_text(path: Path) -> io.TextIOBase:
    if path.suffix == ".gz":
        return gzip.open(path, "rt", encoding="utf-8")
    return open(path, "rt", encoding="utf-8")


def _is_tsv(path: Path) -> bool:
    name = path.name[:-3] if path.name.endswith(".gz") else path.name
    return name.endswith(".tsv")


PROGRESS_EVERY = 500_000


def ingest_sources(
    paths: Iterable[str | Path],
    cfg: FilterConfig | None = None,
    directed: bool = False,
    skip_malformed: bool = True,
    progress: Callable[[int, str], None] | None = None,
) -> tuple[EdgeList, IngestReport]:
    """Parse, filter and merge several sources into one edge list.

    ``.nt`` / ``.nt.gz`` files go through the N-Triples parser and filters;
    ``.tsv`` / ``.tsv.gz`` files are treated as a pre-filtered 2-column
    edge-list fast path. Dataset identity is recorded in the report only;
    all sources build the same graph. ``progress`` is called with
    (triples_read, source) every ``PROGRESS_EVERY`` records.
    """
    cfg = cfg if cfg is not None else FilterConfig()
    report = IngestReport()
    builder = EdgeListBuilder(directed=directed)

    def on_error(exc: ParseError) -> None:
        if not skip_malformed:
            raise exc
        report.parse_errors += 1

    def tick(source: str) -> None:
        report.triples_read += 1
        if progress is not None and report.triples_read % PROGRESS_EVERY == 0:
            progress(report.triples_read, source)

    for raw_path in paths:
        path = Path(raw_path)
        report.sources.append(str(path))
        with _open_text(path) as fh:
            if _is_tsv(path):
                for subject, obj in read_tsv_edges(fh, on_error=on_error):
                    tick(str(path))
                    report.kept += 1
                    builder.add(subject, obj)
            else:
                for triple in parse_ntriples(fh, on_error=on_error):
                    tick(str(path))
                    decision = apply_filters(triple, cfg)
                    if not decision.keep:
                        report.count_drop(decision.reason)
                        continue
                    report.kept += 1
                    builder.add(triple.subject, triple.object)

    edge_list = builder.build()
    report.duplicate_pairs = builder.duplicate_pairs
    report.self_loops = builder.self_loops
    report.nodes = len(edge_list.dictionary)
    report.edges = int(edge_list.edges.shape[0])
    return edge_list, report
