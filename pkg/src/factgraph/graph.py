"""Immutable in-memory knowledge graph over interned entity ids.

Adjacency is CSR-style (contiguous offset + neighbor arrays) so a graph of
a few million nodes and tens of millions of edges fits in a couple hundred
megabytes and is safe to share across threads. Leave-one-out queries use a
per-query :class:`EdgeExclusion` instead of mutating the graph.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .dictionary import EntityDictionary
from .errors import SnapshotError, ValidationError
from .ingest import EdgeList

__all__ = ["KnowledgeGraph", "EdgeExclusion", "GraphStats", "build_graph"]

_MAGIC = b"VKG1"


@dataclass(frozen=True)
class GraphStats:
    node_count: int
    edge_count: int
    degree_min: int
    degree_median: float
    degree_max: int
    degree_mean: float
    connected_components: int

    def to_dict(self) -> dict:
        return {
            "node_count": self.node_count,
            "edge_count": self.edge_count,
            "degree_min": self.degree_min,
            "degree_median": self.degree_median,
            "degree_max": self.degree_max,
            "degree_mean": self.degree_mean,
            "connected_components": self.connected_components,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


class EdgeExclusion:
    """A small set of edges hidden from one query.

    Pairs are unordered (normalized to (min, max)) for undirected graphs and
    ordered for directed graphs. Used to remove a statement's own edge
    before computing its truth value, without touching the shared graph.
    """

    __slots__ = ("pairs", "directed", "_arc_u", "_arc_v")

    def __init__(self, pairs: Iterable[tuple[int, int]] = (), directed: bool = False):
        normalized = set()
        for u, v in pairs:
            u, v = int(u), int(v)
            if not directed and u > v:
                u, v = v, u
            normalized.add((u, v))
        self.pairs = frozenset(normalized)
        self.directed = directed
        arcs = sorted(self.pairs)
        if not directed:
            arcs = sorted(set(arcs) | {(v, u) for u, v in arcs})
        self._arc_u = np.array([a[0] for a in arcs], dtype=np.int64)
        self._arc_v = np.array([a[1] for a in arcs], dtype=np.int64)

    def blocks(self, u: int, v: int) -> bool:
        """True if traversal u -> v is excluded."""
        if not self.directed and u > v:
            u, v = v, u
        return (u, v) in self.pairs

    def arc_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Blocked arcs as parallel arrays (both orientations if undirected)."""
        return self._arc_u, self._arc_v

    def __len__(self) -> int:
        return len(self.pairs)

    def __bool__(self) -> bool:
        return bool(self.pairs)

    def __repr__(self) -> str:
        mode = "directed" if self.directed else "undirected"
        return f"EdgeExclusion({sorted(self.pairs)!r}, {mode})"


def _coerce_exclusion(exclusion, directed: bool) -> EdgeExclusion | None:
    if exclusion is None:
        return None
    if isinstance(exclusion, EdgeExclusion):
        if exclusion.directed != directed:
            raise ValidationError(
                "exclusion directedness does not match the graph"
            )
        return exclusion
    return EdgeExclusion(exclusion, directed=directed)


def _csr_from_arcs(src: np.ndarray, dst: np.ndarray, n: int):
    order = np.lexsort((dst, src))
    src = src[order]
    dst = dst[order].astype(np.int32, copy=False)
    counts = np.bincount(src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, dst


class KnowledgeGraph:
    """Immutable graph: sorted CSR neighbor lists plus per-node degrees.

    In directed mode traversal follows edge orientation (out-neighbors) but
    the degree k(v) counts total participation, in-edges plus out-edges.
    """

    def __init__(
        self,
        dictionary: EntityDictionary,
        out_indptr: np.ndarray,
        out_indices: np.ndarray,
        in_indptr: np.ndarray | None = None,
        in_indices: np.ndarray | None = None,
        directed: bool = False,
    ):
        self.dictionary = dictionary
        self.directed = directed
        self._out_indptr = out_indptr
        self._out_indices = out_indices
        self._in_indptr = in_indptr if directed else out_indptr
        self._in_indices = in_indices if directed else out_indices
        n = out_indptr.shape[0] - 1
        out_deg = np.diff(out_indptr)
        if directed:
            in_deg = np.diff(self._in_indptr)
            self.degrees = (out_deg + in_deg).astype(np.int64)
        else:
            self.degrees = out_deg.astype(np.int64)
        # ln k, floored at k=1: degree-0 nodes have no edges and can never
        # appear as path intermediates, so the value is never consulted.
        self.log_degrees = np.log(np.maximum(self.degrees, 1)).astype(np.float64)
        self._n = n

    # -- basic accessors ---------------------------------------------------

    @property
    def node_count(self) -> int:
        return self._n

    @property
    def edge_count(self) -> int:
        m = int(self._out_indices.shape[0])
        return m if self.directed else m // 2

    @property
    def directedness(self) -> str:
        return "directed" if self.directed else "undirected"

    @property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) of the traversal adjacency (out in directed mode)."""
        return self._out_indptr, self._out_indices

    @property
    def csr_in(self) -> tuple[np.ndarray, np.ndarray]:
        return self._in_indptr, self._in_indices

    def _check_node(self, v: int) -> int:
        v = int(v)
        if not 0 <= v < self._n:
            raise ValidationError(f"node id {v} out of range [0, {self._n})")
        return v

    def degree(self, v: int) -> int:
        """Number of statements v participates in (in+out when directed)."""
        return int(self.degrees[self._check_node(v)])

    def neighbors(self, v: int, exclusion: EdgeExclusion | None = None) -> Iterator[int]:
        """Neighbors of v in ascending id order, minus excluded pairs.

        Directed mode yields out-neighbors only: traversal respects the
        original subject -> object orientation.
        """
        v = self._check_node(v)
        exclusion = _coerce_exclusion(exclusion, self.directed)
        lo, hi = self._out_indptr[v], self._out_indptr[v + 1]
        for w in self._out_indices[lo:hi]:
            w = int(w)
            if exclusion is not None and exclusion.blocks(v, w):
                continue
            yield w

    def in_neighbors(self, v: int) -> np.ndarray:
        v = self._check_node(v)
        lo, hi = self._in_indptr[v], self._in_indptr[v + 1]
        return self._in_indices[lo:hi]

    def has_edge(self, s: int, o: int, exclusion: EdgeExclusion | None = None) -> bool:
        """True if the edge s->o exists (direction-aware) and is not excluded."""
        s = self._check_node(s)
        o = self._check_node(o)
        exclusion = _coerce_exclusion(exclusion, self.directed)
        if exclusion is not None and exclusion.blocks(s, o):
            return False
        lo, hi = self._out_indptr[s], self._out_indptr[s + 1]
        idx = np.searchsorted(self._out_indices[lo:hi], o)
        return bool(idx < hi - lo and self._out_indices[lo + idx] == o)

    # -- derived views and summaries ----------------------------------------

    def to_undirected(self) -> "KnowledgeGraph":
        """Symmetrized view; conflates (a,b)/(b,a) arcs into one edge."""
        if not self.directed:
            return self
        src = np.repeat(
            np.arange(self._n, dtype=np.int64), np.diff(self._out_indptr)
        )
        dst = self._out_indices.astype(np.int64)
        lo = np.minimum(src, dst)
        hi = np.maximum(src, dst)
        pairs = np.unique(np.stack([lo, hi], axis=1), axis=0)
        both_src = np.concatenate([pairs[:, 0], pairs[:, 1]])
        both_dst = np.concatenate([pairs[:, 1], pairs[:, 0]])
        indptr, indices = _csr_from_arcs(both_src, both_dst, self._n)
        return KnowledgeGraph(self.dictionary, indptr, indices, directed=False)

    def stats(self) -> GraphStats:
        if self._n == 0:
            return GraphStats(0, 0, 0, 0.0, 0, 0.0, 0)
        adj = csr_matrix(
            (
                np.ones(self._out_indices.shape[0], dtype=np.int8),
                self._out_indices,
                self._out_indptr,
            ),
            shape=(self._n, self._n),
        )
        n_comp, _ = connected_components(
            adj, directed=self.directed, connection="weak"
        )
        deg = self.degrees
        return GraphStats(
            node_count=self._n,
            edge_count=self.edge_count,
            degree_min=int(deg.min()),
            degree_median=float(np.median(deg)),
            degree_max=int(deg.max()),
            degree_mean=float(deg.mean()),
            connected_components=int(n_comp),
        )

    # -- snapshot format -----------------------------------------------------
    # magic "VKG1" | u8 directed | u64 node_count | u64 arc_count
    # | u64 name_blob_len | u32 name lengths (node_count)
    # | name blob (utf-8) | out indptr i64 | out indices i32
    # | [directed only: in indptr i64 | in indices i32]
    # All integers little-endian.

    def save(self, path: str | Path) -> None:
        path = Path(path)
        names = self.dictionary.names
        if len(names) != self._n:
            raise SnapshotError("dictionary size does not match node count")
        encoded = [name.encode("utf-8") for name in names]
        lengths = np.array([len(b) for b in encoded], dtype="<u4")
        blob = b"".join(encoded)
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack("<B", int(self.directed)))
            fh.write(
                struct.pack(
                    "<QQQ", self._n, self._out_indices.shape[0], len(blob)
                )
            )
            fh.write(lengths.tobytes())
            fh.write(blob)
            fh.write(self._out_indptr.astype("<i8").tobytes())
            fh.write(self._out_indices.astype("<i4").tobytes())
            if self.directed:
                fh.write(self._in_indptr.astype("<i8").tobytes())
                fh.write(self._in_indices.astype("<i4").tobytes())

    @classmethod
    def load(cls, path: str | Path) -> "KnowledgeGraph":
        path = Path(path)
        try:
            raw = path.read_bytes()
        except OSError as exc:
            raise SnapshotError(f"cannot read snapshot {path}: {exc}") from exc
        if len(raw) < 29 or raw[:4] != _MAGIC:
            raise SnapshotError(f"{path} is not a VKG1 snapshot")
        directed = bool(raw[4])
        n, arcs, blob_len = struct.unpack_from("<QQQ", raw, 5)
        off = 29
        try:
            lengths = np.frombuffer(raw, dtype="<u4", count=n, offset=off)
            off += 4 * n
            blob = raw[off : off + blob_len]
            off += blob_len
            ends = np.cumsum(lengths)
            if len(ends) and int(ends[-1]) != blob_len:
                raise SnapshotError(f"{path}: name blob length mismatch")
            names = []
            start = 0
            for end in ends:
                names.append(blob[start:end].decode("utf-8"))
                start = end
            out_indptr = np.frombuffer(raw, dtype="<i8", count=n + 1, offset=off).copy()
            off += 8 * (n + 1)
            out_indices = np.frombuffer(raw, dtype="<i4", count=arcs, offset=off).copy()
            off += 4 * arcs
            in_indptr = in_indices = None
            if directed:
                in_indptr = np.frombuffer(raw, dtype="<i8", count=n + 1, offset=off).copy()
                off += 8 * (n + 1)
                in_indices = np.frombuffer(raw, dtype="<i4", count=arcs, offset=off).copy()
                off += 4 * arcs
        except ValueError as exc:
            raise SnapshotError(f"{path}: truncated snapshot ({exc})") from exc
        dictionary = EntityDictionary(names)
        return cls(
            dictionary,
            out_indptr,
            out_indices,
            in_indptr,
            in_indices,
            directed=directed,
        )


def build_graph(edge_list: EdgeList, directed: bool | None = None) -> KnowledgeGraph:
    """Construct the immutable CSR graph from a deduplicated edge list.

    ``directed=None`` follows the edge list's own mode. An undirected graph
    can be built from a directed edge list (pairs are conflated); the
    reverse would invent orientations and is rejected.
    """
    if directed is None:
        directed = edge_list.directed
    if directed and not edge_list.directed:
        raise ValidationError(
            "cannot build a directed graph from an undirected edge list"
        )
    n = len(edge_list.dictionary)
    edges = edge_list.edges
    if edges.size and (edges.min() < 0 or edges.max() >= n):
        raise ValidationError(
            f"edge references node id outside [0, {n})"
        )
    src = edges[:, 0].astype(np.int64)
    dst = edges[:, 1].astype(np.int64)
    if directed:
        out_indptr, out_indices = _csr_from_arcs(src, dst, n)
        in_indptr, in_indices = _csr_from_arcs(dst, src, n)
        return KnowledgeGraph(
            edge_list.dictionary,
            out_indptr,
            out_indices,
            in_indptr,
            in_indices,
            directed=True,
        )
    if edge_list.directed:
        lo = np.minimum(src, dst)
        hi = np.maximum(src, dst)
        pairs = np.unique(np.stack([lo, hi], axis=1), axis=0)
        src, dst = pairs[:, 0], pairs[:, 1]
    both_src = np.concatenate([src, dst])
    both_dst = np.concatenate([dst, src])
    indptr, indices = _csr_from_arcs(both_src, both_dst, n)
    return KnowledgeGraph(edge_list.dictionary, indptr, indices, directed=False)
