"""Truth values as optimal degree-weighted path proximities.

A statement (s, o) is scored by the best path between its entities. A
path's weight penalizes generic intermediates:

* metric closure: W = 1 / (1 + sum of ln k over intermediate nodes),
  maximized by the path minimizing the summed log-degrees;
* ultrametric closure: W = 1 / (1 + max of ln k over intermediates),
  maximized by the widest-bottleneck path;
* direct-only: W = 1 for an existing edge, else 0.

A direct edge has no intermediates, so W = 1 in every mode. Unreachable
pairs score 0. The natural logarithm is used throughout; any other base
rescales costs by a constant and preserves path ordering per query.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from ._search import optimal_path_search
from .errors import ValidationError
from .graph import EdgeExclusion, KnowledgeGraph, _coerce_exclusion

__all__ = [
    "Closure",
    "PathWitness",
    "TruthResult",
    "path_weight_metric",
    "path_weight_ultrametric",
    "truth_value",
    "truth_value_direct_only",
    "truth_value_pairs",
    "truth_value_matrix",
    "brute_force_truth",
]

_NO_ARCS = (np.empty(0, np.int64), np.empty(0, np.int64))


class Closure(str, Enum):
    """Which transitive-closure variant scores a statement."""

    METRIC = "metric"
    ULTRAMETRIC = "ultrametric"
    DIRECT_ONLY = "direct_only"

    @classmethod
    def coerce(cls, value) -> "Closure":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value))
        except ValueError:
            valid = ", ".join(c.value for c in cls)
            raise ValidationError(
                f"unknown closure {value!r} (expected one of: {valid})"
            ) from None


@dataclass(frozen=True)
class PathWitness:
    """The optimal path found for a statement.

    ``nodes`` runs from subject to object; ``cost`` is the aggregated
    intermediate log-degree (sum for metric, max for ultrametric).
    """

    nodes: tuple[int, ...]
    cost: float

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class TruthResult:
    tau: float
    witness: PathWitness | None
    closure: Closure
    reachable: bool

    def to_dict(self, graph: KnowledgeGraph | None = None) -> dict:
        out = {
            "tau": self.tau,
            "closure": self.closure.value,
            "reachable": self.reachable,
        }
        if self.witness is None:
            out["path"] = None
        elif graph is None:
            out["path"] = list(self.witness.nodes)
            out["cost"] = self.witness.cost
        else:
            names = [graph.dictionary.name_of(v) for v in self.witness.nodes]
            out["path"] = names
            out["cost"] = self.witness.cost
            out["intermediate_degrees"] = {
                graph.dictionary.name_of(v): graph.degree(v)
                for v in self.witness.nodes[1:-1]
            }
        return out


def _tau(cost: float) -> float:
    return 1.0 / (1.0 + cost)


def _check_path(path, graph: KnowledgeGraph) -> Sequence[int]:
    nodes = path.nodes if isinstance(path, PathWitness) else tuple(path)
    if len(nodes) < 2:
        raise ValidationError("a path needs at least two nodes")
    if len(set(nodes)) != len(nodes):
        raise ValidationError("path is not simple (repeated node)")
    for u, v in zip(nodes, nodes[1:]):
        if not graph.has_edge(u, v):
            raise ValidationError(f"path step {u} -> {v} is not a graph edge")
    return nodes


def path_weight_metric(path, graph: KnowledgeGraph) -> float:
    """Summed-cost proximity: 1 / (1 + sum of ln k over intermediates)."""
    nodes = _check_path(path, graph)
    cost = float(sum(graph.log_degrees[v] for v in nodes[1:-1]))
    return _tau(cost)


def path_weight_ultrametric(path, graph: KnowledgeGraph) -> float:
    """Bottleneck proximity 1 / (1 + max of ln k over intermediates)."""
    nodes = _check_path(path, graph)
    if len(nodes) == 2:
        return 1.0
    cost = float(max(graph.log_degrees[v] for v in nodes[1:-1]))
    return _tau(cost)


def _check_query(graph: KnowledgeGraph, s: int, o: int) -> tuple[int, int]:
    s = int(s)
    o = int(o)
    n = graph.node_count
    if not 0 <= s < n or not 0 <= o < n:
        raise ValidationError(f"entity id out of range [0, {n}): ({s}, {o})")
    if s == o:
        raise ValidationError("degenerate statement: subject equals object")
    return s, o


def _exclusion_arcs(exclusion: EdgeExclusion | None):
    if exclusion is None or not exclusion:
        return _NO_ARCS
    return exclusion.arc_arrays()


def truth_value(
    graph: KnowledgeGraph,
    s: int,
    o: int,
    closure: Closure | str = Closure.METRIC,
    exclusion: EdgeExclusion | Iterable[tuple[int, int]] | None = None,
) -> TruthResult:
    """Score statement (s, o) by its optimal path under the given closure.

    Returns tau in [0, 1] with the witness path; tau = 0 with no witness
    when o is unreachable from s given the exclusion.
    """
    closure = Closure.coerce(closure)
    s, o = _check_query(graph, s, o)
    exclusion = _coerce_exclusion(exclusion, graph.directed)
    if closure is Closure.DIRECT_ONLY:
        return truth_value_direct_only(graph, s, o, exclusion)
    exc_u, exc_v = _exclusion_arcs(exclusion)
    indptr, indices = graph.csr
    dist, pred = optimal_path_search(
        indptr,
        indices,
        graph.log_degrees,
        s,
        o,
        exc_u,
        exc_v,
        closure is Closure.ULTRAMETRIC,
    )
    cost = float(dist[o])
    if not np.isfinite(cost):
        return TruthResult(0.0, None, closure, False)
    nodes = [o]
    while nodes[-1] != s:
        nodes.append(int(pred[nodes[-1]]))
    nodes.reverse()
    witness = PathWitness(tuple(nodes), cost)
    return TruthResult(_tau(cost), witness, closure, True)


def truth_value_direct_only(
    graph: KnowledgeGraph,
    s: int,
    o: int,
    exclusion: EdgeExclusion | Iterable[tuple[int, int]] | None = None,
) -> TruthResult:
    """Score using direct edges only: 1 if a non-excluded edge exists, else 0."""
    s, o = _check_query(graph, s, o)
    exclusion = _coerce_exclusion(exclusion, graph.directed)
    if graph.has_edge(s, o, exclusion):
        return TruthResult(1.0, PathWitness((s, o), 0.0), Closure.DIRECT_ONLY, True)
    return TruthResult(0.0, None, Closure.DIRECT_ONLY, False)


def brute_force_truth(
    graph: KnowledgeGraph,
    s: int,
    o: int,
    closure: Closure | str = Closure.METRIC,
    exclusion: EdgeExclusion | Iterable[tuple[int, int]] | None = None,
    max_nodes: int = 14,
) -> TruthResult:
    """Testing oracle: enumerate every simple s-o path and take the best.

    Exponential in the worst case, so graphs above ``max_nodes`` nodes are
    refused. Semantics match :func:`truth_value` by construction.
    """
    closure = Closure.coerce(closure)
    s, o = _check_query(graph, s, o)
    if graph.node_count > max_nodes:
        raise ValidationError(
            f"graph has {graph.node_count} nodes; oracle refuses above {max_nodes}"
        )
    exclusion = _coerce_exclusion(exclusion, graph.directed)
    if closure is Closure.DIRECT_ONLY:
        return truth_value_direct_only(graph, s, o, exclusion)

    weigh = path_weight_metric if closure is Closure.METRIC else path_weight_ultrametric
    best_w = 0.0
    best_path: tuple[int, ...] | None = None
    stack = [s]
    on_path = {s}

    def walk(v: int) -> None:
        nonlocal best_w, best_path
        for w in graph.neighbors(v, exclusion):
            if w == o:
                path = tuple(stack) + (o,)
                weight = weigh(path, graph)
                if weight > best_w:
                    best_w = weight
                    best_path = path
            elif w not in on_path:
                stack.append(w)
                on_path.add(w)
                walk(w)
                stack.pop()
                on_path.remove(w)

    walk(s)
    if best_path is None:
        return TruthResult(0.0, None, closure, False)
    cost = 1.0 / best_w - 1.0
    return TruthResult(best_w, PathWitness(best_path, cost), closure, True)


def _cost_via_in_neighbors(graph: KnowledgeGraph, dist: np.ndarray, o: int) -> float:
    """Destination-entry-free cost from an exhaustive search's dist array."""
    nbrs = graph.in_neighbors(o)
    if nbrs.shape[0] == 0:
        return np.inf
    return float(dist[nbrs].min())


def _row_taus(
    graph: KnowledgeGraph,
    s: int,
    object_ids: np.ndarray,
    closure: Closure,
    exclude_existing: bool,
) -> np.ndarray:
    """Taus from one subject to many objects.

    One exhaustive search covers every object whose cell needs no
    exclusion; cells whose own edge must be removed re-run a targeted
    search with that single pair excluded.
    """
    indptr, indices = graph.csr
    minimax = closure is Closure.ULTRAMETRIC
    dist, _ = optimal_path_search(
        indptr, indices, graph.log_degrees, s, -1, *_NO_ARCS, minimax
    )
    out = np.zeros(object_ids.shape[0], dtype=np.float64)
    for j, o in enumerate(object_ids):
        o = int(o)
        if exclude_existing and graph.has_edge(s, o):
            res = truth_value(graph, s, o, closure, exclusion=[(s, o)])
            out[j] = res.tau
            continue
        cost = _cost_via_in_neighbors(graph, dist, o)
        out[j] = _tau(cost) if np.isfinite(cost) else 0.0
    return out


def truth_value_matrix(
    graph: KnowledgeGraph,
    subject_ids: Sequence[int],
    object_ids: Sequence[int],
    closure: Closure | str = Closure.METRIC,
    exclude_existing: bool = False,
    n_jobs: int = 1,
) -> np.ndarray:
    """Dense tau matrix for all subject x object statements.

    With ``exclude_existing`` each cell whose (subject, object) edge is in
    the graph is scored with that edge removed for that query only. Cells
    are independent; rows may be computed in parallel without affecting
    values or placement.
    """
    closure = Closure.coerce(closure)
    subjects = np.asarray(subject_ids, dtype=np.int64)
    objects = np.asarray(object_ids, dtype=np.int64)
    n = graph.node_count
    for arr in (subjects, objects):
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ValidationError(f"entity id out of range [0, {n})")
    overlap = np.intersect1d(subjects, objects)
    if overlap.size:
        raise ValidationError(
            f"degenerate cells: ids appear as both subject and object: "
            f"{overlap[:5].tolist()}"
        )

    matrix = np.zeros((subjects.shape[0], objects.shape[0]), dtype=np.float64)
    if closure is Closure.DIRECT_ONLY:
        for i, s in enumerate(subjects):
            for j, o in enumerate(objects):
                if graph.has_edge(int(s), int(o)) and not exclude_existing:
                    matrix[i, j] = 1.0
        return matrix

    def fill(i: int) -> None:
        matrix[i, :] = _row_taus(graph, int(subjects[i]), objects, closure, exclude_existing)

    if n_jobs <= 1 or subjects.shape[0] <= 1:
        for i in range(subjects.shape[0]):
            fill(i)
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            list(pool.map(fill, range(subjects.shape[0])))
    return matrix


def truth_value_pairs(
    graph: KnowledgeGraph,
    pairs: Sequence[tuple[int, int]],
    closure: Closure | str = Closure.METRIC,
    exclude_existing: bool = False,
    n_jobs: int = 1,
) -> np.ndarray:
    """Taus for an explicit list of (subject, object) id pairs."""
    closure = Closure.coerce(closure)
    pair_list = [(int(s), int(o)) for s, o in pairs]

    def score(pair: tuple[int, int]) -> float:
        s, o = pair
        exclusion = None
        if exclude_existing and graph.has_edge(s, o):
            exclusion = [(s, o)]
        if closure is Closure.DIRECT_ONLY:
            return truth_value_direct_only(graph, s, o, exclusion).tau
        return truth_value(graph, s, o, closure, exclusion).tau

    if n_jobs <= 1 or len(pair_list) <= 1:
        return np.array([score(p) for p in pair_list], dtype=np.float64)
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        return np.array(list(pool.map(score, pair_list)), dtype=np.float64)
