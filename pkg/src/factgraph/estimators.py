"""Scikit-learn style wrappers around the graph fact checker.

``GraphFactChecker`` is predict-shaped: build a knowledge graph, then score
(subject, object) statement pairs. ``TruthFeaturizer`` is transform-shaped:
entity names in, truth-value features against target concepts out. Both
expose ``get_params`` / ``set_params`` and fitted-attribute conventions so
they compose with pipelines and model selection.

The knowledge graph can be supplied two ways: as the ``graph`` constructor
parameter (a prefit resource, e.g. loaded from a snapshot), in which case
``fit`` ignores ``X``; or, for the checker, as the training input to
``fit`` itself (an edge list, the link-prediction view). The featurizer
requires the constructor route so that pipeline ``fit(entities, labels)``
keeps entities as the sample axis.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .calibration import FeatureMode, resolve_targets
from .errors import ValidationError
from .graph import KnowledgeGraph, build_graph
from .ingest import EdgeList, EdgeListBuilder
from .proximity import Closure, truth_value_matrix, truth_value_pairs
from .validation import check_statement_pairs, resolve_names

__all__ = ["GraphFactChecker", "TruthFeaturizer"]


def _graph_from(source, directed: bool) -> KnowledgeGraph:
    """Accept a KnowledgeGraph, an EdgeList, or (subject, object) name pairs."""
    if isinstance(source, KnowledgeGraph):
        if source.directed != directed:
            raise ValidationError(
                f"graph is {source.directedness} but the estimator expects "
                f"{'directed' if directed else 'undirected'}"
            )
        return source
    if isinstance(source, EdgeList):
        if directed and not source.directed:
            raise ValidationError(
                "cannot build a directed graph from an undirected edge list"
            )
        return build_graph(source, directed=directed)
    builder = EdgeListBuilder(directed=directed)
    for pair in source:
        s, o = pair
        builder.add(str(s), str(o))
    return build_graph(builder.build())


class GraphFactChecker(BaseEstimator):
    """Score statements by optimal-path proximity over a knowledge graph.

    Parameters
    ----------
    graph : KnowledgeGraph, EdgeList, or iterable of (str, str), optional
        Prefit graph source. When given, ``fit`` ignores its ``X``.
    closure : {"metric", "ultrametric", "direct_only"}, default="metric"
        Path aggregation: shortest summed log-degree, widest bottleneck,
        or direct edges only.
    directed : bool, default=False
        Whether traversal follows edge orientation. Ignored when ``graph``
        is a KnowledgeGraph (its own mode wins).
    leave_one_out : bool, default=True
        Exclude each queried pair's own edge, the link-prediction protocol.
        Disable to score raw support including direct evidence.
    threshold : float, default=0.5
        Decision cut for ``predict``.
    handle_missing : {"error", "zero"}, default="error"
        Unknown entity names either raise or score 0.
    n_jobs : int, default=1
        Statement-level parallelism.

    Attributes
    ----------
    graph_ : KnowledgeGraph
    dictionary_ : EntityDictionary
    """

    def __init__(
        self,
        graph=None,
        closure: str = "metric",
        directed: bool = False,
        leave_one_out: bool = True,
        threshold: float = 0.5,
        handle_missing: str = "error",
        n_jobs: int = 1,
    ):
        self.graph = graph
        self.closure = closure
        self.directed = directed
        self.leave_one_out = leave_one_out
        self.threshold = threshold
        self.handle_missing = handle_missing
        self.n_jobs = n_jobs

    def _validate_params(self):
        Closure.coerce(self.closure)
        if self.handle_missing not in ("error", "zero"):
            raise ValidationError(
                f"handle_missing must be 'error' or 'zero', got {self.handle_missing!r}"
            )
        if not 0.0 <= float(self.threshold) <= 1.0:
            raise ValidationError(f"threshold must be in [0, 1], got {self.threshold}")

    def _effective_directed(self, source) -> bool:
        if isinstance(source, KnowledgeGraph):
            return source.directed
        return self.directed

    def fit(self, X=None, y=None):
        """Build the graph from the ``graph`` parameter or from X edge pairs."""
        self._validate_params()
        source = self.graph if self.graph is not None else X
        if source is None:
            raise ValidationError("no graph source: pass `graph=` or fit on edges")
        self.graph_ = _graph_from(source, self._effective_directed(source))
        self.dictionary_ = self.graph_.dictionary
        return self

    @classmethod
    def from_graph(cls, graph: KnowledgeGraph, **params) -> "GraphFactChecker":
        """Wrap an already-built graph (e.g. loaded from a snapshot)."""
        return cls(graph=graph, **params).fit()

    def _resolved_pairs(self, X):
        pairs = check_statement_pairs(X)
        missing_rows = []
        ids: list[tuple[int, int] | None] = []
        dictionary = self.dictionary_
        for i, (s, o) in enumerate(pairs):
            sid = dictionary.id_of(s)
            oid = dictionary.id_of(o)
            if sid is None or oid is None:
                missing_rows.append(i)
                ids.append(None)
            else:
                ids.append((sid, oid))
        if missing_rows and self.handle_missing == "error":
            names = sorted(
                {n for i in missing_rows for n in pairs[i] if dictionary.id_of(n) is None}
            )
            resolve_names(dictionary, names)  # raises with suggestions
        return ids

    def decision_function(self, X) -> np.ndarray:
        """Truth value tau in [0, 1] for each (subject, object) pair."""
        check_is_fitted(self, "graph_")
        ids = self._resolved_pairs(X)
        out = np.zeros(len(ids), dtype=np.float64)
        real = [(i, p) for i, p in enumerate(ids) if p is not None]
        if real:
            taus = truth_value_pairs(
                self.graph_,
                [p for _, p in real],
                Closure.coerce(self.closure),
                exclude_existing=self.leave_one_out,
                n_jobs=self.n_jobs,
            )
            for (i, _), tau in zip(real, taus):
                out[i] = tau
        return out

    # domain-friendly alias
    def score_statements(self, X) -> np.ndarray:
        return self.decision_function(X)

    def predict_proba(self, X) -> np.ndarray:
        tau = self.decision_function(X)
        return np.column_stack([1.0 - tau, tau])

    def predict(self, X) -> np.ndarray:
        return self.decision_function(X) >= float(self.threshold)

    @property
    def classes_(self):
        return np.array([False, True])


class TruthFeaturizer(BaseEstimator, TransformerMixin):
    """Turn entity names into truth-value features against target concepts.

    Parameters
    ----------
    graph : KnowledgeGraph, EdgeList, or iterable of (str, str)
        Graph source; a static resource, so it lives in the constructor and
        survives cloning. ``fit(X, y)`` ignores ``X`` (entities are samples,
        not graph-building input).
    targets : sequence of str, optional
        Explicit target concept names (feature columns).
    target_concept : str, optional
        Alternatively, use every node with an edge to this concept as a
        target (e.g. all ideologies). Exactly one of the two must be given.
    mode : {"transitive_closure", "infobox_only"}, default="transitive_closure"
    closure : {"metric", "ultrametric"}, default="metric"
    directed : bool, default=False
        Used when ``graph`` is an edge list; a KnowledgeGraph keeps its mode.
    handle_missing : {"error", "zero"}, default="error"
        Unknown entity names either raise or produce an all-zero row.
    n_jobs : int, default=1
    """

    def __init__(
        self,
        graph=None,
        targets: Sequence[str] | None = None,
        target_concept: str | None = None,
        mode: str = "transitive_closure",
        closure: str = "metric",
        directed: bool = False,
        handle_missing: str = "error",
        n_jobs: int = 1,
    ):
        self.graph = graph
        self.targets = targets
        self.target_concept = target_concept
        self.mode = mode
        self.closure = closure
        self.directed = directed
        self.handle_missing = handle_missing
        self.n_jobs = n_jobs

    def fit(self, X=None, y=None):
        """Build the graph and resolve the target columns. X is ignored."""
        Closure.coerce(self.closure)
        FeatureMode.coerce(self.mode)
        if self.graph is None:
            raise ValidationError("TruthFeaturizer requires the `graph` parameter")
        if (self.targets is None) == (self.target_concept is None):
            raise ValidationError(
                "provide exactly one of `targets` or `target_concept`"
            )
        if self.handle_missing not in ("error", "zero"):
            raise ValidationError(
                f"handle_missing must be 'error' or 'zero', got {self.handle_missing!r}"
            )
        directed = (
            self.graph.directed
            if isinstance(self.graph, KnowledgeGraph)
            else self.directed
        )
        self.graph_ = _graph_from(self.graph, directed)
        self.dictionary_ = self.graph_.dictionary
        if self.targets is not None:
            names = list(self.targets)
            resolve_names(self.dictionary_, names)
        else:
            names = resolve_targets(self.graph_, self.target_concept)
            if not names:
                raise ValidationError(
                    f"concept {self.target_concept!r} has no linked targets"
                )
        self.target_names_ = names
        self.target_ids_ = np.asarray(
            resolve_names(self.dictionary_, names), dtype=np.int64
        )
        return self

    def transform(self, X) -> np.ndarray:
        """Rows of truth values, one per entity name in X."""
        check_is_fitted(self, "graph_")
        names = [str(n) for n in X]
        ids: list[int | None] = []
        missing = []
        for name in names:
            eid = self.dictionary_.id_of(name)
            if eid is None:
                missing.append(name)
            ids.append(eid)
        if missing and self.handle_missing == "error":
            resolve_names(self.dictionary_, sorted(set(missing)))
        known = [(i, eid) for i, eid in enumerate(ids) if eid is not None]
        out = np.zeros((len(names), self.target_ids_.shape[0]), dtype=np.float64)
        if known:
            effective = (
                Closure.DIRECT_ONLY
                if FeatureMode.coerce(self.mode) is FeatureMode.INFOBOX_ONLY
                else Closure.coerce(self.closure)
            )
            values = truth_value_matrix(
                self.graph_,
                [eid for _, eid in known],
                self.target_ids_,
                effective,
                exclude_existing=False,
                n_jobs=self.n_jobs,
            )
            for row, (i, _) in enumerate(known):
                out[i, :] = values[row]
        return out

    def get_feature_names_out(self, input_features=None) -> np.ndarray:
        check_is_fitted(self, "target_names_")
        return np.asarray(self.target_names_, dtype=object)
