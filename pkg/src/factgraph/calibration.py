"""Calibration protocol: truth-value features into cross-validated classifiers.

Entities (rows) are characterized by their truth values against a set of
target concepts (columns). The resulting feature matrix feeds standard
k-NN and random-forest classifiers scored with k-fold cross-validation,
either from the full transitive closure or from direct edges only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from sklearn.ensemble import RandomForestClassifier
from sklearn.metrics import f1_score
from sklearn.model_selection import KFold, StratifiedKFold
from sklearn.neighbors import KNeighborsClassifier

from .errors import ValidationError
from .evaluation import auroc
from .graph import KnowledgeGraph
from .proximity import Closure, truth_value_matrix
from .validation import check_feature_matrix, resolve_names

__all__ = [
    "FeatureMode",
    "FeatureMatrix",
    "FoldSpec",
    "CvReport",
    "ModeComparison",
    "resolve_targets",
    "build_feature_matrix",
    "knn_classify",
    "random_forest_classify",
    "compare_modes",
]


class FeatureMode(str, Enum):
    TRANSITIVE_CLOSURE = "transitive_closure"
    INFOBOX_ONLY = "infobox_only"

    @classmethod
    def coerce(cls, value) -> "FeatureMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value))
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise ValidationError(
                f"unknown feature mode {value!r} (expected one of: {valid})"
            ) from None


@dataclass
class FeatureMatrix:
    """N entities x M target concepts of truth values."""

    entities: list[str]
    targets: list[str]
    values: np.ndarray
    mode: FeatureMode
    closure: Closure
    directedness: str

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (len(self.entities), len(self.targets)):
            raise ValidationError(
                f"feature matrix shape {self.values.shape} does not match "
                f"({len(self.entities)}, {len(self.targets)})"
            )


@dataclass(frozen=True)
class FoldSpec:
    """Cross-validation layout; the seed fixes fold assignment."""

    n_folds: int = 10
    seed: int = 0
    stratified: bool = True

    def splitter(self):
        cls = StratifiedKFold if self.stratified else KFold
        return cls(n_splits=self.n_folds, shuffle=True, random_state=self.seed)


@dataclass
class CvReport:
    """Per-fold and pooled cross-validation scores for one classifier."""

    classifier: str
    params: dict
    n_folds: int
    seed: int
    classes: list
    per_fold: list[dict] = field(default_factory=list)
    f1_macro: float = 0.0
    f1_per_class: dict = field(default_factory=dict)
    auroc: float = 0.0
    flags: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "classifier": self.classifier,
            "params": dict(self.params),
            "n_folds": self.n_folds,
            "seed": self.seed,
            "classes": [str(c) for c in self.classes],
            "per_fold": list(self.per_fold),
            "f1_macro": self.f1_macro,
            "f1_per_class": {str(k): v for k, v in self.f1_per_class.items()},
            "auroc": self.auroc,
            "flags": list(self.flags),
        }


def resolve_targets(
    graph: KnowledgeGraph,
    concept_name: str,
    case_insensitive: bool = False,
) -> list[str]:
    """Names of all nodes with an edge to the named concept.

    In directed mode these are in-neighbors, matching statements of the
    form (Y, is-a, concept); undirected mode takes all neighbors.
    """
    (cid,) = resolve_names(graph.dictionary, [concept_name], case_insensitive)
    ids = np.sort(np.unique(graph.in_neighbors(cid)))
    return [graph.dictionary.name_of(int(i)) for i in ids]


def build_feature_matrix(
    graph: KnowledgeGraph,
    entities: Sequence[str],
    targets: Sequence[str],
    mode: FeatureMode | str = FeatureMode.TRANSITIVE_CLOSURE,
    closure: Closure | str = Closure.METRIC,
    case_insensitive: bool = False,
    n_jobs: int = 1,
) -> FeatureMatrix:
    """Tau of statement (entity_i, target_j) for every cell.

    Unlike statement-matrix evaluation this never removes edges: direct
    evidence is legitimate input here, and infobox-only mode consists of
    exactly that evidence (values in {0, 1}).
    """
    mode = FeatureMode.coerce(mode)
    closure = Closure.coerce(closure)
    entities = list(entities)
    targets = list(targets)
    if not entities or not targets:
        raise ValidationError("entities and targets must be non-empty")
    entity_ids = resolve_names(graph.dictionary, entities, case_insensitive)
    target_ids = resolve_names(graph.dictionary, targets, case_insensitive)
    effective = Closure.DIRECT_ONLY if mode is FeatureMode.INFOBOX_ONLY else closure
    values = truth_value_matrix(
        graph, entity_ids, target_ids, effective, exclude_existing=False, n_jobs=n_jobs
    )
    return FeatureMatrix(
        entities, targets, values, mode, closure, graph.directedness
    )


def _proba_positive(estimator, X: np.ndarray, classes: np.ndarray) -> np.ndarray:
    """P(positive class) even when a fold saw a single training class."""
    proba = estimator.predict_proba(X)
    fitted = list(estimator.classes_)
    pos = classes[1]
    if pos in fitted:
        return proba[:, fitted.index(pos)]
    return np.zeros(X.shape[0], dtype=np.float64)


def _cross_validate(X, y, make_estimator, name: str, params: dict, fold_spec: FoldSpec) -> CvReport:
    X, y = check_feature_matrix(X, y)
    classes = np.unique(y)
    if classes.shape[0] != 2:
        raise ValidationError(
            f"binary labels required, got {classes.shape[0]} classes"
        )
    if X.shape[0] < fold_spec.n_folds:
        raise ValidationError(
            f"{X.shape[0]} rows cannot fill {fold_spec.n_folds} folds"
        )
    report = CvReport(
        classifier=name,
        params=params,
        n_folds=fold_spec.n_folds,
        seed=fold_spec.seed,
        classes=classes.tolist(),
    )
    if np.any(np.ptp(X, axis=0) == 0.0):
        n_const = int(np.sum(np.ptp(X, axis=0) == 0.0))
        report.flags.append(f"{n_const} zero-information (constant) features")

    oof_proba = np.zeros(X.shape[0], dtype=np.float64)
    oof_pred = np.empty(X.shape[0], dtype=y.dtype)
    for fold, (train, test) in enumerate(fold_spec.splitter().split(X, y)):
        est = make_estimator()
        est.fit(X[train], y[train])
        if np.unique(y[train]).shape[0] < 2:
            report.flags.append(f"fold {fold}: single-class training split")
        proba = _proba_positive(est, X[test], classes)
        pred = est.predict(X[test])
        oof_proba[test] = proba
        oof_pred[test] = pred
        fold_entry = {
            "fold": fold,
            "n_test": int(test.shape[0]),
            "f1_macro": float(
                f1_score(y[test], pred, labels=classes, average="macro", zero_division=0)
            ),
        }
        pos_mask = y[test] == classes[1]
        if pos_mask.any() and (~pos_mask).any():
            fold_entry["auroc"] = auroc(proba[pos_mask], proba[~pos_mask]).auroc
        else:
            fold_entry["auroc"] = None
            report.flags.append(f"fold {fold}: single-class test split, no AUROC")
        report.per_fold.append(fold_entry)

    report.f1_macro = float(
        f1_score(y, oof_pred, labels=classes, average="macro", zero_division=0)
    )
    per_class = f1_score(y, oof_pred, labels=classes, average=None, zero_division=0)
    report.f1_per_class = {c: float(v) for c, v in zip(classes.tolist(), per_class)}
    pos_mask = y == classes[1]
    report.auroc = auroc(oof_proba[pos_mask], oof_proba[~pos_mask]).auroc
    return report


def knn_classify(
    features,
    labels,
    k: int = 5,
    fold_spec: FoldSpec | None = None,
) -> CvReport:
    """k-NN with Euclidean distance and majority vote.

    Class probability is the neighbor vote fraction. Voting ties resolve by
    class order, so results are deterministic for a fixed fold seed.
    """
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    fold_spec = fold_spec or FoldSpec()
    return _cross_validate(
        features,
        labels,
        lambda: KNeighborsClassifier(n_neighbors=k),
        "knn",
        {"k": k},
        fold_spec,
    )


def random_forest_classify(
    features,
    labels,
    n_trees: int = 100,
    fold_spec: FoldSpec | None = None,
    seed: int = 0,
    max_depth: int | None = None,
    min_samples_leaf: int = 1,
) -> CvReport:
    """Bagged Gini CART forest sampling sqrt(M) features per split.

    With unlimited depth and single-sample leaves, the class probability
    reduces to the fraction of trees voting for the class.
    """
    if n_trees < 1:
        raise ValidationError(f"n_trees must be >= 1, got {n_trees}")
    fold_spec = fold_spec or FoldSpec()
    params = {
        "n_trees": n_trees,
        "max_depth": max_depth,
        "min_samples_leaf": min_samples_leaf,
        "rf_seed": seed,
    }
    return _cross_validate(
        features,
        labels,
        lambda: RandomForestClassifier(
            n_estimators=n_trees,
            criterion="gini",
            max_features="sqrt",
            max_depth=max_depth,
            min_samples_leaf=min_samples_leaf,
            bootstrap=True,
            random_state=seed,
        ),
        "random_forest",
        params,
        fold_spec,
    )


@dataclass
class ModeComparison:
    """Identical classifiers on closure features vs direct-edge features."""

    transitive_closure: dict[str, CvReport]
    infobox_only: dict[str, CvReport]

    def gap(self) -> dict[str, float]:
        return {
            name: self.transitive_closure[name].auroc - self.infobox_only[name].auroc
            for name in self.transitive_closure
        }

    def to_dict(self) -> dict:
        return {
            "transitive_closure": {
                k: v.to_dict() for k, v in self.transitive_closure.items()
            },
            "infobox_only": {k: v.to_dict() for k, v in self.infobox_only.items()},
            "auroc_gap": self.gap(),
        }


def compare_modes(
    graph: KnowledgeGraph,
    entities: Sequence[str],
    labels,
    targets: Sequence[str],
    closure: Closure | str = Closure.METRIC,
    fold_spec: FoldSpec | None = None,
    k: int = 5,
    n_trees: int = 100,
    seed: int = 0,
    case_insensitive: bool = False,
    n_jobs: int = 1,
) -> ModeComparison:
    """Run the same classifiers on full-closure and direct-only features."""
    fold_spec = fold_spec or FoldSpec()
    labels = np.asarray(labels)
    reports = {}
    for mode in (FeatureMode.TRANSITIVE_CLOSURE, FeatureMode.INFOBOX_ONLY):
        fm = build_feature_matrix(
            graph, entities, targets, mode, closure, case_insensitive, n_jobs
        )
        reports[mode] = {
            "knn": knn_classify(fm.values, labels, k, fold_spec),
            "random_forest": random_forest_classify(
                fm.values, labels, n_trees, fold_spec, seed
            ),
        }
    return ModeComparison(
        reports[FeatureMode.TRANSITIVE_CLOSURE], reports[FeatureMode.INFOBOX_ONLY]
    )
