"""Validation protocols: statement matrices, ROC/AUROC, rank correlations.

The discrimination question is always the same: do independently-true
statements receive higher truth values than false ones? AUROC estimates
exactly that probability (ties get half credit), and the rank correlations
compare truth values against ordinal human ratings.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.stats import kendalltau, rankdata

from .errors import ValidationError
from .graph import KnowledgeGraph
from .ingest import Statement
from .proximity import Closure, truth_value_matrix, truth_value_pairs
from .validation import check_paired, check_scores, resolve_names

__all__ = [
    "RocReport",
    "CorrelationReport",
    "StatementMatrix",
    "CorpusEvaluation",
    "auroc",
    "spearman_rho",
    "kendall_tau_b",
    "rank_correlations",
    "build_statement_matrix",
    "evaluate_annotated_corpus",
    "export_confusion_matrix",
]


# ---------------------------------------------------------------------------
# ROC / AUROC


@dataclass
class RocReport:
    """ROC curve points plus the tie-aware pair-ranking probability.

    ``auroc`` equals the probability that a random positive outscores a
    random negative, counting ties as one half. Points run from (0, 0) to
    (1, 1); ``thresholds`` aligns with points (+inf for the origin).
    """

    points: list[tuple[float, float]]
    thresholds: list[float]
    auroc: float
    n_pos: int
    n_neg: int

    def trapezoid_area(self) -> float:
        fpr = np.array([p[0] for p in self.points])
        tpr = np.array([p[1] for p in self.points])
        return float(np.trapezoid(tpr, fpr))

    def to_dict(self) -> dict:
        return {
            "auroc": self.auroc,
            "n_pos": self.n_pos,
            "n_neg": self.n_neg,
            "points": [[f, t] for f, t in self.points],
            "thresholds": self.thresholds,
        }

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["fpr", "tpr", "threshold"])
            for (f, t), thr in zip(self.points, self.thresholds):
                writer.writerow([f"{f:.12g}", f"{t:.12g}", f"{thr:.12g}"])


def auroc(pos_scores, neg_scores) -> RocReport:
    """Rank positives against negatives.

    The area is computed from the Mann-Whitney statistic with average ranks
    (equivalent to pairwise counting with half-weight ties); the curve comes
    from a threshold sweep where equal scores collapse into a single step.
    """
    pos = check_scores(pos_scores, "pos_scores")
    neg = check_scores(neg_scores, "neg_scores")
    n_pos, n_neg = pos.shape[0], neg.shape[0]

    ranks = rankdata(np.concatenate([pos, neg]), method="average")
    rank_sum = float(ranks[:n_pos].sum())
    area = (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)

    thresholds = np.unique(np.concatenate([pos, neg]))[::-1]
    pos_sorted = np.sort(pos)
    neg_sorted = np.sort(neg)
    tpr = (n_pos - np.searchsorted(pos_sorted, thresholds, side="left")) / n_pos
    fpr = (n_neg - np.searchsorted(neg_sorted, thresholds, side="left")) / n_neg

    points = [(0.0, 0.0)] + list(zip(fpr.tolist(), tpr.tolist()))
    thr_list = [math.inf] + thresholds.tolist()
    return RocReport(points, thr_list, float(area), n_pos, n_neg)


# ---------------------------------------------------------------------------
# Rank correlations


@dataclass
class CorrelationReport:
    spearman_rho: float
    spearman_p: float
    kendall_tau: float
    kendall_p: float
    n: int
    method: str = "asymptotic"

    def to_dict(self) -> dict:
        return {
            "spearman_rho": self.spearman_rho,
            "spearman_p": self.spearman_p,
            "kendall_tau": self.kendall_tau,
            "kendall_p": self.kendall_p,
            "n": self.n,
            "method": self.method,
        }


def _normal_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def spearman_rho(x, y) -> tuple[float, float]:
    """Spearman rho with ties averaged, large-sample normal p-value."""
    xa, ya = check_paired(x, y)
    n = xa.shape[0]
    if n < 2:
        raise ValidationError("need at least 2 observations")
    rx = rankdata(xa, method="average")
    ry = rankdata(ya, method="average")
    sx = rx.std()
    sy = ry.std()
    if sx == 0.0 or sy == 0.0:
        raise ValidationError("correlation undefined: constant input")
    rho = float(((rx - rx.mean()) * (ry - ry.mean())).mean() / (sx * sy))
    z = rho * math.sqrt(n - 1)
    p = min(1.0, 2.0 * _normal_sf(abs(z)))
    return rho, p


def kendall_tau_b(x, y) -> tuple[float, float]:
    """Tie-corrected Kendall tau-b with the asymptotic normal p-value."""
    xa, ya = check_paired(x, y)
    n = xa.shape[0]
    if n < 2:
        raise ValidationError("need at least 2 observations")
    if n == 2:
        # variance formula needs n >= 3; with two observations both
        # orderings are equally likely under the null, so p is exactly 1
        dx = np.sign(xa[1] - xa[0])
        dy = np.sign(ya[1] - ya[0])
        if dx == 0 or dy == 0:
            raise ValidationError("correlation undefined: constant input")
        return float(dx * dy), 1.0
    res = kendalltau(xa, ya, variant="b", method="asymptotic")
    tau, p = float(res.statistic), float(res.pvalue)
    if math.isnan(tau):
        raise ValidationError("correlation undefined: constant input")
    return tau, p


def rank_correlations(
    scores,
    ratings,
    permutations: int = 0,
    seed: int = 0,
) -> CorrelationReport:
    """Spearman and Kendall agreement between scores and ratings.

    With ``permutations > 0`` the asymptotic p-values are replaced with
    Monte-Carlo permutation p-values (ratings shuffled).
    """
    xa, ya = check_paired(scores, ratings)
    rho, rho_p = spearman_rho(xa, ya)
    tau, tau_p = kendall_tau_b(xa, ya)
    method = "asymptotic"
    if permutations > 0:
        rng = np.random.default_rng(seed)
        hits_rho = hits_tau = 0
        for _ in range(permutations):
            perm = rng.permutation(ya)
            r, _ = spearman_rho(xa, perm)
            t, _ = kendall_tau_b(xa, perm)
            if abs(r) >= abs(rho):
                hits_rho += 1
            if abs(t) >= abs(tau):
                hits_tau += 1
        rho_p = (hits_rho + 1) / (permutations + 1)
        tau_p = (hits_tau + 1) / (permutations + 1)
        method = f"permutation({permutations})"
    return CorrelationReport(rho, rho_p, tau, tau_p, int(xa.shape[0]), method)


# ---------------------------------------------------------------------------
# Statement matrices


@dataclass
class StatementMatrix:
    """Dense truth values for all subject x object combinations.

    ``truth_mask[i, j]`` marks which cells are independently-true
    statements; for aligned subject/object orderings that is the diagonal.
    """

    subjects: list[str]
    objects: list[str]
    tau: np.ndarray
    truth_mask: np.ndarray
    closure: Closure

    def __post_init__(self):
        self.tau = np.asarray(self.tau, dtype=np.float64)
        self.truth_mask = np.asarray(self.truth_mask, dtype=bool)
        shape = (len(self.subjects), len(self.objects))
        if self.tau.shape != shape or self.truth_mask.shape != shape:
            raise ValidationError(
                f"matrix shape mismatch: tau {self.tau.shape}, "
                f"mask {self.truth_mask.shape}, labels {shape}"
            )

    @property
    def pos_scores(self) -> np.ndarray:
        return self.tau[self.truth_mask]

    @property
    def neg_scores(self) -> np.ndarray:
        return self.tau[~self.truth_mask]

    def roc(self) -> RocReport:
        return auroc(self.pos_scores, self.neg_scores)


def build_statement_matrix(
    graph: KnowledgeGraph,
    subjects: Sequence[str],
    objects: Sequence[str],
    truth_mask,
    closure: Closure | str = Closure.METRIC,
    case_insensitive: bool = False,
    n_jobs: int = 1,
) -> StatementMatrix:
    """Score every subject x object combination with leave-one-out.

    Any cell whose (subject, object) edge exists in the graph is computed
    with that edge excluded for that query, true and false statements
    alike, so present edges cannot confirm themselves.
    """
    closure = Closure.coerce(closure)
    subjects = list(subjects)
    objects = list(objects)
    if not subjects or not objects:
        raise ValidationError("subjects and objects must be non-empty")
    mask = np.asarray(truth_mask, dtype=bool)
    if mask.shape != (len(subjects), len(objects)):
        raise ValidationError(
            f"truth_mask shape {mask.shape} does not match "
            f"({len(subjects)}, {len(objects)})"
        )
    subject_ids = resolve_names(graph.dictionary, subjects, case_insensitive)
    object_ids = resolve_names(graph.dictionary, objects, case_insensitive)
    tau = truth_value_matrix(
        graph, subject_ids, object_ids, closure, exclude_existing=True, n_jobs=n_jobs
    )
    return StatementMatrix(subjects, objects, tau, mask, closure)


def export_confusion_matrix(
    matrix: StatementMatrix,
    out_dir: str | Path,
    row_groups: Sequence[str] | None = None,
    col_groups: Sequence[str] | None = None,
) -> tuple[Path, Path]:
    """Write matrix.csv plus a JSON manifest for external heatmap plotting.

    Optional group labels (one per row / column, e.g. decade or region)
    are summarized as contiguous boundary spans in the manifest.
    """
    from .reporting import write_json

    if matrix.tau.size == 0:
        raise ValidationError("cannot export an empty matrix")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "matrix.csv"
    manifest_path = out_dir / "matrix_manifest.json"

    try:
        with open(csv_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["subject"] + matrix.objects)
            for name, row in zip(matrix.subjects, matrix.tau):
                writer.writerow([name] + [f"{v:.12g}" for v in row])
    except OSError as exc:
        raise ValidationError(f"cannot write {csv_path}: {exc}") from exc

    manifest = {
        "shape": [len(matrix.subjects), len(matrix.objects)],
        "closure": matrix.closure.value,
        "subjects": matrix.subjects,
        "objects": matrix.objects,
        "true_cells": [
            [int(i), int(j)] for i, j in np.argwhere(matrix.truth_mask)
        ],
    }
    if row_groups is not None:
        manifest["row_groups"] = _group_spans(row_groups, len(matrix.subjects))
    if col_groups is not None:
        manifest["col_groups"] = _group_spans(col_groups, len(matrix.objects))
    write_json(manifest_path, manifest)
    return csv_path, manifest_path


def _group_spans(labels: Sequence[str], expected: int) -> list[dict]:
    labels = list(labels)
    if len(labels) != expected:
        raise ValidationError(
            f"group labels length {len(labels)} does not match axis {expected}"
        )
    spans = []
    start = 0
    for i in range(1, len(labels) + 1):
        if i == len(labels) or labels[i] != labels[start]:
            spans.append({"label": labels[start], "start": start, "end": i})
            start = i
    return spans


# ---------------------------------------------------------------------------
# Annotated corpus (human-rated statements)


@dataclass
class CorpusEvaluation:
    """Agreement between computed truth values and human ratings."""

    correlations: CorrelationReport
    roc: RocReport | None
    taus: np.ndarray
    ratings: np.ndarray
    statements: list[Statement]
    counts: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "correlations": self.correlations.to_dict(),
            "auroc": None if self.roc is None else self.roc.auroc,
            "n_scored": int(self.taus.shape[0]),
            "counts": dict(self.counts),
        }


def evaluate_annotated_corpus(
    graph: KnowledgeGraph,
    statements: Sequence[Statement],
    closure: Closure | str = Closure.METRIC,
    min_subject_degree: int = 3,
    case_insensitive: bool = False,
    n_jobs: int = 1,
    permutations: int = 0,
    seed: int = 0,
) -> CorpusEvaluation:
    """Score rated statements and correlate truth values with ratings.

    Statements are kept only when the subject resolves and has degree
    strictly greater than ``min_subject_degree``. A statement already
    present as an edge is scored with that edge removed. Unresolvable
    objects score 0 (no path can exist). AUROC uses the rating sign as the
    binary label; zero ratings are excluded from it and counted.
    """
    closure = Closure.coerce(closure)
    lookup = (
        graph.dictionary.id_of_fold if case_insensitive else graph.dictionary.id_of
    )
    counts = {
        "input": len(statements),
        "missing_rating": 0,
        "unresolved_subject": 0,
        "low_degree_subject": 0,
        "unresolved_object": 0,
        "degenerate_pair": 0,
    }
    kept: list[Statement] = []
    pairs: list[tuple[int, int] | None] = []
    for st in statements:
        if st.rating is None:
            counts["missing_rating"] += 1
            continue
        sid = lookup(st.subject)
        if sid is None:
            counts["unresolved_subject"] += 1
            continue
        if graph.degree(sid) <= min_subject_degree:
            counts["low_degree_subject"] += 1
            continue
        oid = lookup(st.object)
        if oid is None:
            counts["unresolved_object"] += 1
            kept.append(st)
            pairs.append(None)
            continue
        if oid == sid:
            counts["degenerate_pair"] += 1
            continue
        kept.append(st)
        pairs.append((sid, oid))

    if len(kept) < 2:
        raise ValidationError(
            f"only {len(kept)} statements survive filtering; need at least 2"
        )

    taus = np.zeros(len(kept), dtype=np.float64)
    real = [(i, p) for i, p in enumerate(pairs) if p is not None]
    if real:
        scored = truth_value_pairs(
            graph,
            [p for _, p in real],
            closure,
            exclude_existing=True,
            n_jobs=n_jobs,
        )
        for (i, _), tau in zip(real, scored):
            taus[i] = tau
    ratings = np.array([st.rating for st in kept], dtype=np.float64)

    correlations = rank_correlations(taus, ratings, permutations, seed)
    pos = taus[ratings > 0]
    neg = taus[ratings < 0]
    counts["zero_rating_excluded_from_auroc"] = int((ratings == 0).sum())
    roc = None
    if pos.size and neg.size:
        roc = auroc(pos, neg)
    return CorpusEvaluation(correlations, roc, taus, ratings, kept, counts)
