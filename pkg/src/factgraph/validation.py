"""Input-checking helpers shared by the library, estimators, and CLI."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .dictionary import EntityDictionary
from .errors import ResolutionError, ValidationError


def resolve_names(
    dictionary: EntityDictionary,
    names: Iterable[str],
    case_insensitive: bool = False,
) -> list[int]:
    """Map entity names to ids; raise ResolutionError listing every miss.

    Resolution is exact-match by default; the case-insensitive fallback
    resolves to the first interned casing.
    """
    lookup = dictionary.id_of_fold if case_insensitive else dictionary.id_of
    ids = []
    missing = []
    for name in names:
        eid = lookup(name)
        if eid is None:
            missing.append(name)
        else:
            ids.append(eid)
    if missing:
        suggestions = {m: dictionary.suggest(m) for m in missing[:5]}
        raise ResolutionError(missing, suggestions)
    return ids


def check_scores(scores, name: str = "scores") -> np.ndarray:
    arr = np.asarray(scores, dtype=np.float64).ravel()
    if arr.size == 0:
        raise ValidationError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")
    return arr


def check_paired(x, y) -> tuple[np.ndarray, np.ndarray]:
    xa = check_scores(x, "x")
    ya = check_scores(y, "y")
    if xa.shape[0] != ya.shape[0]:
        raise ValidationError(
            f"paired arrays differ in length: {xa.shape[0]} vs {ya.shape[0]}"
        )
    return xa, ya


def check_feature_matrix(X, y=None):
    """2-D float features, optionally with an aligned label vector."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValidationError(f"feature matrix must be 2-D, got shape {X.shape}")
    if X.shape[0] == 0 or X.shape[1] == 0:
        raise ValidationError(f"feature matrix is empty: shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValidationError("feature matrix contains non-finite values")
    if y is None:
        return X
    y = np.asarray(y)
    if y.shape[0] != X.shape[0]:
        raise ValidationError(
            f"labels length {y.shape[0]} does not match {X.shape[0]} rows"
        )
    return X, y


def check_statement_pairs(pairs) -> list[tuple[str, str]]:
    out = []
    for i, pair in enumerate(pairs):
        try:
            s, o = pair
        except (TypeError, ValueError):
            raise ValidationError(
                f"statement {i} is not a (subject, object) pair: {pair!r}"
            ) from None
        out.append((str(s), str(o)))
    return out
