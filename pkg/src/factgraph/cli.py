"""Command-line entry point for reproducible fact-checking runs.

Subcommands: build a graph snapshot from triple sources, check a single
statement, evaluate a statement matrix or an annotated corpus, run the
classifier calibration, and dump graph stats. Every report embeds the full
run configuration and serializes floats at fixed precision, so identical
configs and inputs produce byte-identical outputs.

Exit codes: 0 success, 2 I/O, 3 name resolution, 4 validation.
"""

from __future__ import annotations

import csv
import functools
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .calibration import (
    FeatureMode,
    FoldSpec,
    build_feature_matrix,
    compare_modes,
    knn_classify,
    random_forest_classify,
    resolve_targets,
)
from .errors import ParseError, ResolutionError, SnapshotError, ValidationError
from .evaluation import (
    build_statement_matrix,
    evaluate_annotated_corpus,
    export_confusion_matrix,
)
from .graph import KnowledgeGraph, build_graph
from .ingest import FilterConfig, ingest_sources, load_annotated_corpus
from .proximity import Closure, truth_value, truth_value_direct_only
from .reporting import write_json
from .validation import resolve_names

EXIT_IO = 2
EXIT_RESOLUTION = 3
EXIT_VALIDATION = 4

SNAPSHOT_DIR_ENV = "FACTGRAPH_SNAPSHOT_DIR"

_closure_option = click.option(
    "--closure",
    type=click.Choice([c.value for c in Closure]),
    default=Closure.METRIC.value,
    show_default=True,
    help="Path aggregation variant.",
)
_threads_option = click.option(
    "--threads",
    type=int,
    default=None,
    help="Worker threads [default: all cores]. --threads 1 is fully serial.",
)
_ci_option = click.option(
    "--case-insensitive",
    is_flag=True,
    help="Fall back to case-insensitive entity name matching.",
)


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ResolutionError as exc:
            lines = [str(exc)]
            for name, sugg in exc.suggestions.items():
                if sugg:
                    lines.append(f"  {name!r}: did you mean {', '.join(map(repr, sugg))}?")
            _fail(EXIT_RESOLUTION, "\n".join(lines))
        except (ParseError, ValidationError) as exc:
            _fail(EXIT_VALIDATION, str(exc))
        except (SnapshotError, OSError) as exc:
            _fail(EXIT_IO, str(exc))

    return wrapper


def _threads(value: int | None) -> int:
    return value if value and value > 0 else (os.cpu_count() or 1)


def _locate(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    env_dir = os.environ.get(SNAPSHOT_DIR_ENV)
    if env_dir and not p.is_absolute():
        candidate = Path(env_dir) / p
        if candidate.exists():
            return candidate
    raise FileNotFoundError(f"no such file: {path}")


def _load_graph(path: str) -> KnowledgeGraph:
    return KnowledgeGraph.load(_locate(path))


@click.group()
@click.version_option(version=__version__, prog_name="factgraph")
def main():
    """Fact checking over knowledge graphs via degree-weighted optimal paths."""


# ---------------------------------------------------------------------------
# build


@main.command()
@click.argument("sources", nargs=-1, required=True, type=click.Path())
@click.option("--directed/--undirected", default=False, show_default=True)
@click.option("--out", required=True, type=click.Path(), help="Snapshot output path.")
@click.option(
    "--namespace",
    "namespaces",
    multiple=True,
    help="Allowed IRI prefix; drop triples outside every prefix. Repeatable.",
)
@click.option(
    "--keep-literal-objects",
    is_flag=True,
    help="Keep triples whose object is a literal (dates, measurements).",
)
@click.option(
    "--strict", is_flag=True, help="Abort on the first malformed input line."
)
@click.option(
    "--verbose", is_flag=True, help="Print a line-based progress counter to stderr."
)
@click.option("--report", "report_path", type=click.Path(), default=None)
@_handle_errors
def build(sources, directed, out, namespaces, keep_literal_objects, strict, verbose, report_path):
    """Parse triple SOURCES (.nt/.nt.gz/.tsv) into a graph snapshot."""
    for src in sources:
        _locate(src)
    cfg = FilterConfig(
        allowed_namespaces=frozenset(namespaces) if namespaces else None,
        drop_literal_objects=not keep_literal_objects,
    )
    progress = None
    if verbose:
        progress = lambda count, source: click.echo(  # noqa: E731
            f"  ...{count} triples ({source})", err=True
        )
    edge_list, report = ingest_sources(
        sources, cfg, directed=directed, skip_malformed=not strict, progress=progress
    )
    graph = build_graph(edge_list)
    graph.save(out)
    config = {
        "subcommand": "build",
        "sources": list(sources),
        "directed": directed,
        "namespaces": sorted(namespaces),
        "keep_literal_objects": keep_literal_objects,
        "strict": strict,
        "verbose": verbose,
        "out": str(out),
    }
    payload = {"config": config, "ingest": report.to_dict()}
    report_file = Path(report_path) if report_path else Path(str(out) + ".report.json")
    write_json(report_file, payload)
    click.echo(
        f"read {report.triples_read} triples -> {report.nodes} nodes, "
        f"{report.edges} edges ({graph.directedness}); "
        f"snapshot {out}, report {report_file}"
    )


# ---------------------------------------------------------------------------
# check


@main.command()
@click.argument("snapshot", type=click.Path())
@click.argument("subject")
@click.argument("object_", metavar="OBJECT")
@_closure_option
@click.option(
    "--exclude-existing",
    is_flag=True,
    help="Remove the statement's own edge before scoring (leave-one-out).",
)
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@_ci_option
@_handle_errors
def check(snapshot, subject, object_, closure, exclude_existing, as_json, case_insensitive):
    """Print the truth value and witness path for one statement."""
    graph = _load_graph(snapshot)
    sid, oid = resolve_names(graph.dictionary, [subject, object_], case_insensitive)
    exclusion = None
    if exclude_existing and graph.has_edge(sid, oid):
        exclusion = [(sid, oid)]
    closure = Closure.coerce(closure)
    if closure is Closure.DIRECT_ONLY:
        result = truth_value_direct_only(graph, sid, oid, exclusion)
    else:
        result = truth_value(graph, sid, oid, closure, exclusion)
    if as_json:
        import json as _json

        from .reporting import round_floats

        click.echo(_json.dumps(round_floats(result.to_dict(graph)), sort_keys=True))
        return
    click.echo(f"tau = {result.tau:.6f}  ({result.closure.value} closure)")
    if result.witness is None:
        click.echo("unreachable" if not result.reachable else "no witness")
        return
    names = [graph.dictionary.name_of(v) for v in result.witness.nodes]
    click.echo("path: " + " -> ".join(names))
    mids = result.witness.nodes[1:-1]
    if mids:
        degs = ", ".join(
            f"{graph.dictionary.name_of(v)}(k={graph.degree(v)})" for v in mids
        )
        click.echo(f"intermediate degrees: {degs}")


# ---------------------------------------------------------------------------
# eval-matrix


def _read_statements_csv(path: Path):
    """Statement CSV -> (subjects, objects, mask, row_groups, col_groups).

    Columns: subject, object, is_true; optional subject_group/object_group.
    The matrix spans unique subjects x unique objects in first-seen order;
    combinations not listed are treated as false statements.
    """
    subjects: list[str] = []
    objects: list[str] = []
    sub_index: dict[str, int] = {}
    obj_index: dict[str, int] = {}
    sub_groups: dict[str, str] = {}
    obj_groups: dict[str, str] = {}
    true_pairs: list[tuple[int, int]] = []
    seen_flags: dict[tuple[str, str], bool] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        cols = set(reader.fieldnames or ())
        required = {"subject", "object", "is_true"}
        if not required <= cols:
            raise ParseError(
                f"statement CSV needs columns {sorted(required)}, got {sorted(cols)}"
            )
        for lineno, row in enumerate(reader, start=2):
            subject = (row["subject"] or "").strip()
            obj = (row["object"] or "").strip()
            flag = (row["is_true"] or "").strip().lower()
            if not subject or not obj:
                raise ParseError("empty subject or object", line_number=lineno)
            if flag in ("1", "true", "yes", "t"):
                is_true = True
            elif flag in ("0", "false", "no", "f"):
                is_true = False
            else:
                raise ParseError(f"bad is_true value {flag!r}", line_number=lineno)
            prev = seen_flags.setdefault((subject, obj), is_true)
            if prev != is_true:
                raise ParseError(
                    f"contradictory is_true for ({subject}, {obj})",
                    line_number=lineno,
                )
            if subject not in sub_index:
                sub_index[subject] = len(subjects)
                subjects.append(subject)
            if obj not in obj_index:
                obj_index[obj] = len(objects)
                objects.append(obj)
            if "subject_group" in cols and row.get("subject_group"):
                sub_groups[subject] = row["subject_group"].strip()
            if "object_group" in cols and row.get("object_group"):
                obj_groups[obj] = row["object_group"].strip()
            if is_true:
                true_pairs.append((sub_index[subject], obj_index[obj]))
    if not subjects:
        raise ParseError(f"no statements in {path}")
    mask = np.zeros((len(subjects), len(objects)), dtype=bool)
    for i, j in true_pairs:
        mask[i, j] = True
    row_groups = [sub_groups.get(s, "") for s in subjects] if sub_groups else None
    col_groups = [obj_groups.get(o, "") for o in objects] if obj_groups else None
    return subjects, objects, mask, row_groups, col_groups


@main.command("eval-matrix")
@click.argument("snapshot", type=click.Path())
@click.argument("statements_csv", type=click.Path())
@_closure_option
@click.option("--out", required=True, type=click.Path(), help="Output directory.")
@_threads_option
@_ci_option
@_handle_errors
def eval_matrix(snapshot, statements_csv, closure, out, threads, case_insensitive):
    """Score a statement matrix and report ROC/AUROC."""
    graph = _load_graph(snapshot)
    csv_path = _locate(statements_csv)
    subjects, objects, mask, row_groups, col_groups = _read_statements_csv(csv_path)
    if not mask.any():
        raise ValidationError("no true statements: cannot compute a ROC curve")
    if mask.all():
        raise ValidationError("no false statements: cannot compute a ROC curve")
    n_jobs = _threads(threads)
    matrix = build_statement_matrix(
        graph, subjects, objects, mask, closure, case_insensitive, n_jobs
    )
    out_dir = Path(out)
    export_confusion_matrix(matrix, out_dir, row_groups, col_groups)
    roc = matrix.roc()
    roc.write_csv(out_dir / "roc.csv")
    config = {
        "subcommand": "eval-matrix",
        "snapshot": str(snapshot),
        "statements": str(statements_csv),
        "closure": Closure.coerce(closure).value,
        "case_insensitive": case_insensitive,
        "threads": n_jobs,
        "out": str(out),
    }
    report = {
        "config": config,
        "auroc": roc.auroc,
        "n_pos": roc.n_pos,
        "n_neg": roc.n_neg,
        "shape": [len(subjects), len(objects)],
    }
    write_json(out_dir / "report.json", report)
    click.echo(
        f"{len(subjects)}x{len(objects)} matrix, AUROC {roc.auroc:.4f} "
        f"({roc.n_pos} true / {roc.n_neg} false); outputs in {out_dir}"
    )


# ---------------------------------------------------------------------------
# eval-corpus


@main.command("eval-corpus")
@click.argument("snapshot", type=click.Path())
@click.argument("corpus_tsv", type=click.Path())
@_closure_option
@click.option("--out", required=True, type=click.Path(), help="Output directory.")
@click.option("--min-subject-degree", type=int, default=3, show_default=True)
@click.option(
    "--permutations",
    type=int,
    default=0,
    show_default=True,
    help="Monte-Carlo permutation p-values instead of asymptotic ones.",
)
@click.option("--seed", type=int, default=0, show_default=True)
@_threads_option
@_ci_option
@_handle_errors
def eval_corpus(
    snapshot,
    corpus_tsv,
    closure,
    out,
    min_subject_degree,
    permutations,
    seed,
    threads,
    case_insensitive,
):
    """Correlate truth values with human ratings from an annotated corpus."""
    graph = _load_graph(snapshot)
    bad_rows: list[str] = []
    statements = load_annotated_corpus(
        _locate(corpus_tsv), on_error=lambda exc: bad_rows.append(str(exc))
    )
    n_jobs = _threads(threads)
    result = evaluate_annotated_corpus(
        graph,
        statements,
        closure,
        min_subject_degree,
        case_insensitive,
        n_jobs,
        permutations,
        seed,
    )
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "corpus_scores.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["subject", "predicate", "object", "rating", "tau"])
        for st, tau in zip(result.statements, result.taus):
            writer.writerow([st.subject, st.predicate, st.object, st.rating, f"{tau:.12g}"])
    config = {
        "subcommand": "eval-corpus",
        "snapshot": str(snapshot),
        "corpus": str(corpus_tsv),
        "closure": Closure.coerce(closure).value,
        "min_subject_degree": min_subject_degree,
        "permutations": permutations,
        "seed": seed,
        "case_insensitive": case_insensitive,
        "threads": n_jobs,
        "out": str(out),
    }
    payload = {
        "config": config,
        "malformed_rows": len(bad_rows),
        **result.to_dict(),
    }
    write_json(out_dir / "report.json", payload)
    cr = result.correlations
    click.echo(
        f"n={cr.n}: spearman rho={cr.spearman_rho:.4f} (p={cr.spearman_p:.2e}), "
        f"kendall tau={cr.kendall_tau:.4f} (p={cr.kendall_p:.2e}); outputs in {out_dir}"
    )


# ---------------------------------------------------------------------------
# calibrate


def _read_roster_csv(path: Path) -> tuple[list[str], list[str]]:
    entities: list[str] = []
    labels: list[str] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        cols = set(reader.fieldnames or ())
        if not {"entity_name", "label"} <= cols:
            raise ParseError(
                f"roster CSV needs columns ['entity_name', 'label'], got {sorted(cols)}"
            )
        for lineno, row in enumerate(reader, start=2):
            name = (row["entity_name"] or "").strip()
            label = (row["label"] or "").strip()
            if not name or not label:
                raise ParseError("empty entity_name or label", line_number=lineno)
            entities.append(name)
            labels.append(label)
    if not entities:
        raise ParseError(f"no rows in roster {path}")
    return entities, labels


@main.command()
@click.argument("snapshot", type=click.Path())
@click.argument("roster_csv", type=click.Path())
@click.option(
    "--targets",
    "target_concept",
    required=True,
    help="Concept whose linked nodes become feature columns (e.g. Ideology).",
)
@click.option("--grid", is_flag=True, help="Run all closure x directedness combinations.")
@_closure_option
@click.option("--compare-infobox", is_flag=True, help="Also score direct-edge-only features.")
@click.option("--folds", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--k", type=int, default=5, show_default=True, help="k-NN neighbors.")
@click.option("--trees", type=int, default=100, show_default=True, help="Forest size.")
@click.option("--out", type=click.Path(), default="calibration_report.json", show_default=True)
@_threads_option
@_ci_option
@_handle_errors
def calibrate(
    snapshot,
    roster_csv,
    target_concept,
    grid,
    closure,
    compare_infobox,
    folds,
    seed,
    k,
    trees,
    out,
    threads,
    case_insensitive,
):
    """Train k-NN / random-forest classifiers on truth-value features."""
    graph = _load_graph(snapshot)
    entities, labels = _read_roster_csv(_locate(roster_csv))
    if grid and not graph.directed:
        raise ValidationError(
            "--grid needs a directed snapshot (the undirected view is derived "
            "from it; orientation cannot be recovered from an undirected one)"
        )

    resolved: list[tuple[str, str]] = []
    unresolved: list[str] = []
    lookup = graph.dictionary.id_of_fold if case_insensitive else graph.dictionary.id_of
    for name, label in zip(entities, labels):
        if lookup(name) is None:
            unresolved.append(name)
        else:
            resolved.append((name, label))
    if len(resolved) < 0.8 * len(entities):
        raise ResolutionError(
            unresolved,
            {m: graph.dictionary.suggest(m) for m in unresolved[:5]},
        )
    kept_entities = [name for name, _ in resolved]
    kept_labels = [label for _, label in resolved]

    target_names = resolve_targets(graph, target_concept, case_insensitive)
    if not target_names:
        raise ValidationError(f"concept {target_concept!r} has no linked targets")

    n_jobs = _threads(threads)
    fold_spec = FoldSpec(n_folds=folds, seed=seed)

    def run_cell(g: KnowledgeGraph, cell_closure: Closure) -> dict:
        if compare_infobox:
            comparison = compare_modes(
                g,
                kept_entities,
                kept_labels,
                target_names,
                cell_closure,
                fold_spec,
                k,
                trees,
                seed,
                case_insensitive,
                n_jobs,
            )
            return comparison.to_dict()
        fm = build_feature_matrix(
            g,
            kept_entities,
            target_names,
            FeatureMode.TRANSITIVE_CLOSURE,
            cell_closure,
            case_insensitive,
            n_jobs,
        )
        return {
            "knn": knn_classify(fm.values, kept_labels, k, fold_spec).to_dict(),
            "random_forest": random_forest_classify(
                fm.values, kept_labels, trees, fold_spec, seed
            ).to_dict(),
        }

    config = {
        "subcommand": "calibrate",
        "snapshot": str(snapshot),
        "roster": str(roster_csv),
        "target_concept": target_concept,
        "grid": grid,
        "closure": Closure.coerce(closure).value,
        "compare_infobox": compare_infobox,
        "folds": folds,
        "seed": seed,
        "k": k,
        "trees": trees,
        "case_insensitive": case_insensitive,
        "threads": n_jobs,
        "out": str(out),
    }
    payload = {
        "config": config,
        "n_entities": len(kept_entities),
        "n_targets": len(target_names),
        "unresolved": sorted(unresolved),
        # slot for an externally computed reference score vector (e.g. a
        # roll-call-based political model); never filled by this tool
        "external_baseline": None,
    }
    if grid:
        cells: dict = {}
        for directedness, g in (
            ("directed", graph),
            ("undirected", graph.to_undirected()),
        ):
            cells[directedness] = {
                c.value: run_cell(g, c) for c in (Closure.METRIC, Closure.ULTRAMETRIC)
            }
        payload["grid"] = cells
    else:
        payload["result"] = run_cell(graph, Closure.coerce(closure))
        payload["directedness"] = graph.directedness
    write_json(out, payload)
    click.echo(
        f"calibrated {len(kept_entities)} entities x {len(target_names)} targets; "
        f"report {out}"
    )


# ---------------------------------------------------------------------------
# stats


@main.command()
@click.argument("snapshot", type=click.Path())
@_handle_errors
def stats(snapshot):
    """Print graph statistics as JSON."""
    graph = _load_graph(snapshot)
    click.echo(graph.stats().to_json())


if __name__ == "__main__":
    main()
