import gzip

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from factgraph import (
    EdgeListBuilder,
    FilterConfig,
    ParseError,
    RawTriple,
    ValidationError,
    apply_filters,
    build_edge_list,
    ingest_sources,
    load_annotated_corpus,
    parse_ntriples,
    read_tsv_edges,
)

DB = "http://dbpedia.org/resource/"


# ---------------------------------------------------------------------------
# N-Triples parsing


def test_parse_minimal_line():
    (t,) = parse_ntriples(["<a> <p> <b> ."])
    assert t == RawTriple("a", "p", "b")


def test_parse_literal_with_datatype_tag():
    line = f'<{DB}Aristotle> <{DB}birthYear> "384"^^<http://www.w3.org/2001/XMLSchema#gYear> .'
    (t,) = parse_ntriples([line])
    assert t.object_is_literal
    assert t.object == "384"
    assert t.object_datatype.endswith("gYear")


def test_parse_plain_and_lang_literals():
    (t1,) = parse_ntriples(['<a> <p> "hello" .'])
    assert t1.object_is_literal and t1.object_datatype is None
    (t2,) = parse_ntriples(['<a> <p> "hallo"@de .'])
    assert t2.object_is_literal and t2.object_datatype == "de"


def test_parse_blank_nodes_pass_through():
    (t,) = parse_ntriples(["_:b1 <p> _:b2 ."])
    assert t.subject == "_:b1" and t.object == "_:b2"


def test_malformed_line_raises_with_line_number():
    with pytest.raises(ParseError) as exc:
        list(parse_ntriples(["<a> <p> <b> .", "<a> <p>"]))
    assert exc.value.line_number == 2


def test_malformed_line_recoverable_stream_continues():
    errors = []
    triples = list(
        parse_ntriples(
            ["<a> <p> <b> .", "<a> <p>", "<c> <p> <d> ."], on_error=errors.append
        )
    )
    assert [t.subject for t in triples] == ["a", "c"]
    assert len(errors) == 1 and errors[0].line_number == 2


def test_comments_and_blank_lines_skipped():
    lines = ["# comment", "", "  ", "<a> <p> <b> .  # trailing"]
    assert len(list(parse_ntriples(lines))) == 1


def test_empty_terms_rejected():
    for line in ["<> <p> <b> .", "<a> <> <b> .", "<a> <p> <> .", '<a> <p> "" .']:
        with pytest.raises(ParseError):
            list(parse_ntriples([line]))


def test_parser_totality_over_wellformed_fixture():
    k = 57
    lines = [f"<s{i}> <p> <o{i}> ." for i in range(k)]
    triples = list(parse_ntriples(lines))
    assert len(triples) == k
    assert [t.subject for t in triples] == [f"s{i}" for i in range(k)]


# ---------------------------------------------------------------------------
# Filters


def test_filter_drops_literal_object():
    t = RawTriple(f"{DB}Aristotle", "birthYear", "384 B.C.", object_is_literal=True)
    decision = apply_filters(t, FilterConfig())
    assert not decision.keep and decision.reason == "literal_object"


def test_filter_drops_external_namespace():
    cfg = FilterConfig(allowed_namespaces=frozenset([DB]))
    t = RawTriple(f"{DB}X", "type", "http://xmlns.com/foaf/0.1/Person")
    decision = apply_filters(t, cfg)
    assert not decision.keep and decision.reason == "external_namespace"


def test_filter_keeps_in_namespace_pair():
    cfg = FilterConfig(allowed_namespaces=frozenset([DB]))
    t = RawTriple(f"{DB}Rome", "capitalOf", f"{DB}Italy")
    assert apply_filters(t, cfg).keep


def test_filter_no_namespace_filtering_by_default():
    t = RawTriple("anything", "p", "goes")
    assert apply_filters(t, FilterConfig()).keep


def test_filter_empty_namespace_set_rejected():
    with pytest.raises(ValidationError):
        FilterConfig(allowed_namespaces=frozenset())


@given(
    st.sets(st.sampled_from(["a/", "b/", "c/", "d/"]), min_size=1, max_size=4),
    st.tuples(
        st.sampled_from(["a/x", "b/y", "c/z", "d/w", "e/v"]),
        st.sampled_from(["a/x", "b/y", "c/z", "d/w", "e/v"]),
    ),
)
def test_filter_monotone_in_namespaces(namespaces, pair):
    """Anything dropped under a namespace set stays dropped under subsets."""
    t = RawTriple(pair[0], "p", pair[1])
    big = FilterConfig(allowed_namespaces=frozenset(namespaces))
    if not apply_filters(t, big).keep:
        for ns in namespaces:
            small = FilterConfig(allowed_namespaces=frozenset({ns}))
            assert not apply_filters(t, small).keep


# ---------------------------------------------------------------------------
# Edge list building


def _t(s, o):
    return RawTriple(s, "p", o)


def test_conflation_same_subject_object():
    el = build_edge_list([_t("a", "b"), RawTriple("a", "q", "b")])
    assert el.edges.shape == (1, 2)


def test_empty_input():
    el = build_edge_list([])
    assert el.edges.shape == (0, 2)
    assert len(el.dictionary) == 0


def test_undirected_conflates_reversed_pair():
    # brute-force reference: set of frozensets
    triples = [_t("a", "b"), _t("b", "a")]
    expected = {frozenset(("a", "b"))}
    el = build_edge_list(triples, directed=False)
    got = {
        frozenset((el.dictionary.name_of(u), el.dictionary.name_of(v)))
        for u, v in el.edges
    }
    assert got == expected


def test_directed_keeps_both_orientations():
    el = build_edge_list([_t("a", "b"), _t("b", "a")], directed=True)
    assert el.edges.shape == (2, 2)


def test_self_loops_dropped():
    builder = EdgeListBuilder()
    assert not builder.add("a", "a")
    el = builder.build()
    assert el.edges.shape == (0, 2)
    assert builder.self_loops == 1
    # the name is still interned
    assert "a" in el.dictionary


@given(
    st.lists(
        st.tuples(st.sampled_from("abcdef"), st.sampled_from("abcdef")),
        max_size=25,
    ),
    st.booleans(),
)
def test_conflation_idempotent(pairs, directed):
    triples = [_t(s, o) for s, o in pairs]
    once = build_edge_list(triples, directed=directed)
    twice = build_edge_list(triples + triples, directed=directed)
    assert np.array_equal(once.edges, twice.edges)
    assert once.dictionary.names == twice.dictionary.names


def test_first_seen_interning_order():
    el = build_edge_list([_t("z", "y"), _t("x", "z")])
    assert el.dictionary.names == ["z", "y", "x"]


# ---------------------------------------------------------------------------
# TSV fast path


def test_read_tsv_edges():
    rows = list(read_tsv_edges(["a\tb", "# comment", "", "c\td"]))
    assert rows == [("a", "b"), ("c", "d")]


def test_read_tsv_bad_column_count():
    with pytest.raises(ParseError) as exc:
        list(read_tsv_edges(["a\tb\tc"]))
    assert exc.value.line_number == 1


# ---------------------------------------------------------------------------
# Annotated corpus


HEADER = "subject\tpredicate\tobject\tr1\tr2\tr3\tr4\tr5"


def test_corpus_all_yes_gives_plus_five():
    rows = [HEADER, "A\tdegree\tB\tYes\tYes\tYes\tYes\tYes"]
    (st_,) = load_annotated_corpus(rows)
    assert st_.rating == 5


def test_corpus_all_no_gives_minus_five():
    rows = [HEADER, "A\tdegree\tB\tNo\tNo\tNo\tNo\tNo"]
    (st_,) = load_annotated_corpus(rows)
    assert st_.rating == -5


def test_corpus_mixed_counts():
    rows = [HEADER, "A\tdegree\tB\tYes\tYes\tYes\tNo\tNo"]
    (st_,) = load_annotated_corpus(rows)
    assert st_.rating == 1


def test_corpus_abstain_not_counted():
    rows = [HEADER, "A\tdegree\tB\tYes\tabstain\tabstain\tabstain\tNo"]
    (st_,) = load_annotated_corpus(rows)
    assert st_.rating == 0


def test_corpus_wrong_column_count_reports_row():
    rows = [HEADER, "A\tdegree\tB\tYes\tYes"]
    with pytest.raises(ParseError) as exc:
        load_annotated_corpus(rows)
    assert exc.value.line_number == 2


def test_corpus_bad_header():
    with pytest.raises(ParseError):
        load_annotated_corpus(["subject\tobject", "A\tB"])


def test_corpus_unknown_token_skippable():
    rows = [HEADER, "A\tp\tB\tYes\tmaybe\tNo\tNo\tNo", "C\tp\tD\tYes\tYes\tYes\tYes\tNo"]
    errors = []
    stmts = load_annotated_corpus(rows, on_error=errors.append)
    assert len(stmts) == 1 and stmts[0].subject == "C"
    assert len(errors) == 1 and errors[0].line_number == 2


# ---------------------------------------------------------------------------
# Source orchestration


def test_ingest_sources_mixed(tmp_path):
    nt = tmp_path / "facts.nt"
    nt.write_text(
        "\n".join(
            [
                "<a> <p> <b> .",
                "<a> <q> <b> .",  # conflated
                '<a> <born> "384"^^<gYear> .',  # literal drop
                "<b> <p> <c> .",
                "<a> <p> <a> .",  # self loop
                "bad line",
            ]
        )
        + "\n",
        encoding="utf-8",
    )
    tsv = tmp_path / "extra.tsv.gz"
    with gzip.open(tsv, "wt", encoding="utf-8") as fh:
        fh.write("c\td\na\tb\n")  # second pair duplicates the .nt edge

    edge_list, report = ingest_sources([nt, tsv])
    assert report.triples_read == 7  # 5 parsed triples + 2 tsv rows
    assert report.parse_errors == 1
    assert report.dropped == {"literal_object": 1}
    assert report.self_loops == 1
    assert report.duplicate_pairs == 2
    assert report.edges == 3  # a-b, b-c, c-d
    assert report.nodes == 4
    payload = report.to_dict()
    assert payload["edges"] == 3 and payload["sources"] == [str(nt), str(tsv)]


def test_ingest_sources_strict_aborts(tmp_path):
    nt = tmp_path / "bad.nt"
    nt.write_text("nonsense\n", encoding="utf-8")
    with pytest.raises(ParseError):
        ingest_sources([nt], skip_malformed=False)


def test_ingest_progress_callback(tmp_path, monkeypatch):
    import factgraph.ingest as ingest_mod

    monkeypatch.setattr(ingest_mod, "PROGRESS_EVERY", 10)
    tsv = tmp_path / "edges.tsv"
    tsv.write_text("".join(f"a{i}\tb{i}\n" for i in range(35)), encoding="utf-8")
    seen = []
    ingest_sources([tsv], progress=lambda count, source: seen.append(count))
    assert seen == [10, 20, 30]
