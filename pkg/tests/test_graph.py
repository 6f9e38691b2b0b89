import time

import numpy as np
import pytest
from helpers import make_graph, random_graph

from factgraph import (
    EdgeExclusion,
    KnowledgeGraph,
    SnapshotError,
    ValidationError,
    build_graph,
    ingest_sources,
)
from factgraph.ingest import EdgeList, EdgeListBuilder


def test_path_graph_degrees_undirected():
    g = make_graph([(0, 1), (1, 2)])
    assert g.degrees.tolist() == [1, 2, 1]


def test_path_graph_degrees_directed_total_participation():
    g = make_graph([(0, 1), (1, 2)], directed=True)
    # node 1 participates in one in-edge and one out-edge
    assert g.degree(1) == 2
    assert g.degrees.tolist() == [1, 2, 1]


def test_empty_graph():
    g = make_graph([])
    assert g.node_count == 0 and g.edge_count == 0
    s = g.stats()
    assert s.node_count == 0 and s.edge_count == 0 and s.connected_components == 0


def test_neighbors_and_exclusion():
    g = make_graph([(0, 1), (1, 2)])
    assert list(g.neighbors(1)) == [0, 2]
    assert list(g.neighbors(1, EdgeExclusion([(1, 2)]))) == [0]
    assert list(g.neighbors(1, [(2, 1)])) == [0]  # unordered in undirected mode


def test_neighbors_isolated_node():
    g = make_graph([(0, 1)], extra_nodes=1)
    assert list(g.neighbors(2)) == []
    assert g.degree(2) == 0


def test_neighbors_directed_out_only():
    g = make_graph([(0, 1), (2, 1)], directed=True)
    assert list(g.neighbors(0)) == [1]
    assert list(g.neighbors(1)) == []
    assert g.in_neighbors(1).tolist() == [0, 2]


def test_out_of_range_node_errors():
    g = make_graph([(0, 1)])
    with pytest.raises(ValidationError):
        list(g.neighbors(5))
    with pytest.raises(ValidationError):
        g.degree(-1)
    with pytest.raises(ValidationError):
        g.has_edge(0, 9)


def test_has_edge():
    g = make_graph([(0, 1), (1, 2)])
    assert g.has_edge(0, 1) and g.has_edge(1, 0)
    assert not g.has_edge(0, 2)
    assert not g.has_edge(0, 1, EdgeExclusion([(0, 1)]))
    gd = make_graph([(0, 1)], directed=True)
    assert gd.has_edge(0, 1) and not gd.has_edge(1, 0)


def test_hub_degree():
    g = make_graph([(0, i) for i in range(1, 6)])
    assert g.degree(0) == 5


def test_stats_three_node_path():
    s = make_graph([(0, 1), (1, 2)]).stats()
    assert s.node_count == 3 and s.edge_count == 2
    assert s.connected_components == 1
    assert s.degree_max == 2 and s.degree_min == 1
    assert s.degree_mean == pytest.approx(4 / 3)


def test_stats_components_and_json():
    g = make_graph([(0, 1), (2, 3)])
    s = g.stats()
    assert s.connected_components == 2
    assert '"edge_count": 2' in s.to_json()


def test_degree_sum_identity():
    rng = np.random.default_rng(3)
    for directed in (False, True):
        for _ in range(20):
            g = random_graph(rng, int(rng.integers(2, 12)), 0.4, directed)
            factor = 2  # every edge contributes two participations
            assert g.degrees.sum() == factor * g.edge_count


def test_exclusion_locality():
    rng = np.random.default_rng(4)
    for _ in range(20):
        g = random_graph(rng, 8, 0.4)
        exc = EdgeExclusion([(1, 2), (3, 4)])
        for v in range(g.node_count):
            base = set(g.neighbors(v))
            seen = set(g.neighbors(v, exc))
            diff = base - seen
            assert seen <= base
            for w in diff:
                assert exc.blocks(v, w)


def test_build_determinism():
    pairs = [(0, 1), (1, 2), (2, 3), (0, 3), (1, 3)]
    g1 = make_graph(pairs)
    g2 = make_graph(pairs)
    assert np.array_equal(g1.csr[0], g2.csr[0])
    assert np.array_equal(g1.csr[1], g2.csr[1])


def test_adjacency_sorted_and_symmetric():
    rng = np.random.default_rng(5)
    g = random_graph(rng, 10, 0.5)
    for v in range(g.node_count):
        nbrs = list(g.neighbors(v))
        assert nbrs == sorted(nbrs)
        for w in nbrs:
            assert v in set(g.neighbors(w))


def test_build_rejects_out_of_range_edge():
    from factgraph import EntityDictionary

    el = EdgeList(EntityDictionary(["a", "b"]), np.array([[0, 5]]), directed=False)
    with pytest.raises(ValidationError):
        build_graph(el)


def test_build_directed_from_undirected_list_rejected():
    builder = EdgeListBuilder(directed=False)
    builder.add("a", "b")
    with pytest.raises(ValidationError):
        build_graph(builder.build(), directed=True)


def test_undirected_from_directed_list_conflates():
    builder = EdgeListBuilder(directed=True)
    builder.add("a", "b")
    builder.add("b", "a")
    g = build_graph(builder.build(), directed=False)
    assert g.edge_count == 1


def test_to_undirected_view():
    g = make_graph([(0, 1), (1, 0), (1, 2)], directed=True)
    u = g.to_undirected()
    assert not u.directed
    assert u.edge_count == 2
    assert list(u.neighbors(1)) == [0, 2]
    assert u.degree(1) == 2


def test_exclusion_normalization():
    e = EdgeExclusion([(5, 2), (2, 5), (1, 3)])
    assert len(e) == 2
    assert e.blocks(2, 5) and e.blocks(5, 2)
    d = EdgeExclusion([(5, 2)], directed=True)
    assert d.blocks(5, 2) and not d.blocks(2, 5)


def test_exclusion_directedness_mismatch_rejected():
    g = make_graph([(0, 1)])
    with pytest.raises(ValidationError):
        list(g.neighbors(0, EdgeExclusion([(0, 1)], directed=True)))


def test_graph_pickles_cleanly():
    import pickle

    g = make_graph([("alpha", "beta"), ("beta", "gamma")])
    clone = pickle.loads(pickle.dumps(g))
    assert clone.dictionary.names == g.dictionary.names
    assert clone.dictionary.id_of("beta") == 1
    assert np.array_equal(clone.csr[1], g.csr[1])
    assert list(clone.neighbors(1)) == list(g.neighbors(1))


# ---------------------------------------------------------------------------
# Snapshot format


def test_snapshot_round_trip(tmp_path):
    for directed in (False, True):
        g = make_graph(
            [("alpha", "beta"), ("beta", "gamma"), ("alpha", "gamma")],
            directed=directed,
        )
        path = tmp_path / f"g{int(directed)}.vkg"
        g.save(path)
        assert path.read_bytes()[:4] == b"VKG1"
        loaded = KnowledgeGraph.load(path)
        assert loaded.directed == directed
        assert loaded.node_count == g.node_count
        assert loaded.edge_count == g.edge_count
        assert loaded.dictionary.names == g.dictionary.names
        assert np.array_equal(loaded.csr[0], g.csr[0])
        assert np.array_equal(loaded.csr[1], g.csr[1])
        assert np.array_equal(loaded.degrees, g.degrees)


def test_snapshot_unicode_names(tmp_path):
    g = make_graph([("Zürich", "Škoda"), ("Škoda", "東京")])
    path = tmp_path / "u.vkg"
    g.save(path)
    assert KnowledgeGraph.load(path).dictionary.names == g.dictionary.names


def test_snapshot_bad_magic(tmp_path):
    path = tmp_path / "bad.vkg"
    path.write_bytes(b"NOPE" + b"\x00" * 40)
    with pytest.raises(SnapshotError):
        KnowledgeGraph.load(path)


def test_snapshot_truncated(tmp_path):
    g = make_graph([(0, 1), (1, 2)])
    path = tmp_path / "t.vkg"
    g.save(path)
    (tmp_path / "cut.vkg").write_bytes(path.read_bytes()[:-8])
    with pytest.raises(SnapshotError):
        KnowledgeGraph.load(tmp_path / "cut.vkg")


def test_snapshot_missing_file():
    with pytest.raises(SnapshotError):
        KnowledgeGraph.load("/nonexistent/path.vkg")


def test_snapshot_load_much_faster_than_reingest(tmp_path):
    """Loading the binary snapshot must beat re-parsing the N-Triples 10x."""
    nt = tmp_path / "big.nt"
    rng = np.random.default_rng(11)
    lines = []
    for _ in range(30000):
        u, v = rng.integers(0, 4000, size=2)
        lines.append(f"<http://x/e{u}> <http://x/p> <http://x/e{v}> .")
    nt.write_text("\n".join(lines) + "\n", encoding="utf-8")

    def ingest_once():
        el, _ = ingest_sources([nt])
        return build_graph(el)

    snap = tmp_path / "big.vkg"
    ingest_once().save(snap)

    t_ingest = min(_timed(ingest_once) for _ in range(3))
    t_load = min(_timed(lambda: KnowledgeGraph.load(snap)) for _ in range(3))
    assert t_load * 10 < t_ingest, f"load {t_load:.4f}s vs ingest {t_ingest:.4f}s"


def _timed(fn):
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start
