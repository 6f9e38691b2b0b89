"""Shared fixtures-in-code: small graphs, random graphs, synthetic corpora."""

from __future__ import annotations

import numpy as np

from factgraph import EdgeListBuilder, build_graph


def make_graph(pairs, directed=False, extra_nodes=0, names=None):
    """Graph from (name, name) or (int, int) pairs.

    Integer pairs get auto names "v0".."vN". ``extra_nodes`` appends that
    many isolated nodes after the ones appearing in edges.
    """
    pairs = list(pairs)
    if pairs and isinstance(pairs[0][0], int):
        n = max((max(u, v) for u, v in pairs), default=-1) + 1
        pairs = [(f"v{u}", f"v{v}") for u, v in pairs]
        names = names or [f"v{i}" for i in range(n)]
    builder = EdgeListBuilder(directed=directed)
    if names:
        for name in names:
            builder.dictionary.intern(name)
    for s, o in pairs:
        builder.add(s, o)
    for i in range(extra_nodes):
        builder.dictionary.intern(f"isolated{i}")
    return build_graph(builder.build())


def fixture_graph():
    """The 6-edge reference graph: two s-o routes with distinct optima.

    Direct route via a (degree 3) wins the summed-cost closure; the longer
    route via b, c (degree 2 each) wins the bottleneck closure.
    """
    names = ["s", "a", "o", "x", "b", "c"]
    pairs = [("s", "a"), ("a", "o"), ("a", "x"), ("s", "b"), ("b", "c"), ("c", "o")]
    graph = make_graph(pairs, names=names)
    idx = {name: graph.dictionary.id_of(name) for name in names}
    return graph, idx


def random_graph(rng, n, p=0.3, directed=False):
    """Erdos-Renyi style graph with exactly n nodes (isolated ones kept)."""
    pairs = []
    for u in range(n):
        for v in range(n):
            if u == v:
                continue
            if not directed and u > v:
                continue
            if rng.random() < p:
                pairs.append((u, v))
    names = [f"v{i}" for i in range(n)]
    builder = EdgeListBuilder(directed=directed)
    for name in names:
        builder.dictionary.intern(name)
    for u, v in pairs:
        builder.add(names[u], names[v])
    return build_graph(builder.build())


def capitals_fixture(n_pairs=50, hub_extra=0):
    """Synthetic capitals-like KG for the discrimination test.

    True pairs (city_i, country_i) are directly linked and also linked via
    a dedicated degree-2 intermediate; every city and country additionally
    hangs off one shared high-degree hub, so false pairs connect only
    through the hub.
    """
    builder = EdgeListBuilder(directed=False)
    subjects = [f"city{i}" for i in range(n_pairs)]
    objects = [f"country{i}" for i in range(n_pairs)]
    for i in range(n_pairs):
        builder.add(subjects[i], objects[i])
        builder.add(subjects[i], f"link{i}")
        builder.add(f"link{i}", objects[i])
        builder.add(subjects[i], "hub")
        builder.add(objects[i], "hub")
    for i in range(hub_extra):
        builder.add("hub", f"filler{i}")
    graph = build_graph(builder.build())
    mask = np.eye(n_pairs, dtype=bool)
    return graph, subjects, objects, mask


def write_capitals_tsv(path, n_pairs=50):
    """The same synthetic KG as a 2-column TSV edge list."""
    lines = []
    for i in range(n_pairs):
        lines.append(f"city{i}\tcountry{i}")
        lines.append(f"city{i}\tlink{i}")
        lines.append(f"link{i}\tcountry{i}")
        lines.append(f"city{i}\thub")
        lines.append(f"country{i}\thub")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def separated_clusters(n=200, dim=4, spread=1.0, gap=10.0, seed=7):
    """Two well-separated Gaussian blobs with string labels."""
    rng = np.random.default_rng(seed)
    half = n // 2
    a = rng.normal(0.0, spread, size=(half, dim))
    b = rng.normal(gap, spread, size=(n - half, dim))
    X = np.vstack([a, b])
    y = np.array(["neg"] * half + ["pos"] * (n - half))
    order = rng.permutation(n)
    return X[order], y[order]
