from concurrent.futures import ThreadPoolExecutor

import pytest
from hypothesis import given
from hypothesis import strategies as st

from factgraph import EntityDictionary

names_strategy = st.lists(
    st.text(min_size=1).filter(lambda s: s.strip() != ""), min_size=1, max_size=30
)


def test_first_seen_order():
    d = EntityDictionary()
    assert d.intern("b") == 0
    assert d.intern("a") == 1
    assert d.intern("b") == 0
    assert len(d) == 2
    assert d.names == ["b", "a"]


@given(names_strategy)
def test_round_trip(names):
    d = EntityDictionary()
    for name in names:
        eid = d.intern(name)
        assert d.name_of(eid) == name
        assert d.id_of(name) == eid
    assert len(d) == len(set(names))


def test_missing_and_contains():
    d = EntityDictionary(["x"])
    assert d.id_of("y") is None
    assert "x" in d and "y" not in d
    assert list(d) == ["x"]


def test_empty_name_rejected():
    with pytest.raises(ValueError):
        EntityDictionary().intern("")


def test_case_insensitive_fallback():
    d = EntityDictionary(["Rome", "ROME", "Paris"])
    assert d.id_of_fold("rome") == 0  # first interned casing wins
    assert d.id_of_fold("ROME") == 1  # exact match beats folding
    assert d.id_of_fold("paris") == 2
    assert d.id_of_fold("berlin") is None


def test_suggest_prefix():
    d = EntityDictionary(["Barack Obama", "Barack Obama Sr.", "Mitt Romney"])
    assert "Barack Obama" in d.suggest("Barack")
    assert d.suggest("zzz") == []


def test_concurrent_intern_is_consistent():
    d = EntityDictionary()
    pool_names = [f"name{i % 50}" for i in range(2000)]

    def work(chunk):
        return [d.intern(n) for n in chunk]

    with ThreadPoolExecutor(max_workers=8) as pool:
        chunks = [pool_names[i::8] for i in range(8)]
        list(pool.map(work, chunks))

    assert len(d) == 50
    for name in set(pool_names):
        assert d.name_of(d.id_of(name)) == name
