"""The persistent map must behave exactly like a dict while old references
stay frozen."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uptrendz.pmap import PMap, pmap_from


def test_empty():
    m = PMap()
    assert len(m) == 0
    assert m.get("x") is None
    assert "x" not in m
    assert list(m) == []


def test_set_get_delete():
    m0 = PMap()
    m1 = m0.set("a", 1)
    m2 = m1.set("b", 2)
    m3 = m2.set("a", 10)
    assert len(m0) == 0 and len(m1) == 1 and len(m2) == 2 and len(m3) == 2
    assert m1["a"] == 1
    assert m3["a"] == 10 and m3["b"] == 2
    m4 = m3.delete("a")
    assert "a" not in m4 and "a" in m3
    assert m4.delete("missing") is m4


def test_old_snapshots_unchanged():
    m = pmap_from({"x": 1, "y": 2})
    before = dict(m.items())
    m2 = m.set("x", 100).set("z", 3).delete("y")
    assert dict(m.items()) == before
    assert dict(m2.items()) == {"x": 100, "z": 3}


def test_equality_is_content_based():
    a = PMap().set("k1", 1).set("k2", 2)
    b = PMap().set("k2", 2).set("k1", 1)
    assert a == b
    assert a != b.set("k3", 3)
    assert pmap_from({"k1": 1, "k2": 2}, shards=8) == a


def test_bulk_build_matches_incremental():
    data = {f"key{i}": i for i in range(200)}
    incremental = PMap()
    for key, value in data.items():
        incremental = incremental.set(key, value)
    assert pmap_from(data) == incremental
    assert dict(pmap_from(data).items()) == data


@settings(max_examples=200, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.sampled_from(["set", "delete"]),
            st.integers(min_value=0, max_value=30),
            st.integers(),
        ),
        max_size=60,
    )
)
def test_behaves_like_dict(ops):
    model: dict = {}
    m = PMap(shards=4)
    for op, key, value in ops:
        if op == "set":
            model[key] = value
            m = m.set(key, value)
        else:
            model.pop(key, None)
            m = m.delete(key)
    assert dict(m.items()) == model
    assert len(m) == len(model)
    assert sorted(m.values()) == sorted(model.values())
    for key in model:
        assert m[key] == model[key]
    with pytest.raises(KeyError):
        m[10**9]
