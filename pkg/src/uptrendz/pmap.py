"""Copy-on-write sharded immutable mapping.

Snapshot isolation for the catalog store works by evolving immutable state
and publishing it with a single reference swap. A full dict copy per write
would make ingestion quadratic, so this map shards its entries into buckets
and copies only the touched bucket (plus the small bucket table) per write.
Readers share everything else.

Equality is content-based (bucket dicts compare order-independently), which
is what the crash-recovery equality check relies on.
"""

from __future__ import annotations

from typing import Any, Iterator


class PMap:
    """Immutable mapping with O(n / shards) copy cost per update."""

    __slots__ = ("_buckets", "_size", "_shards")

    def __init__(self, shards: int = 32, _buckets=None, _size: int = 0):
        self._shards = shards
        self._buckets = _buckets if _buckets is not None else (None,) * shards
        self._size = _size

    def _index(self, key) -> int:
        return hash(key) % self._shards

    def get(self, key, default=None):
        bucket = self._buckets[self._index(key)]
        if bucket is None:
            return default
        return bucket.get(key, default)

    def __getitem__(self, key):
        bucket = self._buckets[self._index(key)]
        if bucket is None:
            raise KeyError(key)
        return bucket[key]

    def __contains__(self, key) -> bool:
        bucket = self._buckets[self._index(key)]
        return bucket is not None and key in bucket

    def __len__(self) -> int:
        return self._size

    def __iter__(self) -> Iterator:
        for bucket in self._buckets:
            if bucket:
                yield from bucket

    def items(self) -> Iterator[tuple[Any, Any]]:
        for bucket in self._buckets:
            if bucket:
                yield from bucket.items()

    def values(self) -> Iterator:
        for bucket in self._buckets:
            if bucket:
                yield from bucket.values()

    def keys(self) -> Iterator:
        return iter(self)

    def set(self, key, value) -> "PMap":
        idx = self._index(key)
        old = self._buckets[idx]
        bucket = dict(old) if old else {}
        grew = key not in bucket
        bucket[key] = value
        buckets = self._buckets[:idx] + (bucket,) + self._buckets[idx + 1 :]
        return PMap(self._shards, buckets, self._size + (1 if grew else 0))

    def delete(self, key) -> "PMap":
        idx = self._index(key)
        old = self._buckets[idx]
        if not old or key not in old:
            return self
        bucket = dict(old)
        del bucket[key]
        buckets = self._buckets[:idx] + (bucket or None,) + self._buckets[idx + 1 :]
        return PMap(self._shards, buckets, self._size - 1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PMap):
            return NotImplemented
        if self._size != other._size:
            return False
        if self._shards == other._shards:
            return all(
                (a or {}) == (b or {}) for a, b in zip(self._buckets, other._buckets)
            )
        return dict(self.items()) == dict(other.items())

    __hash__ = None  # mutable-dict-style equality

    def __repr__(self) -> str:
        return f"PMap({dict(self.items())!r})"


EMPTY = PMap()


def pmap_from(mapping: dict, shards: int = 32) -> PMap:
    """Bulk-build a PMap (cheaper than chained ``set`` calls)."""
    buckets: list = [None] * shards
    for key, value in mapping.items():
        idx = hash(key) % shards
        if buckets[idx] is None:
            buckets[idx] = {}
        buckets[idx][key] = value
    return PMap(shards, tuple(buckets), len(mapping))
