"""String-to-id interning for graph entities."""

from __future__ import annotations

import threading
from typing import Iterable, Iterator


class EntityDictionary:
    """Bidirectional mapping between entity names and dense integer ids.

    Ids are assigned in first-seen order starting at 0. Interning is an
    atomic get-or-insert so concurrent parsers may share one dictionary.
    """

    __slots__ = ("_names", "_ids", "_lock", "_lower")

    def __init__(self, names: Iterable[str] = ()):
        self._names: list[str] = []
        self._ids: dict[str, int] = {}
        self._lock = threading.Lock()
        self._lower: dict[str, int] | None = None
        for name in names:
            self.intern(name)

    def intern(self, name: str) -> int:
        """Return the id for ``name``, inserting it if unseen."""
        if not name:
            raise ValueError("entity name must be non-empty")
        ids = self._ids
        eid = ids.get(name)
        if eid is not None:
            return eid
        with self._lock:
            eid = ids.get(name)
            if eid is None:
                eid = len(self._names)
                self._names.append(name)
                ids[name] = eid
                self._lower = None
        return eid

    def id_of(self, name: str) -> int | None:
        """Id for ``name`` or None if not interned. Exact match only."""
        return self._ids.get(name)

    def id_of_fold(self, name: str) -> int | None:
        """Case-insensitive lookup; first interned casing wins."""
        eid = self._ids.get(name)
        if eid is not None:
            return eid
        if self._lower is None:
            lower: dict[str, int] = {}
            for i, n in enumerate(self._names):
                lower.setdefault(n.lower(), i)
            self._lower = lower
        return self._lower.get(name.lower())

    def name_of(self, eid: int) -> str:
        return self._names[eid]

    def suggest(self, name: str, limit: int = 5) -> list[str]:
        """Interned names sharing a prefix with ``name`` (for error messages)."""
        probe = name.lower()
        out = []
        for cand in self._names:
            low = cand.lower()
            if low.startswith(probe) or probe.startswith(low):
                out.append(cand)
                if len(out) >= limit:
                    break
        return out

    @property
    def names(self) -> list[str]:
        return self._names

    def __len__(self) -> int:
        return len(self._names)

    def __contains__(self, name: str) -> bool:
        return name in self._ids

    def __iter__(self) -> Iterator[str]:
        return iter(self._names)

    # the lock is process-local; name list is the whole state
    def __getstate__(self):
        return self._names

    def __setstate__(self, names):
        self._names = list(names)
        self._ids = {name: i for i, name in enumerate(self._names)}
        self._lock = threading.Lock()
        self._lower = None
