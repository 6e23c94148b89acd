"""Software universe graph: releases linked by dependency and update edges."""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from datetime import datetime
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import (
    ChainConflict,
    DuplicateEdge,
    DuplicateNode,
    NameMismatch,
    SelfDependency,
    TimeOrderViolation,
    UnknownNode,
    UnknownProject,
)
from .timeutil import to_millis, to_utc


class NodeKey(NamedTuple):
    name: str
    release: str

    @classmethod
    def parse(cls, text: str) -> NodeKey:
        """Split ``"name@release"`` at the last ``@``."""
        name, sep, release = text.rpartition("@")
        if not sep or not name or not release:
            raise ValueError(f"expected name@release, got {text!r}")
        return cls(name, release)

    def __str__(self) -> str:
        return f"{self.name}@{self.release}"


@dataclass(frozen=True)
class ReleaseNode:
    name: str
    release: str
    time: datetime

    def __post_init__(self):
        if not self.name or not self.release:
            raise ValueError("name and release must be non-empty")
        object.__setattr__(self, "time", to_utc(self.time))

    @property
    def key(self) -> NodeKey:
        return NodeKey(self.name, self.release)


def _as_key(key) -> NodeKey:
    if isinstance(key, NodeKey):
        return key
    if isinstance(key, ReleaseNode):
        return key.key
    if isinstance(key, str):
        return NodeKey.parse(key)
    return NodeKey(*key)


class _CSR(NamedTuple):
    fwd_indptr: np.ndarray
    fwd_indices: np.ndarray
    rev_indptr: np.ndarray
    rev_indices: np.ndarray


def _build_csr(n: int, src: np.ndarray, dst: np.ndarray) -> _CSR:
    def one_way(a, b):
        order = np.lexsort((b, a))
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(a, minlength=n), out=indptr[1:])
        return indptr, np.ascontiguousarray(b[order], dtype=np.int64)

    fi, fx = one_way(src, dst)
    ri, rx = one_way(dst, src)
    return _CSR(fi, fx, ri, rx)


class Universe:
    """A software universe graph (SUG).

    Built single-threaded through ``add_node``/``add_dependency``/``add_update``;
    once construction is over it is treated as immutable and may be shared
    across threads for read-only queries. Derived indexes are cached lazily
    and dropped on any mutation.
    """

    def __init__(self, nodes: Iterable[ReleaseNode] = ()):
        self._nodes: list[ReleaseNode] = []
        self._index: dict[NodeKey, int] = {}
        self._out: list[set[int]] = []
        self._in: list[set[int]] = []
        self._next: list[int] = []
        self._prev: list[int] = []
        self._n_dep = 0
        self._cache: dict = {}
        for node in nodes:
            self.add_node(node)

    # construction

    def add_node(self, node: ReleaseNode) -> Universe:
        if node.key in self._index:
            raise DuplicateNode(f"node {node.key} already present")
        self._index[node.key] = len(self._nodes)
        self._nodes.append(node)
        self._out.append(set())
        self._in.append(set())
        self._next.append(-1)
        self._prev.append(-1)
        self._cache.clear()
        return self

    def add_dependency(self, source, target) -> Universe:
        i, j = self._idx(source), self._idx(target)
        if i == j:
            raise SelfDependency(f"{self._nodes[i].key} cannot depend on itself")
        if j in self._out[i]:
            raise DuplicateEdge(f"{self._nodes[i].key} -> {self._nodes[j].key} already present")
        self._out[i].add(j)
        self._in[j].add(i)
        self._n_dep += 1
        self._cache.clear()
        return self

    def add_update(self, source, target, *, allow_equal_time: bool = False) -> Universe:
        """Link ``target`` as the immediate successor release of ``source``.

        ``allow_equal_time`` lets ingestion chain same-timestamp releases
        after it has ordered them by version; direct callers get the strict
        time check.
        """
        i, j = self._idx(source), self._idx(target)
        a, b = self._nodes[i], self._nodes[j]
        if a.name != b.name:
            raise NameMismatch(f"update {a.key} => {b.key} crosses project names")
        if not (a.time < b.time or (allow_equal_time and a.time == b.time and i != j)):
            raise TimeOrderViolation(f"update {a.key} => {b.key} does not move forward in time")
        if self._next[i] != -1:
            raise ChainConflict(f"{a.key} already has a successor")
        if self._prev[j] != -1:
            raise ChainConflict(f"{b.key} already has a predecessor")
        self._next[i] = j
        self._prev[j] = i
        self._cache.clear()
        return self

    # basic access

    def _idx(self, key) -> int:
        key = _as_key(key)
        try:
            return self._index[key]
        except KeyError:
            raise UnknownNode(f"unknown node {key}") from None

    def __len__(self) -> int:
        return len(self._nodes)

    def __contains__(self, key) -> bool:
        try:
            return _as_key(key) in self._index
        except (TypeError, ValueError):
            return False

    def __iter__(self) -> Iterator[ReleaseNode]:
        return iter(self._nodes)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Universe):
            return NotImplemented
        return (
            set(self._nodes) == set(other._nodes)
            and self.dep_edges == other.dep_edges
            and self.up_edges == other.up_edges
        )

    def __repr__(self) -> str:
        return f"Universe(nodes={len(self)}, dep_edges={self._n_dep}, up_edges={len(self.up_edges)})"

    @property
    def nodes(self) -> tuple[ReleaseNode, ...]:
        return tuple(self._nodes)

    def node(self, key) -> ReleaseNode:
        return self._nodes[self._idx(key)]

    @property
    def dep_edges(self) -> frozenset[tuple[NodeKey, NodeKey]]:
        keys = [n.key for n in self._nodes]
        return frozenset((keys[i], keys[j]) for i, out in enumerate(self._out) for j in out)

    @property
    def up_edges(self) -> frozenset[tuple[NodeKey, NodeKey]]:
        keys = [n.key for n in self._nodes]
        return frozenset((keys[i], keys[j]) for i, j in enumerate(self._next) if j != -1)

    @property
    def n_dep_edges(self) -> int:
        return self._n_dep

    def depend(self, key) -> set[NodeKey]:
        return {self._nodes[j].key for j in self._out[self._idx(key)]}

    def rev_depend(self, key) -> set[NodeKey]:
        return {self._nodes[j].key for j in self._in[self._idx(key)]}

    def successor(self, key) -> NodeKey | None:
        j = self._next[self._idx(key)]
        return None if j == -1 else self._nodes[j].key

    def predecessor(self, key) -> NodeKey | None:
        j = self._prev[self._idx(key)]
        return None if j == -1 else self._nodes[j].key

    def chain(self, key) -> list[NodeKey]:
        """Members of ``key``'s project in update order."""
        i = self._idx(key)
        while self._prev[i] != -1:
            i = self._prev[i]
        out = []
        while i != -1:
            out.append(self._nodes[i].key)
            i = self._next[i]
        return out

    def precedes(self, a, b) -> bool:
        """True when ``b`` is reachable from ``a`` by one or more update edges."""
        i, j = self._idx(a), self._idx(b)
        i = self._next[i]
        while i != -1:
            if i == j:
                return True
            i = self._next[i]
        return False

    # derived indexes

    def _labels(self) -> np.ndarray:
        """Project label per node index (smallest member index)."""
        if "labels" not in self._cache:
            src = np.array([i for i, j in enumerate(self._next) if j != -1], dtype=np.int64)
            dst = np.array([j for j in self._next if j != -1], dtype=np.int64)
            self._cache["labels"] = kernels.component_labels(len(self._nodes), src, dst)
        return self._cache["labels"]

    def _csr(self) -> _CSR:
        if "csr" not in self._cache:
            src = np.fromiter((i for i, out in enumerate(self._out) for _ in out), dtype=np.int64, count=self._n_dep)
            dst = np.fromiter((j for out in self._out for j in out), dtype=np.int64, count=self._n_dep)
            self._cache["csr"] = _build_csr(len(self._nodes), src, dst)
        return self._cache["csr"]

    def _times(self) -> np.ndarray:
        if "times" not in self._cache:
            self._cache["times"] = np.array([to_millis(n.time) for n in self._nodes], dtype=np.int64)
        return self._cache["times"]

    # projects

    def project_of(self, key) -> frozenset[NodeKey]:
        labels = self._labels()
        lab = labels[self._idx(key)]
        return frozenset(self._nodes[i].key for i in np.flatnonzero(labels == lab).tolist())

    def project_count(self, keys: Iterable) -> int:
        """The number of distinct projects among ``keys``."""
        labels = self._labels()
        return len({int(labels[self._idx(k)]) for k in keys})

    def timed_subgraph(self, t: datetime | None) -> Universe:
        """State of the universe at ``t``: nodes released no later than ``t``.

        ``None`` stands for +infinity and returns a copy of the whole graph.
        """
        if t is None:
            keep = list(range(len(self._nodes)))
        else:
            cutoff = to_millis(t)
            keep = np.flatnonzero(self._times() <= cutoff).tolist()
        sub = Universe(self._nodes[i] for i in keep)
        alive = set(keep)
        for i in keep:
            for j in self._out[i]:
                if j in alive:
                    sub.add_dependency(self._nodes[i].key, self._nodes[j].key)
            j = self._next[i]
            if j != -1 and j in alive:
                sub._next[sub._index[self._nodes[i].key]] = sub._index[self._nodes[j].key]
                sub._prev[sub._index[self._nodes[j].key]] = sub._index[self._nodes[i].key]
        sub._cache.clear()
        return sub

    def aggregate(self) -> ProjectView:
        if "view" not in self._cache:
            self._cache["view"] = ProjectView._from_universe(self)
        return self._cache["view"]


@dataclass(frozen=True, eq=False)
class ProjectView:
    """Project-level aggregation (P-SUG) of a :class:`Universe`.

    Project ids are the shared release name, or ``name@first-release`` when
    several unlinked chains carry the same name.
    """

    universe: Universe
    members: dict[str, tuple[NodeKey, ...]]
    dep_edges: frozenset[tuple[str, str]]
    _node_project: dict[NodeKey, str] = field(repr=False)
    _pos: dict[str, int] = field(repr=False)
    _csr: _CSR = field(repr=False)

    @classmethod
    def _from_universe(cls, u: Universe) -> ProjectView:
        labels = u._labels().tolist()
        roots = sorted(set(labels))
        name_uses: dict[str, int] = {}
        for r in roots:
            name_uses[u._nodes[r].name] = name_uses.get(u._nodes[r].name, 0) + 1
        label_id = {}
        for r in roots:
            # chain head: walk predecessors from any member
            head = r
            while u._prev[head] != -1:
                head = u._prev[head]
            node = u._nodes[head]
            label_id[r] = node.name if name_uses[node.name] == 1 else f"{node.name}@{node.release}"
        node_project = {n.key: label_id[labels[i]] for i, n in enumerate(u._nodes)}
        members = {}
        for r in roots:
            members[label_id[r]] = tuple(u.chain(u._nodes[r].key))
        members = dict(sorted(members.items()))
        edges = set()
        for i, out in enumerate(u._out):
            pa = label_id[labels[i]]
            for j in out:
                pb = label_id[labels[j]]
                if pa != pb:
                    edges.add((pa, pb))
        pos = {pid: k for k, pid in enumerate(members)}
        src = np.array([pos[a] for a, _ in sorted(edges)], dtype=np.int64)
        dst = np.array([pos[b] for _, b in sorted(edges)], dtype=np.int64)
        csr = _build_csr(len(members), src, dst)
        return cls(u, members, frozenset(edges), node_project, pos, csr)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(self.members)

    def __contains__(self, pid) -> bool:
        return pid in self._pos

    def __len__(self) -> int:
        return len(self.members)

    def _p(self, pid: str) -> int:
        try:
            return self._pos[pid]
        except (KeyError, TypeError):
            raise UnknownProject(f"unknown project {pid!r}") from None

    def project_of_node(self, key) -> str:
        key = _as_key(key)
        try:
            return self._node_project[key]
        except KeyError:
            raise UnknownNode(f"unknown node {key}") from None

    def depend(self, pid: str) -> set[str]:
        p = self._p(pid)
        ids = self.ids
        c = self._csr
        return {ids[q] for q in c.fwd_indices[c.fwd_indptr[p]:c.fwd_indptr[p + 1]].tolist()}

    def rev_depend(self, pid: str) -> set[str]:
        p = self._p(pid)
        ids = self.ids
        c = self._csr
        return {ids[q] for q in c.rev_indices[c.rev_indptr[p]:c.rev_indptr[p + 1]].tolist()}

    def popularity(self, pid: str) -> int:
        p = self._p(pid)
        return int(self._csr.rev_indptr[p + 1] - self._csr.rev_indptr[p])
